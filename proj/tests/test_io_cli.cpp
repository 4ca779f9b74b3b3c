#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <unistd.h>

#include "doctest.h"
#include "sqa/cli.hpp"
#include "sqa/error.hpp"
#include "sqa/figures.hpp"
#include "sqa/io.hpp"
#include "sqa/manifest.hpp"
#include "sqa/sweep.hpp"

using namespace sqa;
namespace fs = std::filesystem;

namespace {

std::string join(const std::vector<std::string>& v) {
  std::string s;
  for (const auto& x : v) s += (s.empty() ? "" : ",") + x;
  return s;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

struct TempDir {
  fs::path path;
  TempDir() {
    static int counter = 0;
    path = fs::temp_directory_path() /
           ("sqa_io_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

struct Cli {
  std::ostringstream out, err;
  int operator()(std::vector<std::string> args) {
    out.str("");
    err.str("");
    return cli::run(args, out, err);
  }
};

}  // namespace

TEST_CASE("golden schema headers") {
  CHECK(io::kCsvSchemaVersion == 1);
  CHECK(join(io::schema::exact_eq) == "gamma,T,eps_c");
  CHECK(join(io::schema::exact_qa) == "t,gamma,eps_res");
  CHECK(join(io::schema::exact_qa_final) == "tau,eps_res");
  CHECK(join(io::schema::pimc_eq) == "P,gamma,temp,moves,eps_c_est,stderr,t_burn,geweke_z,n_mcs");
  CHECK(join(io::schema::sqa) == "t_mcs,gamma,eps_avg_mean,eps_avg_sem,eps_min_mean,eps_min_sem,n_reps");
  CHECK(join(io::schema::sqa_final) == "tau,P,moves,eps_avg_mean,eps_avg_sem,eps_min_mean,eps_min_sem,n_reps");
}

TEST_CASE("reals print shortest and read back exactly") {
  CHECK(io::format_real(0.1) == "0.1");
  CHECK(io::format_real(2.5) == "2.5");
  CHECK(io::format_real(1e-300) == "1e-300");
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> u(-10, 10);
  for (int k = 0; k < 1000; ++k) {
    const double x = std::exp(u(gen)) * (k % 2 ? 1 : -1);
    CHECK(std::stod(io::format_real(x)) == x);
  }
}

TEST_CASE("csv round trip") {
  io::CsvTable t(io::schema::exact_qa);
  t.add_row({"0", "2.5", "0.25"});
  t.add_row({"1.5", io::format_real(1.0 / 3.0), "1e-07"});
  const io::CsvTable back = io::parse_csv(t.str());
  CHECK(back.header() == t.header());
  CHECK(back.rows() == t.rows());
  CHECK(back.column("gamma")[1] == 1.0 / 3.0);
  CHECK_THROWS_AS(t.add_row({"1", "2"}), ValidationError);
  CHECK_THROWS_AS(t.column("nope"), ValidationError);
}

TEST_CASE("parse errors carry the line") {
  try {
    io::parse_csv("a,b\n1,2\n3\n");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 3);
  }
  const io::CsvTable t = io::parse_csv("a,b\n1,2\n3,x\n");
  try {
    t.column("b");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 3);
  }
  CHECK_THROWS_AS(io::parse_csv(""), ParseError);
}

TEST_CASE("manifest json round trip") {
  RunManifest m;
  m.subcommand = "sqa";
  m.argv = {"--seed", "4", "sqa", "--tau", "10"};
  m.params["tau"] = "10";
  m.seed = 4;
  m.instance_checksum = "00ff";
  m.csv_schema = 1;
  m.outputs = {{"a.csv", "0123456789abcdef"}};
  const RunManifest back = manifest_from_json(to_json(m));
  CHECK(back.argv == m.argv);
  CHECK(back.seed == 4);
  CHECK(back.outputs.size() == 1);
  CHECK(back.outputs[0].hash == m.outputs[0].hash);
  CHECK(to_json(back).dump() == to_json(m).dump());
  CHECK_THROWS_AS(manifest_from_json(nlohmann::ordered_json{{"tool", "sqa"}}), ValidationError);
}

TEST_CASE("sweep execution") {
  const std::vector<int> none;
  try {
    sweep_execute<int>(none, 2, [](int x) { return x; });
    FAIL("expected ValidationError");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()) == "no parameter points");
  }
  const std::vector<int> pts = {1, 2, 3, 4, 5};
  const auto o = sweep_execute<int>(pts, 3, [](int x) {
    if (x == 3) throw AccuracyError("boom");
    return 10 * x;
  });
  CHECK_FALSE(o.complete());
  CHECK(*o.results[4] == 50);
  CHECK_FALSE(o.results[2].has_value());
  CHECK(o.errors[2] == "boom");
}

TEST_CASE("cli pimc sweep is worker independent and replayable") {
  TempDir tmp;
  Cli run;
  const std::string d = tmp.path.string();
  REQUIRE(run({"--seed", "9", "--out-dir", d, "gen-instance", "-L", "6"}) == 0);
  const std::string inst = (tmp.path / "instance.txt").string();

  auto sweep = [&](const std::string& dir, const std::string& workers, const std::string& reps) {
    return run({"--seed", "9", "--workers", workers, "--out-dir", dir, "pimc-eq", "--instance", inst, "-P", "2,4",
                "--gamma", "1", "--temp", "0.5", "--moves", "time,sw", "--mcs", "600", "--reps", reps});
  };
  REQUIRE(sweep(d + "/w1", "1", "3") == 0);
  REQUIRE(sweep(d + "/w3", "3", "3") == 0);
  CHECK(slurp(tmp.path / "w1/pimc_eq.csv") == slurp(tmp.path / "w3/pimc_eq.csv"));
  CHECK(slurp(tmp.path / "w1/pimc-eq.manifest.json") == slurp(tmp.path / "w3/pimc-eq.manifest.json"));

  // three repetitions: three rows per point, repetition 0 first
  const io::CsvTable t = io::read_csv(tmp.path / "w1/pimc_eq.csv");
  REQUIRE(t.size() == 12);
  const auto p = t.column("P");
  const auto moves = t.text_column("moves");
  for (std::size_t j = 0; j < 12; ++j) {
    CHECK(p[j] == (j < 6 ? 2 : 4));
    CHECK(moves[j] == ((j / 3) % 2 == 0 ? "time" : "sw"));
  }
  REQUIRE(sweep(d + "/r1", "2", "1") == 0);
  const io::CsvTable single = io::read_csv(tmp.path / "r1/pimc_eq.csv");
  CHECK(single.rows()[0] == t.rows()[0]);
  CHECK(single.rows()[1] == t.rows()[3]);

  REQUIRE(run({"--out-dir", d, "replay", "--manifest", d + "/w1/pimc-eq.manifest.json", "--into", d + "/again"}) ==
          0);
  CHECK(run.out.str().find("all 1 outputs reproduced") != std::string::npos);
  CHECK(slurp(tmp.path / "again/pimc_eq.csv") == slurp(tmp.path / "w1/pimc_eq.csv"));

  // a manifest whose recorded hash is wrong fails the replay
  RunManifest m = read_manifest(tmp.path / "w1/pimc-eq.manifest.json");
  m.outputs[0].hash = "0000000000000000";
  write_manifest(m, tmp.path / "bad.manifest.json");
  CHECK(run({"--out-dir", d, "replay", "--manifest", d + "/bad.manifest.json", "--into", d + "/bad"}) == 3);
}

TEST_CASE("cli exact runs, fits and config sections") {
  TempDir tmp;
  Cli run;
  const std::string d = tmp.path.string();
  REQUIRE(run({"--out-dir", d, "gen-instance", "-L", "8", "--distribution", "ordered(1)"}) == 0);
  const std::string inst = (tmp.path / "instance.txt").string();

  {
    std::ofstream f(tmp.path / "run.ini");
    f << "[exact-eq]\ngamma-grid = 0:2:0.5\ntemp = 0 0.5\n";
  }
  REQUIRE(run({"--out-dir", d, "--config", d + "/run.ini", "exact-eq", "--instance", inst}) == 0);
  const io::CsvTable eq = io::read_csv(tmp.path / "exact_eq.csv");
  CHECK(eq.size() == 10);
  CHECK(eq.column("T")[9] == 0.5);
  CHECK(std::abs(eq.column("eps_c")[0]) < 1e-14);
  // the manifest spells out values that came from the config file
  CHECK(join(read_manifest(tmp.path / "exact-eq.manifest.json").argv).find("--gamma-grid,0:2:0.5") !=
        std::string::npos);

  REQUIRE(run({"--out-dir", d, "exact-qa", "--instance", inst, "--tau", "1,4", "--records", "20"}) == 0);
  const io::CsvTable qa = io::read_csv(tmp.path / "exact_qa_tau4.csv");
  CHECK(qa.size() == 21);
  CHECK(qa.column("gamma").back() == 0.0);
  CHECK(io::read_csv(tmp.path / "exact_qa_final.csv").size() == 2);

  REQUIRE(run({"--out-dir", d, "fit-teff", "--input", d + "/exact_qa_tau4.csv", "--instance", inst}) == 0);
  const auto teff = nlohmann::json::parse(slurp(tmp.path / "fit_teff.json"));
  CHECK(teff["parameter"].get<double>() > 0.0);
  CHECK(teff["window"][1].get<double>() == 1.5);

  {
    io::CsvTable t(io::schema::exact_qa_final);
    for (double tau : {1.0, 2.0, 4.0, 8.0, 16.0, 32.0})
      t.add_row({io::format_real(tau), io::format_real(3.0 * std::pow(tau, -0.5))});
    io::write_csv(t, tmp.path / "power.csv");
  }
  REQUIRE(run({"--out-dir", d, "fit-powerlaw", "--input", d + "/power.csv", "--window", "1:32"}) == 0);
  const auto pw = nlohmann::json::parse(slurp(tmp.path / "fit_powerlaw.json"));
  CHECK(pw["parameter"].get<double>() == doctest::Approx(-0.5).epsilon(1e-12));
  CHECK(pw["residual_rms"].get<double>() >= 0.0);
}

TEST_CASE("cli exit codes") {
  TempDir tmp;
  Cli run;
  const std::string d = tmp.path.string();
  CHECK(run({"--help"}) == 0);
  CHECK(run({}) == 2);
  CHECK(run({"bogus"}) == 2);
  CHECK(run({"--out-dir", d, "exact-eq", "--instance", d + "/missing.txt"}) == 2);
  CHECK(run({"--out-dir", d, "gen-instance", "-L", "1"}) == 2);
  CHECK(run({"--out-dir", d, "figure", "--id", "fig9"}) == 2);
  CHECK(run.err.str().find("unknown figure id") != std::string::npos);

  CHECK(run({"--out-dir", d, "--max-mcs", "1000", "figure", "--id", "fig1"}) == 2);
  CHECK(run.err.str().find(std::to_string(figures::estimate_mcs("fig1", false))) != std::string::npos);
  CHECK(run({"--out-dir", d, "figure", "--id", "fig2", "--desk-scale", "--max-mcs", "10"}) == 2);

  REQUIRE(run({"--out-dir", d, "gen-instance", "-L", "6"}) == 0);
  const std::string inst = d + "/instance.txt";
  CHECK(run({"--out-dir", d, "exact-qa", "--instance", inst, "--tau", "1", "--dt", "0.9"}) == 3);
  CHECK(run({"--out-dir", d, "pimc-eq", "--instance", inst, "-P", "2", "--gamma", "1", "--temp", "-1", "--mcs",
             "10"}) == 2);
  CHECK(run({"--out-dir", d, "exact-eq", "--instance", inst, "--gamma-grid", "0:1"}) == 2);
}
