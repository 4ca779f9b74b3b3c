#include "sqa/cli.hpp"

#include <CLI11.hpp>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <thread>

#include "sqa/analysis.hpp"
#include "sqa/annealing.hpp"
#include "sqa/error.hpp"
#include "sqa/exact_fermion.hpp"
#include "sqa/figures.hpp"
#include "sqa/io.hpp"
#include "sqa/manifest.hpp"
#include "sqa/sweep.hpp"

namespace sqa::cli {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

double parse_real(const std::string& text, const std::string& what) {
  double x = 0.0;
  const char* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, x);
  if (ec != std::errc() || ptr != end) throw ValidationError("bad number '" + text + "' in " + what);
  return x;
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::size_t b = 0;
  for (;;) {
    const std::size_t e = text.find(sep, b);
    parts.push_back(text.substr(b, e - b));
    if (e == std::string::npos) return parts;
    b = e + 1;
  }
}

// a:b:step, inclusive of b up to rounding
std::vector<double> parse_grid(const std::string& spec) {
  const auto p = split(spec, ':');
  if (p.size() != 3) throw ValidationError("grid '" + spec + "' is not a:b:step");
  const double a = parse_real(p[0], "--gamma-grid");
  const double b = parse_real(p[1], "--gamma-grid");
  const double h = parse_real(p[2], "--gamma-grid");
  if (!(h > 0.0) || !(b >= a)) throw ValidationError("grid '" + spec + "' needs step > 0 and b >= a");
  const auto n = static_cast<std::size_t>(std::floor((b - a) / h + 1e-9));
  std::vector<double> g;
  for (std::size_t k = 0; k <= n; ++k) g.push_back(a + h * static_cast<double>(k));
  return g;
}

std::optional<analysis::FitWindow> parse_window(const std::string& spec) {
  if (spec.empty()) return std::nullopt;
  const auto p = split(spec, ':');
  if (p.size() != 2) throw ValidationError("window '" + spec + "' is not lo:hi");
  analysis::FitWindow w{parse_real(p[0], "--window"), parse_real(p[1], "--window")};
  if (!(w.hi > w.lo)) throw ValidationError("window '" + spec + "' is empty");
  return w;
}

struct Globals {
  std::uint64_t seed = 0;
  std::size_t workers = std::max(1u, std::thread::hardware_concurrency());
  std::string out_dir = ".";
  bool desk = false;
  std::uint64_t max_mcs = 1000000000;
};

// What a subcommand leaves behind for the manifest.
struct Run {
  const Globals& g;
  std::ostream& out;
  fs::path dir;
  ordered_json params = ordered_json::object();
  std::string instance_checksum;
  std::vector<std::string> files;
  std::string manifest_name;
  std::string failure;  // partial result: outputs written, exit nonzero

  Run(const Globals& globals, std::ostream& stream, fs::path d) : g(globals), out(stream), dir(std::move(d)) {}

  void csv(const std::string& name, const io::CsvTable& t) {
    io::write_csv(t, dir / name);
    files.push_back(name);
    out << "wrote " << (dir / name).string() << " (" << t.size() << " rows)\n";
  }
  void json(const std::string& name, const ordered_json& j) {
    std::ofstream f(dir / name, std::ios::binary);
    if (!f) throw ValidationError("cannot write " + (dir / name).string());
    f << j.dump(2) << '\n';
    files.push_back(name);
    out << j.dump(2) << '\n';
  }
  Instance instance(const std::string& path) {
    Instance inst = load_instance(path);
    instance_checksum = io::hex64(checksum(inst));
    return inst;
  }
};

std::string tag(double x) { return io::format_real(x); }

// ---- subcommands -------------------------------------------------------

struct GenInstance {
  std::size_t length = 0;
  std::string distribution = "uniform01";
  std::string output = "instance.txt";

  void add(CLI::App& sub) {
    sub.add_option("--length,-L", length, "Number of spins")->required();
    sub.add_option("--distribution", distribution, "uniform01 or ordered(<J>)");
    sub.add_option("--output", output, "File name inside --out-dir");
  }
  void run(Run& r) {
    const Instance inst = generate_instance(length, parse_distribution(distribution), r.g.seed);
    save_instance(inst, r.dir / output);
    r.files.push_back(output);
    r.instance_checksum = io::hex64(checksum(inst));
    r.out << "wrote " << (r.dir / output).string() << " checksum " << r.instance_checksum << '\n';
  }
};

struct ExactEq {
  std::string instance;
  std::string grid = "0:2.5:0.05";
  std::vector<double> temps{0.01};
  std::string output = "exact_eq.csv";

  void add(CLI::App& sub) {
    sub.add_option("--instance", instance, "Instance file")->required();
    sub.add_option("--gamma-grid", grid, "Transverse field grid a:b:step");
    sub.add_option("--temp", temps, "Temperatures (T = 0 allowed)")->delimiter(',');
    sub.add_option("--output", output, "File name inside --out-dir");
  }
  void run(Run& r) {
    const Instance inst = r.instance(instance);
    for (double t : temps)
      if (!(t >= 0.0)) throw ValidationError("temperature must be >= 0");
    r.csv(output, figures::exact_table(inst, parse_grid(grid), temps));
  }
};

struct ExactQa {
  std::string instance;
  std::vector<double> taus;
  double gamma0 = 2.5;
  std::size_t gamma_steps = 0;
  double dt = 0.0;
  double stride = 0.0;
  std::size_t records = 200;

  void add(CLI::App& sub) {
    sub.add_option("--instance", instance, "Instance file")->required();
    sub.add_option("--tau", taus, "Annealing times")->required()->delimiter(',');
    sub.add_option("--gamma0", gamma0, "Initial transverse field");
    sub.add_option("--gamma-steps", gamma_steps, "Staircase levels (0: linear ramp)");
    sub.add_option("--dt", dt, "RK4 step (0: automatic)");
    sub.add_option("--stride", stride, "Time between records (overrides --records)");
    sub.add_option("--records", records, "Records per trajectory after t = 0");
  }
  void run(Run& r) {
    const Instance inst = r.instance(instance);
    if (!(stride >= 0.0)) throw ValidationError("--stride must be >= 0");
    auto curves = parallel_map<std::vector<TrajectoryRecord>>(taus.size(), r.g.workers, [&](std::size_t j) {
      exact::EvolveOptions o;
      o.dt = dt;
      o.records = stride > 0.0 ? static_cast<std::size_t>(std::max(1.0, std::round(taus[j] / stride))) : records;
      return exact::coherent_qa_evolve(inst, Schedule{gamma0, taus[j], gamma_steps}, o);
    });
    io::CsvTable final_table(io::schema::exact_qa_final);
    for (std::size_t j = 0; j < taus.size(); ++j) {
      figures::QaCurve c{taus[j], curves[j]};
      r.csv("exact_qa_tau" + tag(taus[j]) + ".csv", figures::qa_trajectory_table(c));
      final_table.add_row({tag(taus[j]), tag(c.final())});
    }
    r.csv("exact_qa_final.csv", final_table);
  }
};

struct PimcEq {
  std::string instance;
  std::vector<std::size_t> trotters;
  std::vector<double> gammas;
  std::vector<double> temps;
  std::vector<std::string> moves{"sw"};
  std::uint64_t mcs = 0;
  std::size_t reps = 1;
  std::string output = "pimc_eq.csv";

  void add(CLI::App& sub) {
    sub.add_option("--instance", instance, "Instance file")->required();
    sub.add_option("--trotter,-P", trotters, "Trotter numbers")->required()->delimiter(',');
    sub.add_option("--gamma", gammas, "Transverse fields")->required()->delimiter(',');
    sub.add_option("--temp", temps, "Temperatures")->required()->delimiter(',');
    sub.add_option("--moves", moves, "Move families: time, sw, wolff")->delimiter(',');
    sub.add_option("--mcs", mcs, "Monte Carlo steps per run")->required();
    sub.add_option("--reps", reps, "Independent runs per parameter point");
    sub.add_option("--output", output, "File name inside --out-dir");
  }
  void run(Run& r) {
    const Instance inst = r.instance(instance);
    std::vector<figures::EqPoint> points;
    for (auto p : trotters)
      for (double g : gammas)
        for (double t : temps)
          for (const auto& m : moves)
            for (std::size_t k = 0; k < reps; ++k) points.push_back({p, g, t, pimc::parse_moves(m), k});
    for (const auto& pt : points) {
      pimc::PimcParams params;
      params.temperature = pt.temperature;
      params.gamma = pt.gamma;
      params.trotter = pt.trotter;
      params.moves = pt.moves;
      params.t_run = mcs;
      pimc::validate(params);
    }
    const std::uint64_t budget = mcs * points.size();
    if (r.g.max_mcs != 0 && budget > r.g.max_mcs)
      throw ValidationError("sweep needs " + std::to_string(budget) + " MCS, above --max-mcs " +
                            std::to_string(r.g.max_mcs));
    const auto outcome = figures::pimc_sweep(inst, points, mcs, r.g.seed, r.g.workers);
    r.csv(output, figures::pimc_table(outcome));
    try {
      figures::require_complete(outcome);
    } catch (const AccuracyError& e) {
      r.failure = e.what();
    }
  }
};

struct Sqa {
  std::string instance;
  std::vector<std::uint64_t> taus;
  double gamma0 = 2.5;
  std::size_t gamma_steps = 0;
  std::size_t trotter = 32;
  double temp = 0.01;
  std::string moves = "time";
  std::size_t reps = 32;
  std::size_t stride = 0;
  std::size_t t_eq = 0;

  void add(CLI::App& sub) {
    sub.add_option("--instance", instance, "Instance file")->required();
    sub.add_option("--tau", taus, "Annealing times in MCS")->required()->delimiter(',');
    sub.add_option("--gamma0", gamma0, "Initial transverse field");
    sub.add_option("--gamma-steps", gamma_steps, "Staircase levels (0: linear ramp)");
    sub.add_option("--trotter,-P", trotter, "Trotter number");
    sub.add_option("--temp", temp, "Temperature");
    sub.add_option("--moves", moves, "time, sw or wolff");
    sub.add_option("--reps", reps, "Repetitions");
    sub.add_option("--stride", stride, "MCS between records (0: about 200 records)");
    sub.add_option("--t-eq", t_eq, "Equilibration MCS at gamma0 (0: max(1000, tau/10))");
  }
  void run(Run& r) {
    const Instance inst = r.instance(instance);
    const pimc::MoveFamily family = pimc::parse_moves(moves);
    std::uint64_t budget = 0;
    for (auto tau : taus) budget += reps * (tau + (t_eq ? t_eq : anneal::default_equilibration(tau)));
    if (r.g.max_mcs != 0 && budget > r.g.max_mcs)
      throw ValidationError("run needs " + std::to_string(budget) + " MCS, above --max-mcs " +
                            std::to_string(r.g.max_mcs));
    std::vector<figures::SqaCurve> curves;
    for (auto tau : taus) {
      anneal::SqaOptions o;
      o.temperature = temp;
      o.trotter = trotter;
      o.schedule = Schedule{gamma0, static_cast<double>(tau), gamma_steps};
      o.moves = family;
      o.reps = reps;
      o.stride = stride;
      o.t_eq = t_eq;
      o.seed = figures::curve_seed(r.g.seed, trotter, family, tau);
      o.workers = r.g.workers;
      figures::SqaCurve c;
      c.trotter = trotter;
      c.moves = family;
      c.tau = tau;
      c.points = anneal::aggregate(anneal::sqa_run(inst, o));
      r.csv("sqa_tau" + std::to_string(tau) + ".csv", figures::sqa_trajectory_table(c));
      curves.push_back(std::move(c));
    }
    r.csv("sqa_final.csv", figures::sqa_final_table(curves));
  }
};

// Picks the eps column of a trajectory or final-value table.
std::vector<double> eps_column(const io::CsvTable& t, const std::string& requested) {
  if (!requested.empty()) return t.column(requested);
  for (const char* name : {"eps_avg_mean", "eps_res", "eps_c", "eps_c_est"})
    if (t.has_column(name)) return t.column(name);
  throw ValidationError("input has no eps column (eps_avg_mean, eps_res, eps_c); use --column");
}

struct FitTeff {
  std::string input;
  std::string instance;
  std::string window = "0:1.5";
  double t_min = 0.0;
  double t_max = 10.0;
  std::string column;
  std::string output = "fit_teff.json";

  void add(CLI::App& sub) {
    sub.add_option("--input", input, "Trajectory CSV with a gamma column")->required();
    sub.add_option("--instance", instance, "Instance the trajectory was run on")->required();
    sub.add_option("--window", window, "Gamma window lo:hi");
    sub.add_option("--t-min", t_min, "Lower end of the temperature bracket (the bath T)");
    sub.add_option("--t-max", t_max, "Upper end of the temperature bracket");
    sub.add_option("--column", column, "eps column (default: eps_avg_mean or eps_res)");
    sub.add_option("--output", output, "File name inside --out-dir");
  }
  void run(Run& r) {
    const Instance inst = r.instance(instance);
    const io::CsvTable t = io::read_csv(input);
    const auto gammas = t.column("gamma");
    const auto eps = eps_column(t, column);
    std::vector<analysis::GammaSample> traj;
    double g_hi = 2.5;
    for (std::size_t j = 0; j < gammas.size(); ++j) {
      traj.push_back({gammas[j], eps[j]});
      g_hi = std::max(g_hi, gammas[j]);
    }
    std::vector<double> grid(251);
    for (std::size_t k = 0; k < grid.size(); ++k) grid[k] = g_hi * static_cast<double>(k) / 250.0;
    const exact::EquilibriumTable table(inst, grid);
    analysis::TeffOptions o;
    o.window = *parse_window(window);
    o.t_min = t_min;
    o.t_max = t_max;
    r.json(output, figures::fit_json(analysis::fit_teff(traj, table, o)));
  }
};

std::vector<analysis::PowerPoint> power_points(const std::string& path, const std::string& column) {
  const io::CsvTable t = io::read_csv(path);
  const auto tau = t.has_column("tau") ? t.column("tau") : t.column("t_mcs");
  const auto eps = eps_column(t, column);
  std::vector<analysis::PowerPoint> pts;
  for (std::size_t j = 0; j < tau.size(); ++j) pts.push_back({tau[j], eps[j]});
  return pts;
}

struct FitPowerLaw {
  std::string input;
  std::string window;
  std::string column;
  std::string output = "fit_powerlaw.json";

  void add(CLI::App& sub) {
    sub.add_option("--input", input, "CSV with tau and eps columns")->required();
    sub.add_option("--window", window, "tau window lo:hi (default: central decade)");
    sub.add_option("--column", column, "eps column (default: eps_avg_mean or eps_res)");
    sub.add_option("--output", output, "File name inside --out-dir");
  }
  void run(Run& r) {
    const auto pts = power_points(input, column);
    const auto w = parse_window(window);
    r.json(output, figures::fit_json(analysis::fit_power_law(pts, w ? *w : analysis::central_decade(pts))));
  }
};

struct FitLogLaw {
  std::string input;
  std::string column;
  std::string output = "fit_loglaw.json";

  void add(CLI::App& sub) {
    sub.add_option("--input", input, "CSV with tau and eps columns")->required();
    sub.add_option("--column", column, "eps column (default: eps_avg_mean or eps_res)");
    sub.add_option("--output", output, "File name inside --out-dir");
  }
  void run(Run& r) { r.json(output, figures::fit_json(analysis::fit_log_law(power_points(input, column)))); }
};

struct Figure {
  std::string id;

  void add(CLI::App& sub) {
    sub.add_option("--id", id, "fig1 .. fig5")->required();
  }
  void run(Run& r) {
    figures::FigureContext ctx;
    ctx.out_dir = r.dir;
    ctx.seed = r.g.seed;
    ctx.workers = r.g.workers;
    ctx.desk = r.g.desk;
    ctx.max_mcs = r.g.max_mcs;
    const std::uint64_t estimate = figures::estimate_mcs(id, r.g.desk);
    r.out << id << ": estimated " << estimate << " MCS\n";
    const figures::FigureOutput fo = figures::run_figure(id, ctx);
    for (const auto& f : fo.files) r.out << "wrote " << (r.dir / f).string() << '\n';
    r.files = fo.files;
    r.params = fo.params;
    r.instance_checksum = fo.instance_checksum;
    r.manifest_name = id + ".manifest.json";
  }
};

// ---- option bookkeeping ------------------------------------------------

bool skip_option(const CLI::Option* o) {
  const auto& l = o->get_lnames();
  if (l.empty()) return true;
  return l[0] == "help" || l[0] == "out-dir" || l[0] == "config" || l[0] == "seed" ||
         l[0] == "workers";  // results never depend on the worker count
}

void append_options(const CLI::App& app, std::vector<std::string>& argv, ordered_json& params) {
  for (const CLI::Option* o : app.get_options()) {
    if (skip_option(o) || o->count() == 0) continue;
    const std::string name = o->get_lnames()[0];
    if (o->get_type_size_max() == 0) {
      if (o->as<bool>()) {
        argv.push_back("--" + name);
        params[name] = true;
      }
      continue;
    }
    argv.push_back("--" + name);
    const auto& res = o->results();
    argv.insert(argv.end(), res.begin(), res.end());
    params[name] = res.size() == 1 ? ordered_json(res[0]) : ordered_json(res);
  }
}

int replay(const std::string& manifest_path, const std::string& into, const Globals& g, std::ostream& out,
           std::ostream& err) {
  const RunManifest m = read_manifest(manifest_path);
  if (m.version != kToolVersion)
    err << "warning: manifest written by version " << m.version << ", running " << kToolVersion << '\n';
  const fs::path dir = into.empty() ? fs::path(g.out_dir) / "replay" : fs::path(into);
  std::vector<std::string> args = m.argv;
  args.push_back("--out-dir");
  args.push_back(dir.string());
  const int code = run(args, out, err);
  if (code != 0) return code;
  std::size_t bad = 0;
  const std::string name = m.subcommand == "figure" ? m.params.value("id", std::string()) : m.subcommand;
  const fs::path again = dir / (name + ".manifest.json");
  if (fs::exists(again) && read_manifest(again).instance_checksum != m.instance_checksum) {
    err << "instance checksum differs from the manifest\n";
    ++bad;
  }
  for (const auto& o : m.outputs) {
    const fs::path p = dir / o.path;
    const std::string h = fs::exists(p) ? io::hex64(io::file_hash(p)) : "missing";
    const bool same = h == o.hash;
    bad += same ? 0 : 1;
    out << (same ? "match    " : "MISMATCH ") << o.path << " " << h << '\n';
  }
  if (bad) {
    err << bad << " of " << m.outputs.size() << " outputs differ from the manifest\n";
    return 3;
  }
  out << "all " << m.outputs.size() << " outputs reproduced\n";
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Simulated quantum annealing on random transverse-field Ising chains"};
  app.name("sqa");
  app.fallthrough();
  app.require_subcommand(1);
  app.config_formatter(std::make_shared<CLI::ConfigINI>());
  app.set_config("--config", "", "INI file; [section] per subcommand, keys are long option names");

  Globals g;
  app.add_option("--seed", g.seed, "Master seed");
  app.add_option("--workers", g.workers, "Worker threads")->check(CLI::PositiveNumber);
  app.add_option("--out-dir", g.out_dir, "Directory for outputs and manifests");
  app.add_flag("--desk-scale", g.desk, "Use the reduced figure presets");
  app.add_option("--max-mcs", g.max_mcs, "Refuse runs estimated above this many MCS (0: no limit)");

  GenInstance gen;
  ExactEq eq;
  ExactQa qa;
  PimcEq pimc;
  Sqa sqa;
  FitTeff teff;
  FitPowerLaw pow;
  FitLogLaw log;
  Figure fig;
  std::vector<std::pair<CLI::App*, std::function<void(Run&)>>> subs;
  auto add = [&](const char* name, const char* help, auto& cmd) {
    CLI::App* s = app.add_subcommand(name, help);
    cmd.add(*s);
    subs.emplace_back(s, [&cmd](Run& r) { cmd.run(r); });
  };
  add("gen-instance", "Draw a random chain and write it", gen);
  add("exact-eq", "Exact equilibrium eps_c(gamma, T)", eq);
  add("exact-qa", "Coherent annealing of the free-fermion chain", qa);
  add("pimc-eq", "Equilibrium path-integral Monte Carlo sweep", pimc);
  add("sqa", "Simulated quantum annealing", sqa);
  add("fit-teff", "Effective-temperature fit of a trajectory", teff);
  add("fit-powerlaw", "Power-law exponent of eps(tau)", pow);
  add("fit-loglaw", "Logarithmic law eps = [log(gamma tau)]^-xi", log);
  add("figure", "Regenerate the data behind one figure", fig);
  std::string manifest_in, into;
  CLI::App* rep = app.add_subcommand("replay", "Re-run a manifest and compare output hashes");
  rep->add_option("--manifest", manifest_in, "Manifest written by an earlier run")->required();
  rep->add_option("--into", into, "Output directory for the re-run (default: <out-dir>/replay)");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return 2;
  }

  try {
    if (rep->parsed()) return replay(manifest_in, into, g, out, err);
    for (auto& [sub, body] : subs) {
      if (!sub->parsed()) continue;
      Run r(g, out, fs::path(g.out_dir));
      fs::create_directories(r.dir);
      body(r);

      RunManifest m;
      m.subcommand = sub->get_name();
      m.argv = {"--seed", std::to_string(g.seed)};
      append_options(app, m.argv, m.params);
      m.argv.push_back(sub->get_name());
      append_options(*sub, m.argv, m.params);
      for (auto& [k, v] : r.params.items()) m.params[k] = v;
      m.seed = g.seed;
      m.instance_checksum = r.instance_checksum;
      m.csv_schema = io::kCsvSchemaVersion;
      record_outputs(m, r.dir, r.files);
      const std::string name = r.manifest_name.empty() ? sub->get_name() + ".manifest.json" : r.manifest_name;
      write_manifest(m, r.dir / name);
      out << "wrote " << (r.dir / name).string() << '\n';
      if (!r.failure.empty()) {
        err << "error: " << r.failure << '\n';
        return 3;
      }
      return 0;
    }
    return 2;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 3;
  }
}

}  // namespace sqa::cli
