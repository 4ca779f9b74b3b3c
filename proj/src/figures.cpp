#include "sqa/figures.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <sstream>

#include "sqa/error.hpp"
#include "sqa/exact_fermion.hpp"
#include "sqa/rng.hpp"

namespace sqa::figures {

using nlohmann::ordered_json;

std::uint64_t point_seed(std::uint64_t master, std::initializer_list<double> key) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (double x : key) {
    std::uint64_t bits = std::bit_cast<std::uint64_t>(x == 0.0 ? 0.0 : x);
    for (int b = 0; b < 8; ++b) {
      h ^= (bits >> (8 * b)) & 0xffu;
      h *= 0x100000001b3ULL;
    }
  }
  return derive_seed(master, h);
}

namespace {

double moves_key(pimc::MoveFamily m) { return static_cast<double>(static_cast<int>(m)); }

}  // namespace

std::uint64_t curve_seed(std::uint64_t master, std::size_t trotter, pimc::MoveFamily moves, std::uint64_t tau) {
  return point_seed(master, {static_cast<double>(trotter), moves_key(moves), static_cast<double>(tau)});
}

// ---- equilibrium -------------------------------------------------------

SweepOutcome<EqRow> pimc_sweep(const Instance& inst, const std::vector<EqPoint>& points, std::uint64_t t_run,
                               std::uint64_t seed, std::size_t workers) {
  validate(inst);
  return sweep_execute<EqRow>(points, workers, [&](const EqPoint& p) {
    pimc::PimcParams params;
    params.temperature = p.temperature;
    params.gamma = p.gamma;
    params.trotter = p.trotter;
    params.moves = p.moves;
    params.t_run = t_run;
    Rng rng(point_seed(derive_seed(seed, p.rep),
                       {static_cast<double>(p.trotter), p.gamma, p.temperature, moves_key(p.moves)}));
    const pimc::EquilibriumResult r = pimc::equilibrium_run(inst, params, rng);
    EqRow row;
    row.point = p;
    row.estimate = r.estimate;
    row.stderr_ = r.stderr_;
    row.t_burn = r.t_burn;
    row.geweke_z = r.geweke_z;
    row.capped = r.burn_in_capped;
    row.n_mcs = r.n_mcs;
    return row;
  });
}

io::CsvTable pimc_table(const SweepOutcome<EqRow>& outcome) {
  io::CsvTable t(io::schema::pimc_eq);
  for (const auto& slot : outcome.results) {
    if (!slot) continue;
    const EqRow& r = *slot;
    t.add_row({std::to_string(r.point.trotter), io::format_real(r.point.gamma), io::format_real(r.point.temperature),
               pimc::to_string(r.point.moves), io::format_real(r.estimate), io::format_real(r.stderr_),
               std::to_string(r.t_burn), io::format_real(r.geweke_z), std::to_string(r.n_mcs)});
  }
  return t;
}

void require_complete(const SweepOutcome<EqRow>& outcome) {
  if (outcome.complete()) return;
  std::ostringstream msg;
  std::size_t failed = 0;
  for (std::size_t j = 0; j < outcome.errors.size(); ++j)
    if (!outcome.errors[j].empty()) {
      msg << (failed++ ? "; " : "") << "point " << j << ": " << outcome.errors[j];
    }
  throw AccuracyError(std::to_string(failed) + " of " + std::to_string(outcome.errors.size()) +
                      " sweep points failed: " + msg.str());
}

// ---- annealing ---------------------------------------------------------

SqaCurve sqa_curve(const Instance& inst, std::size_t trotter, pimc::MoveFamily moves, std::uint64_t tau,
                   const SqaSettings& s) {
  anneal::SqaOptions o;
  o.temperature = s.temperature;
  o.trotter = trotter;
  o.schedule = Schedule{2.5, static_cast<double>(tau), 0};
  o.moves = moves;
  o.reps = s.reps;
  o.stride = std::max<std::uint64_t>(1, tau / std::max<std::size_t>(1, s.records));
  o.t_eq = s.t_eq;
  o.seed = curve_seed(s.seed, trotter, moves, tau);
  o.workers = s.workers;
  SqaCurve c;
  c.trotter = trotter;
  c.moves = moves;
  c.tau = tau;
  c.points = anneal::aggregate(anneal::sqa_run(inst, o));
  return c;
}

io::CsvTable sqa_trajectory_table(const SqaCurve& c) {
  io::CsvTable t(io::schema::sqa);
  for (const auto& p : c.points)
    t.add_row({io::format_real(p.t), io::format_real(p.gamma), io::format_real(p.eps_avg_mean),
               io::format_real(p.eps_avg_sem), io::format_real(p.eps_min_mean), io::format_real(p.eps_min_sem),
               std::to_string(p.n_reps)});
  return t;
}

io::CsvTable sqa_final_table(const std::vector<SqaCurve>& curves) {
  io::CsvTable t(io::schema::sqa_final);
  for (const auto& c : curves) {
    const auto& p = c.final();
    t.add_row({std::to_string(c.tau), std::to_string(c.trotter), pimc::to_string(c.moves), io::format_real(p.eps_avg_mean),
               io::format_real(p.eps_avg_sem), io::format_real(p.eps_min_mean), io::format_real(p.eps_min_sem),
               std::to_string(p.n_reps)});
  }
  return t;
}

QaCurve qa_curve(const Instance& inst, double tau, double gamma0, std::size_t records) {
  exact::EvolveOptions o;
  o.records = records;
  QaCurve c;
  c.tau = tau;
  c.records = exact::coherent_qa_evolve(inst, Schedule{gamma0, tau, 0}, o);
  return c;
}

io::CsvTable qa_trajectory_table(const QaCurve& c) {
  io::CsvTable t(io::schema::exact_qa);
  for (const auto& r : c.records)
    t.add_row({io::format_real(r.t), io::format_real(r.gamma), io::format_real(r.eps_avg)});
  return t;
}

io::CsvTable qa_final_table(const std::vector<QaCurve>& curves) {
  io::CsvTable t(io::schema::exact_qa_final);
  for (const auto& c : curves) t.add_row({io::format_real(c.tau), io::format_real(c.final())});
  return t;
}

io::CsvTable exact_table(const Instance& inst, const std::vector<double>& gammas,
                         const std::vector<double>& temperatures) {
  std::vector<exact::SpectralData> spectra;
  spectra.reserve(gammas.size());
  for (double g : gammas) spectra.emplace_back(inst, g);
  io::CsvTable t(io::schema::exact_eq);
  for (double temp : temperatures)
    for (const auto& s : spectra)
      t.add_row({io::format_real(s.gamma()), io::format_real(temp), io::format_real(s.eps_c(temp))});
  return t;
}

ordered_json fit_json(const analysis::FitResult& r) {
  ordered_json j;
  if (r.parameter.size() == 1) {
    j["name"] = r.names.at(0);
    j["parameter"] = r.parameter[0];
    j["stderr"] = r.stderr_.at(0);
  } else {
    j["parameter"] = ordered_json::object();
    j["stderr"] = ordered_json::object();
    for (std::size_t k = 0; k < r.parameter.size(); ++k) {
      j["parameter"][r.names.at(k)] = r.parameter[k];
      j["stderr"][r.names.at(k)] = r.stderr_.at(k);
    }
  }
  j["window"] = {r.window.lo, r.window.hi};
  j["residual_rms"] = r.residual_rms;
  j["points"] = r.points;
  return j;
}

// ---- presets -----------------------------------------------------------

namespace {

std::vector<std::size_t> powers_of_two(std::size_t lo, std::size_t hi) {
  std::vector<std::size_t> v;
  for (std::size_t p = lo; p <= hi; p *= 2) v.push_back(p);
  return v;
}

}  // namespace

Fig1Spec fig1_spec(bool desk) {
  Fig1Spec s;
  s.gammas = {1.0, 0.1};
  s.families = {pimc::MoveFamily::time_cluster, pimc::MoveFamily::spacetime_sw};
  if (desk) {
    s.length = 64;
    s.temperature = 0.1;
    s.trotters = powers_of_two(8, 256);
    s.t_run = 100000;
  } else {
    s.length = 256;
    s.temperature = 0.01;
    s.trotters = powers_of_two(8, 1024);
    s.t_run = 10000000;
  }
  return s;
}

Fig2Spec fig2_spec(bool desk) {
  Fig2Spec s;
  s.sqa.ordered = true;
  s.sqa.length = 256;
  s.sqa.temperature = 0.01;
  s.sqa.moves = pimc::MoveFamily::time_cluster;
  if (desk) {
    s.sqa.trotters = {256};
    s.sqa.reps = 32;
  } else {
    s.sqa.trotters = {1024};
    s.sqa.reps = 64;
  }
  // four points per decade across the intermediate window
  s.sqa.taus = {10, 18, 32, 56, 100, 178, 316, 562, 1000};
  s.sqa.records = 1;
  s.sqa.t_eq = 100;
  return s;
}

Fig3Spec fig3_spec(bool desk) {
  Fig3Spec s;
  AnnealSpec a;
  a.ordered = false;
  a.temperature = 0.01;
  a.records = 1;
  a.t_eq = 100;
  if (desk) {
    a.length = 64;
    a.trotters = {8, 32, 128};
    a.taus = {10, 100, 1000, 10000};
    a.reps = 16;
  } else {
    a.length = 256;
    a.trotters = powers_of_two(8, 1024);
    a.taus = {10, 100, 1000, 10000, 100000, 1000000};
    a.reps = 64;
  }
  s.time = a;
  s.time.moves = pimc::MoveFamily::time_cluster;
  s.spacetime = a;
  s.spacetime.moves = pimc::MoveFamily::spacetime_sw;
  return s;
}

Fig4Spec fig4_spec(bool desk) {
  Fig4Spec s;
  s.sqa.length = 256;
  s.sqa.temperature = 0.01;
  s.sqa.moves = pimc::MoveFamily::time_cluster;
  s.sqa.records = 100;
  s.sqa.t_eq = 100;
  // fast quenches fall outside the Ansatz; rms grows past 5% below tau ~ 30
  s.qa.taus = {50, 100, 200};
  s.qa.records = 100;
  // the slice-averaged energy carries a Trotter deficit of order beta_P^2,
  // about 10% at P = 256, T = 0.01, so P stays at 1024 here
  if (desk) {
    s.sqa.trotters = {1024};
    s.sqa.taus = {1000, 3162, 10000};
    s.sqa.reps = 8;
  } else {
    s.sqa.trotters = {1024};
    s.sqa.taus = {1000, 10000, 100000};
    s.sqa.reps = 64;
  }
  return s;
}

Fig5Spec fig5_spec(bool desk) {
  Fig5Spec s;
  s.sqa.length = 256;
  s.sqa.temperature = 0.01;
  s.sqa.moves = pimc::MoveFamily::time_cluster;
  s.sqa.records = 100;
  s.sqa.t_eq = 100;
  s.qa.taus = {1, 2, 5, 10, 20, 50, 100, 200};
  s.qa.records = 1;
  s.qa_window = {10, 200};
  if (desk) {
    s.sqa.trotters = {256};
    s.sqa.taus = {100, 316, 1000, 3162, 10000};
    s.sqa.reps = 16;
    s.sqa_window = {100, 10000};
  } else {
    s.sqa.trotters = {1024};
    s.sqa.taus = {10, 100, 1000, 10000, 100000, 1000000};
    s.sqa.reps = 64;
    s.sqa_window = {100, 100000};
  }
  return s;
}

std::uint64_t estimate_mcs(const Fig1Spec& s) {
  return s.t_run * s.trotters.size() * s.families.size() * s.gammas.size();
}

std::uint64_t estimate_mcs(const AnnealSpec& s) {
  std::uint64_t per_p = 0;
  for (auto tau : s.taus) per_p += tau + (s.t_eq ? s.t_eq : anneal::default_equilibration(tau));
  return per_p * s.reps * s.trotters.size();
}

std::uint64_t estimate_mcs(const std::string& figure, bool desk) {
  if (figure == "fig1") return estimate_mcs(fig1_spec(desk));
  if (figure == "fig2") return estimate_mcs(fig2_spec(desk).sqa);
  if (figure == "fig3") {
    const Fig3Spec s = fig3_spec(desk);
    return estimate_mcs(s.time) + estimate_mcs(s.spacetime);
  }
  if (figure == "fig4") return estimate_mcs(fig4_spec(desk).sqa);
  if (figure == "fig5") return estimate_mcs(fig5_spec(desk).sqa);
  throw ValidationError("unknown figure id '" + figure + "' (expected fig1..fig5)");
}

// ---- pipelines ---------------------------------------------------------

const std::vector<std::string>& figure_ids() {
  static const std::vector<std::string> ids = {"fig1", "fig2", "fig3", "fig4", "fig5"};
  return ids;
}

namespace {

struct Writer {
  const FigureContext& ctx;
  FigureOutput& out;

  void csv(const std::string& name, const io::CsvTable& t) {
    io::write_csv(t, ctx.out_dir / name);
    out.files.push_back(name);
  }
  void json(const std::string& name, const ordered_json& j) {
    std::ofstream f(ctx.out_dir / name, std::ios::binary);
    if (!f) throw ValidationError("cannot write " + (ctx.out_dir / name).string());
    f << j.dump(2) << '\n';
    out.files.push_back(name);
  }
  void instance(const Instance& inst) {
    save_instance(inst, ctx.out_dir / "instance.txt");
    out.files.push_back("instance.txt");
    out.instance_checksum = io::hex64(checksum(inst));
  }
};

Instance make_instance(const AnnealSpec& s, std::uint64_t seed) {
  return s.ordered ? generate_instance(s.length, Ordered{1.0}, seed) : generate_instance(s.length, Uniform01{}, seed);
}

ordered_json anneal_json(const AnnealSpec& s) {
  ordered_json j;
  j["L"] = s.length;
  j["distribution"] = s.ordered ? "ordered(1)" : "uniform01";
  j["temperature"] = s.temperature;
  j["trotter"] = s.trotters;
  j["moves"] = pimc::to_string(s.moves);
  j["tau"] = s.taus;
  j["reps"] = s.reps;
  j["gamma0"] = 2.5;
  j["t_eq"] = s.t_eq;
  return j;
}

SqaSettings settings(const AnnealSpec& s, const FigureContext& ctx) {
  SqaSettings st;
  st.temperature = s.temperature;
  st.reps = s.reps;
  st.records = s.records;
  st.t_eq = s.t_eq;
  st.seed = ctx.seed;
  st.workers = ctx.workers;
  return st;
}

std::vector<SqaCurve> anneal_curves(const Instance& inst, const AnnealSpec& s, std::size_t trotter,
                                    const FigureContext& ctx) {
  std::vector<SqaCurve> curves;
  for (auto tau : s.taus) curves.push_back(sqa_curve(inst, trotter, s.moves, tau, settings(s, ctx)));
  return curves;
}

std::vector<analysis::PowerPoint> sqa_points(const std::vector<SqaCurve>& curves) {
  std::vector<analysis::PowerPoint> pts;
  for (const auto& c : curves) pts.push_back({static_cast<double>(c.tau), c.final().eps_avg_mean});
  return pts;
}

analysis::FitWindow or_central(const analysis::FitWindow& w, const std::vector<analysis::PowerPoint>& pts) {
  return w.hi > w.lo ? w : analysis::central_decade(pts);
}

ordered_json try_fit(auto&& f) {
  try {
    return fit_json(f());
  } catch (const analysis::FitError& e) {
    ordered_json j = fit_json(e.best());
    j["error"] = e.what();
    return j;
  } catch (const std::exception& e) {
    return ordered_json{{"error", e.what()}};
  }
}

std::vector<double> linear_grid(double lo, double hi, std::size_t n) {
  std::vector<double> g(n + 1);
  for (std::size_t k = 0; k <= n; ++k) g[k] = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(n);
  return g;
}

void fig1(const FigureContext& ctx, Writer& w) {
  const Fig1Spec s = fig1_spec(ctx.desk);
  const Instance inst = generate_instance(s.length, Uniform01{}, ctx.seed);
  w.instance(inst);
  w.out.params = {{"L", s.length},        {"temperature", s.temperature}, {"gamma", s.gammas},
                  {"trotter", s.trotters}, {"t_run", s.t_run},            {"moves", ordered_json::array()}};
  for (auto m : s.families) w.out.params["moves"].push_back(pimc::to_string(m));

  const char* panels = "ab";
  for (std::size_t g = 0; g < s.gammas.size(); ++g)
    for (auto m : s.families) {
      std::vector<EqPoint> pts;
      for (auto p : s.trotters) pts.push_back({p, s.gammas[g], s.temperature, m, 0});
      const auto outcome = pimc_sweep(inst, pts, s.t_run, ctx.seed, ctx.workers);
      w.csv(std::string("fig1") + panels[g] + "_" + pimc::to_string(m) + ".csv", pimc_table(outcome));
      require_complete(outcome);
    }
  w.csv("fig1_exact.csv", exact_table(inst, s.gammas, {s.temperature}));
}

void fig2(const FigureContext& ctx, Writer& w) {
  const Fig2Spec s = fig2_spec(ctx.desk);
  const Instance inst = make_instance(s.sqa, ctx.seed);
  w.instance(inst);
  w.out.params = anneal_json(s.sqa);
  const auto curves = anneal_curves(inst, s.sqa, s.sqa.trotters.at(0), ctx);
  w.csv("fig2_sqa.csv", sqa_final_table(curves));
  w.csv("fig2_exact.csv", exact_table(inst, {0.0}, {s.sqa.temperature}));
  const auto pts = sqa_points(curves);
  w.json("fig2_fit.json", {{"sqa", try_fit([&] { return analysis::fit_power_law(pts, or_central(s.window, pts)); })}});
}

void fig3(const FigureContext& ctx, Writer& w) {
  const Fig3Spec s = fig3_spec(ctx.desk);
  const Instance inst = make_instance(s.time, ctx.seed);
  w.instance(inst);
  w.out.params = {{"time", anneal_json(s.time)}, {"spacetime", anneal_json(s.spacetime)}};
  for (const auto* spec : {&s.time, &s.spacetime}) {
    const std::string stem = spec == &s.time ? "fig3a_time" : "fig3b_sw";
    for (auto p : spec->trotters)
      w.csv(stem + "_P" + std::to_string(p) + ".csv", sqa_final_table(anneal_curves(inst, *spec, p, ctx)));
  }
  w.csv("fig3_exact.csv", exact_table(inst, {0.0}, {s.time.temperature}));
}

void fig4(const FigureContext& ctx, Writer& w) {
  const Fig4Spec s = fig4_spec(ctx.desk);
  const Instance inst = make_instance(s.sqa, ctx.seed);
  w.instance(inst);
  w.out.params = {{"sqa", anneal_json(s.sqa)},
                  {"qa_tau", s.qa.taus},
                  {"window", {s.window.lo, s.window.hi}}};

  const exact::EquilibriumTable table(inst, linear_grid(0.0, 2.5, 250));
  analysis::TeffOptions topt;
  topt.window = s.window;

  ordered_json fits = {{"sqa", ordered_json::array()}, {"qa", ordered_json::array()}};
  std::vector<double> teff;
  for (const auto& c : anneal_curves(inst, s.sqa, s.sqa.trotters.at(0), ctx)) {
    w.csv("fig4a_sqa_tau" + std::to_string(c.tau) + ".csv", sqa_trajectory_table(c));
    std::vector<analysis::GammaSample> traj;
    for (const auto& p : c.points) traj.push_back({p.gamma, p.eps_avg_mean});
    topt.t_min = s.sqa.temperature;
    ordered_json f = try_fit([&] { return analysis::fit_teff(traj, table, topt); });
    f["tau"] = c.tau;
    if (f.contains("parameter")) teff.push_back(f["parameter"].get<double>());
    fits["sqa"].push_back(f);
  }
  for (double tau : s.qa.taus) {
    const QaCurve c = qa_curve(inst, tau, 2.5, s.qa.records);
    w.csv("fig4b_qa_tau" + io::format_real(tau) + ".csv", qa_trajectory_table(c));
    std::vector<analysis::GammaSample> traj;
    for (const auto& r : c.records) traj.push_back({r.gamma, r.eps_avg});
    topt.t_min = 0.0;
    ordered_json f = try_fit([&] { return analysis::fit_teff(traj, table, topt); });
    f["tau"] = tau;
    if (f.contains("parameter")) teff.push_back(f["parameter"].get<double>());
    fits["qa"].push_back(f);
  }
  w.json("fig4_fits.json", fits);

  std::vector<double> temps = {0.0, s.sqa.temperature};
  temps.insert(temps.end(), teff.begin(), teff.end());
  w.csv("fig4_curves.csv", exact_table(inst, linear_grid(0.0, 2.5, 100), temps));
}

void fig5(const FigureContext& ctx, Writer& w) {
  const Fig5Spec s = fig5_spec(ctx.desk);
  const Instance inst = make_instance(s.sqa, ctx.seed);
  w.instance(inst);
  w.out.params = {{"sqa", anneal_json(s.sqa)},
                  {"qa_tau", s.qa.taus},
                  {"qa_window", {s.qa_window.lo, s.qa_window.hi}},
                  {"sqa_window", {s.sqa_window.lo, s.sqa_window.hi}}};

  std::vector<QaCurve> qa;
  for (double tau : s.qa.taus) qa.push_back(qa_curve(inst, tau, 2.5, s.qa.records));
  w.csv("fig5_qa.csv", qa_final_table(qa));
  const auto sqa = anneal_curves(inst, s.sqa, s.sqa.trotters.at(0), ctx);
  w.csv("fig5_sqa.csv", sqa_final_table(sqa));
  w.csv("fig5_exact.csv", exact_table(inst, {0.0}, {s.sqa.temperature}));

  std::vector<analysis::PowerPoint> qa_pts;
  for (const auto& c : qa) qa_pts.push_back({c.tau, c.final()});
  const auto sqa_pts = sqa_points(sqa);
  ordered_json fits;
  fits["qa"] = try_fit([&] { return analysis::fit_power_law(qa_pts, or_central(s.qa_window, qa_pts)); });
  fits["sqa"] = try_fit([&] { return analysis::fit_power_law(sqa_pts, or_central(s.sqa_window, sqa_pts)); });
  fits["qa_loglaw"] = try_fit([&] { return analysis::fit_log_law(qa_pts); });
  w.json("fig5_fits.json", fits);
}

}  // namespace

FigureOutput run_figure(const std::string& id, const FigureContext& ctx) {
  FigureOutput out;
  out.estimated_mcs = estimate_mcs(id, ctx.desk);
  if (ctx.max_mcs != 0 && out.estimated_mcs > ctx.max_mcs)
    throw ValidationError("figure " + id + " needs an estimated " + std::to_string(out.estimated_mcs) +
                          " MCS, above --max-mcs " + std::to_string(ctx.max_mcs));
  std::filesystem::create_directories(ctx.out_dir);
  Writer w{ctx, out};
  if (id == "fig1") fig1(ctx, w);
  else if (id == "fig2") fig2(ctx, w);
  else if (id == "fig3") fig3(ctx, w);
  else if (id == "fig4") fig4(ctx, w);
  else fig5(ctx, w);
  out.params["desk_scale"] = ctx.desk;
  out.params["estimated_mcs"] = out.estimated_mcs;
  return out;
}

}  // namespace sqa::figures
