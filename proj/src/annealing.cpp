#include "sqa/annealing.hpp"

#include <algorithm>
#include <cmath>

#include "sqa/error.hpp"
#include "sqa/moves.hpp"
#include "sqa/stats.hpp"
#include "sqa/sweep.hpp"

namespace sqa {

void validate(const Schedule& s) {
  if (!(s.gamma0 >= 0.0)) throw ValidationError("initial field Gamma0 must be >= 0");
  if (!(s.tau > 0.0)) throw ValidationError("annealing time tau must be positive");
}

double schedule_gamma(const Schedule& s, double t) {
  validate(s);
  if (!(t >= 0.0 && t <= s.tau)) throw ValidationError("time outside [0, tau]");
  if (s.gamma_steps == 0) return s.gamma0 * (1.0 - t / s.tau);
  const auto levels = static_cast<double>(s.gamma_steps);
  const double level = std::ceil(t / s.tau * levels - 1e-12);
  return s.gamma0 * (1.0 - std::min(level, levels) / levels);
}

}  // namespace sqa

namespace sqa::anneal {

std::size_t default_stride(std::uint64_t tau) { return std::max<std::uint64_t>(1, tau / 200); }

std::size_t default_equilibration(std::uint64_t tau) { return std::max<std::uint64_t>(1000, tau / 10); }

namespace {

std::vector<TrajectoryRecord> run_repetition(const Instance& inst, const SqaOptions& o, std::uint64_t tau,
                                             std::size_t stride, std::size_t t_eq, int rep) {
  Rng rng(derive_seed(o.seed, static_cast<std::uint64_t>(rep)));
  const double beta_p = 1.0 / (o.temperature * static_cast<double>(o.trotter));
  pimc::PathConfig cfg = pimc::PathConfig::random(inst.length, o.trotter, rng);
  pimc::StepCouplings c = pimc::make_couplings(inst, beta_p, o.schedule.gamma0, o.trotter);
  pimc::MoveWorkspace ws;
  std::vector<double> scratch;
  std::vector<TrajectoryRecord> out;

  for (std::size_t s = 0; s < t_eq; ++s) pimc::monte_carlo_step(o.moves, cfg, c, rng, ws);

  auto record = [&](std::uint64_t t) {
    const pimc::Estimators e = pimc::measure(cfg, inst.couplings, scratch);
    out.push_back({static_cast<double>(t), c.gamma, e.eps_avg, e.eps_min.value,
                   static_cast<int>(e.eps_min.slice), rep});
  };
  record(0);
  for (std::uint64_t t = 1; t <= tau; ++t) {
    pimc::update_gamma(c, schedule_gamma(o.schedule, static_cast<double>(t)));
    pimc::monte_carlo_step(o.moves, cfg, c, rng, ws);
    if (t % stride == 0 || t == tau) record(t);
  }
  return out;
}

}  // namespace

std::vector<TrajectoryRecord> sqa_run(const Instance& inst, const SqaOptions& o) {
  validate(inst);
  validate(o.schedule);
  if (!(o.temperature > 0.0)) throw ValidationError("temperature must be positive");
  if (o.trotter == 0) throw ValidationError("Trotter number P must be >= 1");
  if (o.reps == 0) throw ValidationError("need at least one repetition");
  if (o.schedule.tau < 1.0 || std::floor(o.schedule.tau) != o.schedule.tau)
    throw ValidationError("SQA annealing time tau must be an integer number of MCS >= 1");
  const auto tau = static_cast<std::uint64_t>(o.schedule.tau);
  const std::size_t stride = o.stride == 0 ? default_stride(tau) : o.stride;
  const std::size_t t_eq = o.t_eq == 0 ? default_equilibration(tau) : o.t_eq;

  auto per_rep = parallel_map<std::vector<TrajectoryRecord>>(o.reps, o.workers, [&](std::size_t r) {
    return run_repetition(inst, o, tau, stride, t_eq, static_cast<int>(r));
  });
  std::vector<TrajectoryRecord> all;
  for (auto& v : per_rep) all.insert(all.end(), v.begin(), v.end());
  return all;
}

std::vector<TrajectoryPoint> aggregate(const std::vector<TrajectoryRecord>& records) {
  std::vector<TrajectoryRecord> sorted = records;
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const TrajectoryRecord& a, const TrajectoryRecord& b) { return a.t < b.t; });
  std::vector<TrajectoryPoint> out;
  std::size_t b = 0;
  while (b < sorted.size()) {
    std::size_t e = b;
    while (e < sorted.size() && sorted[e].t == sorted[b].t) ++e;
    std::vector<double> avg, min;
    for (std::size_t j = b; j < e; ++j) {
      avg.push_back(sorted[j].eps_avg);
      min.push_back(sorted[j].eps_min);
    }
    const auto n = static_cast<double>(e - b);
    TrajectoryPoint p;
    p.t = sorted[b].t;
    p.gamma = sorted[b].gamma;
    p.n_reps = e - b;
    p.eps_avg_mean = mean(avg);
    p.eps_min_mean = mean(min);
    p.eps_avg_sem = std::sqrt(variance(avg) / n);
    p.eps_min_sem = std::sqrt(variance(min) / n);
    out.push_back(p);
    b = e;
  }
  return out;
}

}  // namespace sqa::anneal
