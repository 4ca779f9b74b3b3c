#pragma once

#include <cstdint>
#include <vector>

#include "sqa/instance.hpp"
#include "sqa/pimc.hpp"
#include "sqa/schedule.hpp"

namespace sqa::anneal {

struct SqaOptions {
  double temperature = 0.01;
  std::size_t trotter = 32;
  Schedule schedule;  // tau in MCS, must be integral
  pimc::MoveFamily moves = pimc::MoveFamily::time_cluster;
  std::size_t reps = 32;
  std::size_t stride = 0;  // 0 gives ~200 records per run
  std::uint64_t seed = 0;
  std::size_t t_eq = 0;    // 0 selects max(1000, tau/10)
  std::size_t workers = 1;
};

std::size_t default_stride(std::uint64_t tau);
std::size_t default_equilibration(std::uint64_t tau);

// Repetition r uses the stream derive_seed(seed, r). Each repetition starts
// from i.i.d. spins, equilibrates at Gamma0, then anneals one MCS per unit
// of t. Records are at t = 0, every stride MCS and at t = tau, sorted by
// (rep, t) regardless of worker count.
std::vector<TrajectoryRecord> sqa_run(const Instance& inst, const SqaOptions& opts);

// Repetition means and standard errors at each recorded time.
struct TrajectoryPoint {
  double t = 0.0;
  double gamma = 0.0;
  double eps_avg_mean = 0.0;
  double eps_avg_sem = 0.0;
  double eps_min_mean = 0.0;
  double eps_min_sem = 0.0;
  std::size_t n_reps = 0;
};

std::vector<TrajectoryPoint> aggregate(const std::vector<TrajectoryRecord>& records);

}  // namespace sqa::anneal
