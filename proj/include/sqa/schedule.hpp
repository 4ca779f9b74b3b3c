#pragma once

#include <cstddef>

namespace sqa {

// Linear annealing schedule Gamma(t) = Gamma0 (1 - t/tau). With
// gamma_steps > 0 the field follows a staircase of that many levels that
// still ends at zero.
struct Schedule {
  double gamma0 = 2.5;
  double tau = 1.0;
  std::size_t gamma_steps = 0;
};

void validate(const Schedule& s);

// Throws ValidationError for t outside [0, tau].
double schedule_gamma(const Schedule& s, double t);

// One sample along an annealing run. eps_avg and eps_min coincide for
// coherent evolution, where slice is -1.
struct TrajectoryRecord {
  double t = 0.0;
  double gamma = 0.0;
  double eps_avg = 0.0;
  double eps_min = 0.0;
  int slice = -1;
  int rep = 0;
};

}  // namespace sqa
