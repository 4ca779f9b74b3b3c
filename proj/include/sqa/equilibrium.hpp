#pragma once

#include <optional>

#include "sqa/pimc.hpp"
#include "sqa/stats.hpp"

namespace sqa::pimc {

struct EquilibriumResult {
  double estimate = 0.0;  // time average of eps_avg after burn-in
  double stderr_ = 0.0;   // batch-means standard error
  MeasurementSeries series;
  std::uint64_t t_burn = 0;
  double geweke_z = 0.0;
  bool burn_in_capped = false;  // Geweke never passed; half the run discarded
  std::uint64_t n_mcs = 0;
};

struct EquilibriumOptions {
  // MCS between stored samples; 0 keeps at most 2^20 samples.
  std::size_t measure_every = 0;
  // Starting lattice; i.i.d. random spins when empty.
  std::optional<PathConfig> initial;
};

// Runs params.t_run MCS at fixed (Gamma, T, P) and reports the eps_avg
// average over the Geweke-selected stationary part.
EquilibriumResult equilibrium_run(const Instance& inst, const PimcParams& params, Rng& rng,
                                  const EquilibriumOptions& opts = {});

}  // namespace sqa::pimc
