#include "sqa/equilibrium.hpp"

#include "sqa/error.hpp"
#include "sqa/moves.hpp"

namespace sqa::pimc {

EquilibriumResult equilibrium_run(const Instance& inst, const PimcParams& params, Rng& rng,
                                  const EquilibriumOptions& opts) {
  validate(inst);
  validate(params);
  if (params.t_run < 1) throw ValidationError("t_run must be >= 1");
  if (params.gamma == 0.0) throw ValidationError("equilibrium sampling needs Gamma > 0");

  std::size_t every = opts.measure_every;
  if (every == 0) every = std::max<std::size_t>(1, (params.t_run + (1u << 20) - 1) >> 20);

  PathConfig cfg = opts.initial ? *opts.initial : PathConfig::random(inst.length, params.trotter, rng);
  if (cfg.length() != inst.length || cfg.trotter() != params.trotter)
    throw ValidationError("initial configuration has the wrong dimensions");

  const StepCouplings couplings = make_couplings(inst, params.beta_p(), params.gamma, params.trotter);
  MoveWorkspace ws;
  std::vector<double> scratch;
  EquilibriumResult r;
  r.n_mcs = params.t_run;
  for (std::uint64_t t = 1; t <= params.t_run; ++t) {
    monte_carlo_step(params.moves, cfg, couplings, rng, ws);
    if (t % every == 0) {
      const Estimators e = measure(cfg, inst.couplings, scratch);
      r.series.push(t, e.eps_avg, e.eps_min.value);
    }
  }

  std::span<const double> values(r.series.eps_avg);
  if (r.series.size() >= 100) {
    const GewekeResult g = geweke_burn_in(r.series);
    r.t_burn = g.burn_in_mcs;
    r.geweke_z = g.z;
    r.burn_in_capped = g.capped;
    values = values.subspan(g.burn_in_samples);
  }
  const BatchMeans bm = batch_means(values);
  r.estimate = bm.mean;
  r.stderr_ = bm.sem;
  return r;
}

}  // namespace sqa::pimc
