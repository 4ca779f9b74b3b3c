#include "sqa/pimc.hpp"

#include <algorithm>
#include <cmath>

#include "sqa/error.hpp"

namespace sqa::pimc {

std::string to_string(MoveFamily m) {
  switch (m) {
    case MoveFamily::time_cluster:
      return "time";
    case MoveFamily::spacetime_sw:
      return "sw";
    case MoveFamily::spacetime_wolff:
      return "wolff";
  }
  return "?";
}

MoveFamily parse_moves(const std::string& text) {
  if (text == "time" || text == "time_cluster") return MoveFamily::time_cluster;
  if (text == "sw" || text == "spacetime_sw") return MoveFamily::spacetime_sw;
  if (text == "wolff" || text == "spacetime_wolff") return MoveFamily::spacetime_wolff;
  throw ValidationError("unknown move family '" + text + "' (expected time|sw|wolff)");
}

PathConfig::PathConfig(std::size_t length, std::size_t trotter, std::int8_t fill)
    : length_(length), trotter_(trotter), spins_(length * trotter, fill) {
  if (length == 0 || trotter == 0) throw ValidationError("path lattice needs L >= 1 and P >= 1");
  if (fill != 1 && fill != -1) throw ValidationError("spins are +1 or -1");
}

PathConfig PathConfig::random(std::size_t length, std::size_t trotter, Rng& rng) {
  PathConfig cfg(length, trotter);
  for (auto& s : cfg.spins_) s = rng.bernoulli(0.5) ? 1 : -1;
  return cfg;
}

void PathConfig::flip_all() noexcept {
  for (auto& s : spins_) s = static_cast<std::int8_t>(-s);
}

double j_perp(double beta_p, double gamma) {
  if (!(beta_p > 0.0)) throw ValidationError("beta_P must be positive");
  if (!(gamma >= 0.0)) throw ValidationError("transverse field must be >= 0");
  if (gamma == 0.0) return std::numeric_limits<double>::infinity();
  return -0.5 * std::log(std::tanh(beta_p * gamma));
}

void validate(const PimcParams& p) {
  if (!(p.temperature > 0.0)) throw ValidationError("temperature must be positive");
  if (!(p.gamma >= 0.0)) throw ValidationError("transverse field must be >= 0");
  if (p.trotter == 0) throw ValidationError("Trotter number P must be >= 1");
}

double classical_action(const PathConfig& cfg, const Instance& inst, const PimcParams& params) {
  validate(params);
  if (cfg.length() != inst.length || cfg.trotter() != params.trotter)
    throw ValidationError("path configuration dimensions do not match instance / Trotter number");
  const std::size_t n = cfg.length();
  const std::size_t p = cfg.trotter();
  const double beta_p = params.beta_p();
  const double jp = params.coupling_perp();
  double spatial = 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    long sum = 0;
    for (std::size_t k = 0; k < p; ++k) sum += cfg(i, k) * cfg(i + 1, k);
    spatial += inst.couplings[i] * static_cast<double>(sum);
  }
  long temporal = 0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < p; ++k) temporal += cfg(i, k) * cfg(i, (k + 1) % p);
  return -beta_p * spatial - jp * static_cast<double>(temporal);
}

StepCouplings make_couplings(const Instance& inst, double beta_p, double gamma, std::size_t trotter) {
  if (!(beta_p > 0.0)) throw ValidationError("beta_P must be positive");
  StepCouplings c;
  c.beta_p = beta_p;
  c.couplings = inst.couplings;
  c.spatial_bond.resize(inst.couplings.size());
  for (std::size_t i = 0; i < inst.couplings.size(); ++i)
    c.spatial_bond[i] = -std::expm1(-2.0 * beta_p * inst.couplings[i]);
  double jmax = 0.0;
  for (double j : inst.couplings) jmax = std::max(jmax, j);
  // keep every entry and every product of two entries finite
  const double top = 2.0 * beta_p * jmax * static_cast<double>(trotter);
  if (trotter > 0 && top < 300.0 && inst.couplings.size() * (2 * trotter + 1) <= (std::size_t{1} << 24)) {
    c.span = trotter;
    const std::size_t w = 2 * trotter + 1;
    c.metropolis.resize(inst.couplings.size() * w);
    for (std::size_t i = 0; i < inst.couplings.size(); ++i)
      for (std::size_t k = 0; k < w; ++k) {
        const double a = static_cast<double>(k) - static_cast<double>(trotter);
        c.metropolis[i * w + k] = std::exp(-2.0 * beta_p * inst.couplings[i] * a);
      }
  }
  update_gamma(c, gamma);
  return c;
}

double StepCouplings::flip_weight(std::size_t i, std::size_t length, long a, long b) const {
  if (span == 0) {
    const double jl = i > 0 ? couplings[i - 1] : 0.0;
    const double jr = i + 1 < length ? couplings[i] : 0.0;
    return std::exp(-2.0 * beta_p * (jl * static_cast<double>(a) + jr * static_cast<double>(b)));
  }
  const std::size_t w = 2 * span + 1;
  const auto off = static_cast<long>(span);
  double x = 1.0;
  if (i > 0) x *= metropolis[(i - 1) * w + static_cast<std::size_t>(a + off)];
  if (i + 1 < length) x *= metropolis[i * w + static_cast<std::size_t>(b + off)];
  return x;
}

void update_gamma(StepCouplings& c, double gamma) {
  if (!(gamma >= 0.0)) throw ValidationError("transverse field must be >= 0");
  c.gamma = gamma;
  c.frozen = gamma == 0.0;
  // exp(-2 J_perp) = tanh(beta_P Gamma)
  c.temporal_break = c.frozen ? 0.0 : std::tanh(c.beta_p * gamma);
}

Estimators measure(const PathConfig& cfg, const std::vector<double>& couplings, std::vector<double>& slice) {
  const std::size_t n = cfg.length();
  const std::size_t p = cfg.trotter();
  slice.assign(p, 0.0);
  double total = 0.0;
  double jsum = 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const std::int8_t* a = cfg.column(i);
    const std::int8_t* b = cfg.column(i + 1);
    const double j = couplings[i];
    long aligned = 0;
    for (std::size_t k = 0; k < p; ++k) {
      const int prod = a[k] * b[k];
      aligned += prod;
      slice[k] += j * static_cast<double>(1 - prod);
    }
    jsum += j;
    total += j * static_cast<double>(aligned);
  }
  const double inv_l = 1.0 / static_cast<double>(n);
  Estimators e;
  e.eps_avg = (jsum - total / static_cast<double>(p)) * inv_l;
  std::size_t best = 0;
  for (std::size_t k = 1; k < p; ++k)
    if (slice[k] < slice[best]) best = k;
  e.eps_min = {slice[best] * inv_l, best + 1};
  return e;
}

double measure_eps_avg(const PathConfig& cfg, const Instance& inst) {
  std::vector<double> scratch;
  return measure(cfg, inst.couplings, scratch).eps_avg;
}

SliceMinimum measure_eps_min(const PathConfig& cfg, const Instance& inst) {
  std::vector<double> scratch;
  return measure(cfg, inst.couplings, scratch).eps_min;
}

}  // namespace sqa::pimc
