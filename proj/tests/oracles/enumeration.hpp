#pragma once

// Exhaustive references for the classical Suzuki-Trotter lattice: Boltzmann
// weights over all 2^(L P) configurations, and exact one-step transition
// kernels obtained by enumerating every random decision a move makes.

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <vector>

#include "sqa/moves.hpp"
#include "sqa/pimc.hpp"

namespace oracle {

inline sqa::pimc::PathConfig decode(std::uint32_t code, std::size_t l, std::size_t p) {
  sqa::pimc::PathConfig cfg(l, p);
  for (std::size_t i = 0; i < l; ++i)
    for (std::size_t k = 0; k < p; ++k) cfg(i, k) = (code >> (i * p + k)) & 1u ? -1 : 1;
  return cfg;
}

inline std::uint32_t encode(const sqa::pimc::PathConfig& cfg) {
  std::uint32_t code = 0;
  for (std::size_t i = 0; i < cfg.length(); ++i)
    for (std::size_t k = 0; k < cfg.trotter(); ++k)
      if (cfg(i, k) < 0) code |= 1u << (i * cfg.trotter() + k);
  return code;
}

// Action re-derived term by term, independent of pimc::classical_action.
inline double action(std::uint32_t code, const std::vector<double>& j, std::size_t p, double beta_p,
                     double j_perp) {
  const std::size_t l = j.size() + 1;
  auto s = [&](std::size_t i, std::size_t k) { return (code >> (i * p + k)) & 1u ? -1.0 : 1.0; };
  double k_cl = 0.0;
  for (std::size_t k = 0; k < p; ++k) {
    for (std::size_t i = 0; i + 1 < l; ++i) k_cl -= beta_p * j[i] * s(i, k) * s(i + 1, k);
    for (std::size_t i = 0; i < l; ++i) k_cl -= j_perp * s(i, k) * s(i, (k + 1) % p);
  }
  return k_cl;
}

// Normalised exp(-K) over every configuration.
inline std::vector<double> boltzmann(const std::vector<double>& j, std::size_t p, double beta_p, double j_perp) {
  const std::size_t l = j.size() + 1;
  const std::uint32_t states = 1u << (l * p);
  std::vector<double> k(states), w(states);
  double k_min = INFINITY;
  for (std::uint32_t c = 0; c < states; ++c) {
    k[c] = action(c, j, p, beta_p, j_perp);
    k_min = std::min(k_min, k[c]);
  }
  double z = 0.0;
  for (std::uint32_t c = 0; c < states; ++c) z += (w[c] = std::exp(-(k[c] - k_min)));
  for (auto& x : w) x /= z;
  return w;
}

// Replica-averaged bond energy, summed directly from the definition.
inline double eps_avg_direct(std::uint32_t code, const std::vector<double>& j, std::size_t p) {
  const std::size_t l = j.size() + 1;
  auto s = [&](std::size_t i, std::size_t k) { return (code >> (i * p + k)) & 1u ? -1.0 : 1.0; };
  double e = 0.0;
  for (std::size_t i = 0; i + 1 < l; ++i) {
    double corr = 0.0;
    for (std::size_t k = 0; k < p; ++k) corr += s(i, k) * s(i + 1, k);
    e += j[i] * (1.0 - corr / static_cast<double>(p));
  }
  return e / static_cast<double>(l);
}

// Decision source that follows a scripted branch prefix (then branch 0) and
// records the probability of the path it took.
class ScriptedDecisions {
 public:
  struct Step {
    std::size_t choice;
    std::size_t count;
  };

  explicit ScriptedDecisions(std::vector<std::size_t> prefix) : prefix_(std::move(prefix)) {}

  bool bernoulli(double p) {
    if (p >= 1.0) return true;
    if (p <= 0.0) return false;
    const std::size_t c = choose(2);
    prob_ *= c == 0 ? p : 1.0 - p;
    return c == 0;
  }

  std::size_t first_success(double q, std::size_t n) {
    if (n == 0 || q >= 1.0) return 0;
    if (q <= 0.0) return n;
    const std::size_t c = choose(n + 1);
    prob_ *= c < n ? q * std::pow(1.0 - q, static_cast<double>(c)) : std::pow(1.0 - q, static_cast<double>(n));
    return c;
  }

  std::size_t index(std::size_t n) {
    const std::size_t c = choose(n);
    prob_ /= static_cast<double>(n);
    return c;
  }

  double probability() const { return prob_; }
  const std::vector<Step>& trace() const { return trace_; }

 private:
  std::size_t choose(std::size_t count) {
    const std::size_t d = trace_.size();
    const std::size_t c = d < prefix_.size() ? prefix_[d] : 0;
    trace_.push_back({c, count});
    return c;
  }

  std::vector<std::size_t> prefix_;
  std::vector<Step> trace_;
  double prob_ = 1.0;
};

// Exact distribution of the configuration after one application of `move`
// starting from `start`: map code -> probability.
inline std::map<std::uint32_t, double> transition_row(
    const sqa::pimc::PathConfig& start,
    const std::function<void(sqa::pimc::PathConfig&, ScriptedDecisions&)>& move) {
  std::map<std::uint32_t, double> row;
  std::vector<std::size_t> prefix;
  for (;;) {
    ScriptedDecisions src(prefix);
    sqa::pimc::PathConfig cfg = start;
    move(cfg, src);
    row[encode(cfg)] += src.probability();
    auto trace = src.trace();
    while (!trace.empty() && trace.back().choice + 1 >= trace.back().count) trace.pop_back();
    if (trace.empty()) break;
    ++trace.back().choice;
    prefix.clear();
    for (const auto& s : trace) prefix.push_back(s.choice);
  }
  return row;
}

// Full one-MCS transition matrix over all 2^(L P) configurations.
inline Eigen::MatrixXd transition_matrix(sqa::pimc::MoveFamily family, const sqa::Instance& inst, std::size_t p,
                                         double beta_p, double gamma, bool tabulated = false) {
  using namespace sqa::pimc;
  const StepCouplings c = make_couplings(inst, beta_p, gamma, tabulated ? p : 0);
  const std::size_t l = inst.length;
  const std::uint32_t states = 1u << (l * p);
  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(states, states);
  for (std::uint32_t s = 0; s < states; ++s) {
    const auto row = transition_row(decode(s, l, p), [&](PathConfig& cfg, ScriptedDecisions& d) {
      MoveWorkspace ws;
      monte_carlo_step(family, cfg, c, d, ws);
    });
    for (const auto& [to, prob] : row) t(s, to) += prob;
  }
  return t;
}

inline Eigen::VectorXd boltzmann_vector(const sqa::Instance& inst, std::size_t p, double beta_p, double gamma) {
  const auto w = boltzmann(inst.couplings, p, beta_p, sqa::pimc::j_perp(beta_p, gamma));
  return Eigen::Map<const Eigen::VectorXd>(w.data(), static_cast<Eigen::Index>(w.size()));
}

}  // namespace oracle
