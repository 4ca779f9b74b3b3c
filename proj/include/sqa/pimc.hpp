#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "sqa/instance.hpp"
#include "sqa/rng.hpp"

namespace sqa::pimc {

enum class MoveFamily { time_cluster, spacetime_sw, spacetime_wolff };

std::string to_string(MoveFamily m);
// Accepts the CLI spellings time|sw|wolff and the long names.
MoveFamily parse_moves(const std::string& text);

// L x P classical spins with periodic imaginary time. Storage is one byte per
// spin, site-major: the P slices of site i are contiguous.
class PathConfig {
 public:
  PathConfig(std::size_t length, std::size_t trotter, std::int8_t fill = 1);

  static PathConfig random(std::size_t length, std::size_t trotter, Rng& rng);

  std::size_t length() const noexcept { return length_; }
  std::size_t trotter() const noexcept { return trotter_; }

  std::int8_t operator()(std::size_t site, std::size_t slice) const noexcept {
    return spins_[site * trotter_ + slice];
  }
  std::int8_t& operator()(std::size_t site, std::size_t slice) noexcept {
    return spins_[site * trotter_ + slice];
  }
  const std::int8_t* column(std::size_t site) const noexcept { return spins_.data() + site * trotter_; }
  std::int8_t* column(std::size_t site) noexcept { return spins_.data() + site * trotter_; }

  std::vector<std::int8_t>& raw() noexcept { return spins_; }
  const std::vector<std::int8_t>& raw() const noexcept { return spins_; }

  void flip_all() noexcept;
  bool operator==(const PathConfig&) const = default;

 private:
  std::size_t length_;
  std::size_t trotter_;
  std::vector<std::int8_t> spins_;
};

// -(1/2) log tanh(beta_P Gamma). Returns +infinity at Gamma = 0, the frozen
// end of an annealing run; throws ValidationError for negative arguments.
double j_perp(double beta_p, double gamma);

struct PimcParams {
  double temperature = 1.0;
  double gamma = 1.0;
  std::size_t trotter = 1;
  MoveFamily moves = MoveFamily::spacetime_sw;
  std::size_t t_run = 0;

  double beta_p() const { return 1.0 / (temperature * static_cast<double>(trotter)); }
  double coupling_perp() const { return j_perp(beta_p(), gamma); }
};

void validate(const PimcParams& p);

// K_cl = -sum_k sum_i beta_P J_i S_i^k S_{i+1}^k - sum_k sum_i J_perp S_i^k S_i^{k+1}
double classical_action(const PathConfig& cfg, const Instance& inst, const PimcParams& params);

// Bond probabilities for one Monte Carlo step at fixed (beta_P, Gamma).
struct StepCouplings {
  double beta_p = 0.0;
  double gamma = 0.0;
  bool frozen = false;               // Gamma == 0: temporal bonds always active
  double temporal_break = 0.0;       // exp(-2 J_perp)
  std::vector<double> couplings;     // J_i
  std::vector<double> spatial_bond;  // 1 - exp(-2 beta_P J_i)
  // exp(-2 beta_P J_i a) for a in [-span, span], bond-major; empty when not
  // tabulated
  std::vector<double> metropolis;
  std::size_t span = 0;

  // exp(-2 beta_P (J_{i-1} a + J_i b)) for the column of site i
  double flip_weight(std::size_t i, std::size_t length, long a, long b) const;
};

// With trotter > 0 the spatial Metropolis weights of the time-cluster move
// are tabulated for clusters of up to `trotter` slices.
StepCouplings make_couplings(const Instance& inst, double beta_p, double gamma, std::size_t trotter = 0);
void update_gamma(StepCouplings& c, double gamma);

// (1/L) sum_i J_i (1 - (1/P) sum_k S_i^k S_{i+1}^k)
double measure_eps_avg(const PathConfig& cfg, const Instance& inst);

struct SliceMinimum {
  double value = 0.0;
  std::size_t slice = 1;  // 1-based k*, smallest on ties
};

SliceMinimum measure_eps_min(const PathConfig& cfg, const Instance& inst);

// Both estimators in one pass over the lattice.
struct Estimators {
  double eps_avg = 0.0;
  SliceMinimum eps_min;
};

Estimators measure(const PathConfig& cfg, const std::vector<double>& couplings, std::vector<double>& slice_scratch);

}  // namespace sqa::pimc
