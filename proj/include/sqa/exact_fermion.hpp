#pragma once

#include <Eigen/Dense>
#include <functional>
#include <span>
#include <vector>

#include "sqa/instance.hpp"
#include "sqa/interpolation.hpp"
#include "sqa/schedule.hpp"

namespace sqa::exact {

// 2L x 2L Bogoliubov-de Gennes matrix M of the Jordan-Wigner fermions in the
// Nambu basis (c_1..c_L, c_1^+..c_L^+), normalised so that H = Psi^+ M Psi / 2
// with no additive constant:
//   M = [[A, B], [-B, -A]],  A_ii = -2 Gamma, A_{i,i+1} = A_{i+1,i} = -J_i,
//   B_{i,i+1} = -J_i, B_{i+1,i} = +J_i.
struct BdgMatrix {
  Eigen::MatrixXd matrix;
  double gamma = 0.0;
  std::size_t length = 0;
};

BdgMatrix build_bdg_matrix(const Instance& inst, double gamma);

// Ascending single-particle spectrum (comes in +/- pairs).
Eigen::VectorXd spectrum(const BdgMatrix& m);

// Many-body ground energy -(1/2) sum of the positive eigenvalues.
double ground_energy(const BdgMatrix& m);

// Eigen-decomposition of M reduced to what the bond energy needs: for every
// eigenvalue E_mu the weight y_mu = sum_i J_i <sigma^z_i sigma^z_{i+1}>_mu
// carried by that mode. Thermal averages at any T then cost O(L).
class SpectralData {
 public:
  SpectralData(const Instance& inst, double gamma);

  double gamma() const noexcept { return gamma_; }
  const Eigen::VectorXd& energies() const noexcept { return energies_; }

  // Occupation <gamma gamma^+> = 1 - f(E) of each Nambu eigenmode; T = 0
  // fills negative modes and gives exact zero modes weight 1/2.
  double eps_c(double temperature) const;

 private:
  double gamma_;
  double coupling_sum_;
  std::size_t length_;
  Eigen::VectorXd energies_;
  Eigen::VectorXd bond_weight_;
};

// eps_c(Gamma, T) = (1/L) sum_i J_i (1 - <sz_i sz_{i+1}>_{Gamma,T}).
double equilibrium_eps_c(const Instance& inst, double gamma, double temperature);

// eps_c over an ascending Gamma grid at one temperature, monotone cubic
// interpolation in between.
class EquilibriumCurve {
 public:
  EquilibriumCurve(double temperature, std::vector<double> gammas, std::vector<double> values);

  double temperature() const noexcept { return temperature_; }
  const std::vector<double>& gammas() const noexcept { return gammas_; }
  const std::vector<double>& values() const noexcept { return values_; }
  double operator()(double gamma) const { return interp_(gamma); }

 private:
  double temperature_;
  std::vector<double> gammas_;
  std::vector<double> values_;
  MonotoneCubic interp_;
};

// Holds one SpectralData per grid point; curves at any temperature are then
// cheap. This is the curve factory used by the effective-temperature fit.
class EquilibriumTable {
 public:
  EquilibriumTable(const Instance& inst, std::vector<double> gamma_grid);

  EquilibriumCurve curve(double temperature) const;
  const std::vector<double>& gammas() const noexcept { return gammas_; }

 private:
  std::vector<double> gammas_;
  std::vector<SpectralData> spectra_;
};

EquilibriumCurve tabulate_equilibrium(const Instance& inst, const std::vector<double>& gamma_grid,
                                      double temperature);

// Occupied Bogoliubov modes: column m of [u; v] is a 2L Nambu vector.
struct BdgState {
  Eigen::MatrixXcd u;
  Eigen::MatrixXcd v;
  double t = 0.0;
};

// Ground state of M(gamma): the eigenvectors with positive eigenvalue.
BdgState ground_state(const Instance& inst, double gamma);

// max |u^+u + v^+v - 1|
double orthonormality_defect(const BdgState& s);

// Residual bond energy (1/L) sum_i J_i (1 - <sz_i sz_{i+1}>) of the state.
double residual_energy(const Instance& inst, const BdgState& s);

struct EvolveOptions {
  double dt = 0.0;            // 0 selects min(default_dt, drift_dt)
  std::size_t records = 200;  // output records after t = 0
  double drift_limit = 1e-6;  // orthonormality drift that aborts the run
};

double default_dt(double tau);

// Largest RK4 step whose accumulated norm loss, steps * (omega h)^6 / 72 for
// the fastest mode frequency omega, stays below a fifth of drift_limit.
double drift_dt(double tau, double omega, double drift_limit);

// The step used when EvolveOptions::dt is 0, for a sweep that starts at
// gamma_start and never raises the field.
double automatic_dt(const Instance& inst, double gamma_start, double tau, double drift_limit);

using GammaProfile = std::function<double(double)>;

// Integrates i d/dt [u; v] = M(Gamma(t)) [u; v] with fixed-step RK4 from the
// ground state at Gamma(0) up to t = tau. Records start at t = 0 and always
// include t = tau. Throws AccuracyError when the orthonormality drift
// exceeds the limit at a record.
std::vector<TrajectoryRecord> coherent_qa_evolve(const Instance& inst, const GammaProfile& gamma,
                                                 double tau, const EvolveOptions& opts = {},
                                                 BdgState* final_state = nullptr);

std::vector<TrajectoryRecord> coherent_qa_evolve(const Instance& inst, const Schedule& schedule,
                                                 const EvolveOptions& opts = {});

}  // namespace sqa::exact
