#include "sqa/exact_fermion.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

#include "sqa/error.hpp"

namespace sqa::exact {

BdgMatrix build_bdg_matrix(const Instance& inst, double gamma) {
  if (!(gamma >= 0.0)) throw ValidationError("transverse field must be >= 0");
  validate(inst);
  const auto n = static_cast<Eigen::Index>(inst.length);
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  for (Eigen::Index i = 0; i < n; ++i) {
    m(i, i) = -2.0 * gamma;
    m(n + i, n + i) = 2.0 * gamma;
  }
  for (Eigen::Index i = 0; i + 1 < n; ++i) {
    const double j = inst.couplings[static_cast<std::size_t>(i)];
    // A block and its negative
    m(i, i + 1) = m(i + 1, i) = -j;
    m(n + i, n + i + 1) = m(n + i + 1, n + i) = j;
    // B block (antisymmetric) and -B
    m(i, n + i + 1) = -j;
    m(i + 1, n + i) = j;
    m(n + i, i + 1) = j;
    m(n + i + 1, i) = -j;
  }
  return {std::move(m), gamma, inst.length};
}

Eigen::VectorXd spectrum(const BdgMatrix& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m.matrix, Eigen::EigenvaluesOnly);
  return solver.eigenvalues();
}

double ground_energy(const BdgMatrix& m) {
  const Eigen::VectorXd e = spectrum(m);
  double sum = 0.0;
  for (Eigen::Index k = 0; k < e.size(); ++k)
    if (e(k) > 0.0) sum += e(k);
  return -0.5 * sum;
}

namespace {

// sz_i sz_{i+1} = (c_i^+ - c_i)(c_{i+1}^+ + c_{i+1}); with C = <Psi Psi^+>
// built from Nambu columns w this is sum_w (w_{L+i} - w_i) conj(w_{i+1} + w_{L+i+1}).
template <class Col>
auto bond_correlator(const Col& w, Eigen::Index n, Eigen::Index i) {
  using std::conj;
  return (w(n + i) - w(i)) * conj(w(i + 1) + w(n + i + 1));
}

}  // namespace

SpectralData::SpectralData(const Instance& inst, double gamma)
    : gamma_(gamma), coupling_sum_(0.0), length_(inst.length) {
  const BdgMatrix m = build_bdg_matrix(inst, gamma);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m.matrix);
  if (solver.info() != Eigen::Success) throw AccuracyError("BdG diagonalisation failed");
  energies_ = solver.eigenvalues();
  const Eigen::MatrixXd& w = solver.eigenvectors();
  const auto n = static_cast<Eigen::Index>(inst.length);
  bond_weight_ = Eigen::VectorXd::Zero(2 * n);
  for (Eigen::Index mu = 0; mu < 2 * n; ++mu) {
    const auto col = w.col(mu);
    double acc = 0.0;
    for (Eigen::Index i = 0; i + 1 < n; ++i)
      acc += inst.couplings[static_cast<std::size_t>(i)] * std::real(bond_correlator(col, n, i));
    bond_weight_(mu) = acc;
  }
  for (double j : inst.couplings) coupling_sum_ += j;
}

double SpectralData::eps_c(double temperature) const {
  if (!(temperature >= 0.0)) throw ValidationError("temperature must be >= 0");
  const double scale = energies_.cwiseAbs().maxCoeff();
  const double zero_tol = 1e-10 * (1.0 + scale);
  double correlated = 0.0;
  for (Eigen::Index mu = 0; mu < energies_.size(); ++mu) {
    const double e = energies_(mu);
    double occ;
    if (temperature == 0.0) {
      occ = std::abs(e) <= zero_tol ? 0.5 : (e > 0.0 ? 1.0 : 0.0);
    } else {
      occ = 0.5 * (1.0 + std::tanh(0.5 * e / temperature));
    }
    correlated += occ * bond_weight_(mu);
  }
  return (coupling_sum_ - correlated) / static_cast<double>(length_);
}

double equilibrium_eps_c(const Instance& inst, double gamma, double temperature) {
  if (!(temperature >= 0.0)) throw ValidationError("temperature must be >= 0");
  return SpectralData(inst, gamma).eps_c(temperature);
}

EquilibriumCurve::EquilibriumCurve(double temperature, std::vector<double> gammas,
                                   std::vector<double> values)
    : temperature_(temperature), gammas_(std::move(gammas)), values_(std::move(values)) {
  if (gammas_.empty()) throw ValidationError("empty gamma grid");
  interp_ = MonotoneCubic(gammas_, values_);
}

EquilibriumTable::EquilibriumTable(const Instance& inst, std::vector<double> gamma_grid)
    : gammas_(std::move(gamma_grid)) {
  if (gammas_.empty()) throw ValidationError("empty gamma grid");
  for (std::size_t k = 1; k < gammas_.size(); ++k)
    if (!(gammas_[k] > gammas_[k - 1]))
      throw ValidationError("gamma grid must be strictly ascending");
  spectra_.reserve(gammas_.size());
  for (double g : gammas_) spectra_.emplace_back(inst, g);
}

EquilibriumCurve EquilibriumTable::curve(double temperature) const {
  std::vector<double> values;
  values.reserve(spectra_.size());
  for (const auto& s : spectra_) values.push_back(s.eps_c(temperature));
  return EquilibriumCurve(temperature, gammas_, std::move(values));
}

EquilibriumCurve tabulate_equilibrium(const Instance& inst, const std::vector<double>& gamma_grid,
                                      double temperature) {
  if (!(temperature >= 0.0)) throw ValidationError("temperature must be >= 0");
  return EquilibriumTable(inst, gamma_grid).curve(temperature);
}

BdgState ground_state(const Instance& inst, double gamma) {
  const BdgMatrix m = build_bdg_matrix(inst, gamma);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m.matrix);
  if (solver.info() != Eigen::Success) throw AccuracyError("BdG diagonalisation failed");
  const auto n = static_cast<Eigen::Index>(inst.length);
  // ascending order: the upper half holds the positive branch
  const Eigen::MatrixXd pos = solver.eigenvectors().rightCols(n);
  BdgState s;
  s.u = pos.topRows(n).cast<std::complex<double>>();
  s.v = pos.bottomRows(n).cast<std::complex<double>>();
  s.t = 0.0;
  return s;
}

double orthonormality_defect(const BdgState& s) {
  const Eigen::MatrixXcd g = s.u.adjoint() * s.u + s.v.adjoint() * s.v;
  return (g - Eigen::MatrixXcd::Identity(g.rows(), g.cols())).cwiseAbs().maxCoeff();
}

double residual_energy(const Instance& inst, const BdgState& s) {
  const auto n = static_cast<Eigen::Index>(inst.length);
  double sum = 0.0;
  for (Eigen::Index i = 0; i + 1 < n; ++i) {
    std::complex<double> c = 0.0;
    for (Eigen::Index m = 0; m < s.u.cols(); ++m)
      c += (s.v(i, m) - s.u(i, m)) * std::conj(s.u(i + 1, m) + s.v(i + 1, m));
    sum += inst.couplings[static_cast<std::size_t>(i)] * (1.0 - c.real());
  }
  return sum / static_cast<double>(n);
}

}  // namespace sqa::exact
