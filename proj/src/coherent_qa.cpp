#include <algorithm>
#include <cmath>
#include <limits>

#include "sqa/error.hpp"
#include "sqa/exact_fermion.hpp"

namespace sqa::exact {

namespace {

// Packed mode storage: each occupied mode is a column of 4L doubles laid out
// as [Re u | Re v | Im u | Im v]. M is real, so -i M acts on the real and
// imaginary halves separately and every mode evolves independently.
class PackedModes {
 public:
  PackedModes(const Instance& inst, const BdgState& s)
      : n_(inst.length), data_(4 * n_ * n_), left_(n_, 0.0), right_(n_, 0.0) {
    for (std::size_t i = 0; i + 1 < n_; ++i) {
      right_[i] = inst.couplings[i];
      left_[i + 1] = inst.couplings[i];
    }
    for (std::size_t m = 0; m < n_; ++m) {
      double* col = column(m);
      for (std::size_t i = 0; i < n_; ++i) {
        const auto em = static_cast<Eigen::Index>(m);
        const auto ei = static_cast<Eigen::Index>(i);
        col[i] = s.u(ei, em).real();
        col[n_ + i] = s.v(ei, em).real();
        col[2 * n_ + i] = s.u(ei, em).imag();
        col[3 * n_ + i] = s.v(ei, em).imag();
      }
    }
  }

  std::size_t modes() const noexcept { return n_; }
  double* column(std::size_t m) noexcept { return data_.data() + 4 * n_ * m; }
  const double* column(std::size_t m) const noexcept { return data_.data() + 4 * n_ * m; }

  // out = sign * M(gamma) in, for one real 2L Nambu vector.
  void apply(double gamma, const double* in, double* out, double sign) const {
    const std::size_t n = n_;
    const double* u = in;
    const double* v = in + n;
    double* ou = out;
    double* ov = out + n;
    const double g2 = 2.0 * gamma;
    const double* jl = left_.data();
    const double* jr = right_.data();
    {
      const double s = jr[0] * (u[1] + v[1]);
      ou[0] = sign * (-g2 * u[0] - s);
      ov[0] = sign * (g2 * v[0] + s);
    }
    for (std::size_t i = 1; i + 1 < n; ++i) {
      const double d = jl[i] * (u[i - 1] - v[i - 1]);
      const double s = jr[i] * (u[i + 1] + v[i + 1]);
      ou[i] = sign * (-g2 * u[i] - d - s);
      ov[i] = sign * (g2 * v[i] - d + s);
    }
    {
      const std::size_t i = n - 1;
      const double d = jl[i] * (u[i - 1] - v[i - 1]);
      ou[i] = sign * (-g2 * u[i] - d);
      ov[i] = sign * (g2 * v[i] - d);
    }
  }

  // d/dt (yr + i yi) = -i M (yr + i yi)  =>  yr' = M yi,  yi' = -M yr
  void derivative(double gamma, const double* y, double* dy) const {
    apply(gamma, y + 2 * n_, dy, 1.0);
    apply(gamma, y, dy + 2 * n_, -1.0);
  }

  // RK4 on every mode over consecutive steps; gammas holds (start, mid, end)
  // field values per step.
  void advance(const std::vector<double>& gammas, double h) {
    const std::size_t len = 4 * n_;
    std::vector<double> k(len), acc(len), tmp(len);
    const std::size_t steps = gammas.size() / 3;
    for (std::size_t m = 0; m < n_; ++m) {
      double* y = column(m);
      for (std::size_t s = 0; s < steps; ++s) {
        const double g0 = gammas[3 * s];
        const double gh = gammas[3 * s + 1];
        const double g1 = gammas[3 * s + 2];
        derivative(g0, y, k.data());
        for (std::size_t a = 0; a < len; ++a) {
          acc[a] = y[a] + (h / 6.0) * k[a];
          tmp[a] = y[a] + 0.5 * h * k[a];
        }
        derivative(gh, tmp.data(), k.data());
        for (std::size_t a = 0; a < len; ++a) {
          acc[a] += (h / 3.0) * k[a];
          tmp[a] = y[a] + 0.5 * h * k[a];
        }
        derivative(gh, tmp.data(), k.data());
        for (std::size_t a = 0; a < len; ++a) {
          acc[a] += (h / 3.0) * k[a];
          tmp[a] = y[a] + h * k[a];
        }
        derivative(g1, tmp.data(), k.data());
        for (std::size_t a = 0; a < len; ++a) y[a] = acc[a] + (h / 6.0) * k[a];
      }
    }
  }

  double residual_energy(const std::vector<double>& couplings) const {
    const std::size_t n = n_;
    std::vector<double> corr(n - 1, 0.0);
    for (std::size_t m = 0; m < n; ++m) {
      const double* c = column(m);
      const double* ur = c;
      const double* vr = c + n;
      const double* ui = c + 2 * n;
      const double* vi = c + 3 * n;
      for (std::size_t i = 0; i + 1 < n; ++i)
        corr[i] += (vr[i] - ur[i]) * (ur[i + 1] + vr[i + 1]) + (vi[i] - ui[i]) * (ui[i + 1] + vi[i + 1]);
    }
    double sum = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i) sum += couplings[i] * (1.0 - corr[i]);
    return sum / static_cast<double>(n);
  }

  double orthonormality_defect() const {
    const auto n = static_cast<Eigen::Index>(n_);
    Eigen::Map<const Eigen::MatrixXd> y(data_.data(), 4 * n, n);
    const auto yr = y.topRows(2 * n);
    const auto yi = y.bottomRows(2 * n);
    Eigen::MatrixXd re = yr.transpose() * yr + yi.transpose() * yi;
    Eigen::MatrixXd im = yr.transpose() * yi - yi.transpose() * yr;
    re -= Eigen::MatrixXd::Identity(n, n);
    return std::sqrt((re.array().square() + im.array().square()).maxCoeff());
  }

  BdgState unpack(double t) const {
    const auto n = static_cast<Eigen::Index>(n_);
    BdgState s;
    s.u.resize(n, n);
    s.v.resize(n, n);
    for (Eigen::Index m = 0; m < n; ++m) {
      const double* c = column(static_cast<std::size_t>(m));
      for (Eigen::Index i = 0; i < n; ++i) {
        s.u(i, m) = {c[i], c[2 * n + i]};
        s.v(i, m) = {c[n + i], c[3 * n + i]};
      }
    }
    s.t = t;
    return s;
  }

 private:
  std::size_t n_;
  std::vector<double> data_;
  std::vector<double> left_, right_;
};

}  // namespace

double default_dt(double tau) { return std::min(1e-2, tau / 1e5); }

double drift_dt(double tau, double omega, double drift_limit) {
  if (!(omega > 0.0)) return std::numeric_limits<double>::infinity();
  return std::pow(0.2 * drift_limit * 72.0 / (std::pow(omega, 6) * tau), 0.2);
}

double automatic_dt(const Instance& inst, double gamma_start, double tau, double drift_limit) {
  // mode frequencies shrink with Gamma; the start of the sweep bounds them
  const double omega = spectrum(build_bdg_matrix(inst, gamma_start)).cwiseAbs().maxCoeff();
  return std::min(default_dt(tau), drift_dt(tau, omega, drift_limit));
}

std::vector<TrajectoryRecord> coherent_qa_evolve(const Instance& inst, const GammaProfile& gamma,
                                                 double tau, const EvolveOptions& opts,
                                                 BdgState* final_state) {
  validate(inst);
  if (!(tau > 0.0)) throw ValidationError("annealing time tau must be positive");
  if (opts.dt < 0.0 || std::isnan(opts.dt)) throw ValidationError("time step dt must be positive");
  double dt_req = opts.dt;
  const double g_start = gamma(0.0);
  if (!(g_start >= 0.0)) throw ValidationError("transverse field must be >= 0");
  if (dt_req == 0.0) dt_req = automatic_dt(inst, g_start, tau, opts.drift_limit);
  if (opts.records == 0) throw ValidationError("need at least one output record");

  const auto n_steps = static_cast<std::size_t>(std::max(1.0, std::ceil(tau / dt_req - 1e-9)));
  const double h = tau / static_cast<double>(n_steps);

  std::vector<std::size_t> marks;
  for (std::size_t j = 0; j <= opts.records; ++j) {
    const auto s = static_cast<std::size_t>(
        std::llround(static_cast<double>(j) * static_cast<double>(n_steps) / static_cast<double>(opts.records)));
    if (marks.empty() || s > marks.back()) marks.push_back(s);
  }

  PackedModes modes(inst, ground_state(inst, g_start));

  std::vector<TrajectoryRecord> out;
  out.reserve(marks.size());
  auto emit = [&](std::size_t step) {
    const double t = step == n_steps ? tau : static_cast<double>(step) * h;
    const double defect = modes.orthonormality_defect();
    if (!(defect < opts.drift_limit))
      throw AccuracyError("orthonormality drift " + std::to_string(defect) + " at t=" + std::to_string(t) +
                          " exceeds limit; reduce dt");
    const double e = modes.residual_energy(inst.couplings);
    out.push_back({t, gamma(t), e, e, -1, 0});
  };

  emit(0);
  std::vector<double> gammas;
  for (std::size_t r = 1; r < marks.size(); ++r) {
    gammas.clear();
    for (std::size_t s = marks[r - 1]; s < marks[r]; ++s) {
      const double t0 = static_cast<double>(s) * h;
      const double t1 = s + 1 == n_steps ? tau : t0 + h;
      gammas.push_back(gamma(t0));
      gammas.push_back(gamma(t0 + 0.5 * h));
      gammas.push_back(gamma(t1));
    }
    modes.advance(gammas, h);
    emit(marks[r]);
  }
  if (final_state) *final_state = modes.unpack(tau);
  return out;
}

std::vector<TrajectoryRecord> coherent_qa_evolve(const Instance& inst, const Schedule& schedule,
                                                 const EvolveOptions& opts) {
  validate(schedule);
  return coherent_qa_evolve(
      inst, [&](double t) { return schedule_gamma(schedule, std::clamp(t, 0.0, schedule.tau)); },
      schedule.tau, opts);
}

}  // namespace sqa::exact
