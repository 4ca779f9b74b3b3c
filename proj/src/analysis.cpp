#include "sqa/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

namespace sqa::analysis {

namespace {

constexpr double kInvPhi = 0.6180339887498949;  // (sqrt 5 - 1) / 2

// Golden-section minimum of f on [a, b].
template <class F>
double golden_section(F&& f, double a, double b, double rel_tol = 1e-13, int max_iter = 300) {
  double c = b - kInvPhi * (b - a);
  double d = a + kInvPhi * (b - a);
  double fc = f(c);
  double fd = f(d);
  for (int it = 0; it < max_iter && (b - a) > rel_tol * (std::abs(a) + std::abs(b)) + 1e-300; ++it) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kInvPhi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kInvPhi * (b - a);
      fd = f(d);
    }
  }
  return fc <= fd ? c : d;
}

// The scan is accepted when its global minimum is not at the upper end and
// no other local minimum competes with it. A local minimum b competes with
// the global one a when it lies closer to a than to the highest point c
// between them: b - a < c - b. Ripples far above the minimum never do.
bool unimodal(const std::vector<double>& v, std::size_t argmin) {
  if (argmin + 1 >= v.size()) return false;
  const double a = v[argmin];
  for (std::size_t k = 0; k < v.size(); ++k) {
    if (k + 1 == argmin || k == argmin || k == argmin + 1) continue;
    const bool left = k == 0 || v[k] <= v[k - 1];
    const bool right = k + 1 == v.size() || v[k] <= v[k + 1];
    if (!(left && right)) continue;
    const auto [lo, hi] = std::minmax(k, argmin);
    const double c = *std::max_element(v.begin() + static_cast<long>(lo), v.begin() + static_cast<long>(hi) + 1);
    if (v[k] - a < c - v[k]) return false;
  }
  return true;
}

}  // namespace

FitResult fit_teff(const std::vector<GammaSample>& trajectory, const exact::EquilibriumTable& table,
                   const TeffOptions& opts) {
  if (!(opts.t_min >= 0.0) || !(opts.t_max > opts.t_min))
    throw ValidationError("temperature bracket must satisfy 0 <= t_min < t_max");
  std::vector<GammaSample> pts;
  for (const auto& s : trajectory)
    if (s.gamma >= opts.window.lo - 1e-12 && s.gamma <= opts.window.hi + 1e-12) pts.push_back(s);
  if (pts.size() < 2) throw ValidationError("fewer than two trajectory points inside the Gamma window");
  const auto [gmin, gmax] = std::minmax_element(pts.begin(), pts.end(), [](auto& a, auto& b) {
    return a.gamma < b.gamma;
  });
  if (gmax->gamma - gmin->gamma < 0.5 - 1e-12)
    throw ValidationError("trajectory covers a Gamma range narrower than 0.5");

  auto objective = [&](double temp) {
    const exact::EquilibriumCurve curve = table.curve(temp);
    double s = 0.0;
    for (const auto& p : pts) {
      const double r = p.eps - curve(p.gamma);
      s += r * r;
    }
    return s;
  };

  double t_max = opts.t_max;
  std::vector<double> grid, values;
  std::size_t best = 0;
  bool ok = false;
  for (int attempt = 0; attempt < 2 && !ok; ++attempt) {
    grid.clear();
    values.clear();
    const double lo = std::max(opts.t_min, 1e-4);
    if (opts.t_min < lo) grid.push_back(opts.t_min);
    constexpr int kScan = 80;
    for (int k = 0; k <= kScan; ++k) grid.push_back(lo * std::pow(t_max / lo, k / double(kScan)));
    for (double t : grid) values.push_back(objective(t));
    best = static_cast<std::size_t>(std::min_element(values.begin(), values.end()) - values.begin());
    ok = unimodal(values, best);
    if (!ok) t_max *= 10.0;
  }
  if (!ok) throw AccuracyError("T_eff objective is not unimodal in the temperature bracket");

  double t_star = grid[best];
  if (best > 0) t_star = golden_section(objective, grid[best - 1], grid[best + 1]);
  else t_star = golden_section(objective, grid[0], grid[1]);
  const double f_min = objective(t_star);

  const auto n = static_cast<double>(pts.size());
  double data_sq = 0.0;
  for (const auto& p : pts) data_sq += p.eps * p.eps;

  double sigma = 0.0;
  if (f_min > 0.0 && pts.size() > 1) {
    const double h = std::max(1e-4 * t_star, 1e-7);
    const double lo = std::max(opts.t_min, t_star - h);
    const double hi = lo + 2.0 * h;
    const double mid = 0.5 * (lo + hi);
    const double curv = (objective(hi) - 2.0 * objective(mid) + objective(lo)) / (h * h);
    const double s2 = f_min / (n - 1.0);
    sigma = curv > 0.0 ? std::sqrt(2.0 * s2 / curv) : std::numeric_limits<double>::infinity();
  }

  FitResult r;
  r.names = {"T_eff"};
  r.parameter = {t_star};
  r.stderr_ = {sigma};
  r.window = opts.window;
  r.points = pts.size();
  r.residual_rms = data_sq > 0.0 ? std::sqrt(f_min / data_sq) : 0.0;
  return r;
}

FitWindow central_decade(const std::vector<PowerPoint>& points) {
  if (points.empty()) throw ValidationError("no points");
  double lo = std::numeric_limits<double>::infinity();
  double hi = 0.0;
  for (const auto& p : points) {
    lo = std::min(lo, p.tau);
    hi = std::max(hi, p.tau);
  }
  if (hi / lo <= 10.0) return {lo, hi};
  const double c = std::sqrt(lo * hi);
  const double half = std::sqrt(10.0);
  return {c / half, c * half};
}

FitResult fit_power_law(const std::vector<PowerPoint>& points, FitWindow window) {
  std::vector<double> x, y;
  for (const auto& p : points) {
    if (p.tau < window.lo * (1 - 1e-9) || p.tau > window.hi * (1 + 1e-9)) continue;
    if (!(p.eps > 0.0) || !(p.tau > 0.0))
      throw ValidationError("power-law fit needs positive tau and eps inside the window");
    x.push_back(std::log(p.tau));
    y.push_back(std::log(p.eps));
  }
  if (x.size() < 4) throw ValidationError("power-law fit needs at least 4 points in the window");
  const auto n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) {
    mx += x[j];
    my += y[j];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) {
    sxx += (x[j] - mx) * (x[j] - mx);
    sxy += (x[j] - mx) * (y[j] - my);
  }
  if (!(sxx > 0.0)) throw ValidationError("power-law fit needs distinct tau values");
  const double slope = sxy / sxx;
  const double icpt = my - slope * mx;
  double ssr = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) {
    const double r = y[j] - icpt - slope * x[j];
    ssr += r * r;
  }
  FitResult r;
  r.names = {"exponent"};
  r.parameter = {slope};
  r.stderr_ = {std::sqrt(ssr / (n - 2.0) / sxx)};
  r.window = window;
  r.points = x.size();
  r.residual_rms = std::sqrt(ssr / n);
  return r;
}

FitResult fit_log_law(const std::vector<PowerPoint>& points) {
  if (points.size() < 5) throw ValidationError("log-law fit needs at least 5 points");
  std::vector<double> lt, y;
  double lt_min = std::numeric_limits<double>::infinity();
  double tau_lo = std::numeric_limits<double>::infinity(), tau_hi = 0.0;
  for (const auto& p : points) {
    if (!(p.tau > 0.0) || !(p.eps > 0.0)) throw ValidationError("log-law fit needs tau > 0 and eps > 0");
    lt.push_back(std::log(p.tau));
    y.push_back(std::log(p.eps));
    lt_min = std::min(lt_min, lt.back());
    tau_lo = std::min(tau_lo, p.tau);
    tau_hi = std::max(tau_hi, p.tau);
  }
  const std::size_t n = lt.size();

  // a = log gamma; u = a + min log tau > 0 keeps every log(gamma tau) positive
  auto profile = [&](double log_u, double* xi_out) {
    const double a = std::exp(log_u) - lt_min;
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double x = std::log(a + lt[j]);
      sxy += x * y[j];
      sxx += x * x;
    }
    const double xi = sxx > 0.0 ? -sxy / sxx : 0.0;
    double ssr = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double r = y[j] + xi * std::log(a + lt[j]);
      ssr += r * r;
    }
    if (xi_out) *xi_out = xi;
    return ssr;
  };

  constexpr int kScan = 240;
  const double scan_lo = std::log(1e-6), scan_hi = std::log(1e6);
  std::vector<double> grid(kScan + 1), vals(kScan + 1);
  for (int k = 0; k <= kScan; ++k) {
    grid[k] = scan_lo + (scan_hi - scan_lo) * k / kScan;
    vals[k] = profile(grid[k], nullptr);
  }
  const auto best = static_cast<std::size_t>(std::min_element(vals.begin(), vals.end()) - vals.begin());
  const double left = grid[best == 0 ? 0 : best - 1];
  const double right = grid[std::min<std::size_t>(best + 1, kScan)];
  const double log_u = golden_section([&](double v) { return profile(v, nullptr); }, left, right);

  double xi = 0.0;
  double ssr = profile(log_u, &xi);
  double a = std::exp(log_u) - lt_min;

  // Gauss-Newton polish in (a, xi)
  auto residuals = [&](double aa, double xx, double* s) {
    double sum = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double arg = aa + lt[j];
      if (!(arg > 0.0)) return std::numeric_limits<double>::infinity();
      const double r = y[j] + xx * std::log(arg);
      sum += r * r;
    }
    if (s) *s = sum;
    return sum;
  };
  bool converged = false;
  Eigen::Matrix2d jtj = Eigen::Matrix2d::Zero();
  for (int it = 0; it < 100; ++it) {
    Eigen::Vector2d jtr = Eigen::Vector2d::Zero();
    jtj.setZero();
    for (std::size_t j = 0; j < n; ++j) {
      const double arg = a + lt[j];
      const double r = y[j] + xi * std::log(arg);
      const Eigen::Vector2d g(xi / arg, std::log(arg));
      jtj += g * g.transpose();
      jtr += g * r;
    }
    const Eigen::Vector2d step = jtj.ldlt().solve(-jtr);
    double lambda = 1.0;
    bool improved = false;
    for (int h = 0; h < 40; ++h) {
      const double s_new = residuals(a + lambda * step(0), xi + lambda * step(1), nullptr);
      if (s_new <= ssr) {
        a += lambda * step(0);
        xi += lambda * step(1);
        improved = s_new < ssr;
        ssr = s_new;
        break;
      }
      lambda *= 0.5;
    }
    const double scale = std::abs(a) + std::abs(xi) + 1.0;
    if (!improved || step.norm() * lambda < 1e-14 * scale) {
      converged = true;
      break;
    }
  }

  FitResult r;
  r.names = {"gamma", "xi"};
  r.parameter = {std::exp(a), xi};
  r.window = {tau_lo, tau_hi};
  r.points = n;
  r.residual_rms = std::sqrt(ssr / static_cast<double>(n));
  const double s2 = n > 2 ? ssr / static_cast<double>(n - 2) : 0.0;
  const Eigen::Matrix2d cov = s2 * jtj.inverse();
  r.stderr_ = {std::exp(a) * std::sqrt(std::max(0.0, cov(0, 0))), std::sqrt(std::max(0.0, cov(1, 1)))};
  if (!converged || !std::isfinite(ssr)) throw FitError("log-law fit did not converge", r);
  return r;
}

}  // namespace sqa::analysis
