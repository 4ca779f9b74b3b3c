#include <cmath>

#include "doctest.h"
#include "sqa/analysis.hpp"
#include "sqa/error.hpp"
#include "sqa/exact_fermion.hpp"
#include "sqa/rng.hpp"

using namespace sqa;
using namespace sqa::analysis;

namespace {

std::vector<double> grid(double lo, double hi, int n) {
  std::vector<double> g(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) g[static_cast<std::size_t>(k)] = lo + (hi - lo) * k / (n - 1);
  return g;
}

std::vector<PowerPoint> power_law(double a, double b, double lo, double hi, int n) {
  std::vector<PowerPoint> pts;
  for (int k = 0; k < n; ++k) {
    const double tau = lo * std::pow(hi / lo, static_cast<double>(k) / (n - 1));
    pts.push_back({tau, a * std::pow(tau, b)});
  }
  return pts;
}

}  // namespace

TEST_CASE("T_eff recovers the generating temperature") {
  const Instance inst = generate_instance(32, Uniform01{}, 6);
  const exact::EquilibriumTable table(inst, grid(0.0, 2.5, 101));
  for (double t_star : {0.05, 0.3, 1.0, 4.0}) {
    CAPTURE(t_star);
    std::vector<GammaSample> traj;
    for (double g : grid(0.0, 2.5, 26)) traj.push_back({g, exact::equilibrium_eps_c(inst, g, t_star)});
    TeffOptions o;
    o.t_min = 0.01;
    const auto r = fit_teff(traj, table, o);
    CHECK(r.names.at(0) == "T_eff");
    CHECK(std::abs(r.value() - t_star) < 1e-6);
    CHECK(r.residual_rms < 1e-6);
    CHECK(r.window.lo == 0.0);
    CHECK(r.window.hi == 1.5);
  }
}

TEST_CASE("T_eff error cases") {
  const Instance inst = generate_instance(8, Uniform01{}, 6);
  const exact::EquilibriumTable table(inst, grid(0.0, 2.5, 51));
  std::vector<GammaSample> narrow;
  for (double g : grid(0.0, 0.3, 5)) narrow.push_back({g, 0.1});
  CHECK_THROWS_AS(fit_teff(narrow, table), ValidationError);
  TeffOptions bad;
  bad.t_min = 2.0;
  bad.t_max = 1.0;
  std::vector<GammaSample> wide;
  for (double g : grid(0.0, 1.5, 7)) wide.push_back({g, 0.1});
  CHECK_THROWS_AS(fit_teff(wide, table, bad), ValidationError);
  // above the infinite-temperature value: minimum runs off the bracket
  for (auto& w : wide) w.eps = 5.0;
  CHECK_THROWS_AS(fit_teff(wide, table), AccuracyError);
}

TEST_CASE("power law") {
  const auto pts = power_law(3.0, -0.5, 10.0, 1e4, 13);
  const auto r = fit_power_law(pts, {10.0, 1e4});
  CHECK(std::abs(r.value() + 0.5) < 1e-12);
  CHECK(r.error() < 1e-12);
  CHECK(r.points == 13);

  SUBCASE("scale equivariance") {
    auto scaled = power_law(3.0, -0.7, 10.0, 1e4, 13);
    for (auto& p : scaled) p.eps *= 1e-3;
    CHECK(std::abs(fit_power_law(scaled, {10.0, 1e4}).value() + 0.7) < 1e-12);
  }
  SUBCASE("central decade") {
    const auto w = central_decade(pts);
    CHECK(w.lo == doctest::Approx(std::sqrt(1e5 / 10.0)));
    CHECK(w.hi == doctest::Approx(std::sqrt(1e5 * 10.0)));
  }
  SUBCASE("window selection") {
    auto bent = pts;
    for (auto& p : bent)
      if (p.tau > 2000) p.eps = 0.05;
    CHECK(std::abs(fit_power_law(bent, {10.0, 1000.0}).value() + 0.5) < 1e-12);
  }
  SUBCASE("errors") {
    auto neg = pts;
    neg[3].eps = 0.0;
    CHECK_THROWS_AS(fit_power_law(neg, {10.0, 1e4}), ValidationError);
    CHECK_THROWS_AS(fit_power_law(pts, {10.0, 30.0}), ValidationError);
  }
}

TEST_CASE("power law is unbiased under multiplicative noise") {
  Rng rng(9);
  const int trials = 400;
  double sum = 0.0, sum2 = 0.0;
  for (int t = 0; t < trials; ++t) {
    auto pts = power_law(2.0, -0.35, 10.0, 1e3, 10);
    for (auto& p : pts) {
      const double u = 1.0 - rng.uniform(), v = rng.uniform();
      p.eps *= std::exp(0.1 * std::sqrt(-2.0 * std::log(u)) * std::cos(2.0 * M_PI * v));
    }
    const double b = fit_power_law(pts, {10.0, 1e3}).value();
    sum += b;
    sum2 += b * b;
  }
  const double m = sum / trials;
  const double sd = std::sqrt(sum2 / trials - m * m);
  CHECK(std::abs(m + 0.35) < 3.0 * sd / std::sqrt(static_cast<double>(trials)));
}

TEST_CASE("logarithmic law") {
  std::vector<PowerPoint> pts;
  for (double tau : {10.0, 30.0, 100.0, 300.0, 1e3, 3e3, 1e4})
    pts.push_back({tau, std::pow(std::log(2.0 * tau), -3.0)});
  const auto r = fit_log_law(pts);
  REQUIRE(r.names.size() == 2);
  CHECK(std::abs(r.parameter[0] - 2.0) < 1e-6);
  CHECK(std::abs(r.parameter[1] - 3.0) < 1e-6);

  SUBCASE("positive exponent for a decreasing series") {
    std::vector<PowerPoint> d;
    for (double tau : {5.0, 20.0, 80.0, 320.0, 1280.0, 5120.0}) d.push_back({tau, 0.3 * std::pow(tau, -0.4)});
    try {
      CHECK(fit_log_law(d).parameter[1] > 0.0);
    } catch (const FitError& e) {
      CHECK(e.best().parameter.at(1) > 0.0);
    }
  }
  SUBCASE("errors") {
    pts.resize(4);
    CHECK_THROWS_AS(fit_log_law(pts), ValidationError);
  }
}
