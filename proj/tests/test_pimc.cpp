#include <Eigen/Dense>
#include <cmath>

#include "doctest.h"
#include "oracles/enumeration.hpp"
#include "sqa/equilibrium.hpp"
#include "sqa/error.hpp"
#include "sqa/pimc.hpp"

using namespace sqa;
using namespace sqa::pimc;

TEST_CASE("temporal coupling") {
  CHECK(j_perp(1.0, 1.0) == doctest::Approx(0.13617073445591578).epsilon(1e-14));
  CHECK(j_perp(0.5, 1.0) == doctest::Approx(0.38596841645265236).epsilon(1e-14));
  CHECK(std::isinf(j_perp(1.0, 0.0)));
  CHECK(j_perp(1.0, 50.0) >= 0.0);
  CHECK(j_perp(1.0, 50.0) < 1e-40);
  CHECK_THROWS_AS(j_perp(1.0, -0.1), ValidationError);
  CHECK_THROWS_AS(j_perp(0.0, 1.0), ValidationError);
  CHECK(std::exp(-2.0 * j_perp(0.3, 0.8)) == doctest::Approx(std::tanh(0.24)));
}

TEST_CASE("classical action") {
  const Instance inst{2, {1.0}, Ordered{1.0}, 0};
  PimcParams p;
  p.temperature = 1.0;
  p.gamma = 1.0;
  p.trotter = 2;
  const PathConfig up(2, 2);
  CHECK(classical_action(up, inst, p) == doctest::Approx(-1.0 - 4.0 * 0.38596841645265236).epsilon(1e-14));
  CHECK(classical_action(up, inst, p) == doctest::Approx(-2.5438736658106095).epsilon(1e-14));

  SUBCASE("matches the term-by-term oracle and is Z2 symmetric") {
    const Instance big = generate_instance(3, Uniform01{}, 5);
    PimcParams q;
    q.temperature = 0.4;
    q.gamma = 0.7;
    q.trotter = 3;
    for (std::uint32_t code = 0; code < 512; code += 7) {
      PathConfig cfg = oracle::decode(code, 3, 3);
      const double k = classical_action(cfg, big, q);
      CHECK(k == doctest::Approx(oracle::action(code, big.couplings, 3, q.beta_p(), q.coupling_perp())));
      cfg.flip_all();
      CHECK(classical_action(cfg, big, q) == doctest::Approx(k).epsilon(1e-14));
    }
  }
  SUBCASE("dimension mismatch") {
    CHECK_THROWS_AS(classical_action(PathConfig(3, 2), inst, p), ValidationError);
    p.trotter = 0;
    CHECK_THROWS_AS(validate(p), ValidationError);
  }
}

TEST_CASE("estimators") {
  const Instance inst{3, {0.5, 1.0}, Uniform01{}, 0};
  PathConfig cfg(3, 4);
  CHECK(measure_eps_avg(cfg, inst) == 0.0);
  CHECK(measure_eps_min(cfg, inst).value == 0.0);
  CHECK(measure_eps_min(cfg, inst).slice == 1);

  cfg(2, 0) = -1;  // breaks the J=1 bond in slice 0
  cfg(1, 2) = -1;  // breaks both bonds in slice 2
  CHECK(measure_eps_avg(cfg, inst) == doctest::Approx((2.0 + 3.0) / 4.0 / 3.0));
  const auto m = measure_eps_min(cfg, inst);
  CHECK(m.value == 0.0);
  CHECK(m.slice == 2);

  Rng rng(3);
  const Instance r = generate_instance(6, Uniform01{}, 3);
  std::vector<double> scratch;
  for (int n = 0; n < 200; ++n) {
    const auto c = PathConfig::random(6, 5, rng);
    const auto e = measure(c, r.couplings, scratch);
    CHECK(e.eps_min.value <= e.eps_avg + 1e-15);
    CHECK(e.eps_avg == doctest::Approx(oracle::eps_avg_direct(oracle::encode(c), r.couplings, 5)));
    CHECK(e.eps_avg == doctest::Approx(measure_eps_avg(c, r)));
    CHECK(e.eps_min.value == measure_eps_min(c, r).value);
    CHECK(e.eps_min.slice >= 1);
    CHECK(e.eps_min.slice <= 5);
  }
}

namespace {

// Suzuki-Trotter transfer-matrix average of the bond energy, Tr[D (e^{-b Hz} e^{-b Hx})^P] / Tr[...].
double transfer_matrix_eps(const std::vector<double>& j, double beta_p, double gamma, int p) {
  const int l = static_cast<int>(j.size()) + 1;
  const int dim = 1 << l;
  auto spin = [](int s, int i) { return (s >> i) & 1 ? -1.0 : 1.0; };
  Eigen::MatrixXd tz = Eigen::MatrixXd::Zero(dim, dim), tx(dim, dim), d = Eigen::MatrixXd::Zero(dim, dim);
  for (int s = 0; s < dim; ++s) {
    double e = 0.0, bond = 0.0;
    for (int i = 0; i + 1 < l; ++i) {
      e -= j[i] * spin(s, i) * spin(s, i + 1);
      bond += j[i] * (1.0 - spin(s, i) * spin(s, i + 1));
    }
    tz(s, s) = std::exp(-beta_p * e);
    d(s, s) = bond / l;
  }
  for (int s = 0; s < dim; ++s)
    for (int t = 0; t < dim; ++t) {
      double w = 1.0;
      for (int i = 0; i < l; ++i)
        w *= spin(s, i) == spin(t, i) ? std::cosh(beta_p * gamma) : std::sinh(beta_p * gamma);
      tx(s, t) = w;
    }
  Eigen::MatrixXd step = tz * tx, power = Eigen::MatrixXd::Identity(dim, dim);
  for (int k = 0; k < p; ++k) power = power * step;
  return (d * power).trace() / power.trace();
}

}  // namespace

TEST_CASE("classical lattice reproduces the Trotter transfer matrix") {
  for (int p : {1, 2, 3, 4}) {
    CAPTURE(p);
    const Instance inst = generate_instance(3, Uniform01{}, 10 + p);
    const double beta_p = 1.3 / p, gamma = 0.9;
    const auto w = oracle::boltzmann(inst.couplings, p, beta_p, j_perp(beta_p, gamma));
    double avg = 0.0;
    for (std::uint32_t c = 0; c < w.size(); ++c) avg += w[c] * oracle::eps_avg_direct(c, inst.couplings, p);
    CHECK(std::abs(avg - transfer_matrix_eps(inst.couplings, beta_p, gamma, p)) < 1e-12);
  }
}

TEST_CASE("move family names") {
  CHECK(parse_moves("time") == MoveFamily::time_cluster);
  CHECK(parse_moves("sw") == MoveFamily::spacetime_sw);
  CHECK(parse_moves("wolff") == MoveFamily::spacetime_wolff);
  for (auto m : {MoveFamily::time_cluster, MoveFamily::spacetime_sw, MoveFamily::spacetime_wolff})
    CHECK(parse_moves(to_string(m)) == m);
  CHECK_THROWS_AS(parse_moves("metropolis"), ValidationError);
}

TEST_CASE("equilibrium run") {
  const Instance inst = generate_instance(8, Uniform01{}, 2);
  PimcParams p;
  p.temperature = 0.5;
  p.gamma = 1.0;
  p.trotter = 8;
  p.moves = MoveFamily::spacetime_sw;
  p.t_run = 4000;
  Rng rng(11);
  const auto r = equilibrium_run(inst, p, rng);
  CHECK(r.n_mcs == 4000);
  CHECK(r.series.size() == 4000);
  CHECK(r.t_burn < 4000);
  CHECK(r.stderr_ > 0.0);
  CHECK(r.estimate > 0.0);

  Rng again(11);
  CHECK(equilibrium_run(inst, p, again).estimate == r.estimate);

  p.gamma = 0.0;
  CHECK_THROWS_AS(equilibrium_run(inst, p, rng), ValidationError);
  p.gamma = 1.0;
  p.t_run = 0;
  CHECK_THROWS_AS(equilibrium_run(inst, p, rng), ValidationError);
}
