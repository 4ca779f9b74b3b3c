#include <cmath>

#include "doctest.h"
#include "sqa/annealing.hpp"
#include "sqa/error.hpp"
#include "sqa/exact_fermion.hpp"

using namespace sqa;
using namespace sqa::anneal;

namespace {

SqaOptions small_options() {
  SqaOptions o;
  o.temperature = 0.2;
  o.trotter = 8;
  o.schedule = Schedule{2.5, 300.0, 0};
  o.moves = pimc::MoveFamily::time_cluster;
  o.reps = 4;
  o.stride = 50;
  o.seed = 77;
  o.t_eq = 100;
  return o;
}

}  // namespace

TEST_CASE("defaults") {
  CHECK(default_stride(100) == 1);
  CHECK(default_stride(10000) == 50);
  CHECK(default_equilibration(100) == 1000);
  CHECK(default_equilibration(100000) == 10000);
}

TEST_CASE("record layout and estimator ordering") {
  const Instance inst = generate_instance(12, Uniform01{}, 3);
  for (auto moves : {pimc::MoveFamily::time_cluster, pimc::MoveFamily::spacetime_sw,
                     pimc::MoveFamily::spacetime_wolff}) {
    CAPTURE(pimc::to_string(moves));
    auto o = small_options();
    o.moves = moves;
    const auto rec = sqa_run(inst, o);
    REQUIRE(rec.size() == 4 * 7);
    for (std::size_t k = 0; k < rec.size(); ++k) {
      CHECK(rec[k].rep == static_cast<int>(k / 7));
      CHECK(rec[k].t == 50.0 * static_cast<double>(k % 7));
      CHECK(rec[k].gamma == doctest::Approx(schedule_gamma(o.schedule, rec[k].t)));
      CHECK(rec[k].eps_min <= rec[k].eps_avg + 1e-15);
      CHECK(rec[k].slice >= 1);
      CHECK(rec[k].slice <= 8);
    }
    CHECK(rec.back().gamma == 0.0);
  }
}

TEST_CASE("final time is always recorded") {
  const Instance inst = generate_instance(6, Uniform01{}, 3);
  auto o = small_options();
  o.schedule.tau = 130;
  o.reps = 1;
  const auto rec = sqa_run(inst, o);
  REQUIRE(rec.size() == 4);
  CHECK(rec[2].t == 100.0);
  CHECK(rec[3].t == 130.0);
}

TEST_CASE("deterministic and independent of worker count") {
  const Instance inst = generate_instance(16, Uniform01{}, 5);
  auto o = small_options();
  const auto a = sqa_run(inst, o);
  o.workers = 3;
  const auto b = sqa_run(inst, o);
  REQUIRE(a.size() == b.size());
  for (std::size_t k = 0; k < a.size(); ++k) {
    CHECK(a[k].eps_avg == b[k].eps_avg);
    CHECK(a[k].eps_min == b[k].eps_min);
    CHECK(a[k].slice == b[k].slice);
  }
  o.seed = 78;
  const auto c = sqa_run(inst, o);
  bool differ = false;
  for (std::size_t k = 0; k < a.size(); ++k) differ |= a[k].eps_avg != c[k].eps_avg;
  CHECK(differ);
}

TEST_CASE("invalid annealing parameters") {
  const Instance inst = generate_instance(6, Uniform01{}, 3);
  auto o = small_options();
  o.schedule.tau = 0.5;
  CHECK_THROWS_AS(sqa_run(inst, o), ValidationError);
  o.schedule.tau = 10.5;
  CHECK_THROWS_AS(sqa_run(inst, o), ValidationError);
  o = small_options();
  o.temperature = 0.0;
  CHECK_THROWS_AS(sqa_run(inst, o), ValidationError);
  o = small_options();
  o.trotter = 0;
  CHECK_THROWS_AS(sqa_run(inst, o), ValidationError);
}

TEST_CASE("aggregation") {
  std::vector<TrajectoryRecord> rec = {
      {0.0, 2.5, 1.0, 0.5, 1, 0}, {1.0, 0.0, 0.2, 0.1, 1, 0},
      {0.0, 2.5, 3.0, 1.5, 2, 1}, {1.0, 0.0, 0.4, 0.3, 1, 1},
  };
  const auto pts = aggregate(rec);
  REQUIRE(pts.size() == 2);
  CHECK(pts[0].eps_avg_mean == 2.0);
  CHECK(pts[0].eps_avg_sem == doctest::Approx(1.0));
  CHECK(pts[1].eps_min_mean == doctest::Approx(0.2));
  CHECK(pts[1].n_reps == 2);
}

TEST_CASE("slow space-time annealing ends at the classical thermal value") {
  const Instance inst = generate_instance(8, Uniform01{}, 12);
  SqaOptions o;
  o.temperature = 0.5;
  o.trotter = 4;
  o.schedule = Schedule{2.5, 2000.0, 0};
  o.moves = pimc::MoveFamily::spacetime_sw;
  o.reps = 200;
  o.stride = 2000;
  o.seed = 1;
  o.t_eq = 200;
  const auto pts = aggregate(sqa_run(inst, o));
  const double exact = exact::equilibrium_eps_c(inst, 0.0, 0.5);
  CAPTURE(pts.back().eps_avg_mean);
  CAPTURE(exact);
  CHECK(std::abs(pts.back().eps_avg_mean - exact) < 4.0 * pts.back().eps_avg_sem);
  // frozen columns: every slice carries the same bond energy
  CHECK(pts.back().eps_min_mean == doctest::Approx(pts.back().eps_avg_mean).epsilon(1e-12));
}
