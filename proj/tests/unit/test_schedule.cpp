#include <catch_amalgamated.hpp>

#include <cmath>
#include <filesystem>
#include <random>

#include "pauselab/error.hpp"
#include "pauselab/schedule.hpp"

using namespace pauselab;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("grid points are reproduced exactly", "[schedule]") {
  const auto sched = synthetic_schedule();
  for (const auto& p : sched.points()) {
    const auto v = sched.eval(p.s);
    REQUIRE(v.a_ghz == p.a_ghz);
    REQUIRE(v.b_ghz == p.b_ghz);
  }
}

TEST_CASE("flat segments do not overshoot", "[schedule]") {
  const AnnealSchedule sched({{0.0, 5.0, 0.0},
                              {0.25, 3.0, 1.0},
                              {0.5, 3.0, 2.0},
                              {0.75, 1.0, 3.0},
                              {1.0, 0.0, 4.0}},
                             AnnealSchedule::Provenance::loaded);
  CHECK(sched.eval(0.375).a_ghz == 3.0);
  for (int k = 0; k <= 1000; ++k) {
    const double s = k / 1000.0;
    const auto v = sched.eval(s);
    REQUIRE(v.a_ghz <= 5.0);
    REQUIRE(v.a_ghz >= 0.0);
    if (s >= 0.25 && s <= 0.5) REQUIRE_THAT(v.a_ghz, WithinAbs(3.0, 1e-12));
  }
}

TEST_CASE("two-point schedules interpolate linearly", "[schedule]") {
  const AnnealSchedule sched({{0.0, 2.0, 0.0}, {1.0, 0.0, 2.0}}, AnnealSchedule::Provenance::loaded);
  CHECK_THAT(sched.eval(0.25).a_ghz, WithinAbs(1.5, 1e-15));
  CHECK_THAT(sched.eval(0.25).b_ghz, WithinAbs(0.5, 1e-15));
}

TEST_CASE("synthetic schedule satisfies its constraint set", "[schedule]") {
  const auto sched = synthetic_schedule();
  REQUIRE(sched.points().size() >= 512);
  CHECK(sched.provenance() == AnnealSchedule::Provenance::synthetic);

  const auto x = sched.eval(0.36);
  CHECK_THAT(x.a_ghz / x.b_ghz, WithinAbs(1.0, 1e-6));

  // Crossing located by bisection on the interpolant.
  double lo = 0.2, hi = 0.6;
  for (int k = 0; k < 60; ++k) {
    const double mid = 0.5 * (lo + hi);
    const auto v = sched.eval(mid);
    (v.a_ghz > v.b_ghz ? lo : hi) = mid;
  }
  CHECK_THAT(lo, WithinAbs(0.36, 0.005));

  const auto v0 = sched.eval(0.0);
  const auto v1 = sched.eval(1.0);
  CHECK(v0.a_ghz / v0.b_ghz >= 10.0);
  CHECK(v1.a_ghz / v1.b_ghz <= 1e-4);
  CHECK(v1.b_ghz > v0.b_ghz);

  for (double s : {0.9, 0.925, 0.95, 0.975, 0.995}) {
    const double h = 1e-3;
    const double slope =
        (std::log(sched.eval(s + h).a_ghz) - std::log(sched.eval(s - h).a_ghz)) / (2.0 * h);
    INFO("s = " << s);
    CHECK(slope >= -35.0);
    CHECK(slope <= -25.0);
  }
  for (std::size_t k = 1; k < sched.points().size(); ++k) {
    REQUIRE(sched.points()[k].b_ghz > sched.points()[k - 1].b_ghz);
  }
}

TEST_CASE("interpolant is continuous", "[schedule][property]") {
  const auto sched = synthetic_schedule();
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0 - 1e-9);
  for (int k = 0; k < 1000; ++k) {
    const double s = u(rng);
    const auto a = sched.eval(s);
    const auto b = sched.eval(s + 1e-10);
    REQUIRE(std::abs(a.a_ghz - b.a_ghz) < 1e-7);
    REQUIRE(std::abs(a.b_ghz - b.b_ghz) < 1e-7);
  }
}

TEST_CASE("schedule CSV round trip is bit exact", "[schedule][property]") {
  const auto sched = synthetic_schedule();
  const auto path = std::filesystem::temp_directory_path() / "pauselab_schedule_roundtrip.csv";
  save_schedule(sched, path);
  const auto again = load_schedule(path);
  std::filesystem::remove(path);
  REQUIRE(again.points().size() == sched.points().size());
  for (std::size_t k = 0; k < sched.points().size(); ++k) {
    REQUIRE(again.points()[k].s == sched.points()[k].s);
    REQUIRE(again.points()[k].a_ghz == sched.points()[k].a_ghz);
    REQUIRE(again.points()[k].b_ghz == sched.points()[k].b_ghz);
  }
  CHECK(again.provenance() == AnnealSchedule::Provenance::loaded);
}

TEST_CASE("schedule validation", "[schedule]") {
  using P = AnnealSchedule::Provenance;
  CHECK_THROWS_AS(AnnealSchedule({{0.0, 1.0, 0.0}, {0.9, 0.0, 1.0}}, P::loaded), InputError);
  CHECK_THROWS_AS(AnnealSchedule({{0.0, 1.0, 0.0}, {1.0, 2.0, 1.0}}, P::loaded), InputError);
  CHECK_THROWS_AS(AnnealSchedule({{0.0, 1.0, 1.0}, {1.0, 0.0, 0.5}}, P::loaded), InputError);
  CHECK_THROWS_AS(parse_schedule_csv("s,A,B\n0,1,0\n1,0,1\n"), InputError);
  CHECK_THROWS_AS(load_schedule("/nonexistent/schedule.csv"), InputError);
  const auto sched = synthetic_schedule();
  CHECK_THROWS_AS(sched.eval(-0.01), InputError);
  CHECK_THROWS_AS(sched.eval(1.01), InputError);
}

TEST_CASE("s(t) without a pause is linear", "[schedule]") {
  const AnnealPlan plan(2.0);
  CHECK(plan.s_of_t(1.0) == 0.5);
  CHECK(plan.s_of_t(2.0) == 1.0);
  CHECK(plan.s_of_t(0.0) == 0.0);
}

TEST_CASE("s(t) holds during the pause", "[schedule]") {
  const AnnealPlan plan(1.0, 0.5, 0.5);
  CHECK(plan.s_of_t(0.75) == 0.5);
  CHECK(plan.s_of_t(0.5) == 0.5);
  CHECK(plan.s_of_t(1.0) == 0.5);
  CHECK_THAT(plan.s_of_t(1.25), WithinAbs(0.75, 1e-15));
  CHECK(plan.s_of_t(1.5) == 1.0);
  CHECK_THROWS_AS(plan.s_of_t(1.6), InputError);
  CHECK_THROWS_AS(plan.s_of_t(-0.1), InputError);
}

TEST_CASE("s(t) is nondecreasing with three linear pieces", "[schedule][property]") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    const double t_a = 0.1 + 10.0 * u(rng);
    const double s_p = 0.05 + 0.9 * u(rng);
    const double t_p = 0.1 + 10.0 * u(rng);
    const AnnealPlan plan(t_a, s_p, t_p);
    const int steps = 997;
    double prev = -1.0;
    int slope_changes = 0;
    double prev_slope = std::nan("");
    for (int k = 0; k <= steps; ++k) {
      const double t = plan.total_time() * k / steps;
      const double s = plan.s_of_t(t);
      REQUIRE(s >= prev);
      if (k > 0) {
        const double slope = (s - prev) * steps / plan.total_time();
        if (!std::isnan(prev_slope) && std::abs(slope - prev_slope) > 1e-6 / t_a) ++slope_changes;
        prev_slope = slope;
      }
      prev = s;
    }
    // Each breakpoint falls inside at most one sample interval, which
    // shows up as at most two slope changes.
    REQUIRE(slope_changes >= 2);
    REQUIRE(slope_changes <= 4);
  }
}

TEST_CASE("zero pause duration means no pause", "[schedule]") {
  const AnnealPlan plan(1.0, 0.3, 0.0);
  CHECK_FALSE(plan.has_pause());
  CHECK(plan.total_time() == 1.0);
  CHECK_THROWS_AS(AnnealPlan(0.0), InputError);
  CHECK_THROWS_AS(AnnealPlan(1.0, 1.5, 1.0), InputError);
  CHECK_THROWS_AS(AnnealPlan(1.0, 0.5, -1.0), InputError);
}
