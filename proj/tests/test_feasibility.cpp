#include <catch2/catch_amalgamated.hpp>

#include <complex>

#include "ullman/feasibility.hpp"
#include "ullman/oracle.hpp"

using namespace ullman;
using cplx = std::complex<double>;

TEST_CASE("angle_interval point cases") {
  SECTION("A == B gives the single angle 0") {
    const auto r = angle_interval(cplx{0.4, 0.3}, cplx{0.4, 0.3});
    REQUIRE(r.outcome == IntervalOutcome::ok);
    CHECK_FALSE(r.interval.full_circle);
    CHECK(r.interval.total_length() < 1e-6);
    CHECK(r.interval.contains(0.0, 1e-6));
  }
  SECTION("A = B = 0 gives {0}") {
    const auto r = angle_interval(cplx{0, 0}, cplx{0, 0});
    CHECK(r.interval.total_length() < 1e-9);
    CHECK(r.interval.contains(0.0, 1e-9));
  }
  SECTION("poles on the unit circle are flagged") {
    CHECK(angle_interval(cplx{1, 0}, cplx{2, 0}).outcome ==
          IntervalOutcome::pole_on_circle);
  }
  SECTION("too few samples are rejected") {
    CHECK_THROWS_AS(angle_interval(cplx{2, 0}, cplx{3, 0}, 100),
                    std::invalid_argument);
  }
}

TEST_CASE("angle_interval matches dense sampling for A=2, B=3") {
  const cplx A{2, 0}, B{3, 0};
  const auto r = angle_interval(A, B, 8192);
  REQUIRE(r.outcome == IntervalOutcome::ok);
  // brute force: one million samples must all land inside, and points just
  // outside the refined arc must not appear
  double lo = 1e9, hi = -1e9;  // lifted range via continuity
  double lift = std::arg((cplx{1, 0} - A) / (cplx{1, 0} - B));
  double prev = lift;
  const int n = 1000000;
  for (int i = 0; i <= n; ++i) {
    const double th = two_pi * i / n;
    const cplx z = std::polar(1.0, th);
    const double raw = std::arg((z - A) / (z - B));
    lift += wrap_angle(raw - wrap_angle(prev));
    prev = lift;
    lo = std::min(lo, lift);
    hi = std::max(hi, lift);
    CHECK(r.interval.contains(raw, 1e-5));
  }
  CHECK(std::abs(r.interval.total_length() - (hi - lo)) < 1e-5);
}

TEST_CASE("interval shrinks when B approaches A") {
  const cplx A{1.7, 0.4};
  const auto wide = angle_interval(A, cplx{2.5, -1.0});
  const auto tight = angle_interval(A, cplx{1.7001, 0.4});
  REQUIRE(wide.outcome == IntervalOutcome::ok);
  REQUIRE(tight.outcome == IntervalOutcome::ok);
  CHECK(tight.interval.total_length() <= wide.interval.total_length());
  CHECK(tight.interval.total_length() < 1e-2);
  // I(A, A) = {0} sits inside the shrunken interval (sampled approximation)
  CHECK(tight.interval.contains(0.0, 1e-3));
}

TEST_CASE("ullman_pair_solvable") {
  SECTION("scene pairs are solvable") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const ImageData3D d = project_3d(oracle::random_scene_3d(seed));
      for (const auto& [ci, cj] : {std::pair{1, 2}, {1, 3}, {2, 3}}) {
        const auto rep = ullman_pair_solvable(pair_coefficients(d, ci, cj));
        CHECK(rep.outcome == SolvableOutcome::solvable);
      }
    }
  }
  SECTION("the incompatible scaling example is unsolvable") {
    const auto rep = ullman_pair_solvable({2, 0, 1, 0, 0, 2, 0, 1});
    CHECK(rep.outcome == SolvableOutcome::unsolvable);
  }
  SECTION("zero left-hand complex numbers are rejected") {
    CHECK(ullman_pair_solvable({0, 0, 1, 0, 0, 2, 0, 1}).outcome ==
          SolvableOutcome::zero_denominator);
  }
  SECTION("agreement with solver emptiness on random draws") {
    Rng rng(2024);
    int checked = 0;
    while (checked < 300) {
      PairCoefficients k;
      k.a = rng.uniform(-2, 2);
      k.b = rng.uniform(-2, 2);
      k.c = rng.uniform(-2, 2);
      k.d = rng.uniform(-2, 2);
      k.e = rng.uniform(-2, 2);
      k.f = rng.uniform(-2, 2);
      k.g = rng.uniform(-2, 2);
      k.h = rng.uniform(-2, 2);
      const PairResult pr = solve_ullman_pair(k);
      if (pr.outcome == PairOutcome::singular_elimination ||
          pr.outcome == PairOutcome::continuum)
        continue;
      const auto rep = ullman_pair_solvable(k);
      if (rep.outcome == SolvableOutcome::zero_denominator) continue;
      const bool lemma = rep.outcome == SolvableOutcome::solvable;
      const bool solver = pr.outcome == PairOutcome::solved;
      CHECK(lemma == solver);
      ++checked;
    }
  }
}

TEST_CASE("sfm_inequality") {
  SECTION("d=2, m=3 is tight exactly at n=3") {
    const DimensionCount c = sfm_inequality(2, 3, 3);
    CHECK(c.f == 2);
    CHECK(c.g == 3);
    CHECK(c.lhs == 12);   // 2n + 6 at n=3
    CHECK(c.rhs == 12);   // 3n + 3 at n=3
    CHECK(c.tight);
    CHECK_FALSE(sfm_inequality(2, 4, 3).tight);
  }
  SECTION("d=3 row") {
    CHECK(sfm_inequality(3, 3, 3).tight);      // n(3) = 3 exactly
    CHECK_FALSE(sfm_inequality(3, 3, 2).tight);
    CHECK(sfm_inequality(3, 4, 2).tight);      // the formula gives n(2) = 4
  }
  SECTION("d=4, m=3 balances near n=4") {
    const MinPoints mp = min_points(4, 3);
    REQUIRE(mp.finite);
    CHECK(mp.num == 17);
    CHECK(mp.den == 5);
    CHECK(mp.ceiling == 4);
  }
  CHECK_THROWS_AS(sfm_inequality(1, 1, 1), std::invalid_argument);
}

TEST_CASE("min_points table entries") {
  SECTION("(2,3) -> 3") {
    const MinPoints mp = min_points(2, 3);
    REQUIRE(mp.finite);
    CHECK(mp.num == 3);
    CHECK(mp.den == 1);
    CHECK(mp.ceiling == 3);
  }
  SECTION("(3,4) -> 14/5, ceiling 3") {
    const MinPoints mp = min_points(3, 4);
    REQUIRE(mp.finite);
    CHECK(mp.num == 14);
    CHECK(mp.den == 5);
    CHECK(mp.ceiling == 3);
  }
  SECTION("(2,2) has no finite answer") {
    CHECK_FALSE(min_points(2, 2).finite);
  }
  SECTION("bad arguments throw") {
    CHECK_THROWS_AS(min_points(1, 3), std::invalid_argument);
  }
}
