#include <catch2/catch_amalgamated.hpp>

#include <string>

#include "ullman/json_io.hpp"
#include "ullman/oracle.hpp"
#include "ullman/reconstruct2d.hpp"

using namespace ullman;

TEST_CASE("brute_invert_2d finds both solutions of a known scene") {
  const Scene2D s = oracle::random_scene_2d(12);
  const ImageData2D d = project_2d(s);
  const auto res = oracle::brute_invert_2d(d, {two_pi / 2000.0, 1e-2});
  REQUIRE_FALSE(res.cluster_overflow);
  REQUIRE(res.solutions.size() == 2);
  const Scene2D m = mirror_scene(s);
  bool has_s = false, has_m = false;
  for (const auto& sol : res.solutions) {
    if (sol.max_abs_diff(s) < 1e-6) has_s = true;
    if (sol.max_abs_diff(m) < 1e-6) has_m = true;
  }
  CHECK(has_s);
  CHECK(has_m);
}

TEST_CASE("brute_invert_2d confirms the infeasible example by exhaustion") {
  const ImageData2D d{1, 5, 0, 1, 1, 0};
  const auto res = oracle::brute_invert_2d(d, {two_pi / 10000.0, 1e-3});
  CHECK(res.solutions.empty());
  CHECK_FALSE(res.cluster_overflow);
}

TEST_CASE("brute_invert_2d reports a continuum on collinear data") {
  // collinear points deform freely, so solutions cluster without bound
  const Scene2D s{1, 2, 0.5, 1.0, 0.9, 0.4};
  const auto res = oracle::brute_invert_2d(project_2d(s), {two_pi / 500.0, 1e-2});
  CHECK(res.cluster_overflow);
}

TEST_CASE("brute_ullman matches the closed-form pair solver") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const Scene3D s = oracle::random_scene_3d(seed);
    const ImageData3D d = project_3d(s);
    const PairCoefficients k = pair_coefficients(d, 1, 2);
    const auto brute = oracle::brute_ullman(k, {two_pi / 4000.0, 1e-2});
    const PairResult fast = solve_ullman_pair(k);
    REQUIRE(fast.outcome == PairOutcome::solved);
    // every brute cluster sits near a closed-form solution and vice versa
    for (const auto& b : brute) {
      bool near = false;
      for (const auto& f : fast.solutions)
        if (std::abs(b.x - f.alpha) < 1e-3 && std::abs(b.y - f.beta) < 1e-3 &&
            std::abs(b.u - f.gamma) < 1e-3 && std::abs(b.v - f.delta) < 1e-3)
          near = true;
      CHECK(near);
    }
    for (const auto& f : fast.solutions) {
      bool near = false;
      for (const auto& b : brute)
        if (std::abs(b.x - f.alpha) < 1e-3 && std::abs(b.y - f.beta) < 1e-3 &&
            std::abs(b.u - f.gamma) < 1e-3 && std::abs(b.v - f.delta) < 1e-3)
          near = true;
      CHECK(near);
    }
  }
}

TEST_CASE("golden records replay against oracle and closed forms") {
  const std::string dir = ULLMAN_GOLDEN_DIR;

  SECTION("2d inversions") {
    for (const std::string name :
         {"invert2d_scene12", "invert2d_infeasible", "invert2d_surface"}) {
      const auto g = io::load_file(dir + "/" + name + ".json");
      REQUIRE(g.at("kind") == "brute_invert_2d");
      const ImageData2D d = io::image2d_from_json(g.at("input"));
      const oracle::GridSpec grid{g.at("resolution"), g.at("tolerance")};
      // the oracle reproduces its frozen output
      const auto res = oracle::brute_invert_2d(d, grid);
      REQUIRE(res.solutions.size() == g.at("solutions").size());
      for (std::size_t i = 0; i < res.solutions.size(); ++i) {
        const Scene2D want = io::scene2d_from_json(g.at("solutions").at(i));
        CHECK(res.solutions[i].max_abs_diff(want) < grid.resolution);
      }
      // the closed form matches the frozen oracle output
      const auto fast = invert_2d(d);
      if (g.at("solutions").empty()) {
        CHECK(fast.outcome == ReconstructOutcome::infeasible);
      } else {
        REQUIRE(fast.outcome == ReconstructOutcome::solved);
        REQUIRE(fast.set.candidates.size() == g.at("solutions").size());
        for (const auto& sj : g.at("solutions"))
          CHECK(fast.set.contains(io::scene2d_from_json(sj), 1e-6));
      }
    }
  }

  SECTION("pair equations") {
    for (const std::uint64_t seed : {0ull, 1ull, 2ull}) {
      const auto g = io::load_file(dir + "/ullman_pair_seed" +
                                   std::to_string(seed) + ".json");
      REQUIRE(g.at("kind") == "brute_ullman");
      const auto& c = g.at("input").at("coeffs");
      const PairCoefficients k{c.at(0), c.at(1), c.at(2), c.at(3),
                               c.at(4), c.at(5), c.at(6), c.at(7)};
      const auto fast = solve_ullman_pair(k);
      REQUIRE(fast.outcome == PairOutcome::solved);
      REQUIRE(fast.solutions.size() == g.at("solutions").size());
      for (const auto& sj : g.at("solutions")) {
        bool found = false;
        for (const auto& f : fast.solutions)
          if (std::abs(f.alpha - sj.at(0).get<double>()) < 1e-6 &&
              std::abs(f.beta - sj.at(1).get<double>()) < 1e-6 &&
              std::abs(f.gamma - sj.at(2).get<double>()) < 1e-6 &&
              std::abs(f.delta - sj.at(3).get<double>()) < 1e-6)
            found = true;
        CHECK(found);
      }
    }
  }
}

TEST_CASE("brute_ullman full-resolution sweep on one instance") {
  const Scene3D s = oracle::random_scene_3d(33);
  const ImageData3D d = project_3d(s);
  const PairCoefficients k = pair_coefficients(d, 2, 3);
  const auto brute = oracle::brute_ullman(k, {two_pi / 10000.0, 1e-3});
  const PairResult fast = solve_ullman_pair(k);
  REQUIRE(fast.outcome == PairOutcome::solved);
  for (const auto& b : brute) {
    double best = 1e9;
    for (const auto& f : fast.solutions)
      best = std::min(best, std::max({std::abs(b.x - f.alpha),
                                      std::abs(b.y - f.beta),
                                      std::abs(b.u - f.gamma),
                                      std::abs(b.v - f.delta)}));
    CHECK(best < 1e-3);
  }
}
