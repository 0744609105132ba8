#include <catch2/catch_amalgamated.hpp>

#include "ullman/oracle.hpp"
#include "ullman/reconstruct3d.hpp"

using namespace ullman;

namespace {

// line-coordinate ground truth for a camera pair of a known scene
struct TrueLine {
  Vec3 dir;
  Vec2 coords_i, coords_j;
};

EulerFrame camera_frame(const Scene3D& s, int cam) {
  if (cam == 1) return frame_from_angles(0, 0, 0);
  return cam == 2 ? s.cam2 : s.cam3;
}

TrueLine true_line(const Scene3D& s, int ci, int cj) {
  const EulerFrame fi = camera_frame(s, ci), fj = camera_frame(s, cj);
  TrueLine t;
  t.dir = fi.normal().cross(fj.normal()).normalized();
  t.coords_i = {t.dir.dot(fi.p_vec), t.dir.dot(fi.q_vec)};
  t.coords_j = {t.dir.dot(fj.p_vec), t.dir.dot(fj.q_vec)};
  return t;
}

bool contains_line(const std::vector<UllmanPairSolution>& sols,
                   const TrueLine& t, double eps) {
  for (const auto& s : sols)
    for (const double sign : {1.0, -1.0})
      if (std::abs(s.alpha - sign * t.coords_i.x) < eps &&
          std::abs(s.beta - sign * t.coords_i.y) < eps &&
          std::abs(s.gamma - sign * t.coords_j.x) < eps &&
          std::abs(s.delta - sign * t.coords_j.y) < eps)
        return true;
  return false;
}

}  // namespace

TEST_CASE("solve_ullman_pair rejects incompatible circle scaling") {
  // forces u^2+v^2 = 4(x^2+y^2): no common unit solution
  const PairCoefficients k{2, 0, 1, 0, 0, 2, 0, 1};
  CHECK(solve_ullman_pair(k).outcome == PairOutcome::no_real_solution);
}

TEST_CASE("quartic_aux satisfies its defining relations") {
  Rng rng(64);
  for (int i = 0; i < 100; ++i) {
    const double A = rng.uniform(-3, 3), B = rng.uniform(-3, 3);
    const double F = rng.uniform(-3, 3), G = rng.uniform(-3, 3);
    const QuarticAux q = quartic_aux(A, B, F, G);
    CHECK(q.U == (A * A + F * F) / 2.0);
    CHECK(q.V == (B * B + G * G) / 2.0);
    CHECK(q.W == A * B + F * G);
    CHECK(q.S == q.U - q.V);
    CHECK(q.T == q.U + q.V - 1.0);
  }
}

TEST_CASE("solve_ullman_pair flags a singular elimination") {
  // rows (a,b) and (e,f) proportional: cannot solve for (x, y)
  const PairCoefficients k{1, 2, 0.3, -0.4, 2, 4, 1.0, 0.7};
  CHECK(solve_ullman_pair(k).outcome == PairOutcome::singular_elimination);
}

TEST_CASE("reconstruct_3d rejects bad tolerance") {
  CHECK_THROWS_AS(reconstruct_3d(ImageData3D{}, 0.0), std::invalid_argument);
}

TEST_CASE("solve_ullman_pair solutions satisfy the system and contain truth") {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const Scene3D s = oracle::random_scene_3d(seed);
    const ImageData3D d = project_3d(s);
    for (const auto& [ci, cj] : {std::pair{1, 2}, {1, 3}, {2, 3}}) {
      const PairCoefficients k = pair_coefficients(d, ci, cj);
      const PairResult r = solve_ullman_pair(k);
      REQUIRE(r.outcome == PairOutcome::solved);
      CHECK(r.solutions.size() <= 8);
      for (const auto& sol : r.solutions) {
        CHECK(detail::pair_equation_gap(k, sol.alpha, sol.beta, sol.gamma,
                                        sol.delta) < 1e-9 * k.scale());
        CHECK(std::abs(sol.alpha * sol.alpha + sol.beta * sol.beta - 1.0) <
              1e-12);
        CHECK(std::abs(sol.gamma * sol.gamma + sol.delta * sol.delta - 1.0) <
              1e-12);
      }
      CHECK(contains_line(r.solutions, true_line(s, ci, cj), 1e-9));
    }
  }
}

TEST_CASE("filter_spurious keeps exactly the true line pair") {
  int total = 0, genuine = 0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const Scene3D s = oracle::random_scene_3d(seed);
    const ImageData3D d = project_3d(s);
    const Vec3 normal = s.P2.cross(s.P3).normalized();
    for (const auto& [ci, cj] : {std::pair{1, 2}, {1, 3}, {2, 3}}) {
      PairResult r = solve_ullman_pair(pair_coefficients(d, ci, cj));
      filter_spurious(r.solutions, camera_frame(s, ci), camera_frame(s, cj),
                      normal);
      int unflagged = 0;
      for (const auto& sol : r.solutions)
        if (!sol.spurious) ++unflagged;
      // generic pairs carry four branches, two of which are the +-line
      CHECK(r.solutions.size() == 4);
      CHECK(unflagged == 2);
      total += static_cast<int>(r.solutions.size());
      genuine += unflagged;
      // the true line is never flagged
      const TrueLine t = true_line(s, ci, cj);
      for (const auto& sol : r.solutions)
        for (const double sign : {1.0, -1.0})
          if (std::abs(sol.alpha - sign * t.coords_i.x) < 1e-9 &&
              std::abs(sol.beta - sign * t.coords_i.y) < 1e-9)
            CHECK_FALSE(sol.spurious);
    }
  }
  CHECK(genuine * 2 == total);
  // empty input stays empty
  std::vector<UllmanPairSolution> none;
  filter_spurious(none, frame_from_angles(0, 0, 0), frame_from_angles(1, 1, 1),
                  {0, 0, 1});
  CHECK(none.empty());
}

TEST_CASE("third_line") {
  SECTION("orthogonal axes give the z pair") {
    const auto r = third_line({1, 0, 0}, {0, 1, 0}, 0, 0);
    REQUIRE(r.outcome == ThirdLineOutcome::solved);
    REQUIRE(r.lines.size() == 2);
    CHECK(r.lines[0].max_abs_diff({0, 0, 1}) < 1e-12);
    CHECK(r.lines[1].max_abs_diff({0, 0, -1}) < 1e-12);
  }
  SECTION("norm excess has no real solution") {
    CHECK(third_line({1, 0, 0}, {0, 1, 0}, 1, 1).outcome ==
          ThirdLineOutcome::no_real_solution);
  }
  SECTION("parallel input lines are rejected") {
    CHECK(third_line({1, 0, 0}, {-1, 0, 0}, 0, 0).outcome ==
          ThirdLineOutcome::parallel_lines);
  }
  SECTION("recovers the true third line of a scene") {
    const Scene3D s = oracle::random_scene_3d(8);
    const TrueLine l12 = true_line(s, 1, 2);
    const TrueLine l13 = true_line(s, 1, 3);
    const TrueLine l23 = true_line(s, 2, 3);
    const double r = l23.dir.dot(l12.dir);
    const double t = l23.dir.dot(l13.dir);
    const auto res = third_line(l12.dir, l13.dir, r, t);
    REQUIRE(res.outcome == ThirdLineOutcome::solved);
    bool found = false;
    for (const auto& X : res.lines)
      if (X.max_abs_diff(l23.dir) < 1e-9) found = true;
    CHECK(found);
  }
}

TEST_CASE("recover_frames") {
  SECTION("identity case") {
    const auto r = recover_frames({1, 0}, {1, 0, 0}, {0, 1}, {0, 1, 0});
    REQUIRE(r.ok);
    CHECK(r.p.max_abs_diff({1, 0, 0}) < 1e-15);
    CHECK(r.q.max_abs_diff({0, 1, 0}) < 1e-15);
    CHECK(r.residual < 1e-15);
  }
  SECTION("dependent lines are rejected") {
    CHECK_FALSE(recover_frames({1, 0}, {1, 0, 0}, {-1, 0}, {-1, 0, 0}).ok);
  }
  SECTION("recovers a scene frame from two true lines") {
    const Scene3D s = oracle::random_scene_3d(21);
    const TrueLine l12 = true_line(s, 1, 2);
    const TrueLine l23 = true_line(s, 2, 3);
    const auto r = recover_frames(l12.coords_j, l12.dir, l23.coords_i, l23.dir);
    REQUIRE(r.ok);
    CHECK(r.residual < 1e-9);
    CHECK(r.p.max_abs_diff(s.cam2.p_vec) < 1e-9);
    CHECK(r.q.max_abs_diff(s.cam2.q_vec) < 1e-9);
  }
}

TEST_CASE("recover_depths") {
  const Scene3D s = oracle::random_scene_3d(4);
  const ImageData3D d = project_3d(s);
  SECTION("true frames give true depths with tiny residual") {
    const auto r1 = recover_depths(s.cam2, s.cam3, d.xy[0], d.b[0][0],
                                   d.a[0][0], d.b[0][1], d.a[0][1]);
    CHECK(std::abs(r1.z - s.P2.z) < 1e-9);
    CHECK(r1.residual < 1e-9);
  }
  SECTION("a wrong frame shows up in the residual") {
    const EulerFrame wrong = frame_from_angles(s.cam2.theta + 0.5, s.cam2.phi,
                                               s.cam2.gamma);
    const auto r = recover_depths(wrong, s.cam3, d.xy[0], d.b[0][0], d.a[0][0],
                                  d.b[0][1], d.a[0][1]);
    CHECK(r.residual > 1e-3);
  }
  SECTION("zero-depth scenes recover zero") {
    Scene3D t = s;
    t.P2.z = 0.0;
    t.P3.z = 0.0;
    const ImageData3D dz = project_3d(t);
    const auto r = recover_depths(t.cam2, t.cam3, dz.xy[0], dz.b[0][0],
                                  dz.a[0][0], dz.b[0][1], dz.a[0][1]);
    CHECK(std::abs(r.z) < 1e-12);
  }
}

TEST_CASE("reconstruct_3d roundtrip contains the scene and its mirror") {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const Scene3D s = oracle::random_scene_3d(seed);
    const auto res = reconstruct_3d(project_3d(s));
    REQUIRE(res.outcome == Reconstruct3DOutcome::solved);
    CHECK(res.set.candidates.size() <= 64);
    CHECK(res.set.contains(s, 1e-7));
    CHECK(res.set.contains(mirror_scene(s), 1e-7));
    for (const auto& c : res.set.candidates)
      CHECK(detail::reprojection_gap(c.scene, project_3d(s)) <=
            tol::residual * project_3d(s).scale());
    // closed under the reflection
    for (const auto& c : res.set.candidates)
      CHECK(res.set.contains(mirror_scene(c.scene), 1e-6));
  }
}

TEST_CASE("reconstruct_3d rejects junk data") {
  // random data is generically outside the image of the forward map
  Rng rng(1234);
  int infeasible = 0, total = 0;
  for (int i = 0; i < 30; ++i) {
    ImageData3D d;
    d.xy[0] = {rng.uniform(-2, 2), rng.uniform(-2, 2)};
    d.xy[1] = {rng.uniform(-2, 2), rng.uniform(-2, 2)};
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) {
        d.a[a][b] = rng.uniform(-2, 2);
        d.b[a][b] = rng.uniform(-2, 2);
      }
    const auto res = reconstruct_3d(d);
    ++total;
    if (res.outcome != Reconstruct3DOutcome::solved) ++infeasible;
  }
  // frequency recorded, not pinned; it should dominate
  CHECK(infeasible > total / 2);
}

TEST_CASE("detect_coplanar_normals") {
  SECTION("constructed coplanar scenes") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const Scene3D s = oracle::random_coplanar_scene_3d(seed);
      CHECK(detect_coplanar_normals(s));
      CHECK(detect_coplanar_normals(project_3d(s)));
    }
  }
  SECTION("three planes sharing a horizontal axis") {
    // camera 1 is the xy-plane; planes through the x-axis share it
    Scene3D s;
    s.cam2 = frame_from_vectors({1, 0, 0}, Vec3{0, 1, 1}.normalized());
    s.cam3 = frame_from_vectors({1, 0, 0}, Vec3{0, -1, 2}.normalized());
    s.P2 = {1.0, 0.4, -0.3};
    s.P3 = {-0.2, 1.1, 0.8};
    CHECK(detect_coplanar_normals(s));
    CHECK(detect_coplanar_normals(project_3d(s)));
  }
  SECTION("generic scenes are not flagged") {
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
      const Scene3D s = oracle::random_scene_3d(seed);
      CHECK_FALSE(detect_coplanar_normals(s));
      CHECK_FALSE(detect_coplanar_normals(project_3d(s)));
    }
  }
  SECTION("near-coplanar within tolerance counts as coplanar") {
    Scene3D s = oracle::random_coplanar_scene_3d(3);
    const EulerFrame f = s.cam2;
    s.cam2 = frame_from_angles(f.theta + 1e-10, f.phi, f.gamma);
    CHECK(detect_coplanar_normals(s));
  }
}

TEST_CASE("reduce_to_2d lifts back to the scene") {
  for (std::uint64_t seed = 0; seed < 25; ++seed) {
    const Scene3D s = oracle::random_coplanar_scene_3d(seed);
    const ImageData3D d = project_3d(s);
    const auto res = reconstruct_3d(d);
    CHECK(res.outcome == Reconstruct3DOutcome::degenerate_configuration);
    CHECK(res.used_reduction);
    CHECK(res.set.contains(s, 1e-7));
    CHECK(res.set.contains(mirror_scene(s), 1e-7));
  }
}

TEST_CASE("reduce_to_2d on an axis-aligned degenerate scene is the shadow") {
  // all three planes contain the x-axis: the reduction's 2D data is the
  // direct (y, z) shadow read in camera 1's trace
  Scene3D s;
  s.cam2 = frame_from_vectors({1, 0, 0}, Vec3{0, 1, 1}.normalized());
  s.cam3 = frame_from_vectors({1, 0, 0}, Vec3{0, -1, 2}.normalized());
  s.P2 = {1.0, 0.4, -0.3};
  s.P3 = {-0.2, 1.1, 0.8};
  const ImageData3D d = project_3d(s);
  const Reduction2D red = reduce_to_2d(d, {1, 0, 0});
  REQUIRE(red.ok);
  // camera-1 trace is the y-axis (up to sign); the 2D abscissas are +-y
  CHECK(std::abs(std::abs(red.data.u) - std::abs(s.P2.y)) < 1e-12);
  CHECK(std::abs(std::abs(red.data.v) - std::abs(s.P3.y)) < 1e-12);
  const auto r2 = invert_2d(red.data);
  REQUIRE(r2.outcome == ReconstructOutcome::solved);
  bool lifted_matches = false;
  for (const auto& c : r2.set.candidates)
    if (red.lift(c.scene).max_abs_diff(s) < 1e-9) lifted_matches = true;
  CHECK(lifted_matches);
}

TEST_CASE("2d infeasible data embedded in 3d propagates") {
  // build coplanar-normal data whose reduced planar problem is the
  // unreachable example (u,v,a,b,c,d) = (1,5,0,1,1,0): every camera frame is
  // (p_j, q_j) = (x-axis, trace m_j), so b-readings are the x-coordinates
  // and a-readings are the planar image values
  ImageData3D d;
  d.xy[0] = {0.3, 1.0};   // P2 . m1 = 1
  d.xy[1] = {-0.6, 5.0};  // P3 . m1 = 5
  const auto fill = [&](int j, double r2, double r3) {
    d.b[0][j] = d.xy[0].x;  // P2 . x-axis
    d.b[1][j] = d.xy[1].x;
    d.a[0][j] = r2;         // P2 . m_j
    d.a[1][j] = r3;         // P3 . m_j
  };
  fill(0, /*a=*/0.0, /*b=*/1.0);
  fill(1, /*c=*/1.0, /*d=*/0.0);
  const auto res = reconstruct_3d(d);
  CHECK(res.outcome != Reconstruct3DOutcome::solved);
  CHECK(res.set.candidates.empty());
}
