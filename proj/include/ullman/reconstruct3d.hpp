#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "ullman/core.hpp"
#include "ullman/forward.hpp"
#include "ullman/reconstruct2d.hpp"
#include "ullman/scene.hpp"

namespace ullman {

// One solution of the pair equations: unit coordinates of a candidate
// intersection line in camera plane i ((alpha, beta)) and in camera plane j
// ((gamma, delta)).
struct UllmanPairSolution {
  double alpha{}, beta{};
  double gamma{}, delta{};
  bool spurious = false;
};

enum class PairOutcome {
  solved,
  singular_elimination,  // the 2x2 system in (x, y) is singular
  no_real_solution,
  continuum,             // every direction solves (degenerate coefficients)
};

struct PairResult {
  PairOutcome outcome = PairOutcome::no_real_solution;
  std::vector<UllmanPairSolution> solutions;
};

// Coefficients of a x + b y = c u + d v, e x + f y = g u + h v with the two
// unit-circle constraints.
struct PairCoefficients {
  double a{}, b{}, c{}, d{}, e{}, f{}, g{}, h{};

  double scale() const {
    return std::max({1.0, std::abs(a), std::abs(b), std::abs(c), std::abs(d),
                     std::abs(e), std::abs(f), std::abs(g), std::abs(h)});
  }
};

// Pair (i, j) of cameras, i, j in {1, 2, 3}: the left side carries camera i's
// readings of P2 and P3, the right side camera j's.
inline PairCoefficients pair_coefficients(const ImageData3D& d, int cam_i,
                                          int cam_j) {
  const auto reading = [&d](int cam, int point) -> Vec2 {
    if (cam == 1) return d.xy[point];
    return {d.b[point][cam - 2], d.a[point][cam - 2]};  // (P.p, P.q)
  };
  const Vec2 i2 = reading(cam_i, 0), i3 = reading(cam_i, 1);
  const Vec2 j2 = reading(cam_j, 0), j3 = reading(cam_j, 1);
  return {i2.x, i2.y, j2.x, j2.y, i3.x, i3.y, j3.x, j3.y};
}

// Auxiliary quantities of the cos(2t) quadratic, from the linear-elimination
// coefficients x = A u + B v, y = F u + G v.
struct QuarticAux {
  double U{}, V{}, W{}, S{}, T{};
};

inline QuarticAux quartic_aux(double A, double B, double F, double G) {
  QuarticAux q;
  q.U = (A * A + F * F) / 2.0;
  q.V = (B * B + G * G) / 2.0;
  q.W = A * B + F * G;
  q.S = q.U - q.V;
  q.T = q.U + q.V - 1.0;
  return q;
}

namespace detail {

inline double pair_equation_gap(const PairCoefficients& k, double x, double y,
                                double u, double v) {
  return std::max({std::abs(k.a * x + k.b * y - k.c * u - k.d * v),
                   std::abs(k.e * x + k.f * y - k.g * u - k.h * v),
                   std::abs(x * x + y * y - 1.0),
                   std::abs(u * u + v * v - 1.0)});
}

// Newton polish on the torus coordinates (s, t) with (x,y) = (cos s, sin s),
// (u,v) = (cos t, sin t); the circle constraints are exact by construction.
inline void polish_pair_solution(const PairCoefficients& k, double& x,
                                 double& y, double& u, double& v) {
  double s = std::atan2(y, x), t = std::atan2(v, u);
  for (int it = 0; it < 4; ++it) {
    const double cs = std::cos(s), ss = std::sin(s);
    const double ct = std::cos(t), st = std::sin(t);
    const double r1 = k.a * cs + k.b * ss - k.c * ct - k.d * st;
    const double r2 = k.e * cs + k.f * ss - k.g * ct - k.h * st;
    const double j11 = -k.a * ss + k.b * cs, j12 = k.c * st - k.d * ct;
    const double j21 = -k.e * ss + k.f * cs, j22 = k.g * st - k.h * ct;
    const double dj = j11 * j22 - j12 * j21;
    if (std::abs(dj) < 1e-14) break;
    s -= (r1 * j22 - r2 * j12) / dj;
    t -= (j11 * r2 - j21 * r1) / dj;
  }
  x = std::cos(s);
  y = std::sin(s);
  u = std::cos(t);
  v = std::sin(t);
}

}  // namespace detail

// Solves the pair equations by eliminating (x, y) = (A u + B v, F u + G v),
// putting (u, v) = (cos t, sin t) and taking the closed-form roots of the
// quadratic in cos(2t). All sign branches (both quadratic roots, both signs
// of sin(2t), both half-angle lifts) are expanded and filtered against the
// original equations, then Newton-polished.
inline PairResult solve_ullman_pair(const PairCoefficients& k,
                                    double eps = tol::residual) {
  PairResult out;
  const double scale = k.scale();
  const double det = k.a * k.f - k.b * k.e;
  if (near_zero(det, scale * scale, tol::degeneracy)) {
    out.outcome = PairOutcome::singular_elimination;
    return out;
  }
  const double A = (k.f * k.c - k.b * k.g) / det;
  const double B = (k.f * k.d - k.b * k.h) / det;
  const double F = (k.a * k.g - k.e * k.c) / det;
  const double G = (k.a * k.h - k.e * k.d) / det;

  const auto [U, V, W, S, T] = quartic_aux(A, B, F, G);

  const double lead = S * S + W * W;
  if (lead <= tol::algebraic * (1.0 + U + V)) {
    // (x, y) is a rotation of (u, v): either everything solves or nothing.
    out.outcome = std::abs(T) <= tol::degeneracy ? PairOutcome::continuum
                                                 : PairOutcome::no_real_solution;
    return out;
  }
  const double disc = S * S - T * T + W * W;
  if (disc < -tol::algebraic * (S * S + T * T + W * W + 1.0)) {
    out.outcome = PairOutcome::no_real_solution;
    return out;
  }
  const double sq = std::sqrt(std::max(0.0, disc));

  std::vector<UllmanPairSolution> sols;
  const auto consider = [&](double x, double y, double u, double v) {
    const double raw_gap = detail::pair_equation_gap(k, x, y, u, v);
    if (raw_gap > eps * scale) return;
    double px = x, py = y, pu = u, pv = v;
    detail::polish_pair_solution(k, px, py, pu, pv);
    if (detail::pair_equation_gap(k, px, py, pu, pv) <= raw_gap) {
      x = px;
      y = py;
      u = pu;
      v = pv;
    }
    for (const auto& s : sols)
      if (std::abs(s.alpha - x) <= 1e-7 && std::abs(s.beta - y) <= 1e-7 &&
          std::abs(s.gamma - u) <= 1e-7 && std::abs(s.delta - v) <= 1e-7)
        return;
    sols.push_back({x, y, u, v, false});
  };

  for (const double root_sign : {1.0, -1.0}) {
    const double c2 = (-(S * T) + root_sign * W * sq) / lead;
    if (std::abs(c2) > 1.0 + 1e-12) continue;
    const double c2c = std::clamp(c2, -1.0, 1.0);
    for (const double sin_sign : {1.0, -1.0}) {
      const double s2 = sin_sign * std::sqrt(std::max(0.0, 1.0 - c2c * c2c));
      const double t2 = std::atan2(s2, c2c);
      for (const double t : {t2 / 2.0, t2 / 2.0 + pi}) {
        const double u = std::cos(t), v = std::sin(t);
        consider(A * u + B * v, F * u + G * v, u, v);
      }
    }
  }

  std::sort(sols.begin(), sols.end(), [](const auto& l, const auto& r) {
    if (l.alpha != r.alpha) return l.alpha < r.alpha;
    if (l.beta != r.beta) return l.beta < r.beta;
    return l.gamma < r.gamma;
  });
  out.solutions = std::move(sols);
  out.outcome = out.solutions.empty() ? PairOutcome::no_real_solution
                                      : PairOutcome::solved;
  return out;
}

// Marks the branches whose line difference vector is nonzero (those are the
// ones perpendicular to the point plane). Requires the true camera frames,
// so this is an analysis tool; the reconstruction pipeline itself filters by
// reprojection residual instead.
inline void filter_spurious(std::vector<UllmanPairSolution>& sols,
                            const EulerFrame& frame_i, const EulerFrame& frame_j,
                            const Vec3& point_plane_normal,
                            double eps = tol::degeneracy) {
  const Vec3 n = point_plane_normal.normalized();
  for (auto& s : sols) {
    const Vec3 wi = frame_i.p_vec * s.alpha + frame_i.q_vec * s.beta;
    const Vec3 wj = frame_j.p_vec * s.gamma + frame_j.q_vec * s.delta;
    // pair solutions differ only along the point-plane normal; a genuine
    // intersection line has zero difference
    s.spurious = std::abs((wi - wj).dot(n)) > eps;
  }
}

enum class ThirdLineOutcome { solved, parallel_lines, no_real_solution };

struct ThirdLineResult {
  ThirdLineOutcome outcome = ThirdLineOutcome::no_real_solution;
  std::vector<Vec3> lines;  // up to 2 unit vectors
};

// Intersects the two cones X.U = r, X.V = s with the unit sphere: linear
// solve on span{U, V} plus a quadratic for the orthogonal component.
inline ThirdLineResult third_line(const Vec3& U, const Vec3& V, double r,
                                  double s, double eps = tol::degeneracy) {
  ThirdLineResult out;
  const Vec3 crossUV = U.cross(V);
  if (crossUV.norm() <= eps) {
    out.outcome = ThirdLineOutcome::parallel_lines;
    return out;
  }
  const double uu = U.dot(U), vv = V.dot(V), uv = U.dot(V);
  const double g = uu * vv - uv * uv;
  const double au = (r * vv - s * uv) / g;
  const double bv = (uu * s - uv * r) / g;
  const Vec3 base = U * au + V * bv;
  const double rem = 1.0 - base.dot(base);
  if (rem < -tol::algebraic * (1.0 + base.dot(base))) {
    out.outcome = ThirdLineOutcome::no_real_solution;
    return out;
  }
  const double c = std::sqrt(std::max(0.0, rem));
  const Vec3 n = crossUV.normalized();
  out.lines.push_back(base + n * c);
  if (c > tol::algebraic) out.lines.push_back(base - n * c);
  out.outcome = ThirdLineOutcome::solved;
  return out;
}

struct FrameRecovery {
  bool ok = false;  // false: the two in-plane coordinate vectors are dependent
  Vec3 p{}, q{};
  double residual{};
};

// The unique (p, q) with coords1.x p + coords1.y q = world1 and likewise for
// the second line; a plain 2x2 solve per component.
inline FrameRecovery recover_frames(Vec2 coords1, const Vec3& world1,
                                    Vec2 coords2, const Vec3& world2,
                                    double eps = tol::degeneracy) {
  FrameRecovery out;
  const double det = coords1.cross(coords2);
  if (std::abs(det) <= eps) return out;
  out.p = (world1 * coords2.y - world2 * coords1.y) * (1.0 / det);
  out.q = (world2 * coords1.x - world1 * coords2.x) * (1.0 / det);
  out.residual = std::max(
      (out.p * coords1.x + out.q * coords1.y - world1).norm(),
      (out.p * coords2.x + out.q * coords2.y - world2).norm());
  out.ok = true;
  return out;
}

struct DepthRecovery {
  double z{};
  double residual{};  // infeasibility of the overdetermined system
};

// Depth of one point from its four readings in cameras 2 and 3; the planar
// coordinates are fixed by camera 1, leaving four equations for one unknown.
inline DepthRecovery recover_depths(const EulerFrame& cam2,
                                    const EulerFrame& cam3, Vec2 xy,
                                    double b2, double a2, double b3,
                                    double a3) {
  const double w[4] = {cam2.p_vec.z, cam2.q_vec.z, cam3.p_vec.z, cam3.q_vec.z};
  const double m[4] = {b2 - xy.x * cam2.p_vec.x - xy.y * cam2.p_vec.y,
                       a2 - xy.x * cam2.q_vec.x - xy.y * cam2.q_vec.y,
                       b3 - xy.x * cam3.p_vec.x - xy.y * cam3.p_vec.y,
                       a3 - xy.x * cam3.q_vec.x - xy.y * cam3.q_vec.y};
  double ww = 0.0, wm = 0.0;
  for (int i = 0; i < 4; ++i) {
    ww += w[i] * w[i];
    wm += w[i] * m[i];
  }
  DepthRecovery out;
  out.z = ww > tol::algebraic ? wm / ww : 0.0;
  for (int i = 0; i < 4; ++i)
    out.residual = std::max(out.residual, std::abs(out.z * w[i] - m[i]));
  return out;
}

namespace detail {

inline double reprojection_gap(const Scene3D& s, const ImageData3D& d) {
  const ImageData3D r = project_3d(s);
  double gap = 0.0;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      gap = std::max({gap, std::abs(r.a[i][j] - d.a[i][j]),
                      std::abs(r.b[i][j] - d.b[i][j])});
  return gap;
}

// d-coordinates (g, h) of a horizontal direction inside camera j's frame,
// solved from the data: g (P.p_j) + h (P.q_j) = P.d for both points.
struct DirCoords {
  bool ok = false;
  double g{}, h{};
  double unit_gap{};  // |g^2 + h^2 - 1|; zero when the direction truly lies in the plane
};

inline DirCoords direction_coords_in_camera(const ImageData3D& d, int cam,
                                            const Vec3& dir) {
  DirCoords out;
  const int j = cam - 2;
  const double m2 = d.xy[0].x * dir.x + d.xy[0].y * dir.y;
  const double m3 = d.xy[1].x * dir.x + d.xy[1].y * dir.y;
  const double det = d.b[0][j] * d.a[1][j] - d.a[0][j] * d.b[1][j];
  if (std::abs(det) <= tol::algebraic * (1.0 + d.scale() * d.scale()))
    return out;
  out.g = (m2 * d.a[1][j] - d.a[0][j] * m3) / det;
  out.h = (d.b[0][j] * m3 - m2 * d.b[1][j]) / det;
  out.unit_gap = std::abs(out.g * out.g + out.h * out.h - 1.0);
  out.ok = true;
  return out;
}

}  // namespace detail

// True when the three camera-plane normals are coplanar, i.e. all three
// planes share a direction after translation.
inline bool detect_coplanar_normals(const Scene3D& s,
                                    double eps = tol::degeneracy) {
  const Vec3 ez{0.0, 0.0, 1.0};
  const double triple = s.cam2.normal().cross(s.cam3.normal()).dot(ez);
  return std::abs(triple) <= eps;
}

// Data-side detector: the planes share a direction exactly when the pair
// systems (1,2) and (1,3) admit a common camera-1 solution. Candidate
// parallels are confirmed by checking that the shared direction has unit
// coordinates inside cameras 2 and 3.
inline bool detect_coplanar_normals(const ImageData3D& d,
                                    double eps = tol::degeneracy) {
  const PairResult s12 = solve_ullman_pair(pair_coefficients(d, 1, 2));
  const PairResult s13 = solve_ullman_pair(pair_coefficients(d, 1, 3));
  if (s12.outcome != PairOutcome::solved || s13.outcome != PairOutcome::solved)
    return s12.outcome == PairOutcome::continuum ||
           s13.outcome == PairOutcome::continuum;
  for (const auto& a : s12.solutions)
    for (const auto& b : s13.solutions) {
      if (std::abs(a.alpha * b.beta - a.beta * b.alpha) > eps) continue;
      const Vec3 dir{a.alpha, a.beta, 0.0};
      const auto c2 = detail::direction_coords_in_camera(d, 2, dir);
      const auto c3 = detail::direction_coords_in_camera(d, 3, dir);
      if (c2.ok && c3.ok && c2.unit_gap <= 1e-5 && c3.unit_gap <= 1e-5)
        return true;
    }
  return false;
}

// Reduction of a coplanar-normal problem to the plane orthogonal to the
// shared direction. The 2D problem's x-axis is camera 1's trace m1 and its
// y-axis is the world z-axis, so the recovered 2D ordinates are the depths.
struct Reduction2D {
  bool ok = false;
  ImageData2D data{};
  Vec3 dir{};              // the common direction (horizontal, unit)
  Vec3 m1{};               // camera 1's in-plane direction orthogonal to dir
  Vec2 coords_cam2{}, coords_cam3{};  // dir's coordinates in cameras 2, 3
  Vec2 xy2{}, xy3{};       // camera-1 readings carried through

  Scene3D lift(const Scene2D& s) const {
    const Vec3 ez{0.0, 0.0, 1.0};
    Scene3D out;
    out.P2 = {xy2.x, xy2.y, s.p};
    out.P3 = {xy3.x, xy3.y, s.q};
    const auto build = [&](double angle, Vec2 gh) {
      const Vec3 m = m1 * std::cos(angle) + ez * std::sin(angle);
      const Vec3 p = dir * gh.x - m * gh.y;
      const Vec3 q = dir * gh.y + m * gh.x;
      return frame_from_vectors(p, q);
    };
    out.cam2 = build(s.alpha, coords_cam2);
    out.cam3 = build(s.beta, coords_cam3);
    return out;
  }
};

inline Reduction2D reduce_to_2d(const ImageData3D& d, const Vec3& common_line) {
  Reduction2D out;
  const double horiz = std::hypot(common_line.x, common_line.y);
  if (horiz <= tol::degeneracy) return out;  // the shared line is horizontal by gauge
  out.dir = {common_line.x / horiz, common_line.y / horiz, 0.0};
  out.m1 = {-out.dir.y, out.dir.x, 0.0};
  const auto c2 = detail::direction_coords_in_camera(d, 2, out.dir);
  const auto c3 = detail::direction_coords_in_camera(d, 3, out.dir);
  if (!c2.ok || !c3.ok) return out;
  out.coords_cam2 = {c2.g, c2.h};
  out.coords_cam3 = {c3.g, c3.h};
  out.xy2 = d.xy[0];
  out.xy3 = d.xy[1];
  // scalar readings of both points along each camera's trace m_j
  out.data.u = d.xy[0].x * out.m1.x + d.xy[0].y * out.m1.y;
  out.data.v = d.xy[1].x * out.m1.x + d.xy[1].y * out.m1.y;
  out.data.a = -c2.h * d.b[0][0] + c2.g * d.a[0][0];
  out.data.b = -c2.h * d.b[1][0] + c2.g * d.a[1][0];
  out.data.c = -c3.h * d.b[0][1] + c3.g * d.a[0][1];
  out.data.d = -c3.h * d.b[1][1] + c3.g * d.a[1][1];
  out.ok = true;
  return out;
}

enum class Reconstruct3DOutcome { solved, infeasible, degenerate_configuration };

struct Reconstruct3DResult {
  Reconstruct3DOutcome outcome = Reconstruct3DOutcome::infeasible;
  CandidateSet<Scene3D> set;
  bool used_reduction = false;
};

namespace detail {

// Gauss-Newton polish of an assembled candidate on the reduced 8-unknown
// system. The staged assembly can lose digits when two intersection lines
// are nearly parallel; the polish restores them wherever the Jacobian is
// regular.
inline double polish_candidate(Scene3D& s, const ImageData3D& d) {
  const auto residuals = [&d](const Scene3D& t) {
    const ImageData3D r = project_3d(t);
    return std::array<double, 8>{
        r.b[0][0] - d.b[0][0], r.a[0][0] - d.a[0][0], r.b[1][0] - d.b[1][0],
        r.a[1][0] - d.a[1][0], r.b[0][1] - d.b[0][1], r.a[0][1] - d.a[0][1],
        r.b[1][1] - d.b[1][1], r.a[1][1] - d.a[1][1]};
  };
  const auto max_abs = [](const std::array<double, 8>& v) {
    double m = 0.0;
    for (const double x : v) m = std::max(m, std::abs(x));
    return m;
  };
  double gap = max_abs(residuals(s));
  for (int it = 0; it < 6 && gap > 1e-13; ++it) {
    const auto J = jacobian_numeric(s, 1e-6).matrix;
    std::array<double, 8> delta{};
    if (!solve_linear(J, residuals(s), delta)) break;
    Scene3D next = s;
    next.P2.z -= delta[0];
    next.P3.z -= delta[1];
    next.cam2 = frame_from_angles(s.cam2.theta - delta[2],
                                  s.cam2.phi - delta[3],
                                  s.cam2.gamma - delta[4]);
    next.cam3 = frame_from_angles(s.cam3.theta - delta[5],
                                  s.cam3.phi - delta[6],
                                  s.cam3.gamma - delta[7]);
    const double next_gap = max_abs(residuals(next));
    if (next_gap >= gap) break;
    s = next;
    gap = next_gap;
  }
  return gap;
}

inline void keep_candidate(std::vector<Candidate<Scene3D>>& kept,
                           const Scene3D& s, double gap) {
  for (const auto& k : kept)
    if (k.scene.max_abs_diff(s) <= 1e-7) return;
  kept.push_back({s, gap});
}

inline void sort_candidates(std::vector<Candidate<Scene3D>>& kept) {
  std::sort(kept.begin(), kept.end(), [](const auto& l, const auto& r) {
    if (l.residual != r.residual) return l.residual < r.residual;
    const auto key = [](const Scene3D& s) {
      return std::array<double, 8>{s.P2.z,        s.P3.z,       s.cam2.p_vec.x,
                                   s.cam2.p_vec.y, s.cam2.p_vec.z,
                                   s.cam3.p_vec.x, s.cam3.p_vec.y,
                                   s.cam3.p_vec.z};
    };
    return key(l.scene) < key(r.scene);
  });
}

}  // namespace detail

// Full staged inversion: solve the pair equations for all three camera
// pairs, enumerate the line combinations, intersect cones for the third
// line, rebuild frames and depths per combination, and keep candidates whose
// reprojection matches the data. Coplanar-normal data routes through the 2D
// reduction instead.
inline Reconstruct3DResult reconstruct_3d(const ImageData3D& d,
                                          double accept_tol = tol::residual) {
  if (!(accept_tol > 0.0)) throw std::invalid_argument("tol must be > 0");
  Reconstruct3DResult out;
  const double scale = d.scale();

  const PairResult s12 = solve_ullman_pair(pair_coefficients(d, 1, 2));
  const PairResult s13 = solve_ullman_pair(pair_coefficients(d, 1, 3));
  const PairResult s23 = solve_ullman_pair(pair_coefficients(d, 2, 3));
  if (s12.outcome == PairOutcome::singular_elimination ||
      s13.outcome == PairOutcome::singular_elimination ||
      s12.outcome == PairOutcome::continuum ||
      s13.outcome == PairOutcome::continuum) {
    out.outcome = Reconstruct3DOutcome::degenerate_configuration;
    return out;
  }

  std::vector<Candidate<Scene3D>> kept;
  std::vector<Vec3> parallel_dirs;

  if (s23.outcome == PairOutcome::solved) {
    for (const auto& l12 : s12.solutions) {
      const Vec3 U{l12.alpha, l12.beta, 0.0};
      for (const auto& l13 : s13.solutions) {
        const Vec3 V{l13.alpha, l13.beta, 0.0};
        if (U.cross(V).norm() <= tol::degeneracy) {
          parallel_dirs.push_back(U);
          continue;
        }
        for (const auto& l23 : s23.solutions) {
          // in-plane dot products source the cone right-hand sides
          const double r = l23.alpha * l12.gamma + l23.beta * l12.delta;
          const double s = l23.gamma * l13.gamma + l23.delta * l13.delta;
          const ThirdLineResult tl = third_line(U, V, r, s);
          if (tl.outcome != ThirdLineOutcome::solved) continue;
          for (const Vec3& X : tl.lines) {
            const FrameRecovery f2 =
                recover_frames({l12.gamma, l12.delta}, U,
                               {l23.alpha, l23.beta}, X);
            const FrameRecovery f3 =
                recover_frames({l13.gamma, l13.delta}, V,
                               {l23.gamma, l23.delta}, X);
            if (!f2.ok || !f3.ok) continue;
            // reject combinations whose linear solve is not close to a frame
            const double ortho = std::max(
                {std::abs(f2.p.dot(f2.p) - 1.0), std::abs(f2.q.dot(f2.q) - 1.0),
                 std::abs(f2.p.dot(f2.q)), std::abs(f3.p.dot(f3.p) - 1.0),
                 std::abs(f3.q.dot(f3.q) - 1.0), std::abs(f3.p.dot(f3.q))});
            if (ortho > 1e-3) continue;
            Scene3D s3;
            s3.cam2 = frame_from_vectors(f2.p, f2.q);
            s3.cam3 = frame_from_vectors(f3.p, f3.q);
            const DepthRecovery z1 =
                recover_depths(s3.cam2, s3.cam3, d.xy[0], d.b[0][0], d.a[0][0],
                               d.b[0][1], d.a[0][1]);
            const DepthRecovery z2 =
                recover_depths(s3.cam2, s3.cam3, d.xy[1], d.b[1][0], d.a[1][0],
                               d.b[1][1], d.a[1][1]);
            s3.P2 = {d.xy[0].x, d.xy[0].y, z1.z};
            s3.P3 = {d.xy[1].x, d.xy[1].y, z2.z};
            double gap = detail::reprojection_gap(s3, d);
            if (gap > accept_tol * scale && gap <= 1e-3 * scale)
              gap = detail::polish_candidate(s3, d);
            if (gap <= accept_tol * scale) detail::keep_candidate(kept, s3, gap);
          }
        }
      }
    }
  }

  // Coplanar-normal route: lift 2D reconstructions along each confirmed
  // shared direction.
  const bool coplanar = detect_coplanar_normals(d);
  if (coplanar) {
    std::vector<Vec3> dirs = parallel_dirs;
    if (dirs.empty())
      for (const auto& l12 : s12.solutions)
        dirs.push_back({l12.alpha, l12.beta, 0.0});
    std::vector<Vec3> tried;
    for (const Vec3& dir : dirs) {
      bool seen = false;
      for (const Vec3& t : tried)
        if (t.cross(dir).norm() <= 1e-9) seen = true;
      if (seen) continue;
      tried.push_back(dir);
      const Reduction2D red = reduce_to_2d(d, dir);
      if (!red.ok) continue;
      const Invert2DResult r2 = invert_2d(red.data, accept_tol);
      for (const auto& c : r2.set.candidates) {
        const Scene3D lifted = red.lift(c.scene);
        const double gap = detail::reprojection_gap(lifted, d);
        if (gap <= accept_tol * scale)
          detail::keep_candidate(kept, lifted, gap);
      }
    }
    out.used_reduction = true;
  }

  detail::sort_candidates(kept);
  out.set.candidates = std::move(kept);
  if (coplanar)
    out.outcome = Reconstruct3DOutcome::degenerate_configuration;
  else if (out.set.candidates.empty())
    out.outcome = Reconstruct3DOutcome::infeasible;
  else
    out.outcome = Reconstruct3DOutcome::solved;

  if (!out.set.candidates.empty()) {
    bool closed = true;
    for (const auto& c : out.set.candidates)
      if (!out.set.contains(mirror_scene(c.scene), 1e-6)) closed = false;
    out.set.ambiguity_note = closed && out.set.candidates.size() > 1
                                 ? AmbiguityNote::mirror_paired
                                 : AmbiguityNote::single;
  }
  return out;
}

}  // namespace ullman
