#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "ullman/core.hpp"
#include "ullman/forward.hpp"
#include "ullman/reconstruct3d.hpp"
#include "ullman/scene.hpp"

// Slow, independent brute-force solvers. Everything here works from the
// defining equations only; none of it shares code with the closed-form
// inversion paths it validates.

namespace ullman::oracle {

struct GridSpec {
  double resolution = two_pi / 2000.0;  // angular step
  double tolerance = 1e-3;              // residual acceptance per cell
};

struct BruteSolutions2D {
  std::vector<Scene2D> solutions;
  bool cluster_overflow = false;  // a solution continuum (degenerate data)
};

namespace detail {

// Damped least-squares refinement of a grid hit on the reduced (alpha, beta)
// system: the ordinates are eliminated exactly through the camera-2
// equations, leaving the two camera-3 equations as residuals. Converges to
// machine precision at regular roots and onto solution curves of degenerate
// data, while residual valleys without zeros stall and get rejected.
inline bool refine_2d(const ImageData2D& d, double& alpha, double& beta,
                      double& p_out, double& q_out, double accept) {
  const auto eval = [&d](double al, double be, double& p, double& q,
                         double& f1, double& f2) {
    const double ca = std::cos(al), sa = std::sin(al);
    const double cb = std::cos(be), sb = std::sin(be);
    if (std::abs(sa) < 1e-12) return false;
    p = (d.a - d.u * ca) / sa;
    q = (d.b - d.v * ca) / sa;
    f1 = d.u * cb + p * sb - d.c;
    f2 = d.v * cb + q * sb - d.d;
    return true;
  };
  double f1, f2;
  if (!eval(alpha, beta, p_out, q_out, f1, f2)) return false;
  double lambda = 1e-9;
  for (int it = 0; it < 80; ++it) {
    if (std::max(std::abs(f1), std::abs(f2)) <= accept) return true;
    const double ca = std::cos(alpha), sa = std::sin(alpha);
    const double cb = std::cos(beta), sb = std::sin(beta);
    const double dp = (d.u - d.a * ca) / (sa * sa);
    const double dq = (d.v - d.b * ca) / (sa * sa);
    const double j11 = dp * sb, j12 = -d.u * sb + p_out * cb;
    const double j21 = dq * sb, j22 = -d.v * sb + q_out * cb;
    const double a11 = j11 * j11 + j21 * j21 + lambda;
    const double a12 = j11 * j12 + j21 * j22;
    const double a22 = j12 * j12 + j22 * j22 + lambda;
    const double b1 = -(j11 * f1 + j21 * f2);
    const double b2 = -(j12 * f1 + j22 * f2);
    const double det = a11 * a22 - a12 * a12;
    if (det <= 0.0) {
      lambda *= 10.0;
      continue;
    }
    const double dal = (b1 * a22 - b2 * a12) / det;
    const double dbe = (a11 * b2 - a12 * b1) / det;
    double tp, tq, tf1, tf2;
    if (eval(alpha + dal, beta + dbe, tp, tq, tf1, tf2) &&
        std::max(std::abs(tf1), std::abs(tf2)) <
            std::max(std::abs(f1), std::abs(f2))) {
      alpha += dal;
      beta += dbe;
      p_out = tp;
      q_out = tq;
      f1 = tf1;
      f2 = tf2;
      lambda = std::max(lambda * 0.3, 1e-12);
    } else {
      lambda *= 10.0;
      if (lambda > 1e12) break;
    }
  }
  return std::max(std::abs(f1), std::abs(f2)) <= accept;
}

}  // namespace detail

// Exhaustive scan of the camera angles; each cell solves the linear
// equations for the ordinates and keeps residual-passing cells, refined by
// local bisection and clustered into distinct solutions.
inline BruteSolutions2D brute_invert_2d(const ImageData2D& d,
                                        const GridSpec& grid = {}) {
  BruteSolutions2D out;
  const int n = std::max(8, static_cast<int>(std::lround(two_pi / grid.resolution)));
  const double step = two_pi / n;
  const double scale = d.scale();
  const double keep = grid.tolerance * scale;

  std::vector<std::pair<double, double>> hits;
  std::vector<double> cos_t(n), sin_t(n);
  for (int i = 0; i < n; ++i) {
    cos_t[i] = std::cos(-pi + (i + 0.5) * step);
    sin_t[i] = std::sin(-pi + (i + 0.5) * step);
  }
  // Two symmetric passes: eliminating the ordinates through one camera's
  // equations is ill-conditioned where that camera's sine is small, so scan
  // once per elimination choice. Only solutions where both moving cameras
  // sit on camera 1 (the degenerate boundary) can evade both passes.
  for (int i = 0; i < n; ++i) {
    const double alpha = -pi + (i + 0.5) * step;
    const double ca = cos_t[i], sa = sin_t[i];
    if (std::abs(sa) < 1e-9) continue;
    const double p = (d.a - d.u * ca) / sa;
    const double q = (d.b - d.v * ca) / sa;
    for (int j = 0; j < n; ++j) {
      const double r1 = d.u * cos_t[j] + p * sin_t[j] - d.c;
      const double r2 = d.v * cos_t[j] + q * sin_t[j] - d.d;
      if (std::abs(r1) <= keep && std::abs(r2) <= keep)
        hits.emplace_back(alpha, -pi + (j + 0.5) * step);
    }
  }
  for (int j = 0; j < n; ++j) {
    const double beta = -pi + (j + 0.5) * step;
    const double cb = cos_t[j], sb = sin_t[j];
    if (std::abs(sb) < 1e-9) continue;
    const double p = (d.c - d.u * cb) / sb;
    const double q = (d.d - d.v * cb) / sb;
    for (int i = 0; i < n; ++i) {
      const double r1 = d.u * cos_t[i] + p * sin_t[i] - d.a;
      const double r2 = d.v * cos_t[i] + q * sin_t[i] - d.b;
      if (std::abs(r1) <= keep && std::abs(r2) <= keep)
        hits.emplace_back(-pi + (i + 0.5) * step, beta);
    }
  }

  // refine hits by Newton on the reduced system, then cluster
  std::vector<Scene2D> refined;
  for (auto [alpha, beta] : hits) {
    double p, q;
    if (!detail::refine_2d(d, alpha, beta, p, q, 1e-10 * scale)) continue;
    const Scene2D s{d.u, d.v, p, q, wrap_angle(alpha), wrap_angle(beta)};
    bool dup = false;
    for (const auto& r : refined)
      if (angle_dist(r.alpha, s.alpha) <= 4.0 * step &&
          angle_dist(r.beta, s.beta) <= 4.0 * step)
        dup = true;
    if (!dup) refined.push_back(s);
    if (refined.size() > 16) {
      out.cluster_overflow = true;
      break;
    }
  }
  std::sort(refined.begin(), refined.end(), [](const auto& l, const auto& r) {
    return std::pair{l.alpha, l.beta} < std::pair{r.alpha, r.beta};
  });
  out.solutions = std::move(refined);
  return out;
}

struct BruteUllmanSolution {
  double x{}, y{}, u{}, v{};
};

// Scan of (t, s) in [0, 2pi)^2 with (u, v) = (cos t, sin t) and
// (x, y) = (cos s, sin s); residual-passing cells are Newton-refined on the
// torus and clustered.
inline std::vector<BruteUllmanSolution> brute_ullman(const PairCoefficients& k,
                                                     const GridSpec& grid = {}) {
  const int n = std::max(8, static_cast<int>(std::lround(two_pi / grid.resolution)));
  const double step = two_pi / n;
  const double keep = grid.tolerance * k.scale();

  std::vector<double> ct(n), st(n);
  for (int i = 0; i < n; ++i) {
    ct[i] = std::cos((i + 0.5) * step);
    st[i] = std::sin((i + 0.5) * step);
  }
  std::vector<std::pair<double, double>> hits;  // (s, t)
  for (int i = 0; i < n; ++i) {
    const double rhs1 = k.c * ct[i] + k.d * st[i];
    const double rhs2 = k.g * ct[i] + k.h * st[i];
    for (int j = 0; j < n; ++j) {
      const double r1 = k.a * ct[j] + k.b * st[j] - rhs1;
      const double r2 = k.e * ct[j] + k.f * st[j] - rhs2;
      if (std::abs(r1) <= keep && std::abs(r2) <= keep)
        hits.emplace_back((j + 0.5) * step, (i + 0.5) * step);
    }
  }

  std::vector<BruteUllmanSolution> found;
  for (auto [s, t] : hits) {
    double x = std::cos(s), y = std::sin(s), u = std::cos(t), v = std::sin(t);
    ullman::detail::polish_pair_solution(k, x, y, u, v);
    if (ullman::detail::pair_equation_gap(k, x, y, u, v) > 1e-9 * k.scale())
      continue;
    bool dup = false;
    for (const auto& f : found)
      if (std::abs(f.x - x) <= 4.0 * step && std::abs(f.y - y) <= 4.0 * step &&
          std::abs(f.u - u) <= 4.0 * step && std::abs(f.v - v) <= 4.0 * step)
        dup = true;
    if (!dup) found.push_back({x, y, u, v});
  }
  std::sort(found.begin(), found.end(), [](const auto& l, const auto& r) {
    return std::array{l.x, l.y, l.u, l.v} < std::array{r.x, r.y, r.u, r.v};
  });
  return found;
}

// Deterministic nondegenerate scenes: rejection sampling until every factor
// of the Jacobian determinant clears a margin of its natural scale.
inline Scene2D random_scene_2d(std::uint64_t seed) {
  Rng rng(seed * 2 + 1);
  for (;;) {
    Scene2D s;
    s.u = rng.uniform(-2.0, 2.0);
    s.v = rng.uniform(-2.0, 2.0);
    s.p = rng.uniform(-2.0, 2.0);
    s.q = rng.uniform(-2.0, 2.0);
    s.alpha = rng.uniform(-pi, pi);
    s.beta = rng.uniform(-pi, pi);
    if (std::abs(std::sin(s.alpha)) < 0.1) continue;
    if (std::abs(std::sin(s.beta)) < 0.1) continue;
    if (std::abs(std::sin(s.alpha - s.beta)) < 0.1) continue;
    const double scale = std::hypot(s.u, s.p) * std::hypot(s.v, s.q);
    if (std::abs(s.u * s.q - s.v * s.p) < 0.1 * (1.0 + scale)) continue;
    return s;
  }
}

inline Scene3D random_scene_3d(std::uint64_t seed) {
  Rng rng(seed * 2 + 1);
  for (;;) {
    Scene3D s;
    s.P2 = {rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0)};
    s.P3 = {rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0)};
    s.cam2 = frame_from_angles(rng.uniform(-pi, pi), rng.uniform(-pi, pi),
                               rng.uniform(-pi, pi));
    s.cam3 = frame_from_angles(rng.uniform(-pi, pi), rng.uniform(-pi, pi),
                               rng.uniform(-pi, pi));
    // noncollinearity and distinct planes, with margin
    if (s.P2.cross(s.P3).norm() < 0.1 * (1.0 + s.P2.norm() * s.P3.norm()))
      continue;
    const Vec3 ez{0.0, 0.0, 1.0};
    const Vec3 n2 = s.cam2.normal(), n3 = s.cam3.normal();
    if (n2.cross(ez).norm() < 0.15 || n3.cross(ez).norm() < 0.15) continue;
    if (n2.cross(n3).norm() < 0.15) continue;
    // margins on the closed-form determinant factors
    const double x1 = s.P2.x, y1 = s.P2.y, z1 = s.P2.z;
    const double x2 = s.P3.x, y2 = s.P3.y, z2 = s.P3.z;
    const double A = y2 * z1 - y1 * z2, B = x2 * z1 - x1 * z2;
    const double sc = std::hypot(A, B);
    if (sc < 0.1) continue;
    const double e1 = A * std::cos(s.cam2.theta) + B * std::sin(s.cam2.theta);
    const double e2 = A * std::cos(s.cam3.theta) + B * std::sin(s.cam3.theta);
    if (std::abs(e1) < 0.05 * sc || std::abs(e2) < 0.05 * sc) continue;
    const double dj = jacobian_det_3d(s);
    if (std::abs(dj) < 1e-3) continue;
    return s;
  }
}

// Coplanar-normal scenes: all three camera planes share one horizontal
// direction, so the data reduces to a planar problem.
inline Scene3D random_coplanar_scene_3d(std::uint64_t seed) {
  Rng rng(seed * 2 + 1);
  for (;;) {
    const double omega = rng.uniform(-pi, pi);
    const Vec3 dvec{std::cos(omega), std::sin(omega), 0.0};
    const Vec3 m1{-std::sin(omega), std::cos(omega), 0.0};
    const Vec3 ez{0.0, 0.0, 1.0};
    const double psi2 = rng.uniform(0.3, pi - 0.3);
    double psi3 = rng.uniform(0.3, pi - 0.3);
    if (std::abs(std::sin(psi2 - psi3)) < 0.1) continue;
    const auto plane_frame = [&](double psi, double rho) {
      // the plane spans dvec and m = cos(psi) m1 + sin(psi) ez, rotated by rho
      const Vec3 m = m1 * std::cos(psi) + ez * std::sin(psi);
      const Vec3 p = dvec * std::cos(rho) + m * std::sin(rho);
      const Vec3 q = dvec * (-std::sin(rho)) + m * std::cos(rho);
      return frame_from_vectors(p, q);
    };
    Scene3D s;
    s.cam2 = plane_frame(psi2, rng.uniform(-pi, pi));
    s.cam3 = plane_frame(psi3, rng.uniform(-pi, pi));
    s.P2 = {rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0)};
    s.P3 = {rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0)};
    if (s.P2.cross(s.P3).norm() < 0.1 * (1.0 + s.P2.norm() * s.P3.norm()))
      continue;
    // the reduced planar problem must be nondegenerate as well
    const Scene2D shadow{s.P2.dot(m1), s.P3.dot(m1), s.P2.z, s.P3.z, 0.0, 0.0};
    const double sc = std::hypot(shadow.u, shadow.p) * std::hypot(shadow.v, shadow.q);
    if (std::abs(shadow.u * shadow.q - shadow.v * shadow.p) < 0.1 * (1.0 + sc))
      continue;
    return s;
  }
}

}  // namespace ullman::oracle
