#pragma once

#include <array>
#include <cmath>
#include <stdexcept>

#include "ullman/core.hpp"
#include "ullman/scene.hpp"

namespace ullman {

// The structure-from-motion map: scalar projections of the points onto the
// camera directions.
inline ImageData2D project_2d(const Scene2D& s) {
  const double ca = std::cos(s.alpha), sa = std::sin(s.alpha);
  const double cb = std::cos(s.beta), sb = std::sin(s.beta);
  ImageData2D d;
  d.u = s.u;
  d.v = s.v;
  d.a = s.u * ca + s.p * sa;
  d.c = s.u * cb + s.p * sb;
  d.b = s.v * ca + s.q * sa;
  d.d = s.v * cb + s.q * sb;
  return d;
}

inline ImageData3D project_3d(const Scene3D& s) {
  ImageData3D d;
  d.xy[0] = {s.P2.x, s.P2.y};
  d.xy[1] = {s.P3.x, s.P3.y};
  const Vec3 pts[2] = {s.P2, s.P3};
  const EulerFrame* cams[2] = {&s.cam2, &s.cam3};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      d.a[i][j] = pts[i].dot(cams[j]->q_vec);
      d.b[i][j] = pts[i].dot(cams[j]->p_vec);
    }
  return d;
}

// Jacobian determinant of the reduced map (p,q,alpha,beta) -> (a,b,c,d).
inline double jacobian_det_2d(const Scene2D& s) {
  return std::sin(s.alpha) * std::sin(s.beta) * std::sin(s.alpha - s.beta) *
         (s.u * s.q - s.v * s.p);
}

// Closed-form determinant of the reduced 3D map, a product of six factors in
// the depths and camera angles. Vanishes exactly on the degenerate scenes.
inline double jacobian_det_3d(const Scene3D& s) {
  const double x1 = s.P2.x, y1 = s.P2.y, z1 = s.P2.z;
  const double x2 = s.P3.x, y2 = s.P3.y, z2 = s.P3.z;
  const double A = y2 * z1 - y1 * z2;
  const double B = x2 * z1 - x1 * z2;
  const double C = y1 * z2 - y2 * z1;
  const double D = y1 * x2 - x1 * y2;
  const double t1 = s.cam2.theta, f1 = s.cam2.phi;
  const double t2 = s.cam3.theta, f2 = s.cam3.phi;
  const double e1 = A * std::cos(t1) + B * std::sin(t1);
  const double e2 = A * std::cos(t2) + B * std::sin(t2);
  const double bracket =
      std::cos(f2) * std::sin(f1) * e1 +
      std::sin(f2) * (D * std::sin(f1) * std::sin(t1 - t2) +
                      std::cos(f1) * (C * std::cos(t2) - B * std::sin(t2)));
  const double s1 = std::sin(f1), s2 = std::sin(f2);
  return s1 * s1 * s2 * s2 * e1 * e2 * bracket;
}

template <std::size_t N>
struct NumericJacobian {
  std::array<std::array<double, N>, N> matrix{};
  double determinant{};
};

// Central-difference Jacobian of the reduced 2D map over (p,q,alpha,beta),
// data ordered (a,b,c,d) to match jacobian_det_2d.
inline NumericJacobian<4> jacobian_numeric(const Scene2D& s,
                                           double step = tol::fd_step) {
  if (!(step > 0.0)) throw std::invalid_argument("jacobian step must be > 0");
  const auto eval = [&s](const std::array<double, 4>& x) {
    Scene2D t = s;
    t.p = x[0];
    t.q = x[1];
    t.alpha = x[2];
    t.beta = x[3];
    const ImageData2D d = project_2d(t);
    return std::array<double, 4>{d.a, d.b, d.c, d.d};
  };
  const std::array<double, 4> x0{s.p, s.q, s.alpha, s.beta};
  NumericJacobian<4> out;
  for (std::size_t k = 0; k < 4; ++k) {
    auto xp = x0, xm = x0;
    xp[k] += step;
    xm[k] -= step;
    const auto fp = eval(xp), fm = eval(xm);
    for (std::size_t i = 0; i < 4; ++i)
      out.matrix[i][k] = (fp[i] - fm[i]) / (2.0 * step);
  }
  out.determinant = det(out.matrix);
  return out;
}

// Reduced 3D map over (z1, z2, theta2, phi2, gamma2, theta3, phi3, gamma3);
// data ordered (P2.p2, P2.q2, P3.p2, P3.q2, P2.p3, P2.q3, P3.p3, P3.q3),
// which is the order the closed-form determinant corresponds to.
inline NumericJacobian<8> jacobian_numeric(const Scene3D& s,
                                           double step = tol::fd_step) {
  if (!(step > 0.0)) throw std::invalid_argument("jacobian step must be > 0");
  const auto eval = [&s](const std::array<double, 8>& x) {
    Scene3D t = s;
    t.P2.z = x[0];
    t.P3.z = x[1];
    t.cam2 = frame_from_angles(x[2], x[3], x[4]);
    t.cam3 = frame_from_angles(x[5], x[6], x[7]);
    const ImageData3D d = project_3d(t);
    return std::array<double, 8>{d.b[0][0], d.a[0][0], d.b[1][0], d.a[1][0],
                                 d.b[0][1], d.a[0][1], d.b[1][1], d.a[1][1]};
  };
  const std::array<double, 8> x0{s.P2.z,       s.P3.z,      s.cam2.theta,
                                 s.cam2.phi,   s.cam2.gamma, s.cam3.theta,
                                 s.cam3.phi,   s.cam3.gamma};
  NumericJacobian<8> out;
  for (std::size_t k = 0; k < 8; ++k) {
    auto xp = x0, xm = x0;
    xp[k] += step;
    xm[k] -= step;
    const auto fp = eval(xp), fm = eval(xm);
    for (std::size_t i = 0; i < 8; ++i)
      out.matrix[i][k] = (fp[i] - fm[i]) / (2.0 * step);
  }
  out.determinant = det(out.matrix);
  return out;
}

struct JacobianReport {
  double closed_form{};
  double numeric{};
  double relative_gap{};
};

template <class Scene>
JacobianReport jacobian_report(const Scene& s, double step = tol::fd_step) {
  JacobianReport r;
  if constexpr (std::is_same_v<Scene, Scene2D>)
    r.closed_form = jacobian_det_2d(s);
  else
    r.closed_form = jacobian_det_3d(s);
  r.numeric = jacobian_numeric(s, step).determinant;
  r.relative_gap =
      std::abs(r.closed_form - r.numeric) / std::max(1.0, std::abs(r.closed_form));
  return r;
}

}  // namespace ullman
