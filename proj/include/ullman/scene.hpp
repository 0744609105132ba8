#pragma once

#include <cmath>
#include <vector>

#include "ullman/core.hpp"

namespace ullman {

// All scenes use normalized coordinates: the first point sits at the origin
// and the first camera is the x-axis (2D) or the xy-plane (3D). That gauge
// removes the Euclidean symmetry of the problem, so a 2D scene is the four
// unknowns (p, q, alpha, beta) plus the known abscissas (u, v).
struct Scene2D {
  double u{}, v{};          // known x-coordinates of P2, P3 (camera-1 readings)
  double p{}, q{};          // y-ordinates of P2, P3
  double alpha{}, beta{};   // camera 2 / camera 3 angles, radians, in (-pi, pi]

  double max_abs_diff(const Scene2D& o) const {
    return std::max({std::abs(p - o.p), std::abs(q - o.q),
                     angle_dist(alpha, o.alpha), angle_dist(beta, o.beta),
                     std::abs(u - o.u), std::abs(v - o.v)});
  }
};

// Measurements of the three cameras. Variable convention: a and c are the
// camera-2 and camera-3 readings of P2; b and d those of P3.
struct ImageData2D {
  double u{}, v{};          // camera-1 readings (the points' x-coordinates)
  double a{}, b{}, c{}, d{};

  double scale() const {
    return std::max({1.0, std::abs(u), std::abs(v), std::abs(a), std::abs(b),
                     std::abs(c), std::abs(d)});
  }
};

// Orthonormal camera frame from the Euler-angle parametrization.
struct EulerFrame {
  double theta{}, phi{}, gamma{};
  Vec3 p_vec{1.0, 0.0, 0.0};
  Vec3 q_vec{0.0, 1.0, 0.0};

  Vec3 normal() const { return p_vec.cross(q_vec); }
};

inline EulerFrame frame_from_angles(double theta, double phi, double gamma) {
  const double ct = std::cos(theta), st = std::sin(theta);
  const double cp = std::cos(phi), sp = std::sin(phi);
  const double cg = std::cos(gamma), sg = std::sin(gamma);
  EulerFrame f;
  f.theta = theta;
  f.phi = phi;
  f.gamma = gamma;
  f.p_vec = {cg * ct - cp * sg * st, -cp * ct * sg - cg * st, sg * sp};
  f.q_vec = {ct * sg + cg * cp * st, cg * cp * ct - sg * st, -cg * sp};
  return f;
}

// Euler angles from an orthonormal pair (p, q). The frame normal is
// n = (sin phi sin theta, sin phi cos theta, cos phi), which pins theta and
// phi away from the gimbal locus; gamma then comes from the z-components.
inline EulerFrame frame_from_vectors(const Vec3& p, const Vec3& q) {
  const Vec3 n = p.cross(q);
  const double sp = std::hypot(n.x, n.y);
  double theta, phi, gamma;
  if (sp > 1e-14) {
    phi = std::atan2(sp, n.z);
    theta = std::atan2(n.x, n.y);
    gamma = std::atan2(p.z / sp, -q.z / sp);
  } else {  // gimbal: the frame lies in the xy-plane or its flip
    phi = n.z > 0.0 ? 0.0 : pi;
    gamma = 0.0;
    theta = std::atan2(-p.y, p.x);
  }
  return frame_from_angles(theta, phi, gamma);
}

struct Scene3D {
  Vec3 P2{}, P3{};          // x,y known from camera 1; z components are the depths
  EulerFrame cam2{}, cam3{};

  double z1() const { return P2.z; }
  double z2() const { return P3.z; }

  // Max-norm distance over depths and frame vectors (angle triples are not
  // compared directly; distinct triples can describe the same frame).
  double max_abs_diff(const Scene3D& o) const {
    return std::max({P2.max_abs_diff(o.P2), P3.max_abs_diff(o.P3),
                     cam2.p_vec.max_abs_diff(o.cam2.p_vec),
                     cam2.q_vec.max_abs_diff(o.cam2.q_vec),
                     cam3.p_vec.max_abs_diff(o.cam3.p_vec),
                     cam3.q_vec.max_abs_diff(o.cam3.q_vec)});
  }
};

// a[i][j] = P_(i+2) . q_(j+2), b[i][j] = P_(i+2) . p_(j+2); xy are the
// camera-1 readings of P2, P3.
struct ImageData3D {
  Vec2 xy[2]{};
  double a[2][2]{};
  double b[2][2]{};

  double scale() const {
    double s = 1.0;
    for (int i = 0; i < 2; ++i) {
      s = std::max({s, std::abs(xy[i].x), std::abs(xy[i].y)});
      for (int j = 0; j < 2; ++j) s = std::max({s, std::abs(a[i][j]), std::abs(b[i][j])});
    }
    return s;
  }
};

// Per-flag nondegeneracy report; the flags are exactly the vanishing factors
// of the forward map's Jacobian determinant.
struct DegeneracyReport2D {
  bool camera2_is_camera1 = false;   // sin(alpha) = 0
  bool camera3_is_camera1 = false;   // sin(beta) = 0
  bool cameras_coincide = false;     // sin(alpha - beta) = 0
  bool points_collinear = false;     // u q - v p = 0

  bool degenerate() const {
    return camera2_is_camera1 || camera3_is_camera1 || cameras_coincide ||
           points_collinear;
  }
};

inline DegeneracyReport2D validate_scene(const Scene2D& s,
                                         double eps = tol::degeneracy) {
  DegeneracyReport2D r;
  r.camera2_is_camera1 = std::abs(std::sin(s.alpha)) <= eps;
  r.camera3_is_camera1 = std::abs(std::sin(s.beta)) <= eps;
  r.cameras_coincide = std::abs(std::sin(s.alpha - s.beta)) <= eps;
  const double scale = std::hypot(s.u, s.p) * std::hypot(s.v, s.q);
  r.points_collinear = std::abs(s.u * s.q - s.v * s.p) <= eps * (1.0 + scale);
  return r;
}

struct DegeneracyReport3D {
  bool camera2_is_camera1 = false;   // plane 2 equals the xy-plane
  bool camera3_is_camera1 = false;
  bool cameras_coincide = false;     // planes 2 and 3 coincide
  bool points_collinear = false;     // O, P2, P3 collinear

  bool degenerate() const {
    return camera2_is_camera1 || camera3_is_camera1 || cameras_coincide ||
           points_collinear;
  }
};

inline DegeneracyReport3D validate_scene(const Scene3D& s,
                                         double eps = tol::degeneracy) {
  DegeneracyReport3D r;
  const Vec3 ez{0.0, 0.0, 1.0};
  const Vec3 n2 = s.cam2.normal();
  const Vec3 n3 = s.cam3.normal();
  r.camera2_is_camera1 = n2.cross(ez).norm() <= eps;
  r.camera3_is_camera1 = n3.cross(ez).norm() <= eps;
  r.cameras_coincide = n2.cross(n3).norm() <= eps;
  const double scale = s.P2.norm() * s.P3.norm();
  r.points_collinear = s.P2.cross(s.P3).norm() <= eps * (1.0 + scale);
  return r;
}

// The reflection ambiguity in the fixed gauge: conjugation by the mirror
// across the first camera. 2D: (p,q,alpha,beta) -> (-p,-q,-alpha,-beta).
inline Scene2D mirror_scene(const Scene2D& s) {
  return {s.u, s.v, -s.p, -s.q, wrap_angle(-s.alpha), wrap_angle(-s.beta)};
}

// 3D: reflect across the xy-plane; depths and frame z-components flip.
inline Scene3D mirror_scene(const Scene3D& s) {
  const auto flip = [](const EulerFrame& f) {
    const Vec3 p{f.p_vec.x, f.p_vec.y, -f.p_vec.z};
    const Vec3 q{f.q_vec.x, f.q_vec.y, -f.q_vec.z};
    return frame_from_vectors(p, q);
  };
  Scene3D m = s;
  m.P2.z = -m.P2.z;
  m.P3.z = -m.P3.z;
  m.cam2 = flip(s.cam2);
  m.cam3 = flip(s.cam3);
  return m;
}

template <class Scene>
struct Candidate {
  Scene scene{};
  double residual{};
};

// How the retained candidates pair up under the reflection ambiguity.
enum class AmbiguityNote {
  empty,          // no candidate survived
  single,         // one self-mirrored candidate
  mirror_paired,  // candidates come in mirror pairs
};

template <class Scene>
struct CandidateSet {
  std::vector<Candidate<Scene>> candidates;
  AmbiguityNote ambiguity_note = AmbiguityNote::empty;

  bool contains(const Scene& s, double eps) const {
    for (const auto& c : candidates)
      if (c.scene.max_abs_diff(s) <= eps) return true;
    return false;
  }
};

}  // namespace ullman
