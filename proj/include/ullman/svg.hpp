#pragma once

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "ullman/forward.hpp"
#include "ullman/scene.hpp"

// Deterministic SVG rendering of scenes and candidate sets: fixed canvas,
// fixed styling, fixed number formatting, so identical inputs produce
// byte-identical files.

namespace ullman::svg {

inline constexpr int canvas = 640;
inline constexpr double world_extent = 3.2;  // world units shown per half-axis

namespace detail {

inline std::string fmt(double x) {
  if (std::abs(x) < 5e-3) x = 0.0;  // avoid "-0.00"
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", x);
  return buf;
}

inline Vec2 to_canvas(Vec2 w) {
  const double s = canvas / (2.0 * world_extent);
  return {canvas / 2.0 + w.x * s, canvas / 2.0 - w.y * s};
}

// fixed oblique projection for 3D wireframes
inline Vec2 axono(const Vec3& w) {
  return to_canvas({w.x - 0.38 * w.z, w.y - 0.26 * w.z});
}

inline void line(std::ostringstream& o, Vec2 a, Vec2 b, const char* cls) {
  o << "  <line class=\"" << cls << "\" x1=\"" << fmt(a.x) << "\" y1=\""
    << fmt(a.y) << "\" x2=\"" << fmt(b.x) << "\" y2=\"" << fmt(b.y) << "\"/>\n";
}

inline void dot(std::ostringstream& o, Vec2 c, const char* cls) {
  o << "  <circle class=\"" << cls << "\" cx=\"" << fmt(c.x) << "\" cy=\""
    << fmt(c.y) << "\" r=\"4\"/>\n";
}

inline void header(std::ostringstream& o) {
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << canvas
    << "\" height=\"" << canvas << "\" viewBox=\"0 0 " << canvas << " "
    << canvas << "\">\n"
    << "  <style>\n"
    << "    .bg{fill:#ffffff}.axis{stroke:#cccccc;stroke-width:1}\n"
    << "    .camera{stroke:#1f77b4;stroke-width:2}\n"
    << "    .ray{stroke:#999999;stroke-width:1;stroke-dasharray:4 3}\n"
    << "    .point{fill:#d62728}.origin{fill:#000000}\n"
    << "    .note{font:20px monospace;fill:#d62728}\n"
    << "  </style>\n"
    << "  <rect class=\"bg\" width=\"" << canvas << "\" height=\"" << canvas
    << "\"/>\n";
  line(o, to_canvas({-world_extent, 0}), to_canvas({world_extent, 0}), "axis");
  line(o, to_canvas({0, -world_extent}), to_canvas({0, world_extent}), "axis");
}

inline void scene2d_group(std::ostringstream& o, const Scene2D& s,
                          const char* cls) {
  o << "  <g class=\"" << cls << "\">\n";
  const Vec2 P2{s.u, s.p}, P3{s.v, s.q};
  for (const double ang : {s.alpha, s.beta}) {
    const Vec2 dir{std::cos(ang), std::sin(ang)};
    line(o, to_canvas(dir * -world_extent), to_canvas(dir * world_extent),
         "camera");
    for (const Vec2& P : {P2, P3})
      line(o, to_canvas(P), to_canvas(dir * P.dot(dir)), "ray");
  }
  for (const Vec2& P : {P2, P3}) line(o, to_canvas(P), to_canvas({P.x, 0}), "ray");
  dot(o, to_canvas({0, 0}), "origin");
  dot(o, to_canvas(P2), "point");
  dot(o, to_canvas(P3), "point");
  o << "  </g>\n";
}

inline void scene3d_group(std::ostringstream& o, const Scene3D& s,
                          const char* cls) {
  o << "  <g class=\"" << cls << "\">\n";
  const EulerFrame cam1 = frame_from_angles(0, 0, 0);
  for (const EulerFrame* f : {&cam1, &s.cam2, &s.cam3}) {
    const Vec3 corners[4] = {f->p_vec + f->q_vec, f->p_vec - f->q_vec,
                             (f->p_vec + f->q_vec) * -1.0,
                             f->q_vec - f->p_vec};
    for (int i = 0; i < 4; ++i)
      line(o, axono(corners[i] * 1.6), axono(corners[(i + 1) % 4] * 1.6),
           "camera");
    for (const Vec3& P : {s.P2, s.P3}) {
      const Vec3 foot = f->p_vec * P.dot(f->p_vec) + f->q_vec * P.dot(f->q_vec);
      line(o, axono(P), axono(foot), "ray");
    }
  }
  dot(o, axono({0, 0, 0}), "origin");
  dot(o, axono(s.P2), "point");
  dot(o, axono(s.P3), "point");
  o << "  </g>\n";
}

}  // namespace detail

inline std::string render(const Scene2D& s) {
  std::ostringstream o;
  detail::header(o);
  detail::scene2d_group(o, s, "scene");
  o << "</svg>\n";
  return o.str();
}

inline std::string render(const Scene3D& s) {
  std::ostringstream o;
  detail::header(o);
  detail::scene3d_group(o, s, "scene");
  o << "</svg>\n";
  return o.str();
}

template <class Scene>
std::string render(const CandidateSet<Scene>& set) {
  std::ostringstream o;
  detail::header(o);
  if (set.candidates.empty())
    o << "  <text class=\"note\" x=\"20\" y=\"40\">infeasible</text>\n";
  for (const auto& c : set.candidates) {
    if constexpr (std::is_same_v<Scene, Scene2D>)
      detail::scene2d_group(o, c.scene, "candidate");
    else
      detail::scene3d_group(o, c.scene, "candidate");
  }
  o << "</svg>\n";
  return o.str();
}

}  // namespace ullman::svg
