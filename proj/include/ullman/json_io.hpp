#pragma once

#include <fstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "ullman/reconstruct2d.hpp"
#include "ullman/reconstruct3d.hpp"
#include "ullman/scene.hpp"

// Versioned JSON schemas for scenes, image data, and candidate sets. Field
// names mirror the domain types; every document carries a "schema" tag.

namespace ullman::io {

using nlohmann::json;

struct SchemaError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline void require_schema(const json& j, const std::string& want) {
  if (!j.is_object() || !j.contains("schema") || j["schema"] != want)
    throw SchemaError("expected schema \"" + want + "\"");
}

inline json to_json(const Scene2D& s) {
  return {{"schema", "scene2d/1"}, {"u", s.u},     {"v", s.v},
          {"p", s.p},              {"q", s.q},     {"alpha", s.alpha},
          {"beta", s.beta}};
}

inline Scene2D scene2d_from_json(const json& j) {
  require_schema(j, "scene2d/1");
  return {j.at("u"), j.at("v"), j.at("p"), j.at("q"), j.at("alpha"), j.at("beta")};
}

inline json to_json(const ImageData2D& d) {
  return {{"schema", "image2d/1"}, {"u", d.u}, {"v", d.v}, {"a", d.a},
          {"b", d.b},              {"c", d.c}, {"d", d.d}};
}

inline ImageData2D image2d_from_json(const json& j) {
  require_schema(j, "image2d/1");
  return {j.at("u"), j.at("v"), j.at("a"), j.at("b"), j.at("c"), j.at("d")};
}

inline json to_json(const EulerFrame& f) {
  return {{"theta", f.theta},
          {"phi", f.phi},
          {"gamma", f.gamma},
          {"p_vec", {f.p_vec.x, f.p_vec.y, f.p_vec.z}},
          {"q_vec", {f.q_vec.x, f.q_vec.y, f.q_vec.z}}};
}

inline EulerFrame frame_from_json(const json& j) {
  return frame_from_angles(j.at("theta"), j.at("phi"), j.at("gamma"));
}

inline json to_json(const Scene3D& s) {
  return {{"schema", "scene3d/1"},
          {"P2", {s.P2.x, s.P2.y, s.P2.z}},
          {"P3", {s.P3.x, s.P3.y, s.P3.z}},
          {"cam2", to_json(s.cam2)},
          {"cam3", to_json(s.cam3)}};
}

inline Scene3D scene3d_from_json(const json& j) {
  require_schema(j, "scene3d/1");
  Scene3D s;
  s.P2 = {j.at("P2").at(0), j.at("P2").at(1), j.at("P2").at(2)};
  s.P3 = {j.at("P3").at(0), j.at("P3").at(1), j.at("P3").at(2)};
  s.cam2 = frame_from_json(j.at("cam2"));
  s.cam3 = frame_from_json(j.at("cam3"));
  return s;
}

inline json to_json(const ImageData3D& d) {
  return {{"schema", "image3d/1"},
          {"xy", {{d.xy[0].x, d.xy[0].y}, {d.xy[1].x, d.xy[1].y}}},
          {"a", {{d.a[0][0], d.a[0][1]}, {d.a[1][0], d.a[1][1]}}},
          {"b", {{d.b[0][0], d.b[0][1]}, {d.b[1][0], d.b[1][1]}}}};
}

inline ImageData3D image3d_from_json(const json& j) {
  require_schema(j, "image3d/1");
  ImageData3D d;
  for (int i = 0; i < 2; ++i) {
    d.xy[i] = {j.at("xy").at(i).at(0), j.at("xy").at(i).at(1)};
    for (int k = 0; k < 2; ++k) {
      d.a[i][k] = j.at("a").at(i).at(k);
      d.b[i][k] = j.at("b").at(i).at(k);
    }
  }
  return d;
}

inline const char* ambiguity_name(AmbiguityNote n) {
  switch (n) {
    case AmbiguityNote::empty: return "empty";
    case AmbiguityNote::single: return "single";
    case AmbiguityNote::mirror_paired: return "mirror_paired";
  }
  return "empty";
}

template <class Scene>
json candidates_to_json(const CandidateSet<Scene>& set, const char* schema) {
  json arr = json::array();
  for (const auto& c : set.candidates)
    arr.push_back({{"scene", to_json(c.scene)}, {"residual", c.residual}});
  return {{"schema", schema},
          {"candidates", arr},
          {"ambiguity_note", ambiguity_name(set.ambiguity_note)}};
}

inline json to_json(const CandidateSet<Scene2D>& s) {
  return candidates_to_json(s, "candidates2d/1");
}
inline json to_json(const CandidateSet<Scene3D>& s) {
  return candidates_to_json(s, "candidates3d/1");
}

inline json load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot open " + path);
  json j;
  in >> j;
  return j;
}

inline void save_file(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw SchemaError("cannot write " + path);
  out << j.dump(2) << "\n";
}

}  // namespace ullman::io
