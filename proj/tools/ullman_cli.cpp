// Command-line surface: scene generation, projection, reconstruction,
// feasibility checks, the dimension-count table, and SVG plots.
//
// Exit codes: 0 solved, 2 infeasible, 3 degenerate, 1 usage/schema/IO error.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "ullman/json_io.hpp"
#include "ullman/svg.hpp"
#include "ullman/ullman.hpp"

namespace {

constexpr int exit_solved = 0;
constexpr int exit_error = 1;
constexpr int exit_infeasible = 2;
constexpr int exit_degenerate = 3;

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw ullman::io::SchemaError("cannot write " + path);
  out << text;
}

int cmd_generate(std::uint64_t seed, int dim, const std::string& out_path,
                 const std::string& plot_path) {
  using namespace ullman;
  io::json j;
  std::string svg_text;
  if (dim == 2) {
    const Scene2D s = oracle::random_scene_2d(seed);
    j = io::to_json(s);
    svg_text = svg::render(s);
  } else {
    const Scene3D s = oracle::random_scene_3d(seed);
    j = io::to_json(s);
    svg_text = svg::render(s);
  }
  io::save_file(out_path, j);
  if (!plot_path.empty()) write_text(plot_path, svg_text);
  return exit_solved;
}

int cmd_project(const std::string& in_path, const std::string& out_path) {
  using namespace ullman;
  const io::json j = io::load_file(in_path);
  if (j.value("schema", "") == "scene2d/1")
    io::save_file(out_path, io::to_json(project_2d(io::scene2d_from_json(j))));
  else if (j.value("schema", "") == "scene3d/1")
    io::save_file(out_path, io::to_json(project_3d(io::scene3d_from_json(j))));
  else
    throw io::SchemaError("expected a scene file");
  return exit_solved;
}

int cmd_reconstruct(const std::string& in_path, const std::string& out_path,
                    double tol, const std::string& plot_path) {
  using namespace ullman;
  const io::json j = io::load_file(in_path);
  const std::string schema = j.value("schema", "");
  if (schema == "image2d/1") {
    const auto res = invert_2d(io::image2d_from_json(j), tol);
    if (!out_path.empty()) io::save_file(out_path, io::to_json(res.set));
    if (!plot_path.empty()) write_text(plot_path, svg::render(res.set));
    std::cout << "candidates: " << res.set.candidates.size() << "\n";
    if (res.outcome == ReconstructOutcome::infeasible) return exit_infeasible;
    if (res.outcome == ReconstructOutcome::degenerate) return exit_degenerate;
    return exit_solved;
  }
  if (schema == "image3d/1") {
    const auto res = reconstruct_3d(io::image3d_from_json(j), tol);
    if (!out_path.empty()) io::save_file(out_path, io::to_json(res.set));
    if (!plot_path.empty()) write_text(plot_path, svg::render(res.set));
    std::cout << "candidates: " << res.set.candidates.size() << "\n";
    if (res.outcome == Reconstruct3DOutcome::infeasible) return exit_infeasible;
    if (res.outcome == Reconstruct3DOutcome::degenerate_configuration)
      return exit_degenerate;
    return exit_solved;
  }
  throw io::SchemaError("expected an image-data file");
}

ullman::io::json pair_report_json(const ullman::PairCoefficients& k) {
  using namespace ullman;
  const auto rep = ullman_pair_solvable(k);
  io::json arcs = io::json::array();
  for (const auto& a : rep.interval.arcs)
    arcs.push_back({{"start", a.start}, {"length", a.length}});
  std::string verdict = "zero_denominator";
  if (rep.outcome == SolvableOutcome::solvable) verdict = "solvable";
  if (rep.outcome == SolvableOutcome::unsolvable) verdict = "unsolvable";
  return {{"coefficients", {k.a, k.b, k.c, k.d, k.e, k.f, k.g, k.h}},
          {"solvable", verdict},
          {"target_angle", rep.target},
          {"interval", {{"full_circle", rep.interval.full_circle},
                        {"arcs", arcs}}}};
}

int cmd_check(const std::string& in_path, const std::string& out_path) {
  using namespace ullman;
  const io::json j = io::load_file(in_path);
  const std::string schema = j.value("schema", "");
  io::json report{{"schema", "feasibility/1"}};
  bool all_solvable = true;
  if (schema == "image3d/1") {
    const ImageData3D d = io::image3d_from_json(j);
    io::json pairs = io::json::array();
    for (const auto& [ci, cj] : {std::pair{1, 2}, {1, 3}, {2, 3}}) {
      io::json r = pair_report_json(pair_coefficients(d, ci, cj));
      r["cameras"] = {ci, cj};
      all_solvable = all_solvable && r["solvable"] == "solvable";
      pairs.push_back(std::move(r));
    }
    report["pairs"] = std::move(pairs);
  } else if (schema == "ullman_pair/1") {
    const auto& c = j.at("coeffs");
    const PairCoefficients k{c.at(0), c.at(1), c.at(2), c.at(3),
                             c.at(4), c.at(5), c.at(6), c.at(7)};
    io::json r = pair_report_json(k);
    all_solvable = r["solvable"] == "solvable";
    report["pairs"] = io::json::array({std::move(r)});
  } else {
    throw io::SchemaError("expected image3d or ullman_pair data");
  }
  if (!out_path.empty()) io::save_file(out_path, report);
  std::cout << (all_solvable ? "solvable" : "unsolvable") << "\n";
  return all_solvable ? exit_solved : exit_infeasible;
}

int cmd_dims(int max_d, int max_m, const std::string& out_path) {
  using namespace ullman;
  const auto rows = dims_table(max_d, max_m);
  // aligned text table
  std::printf("%-6s %-18s", "dim", "n(m)");
  for (int m = 2; m <= max_m; ++m) std::printf(" n(%d)", m);
  std::printf("\n");
  const char* formulas[] = {"(2m-3)/(m-2)", "(5m-6)/(2m-3)", "(9m-10)/(3m-4)"};
  for (int d = 2; d <= max_d; ++d) {
    std::printf("%-6d %-18s", d,
                d - 2 < 3 ? formulas[d - 2] : "(mf-g)/((d-1)m-d)");
    for (const auto& r : rows)
      if (r.d == d)
        std::printf(" %4s",
                    r.finite ? std::to_string(r.ceiling).c_str() : "-");
    std::printf("\n");
  }
  if (!out_path.empty()) {
    io::json jr = io::json::array();
    for (const auto& r : rows) {
      io::json row{{"d", r.d}, {"m", r.m}};
      row["entry"] = r.finite ? std::to_string(r.ceiling) : "-";
      if (r.finite)
        row["exact"] = std::to_string(r.num) + "/" + std::to_string(r.den);
      jr.push_back(std::move(row));
    }
    io::save_file(out_path, io::json{{"schema", "dims/1"}, {"rows", jr}});
  }
  return exit_solved;
}

int cmd_plot(const std::string& in_path, const std::string& out_path) {
  using namespace ullman;
  const io::json j = io::load_file(in_path);
  const std::string schema = j.value("schema", "");
  std::string text;
  if (schema == "scene2d/1") {
    text = svg::render(io::scene2d_from_json(j));
  } else if (schema == "scene3d/1") {
    text = svg::render(io::scene3d_from_json(j));
  } else if (schema == "candidates2d/1" || schema == "candidates3d/1") {
    const bool is2d = schema == "candidates2d/1";
    if (is2d) {
      CandidateSet<Scene2D> set;
      for (const auto& c : j.at("candidates"))
        set.candidates.push_back(
            {io::scene2d_from_json(c.at("scene")), c.at("residual")});
      text = svg::render(set);
    } else {
      CandidateSet<Scene3D> set;
      for (const auto& c : j.at("candidates"))
        set.candidates.push_back(
            {io::scene3d_from_json(c.at("scene")), c.at("residual")});
      text = svg::render(set);
    }
  } else {
    throw io::SchemaError("expected a scene or candidate file");
  }
  write_text(out_path, text);
  return exit_solved;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"orthographic three-point three-camera structure from motion"};
  app.require_subcommand(1);

  std::uint64_t seed = 0;
  int dim = 2;
  double tolerance = ullman::tol::residual;
  std::string in_path, out_path, plot_path;

  auto* gen = app.add_subcommand("generate", "write a random nondegenerate scene");
  gen->add_option("--seed", seed, "deterministic seed");
  gen->add_option("--dim", dim, "scene dimension")->check(CLI::IsMember({2, 3}));
  gen->add_option("--out", out_path, "scene file")->required();
  gen->add_option("--plot", plot_path, "also write an SVG");

  auto* proj = app.add_subcommand("project", "project a scene to image data");
  proj->add_option("--in", in_path, "scene file")->required();
  proj->add_option("--out", out_path, "image-data file")->required();

  auto* rec = app.add_subcommand("reconstruct", "invert image data");
  rec->add_option("--in", in_path, "image-data file")->required();
  rec->add_option("--out", out_path, "candidate-set file");
  rec->add_option("--tol", tolerance, "residual acceptance tolerance");
  rec->add_option("--plot", plot_path, "also write an SVG");

  auto* chk = app.add_subcommand("check", "pair-solvability report");
  chk->add_option("--in", in_path, "image-data or pair-coefficients file")
      ->required();
  chk->add_option("--out", out_path, "report file");

  int max_d = 4, max_m = 4;
  auto* dims = app.add_subcommand("dims", "dimension-count table");
  dims->add_option("--max-d", max_d, "largest dimension")->check(CLI::Range(2, 8));
  dims->add_option("--max-m", max_m, "largest camera count")->check(CLI::Range(2, 12));
  dims->add_option("--out", out_path, "structured rows file");

  auto* plt = app.add_subcommand("plot", "render a scene or candidate set");
  plt->add_option("--in", in_path, "scene or candidate file")->required();
  plt->add_option("--out", out_path, "SVG file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : exit_error;  // usage problems exit 1, help exits 0
  }

  try {
    if (gen->parsed()) return cmd_generate(seed, dim, out_path, plot_path);
    if (proj->parsed()) return cmd_project(in_path, out_path);
    if (rec->parsed())
      return cmd_reconstruct(in_path, out_path, tolerance, plot_path);
    if (chk->parsed()) return cmd_check(in_path, out_path);
    if (dims->parsed()) return cmd_dims(max_d, max_m, out_path);
    if (plt->parsed()) return cmd_plot(in_path, out_path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_error;
  }
  return exit_error;
}
