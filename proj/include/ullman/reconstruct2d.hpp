#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <vector>

#include "ullman/core.hpp"
#include "ullman/forward.hpp"
#include "ullman/scene.hpp"

namespace ullman {

enum class ReconstructOutcome {
  solved,
  infeasible,   // data outside the image of the forward map
  degenerate,   // data on the image of the det(DF)=0 set
};

struct Invert2DResult {
  ReconstructOutcome outcome = ReconstructOutcome::infeasible;
  CandidateSet<Scene2D> set;
};

namespace detail {

// Closed-form cos(alpha); callers pass P2's readings as (a2, a3) and P3's as
// (b2, b3). The printed formula's b/c slots take P2's camera-3 reading and
// P3's camera-2 reading respectively.
inline std::optional<double> cos_alpha_formula(double u, double v, double a2,
                                               double a3, double b2, double b3,
                                               double scale) {
  const double a = a2, b = a3, c = b2, d = b3;
  const double num = (-c * c + d * d) * u * u + 2 * a * c * u * v -
                     2 * b * d * (a * c + u * v) + a * a * (d * d - v * v) +
                     b * b * (c * c + v * v);
  const double den = 2 * (b * c - a * d) * (-d * u + b * v);
  if (near_zero(den, std::abs(num) + scale * scale, tol::degeneracy * scale))
    return std::nullopt;
  return num / den;
}

inline std::optional<double> cos_beta_formula(double u, double v, double a2,
                                              double a3, double b2, double b3,
                                              double scale) {
  const double a = a2, b = a3, c = b2, d = b3;
  const double num = (c * c - d * d) * u * u - 2 * a * c * u * v +
                     2 * b * d * (-a * c + u * v) + b * b * (c * c - v * v) +
                     a * a * (d * d + v * v);
  const double den = 2 * (b * c - a * d) * (c * u - a * v);
  if (near_zero(den, std::abs(num) + scale * scale, tol::degeneracy * scale))
    return std::nullopt;
  return num / den;
}

// Ratio G = sin(beta)/sin(alpha) shared by every solution, plus the affine
// relation cos(beta) = E + G cos(alpha). Completes one cosine from the other
// when a formula denominator vanishes spuriously.
struct CosRelation {
  double G{}, E{};
  bool valid = false;
};

inline CosRelation cos_relation(const ImageData2D& d) {
  CosRelation r;
  const double den = d.b * d.u - d.a * d.v;
  const double scale = d.scale();
  if (near_zero(den, scale * scale, tol::degeneracy)) return r;
  r.G = (d.d * d.u - d.c * d.v) / den;
  if (std::abs(d.u) >= std::abs(d.v)) {
    if (near_zero(d.u, scale, tol::degeneracy)) return r;
    r.E = (d.c - r.G * d.a) / d.u;
  } else {
    r.E = (d.d - r.G * d.b) / d.v;
  }
  r.valid = true;
  return r;
}

inline double reprojection_gap(const Scene2D& s, const ImageData2D& d) {
  const ImageData2D r = project_2d(s);
  return std::max({std::abs(r.a - d.a), std::abs(r.b - d.b),
                   std::abs(r.c - d.c), std::abs(r.d - d.d)});
}

}  // namespace detail

// Closed-form inversion of the 2D map. Generates candidate (alpha, beta)
// pairs from the printed formulas (falling back to the sin(beta)=G sin(alpha)
// relation when a denominator vanishes spuriously), expands all sine sign
// branches, and keeps candidates whose forward projection matches the data.
inline Invert2DResult invert_2d(const ImageData2D& d,
                                double accept_tol = tol::residual) {
  if (!(accept_tol > 0.0)) throw std::invalid_argument("tol must be > 0");
  Invert2DResult out;
  const double scale = d.scale();

  // bc - ad = (uq - vp) sin(alpha-beta): the data-side degeneracy signal.
  const double bc_ad = d.b * d.c - d.a * d.d;
  if (near_zero(bc_ad, scale * scale, tol::degeneracy)) {
    out.outcome = ReconstructOutcome::degenerate;
    return out;
  }

  const auto ca_direct =
      detail::cos_alpha_formula(d.u, d.v, d.a, d.c, d.b, d.d, scale);
  const auto cb_direct =
      detail::cos_beta_formula(d.u, d.v, d.a, d.c, d.b, d.d, scale);
  const auto rel = detail::cos_relation(d);

  std::vector<std::pair<double, double>> cos_pairs;
  const auto push_pair = [&cos_pairs](double ca, double cb) {
    for (const auto& [pca, pcb] : cos_pairs)
      if (std::abs(pca - ca) <= 1e-9 && std::abs(pcb - cb) <= 1e-9) return;
    cos_pairs.emplace_back(ca, cb);
  };
  if (ca_direct && cb_direct) push_pair(*ca_direct, *cb_direct);
  if (rel.valid && ca_direct && std::abs(rel.G) > tol::algebraic)
    push_pair(*ca_direct, rel.E + rel.G * *ca_direct);
  if (rel.valid && cb_direct && std::abs(rel.G) > tol::algebraic)
    push_pair((*cb_direct - rel.E) / rel.G, *cb_direct);

  if (cos_pairs.empty()) {
    // Neither formula has a usable denominator and the relation is gone too.
    out.outcome = ReconstructOutcome::degenerate;
    return out;
  }

  bool saw_out_of_range = false;
  bool saw_boundary = false;
  std::vector<Candidate<Scene2D>> kept;
  for (const auto& [ca, cb] : cos_pairs) {
    if (std::abs(ca) > 1.0 || std::abs(cb) > 1.0) {
      saw_out_of_range = true;
      continue;
    }
    const double sa_mag = std::sqrt(std::max(0.0, 1.0 - ca * ca));
    const double sb_mag = std::sqrt(std::max(0.0, 1.0 - cb * cb));
    if (sa_mag <= tol::degeneracy || sb_mag <= tol::degeneracy) {
      saw_boundary = true;  // a camera collides with camera 1
      continue;
    }
    for (const double sa : {sa_mag, -sa_mag})
      for (const double sb : {sb_mag, -sb_mag}) {
        Scene2D s;
        s.u = d.u;
        s.v = d.v;
        s.alpha = std::atan2(sa, ca);
        s.beta = std::atan2(sb, cb);
        s.p = (d.a - d.u * ca) / sa;
        s.q = (d.b - d.v * ca) / sa;
        const double gap = detail::reprojection_gap(s, d);
        if (gap <= accept_tol * scale) {
          bool dup = false;
          for (const auto& k : kept)
            if (k.scene.max_abs_diff(s) <= 1e-7) dup = true;
          if (!dup) kept.push_back({s, gap});
        }
      }
  }

  std::sort(kept.begin(), kept.end(), [](const auto& l, const auto& r) {
    if (l.residual != r.residual) return l.residual < r.residual;
    return l.scene.alpha < r.scene.alpha;
  });

  out.set.candidates = std::move(kept);
  if (out.set.candidates.empty()) {
    out.outcome = (saw_boundary && !saw_out_of_range)
                      ? ReconstructOutcome::degenerate
                      : ReconstructOutcome::infeasible;
    return out;
  }
  out.outcome = ReconstructOutcome::solved;
  if (out.set.candidates.size() == 2)
    out.set.ambiguity_note = AmbiguityNote::mirror_paired;
  else
    out.set.ambiguity_note = AmbiguityNote::single;
  return out;
}

// Inverse of the forward map restricted to the surface where P2 vanishes in
// camera 2, P3 vanishes in camera 3, and P2's camera-3 reading equals u.
// Parameters: u = b is that shared reading, c is P3's camera-2 reading.
// With D = v / (2c):
//   alpha = arccos(D)
//   beta  = -sign(D) arccos(1 - 2 D^2)
//   p     = -b D / sqrt(1 - D^2)
//   q     = (2 c^2 - v^2) / (2 c sqrt(1 - D^2))
// Real exactly when |D| <= 1.
struct SpecialSurfaceResult {
  ReconstructOutcome outcome = ReconstructOutcome::infeasible;
  Scene2D scene{};
  double D{};
  ImageData2D surface_data{};  // the data the scene must reproject to
};

inline SpecialSurfaceResult special_surface_inverse(double u, double v,
                                                    double b, double c) {
  if (c == 0.0) throw std::invalid_argument("special surface requires c != 0");
  SpecialSurfaceResult out;
  out.D = v / (2.0 * c);
  const double D = out.D;

  out.surface_data.u = u;
  out.surface_data.v = v;
  out.surface_data.a = 0.0;   // P2 in camera 2
  out.surface_data.c = b;     // P2 in camera 3 (= u on the surface)
  out.surface_data.b = c;     // P3 in camera 2
  out.surface_data.d = 0.0;   // P3 in camera 3

  if (std::abs(D) > 1.0) {
    out.outcome = ReconstructOutcome::infeasible;
    return out;
  }
  const double one_minus = 1.0 - D * D;
  if (one_minus <= tol::algebraic) {
    out.outcome = ReconstructOutcome::degenerate;
    return out;
  }
  const double root = std::sqrt(one_minus);
  Scene2D s;
  s.u = u;
  s.v = v;
  s.alpha = std::acos(D);
  s.beta = (D >= 0.0 ? -1.0 : 1.0) * std::acos(1.0 - 2.0 * D * D);
  s.p = -b * D / root;
  s.q = (2.0 * c * c - v * v) / (2.0 * c * root);
  if (std::abs(s.beta) <= tol::degeneracy) {
    // D = 0 puts camera 3 onto camera 1
    out.scene = s;
    out.outcome = ReconstructOutcome::degenerate;
    return out;
  }
  out.scene = s;
  out.outcome = ReconstructOutcome::solved;
  return out;
}

// The two relations every solution satisfies: sin(beta) = G sin(alpha) and
// cos(beta) = (A + B cos(alpha)) / (C + D cos(alpha)). Both are invariant
// under the mirror sign flip.
struct MobiusAnalysis {
  bool degenerate = true;
  double G{};
  double A{}, B{}, C{}, D{};
};

inline MobiusAnalysis mobius_analysis(const ImageData2D& d) {
  MobiusAnalysis m;
  const double scale = d.scale();
  // The map s -> (c - a s)/(d - b s) sending sin(beta)/sin(alpha) to u/v is
  // invertible only when bc - ad != 0.
  if (near_zero(d.b * d.c - d.a * d.d, scale * scale, tol::degeneracy))
    return m;
  const double den = d.b * d.u - d.a * d.v;
  if (near_zero(den, scale * scale, tol::degeneracy)) return m;
  m.G = (d.d * d.u - d.c * d.v) / den;
  if (std::abs(d.u) >= std::abs(d.v)) {
    if (near_zero(d.u, scale, tol::degeneracy)) return m;
    m.A = d.c - m.G * d.a;
    m.B = m.G * d.u;
    m.C = d.u;
  } else {
    m.A = d.d - m.G * d.b;
    m.B = m.G * d.v;
    m.C = d.v;
  }
  m.D = 0.0;  // the relation is affine in cos(alpha) once G is substituted
  m.degenerate = false;
  return m;
}

}  // namespace ullman
