#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdlib>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "ullman/core.hpp"
#include "ullman/reconstruct3d.hpp"

namespace ullman {

// Closed arc on the circle: angles start .. start+length, start in (-pi, pi].
struct Arc {
  double start{};
  double length{};
};

// Realized set of angles arg((e^{i theta} - A)/(e^{i theta} - B)) as a union
// of closed arcs. The quotient map is continuous on the circle whenever A
// and B avoid it, so the set is in fact a single arc (or everything); the
// representation still supports unions.
struct AngleInterval {
  std::vector<Arc> arcs;       // normalized, disjoint, sorted by start
  bool full_circle = false;

  bool contains(double angle, double slack = 0.0) const {
    if (full_circle) return true;
    for (const auto& a : arcs) {
      const double off = wrap_angle(angle - a.start);
      const double pos = off < 0.0 ? off + two_pi : off;
      if (pos <= a.length + slack || pos >= two_pi - slack) return true;
    }
    return false;
  }

  double total_length() const {
    if (full_circle) return two_pi;
    double t = 0.0;
    for (const auto& a : arcs) t += a.length;
    return t;
  }
};

enum class IntervalOutcome { ok, pole_on_circle };

struct AngleIntervalResult {
  IntervalOutcome outcome = IntervalOutcome::ok;
  AngleInterval interval;
};

// Numeric realization: dense sampling of theta with the continuous lift of
// the argument tracked around the circle, then ternary refinement of the
// lift's extrema to 1e-6 angular resolution.
inline AngleIntervalResult angle_interval(std::complex<double> A,
                                          std::complex<double> B,
                                          int samples = 4096) {
  if (samples < 360) throw std::invalid_argument("samples must be >= 360");
  AngleIntervalResult out;
  if (std::abs(std::abs(A) - 1.0) <= tol::degeneracy ||
      std::abs(std::abs(B) - 1.0) <= tol::degeneracy) {
    out.outcome = IntervalOutcome::pole_on_circle;
    out.interval.full_circle = true;
    return out;
  }
  const auto value = [&](double theta) {
    const std::complex<double> z = std::polar(1.0, theta);
    return std::arg((z - A) / (z - B));
  };

  // continuous lift of the argument along theta
  double lift = value(0.0);
  double lo = lift, hi = lift;
  double theta_lo = 0.0, theta_hi = 0.0;
  double prev = lift;
  const double step = two_pi / samples;
  for (int i = 1; i <= samples; ++i) {
    const double th = i * step;
    const double raw = value(th);
    lift += wrap_angle(raw - wrap_angle(prev));
    prev = lift;
    if (lift < lo) {
      lo = lift;
      theta_lo = th;
    }
    if (lift > hi) {
      hi = lift;
      theta_hi = th;
    }
  }

  // refine each extremum by ternary search on the lift within one grid cell
  const auto refine = [&](double center, bool maximize) {
    double a = center - step, b = center + step;
    const double anchor_theta = a;
    const double anchor = value(anchor_theta);
    const auto lifted = [&](double th) {
      // within a single cell the argument moves by < pi, so unwrap locally
      double v = value(th);
      double d = wrap_angle(v - anchor);
      return anchor + d;
    };
    while (b - a > 1e-7) {
      const double m1 = a + (b - a) / 3.0, m2 = b - (b - a) / 3.0;
      const bool pick_right = maximize ? lifted(m1) < lifted(m2)
                                       : lifted(m1) > lifted(m2);
      if (pick_right) a = m1; else b = m2;
    }
    return lifted((a + b) / 2.0);
  };
  const double lo_ref = std::min(lo, refine(theta_lo, false));
  const double hi_ref = std::max(hi, refine(theta_hi, true));

  if (hi_ref - lo_ref >= two_pi - 1e-9) {
    out.interval.full_circle = true;
    return out;
  }
  Arc arc;
  arc.start = wrap_angle(lo_ref);
  arc.length = hi_ref - lo_ref;
  out.interval.arcs.push_back(arc);
  return out;
}

enum class SolvableOutcome { solvable, unsolvable, zero_denominator };

struct SolvabilityReport {
  SolvableOutcome outcome = SolvableOutcome::zero_denominator;
  double target = 0.0;          // the angle tested against the interval (mod pi)
  AngleInterval interval;       // I(conj(q)/p, conj(s)/r)
};

// Solvability of the pair equations by the angle-interval criterion: with
// p=a+ib, q=c+id, r=e+if, s=g+ih the system has a real solution exactly when
// the interval I(conj(q)/p, conj(s)/r) meets -arg(p/r) modulo pi.
inline SolvabilityReport ullman_pair_solvable(const PairCoefficients& k,
                                              int samples = 4096) {
  SolvabilityReport rep;
  const std::complex<double> p{k.a, k.b}, q{k.c, k.d}, r{k.e, k.f}, s{k.g, k.h};
  if (std::abs(p) <= tol::degeneracy || std::abs(r) <= tol::degeneracy) {
    rep.outcome = SolvableOutcome::zero_denominator;
    return rep;
  }
  // a near-circle A or B makes the argument sweep fast; sample densely enough
  // to track the lift through the spike
  const double gap = std::min(std::abs(std::abs(std::conj(q) / p) - 1.0),
                              std::abs(std::abs(std::conj(s) / r) - 1.0));
  if (gap > tol::degeneracy)
    samples = std::clamp(static_cast<int>(64.0 / gap), samples, 4000000);
  const auto ir = angle_interval(std::conj(q) / p, std::conj(s) / r, samples);
  rep.interval = ir.interval;
  rep.target = wrap_angle(-std::arg(p / r));
  const double slack = 2.0 * two_pi / samples;
  const bool in = ir.interval.contains(rep.target, slack) ||
                  ir.interval.contains(wrap_angle(rep.target + pi), slack);
  rep.outcome = in ? SolvableOutcome::solvable : SolvableOutcome::unsolvable;
  return rep;
}

// Dimension counting for n points and m orthographic cameras in dimension d:
// a camera contributes f = dim(SO_d) + (d-1) parameters (frame plus image
// offsets), the Euclidean symmetry removes g = d + dim(SO_d), and every
// point-camera pair yields d-1 measurements.
struct DimensionCount {
  int d{}, n{}, m{};
  long long f{}, g{};
  long long lhs{}, rhs{};
  bool tight = false;
};

inline DimensionCount sfm_inequality(int d, int n, int m) {
  if (d < 2 || n < 1 || m < 1)
    throw std::invalid_argument("require d >= 2, n >= 1, m >= 1");
  DimensionCount c;
  c.d = d;
  c.n = n;
  c.m = m;
  c.f = static_cast<long long>(d) * (d - 1) / 2 + (d - 1);
  c.g = d + static_cast<long long>(d) * (d - 1) / 2;
  c.lhs = static_cast<long long>(n) * d + m * c.f;
  c.rhs = static_cast<long long>(d - 1) * n * m + c.g;
  c.tight = c.lhs == c.rhs;
  return c;
}

// Point count balancing the dimension relation: n = (m f - g)/((d-1) m - d),
// reported as an exact rational plus its ceiling.
struct MinPoints {
  bool finite = false;
  long long num{}, den{};  // reduced, den > 0
  long long ceiling{};
};

inline MinPoints min_points(int d, int m) {
  if (d < 2 || m < 1) throw std::invalid_argument("require d >= 2, m >= 1");
  MinPoints out;
  const long long f = static_cast<long long>(d) * (d - 1) / 2 + (d - 1);
  const long long g = d + static_cast<long long>(d) * (d - 1) / 2;
  long long num = m * f - g;
  long long den = static_cast<long long>(d - 1) * m - d;
  if (den == 0) return out;  // no finite answer (e.g. d=2, m=2)
  if (den < 0) {
    num = -num;
    den = -den;
  }
  const long long gg = std::gcd(num, den);
  out.num = gg ? num / gg : num;
  out.den = gg ? den / gg : den;
  out.ceiling = (out.num + out.den - 1) / out.den;  // num >= 0 in the table range
  out.finite = true;
  return out;
}

struct DimsRow {
  int d{}, m{};
  bool finite = false;
  long long num{}, den{}, ceiling{};
};

inline std::vector<DimsRow> dims_table(int max_d, int max_m) {
  std::vector<DimsRow> rows;
  for (int d = 2; d <= max_d; ++d)
    for (int m = 2; m <= max_m; ++m) {
      const MinPoints mp = min_points(d, m);
      rows.push_back({d, m, mp.finite, mp.num, mp.den, mp.ceiling});
    }
  return rows;
}

}  // namespace ullman
