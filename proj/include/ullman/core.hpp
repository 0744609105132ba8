#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>

namespace ullman {

namespace tol {
// Tolerance ladder used throughout: algebraic identities, residual
// acceptance of reconstructed candidates, and degeneracy detection.
inline constexpr double algebraic = 1e-12;
inline constexpr double residual = 1e-9;
inline constexpr double degeneracy = 1e-6;
inline constexpr double fd_step = 1e-6;  // default central-difference step
}  // namespace tol

// Scale-aware zero test: |den| counts as zero relative to the terms feeding it.
inline bool near_zero(double value, double scale, double eps = tol::degeneracy) {
  return std::abs(value) <= eps * (1.0 + std::abs(scale));
}

struct Vec2 {
  double x{}, y{};

  constexpr Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
  constexpr Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
  constexpr Vec2 operator*(double s) const { return {x * s, y * s}; }
  constexpr double dot(Vec2 o) const { return x * o.x + y * o.y; }
  constexpr double cross(Vec2 o) const { return x * o.y - y * o.x; }
  double norm() const { return std::hypot(x, y); }
};

struct Vec3 {
  double x{}, y{}, z{};

  constexpr Vec3 operator+(Vec3 o) const { return {x + o.x, y + o.y, z + o.z}; }
  constexpr Vec3 operator-(Vec3 o) const { return {x - o.x, y - o.y, z - o.z}; }
  constexpr Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
  constexpr Vec3 operator-() const { return {-x, -y, -z}; }
  constexpr double dot(Vec3 o) const { return x * o.x + y * o.y + z * o.z; }
  constexpr Vec3 cross(Vec3 o) const {
    return {y * o.z - z * o.y, z * o.x - x * o.z, x * o.y - y * o.x};
  }
  double norm() const { return std::sqrt(dot(*this)); }
  Vec3 normalized() const {
    const double n = norm();
    return {x / n, y / n, z / n};
  }
  double max_abs_diff(Vec3 o) const {
    return std::max({std::abs(x - o.x), std::abs(y - o.y), std::abs(z - o.z)});
  }
};

inline constexpr double pi = 3.141592653589793238462643383279502884;
inline constexpr double two_pi = 2.0 * pi;

// Normalize an angle into (-pi, pi].
inline double wrap_angle(double a) {
  a = std::fmod(a, two_pi);
  if (a <= -pi) a += two_pi;
  if (a > pi) a -= two_pi;
  return a;
}

// Distance between two angles on the circle.
inline double angle_dist(double a, double b) {
  return std::abs(wrap_angle(a - b));
}

// Determinant by partial-pivot elimination; N is small (4 or 8) here.
template <std::size_t N>
double det(std::array<std::array<double, N>, N> m) {
  double sign = 1.0;
  for (std::size_t col = 0; col < N; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < N; ++r)
      if (std::abs(m[r][col]) > std::abs(m[piv][col])) piv = r;
    if (m[piv][col] == 0.0) return 0.0;
    if (piv != col) {
      std::swap(m[piv], m[col]);
      sign = -sign;
    }
    for (std::size_t r = col + 1; r < N; ++r) {
      const double f = m[r][col] / m[col][col];
      for (std::size_t c = col; c < N; ++c) m[r][c] -= f * m[col][c];
    }
  }
  double d = sign;
  for (std::size_t i = 0; i < N; ++i) d *= m[i][i];
  return d;
}

// In-place Gaussian elimination solve; returns false on a (near-)singular
// system.
template <std::size_t N>
bool solve_linear(std::array<std::array<double, N>, N> m,
                  std::array<double, N> rhs, std::array<double, N>& out) {
  for (std::size_t col = 0; col < N; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < N; ++r)
      if (std::abs(m[r][col]) > std::abs(m[piv][col])) piv = r;
    if (std::abs(m[piv][col]) < 1e-300) return false;
    std::swap(m[piv], m[col]);
    std::swap(rhs[piv], rhs[col]);
    for (std::size_t r = col + 1; r < N; ++r) {
      const double f = m[r][col] / m[col][col];
      rhs[r] -= f * rhs[col];
      for (std::size_t c = col; c < N; ++c) m[r][c] -= f * m[col][c];
    }
  }
  for (std::size_t i = N; i-- > 0;) {
    double acc = rhs[i];
    for (std::size_t c = i + 1; c < N; ++c) acc -= m[i][c] * out[c];
    out[i] = acc / m[i][i];
  }
  return true;
}

// Deterministic RNG: splitmix64 with an explicit 53-bit uniform so the
// stream does not depend on the standard library's distribution choices.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed ^ 0x9e3779b97f4a7c15ull) {}

  double uniform() {  // [0, 1)
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
  }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

 private:
  std::uint64_t next() {
    // splitmix64; small, portable, and plenty for scene sampling
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }
  std::uint64_t state_;
};

}  // namespace ullman
