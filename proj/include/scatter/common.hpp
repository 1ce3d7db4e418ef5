#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <numbers>
#include <stdexcept>
#include <string>

namespace scatter {

using cplx = std::complex<double>;

inline constexpr double kPi = std::numbers::pi;
inline constexpr cplx kI{0.0, 1.0};

// Error hierarchy. The CLI maps InputError -> exit 2 and NumericalError -> exit 3.
struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DomainError : InputError {
  using InputError::InputError;
};

struct ParseError : InputError {
  using InputError::InputError;
};

struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ResonanceError : NumericalError {
  ResonanceError(const std::string& what, double cond)
      : NumericalError(what), condition(cond) {}
  double condition;
};

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  constexpr Vec2() = default;
  constexpr Vec2(double x_, double y_) : x(x_), y(y_) {}

  constexpr Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
  constexpr Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
  constexpr Vec2 operator-() const { return {-x, -y}; }
  constexpr Vec2 operator*(double s) const { return {x * s, y * s}; }
  constexpr Vec2 operator/(double s) const { return {x / s, y / s}; }
  Vec2& operator+=(const Vec2& o) {
    x += o.x;
    y += o.y;
    return *this;
  }
  constexpr bool operator==(const Vec2&) const = default;
};

constexpr Vec2 operator*(double s, const Vec2& v) { return v * s; }
constexpr double dot(const Vec2& a, const Vec2& b) { return a.x * b.x + a.y * b.y; }
constexpr double cross(const Vec2& a, const Vec2& b) { return a.x * b.y - a.y * b.x; }
inline double norm(const Vec2& v) { return std::hypot(v.x, v.y); }

/// Value and gradient of a complex-valued field in the plane.
struct FieldValue {
  cplx value{};
  cplx dx{};
  cplx dy{};

  cplx normal_derivative(const Vec2& n) const { return dx * n.x + dy * n.y; }
};

using Field = std::function<FieldValue(const Vec2&)>;

/// Worker count from SCATTER_THREADS (default: hardware concurrency).
unsigned worker_count();

/// Runs body(i) for i in [0, n) on a small pool of threads.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace scatter
