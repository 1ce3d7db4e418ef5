#include <cmath>

#include "doctest.h"
#include "scatter/farfield.hpp"
#include "scatter/forward.hpp"
#include "scatter/specfun.hpp"

using namespace scatter;
using namespace scatter::forward;
using geometry::Direction;
using geometry::Polygon;

namespace {

// Sound-hard disc of radius a, far field in the e^{ikr}/√r normalization.
cplx disc_far_field(double a, double k, double theta_d, double phi) {
  const cplx pref = -std::sqrt(2 / (kPi * k)) * std::exp(cplx(0, -kPi / 4));
  cplx s = 0;
  for (int n = -40; n <= 40; ++n) {
    const int m = std::abs(n);
    const double jp = specfun::bessel_j_prime(m, k * a);
    const cplx hp = specfun::hankel1(m, k * a).derivative;
    s += jp / hp * std::exp(cplx(0, n * (phi - theta_d)));
  }
  return pref * s;
}

// ∫|F|² dσ + 2√(2π/k) Re(e^{iπ/4} F(d)); vanishes by energy conservation.
template <class F>
std::pair<double, double> optical_defect(F far, double k, double theta_d, int n = 256) {
  double e = 0;
  for (int j = 0; j < n; ++j) e += std::norm(far(2 * kPi * j / n));
  e *= 2 * kPi / n;
  const double fwd = 2 * std::sqrt(2 * kPi / k) * std::real(std::exp(cplx(0, kPi / 4)) * far(theta_d));
  return {e + fwd, e};
}

PolygonalObstacle rotated_square(double half, double angle) {
  Polygon p;
  for (int i = 0; i < 4; ++i) {
    const double t = angle + kPi / 4 + i * kPi / 2;
    p.push_back({half * std::sqrt(2.0) * std::cos(t), half * std::sqrt(2.0) * std::sin(t)});
  }
  PolygonalObstacle o{{p}, 2.0};
  o.validate();
  return o;
}

CrackSet l_crack() {
  CrackSet c{{{{-0.4, 0.5}, {-0.4, -0.3}, {0.5, -0.3}}}, {{-0.4, 0.5}, {-0.4, -0.3}, {0.5, -0.3}}, 2.0};
  c.validate();
  return c;
}

}  // namespace

TEST_CASE("disc series satisfies the optical theorem") {
  const auto [defect, energy] = optical_defect([](double p) { return disc_far_field(0.5, 2.0, 0.3, p); }, 2.0, 0.3);
  CHECK(std::abs(defect) < 1e-10 * energy);
}

TEST_CASE("64-gon of equal area matches the disc far field") {
  const int n = 64;
  const double a = 0.5, k = 2.0;
  const double rho = a * std::sqrt(2 * kPi / (n * std::sin(2 * kPi / n)));
  Polygon p;
  for (int i = 0; i < n; ++i) p.push_back({rho * std::cos(2 * kPi * i / n), rho * std::sin(2 * kPi * i / n)});
  PolygonalObstacle obs{{p}, 1.0};
  obs.validate();
  DiscretizationParams dp;
  dp.grading_levels = 0;
  dp.order = 8;
  const auto sol = solve_obstacle(obs, k, Direction(0.0), dp);
  double err = 0, scale = 0;
  for (int j = 0; j < 32; ++j) {
    const double phi = 2 * kPi * j / 32 + 0.05;
    const cplx ref = disc_far_field(a, k, 0.0, phi);
    err = std::max(err, std::abs(sol.far_field(phi) - ref));
    scale = std::max(scale, std::abs(ref));
  }
  CHECK(err < 5e-3 * scale);
}

TEST_CASE("obstacle: reciprocity, optical theorem and boundary residual") {
  const auto obs = rotated_square(0.5, 20 * kPi / 180);
  const double k = 1.0;
  const double a = 0.4, b = 2.1;
  const auto s1 = solve_obstacle(obs, k, Direction(a));
  const auto s2 = solve_obstacle(obs, k, Direction(b + kPi));
  // F(x̂ = b; d = a) = F(x̂ = a + π; d = b + π)
  const cplx f12 = s1.far_field(b), f21 = s2.far_field(a + kPi);
  CHECK(std::abs(f12 - f21) < 1e-4);

  const auto [defect, energy] = optical_defect([&](double p) { return s1.far_field(p); }, k, a);
  CHECK(std::abs(defect) < 1e-4 * energy);
  CHECK(boundary_residual(s1) < 1e-6);
  CHECK(s1.info().residual < 1e-10);
  CHECK_FALSE(s1.info().resonance);
}

TEST_CASE("Cauchy data reproduce the far field through the Green pairing") {
  const auto obs = rotated_square(0.5, 0.0);
  const auto sol = solve_obstacle(obs, 1.5, Direction(0.7));
  const auto c = cauchy_data_on_circle(sol, 1.2, 256);
  for (double phi : {0.0, 1.0, 2.5, 4.0}) {
    const Vec2 e{std::cos(phi), std::sin(phi)};
    const double k = 1.5;
    const Field v = [&](const Vec2& y) {
      const cplx w = std::exp(kI * k * dot(y, e));
      return FieldValue{w, kI * k * e.x * w, kI * k * e.y * w};
    };
    // ∫F(−ψ) δ(ψ − φ) dσ = F(−φ)
    const cplx lhs = farfield::pairing_factor(k) * farfield::nearfield_pairing(c, v);
    const cplx rhs = sol.far_field(phi + kPi);
    CHECK(std::abs(lhs - rhs) < 1e-8 * std::abs(rhs));
  }
}

TEST_CASE("straight crack is symmetric under reflection across its bisector") {
  CrackSet c{{{{-0.5, 0.0}, {0.5, 0.0}}}, {{-0.5, 0.0}, {0.5, 0.0}, {0.0, 0.4}}, 1.0};
  c.validate();
  const auto sol = solve_crack(c, 2.0, Direction(kPi / 2));
  for (double phi : {0.2, 1.0, 2.0, 4.0})
    CHECK(std::abs(sol.far_field(phi) - sol.far_field(kPi - phi)) < 1e-10 * std::abs(sol.far_field(phi)));
  // Normal incidence on the segment's own line sees nothing.
  const auto grazing = solve_crack(c, 2.0, Direction(0.0));
  CHECK(std::abs(grazing.far_field(1.0)) < 1e-12);
}

TEST_CASE("L-shaped crack: reciprocity and optical theorem") {
  const auto c = l_crack();
  const double k = 1.0, a = 0.3, b = 2.4;
  const auto s1 = solve_crack(c, k, Direction(a));
  const auto s2 = solve_crack(c, k, Direction(b + kPi));
  const cplx f12 = s1.far_field(b), f21 = s2.far_field(a + kPi);
  CHECK(std::abs(f12 - f21) < 1e-3);
  const auto [defect, energy] = optical_defect([&](double p) { return s1.far_field(p); }, k, a);
  CHECK(std::abs(defect) < 1e-4 * energy);
}

TEST_CASE("translated scene: F_b(φ) = e^{−ikφ·b} e^{ikd·b} F(φ)") {
  const auto obs = rotated_square(0.4, 0.3);
  auto moved = obs;
  const Vec2 b{0.3, -0.2};
  for (auto& v : moved.components[0]) v = v + b;
  const double k = 1.3;
  const Direction d(0.8);
  const auto s0 = solve_obstacle(obs, k, d);
  const auto sb = solve_obstacle(moved, k, d);
  for (double phi : {0.0, 1.3, 3.0, 5.1}) {
    const Vec2 e{std::cos(phi), std::sin(phi)};
    const cplx expect = std::exp(kI * k * (dot(d.unit(), b) - dot(e, b))) * s0.far_field(phi);
    CHECK(std::abs(sb.far_field(phi) - expect) < 1e-6);
  }
}

TEST_CASE("thin rectangle approaches the crack") {
  CrackSet c{{{{-0.5, -0.1}, {0.4, 0.3}}}, {{-0.5, -0.1}, {0.4, 0.3}, {0.0, 0.6}}, 1.0};
  c.validate();
  const auto crack = solve_crack(c, 1.0, Direction(0.9));
  const auto thin = solve_obstacle(thin_obstacle({-0.5, -0.1}, {0.4, 0.3}, 1e-3, 1.0), 1.0, Direction(0.9));
  double err = 0, scale = 0;
  for (int j = 0; j < 16; ++j) {
    const double phi = 2 * kPi * j / 16;
    err = std::max(err, std::abs(crack.far_field(phi) - thin.far_field(phi)));
    scale = std::max(scale, std::abs(crack.far_field(phi)));
  }
  CHECK(err < 2e-2 * scale);
}

TEST_CASE("forward input errors") {
  DiscretizationParams dp;
  dp.combined_source = true;
  CHECK_THROWS_AS(solve_obstacle(rotated_square(0.5, 0.0), 1.0, Direction(0.0), dp), InputError);
  CHECK_THROWS_AS(thin_obstacle({0, 0}, {0, 0}, 0.1, 1.0), InputError);
  const auto sol = solve_obstacle(rotated_square(0.5, 0.0), 1.0, Direction(0.0));
  CHECK_THROWS_AS(cauchy_data_on_circle(sol, 0.5, 64), InputError);
}
