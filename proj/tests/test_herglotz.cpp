#include <cmath>
#include <random>

#include "doctest.h"
#include "scatter/herglotz.hpp"
#include "scatter/specfun.hpp"

using namespace scatter;
using namespace scatter::herglotz;

namespace {

double f_beta(double s) { return 2 * s / std::numbers::e + std::log(s); }

// Trapezoid rule on S¹ for ∫ e^{iky·φ} g(φ) dσ.
cplx herglotz_quadrature(const DensityCoeffs& dc, const Vec2& y, int n) {
  cplx sum = 0;
  for (int j = 0; j < n; ++j) {
    const double t = 2 * kPi * j / n;
    const Vec2 phi{std::cos(t), std::sin(t)};
    sum += std::exp(kI * dc.k() * dot(y, phi)) * dc.evaluate_angle(t);
  }
  return sum * (2 * kPi / n);
}

// Σ|b_m J_|m|| as the natural scale of the Fourier–Bessel sum.
double series_scale(const FourierBesselSeries& s, const Vec2& y) {
  const auto J = specfun::bessel_j_seq(s.M, s.k * norm(y));
  double a = 0;
  for (int m = -s.M; m <= s.M; ++m) a += std::abs(s.coeff(m)) * std::abs(J[std::abs(m)]);
  return a;
}

template <class F>
cplx fd_laplacian(F f, const Vec2& y, double h) {
  return (f({y.x + h, y.y}) + f({y.x - h, y.y}) + f({y.x, y.y + h}) + f({y.x, y.y - h}) - 4.0 * f(y)) / (h * h);
}

}  // namespace

TEST_CASE("beta0") {
  const double b = beta0();
  CHECK(std::abs(f_beta(b)) <= 1e-14);
  CHECK(b == doctest::Approx(0.6293).epsilon(1e-4));
  CHECK(f_beta(0.5) < 0);
  CHECK(f_beta(0.9) > 0);
}

TEST_CASE("tau schedule") {
  ScheduleParams p;
  CHECK(tau_schedule(20, p) == doctest::Approx(10.0 / std::numbers::e).epsilon(1e-14));
  CHECK_THROWS_AS(tau_schedule(0, p), InputError);
  ScheduleParams bad{0.7, 1.0, 0.0};
  CHECK_THROWS_AS(tau_schedule(5, bad), InputError);
  ScheduleParams off{0.5, 2.0, 1.5};
  CHECK(tau_schedule(10, off) == doctest::Approx(5.0 / (2 * std::numbers::e) + 1.5));
}

TEST_CASE("density coefficients") {
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> ang(0, 2 * kPi);
  for (int trial = 0; trial < 20; ++trial) {
    const int N = 1 + trial;
    const double tau = 0.3 * trial + 0.1, k = 0.5 + 0.1 * trial;
    const Direction w(ang(rng));
    const auto dc = density_coeffs(N, tau, k, w);
    CHECK(dc.c(0) == cplx(1 / (2 * kPi), 0));
    for (int m = 1; m < N; ++m) {
      CHECK(std::abs(dc.c(m + 1)) < std::abs(dc.c(m)));
      CHECK(std::abs(dc.c(-m - 1)) > std::abs(dc.c(-m)));
    }
    // Direct summation of the defining formula with library powers.
    const double q = tau + std::sqrt(tau * tau + k * k);
    const cplx phi = std::polar(1.0, ang(rng));
    cplx ref = 0;
    double scale = 0;
    for (int m = -N; m <= N; ++m) {
      const cplx t = std::pow(kI * k * phi / (q * w.as_complex()), m) / (2 * kPi);
      ref += t;
      scale += std::abs(t);
    }
    CHECK(std::abs(dc.evaluate(phi) - ref) <= 1e-13 * scale);
  }
}

TEST_CASE("tau to zero cancels the first-order terms at phi = omega") {
  const Direction w(0.4);
  const auto dc = density_coeffs(1, 1e-15, 1.3, w);
  CHECK(std::abs(dc.evaluate(w.as_complex()) - 1 / (2 * kPi)) < 1e-14);
}

TEST_CASE("moment equations hold up to N and fail beyond") {
  const int N = 10, n = 256;
  const double tau = 1.0, k = 2.0;
  const Direction w(1.1);
  const auto dc = density_coeffs(N, tau, k, w);
  const double s = std::sqrt(tau * tau + k * k);
  auto moment = [&](int m, bool conj) {
    cplx acc = 0;
    for (int j = 0; j < n; ++j) {
      const cplx phi = std::polar(1.0, 2 * kPi * j / n);
      acc += std::pow(conj ? std::conj(phi) : phi, m) * dc.evaluate(phi);
    }
    return std::pow(0.5 * kI * k, m) * acc * (2 * kPi / n);
  };
  for (int m = 0; m <= N + 1; ++m) {
    const cplx rhs = std::pow(0.5 * (tau - s) * std::conj(w.as_complex()), m);
    const double err = std::abs(moment(m, true) - rhs);
    if (m <= N)
      CHECK(err <= 1e-12 * std::max(1.0, std::abs(rhs)));
    else
      CHECK(err > 1e-3);
  }
  for (int m = 1; m <= N + 1; ++m) {
    const cplx rhs = std::pow(0.5 * (tau + s) * w.as_complex(), m);
    const double err = std::abs(moment(m, false) - rhs);
    if (m <= N)
      CHECK(err <= 1e-12 * std::max(1.0, std::abs(rhs)));
    else
      CHECK(err > 1e-3);
  }
}

TEST_CASE("cgo wave") {
  const Direction w(2.3);
  CHECK(cgo_wave({0, 0}, 3.0, 1.0, w).value == cplx(1, 0));
  std::mt19937 rng(9);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int i = 0; i < 20; ++i) {
    const Vec2 y{u(rng), u(rng)};
    const double tau = 1.0 * i, k = 1.3;
    const auto v = cgo_wave(y, tau, k, w);
    CHECK(std::abs(v.value) == doctest::Approx(std::exp(tau * dot(y, w.unit()))).epsilon(1e-13));
    auto f = [&](const Vec2& p) { return cgo_wave(p, tau, k, w).value; };
    const double h = 1e-4;
    const cplx lap = fd_laplacian(f, y, h);
    CHECK(std::abs(lap + k * k * v.value) <= 1e-6 * std::abs(v.value) * std::max(1.0, tau * tau));
    const double hh = 1e-6;
    const cplx gx = (f({y.x + hh, y.y}) - f({y.x - hh, y.y})) / (2 * hh);
    const cplx gy = (f({y.x, y.y + hh}) - f({y.x, y.y - hh})) / (2 * hh);
    const double gs = std::abs(v.dx) + std::abs(v.dy);
    CHECK(std::abs(gx - v.dx) <= 1e-6 * gs);
    CHECK(std::abs(gy - v.dy) <= 1e-6 * gs);
  }
}

TEST_CASE("harmonic companion") {
  const Direction w(0.9);
  CHECK(harmonic_e_omega({0, 0}, 2.0, 1.0, w) == cplx(1, 0));
  std::mt19937 rng(13);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int i = 0; i < 20; ++i) {
    const Vec2 y{u(rng), u(rng)};
    auto f = [&](const Vec2& p) { return harmonic_e_omega(p, 2.0, 1.0, w); };
    const cplx lap = fd_laplacian(f, y, 1e-3);
    CHECK(std::abs(lap) <= 1e-6 * std::max(1.0, std::abs(f(y))) * 20);
  }
  // Series coefficients reproduce the closed form.
  const auto hs = cgo_harmonic_series(60, 2.0, 1.0, w);
  for (int i = 0; i < 10; ++i) {
    const Vec2 y{u(rng), u(rng)};
    CHECK(std::abs(hs.evaluate(y) - harmonic_e_omega(y, 2.0, 1.0, w)) < 1e-12 * std::exp(3.0));
  }
}

TEST_CASE("vekua rule") {
  const HarmonicSeries one{0, {cplx(1)}};
  const auto fb = vekua_apply(one, 2.0);
  CHECK(fb.coeff(0) == cplx(1));
  CHECK(fb.evaluate({0.3, 0.4}).value.real() == doctest::Approx(specfun::bessel_j(0, 1.0)));

  const HarmonicSeries a{2, {1.0, 0.0, 0.0, 0.0, 1.0}};
  const auto fb2 = vekua_apply(a, 0.5);
  CHECK(fb2.coeff(2) == cplx(32.0));   // (2/0.5)² 2!
  CHECK(fb2.coeff(-2) == cplx(32.0));
  CHECK(fb2.coeff(1) == cplx(0.0));
}

TEST_CASE("truncated expansions match plane and CGO waves") {
  std::mt19937 rng(17);
  std::uniform_real_distribution<double> u(-1, 1);
  const double R = 2.0, k = 1.0;
  const int M = 40;
  for (int i = 0; i < 30; ++i) {
    Vec2 y{u(rng), u(rng)};
    y = y * (R * std::abs(u(rng)) / std::max(norm(y), 1e-3));
    const cplx phi = std::polar(1.0, 3.0 * u(rng));
    const auto pw = vekua_apply(plane_wave_harmonic_series(M, k, phi), k).evaluate(y);
    const cplx exact = std::exp(kI * k * (y.x * phi.real() + y.y * phi.imag()));
    CHECK(std::abs(pw.value - exact) < 1e-12);
    CHECK(std::abs(pw.dx - kI * k * phi.real() * exact) < 1e-12);

    const double tau = 2.5 * (1 + u(rng));
    const Direction w(3.0 * u(rng));
    const auto cg = vekua_apply(cgo_harmonic_series(M, tau, k, w), k).evaluate(y);
    const auto v = cgo_wave(y, tau, k, w);
    const double bound = 2 * std::exp(log_E(tau, M + 1, k, R));
    CHECK(std::abs(cg.value - v.value) <= bound + 1e-13 * std::exp(R * (tau + std::sqrt(tau * tau + k * k)) / 2));
  }
}

TEST_CASE("herglotz wave equals quadrature of its defining integral") {
  std::mt19937 rng(21);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int i = 0; i < 20; ++i) {
    const int N = 1 + i;
    const double tau = 0.5 * i;
    const Direction w(3 * u(rng));
    const auto dc = density_coeffs(N, tau + 0.01, 1.0, w);
    const Vec2 y{u(rng), u(rng)};
    const auto hv = herglotz_wave(dc, y);
    const cplx q = herglotz_quadrature(dc, y, 512);
    // The quadrature sums terms as large as Σ|c_m|, which sets its rounding floor.
    double csum = 0;
    for (const auto& c : dc.coeffs()) csum += 2 * kPi * std::abs(c);
    CHECK(std::abs(hv.value - q) <= 1e-10 * std::abs(q) + 1e-15 * csum);

    auto f = [&](const Vec2& p) { return herglotz_wave(dc, p).value; };
    const double h = 1e-6;
    const cplx gx = (f({y.x + h, y.y}) - f({y.x - h, y.y})) / (2 * h);
    const cplx gy = (f({y.x, y.y + h}) - f({y.x, y.y - h})) / (2 * h);
    const double sc = series_scale(herglotz_series(dc), y);
    CHECK(std::abs(gx - hv.dx) <= 1e-6 * sc);
    CHECK(std::abs(gy - hv.dy) <= 1e-6 * sc);
  }
  const auto dc = density_coeffs(7, 2.0, 1.0, Direction(0.3));
  CHECK(std::abs(herglotz_wave(dc, {0, 0}).value - 1.0) < 1e-15);
}

TEST_CASE("residue identity for general complex vectors") {
  std::mt19937 rng(23);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int trial = 0; trial < 20; ++trial) {
    std::complex<double> xi1(u(rng), u(rng)), xi2(u(rng), u(rng));
    const cplx z = xi1 + kI * xi2, zs = xi1 - kI * xi2;
    for (int m = -3; m <= 3; ++m) {
      cplx quad = 0;
      for (int j = 0; j < 256; ++j) {
        const double t = 2 * kPi * j / 256;
        quad += std::exp(std::cos(t) * xi1 + std::sin(t) * xi2) * std::polar(1.0, m * t);
      }
      quad /= 256.0;
      const int am = std::abs(m);
      cplx closed = 0, term = std::pow((m >= 0 ? z : zs) / 2.0, am) / std::tgamma(am + 1.0);
      for (int n = 0; n < 40; ++n) {
        closed += term;
        term *= 0.25 * zs * z / (static_cast<double>(n + 1) * (n + 1 + am));
      }
      CHECK(std::abs(quad - closed) <= 1e-10 * std::abs(closed));
      CHECK(std::abs(exp_moment(m, xi1, xi2) - quad) <= 1e-10 * std::abs(quad));
    }
  }
}

TEST_CASE("truncation certificate") {
  ScheduleParams p{0.5, 1.0, 0.0};
  const int N = 20;
  const double tau = tau_schedule(N, p);
  const auto c = truncation_certificate(N, tau, 1.0, 1.0);
  CHECK(c.bound_S > 0);
  CHECK(c.bound_R > 0);
  CHECK(c.bound_S == doctest::Approx(std::exp(log_E(tau, N + 1, 1.0, 1.0))));
  const auto dc = density_coeffs(N, tau, 1.0, Direction(0.77));
  double worst = 0, worst_g = 0;
  for (int j = 0; j < 256; ++j) {
    const double t = 2 * kPi * j / 256;
    const auto e = herglotz_cgo_difference(dc, {std::cos(t), std::sin(t)});
    worst = std::max(worst, e.value);
    worst_g = std::max(worst_g, e.gradient);
  }
  CHECK(worst <= c.bound_S + c.bound_R);
  CHECK(worst_g <= c.bound_grad);

  double prev = 1e300;
  for (int n = 20; n <= 60; n += 5) {
    const double t = tau_schedule(n, p);
    const double val = std::exp(1.0 * t + log_E(t, n - 1, 1.0, 1.0));
    CHECK(val < prev);
    prev = val;
  }
  CHECK_THROWS_AS(truncation_certificate(0, 1.0, 1.0, 1.0), InputError);
  CHECK_THROWS_AS(truncation_certificate(2000, 900.0, 1.0, 1.0), NumericalError);
}
