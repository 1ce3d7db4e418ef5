#include "scatter/specfun.hpp"

#include <algorithm>

namespace scatter::specfun {

namespace {

constexpr double kEulerGamma = 0.57721566490153286060651209;

// Defining power series; used for small arguments where it is exact to rounding.
double bessel_j_series(int m, double x) {
  const double h = 0.5 * x;
  double term = 1.0;
  for (int j = 1; j <= m; ++j) term *= h / j;
  double sum = term;
  const double h2 = h * h;
  for (int n = 1; n < 200; ++n) {
    term *= -h2 / (n * static_cast<double>(n + m));
    sum += term;
    if (std::abs(term) <= 1e-17 * std::abs(sum)) break;
  }
  return sum;
}

// Neumann series for Y₀, Y₁ from a J sequence reaching well beyond x.
void y01(double x, double& y0, double& y1, double* j0 = nullptr, double* j1 = nullptr) {
  const int M = static_cast<int>(std::ceil(x)) + 40;
  const auto J = bessel_j_values<double>(M, x);
  if (j0) *j0 = J[0];
  if (j1) *j1 = J[1];
  const double lg = std::log(0.5 * x) + kEulerGamma;
  double s0 = 0.0;
  double s1 = 0.0;
  for (int k = 1; 2 * k + 1 <= M; ++k) {
    const double sgn = (k % 2 == 0) ? 1.0 : -1.0;
    s0 += sgn * J[2 * k] / k;
    s1 += sgn * (J[2 * k - 1] - J[2 * k + 1]) / k;
  }
  y0 = (2.0 / kPi) * (lg * J[0] - 2.0 * s0);
  y1 = (2.0 / kPi) * (lg * J[1] - J[0] / x + s1);
}

}  // namespace

int miller_start(int m_max, double x) {
  const double top = std::max(static_cast<double>(m_max), x);
  return m_max + 20 + static_cast<int>(std::ceil(x)) + static_cast<int>(std::ceil(std::sqrt(40.0 * top)));
}

double bessel_j(int m, double x) {
  if (!(x >= 0)) throw DomainError("bessel_j: argument must be nonnegative");
  const int am = std::abs(m);
  const double sign = (m < 0 && am % 2 == 1) ? -1.0 : 1.0;
  if (x <= 0.5) return sign * bessel_j_series(am, x);
  return sign * bessel_j_values<double>(am, x)[static_cast<std::size_t>(am)];
}

BesselSeq bessel_j_seq(int m_max, double x) {
  return {m_max, x, bessel_j_values<double>(m_max, x)};
}

double bessel_j_prime(int m, double x) {
  return 0.5 * (bessel_j(m - 1, x) - bessel_j(m + 1, x));
}

std::vector<double> bessel_y_values(int m_max, double x) {
  if (!(x > 0)) throw DomainError("bessel_y: argument must be positive");
  std::vector<double> Y(static_cast<std::size_t>(std::max(m_max, 1)) + 1);
  y01(x, Y[0], Y[1]);
  for (int n = 1; n < m_max; ++n) Y[n + 1] = (2.0 * n / x) * Y[n] - Y[n - 1];
  Y.resize(static_cast<std::size_t>(m_max) + 1);
  return Y;
}

HankelValue hankel1(int m, double x) {
  if (m < 0) throw DomainError("hankel1: order must be nonnegative");
  if (!(x > 0)) throw DomainError("hankel1: argument must be positive");
  const auto J = bessel_j_values<double>(m + 1, x);
  const auto Y = bessel_y_values(m + 1, x);
  const cplx h(J[m], Y[m]);
  const cplx hp1(J[m + 1], Y[m + 1]);
  // H_m' = m/x H_m − H_{m+1}
  return {h, (m / x) * h - hp1};
}

Hankel01 hankel01(double x) {
  if (!(x > 0)) throw DomainError("hankel01: argument must be positive");
  if (x <= 8.0) {
    // Ascending series; no allocation, at most two digits lost to cancellation.
    const double q = 0.25 * x * x;
    const double lg = std::log(0.5 * x);
    double t0 = 1.0;       // (−q)^k/(k!)²
    double t1 = 1.0;       // (−q)^k/(k!(k+1)!)
    double j0 = 1.0, j1 = 1.0, s0 = 0.0;
    double s1 = -2.0 * kEulerGamma + 1.0;  // ψ(1)+ψ(2)
    double hk = 0.0;
    for (int k = 1; k < 60; ++k) {
      t0 *= -q / (static_cast<double>(k) * k);
      t1 *= -q / (static_cast<double>(k) * (k + 1));
      hk += 1.0 / k;
      j0 += t0;
      j1 += t1;
      s0 -= hk * t0;
      s1 += (2.0 * (hk - kEulerGamma) + 1.0 / (k + 1)) * t1;
      if (std::abs(t0) < 1e-18 && std::abs(t1) < 1e-18) break;
    }
    j1 *= 0.5 * x;
    const double y0 = (2.0 / kPi) * ((lg + kEulerGamma) * j0 + s0);
    const double y1 = -2.0 / (kPi * x) + (2.0 / kPi) * lg * j1 - (0.5 * x / kPi) * s1;
    return {{j0, y0}, {j1, y1}};
  }
  double j0 = 0.0, j1 = 0.0, y0 = 0.0, y1 = 0.0;
  y01(x, y0, y1, &j0, &j1);
  return {{j0, y0}, {j1, y1}};
}

}  // namespace scatter::specfun
