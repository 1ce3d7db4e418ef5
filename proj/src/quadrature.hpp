#pragma once

#include <cmath>
#include <numbers>
#include <vector>

namespace scatter::quad {

struct Rule {
  std::vector<double> x;
  std::vector<double> w;
};

/// n-point Gauss-Legendre rule on [−1, 1] (Newton on the three-term recurrence).
inline Rule gauss_legendre(int n) {
  Rule r{std::vector<double>(static_cast<std::size_t>(n)), std::vector<double>(static_cast<std::size_t>(n))};
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = z;
      for (int j = 2; j <= n; ++j) {
        const double p2 = ((2.0 * j - 1.0) * z * p1 - (j - 1.0) * p0) / j;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (z * p1 - p0) / (z * z - 1.0);
      const double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    const double w = 2.0 / ((1.0 - z * z) * dp * dp);
    r.x[static_cast<std::size_t>(i)] = -z;
    r.x[static_cast<std::size_t>(n - 1 - i)] = z;
    r.w[static_cast<std::size_t>(i)] = w;
    r.w[static_cast<std::size_t>(n - 1 - i)] = w;
  }
  return r;
}

/// Barycentric weights for interpolation through the nodes x.
inline std::vector<double> barycentric_weights(const std::vector<double>& x) {
  std::vector<double> b(x.size(), 1.0);
  for (std::size_t j = 0; j < x.size(); ++j)
    for (std::size_t k = 0; k < x.size(); ++k)
      if (k != j) b[j] /= (x[j] - x[k]);
  return b;
}

/// Lagrange basis values ℓ_j(t) through nodes x.
inline void lagrange_values(const std::vector<double>& x, const std::vector<double>& bw, double t, double* out) {
  const std::size_t n = x.size();
  for (std::size_t j = 0; j < n; ++j) {
    if (t == x[j]) {
      for (std::size_t k = 0; k < n; ++k) out[k] = (k == j) ? 1.0 : 0.0;
      return;
    }
  }
  double s = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    out[j] = bw[j] / (t - x[j]);
    s += out[j];
  }
  for (std::size_t j = 0; j < n; ++j) out[j] /= s;
}

}  // namespace scatter::quad
