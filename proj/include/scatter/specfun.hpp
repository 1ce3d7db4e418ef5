#pragma once

#include <cmath>
#include <concepts>
#include <vector>

#include "scatter/common.hpp"

namespace scatter::specfun {

/// J₀..J_{order_max} at one argument.
struct BesselSeq {
  int order_max = 0;
  double argument = 0.0;
  std::vector<double> values;

  double operator[](int m) const { return values[static_cast<std::size_t>(m)]; }
};

/// Start order of the Miller backward recurrence for orders up to m_max at x.
int miller_start(int m_max, double x);

/// J₀..J_{m_max}(x) by Miller's backward recurrence normalized with J₀ + 2ΣJ₂ₙ = 1.
/// Generic over the floating type so callers can certify cancellation-prone sums
/// in extended or quadruple precision.
template <class T>
std::vector<T> bessel_j_values(int m_max, T x) {
  if (m_max < 0) throw DomainError("bessel: negative maximal order");
  if (!(x >= 0)) throw DomainError("bessel: argument must be nonnegative");
  std::vector<T> out(static_cast<std::size_t>(m_max) + 1, T(0));
  if (x == 0) {
    out[0] = T(1);
    return out;
  }
  const int start = miller_start(m_max, static_cast<double>(x));
  const T big = T(1e200);
  T next = 0;            // f_{n+1}
  T cur = T(1e-30);      // f_n, n = start
  T sum = (start % 2 == 0) ? 2 * cur : T(0);
  for (int n = start; n > 0; --n) {
    if (n <= m_max) out[static_cast<std::size_t>(n)] = cur;
    const T prev = (2 * T(n) / x) * cur - next;  // f_{n-1}
    next = cur;
    cur = prev;
    if ((n - 1) % 2 == 0) sum += (n - 1 == 0 ? 1 : 2) * cur;
    using std::abs;
    if (abs(cur) > big) {
      const T s = T(1) / big;
      cur *= s;
      next *= s;
      sum *= s;
      for (int j = n; j <= m_max; ++j) out[static_cast<std::size_t>(j)] *= s;
    }
  }
  out[0] = cur;
  for (auto& v : out) v /= sum;
  return out;
}

/// J_m(x) for integer m (negative orders via J₋ₘ = (−1)ᵐJₘ), x ≥ 0.
double bessel_j(int m, double x);

BesselSeq bessel_j_seq(int m_max, double x);

/// J_m'(x) = (J_{m−1} − J_{m+1})/2.
double bessel_j_prime(int m, double x);

/// Y₀..Y_{m_max}(x), x > 0, from Neumann's series in J and forward recurrence.
std::vector<double> bessel_y_values(int m_max, double x);

struct HankelValue {
  cplx value;
  cplx derivative;
};

/// H_m^{(1)}(x) and its derivative, m ≥ 0, x > 0.
HankelValue hankel1(int m, double x);

/// H₀^{(1)}(x) and H₁^{(1)}(x) together (kernel fast path).
struct Hankel01 {
  cplx h0;
  cplx h1;
};
Hankel01 hankel01(double x);

}  // namespace scatter::specfun
