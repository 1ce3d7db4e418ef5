#include "scatter/herglotz.hpp"

#include <numbers>

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_complex.hpp>

#include "scatter/specfun.hpp"

namespace scatter::herglotz {

namespace {

template <class C>
struct FieldT {
  C value, dx, dy;
};

// Σ_m b_m J_{|m|}(kr) e^{imθ} with gradient. With F_n = J_n(kr)e^{inθ} (signed order),
// (∂₁ + i∂₂)F_n = −k F_{n+1} and (∂₁ − i∂₂)F_n = k F_{n−1}.
template <class T, class C = std::complex<T>>
FieldT<C> fourier_bessel_eval(const std::vector<C>& b, int M, T k, T y1, T y2) {
  using std::conj;
  using std::sqrt;
  const T r = sqrt(y1 * y1 + y2 * y2);
  const auto J = specfun::bessel_j_values<T>(M + 1, k * r);
  // F_n for n in [−M−1, M+1].
  std::vector<C> F(static_cast<std::size_t>(2 * M + 3));
  const C e1 = r > 0 ? C(y1 / r, y2 / r) : C(1, 0);
  C pw(1, 0);
  for (int n = 0; n <= M + 1; ++n) {
    const T jn = J[static_cast<std::size_t>(n)];
    F[static_cast<std::size_t>(n + M + 1)] = jn * pw;
    // J_{−n} = (−1)^n J_n, e^{−inθ} = conj(e^{inθ})
    F[static_cast<std::size_t>(-n + M + 1)] = ((n % 2) ? -jn : jn) * conj(pw);
    pw *= e1;
  }
  auto f = [&](int n) { return F[static_cast<std::size_t>(n + M + 1)]; };
  C val(0), P(0), Mm(0);
  for (int m = -M; m <= M; ++m) {
    const C bm = b[static_cast<std::size_t>(m + M)];
    if (bm == C(0)) continue;
    const C coef = (m < 0 && (-m) % 2) ? -bm : bm;  // b_m J_{|m|} e^{imθ} = coef · F_m
    val += coef * f(m);
    P += -k * coef * f(m + 1);
    Mm += k * coef * f(m - 1);
  }
  const C half(T(0.5), 0);
  const C dx = half * (P + Mm);
  const C dy = (P - Mm) / C(0, 2);
  return {val, dx, dy};
}

template <class T, class C = std::complex<T>>
std::vector<C> herglotz_coeffs_t(int N, T tau, T k, T w1, T w2) {
  using std::sqrt;
  const T q = tau + sqrt(tau * tau + k * k);
  const C omega(w1, w2);
  // 2π i^{|m|} c_m:  m ≥ 0 → (−k/(qω))^m,  m < 0 → (qω/k)^{|m|}.
  const C up = -k / (q * omega);
  const C down = q * omega / k;
  std::vector<C> b(static_cast<std::size_t>(2 * N + 1));
  C a(1), d(1);
  b[static_cast<std::size_t>(N)] = C(1);
  for (int m = 1; m <= N; ++m) {
    a *= up;
    d *= down;
    b[static_cast<std::size_t>(N + m)] = a;
    b[static_cast<std::size_t>(N - m)] = d;
  }
  return b;
}

double safe_exp(double x, const char* what) {
  if (x >= 700.0) throw NumericalError(std::string(what) + ": bound overflows double range");
  return std::exp(x);
}

}  // namespace

cplx exp_moment(int m, cplx xi1, cplx xi2) {
  const cplx z = xi1 + kI * xi2, zs = xi1 - kI * xi2;
  const int am = std::abs(m);
  const cplx q = 0.25 * z * zs;
  cplx term = std::pow((m >= 0 ? z : zs) / 2.0, am) / std::tgamma(am + 1.0);
  cplx sum = 0.0;
  for (int n = 0; n < 1000; ++n) {
    sum += term;
    term *= q / (static_cast<double>(n + 1) * (n + 1 + am));
    if (n + 1 > std::abs(q) && std::abs(term) <= 1e-17 * std::abs(sum)) break;
  }
  return sum;
}

double beta0() {
  auto f = [](double s) { return 2.0 * s / std::numbers::e + std::log(s); };
  double lo = 0.1, hi = 1.0;
  for (int i = 0; i < 200 && hi - lo > 1e-17; ++i) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) < 0 ? lo : hi) = mid;
  }
  double s = 0.5 * (lo + hi);
  for (int i = 0; i < 3; ++i) s -= f(s) / (2.0 / std::numbers::e + 1.0 / s);
  return s;
}

void ScheduleParams::validate() const {
  if (!(beta > 0.0 && beta < beta0()))
    throw InputError("schedule: beta must lie in (0, beta0) with beta0 = " + std::to_string(beta0()));
  if (!(R > 0.0)) throw InputError("schedule: R must be positive");
}

double tau_schedule(int N, const ScheduleParams& p) {
  p.validate();
  if (N < 1) throw InputError("schedule: N must be at least 1");
  const double tau = p.beta * N / (std::numbers::e * p.R) + p.offset;
  if (!(tau > 0.0)) throw InputError("schedule: tau(N) must be positive");
  return tau;
}

DensityCoeffs::DensityCoeffs(int N, double tau, double k, Direction omega)
    : N_(N), tau_(tau), k_(k), omega_(omega), coeffs_(static_cast<std::size_t>(2 * N + 1)) {
  if (N < 0) throw InputError("density: N must be nonnegative");
  if (!(tau > 0.0) || !(k > 0.0)) throw InputError("density: tau and k must be positive");
  const double q = tau + std::sqrt(tau * tau + k * k);
  const cplx rho = kI * k / (q * omega_.as_complex());
  const cplx inv = 1.0 / rho;
  const double c0 = 1.0 / (2.0 * kPi);
  cplx a = c0, d = c0;
  coeffs_[static_cast<std::size_t>(N)] = c0;
  for (int m = 1; m <= N; ++m) {
    a *= rho;
    d *= inv;
    coeffs_[static_cast<std::size_t>(N + m)] = a;
    coeffs_[static_cast<std::size_t>(N - m)] = d;
  }
}

cplx DensityCoeffs::evaluate(cplx phi) const {
  cplx sum = c(0);
  cplx p = 1.0, pc = 1.0;
  const cplx phic = std::conj(phi);
  for (int m = 1; m <= N_; ++m) {
    p *= phi;
    pc *= phic;
    sum += c(m) * p + c(-m) * pc;
  }
  return sum;
}

DensityCoeffs density_coeffs(int N, double tau, double k, const Direction& omega) {
  return DensityCoeffs(N, tau, k, omega);
}

FieldValue cgo_wave(const Vec2& y, double tau, double k, const Direction& omega) {
  const double s = std::sqrt(tau * tau + k * k);
  const Vec2 w = omega.unit(), wp = omega.perp();
  const cplx z1(tau * w.x, s * wp.x);
  const cplx z2(tau * w.y, s * wp.y);
  const cplx v = std::exp(z1 * y.x + z2 * y.y);
  return {v, z1 * v, z2 * v};
}

cplx harmonic_e_omega(const Vec2& y, double tau, double k, const Direction& omega) {
  const double s = std::sqrt(tau * tau + k * k);
  const cplx z(y.x, y.y);
  const cplx w = omega.as_complex();
  return std::exp(0.5 * (tau - s) * std::conj(w) * z) + std::exp(0.5 * (tau + s) * w * std::conj(z)) - 1.0;
}

cplx HarmonicSeries::evaluate(const Vec2& y) const {
  const cplx z(y.x, y.y);
  cplx sum = coeff(0);
  cplx p = 1.0, pc = 1.0;
  for (int m = 1; m <= M; ++m) {
    p *= z;
    pc *= std::conj(z);
    sum += coeff(m) * p + coeff(-m) * pc;
  }
  return sum;
}

FieldValue FourierBesselSeries::evaluate(const Vec2& y) const {
  const auto f = fourier_bessel_eval<double>(b, M, k, y.x, y.y);
  return {f.value, f.dx, f.dy};
}

FourierBesselSeries vekua_apply(const HarmonicSeries& h, double k) {
  if (!(k > 0.0)) throw InputError("vekua: k must be positive");
  FourierBesselSeries fb{h.M, k, std::vector<cplx>(h.a.size())};
  double scale = 1.0;  // (2/k)^m m!
  fb.b[static_cast<std::size_t>(h.M)] = h.coeff(0);
  for (int m = 1; m <= h.M; ++m) {
    scale *= 2.0 * m / k;
    fb.b[static_cast<std::size_t>(h.M + m)] = scale * h.coeff(m);
    fb.b[static_cast<std::size_t>(h.M - m)] = scale * h.coeff(-m);
  }
  return fb;
}

namespace {

HarmonicSeries two_exponential_series(int M, cplx A, cplx B) {
  // e^{Az} + e^{B z̄} − 1 = 1 + Σ_{m≥1} (A^m/m!) z^m + (B^m/m!) z̄^m
  HarmonicSeries h{M, std::vector<cplx>(static_cast<std::size_t>(2 * M + 1))};
  h.a[static_cast<std::size_t>(M)] = 1.0;
  cplx ta = 1.0, tb = 1.0;
  for (int m = 1; m <= M; ++m) {
    ta *= A / static_cast<double>(m);
    tb *= B / static_cast<double>(m);
    h.a[static_cast<std::size_t>(M + m)] = ta;
    h.a[static_cast<std::size_t>(M - m)] = tb;
  }
  return h;
}

}  // namespace

HarmonicSeries cgo_harmonic_series(int M, double tau, double k, const Direction& omega) {
  const double s = std::sqrt(tau * tau + k * k);
  const cplx w = omega.as_complex();
  return two_exponential_series(M, 0.5 * (tau - s) * std::conj(w), 0.5 * (tau + s) * w);
}

HarmonicSeries plane_wave_harmonic_series(int M, double k, cplx phi) {
  return two_exponential_series(M, 0.5 * kI * k * std::conj(phi), 0.5 * kI * k * phi);
}

FourierBesselSeries herglotz_series(const DensityCoeffs& dc) {
  const Vec2 w = dc.omega().unit();
  return {dc.N(), dc.k(), herglotz_coeffs_t<double>(dc.N(), dc.tau(), dc.k(), w.x, w.y)};
}

FieldValue herglotz_wave(const DensityCoeffs& dc, const Vec2& y) {
  return herglotz_series(dc).evaluate(y);
}

WaveError herglotz_cgo_difference(const DensityCoeffs& dc, const Vec2& y) {
  using T = boost::multiprecision::cpp_bin_float_quad;
  using C = boost::multiprecision::cpp_complex_quad;
  const Vec2 u = dc.omega().unit();
  // |ω| = 1 to quad precision; the series uses 1/ω where v uses ω̄.
  const T un = sqrt(T(u.x) * u.x + T(u.y) * u.y);
  const T w1 = u.x / un, w2 = u.y / un;
  const T tau = dc.tau(), k = dc.k(), y1 = y.x, y2 = y.y;
  const auto b = herglotz_coeffs_t<T, C>(dc.N(), tau, k, w1, w2);
  const auto hv = fourier_bessel_eval<T, C>(b, dc.N(), k, y1, y2);
  const T s = sqrt(tau * tau + k * k);
  const C z1(tau * w1, s * w2);
  const C z2(tau * w2, -s * w1);
  const C v = exp(z1 * y1 + z2 * y2);
  const C ev = hv.value - v, ex = hv.dx - z1 * v, ey = hv.dy - z2 * v;
  return {static_cast<double>(abs(ev)), static_cast<double>(sqrt(norm(ex) + norm(ey)))};
}

double log_E(double tau, int N, double k, double R) {
  const double x = 0.5 * R * (tau + std::sqrt(tau * tau + k * k));
  return N * std::log(x) - std::lgamma(N + 1.0) + x;
}

TruncationCertificate truncation_certificate(int N, double tau, double k, double R) {
  if (N < 1 || !(tau > 0.0) || !(k > 0.0) || !(R > 0.0))
    throw InputError("certificate: N, tau, k and R must be positive");
  const double q = tau + std::sqrt(tau * tau + k * k);
  const double xr = 0.5 * R * k * k / q;
  auto logB = [&](int n) { return n * std::log(xr) - std::lgamma(n + 1.0) + xr; };
  auto E = [&](int n) { return safe_exp(log_E(tau, n, k, R), "certificate"); };
  auto B = [&](int n) { return safe_exp(logB(n), "certificate"); };

  TruncationCertificate c{N, tau, R, k};
  c.bound_S = E(N + 1);
  c.bound_R = B(N + 1);
  const double P = q * (E(N) + B(N + 2));
  const double Mv = (k * k / q) * (E(N + 2) + B(N));
  c.bound_grad = std::sqrt(0.5 * (P * P + Mv * Mv));
  const double w = safe_exp(R * tau, "certificate");
  c.weighted = w * (c.bound_S + c.bound_R);
  c.weighted_total = w * (c.bound_S + c.bound_R + c.bound_grad);
  return c;
}

}  // namespace scatter::herglotz
