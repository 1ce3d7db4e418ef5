#pragma once

#include <vector>

#include "scatter/common.hpp"
#include "scatter/geometry.hpp"

namespace scatter::herglotz {

using geometry::Direction;

/// (1/2π) ∫_{S¹} e^{ϑ·ξ} (ϑ₁ + iϑ₂)^m dσ(ϑ) for a complex vector ξ, by its power series.
cplx exp_moment(int m, cplx xi1, cplx xi2);

/// Positive root of (2/e)s + log s = 0; the schedule slope β must stay below it.
double beta0();

struct ScheduleParams {
  double beta = 0.5;
  double R = 1.0;
  double offset = 0.0;

  void validate() const;
};

/// τ(N) = βN/(eR) + offset.
double tau_schedule(int N, const ScheduleParams& p);

/// Fourier coefficients of the truncated density
///   g_N(φ) = (1/2π) Σ_{|m|≤N} (ikφ / ((τ + √(τ²+k²))ω))^m,   φ ∈ S¹ ⊂ ℂ.
class DensityCoeffs {
 public:
  DensityCoeffs(int N, double tau, double k, Direction omega);

  int N() const { return N_; }
  double tau() const { return tau_; }
  double k() const { return k_; }
  const Direction& omega() const { return omega_; }
  /// c_m for |m| ≤ N.
  cplx c(int m) const { return coeffs_[static_cast<std::size_t>(m + N_)]; }
  const std::vector<cplx>& coeffs() const { return coeffs_; }

  /// g_N at the unit complex number φ (powers by repeated multiplication).
  cplx evaluate(cplx phi) const;
  cplx evaluate_angle(double theta) const { return evaluate({std::cos(theta), std::sin(theta)}); }

 private:
  int N_;
  double tau_;
  double k_;
  Direction omega_;
  std::vector<cplx> coeffs_;
};

DensityCoeffs density_coeffs(int N, double tau, double k, const Direction& omega);

/// v(y) = exp(y·(τω + i√(τ²+k²)ω^⊥)) with its gradient.
FieldValue cgo_wave(const Vec2& y, double tau, double k, const Direction& omega);

/// Harmonic companion e_ω(y; τ, k) whose Vekua image is the CGO wave.
cplx harmonic_e_omega(const Vec2& y, double tau, double k, const Direction& omega);

/// Σ_m a_m r^{|m|} e^{imθ}, m ∈ [−M, M].
struct HarmonicSeries {
  int M = 0;
  std::vector<cplx> a;  // index m + M

  cplx coeff(int m) const { return a[static_cast<std::size_t>(m + M)]; }
  cplx evaluate(const Vec2& y) const;
};

/// Σ_m b_m J_{|m|}(kr) e^{imθ}, m ∈ [−M, M].
struct FourierBesselSeries {
  int M = 0;
  double k = 1.0;
  std::vector<cplx> b;  // index m + M

  cplx coeff(int m) const { return b[static_cast<std::size_t>(m + M)]; }
  /// Value and gradient; the gradient uses the Bessel raising/lowering relations.
  FieldValue evaluate(const Vec2& y) const;
};

/// Vekua rule on the circular harmonic basis: r^{|m|}e^{imθ} ↦ (2/k)^{|m|}|m|! J_{|m|}(kr)e^{imθ}.
FourierBesselSeries vekua_apply(const HarmonicSeries& h, double k);

/// Taylor truncation (order M) of e_ω in the r^{|m|}e^{imθ} basis.
HarmonicSeries cgo_harmonic_series(int M, double tau, double k, const Direction& omega);
/// Taylor truncation of e^{ik φ̄ z/2} + e^{ik φ z̄/2} − 1, whose Vekua image is e^{iky·φ}.
HarmonicSeries plane_wave_harmonic_series(int M, double k, cplx phi);

/// Fourier–Bessel form of the Herglotz wave with density g_N: b_m = 2π i^{|m|} c_m.
FourierBesselSeries herglotz_series(const DensityCoeffs& dc);

/// v_g(y) = ∫_{S¹} e^{iky·φ} g_N(φ) dσ(φ), value and gradient.
FieldValue herglotz_wave(const DensityCoeffs& dc, const Vec2& y);

/// v_g − v at y, summed in quadruple precision. The Fourier–Bessel sum carries terms of
/// size e^{R(τ+√(τ²+k²))/2}, so double rounding would mask the truncation error at large N.
struct WaveError {
  double value = 0.0;     // |v_g − v|
  double gradient = 0.0;  // |∇(v_g − v)|
};
WaveError herglotz_cgo_difference(const DensityCoeffs& dc, const Vec2& y);

/// Explicit majorants of the truncation tails of the Herglotz approximation on |y| ≤ R.
struct TruncationCertificate {
  int N = 0;
  double tau = 0.0;
  double R = 0.0;
  double k = 0.0;
  double bound_S = 0.0;     // tail with growing coefficients: E(τ; N+1)
  double bound_R = 0.0;     // tail with decaying coefficients
  double bound_grad = 0.0;  // gradient of both tails
  double weighted = 0.0;        // e^{Rτ}(bound_S + bound_R)
  double weighted_total = 0.0;  // e^{Rτ}(bound_S + bound_R + bound_grad)
};

/// E(τ; N) = (1/N!) (R(τ+√(τ²+k²))/2)^N e^{R(τ+√(τ²+k²))/2}, in log form.
double log_E(double tau, int N, double k, double R);

TruncationCertificate truncation_certificate(int N, double tau, double k, double R);

}  // namespace scatter::herglotz
