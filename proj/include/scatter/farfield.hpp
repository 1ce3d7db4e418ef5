#pragma once

#include <map>
#include <string>
#include <vector>

#include "scatter/common.hpp"
#include "scatter/geometry.hpp"
#include "scatter/herglotz.hpp"

namespace scatter::farfield {

using geometry::Direction;

/// Observation directions: the whole circle, or the arc [theta1, theta2].
struct Aperture {
  bool full = true;
  double theta1 = 0.0;
  double theta2 = 2 * kPi;

  static Aperture circle() { return {}; }
  static Aperture arc(double t1, double t2);
  double length() const { return theta2 - theta1; }
};

/// Far field F(φ_j; d, k) on n angles. Full aperture uses φ_j = 2πj/n; an arc uses
/// midpoints θ₁ + (j + ½)(θ₂ − θ₁)/n.
struct FarFieldDataset {
  double k = 1.0;
  Direction d;
  Aperture aperture;
  int n = 0;
  std::vector<cplx> values;
  std::map<std::string, std::string> provenance;

  double angle(int j) const;
  std::vector<double> angles() const;
  void validate() const;
};

std::vector<double> aperture_angles(const Aperture& ap, int n);

/// Ĝ_m = ∫ F(−φ) φ^m dσ(φ) for |m| ≤ m_max.
struct FourierSpectrum {
  int m_max = 0;
  double k = 1.0;
  std::vector<cplx> G;  // index m + m_max
  double floor = 0.0;   // absolute error level of each coefficient (rounding of sampled data)

  cplx coeff(int m) const { return G[static_cast<std::size_t>(m + m_max)]; }
};

/// Trapezoid rule on the uniform grid; the reflection φ ↦ −φ is an index shift by n/2.
FourierSpectrum fourier_spectrum(const FarFieldDataset& ds, int m_max);

/// Exact spectrum of F(−φ) = e^{iky₀·φ}: Ĝ_m = 2π i^{|m|} J_{|m|}(k|y₀|) e^{imθ₀}.
FourierSpectrum plane_wave_spectrum(double k, const Vec2& y0, int m_max);

/// Σ_{|m|≤N} c_m Ĝ_m = ∫ F(−φ) g_N(φ) dσ(φ).
cplx pair_with_density(const FourierSpectrum& spec, const herglotz::DensityCoeffs& dc);

/// Direct trapezoid value of ∫ F(−φ) g(φ) dσ on a full-aperture dataset (cross-check).
cplx pair_by_quadrature(const FarFieldDataset& ds, const herglotz::DensityCoeffs& dc);

/// Total field and its radial derivative at n uniform points of the circle |x| = R.
struct CauchyData {
  double R = 0.0;
  std::vector<double> theta;
  std::vector<cplx> u;
  std::vector<cplx> du;  // ∂u/∂r
};

/// ∮_{|y|=R} (∂u/∂ν v − ∂v/∂ν u) dσ with ν the outward radial normal.
cplx nearfield_pairing(const CauchyData& c, const Field& v);

/// −e^{iπ/4}/√(8πk): near-field pairing times this equals the far-field pairing.
cplx pairing_factor(double k);

FarFieldDataset parse_dataset(const std::string& text);
FarFieldDataset read_dataset(const std::string& path);
std::string dataset_to_json(const FarFieldDataset& ds);
void write_dataset(const FarFieldDataset& ds, const std::string& path);

std::string spectrum_csv(const FourierSpectrum& spec);
std::string cauchy_csv(const CauchyData& c);

}  // namespace scatter::farfield
