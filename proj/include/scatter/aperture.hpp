#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "scatter/common.hpp"
#include "scatter/enclosure.hpp"
#include "scatter/farfield.hpp"
#include "scatter/geometry.hpp"

namespace scatter::aperture {

using geometry::Direction;

/// ∫_{B_R} e^{a·y} dy for complex a (a·a is the bilinear square).
cplx disc_exp_integral(cplx ax, cplx ay, double R);

/// Herglotz operator Hg(y) = ∫_{−Γ} e^{iky·φ} g(φ) dσ(φ) restricted to B_R, with its H¹(B_R) Gram.
struct ApertureOperator {
  farfield::Aperture gamma;
  int n = 0;                   // data samples on Γ
  double k = 1.0, R = 1.0;
  std::vector<double> phi;     // density nodes on −Γ: φ_j = θ_j + π
  std::vector<double> weights; // quadrature weights on −Γ
  Eigen::MatrixXcd gram;       // √w_j √w_l ⟨e_l, e_j⟩_{H¹(B_R)}, e_j = e^{iky·φ_j}
  Eigen::VectorXd lambda;      // eigenvalues of gram, ascending
  Eigen::MatrixXcd Q;          // eigenvectors

  /// Hg and its gradient at y for nodal density values g_j.
  FieldValue apply(const std::vector<cplx>& g, const Vec2& y) const;
  /// ⟨Hg, Hh⟩_{H¹(B_R)}.
  cplx inner(const std::vector<cplx>& g, const std::vector<cplx>& h) const;
};

/// Quadrature weights for the midpoints of n equal cells of an interval of length L, with
/// Euler–Maclaurin corrections on the p nodes nearest each end (needs n ≥ 2p, p ≤ 10).
std::vector<double> corrected_midpoint_weights(int n, double L, int p = 6);

ApertureOperator assemble_operator(const farfield::Aperture& gamma, int n, double k, double R);

/// ⟨v, e^{iky·φ}⟩_{H¹(B_R)} for v = cgo_wave(·, τ, k, ω).
cplx cgo_herglotz_inner(double tau, double k, const Direction& omega, double phi, double R);
/// ‖cgo_wave(·, τ, k, ω)‖_{H¹(B_R)}.
double cgo_h1_norm(double tau, double k, double R);

struct MinNormDensity {
  std::vector<cplx> g;           // nodal values on −Γ
  double alpha = 0.0;            // +inf when the trivial solution g = 0 suffices
  bool trivial = false;
  double achieved = 0.0;         // ‖Hg − v‖_{H¹(B_R)}
  double delta = 0.0;
  double v_norm = 0.0;
  double tau = 0.0;
  Direction omega;
  double k = 1.0;
  int iterations = 0;
};

/// Discrepancy ‖Hg_α − v‖_{H¹} for g_α = (αI + H*H)^{−1}H*v.
double discrepancy(const ApertureOperator& op, double tau, const Direction& omega, double alpha);

/// Tikhonov density whose discrepancy equals δ, by bisection on log α.
MinNormDensity min_norm_density(const ApertureOperator& op, double tau, const Direction& omega, double delta);

/// ∫_Γ F(φ) g(−φ) dσ(φ) on the data nodes.
cplx limited_indicator(const farfield::FarFieldDataset& ds, const ApertureOperator& op, const MinNormDensity& mnd);

struct LimitedResult {
  enclosure::IndicatorTrace trace;
  std::optional<enclosure::SupportEstimate> estimate;
  std::string skipped;
  std::vector<MinNormDensity> densities;  // trivial entries where the solve failed
  std::vector<std::string> failures;      // one per failed τ
};

/// Indicator over the τ ladder with δ = delta_rel·‖v‖_{H¹}, then the enclosure fit.
/// Assumes 0 lies inside the obstacle. A τ whose Morozov solve fails is kept as an unusable record.
LimitedResult limited_support_estimate(const farfield::FarFieldDataset& ds, const ApertureOperator& op,
                                       const Direction& omega, const std::vector<double>& taus,
                                       double delta_rel = 1e-3);

}  // namespace scatter::aperture
