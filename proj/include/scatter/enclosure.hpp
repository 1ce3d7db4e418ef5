#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "scatter/common.hpp"
#include "scatter/farfield.hpp"
#include "scatter/geometry.hpp"
#include "scatter/herglotz.hpp"

namespace scatter::enclosure {

using geometry::Direction;

enum class Mode { FarField, FarFieldMulti, NearField, NearFieldMulti, LimitedAperture };

std::string mode_name(Mode m);

/// Pairing value with an estimate of its rounding/data error.
struct Pairing {
  cplx value{};
  double noise = 0.0;
};

/// Evaluates ∫ F(−φ) g_N(φ) dσ(φ) for the density g_N(·; τ, k, ω).
class PairingSource {
 public:
  virtual ~PairingSource() = default;
  virtual Pairing pair(int N, double tau, const Direction& omega) const = 0;
  virtual double k() const = 0;
  virtual Mode mode() const = 0;
  /// Largest N the source can pair with.
  virtual int max_order() const = 0;
  /// RMS amplitude of the data; the support estimate fits log(|I|/scale) so it is scale invariant.
  virtual double data_scale() const = 0;
};

/// Σ c_m Ĝ_m. Noise is Σ|c_m|·floor + ε Σ|c_m Ĝ_m|; the growing coefficients c_{−m}
/// multiply the floor of a sampled spectrum, which limits this route to small N.
class SpectrumSource : public PairingSource {
 public:
  explicit SpectrumSource(farfield::FourierSpectrum spec) : spec_(std::move(spec)) {}
  Pairing pair(int N, double tau, const Direction& omega) const override;
  double k() const override { return spec_.k; }
  Mode mode() const override { return Mode::FarField; }
  int max_order() const override { return spec_.m_max; }
  double data_scale() const override;
  const farfield::FourierSpectrum& spectrum() const { return spec_; }

 private:
  farfield::FourierSpectrum spec_;
};

/// The same functional through the Green identity on |y| = R:
///   pairing_factor(k) · 2πR Σ_m b_m (J_|m|(kR) D_m − k J'_|m|(kR) U_m),
/// with U_m, D_m the Fourier coefficients of u and ∂_r u against e^{imθ}. The products
/// c_m J_|m| are formed in extended precision since each factor alone leaves the double range.
class CauchySource : public PairingSource {
 public:
  /// rel_error is the relative accuracy of the Cauchy data (solver residual level).
  CauchySource(const farfield::CauchyData& c, double k, double rel_error = 1e-9);
  Pairing pair(int N, double tau, const Direction& omega) const override;
  double k() const override { return k_; }
  Mode mode() const override { return Mode::NearField; }
  int max_order() const override { return M_; }
  double data_scale() const override { return scale_; }

 private:
  double R_, k_, rel_error_, scale_ = 0.0, du_scale_ = 0.0;
  int M_ = 0;
  std::vector<cplx> U_, D_;  // index m + M
};

/// Far-field indicator integral at τ = tau_schedule(N, p).
cplx farfield_indicator(const farfield::FourierSpectrum& spec, const Direction& omega, int N,
                        const herglotz::ScheduleParams& p, double k);

/// e^{−τt} |∮_{|x|=R} (∂u/∂ν v − ∂v/∂ν u) dσ| with v = cgo_wave(·, τ, k, ω).
double nearfield_indicator(const farfield::CauchyData& c, const Direction& omega, double tau, double t, double k);

struct NLadder {
  int N_min = 10;
  int N_max = 240;
  int N_step = 2;

  void validate() const;
  std::vector<int> values() const;
};

struct TraceRecord {
  int N = 0;
  double tau = 0.0;
  double abs_I = 0.0;
  double log_over_tau = 0.0;  // log|I|/τ, NaN when underflowed
  double noise = 0.0;
  bool usable = false;        // above 1e−300 and 100× the noise estimate
};

struct IndicatorTrace {
  Direction omega;
  Mode mode = Mode::FarField;
  double data_scale = 1.0;
  std::vector<TraceRecord> records;
};

IndicatorTrace indicator_trace(const PairingSource& src, const Direction& omega, const NLadder& ladder,
                               const herglotz::ScheduleParams& p);

/// Record-wise |I^{d₁}| + |I^{d₂}|; d₁ and d₂ must be linearly independent.
IndicatorTrace multi_indicator(const IndicatorTrace& a, const Direction& d1, const IndicatorTrace& b,
                               const Direction& d2);

struct SupportEstimate {
  double h = 0.0;          // a in log(|I|/s)/τ ≈ a + b log τ/τ
  double b = 0.0;
  double raw_last = 0.0;   // log|I|/τ at the last usable record
  double residual = 0.0;   // RMS misfit of the fit
  int used = 0;            // records in the fit
};

/// Fit over the last half of the usable records; needs at least 5 of them.
SupportEstimate estimate_support(const IndicatorTrace& trace);

enum class Decision { Decays, Diverges, Undecided };

std::string decision_name(Decision d);

/// Sign of the limiting slope a − t of log(e^{−τt}|I|) in the fitted model, with a dead-band.
/// Up to `upto` records are considered (all by default).
Decision classify_t(const IndicatorTrace& trace, double t, double dead_band = 0.02,
                    std::size_t upto = static_cast<std::size_t>(-1));

/// n uniform angles, each shifted by a uniform offset in ±jitter_deg drawn from a seeded generator.
std::vector<Direction> direction_grid(int n, double jitter_deg, std::uint64_t seed);

struct ReconstructionParams {
  herglotz::ScheduleParams schedule{0.5, 2.0, 0.0};
  NLadder ladder;
  int directions = 16;
  double jitter_deg = 3.0;
  std::uint64_t seed = 1;

  void validate() const;
};

struct DirectionResult {
  Direction omega;
  IndicatorTrace trace;
  std::optional<SupportEstimate> estimate;
  std::string skipped;  // reason when no estimate
};

struct ReconstructionResult {
  ReconstructionParams params;
  double k = 0.0;
  Mode mode = Mode::FarField;
  std::vector<Direction> incident;
  std::vector<DirectionResult> directions;
  geometry::Polygon hull;
};

struct IncidentSource {
  Direction d;
  std::shared_ptr<const PairingSource> source;
};

/// One source gives the single-d indicator, two give the combined indicator. A zero-area
/// intersection (point or segment) is retried with the estimates relaxed by 1e−6·R.
ReconstructionResult reconstruct_hull(const std::vector<IncidentSource>& sources, const ReconstructionParams& p);

/// Same, on an explicit direction list.
ReconstructionResult reconstruct_hull(const std::vector<IncidentSource>& sources, const ReconstructionParams& p,
                                      const std::vector<Direction>& omegas);

/// Trace CSV: N, tau, absI, logI_over_tau, usable, then one column per t with the running classification.
std::string trace_csv(const IndicatorTrace& trace, const std::vector<double>& t_values, const std::string& header = {});
/// "tau logI_over_tau" lines of the usable records.
std::string trace_dat(const IndicatorTrace& trace, const std::string& header = {});
/// Closed polyline "x y".
std::string hull_dat(const geometry::Polygon& hull, const std::string& header = {});
std::string hull_svg(const geometry::Polygon& hull, const std::vector<geometry::Polygon>& reference = {},
                     const std::string& comment = {});
std::string result_json(const ReconstructionResult& r, const std::map<std::string, std::string>& meta = {});

}  // namespace scatter::enclosure
