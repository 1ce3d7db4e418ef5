#include "scatter/enclosure.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <random>

#include <json.hpp>

#include "scatter/io.hpp"
#include "scatter/specfun.hpp"

namespace scatter::enclosure {

using nlohmann::json;
using lcplx = std::complex<long double>;

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kDegenerateSlack = 1e-6;
constexpr double kUnderflow = 1e-300;
constexpr double kNoiseMargin = 100.0;

std::string prefixed(const std::string& header, const char* mark) {
  if (header.empty()) return {};
  std::string out;
  std::size_t pos = 0;
  while (pos <= header.size()) {
    const std::size_t end = header.find('\n', pos);
    const std::string line = header.substr(pos, end == std::string::npos ? std::string::npos : end - pos);
    out += std::string(mark) + line + "\n";
    if (end == std::string::npos) break;
    pos = end + 1;
  }
  return out;
}

}  // namespace

std::string mode_name(Mode m) {
  switch (m) {
    case Mode::FarField: return "far-field single-d";
    case Mode::FarFieldMulti: return "far-field multi-d";
    case Mode::NearField: return "near-field";
    case Mode::NearFieldMulti: return "near-field multi-d";
    case Mode::LimitedAperture: return "limited aperture";
  }
  return "unknown";
}

std::string decision_name(Decision d) {
  switch (d) {
    case Decision::Decays: return "decays";
    case Decision::Diverges: return "diverges";
    case Decision::Undecided: return "undecided";
  }
  return "unknown";
}

Pairing SpectrumSource::pair(int N, double tau, const Direction& omega) const {
  if (N > spec_.m_max)
    throw InputError("pairing: spectrum has m_max = " + std::to_string(spec_.m_max) + " < N = " + std::to_string(N));
  const herglotz::DensityCoeffs dc(N, tau, spec_.k, omega);
  Pairing p;
  double sum_c = 0.0, sum_abs = 0.0;
  for (int m = -N; m <= N; ++m) {
    const cplx t = dc.c(m) * spec_.coeff(m);
    p.value += t;
    sum_c += std::abs(dc.c(m));
    sum_abs += std::abs(t);
  }
  p.noise = sum_c * spec_.floor + kEps * sum_abs;
  if (!std::isfinite(p.value.real()) || !std::isfinite(p.value.imag()) || !std::isfinite(p.noise))
    p.noise = std::numeric_limits<double>::infinity();
  return p;
}

double SpectrumSource::data_scale() const {
  double s = 0.0;
  for (const auto& g : spec_.G) s += std::norm(g);
  s = std::sqrt(s) / (2 * kPi);  // RMS of F over S¹ (Parseval)
  return s > 0.0 ? s : 1.0;
}

CauchySource::CauchySource(const farfield::CauchyData& c, double k, double rel_error)
    : R_(c.R), k_(k), rel_error_(rel_error) {
  const std::size_t n = c.theta.size();
  if (n < 128) throw InputError("cauchy source: need at least 128 samples");
  if (c.u.size() != n || c.du.size() != n) throw InputError("cauchy source: inconsistent sample counts");
  if (!(k > 0.0)) throw InputError("cauchy source: k must be positive");
  if (!(c.R > 0.0)) throw InputError("cauchy source: radius must be positive");
  for (std::size_t j = 0; j < n; ++j)
    if (std::abs(c.theta[j] - 2 * kPi * static_cast<double>(j) / static_cast<double>(n)) > 1e-12)
      throw InputError("cauchy source: samples must sit at theta_j = 2 pi j / n");
  M_ = static_cast<int>(n / 2) - 1;
  const std::size_t len = static_cast<std::size_t>(2 * M_ + 1);
  U_.assign(len, 0.0);
  D_.assign(len, 0.0);
  std::vector<cplx> roots(n);
  for (std::size_t l = 0; l < n; ++l) roots[l] = std::polar(1.0, 2 * kPi * static_cast<double>(l) / static_cast<double>(n));
  parallel_for(len, [&](std::size_t i) {
    const long m = static_cast<long>(i) - M_;
    const std::size_t mm = static_cast<std::size_t>(((m % static_cast<long>(n)) + static_cast<long>(n)) % static_cast<long>(n));
    cplx au = 0.0, ad = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const cplx e = roots[(mm * j) % n];
      au += c.u[j] * e;
      ad += c.du[j] * e;
    }
    U_[i] = au / static_cast<double>(n);
    D_[i] = ad / static_cast<double>(n);
  });
  double su = 0.0, sd = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    su += std::norm(c.u[j]);
    sd += std::norm(c.du[j]);
  }
  scale_ = std::sqrt(su / static_cast<double>(n));
  du_scale_ = std::sqrt(sd / static_cast<double>(n));
  if (!(scale_ > 0.0)) scale_ = 1.0;
}

Pairing CauchySource::pair(int N, double tau, const Direction& omega) const {
  if (N > M_)
    throw InputError("cauchy source: " + std::to_string(2 * (M_ + 1)) + " samples resolve orders up to " +
                     std::to_string(M_) + " < N = " + std::to_string(N));
  if (!(tau > 0.0)) throw InputError("cauchy source: tau must be positive");
  const long double q = tau + std::sqrt(static_cast<long double>(tau) * tau + static_cast<long double>(k_) * k_);
  const lcplx w(std::cos(omega.theta()), std::sin(omega.theta()));
  const lcplx up = -static_cast<long double>(k_) / (q * w);  // b_m,  m ≥ 0
  const lcplx dn = q * w / static_cast<long double>(k_);      // b_{−n}, n > 0
  const auto J = specfun::bessel_j_values<long double>(N + 1, static_cast<long double>(k_ * R_));
  const long double kk = k_;
  cplx acc = 0.0;
  double size_u = 0.0, size_d = 0.0;
  lcplx bp = 1.0L, bm = 1.0L;
  for (int n = 0; n <= N; ++n) {
    const long double Jn = J[static_cast<std::size_t>(n)];
    const long double Jp = n == 0 ? -J[1] : (J[static_cast<std::size_t>(n - 1)] - J[static_cast<std::size_t>(n + 1)]) / 2;
    for (int sgn : {1, -1}) {
      if (n == 0 && sgn < 0) continue;
      const lcplx b = sgn > 0 ? bp : bm;
      const cplx bJ(b * Jn), bJp(b * (kk * Jp));
      const std::size_t i = static_cast<std::size_t>(sgn * n + M_);
      acc += bJ * D_[i] - bJp * U_[i];
      size_d += std::abs(bJ);
      size_u += std::abs(bJp);
    }
    bp *= up;
    bm *= dn;
  }
  const cplx f = farfield::pairing_factor(k_) * (2 * kPi * R_);
  Pairing p;
  p.value = f * acc;
  p.noise = std::abs(f) * (rel_error_ + kEps) * (size_u * scale_ + size_d * du_scale_);
  return p;
}

cplx farfield_indicator(const farfield::FourierSpectrum& spec, const Direction& omega, int N,
                        const herglotz::ScheduleParams& p, double k) {
  if (std::abs(spec.k - k) > 1e-12 * k) throw InputError("farfield_indicator: spectrum wavenumber differs from k");
  return farfield::pair_with_density(spec, herglotz::DensityCoeffs(N, herglotz::tau_schedule(N, p), k, omega));
}

double nearfield_indicator(const farfield::CauchyData& c, const Direction& omega, double tau, double t, double k) {
  const cplx I = farfield::nearfield_pairing(c, [&](const Vec2& y) { return herglotz::cgo_wave(y, tau, k, omega); });
  return std::exp(-tau * t) * std::abs(I);
}

void NLadder::validate() const {
  if (N_min < 1) throw InputError("N ladder: N_min must be at least 1");
  if (N_step < 1) throw InputError("N ladder: N_step must be at least 1");
  if (N_max < N_min) throw InputError("N ladder: N_max < N_min");
}

std::vector<int> NLadder::values() const {
  validate();
  std::vector<int> out;
  for (int N = N_min; N <= N_max; N += N_step) out.push_back(N);
  return out;
}

IndicatorTrace indicator_trace(const PairingSource& src, const Direction& omega, const NLadder& ladder,
                               const herglotz::ScheduleParams& p) {
  p.validate();
  const auto Ns = ladder.values();
  if (Ns.back() > src.max_order())
    throw InputError("indicator trace: N_max = " + std::to_string(Ns.back()) + " exceeds what the data resolve (" +
                     std::to_string(src.max_order()) + ")");
  IndicatorTrace tr;
  tr.omega = omega;
  tr.mode = src.mode();
  tr.data_scale = src.data_scale();
  for (int N : Ns) {
    TraceRecord r;
    r.N = N;
    r.tau = herglotz::tau_schedule(N, p);
    const Pairing pr = src.pair(N, r.tau, omega);
    r.abs_I = std::abs(pr.value);
    r.noise = pr.noise;
    const bool finite = std::isfinite(r.abs_I);
    r.log_over_tau = finite && r.abs_I > kUnderflow ? std::log(r.abs_I) / r.tau : std::nan("");
    r.usable = finite && r.abs_I > kUnderflow && r.abs_I > kNoiseMargin * r.noise;
    tr.records.push_back(r);
  }
  return tr;
}

IndicatorTrace multi_indicator(const IndicatorTrace& a, const Direction& d1, const IndicatorTrace& b,
                               const Direction& d2) {
  if (std::abs(cross(d1.unit(), d2.unit())) <= 1e-12)
    throw InputError("multi_indicator: incident directions are linearly dependent");
  if (a.records.size() != b.records.size()) throw InputError("multi_indicator: traces have different lengths");
  if (std::abs(std::remainder(a.omega.theta() - b.omega.theta(), 2 * kPi)) > 1e-12)
    throw InputError("multi_indicator: traces belong to different directions");
  IndicatorTrace out;
  out.omega = a.omega;
  const bool near = a.mode == Mode::NearField || a.mode == Mode::NearFieldMulti;
  out.mode = near ? Mode::NearFieldMulti : Mode::FarFieldMulti;
  out.data_scale = a.data_scale + b.data_scale;
  for (std::size_t i = 0; i < a.records.size(); ++i) {
    const TraceRecord& x = a.records[i];
    const TraceRecord& y = b.records[i];
    if (x.N != y.N) throw InputError("multi_indicator: traces use different N ladders");
    TraceRecord r;
    r.N = x.N;
    r.tau = x.tau;
    r.abs_I = x.abs_I + y.abs_I;
    r.noise = x.noise + y.noise;
    const bool finite = std::isfinite(r.abs_I);
    r.log_over_tau = finite && r.abs_I > kUnderflow ? std::log(r.abs_I) / r.tau : std::nan("");
    r.usable = finite && r.abs_I > kUnderflow && r.abs_I > kNoiseMargin * r.noise;
    out.records.push_back(r);
  }
  return out;
}

namespace {

SupportEstimate fit_support(const IndicatorTrace& trace, std::size_t upto) {
  std::vector<const TraceRecord*> use;
  for (std::size_t i = 0; i < trace.records.size() && i < upto; ++i)
    if (trace.records[i].usable) use.push_back(&trace.records[i]);
  if (use.size() < 5)
    throw NumericalError("estimate_support: " + std::to_string(use.size()) +
                         " usable records (need 5); the indicator is below its noise level");
  const std::size_t first = use.size() / 2;
  const double logs = std::log(trace.data_scale);
  double n = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = first; i < use.size(); ++i) {
    const double t = use[i]->tau;
    const double x = std::log(t) / t;
    const double y = (std::log(use[i]->abs_I) - logs) / t;
    n += 1;
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  SupportEstimate e;
  const double det = n * sxx - sx * sx;
  if (std::abs(det) > 1e-14 * n * sxx) {
    e.b = (n * sxy - sx * sy) / det;
    e.h = (sy - e.b * sx) / n;
  } else {
    e.h = sy / n;
  }
  double ss = 0.0;
  for (std::size_t i = first; i < use.size(); ++i) {
    const double t = use[i]->tau;
    const double r = (std::log(use[i]->abs_I) - logs) / t - (e.h + e.b * std::log(t) / t);
    ss += r * r;
  }
  e.residual = std::sqrt(ss / n);
  e.used = static_cast<int>(n);
  e.raw_last = use.back()->log_over_tau;
  return e;
}

}  // namespace

SupportEstimate estimate_support(const IndicatorTrace& trace) {
  return fit_support(trace, static_cast<std::size_t>(-1));
}

Decision classify_t(const IndicatorTrace& trace, double t, double dead_band, std::size_t upto) {
  if (std::min(upto, trace.records.size()) < 5) throw InputError("classify_t: need at least 5 records");
  std::size_t usable = 0;
  for (std::size_t i = 0; i < trace.records.size() && i < upto; ++i) usable += trace.records[i].usable;
  if (usable < 5) return Decision::Undecided;
  const double slope = fit_support(trace, upto).h - t;
  if (std::abs(slope) <= dead_band) return Decision::Undecided;
  return slope > 0 ? Decision::Diverges : Decision::Decays;
}

std::vector<Direction> direction_grid(int n, double jitter_deg, std::uint64_t seed) {
  if (n < 1) throw InputError("direction grid: need at least one direction");
  if (!(jitter_deg >= 0.0)) throw InputError("direction grid: jitter must be nonnegative");
  std::mt19937_64 rng(seed);
  std::vector<Direction> out;
  for (int i = 0; i < n; ++i) {
    const double u = static_cast<double>(rng() >> 11) * 0x1p-53;
    out.emplace_back(2 * kPi * i / n + (2 * u - 1) * jitter_deg * kPi / 180);
  }
  return out;
}

void ReconstructionParams::validate() const {
  schedule.validate();
  ladder.validate();
  if (directions < 3) throw InputError("reconstruction: need at least 3 directions");
  if (!(jitter_deg >= 0.0 && jitter_deg < 90.0)) throw InputError("reconstruction: jitter must lie in [0, 90) degrees");
}

ReconstructionResult reconstruct_hull(const std::vector<IncidentSource>& sources, const ReconstructionParams& p) {
  p.validate();
  return reconstruct_hull(sources, p, direction_grid(p.directions, p.jitter_deg, p.seed));
}

ReconstructionResult reconstruct_hull(const std::vector<IncidentSource>& sources, const ReconstructionParams& p,
                                      const std::vector<Direction>& omegas) {
  p.schedule.validate();
  p.ladder.validate();
  if (sources.empty() || sources.size() > 2) throw InputError("reconstruct_hull: need one or two data sets");
  for (const auto& s : sources)
    if (!s.source) throw InputError("reconstruct_hull: missing data source");
  const double k = sources[0].source->k();
  if (sources.size() == 2) {
    if (std::abs(cross(sources[0].d.unit(), sources[1].d.unit())) <= 1e-12)
      throw InputError("reconstruct_hull: incident directions are linearly dependent");
    if (std::abs(sources[1].source->k() - k) > 1e-12 * k)
      throw InputError("reconstruct_hull: data sets have different wavenumbers");
  }
  ReconstructionResult res;
  res.params = p;
  res.k = k;
  for (const auto& s : sources) res.incident.push_back(s.d);
  res.directions.resize(omegas.size());
  parallel_for(omegas.size(), [&](std::size_t i) {
    DirectionResult& dr = res.directions[i];
    dr.omega = omegas[i];
    dr.trace = indicator_trace(*sources[0].source, omegas[i], p.ladder, p.schedule);
    if (sources.size() == 2)
      dr.trace = multi_indicator(dr.trace, sources[0].d,
                                 indicator_trace(*sources[1].source, omegas[i], p.ladder, p.schedule), sources[1].d);
    try {
      dr.estimate = estimate_support(dr.trace);
    } catch (const NumericalError& e) {
      dr.skipped = e.what();
    }
  });
  res.mode = res.directions.empty() ? sources[0].source->mode() : res.directions[0].trace.mode;
  std::vector<geometry::SupportSample> samples;
  for (const auto& dr : res.directions)
    if (dr.estimate) samples.push_back({dr.omega, dr.estimate->h});
  if (samples.size() < 3)
    throw NumericalError("reconstruct_hull: only " + std::to_string(samples.size()) + " usable directions");
  auto hull = geometry::hull_from_support(samples, p.schedule.R);
  if (hull.empty) {
    // Points and segments have zero area; relax slightly before calling the estimates inconsistent.
    for (auto& s : samples) s.h += kDegenerateSlack * p.schedule.R;
    hull = geometry::hull_from_support(samples, p.schedule.R);
  }
  if (hull.empty) throw NumericalError("reconstruct_hull: support estimates are inconsistent (empty intersection)");
  res.hull = hull.vertices;
  return res;
}

std::string trace_csv(const IndicatorTrace& trace, const std::vector<double>& t_values, const std::string& header) {
  std::string out = prefixed(header, "# ");
  out += "N,tau,absI,logI_over_tau,usable";
  for (double t : t_values) out += ",t=" + io::num(t);
  out += "\n";
  for (std::size_t i = 0; i < trace.records.size(); ++i) {
    const TraceRecord& r = trace.records[i];
    out += std::to_string(r.N) + "," + io::num(r.tau) + "," + io::num(r.abs_I) + "," + io::num(r.log_over_tau) + "," +
           (r.usable ? "1" : "0");
    for (double t : t_values)
      out += "," + (i + 1 >= 5 ? decision_name(classify_t(trace, t, 0.02, i + 1)) : std::string("undecided"));
    out += "\n";
  }
  return out;
}

std::string trace_dat(const IndicatorTrace& trace, const std::string& header) {
  std::string out = prefixed(header, "# ");
  out += "# tau logI_over_tau\n";
  for (const auto& r : trace.records)
    if (r.usable) out += io::num(r.tau) + " " + io::num(r.log_over_tau) + "\n";
  return out;
}

std::string hull_dat(const geometry::Polygon& hull, const std::string& header) {
  std::string out = prefixed(header, "# ");
  out += "# x y\n";
  for (const auto& v : hull) out += io::num(v.x) + " " + io::num(v.y) + "\n";
  if (!hull.empty()) out += io::num(hull.front().x) + " " + io::num(hull.front().y) + "\n";
  return out;
}

std::string hull_svg(const geometry::Polygon& hull, const std::vector<geometry::Polygon>& reference,
                     const std::string& comment) {
  double lo_x = 1e300, lo_y = 1e300, hi_x = -1e300, hi_y = -1e300;
  auto grow = [&](const geometry::Polygon& p) {
    for (const auto& v : p) {
      lo_x = std::min(lo_x, v.x);
      lo_y = std::min(lo_y, v.y);
      hi_x = std::max(hi_x, v.x);
      hi_y = std::max(hi_y, v.y);
    }
  };
  grow(hull);
  for (const auto& r : reference) grow(r);
  if (lo_x > hi_x) lo_x = lo_y = -1, hi_x = hi_y = 1;
  const double pad = 0.1 * std::max({hi_x - lo_x, hi_y - lo_y, 1e-3});
  lo_x -= pad, lo_y -= pad, hi_x += pad, hi_y += pad;
  char buf[160];
  std::string out = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  if (!comment.empty()) out += "<!-- " + comment + " -->\n";
  std::snprintf(buf, sizeof buf,
                "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"480\" height=\"480\" viewBox=\"%.6f %.6f %.6f %.6f\">\n",
                lo_x, -hi_y, hi_x - lo_x, hi_y - lo_y);
  out += buf;
  const double stroke = 0.005 * (hi_x - lo_x);
  auto poly = [&](const geometry::Polygon& p, const char* color, const char* dash) {
    std::string pts;
    for (const auto& v : p) {
      std::snprintf(buf, sizeof buf, "%.6f,%.6f ", v.x, -v.y);
      pts += buf;
    }
    std::snprintf(buf, sizeof buf, "<polygon fill=\"none\" stroke=\"%s\" stroke-width=\"%.6f\"%s points=\"", color, stroke,
                  dash);
    out += buf + pts + "\"/>\n";
  };
  for (const auto& r : reference) poly(r, "black", " stroke-dasharray=\"0.02,0.02\"");
  poly(hull, "#1f5fbf", "");
  out += "</svg>\n";
  return out;
}

std::string result_json(const ReconstructionResult& r, const std::map<std::string, std::string>& meta) {
  json j;
  j["version"] = 1;
  json m = json::object();
  for (const auto& [key, val] : meta) m[key] = val;
  j["meta"] = std::move(m);
  j["mode"] = mode_name(r.mode);
  j["k"] = r.k;
  json inc = json::array();
  for (const auto& d : r.incident) inc.push_back({d.unit().x, d.unit().y});
  j["incident"] = std::move(inc);
  const auto& p = r.params;
  j["params"] = {{"beta", p.schedule.beta},     {"R", p.schedule.R},         {"tau_offset", p.schedule.offset},
                 {"N_min", p.ladder.N_min},      {"N_max", p.ladder.N_max},   {"N_step", p.ladder.N_step},
                 {"directions", p.directions},   {"jitter_deg", p.jitter_deg}, {"seed", p.seed}};
  json dirs = json::array();
  for (const auto& d : r.directions) {
    json e = {{"theta", d.omega.theta()}, {"omega", {d.omega.unit().x, d.omega.unit().y}}};
    int usable = 0;
    for (const auto& rec : d.trace.records) usable += rec.usable;
    e["records"] = d.trace.records.size();
    e["usable_records"] = usable;
    if (d.estimate) {
      e["h_est"] = d.estimate->h;
      e["slope_b"] = d.estimate->b;
      e["raw_last"] = d.estimate->raw_last;
      e["fit_residual"] = d.estimate->residual;
      e["fit_records"] = d.estimate->used;
    } else {
      e["skipped"] = d.skipped;
    }
    dirs.push_back(std::move(e));
  }
  j["directions"] = std::move(dirs);
  json hull = json::array();
  for (const auto& v : r.hull) hull.push_back({v.x, v.y});
  j["hull"] = std::move(hull);
  return j.dump(1) + "\n";
}

}  // namespace scatter::enclosure
