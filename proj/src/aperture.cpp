#include "scatter/aperture.hpp"

#include <cmath>
#include <limits>

#include "scatter/herglotz.hpp"
#include "scatter/io.hpp"

namespace scatter::aperture {

namespace {

constexpr double kGammaMin = 1e-6;

// ω and the complex CGO exponent a₀ with v = e^{a₀·y}, matching cgo_wave.
std::pair<cplx, cplx> cgo_exponent(double tau, double k, const Direction& omega) {
  const double s = std::sqrt(tau * tau + k * k);
  const Vec2 w = omega.unit(), p = omega.perp();
  return {cplx(tau * w.x, s * p.x), cplx(tau * w.y, s * p.y)};
}

bool same_aperture(const farfield::Aperture& a, const farfield::Aperture& b) {
  if (a.full || b.full) return a.full == b.full;
  return std::abs(a.theta1 - b.theta1) <= 1e-12 && std::abs(a.theta2 - b.theta2) <= 1e-12;
}

std::vector<cplx> rhs(const ApertureOperator& op, double tau, const Direction& omega) {
  std::vector<cplx> f(op.phi.size());
  for (std::size_t j = 0; j < f.size(); ++j)
    f[j] = std::sqrt(op.weights[j]) * cgo_herglotz_inner(tau, op.k, omega, op.phi[j], op.R);
  return f;
}

struct Spectral {
  Eigen::VectorXcd gamma;  // Q* f
  Eigen::VectorXd lam;     // eigenvalues clamped at 0
  double v2 = 0.0;         // ‖v‖²

  double discrepancy(double alpha) const {
    double s = 0.0;
    for (Eigen::Index i = 0; i < lam.size(); ++i) {
      const double l = lam[i];
      s += std::norm(gamma[i]) * (l + 2 * alpha) / ((l + alpha) * (l + alpha));
    }
    return std::sqrt(std::max(v2 - s, 0.0));
  }
};

Spectral spectral(const ApertureOperator& op, double tau, const Direction& omega) {
  const auto f = rhs(op, tau, omega);
  Spectral sp;
  sp.gamma = op.Q.adjoint() * Eigen::Map<const Eigen::VectorXcd>(f.data(), static_cast<Eigen::Index>(f.size()));
  sp.lam = op.lambda.cwiseMax(0.0);
  const double nv = cgo_h1_norm(tau, op.k, op.R);
  sp.v2 = nv * nv;
  return sp;
}

}  // namespace

cplx disc_exp_integral(cplx ax, cplx ay, double R) {
  const cplx zeta = (ax * ax + ay * ay) * (R * R / 4);
  const double az = std::abs(zeta);
  cplx term = 1.0, sum = 1.0;
  double peak = 1.0;
  for (int n = 0; n < 100000; ++n) {
    term *= zeta / (static_cast<double>(n + 1) * (n + 2));
    sum += term;
    peak = std::max(peak, std::abs(term));
    if (n > 2 * std::sqrt(az) + 2 && std::abs(term) < 1e-18 * peak) break;
  }
  return kPi * R * R * sum;
}

cplx cgo_herglotz_inner(double tau, double k, const Direction& omega, double phi, double R) {
  const auto [a0x, a0y] = cgo_exponent(tau, k, omega);
  const double px = std::cos(phi), py = std::sin(phi);
  const cplx ik(0.0, k);
  const cplx a0_dot_phi = a0x * px + a0y * py;
  return (1.0 - ik * a0_dot_phi) * disc_exp_integral(a0x - ik * px, a0y - ik * py, R);
}

double cgo_h1_norm(double tau, double k, double R) {
  const double s2 = tau * tau + k * k;
  const double d = disc_exp_integral(2 * tau, 0.0, R).real();
  return std::sqrt((1 + tau * tau + s2) * d);
}

std::vector<double> corrected_midpoint_weights(int n, double L, int p) {
  if (p < 1 || p > 10) throw InputError("corrected midpoint: p must lie in [1, 10]");
  if (n < 2 * p) throw InputError("corrected midpoint: need at least 2p nodes");
  if (!(L > 0.0)) throw InputError("corrected midpoint: interval length must be positive");
  // B_{2j}(1/2) for j = 1..5
  const double b_half[6] = {0.0, -1.0 / 12, 7.0 / 240, -31.0 / 1344, 127.0 / 3840, -2555.0 / 33792};
  Eigen::MatrixXd A(p, p);
  Eigen::VectorXd e = Eigen::VectorXd::Zero(p);
  for (int q = 0; q < p; ++q) {
    for (int i = 0; i < p; ++i) A(q, i) = std::pow(i + 0.5, q);
    if (q % 2 == 1) e[q] = b_half[(q + 1) / 2] / (q + 1);
  }
  const Eigen::VectorXd c = A.fullPivLu().solve(e);
  const double h = L / n;
  std::vector<double> w(static_cast<std::size_t>(n), h);
  for (int i = 0; i < p; ++i) {
    w[static_cast<std::size_t>(i)] += h * c[i];
    w[static_cast<std::size_t>(n - 1 - i)] += h * c[i];
  }
  for (double x : w)
    if (!(x > 0.0)) throw NumericalError("corrected midpoint: nonpositive weight");
  return w;
}

ApertureOperator assemble_operator(const farfield::Aperture& gamma, int n, double k, double R) {
  if (!gamma.full && !(gamma.length() >= kGammaMin)) throw InputError("aperture: degenerate arc (length < 1e-6)");
  if (!(R > 0.0)) throw InputError("aperture: R must be positive");
  if (!(k > 0.0)) throw InputError("aperture: k must be positive");
  if (n < 12) throw InputError("aperture: need at least 12 samples");
  ApertureOperator op;
  op.gamma = gamma;
  op.n = n;
  op.k = k;
  op.R = R;
  const auto theta = farfield::aperture_angles(gamma, n);
  for (double t : theta) op.phi.push_back(t + kPi);
  op.weights = gamma.full ? std::vector<double>(static_cast<std::size_t>(n), 2 * kPi / n)
                          : corrected_midpoint_weights(n, gamma.length());
  op.gram.resize(n, n);
  const cplx ik(0.0, k);
  parallel_for(static_cast<std::size_t>(n), [&](std::size_t j) {
    for (std::size_t l = 0; l <= j; ++l) {
      const double dx = std::cos(op.phi[l]) - std::cos(op.phi[j]);
      const double dy = std::sin(op.phi[l]) - std::sin(op.phi[j]);
      const cplx kern = (1 + k * k * std::cos(op.phi[l] - op.phi[j])) * disc_exp_integral(ik * dx, ik * dy, R);
      const cplx g = std::sqrt(op.weights[j] * op.weights[l]) * kern;
      op.gram(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(l)) = g;
      op.gram(static_cast<Eigen::Index>(l), static_cast<Eigen::Index>(j)) = std::conj(g);
    }
  });
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(op.gram);
  if (es.info() != Eigen::Success) throw NumericalError("aperture: Gram eigensolve failed");
  op.lambda = es.eigenvalues();
  op.Q = es.eigenvectors();
  return op;
}

FieldValue ApertureOperator::apply(const std::vector<cplx>& g, const Vec2& y) const {
  if (g.size() != phi.size()) throw InputError("aperture: density has the wrong length");
  FieldValue f;
  for (std::size_t j = 0; j < phi.size(); ++j) {
    const double px = std::cos(phi[j]), py = std::sin(phi[j]);
    const cplx e = weights[j] * g[j] * std::polar(1.0, k * (y.x * px + y.y * py));
    f.value += e;
    f.dx += cplx(0.0, k * px) * e;
    f.dy += cplx(0.0, k * py) * e;
  }
  return f;
}

cplx ApertureOperator::inner(const std::vector<cplx>& g, const std::vector<cplx>& h) const {
  if (g.size() != phi.size() || h.size() != phi.size()) throw InputError("aperture: density has the wrong length");
  Eigen::VectorXcd x(g.size()), z(h.size());
  for (std::size_t j = 0; j < g.size(); ++j) {
    const double s = std::sqrt(weights[j]);
    x[static_cast<Eigen::Index>(j)] = s * g[j];
    z[static_cast<Eigen::Index>(j)] = s * h[j];
  }
  return z.dot(gram * x);
}

double discrepancy(const ApertureOperator& op, double tau, const Direction& omega, double alpha) {
  if (!(alpha > 0.0)) throw InputError("discrepancy: alpha must be positive");
  return spectral(op, tau, omega).discrepancy(alpha);
}

MinNormDensity min_norm_density(const ApertureOperator& op, double tau, const Direction& omega, double delta) {
  if (!(tau > 0.0)) throw InputError("min_norm_density: tau must be positive");
  if (!(delta > 0.0)) throw InputError("min_norm_density: delta must be positive");
  const Spectral sp = spectral(op, tau, omega);
  MinNormDensity m;
  m.delta = delta;
  m.v_norm = std::sqrt(sp.v2);
  m.tau = tau;
  m.omega = omega;
  m.k = op.k;
  m.g.assign(op.phi.size(), 0.0);
  if (delta >= m.v_norm) {
    m.trivial = true;
    m.alpha = std::numeric_limits<double>::infinity();
    m.achieved = m.v_norm;
    return m;
  }
  const double lmax = std::max(op.lambda.maxCoeff(), std::numeric_limits<double>::min());
  double lo = -14, hi = 2;
  const double d_lo = sp.discrepancy(std::pow(10.0, lo) * lmax), d_hi = sp.discrepancy(std::pow(10.0, hi) * lmax);
  if (!(d_lo < delta && delta < d_hi))
    throw NumericalError("min_norm_density: Morozov bracket failed at tau = " + io::num(tau) +
                         ": discrepancy/||v|| spans [" + io::num(d_lo / m.v_norm) + ", " + io::num(d_hi / m.v_norm) +
                         "] over alpha/lambda_max in [1e-14, 1e2] but delta/||v|| = " + io::num(delta / m.v_norm));
  double s = 0.5 * (lo + hi), d = 0.0;
  int it = 0;
  for (; it < 200; ++it) {
    s = 0.5 * (lo + hi);
    d = sp.discrepancy(std::pow(10.0, s) * lmax);
    if (std::abs(d - delta) <= 1e-8 * delta) break;
    (d < delta ? lo : hi) = s;
  }
  if (std::abs(d - delta) > 1e-8 * delta)
    throw NumericalError("min_norm_density: bisection stalled with discrepancy " + std::to_string(d) +
                         " against delta = " + std::to_string(delta));
  m.alpha = std::pow(10.0, s) * lmax;
  m.achieved = d;
  m.iterations = it + 1;
  Eigen::VectorXcd c(sp.gamma.size());
  for (Eigen::Index i = 0; i < c.size(); ++i) c[i] = sp.gamma[i] / (sp.lam[i] + m.alpha);
  const Eigen::VectorXcd x = op.Q * c;
  for (std::size_t j = 0; j < m.g.size(); ++j) m.g[j] = x[static_cast<Eigen::Index>(j)] / std::sqrt(op.weights[j]);
  return m;
}

cplx limited_indicator(const farfield::FarFieldDataset& ds, const ApertureOperator& op, const MinNormDensity& mnd) {
  if (!same_aperture(ds.aperture, op.gamma)) throw InputError("limited_indicator: dataset aperture differs from the operator's");
  if (ds.n != op.n) throw InputError("limited_indicator: dataset has " + std::to_string(ds.n) + " samples, operator " +
                                     std::to_string(op.n));
  if (std::abs(ds.k - op.k) > 1e-12 * op.k || std::abs(mnd.k - op.k) > 1e-12 * op.k)
    throw InputError("limited_indicator: wavenumbers differ");
  if (mnd.g.size() != op.phi.size()) throw InputError("limited_indicator: density does not match the operator");
  cplx acc = 0.0;
  for (std::size_t j = 0; j < op.phi.size(); ++j) acc += op.weights[j] * ds.values[j] * mnd.g[j];
  return acc;
}

LimitedResult limited_support_estimate(const farfield::FarFieldDataset& ds, const ApertureOperator& op,
                                       const Direction& omega, const std::vector<double>& taus, double delta_rel) {
  if (taus.empty()) throw InputError("limited_support_estimate: empty tau ladder");
  for (std::size_t i = 0; i < taus.size(); ++i)
    if (!(taus[i] > 0.0) || (i > 0 && !(taus[i] > taus[i - 1])))
      throw InputError("limited_support_estimate: tau ladder must be positive and increasing");
  if (!(delta_rel > 0.0 && delta_rel < 1.0)) throw InputError("limited_support_estimate: delta_rel must lie in (0, 1)");
  LimitedResult res;
  res.trace.omega = omega;
  res.trace.mode = enclosure::Mode::LimitedAperture;
  double s = 0.0;
  for (std::size_t j = 0; j < op.phi.size(); ++j) s += op.weights[j] * std::norm(ds.values[j]);
  res.trace.data_scale = s > 0.0 ? std::sqrt(s) : 1.0;
  res.densities.resize(taus.size());
  std::vector<std::string> errors(taus.size());
  parallel_for(taus.size(), [&](std::size_t i) {
    try {
      res.densities[i] = min_norm_density(op, taus[i], omega, delta_rel * cgo_h1_norm(taus[i], op.k, op.R));
    } catch (const NumericalError& e) {
      errors[i] = e.what();
    }
  });
  for (std::size_t i = 0; i < taus.size(); ++i) {
    enclosure::TraceRecord r;
    r.N = static_cast<int>(i + 1);
    r.tau = taus[i];
    if (errors[i].empty() && !res.densities[i].trivial) {
      r.abs_I = std::abs(limited_indicator(ds, op, res.densities[i]));
    } else {
      if (!errors[i].empty()) res.failures.push_back(errors[i]);
      res.densities[i].trivial = true;
    }
    const bool finite = std::isfinite(r.abs_I);
    r.log_over_tau = finite && r.abs_I > 1e-300 ? std::log(r.abs_I) / r.tau : std::nan("");
    r.usable = finite && r.abs_I > 1e-300;
    res.trace.records.push_back(r);
  }
  try {
    res.estimate = enclosure::estimate_support(res.trace);
  } catch (const NumericalError& e) {
    res.skipped = e.what();
  }
  return res;
}

}  // namespace scatter::aperture
