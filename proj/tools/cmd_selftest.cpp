#include <chrono>
#include <cstdio>
#include <iostream>
#include <random>

#include "cli_common.hpp"
#include "scatter/farfield.hpp"
#include "scatter/forward.hpp"
#include "scatter/herglotz.hpp"
#include "scatter/io.hpp"

namespace cli {

using namespace scatter;
using namespace scatter::herglotz;

namespace {

struct Row {
  std::string suite, quantity;
  double measured = 0.0;
  double bound = 0.0;
  bool upper = true;  // measured <= bound, else measured >= bound
  double seconds = 0.0;
  bool pass() const { return upper ? measured <= bound : measured >= bound; }
};

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

// (1/2π)∫ e^{ϑ·ξ}(ϑ₁ + iϑ₂)^m dσ: power series vs 256-point trapezoid.
std::vector<Row> residue_suite() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(101);
  std::uniform_real_distribution<double> u(-1, 1);
  double worst = 0;
  for (int trial = 0; trial < 50; ++trial) {
    cplx xi1, xi2;
    do {
      xi1 = {u(rng), u(rng)};
      xi2 = {u(rng), u(rng)};
    } while (std::sqrt(std::norm(xi1) + std::norm(xi2)) > 1.0);
    xi1 *= 2.0;
    xi2 *= 2.0;
    for (int m = -3; m <= 3; ++m) {
      cplx q = 0;
      for (int j = 0; j < 256; ++j) {
        const double t = 2 * kPi * j / 256;
        q += std::exp(std::cos(t) * xi1 + std::sin(t) * xi2) * std::polar(1.0, m * t);
      }
      q /= 256.0;
      worst = std::max(worst, std::abs(exp_moment(m, xi1, xi2) - q) / std::abs(q));
    }
  }
  return {{"residue", "max relative error, m in [-3,3], 50 xi", worst, 1e-10, true, since(t0)}};
}

// Vekua images of the truncated harmonic series (M = 40) against e^{iky·φ} and the CGO wave.
std::vector<Row> expansion_suite() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(202);
  std::uniform_real_distribution<double> u(-1, 1);
  const double k = 1.0, R = 2.0;
  const int M = 40;
  double pw_err = 0, cgo_ratio = 0;
  for (int i = 0; i < 100; ++i) {
    Vec2 y;
    do y = {u(rng), u(rng)};
    while (norm(y) > 1.0);
    y = y * R;
    const cplx phi = std::polar(1.0, kPi * u(rng));
    const cplx exact = std::exp(kI * k * (y.x * phi.real() + y.y * phi.imag()));
    pw_err = std::max(pw_err, std::abs(vekua_apply(plane_wave_harmonic_series(M, k, phi), k).evaluate(y).value - exact));

    const double tau = 2.5 * (1 + u(rng));
    const Direction w(kPi * u(rng));
    const cplx approx = vekua_apply(cgo_harmonic_series(M, tau, k, w), k).evaluate(y).value;
    const double bound = 2 * std::exp(log_E(tau, M + 1, k, R)) +
                         1e-13 * std::exp(R * (tau + std::sqrt(tau * tau + k * k)) / 2);
    cgo_ratio = std::max(cgo_ratio, std::abs(approx - cgo_wave(y, tau, k, w).value) / bound);
  }
  const double dt = since(t0);
  return {{"jacobi-anger", "max |error|, 100 points |y| <= 2", pw_err, 1e-12, true, dt},
          {"cgo-expansion", "max error / E-bound, tau <= 5", cgo_ratio, 1.0, true, dt}};
}

// (ik/2)^m ∫ φ̄^m g_N dσ = ((τ − s)ω̄/2)^m and (ik/2)^m ∫ φ^m g_N dσ = ((τ + s)ω/2)^m for m ≤ N.
std::vector<Row> moment_suite() {
  const auto t0 = Clock::now();
  const int N = 10, n = 256;
  const double tau = 1.0, k = 2.0;
  const Direction w(1.1);
  const auto dc = density_coeffs(N, tau, k, w);
  const double s = std::sqrt(tau * tau + k * k);
  auto moment = [&](int m, bool conj) {
    cplx acc = 0;
    for (int j = 0; j < n; ++j) {
      const cplx phi = std::polar(1.0, 2 * kPi * j / n);
      acc += std::pow(conj ? std::conj(phi) : phi, m) * dc.evaluate(phi);
    }
    return std::pow(0.5 * kI * k, m) * acc * (2 * kPi / n);
  };
  double inside = 0, beyond = 1e300;
  for (int m = 0; m <= N + 1; ++m) {
    const cplx a = std::pow(0.5 * (tau - s) * std::conj(w.as_complex()), m);
    const cplx b = std::pow(0.5 * (tau + s) * w.as_complex(), m);
    const double ea = std::abs(moment(m, true) - a) / std::max(1.0, std::abs(a));
    const double eb = std::abs(moment(m, false) - b) / std::max(1.0, std::abs(b));
    if (m <= N)
      inside = std::max({inside, ea, m > 0 ? eb : 0.0});
    else
      beyond = std::min({beyond, std::abs(moment(m, true) - a), std::abs(moment(m, false) - b)});
  }
  const double dt = since(t0);
  return {{"moments", "max residual, m <= N = 10", inside, 1e-12, true, dt},
          {"moments", "min residual at m = N + 1", beyond, 1e-3, false, dt}};
}

// Far-field Fourier pairing against the near-field Wronskian pairing on solver data.
std::vector<Row> pairing_suite() {
  const auto t0 = Clock::now();
  geometry::PolygonalObstacle sq{{{{-0.4, -0.4}, {0.4, -0.4}, {0.4, 0.4}, {-0.4, 0.4}}}, 2.0};
  sq.validate();
  const double k = 1.0;
  const auto sol = forward::solve_obstacle(sq, k, Direction(0.4));
  const auto spec = farfield::fourier_spectrum(forward::far_field_dataset(sol, farfield::Aperture::circle(), 256), 40);
  const auto c = forward::cauchy_data_on_circle(sol, 1.5, 256);
  const std::pair<double, int> cases[] = {{0.0, 4}, {0.9, 6}, {2.0, 8}, {3.5, 10}, {5.0, 12}};
  double worst = 0;
  for (const auto& [theta, N] : cases) {
    const DensityCoeffs dc(N, tau_schedule(N, {0.5, 1.0, 0.0}), k, Direction(theta));
    const cplx far = farfield::pair_with_density(spec, dc);
    const cplx near = farfield::pairing_factor(k) *
                      farfield::nearfield_pairing(c, [&](const Vec2& y) { return herglotz_wave(dc, y); });
    worst = std::max(worst, std::abs(far - near) / std::abs(far));
  }
  return {{"pairing", "max relative far/near mismatch, 5 (omega, N)", worst, 1e-5, true, since(t0)}};
}

// e^{Rτ(N)} sup_{|y|=R}(|v_g − v| + |∇(v_g − v)|) along the schedule β = 0.5, R = 1, k = 1.
std::vector<Row> certificate_suite() {
  const auto t0 = Clock::now();
  const ScheduleParams p{0.5, 1.0, 0.0};
  const double k = 1.0, R = 1.0;
  const Direction w(0.77);
  double first = 0, last = 0, worst_ratio = 0;
  for (int N = 20; N <= 60; N += 10) {
    const double tau = tau_schedule(N, p);
    const auto dc = density_coeffs(N, tau, k, w);
    double sup = 0;
    for (int j = 0; j < 256; ++j) {
      const double t = 2 * kPi * j / 256;
      const auto e = herglotz_cgo_difference(dc, {R * std::cos(t), R * std::sin(t)});
      sup = std::max(sup, e.value + e.gradient);
    }
    const double weighted = std::exp(R * tau) * sup;
    worst_ratio = std::max(worst_ratio, weighted / truncation_certificate(N, tau, k, R).weighted_total);
    if (N == 20) first = weighted;
    last = weighted;
  }
  const double dt = since(t0);
  return {{"certificate", "weighted error decay factor N = 20 -> 60", first / last, 1e3, false, dt},
          {"certificate", "max weighted error / certificate", worst_ratio, 1.0, true, dt}};
}

int run(const std::string& out, const RunInfo& info) {
  std::vector<Row> rows;
  for (auto suite : {residue_suite, expansion_suite, moment_suite, pairing_suite, certificate_suite})
    for (auto& r : suite()) rows.push_back(r);

  bool ok = true;
  std::printf("%-14s %-48s %12s %4s %10s %8s %s\n", "suite", "quantity", "measured", "", "bound", "seconds", "status");
  json report = json::array();
  for (const auto& r : rows) {
    ok = ok && r.pass();
    std::printf("%-14s %-48s %12.3e %4s %10.1e %8.2f %s\n", r.suite.c_str(), r.quantity.c_str(), r.measured,
                r.upper ? "<=" : ">=", r.bound, r.seconds, r.pass() ? "PASS" : "FAIL");
    report.push_back({{"suite", r.suite},
                      {"quantity", r.quantity},
                      {"measured", r.measured},
                      {"bound", r.bound},
                      {"relation", r.upper ? "<=" : ">="},
                      {"pass", r.pass()}});
  }
  std::printf("%s\n", ok ? "selftest: all suites pass" : "selftest: FAILURES");
  if (!out.empty()) {
    const json j = {{"provenance", provenance_json(info)}, {"rows", report}, {"pass", ok}};
    io::write_text(out, j.dump(2) + "\n");
  }
  return ok ? kOk : kSelftestFailure;
}

}  // namespace

Command add_selftest(CLI::App& root) {
  Command c;
  auto out = std::make_shared<std::string>();
  CLI::App* app = root.add_subcommand("selftest", "Run the identity suites and print measured values against bounds");
  app->option_defaults()->always_capture_default();
  app->add_option("--config", *c.config, "JSON file with option values (flags override it)");
  app->add_option("--out", *out, "Also write the report as JSON");
  c.app = app;
  c.run = [out](const RunInfo& info) { return run(*out, info); };
  return c;
}

}  // namespace cli
