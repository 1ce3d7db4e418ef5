#include <iostream>

#include "cli_common.hpp"
#include "scatter/aperture.hpp"
#include "scatter/enclosure.hpp"
#include "scatter/farfield.hpp"
#include "scatter/herglotz.hpp"
#include "scatter/io.hpp"

namespace cli {

using namespace scatter;

namespace {

struct ApertureOptions {
  std::string dataset, out;
  double R = 0.0;
  double delta_rel = 1e-3;
  double tau_min = 3.0, tau_max = 12.0, tau_step = 0.5;
  std::vector<double> omegas;
  int directions = 8;
  double jitter = 0.0;
  std::uint64_t seed = 1;
  bool origin_outside = false;
  std::vector<double> t_values;
  int check_order = 30;
};

std::vector<double> tau_ladder(const ApertureOptions& o) {
  if (!(o.tau_min > 0) || !(o.tau_step > 0) || o.tau_max < o.tau_min)
    throw InputError("aperture: need 0 < tau-min <= tau-max and tau-step > 0");
  std::vector<double> taus;
  for (int i = 0;; ++i) {
    const double t = o.tau_min + i * o.tau_step;
    if (t > o.tau_max * (1 + 1e-12)) break;
    taus.push_back(t);
  }
  return taus;
}

json density_json(const aperture::MinNormDensity& m) {
  return {{"tau", m.tau},
          {"alpha", std::isfinite(m.alpha) ? json(m.alpha) : json("inf")},
          {"trivial", m.trivial},
          {"delta", m.delta},
          {"achieved", m.achieved},
          {"v_norm", m.v_norm},
          {"iterations", m.iterations}};
}

// Limited-aperture indicator against the g_N pairing at small τ, where both are accurate.
json full_circle_check(const farfield::FarFieldDataset& ds, const aperture::ApertureOperator& op,
                       const std::vector<geometry::Direction>& omegas, double R, double delta_rel, int order) {
  const int m_max = std::min(order, ds.n / 4 - 1);
  const auto spec = farfield::fourier_spectrum(ds, m_max);
  double worst = 0;
  json rows = json::array();
  for (const auto& w : omegas) {
    for (double tau : {0.5, 1.0}) {
      const auto m = aperture::min_norm_density(op, tau, w, delta_rel * aperture::cgo_h1_norm(tau, ds.k, R));
      const cplx a = aperture::limited_indicator(ds, op, m);
      const cplx b = farfield::pair_with_density(spec, herglotz::DensityCoeffs(m_max, tau, ds.k, w));
      const double rel = std::abs(a - b) / std::abs(b);
      worst = std::max(worst, rel);
      rows.push_back({{"theta", w.theta()}, {"tau", tau}, {"relative_difference", rel}});
    }
  }
  return {{"N", m_max}, {"max_relative_difference", worst}, {"cases", rows}};
}

int run(const ApertureOptions& o, const RunInfo& info, bool delta_defaulted) {
  if (o.dataset.empty()) throw InputError("aperture: --dataset is required");
  if (o.out.empty()) throw InputError("aperture: --out is required");
  if (!(o.delta_rel > 0)) throw InputError("aperture: --delta-rel must be positive");
  const auto ds = farfield::read_dataset(o.dataset);
  double R = o.R;
  if (R <= 0 && ds.provenance.count("R")) R = std::stod(ds.provenance.at("R"));
  if (!(R > 0)) throw InputError("aperture: --R is required when the dataset does not record it");
  if (o.origin_outside)
    std::cerr << "warning: the origin is flagged as outside the scatterer; the limited-aperture enclosure "
                 "result assumes 0 lies inside it\n";

  const auto taus = tau_ladder(o);
  const auto omegas = o.omegas.empty() ? enclosure::direction_grid(o.directions, o.jitter, o.seed)
                                       : directions_from(o.omegas);
  const auto op = aperture::assemble_operator(ds.aperture, ds.n, ds.k, R);

  std::vector<aperture::LimitedResult> results;
  for (const auto& w : omegas) results.push_back(aperture::limited_support_estimate(ds, op, w, taus, o.delta_rel));

  ensure_directory(o.out);
  const std::string header = provenance_line(info);
  json dirs = json::array();
  int failed = 0;
  for (std::size_t i = 0; i < omegas.size(); ++i) {
    const auto& r = results[i];
    json e = {{"theta", omegas[i].theta()}, {"omega", {omegas[i].unit().x, omegas[i].unit().y}}};
    if (r.estimate) {
      e["h_est"] = r.estimate->h;
      e["slope_b"] = r.estimate->b;
      e["used"] = r.estimate->used;
    } else {
      e["skipped"] = r.skipped;
    }
    json dens = json::array();
    for (const auto& m : r.densities) dens.push_back(density_json(m));
    e["densities"] = dens;
    e["failures"] = r.failures;
    failed += static_cast<int>(r.failures.size());
    dirs.push_back(e);
    const std::string stem = "trace_" + std::to_string(i);
    write_file(o.out, stem + ".csv", enclosure::trace_csv(r.trace, o.t_values, header));
    write_file(o.out, stem + ".dat", enclosure::trace_dat(r.trace, header));
  }

  json j;
  j["version"] = 1;
  j["provenance"] = provenance_json(info);
  j["mode"] = enclosure::mode_name(enclosure::Mode::LimitedAperture);
  j["k"] = ds.k;
  j["R"] = R;
  j["gamma"] = ds.aperture.full ? json("full circle") : json({ds.aperture.theta1, ds.aperture.theta2});
  j["delta_rel"] = o.delta_rel;
  j["delta_rel_defaulted"] = delta_defaulted;
  j["delta_rule"] = "delta = delta_rel * ||v||_{H1(B_R)} at each tau";
  j["origin_outside_flag"] = o.origin_outside;
  j["taus"] = taus;
  j["directions"] = dirs;
  if (ds.aperture.full) j["full_circle_check"] = full_circle_check(ds, op, omegas, R, o.delta_rel, o.check_order);
  write_file(o.out, "result.json", j.dump(2) + "\n");

  json summary = {{"output", o.out}, {"directions", omegas.size()}, {"taus", taus.size()}, {"failed_solves", failed},
                  {"delta_rel", o.delta_rel}, {"delta_rel_defaulted", delta_defaulted}};
  if (ds.aperture.full) summary["full_circle_max_relative_difference"] = j["full_circle_check"]["max_relative_difference"];
  std::cout << summary.dump(2) << "\n";
  return failed > 0 ? kNumericalFailure : kOk;
}

}  // namespace

Command add_aperture(CLI::App& root) {
  Command c;
  auto o = std::make_shared<ApertureOptions>();
  CLI::App* app = root.add_subcommand("aperture", "Limited-aperture support estimates with minimum-norm densities");
  app->option_defaults()->always_capture_default();
  app->add_option("--config", *c.config, "JSON file with option values (flags override it)");
  app->add_option("--dataset", o->dataset, "Far-field dataset (arc or full circle)");
  app->add_option("--R", o->R, "Radius of the ball B_R (default from the data)");
  CLI::Option* delta = app->add_option("--delta-rel", o->delta_rel, "Discrepancy level relative to ||v||_{H1(B_R)}");
  app->add_option("--tau-min", o->tau_min);
  app->add_option("--tau-max", o->tau_max);
  app->add_option("--tau-step", o->tau_step);
  app->add_option("--omega", o->omegas, "Explicit probe angles (radians)");
  app->add_option("--directions", o->directions, "Number of probe directions when --omega is absent");
  app->add_option("--jitter", o->jitter, "Direction jitter in degrees");
  app->add_option("--seed", o->seed);
  app->add_flag("--origin-outside", o->origin_outside, "The origin is known to lie outside the scatterer");
  app->add_option("--t", o->t_values, "Test levels t for the classification columns of the traces");
  app->add_option("--check-order", o->check_order, "N of the g_N comparison on full-circle data");
  app->add_option("--out", o->out, "Output directory");
  c.app = app;
  c.run = [o, delta](const RunInfo& info) { return run(*o, info, delta->count() == 0); };
  return c;
}

}  // namespace cli
