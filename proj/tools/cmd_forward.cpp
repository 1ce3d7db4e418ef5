#include <iostream>

#include "cli_common.hpp"
#include "scatter/farfield.hpp"
#include "scatter/forward.hpp"
#include "scatter/io.hpp"

namespace cli {

using namespace scatter;

namespace {

struct ForwardOptions {
  std::string scene, out, cauchy_out;
  double k = 0.0;
  double d_angle = 0.0;
  int n = 512;
  std::vector<double> arc;
  double cauchy_radius = 0.0;
  int cauchy_n = 512;
  bool selfcheck = false;
  forward::DiscretizationParams disc;
};

// max |F(b; d = a) − F(a + π; d = b + π)| / max|F| over a few b.
double reciprocity_residual(const forward::ScatterSolution& sol, const forward::DiscretizationParams& dp) {
  const double a = sol.d().theta();
  double worst = 0, scale = 0;
  for (double shift : {1.0, 2.5, 4.0}) {
    const double b = a + shift;
    const auto other = forward::solve(sol.shape(), sol.k(), geometry::Direction(b + kPi), dp);
    const cplx f12 = sol.far_field(b), f21 = other.far_field(a + kPi);
    worst = std::max(worst, std::abs(f12 - f21));
    scale = std::max({scale, std::abs(f12), std::abs(f21)});
  }
  return scale > 0 ? worst / scale : worst;
}

// (∫|F|² dσ + 2√(2π/k) Re(e^{iπ/4} F(d))) / ∫|F|² dσ
double optical_residual(const forward::ScatterSolution& sol, int n) {
  double e = 0;
  for (int j = 0; j < n; ++j) e += std::norm(sol.far_field(2 * kPi * j / n));
  e *= 2 * kPi / n;
  const double fwd =
      2 * std::sqrt(2 * kPi / sol.k()) * std::real(std::exp(cplx(0, kPi / 4)) * sol.far_field(sol.d().theta()));
  return e > 0 ? std::abs(e + fwd) / e : std::abs(fwd);
}

int run(const ForwardOptions& o, const RunInfo& info) {
  if (o.scene.empty()) throw InputError("forward: --scene is required");
  if (o.out.empty()) throw InputError("forward: --out is required");
  if (!(o.k > 0)) throw InputError("forward: --k must be positive");
  o.disc.validate();

  const std::string scene_text = io::read_text(o.scene);
  const geometry::Shape shape = geometry::parse_scene(scene_text);
  const double R = geometry::enclosing_R(shape);
  const geometry::Direction d(o.d_angle);
  const auto sol = forward::solve(shape, o.k, d, o.disc);

  farfield::Aperture ap = farfield::Aperture::circle();
  if (!o.arc.empty()) {
    if (o.arc.size() != 2) throw InputError("forward: --arc takes two angles");
    ap = farfield::Aperture::arc(o.arc[0], o.arc[1]);
  }
  auto ds = forward::far_field_dataset(sol, ap, o.n);
  ds.provenance["tool"] = "scatter-enclose";
  ds.provenance["tool_version"] = io::kToolVersion;
  ds.provenance["config_hash"] = info.config_hash;
  ds.provenance["scene_hash"] = io::hash_hex(scene_text);
  ds.provenance["scene_type"] = std::holds_alternative<geometry::CrackSet>(shape) ? "crack" : "obstacle";
  ds.provenance["R"] = io::num(R);
  farfield::write_dataset(ds, o.out);

  json diag = {{"provenance", provenance_json(info)},
               {"output", o.out},
               {"n", ds.n},
               {"k", o.k},
               {"d_angle", d.theta()},
               {"R", R},
               {"unknowns", sol.info().unknowns},
               {"condition_estimate", sol.info().condition},
               {"solver_residual", sol.info().residual},
               {"resonance_warning", sol.info().resonance}};

  if (!o.cauchy_out.empty()) {
    const double rc = o.cauchy_radius > 0 ? o.cauchy_radius : 1.2 * geometry::scene_radius(shape);
    const auto c = forward::cauchy_data_on_circle(sol, rc, o.cauchy_n);
    io::write_text(o.cauchy_out, "# " + provenance_line(info) + "\n" + farfield::cauchy_csv(c));
    diag["cauchy_output"] = o.cauchy_out;
    diag["cauchy_radius"] = rc;
  }
  if (o.selfcheck) {
    json sc;
    sc["reciprocity_max_residual"] = reciprocity_residual(sol, o.disc);
    sc["optical_theorem_residual"] = optical_residual(sol, 1024);
    if (std::holds_alternative<geometry::PolygonalObstacle>(shape)) sc["boundary_residual"] = forward::boundary_residual(sol);
    diag["selfcheck"] = sc;
  }
  std::cout << diag.dump(2) << "\n";
  return kOk;
}

}  // namespace

Command add_forward(CLI::App& root) {
  Command c;
  auto o = std::make_shared<ForwardOptions>();
  CLI::App* app = root.add_subcommand("forward", "Solve the forward problem and write a far-field dataset");
  app->option_defaults()->always_capture_default();
  app->add_option("--config", *c.config, "JSON file with option values (flags override it)");
  app->add_option("--scene", o->scene, "Scene JSON file");
  app->add_option("--k", o->k, "Wave number");
  app->add_option("--d-angle", o->d_angle, "Incident direction angle (radians)");
  app->add_option("--n", o->n, "Number of far-field samples")->check(CLI::PositiveNumber);
  app->add_option("--arc", o->arc, "Observation arc theta1 theta2 (radians); full circle if omitted")->expected(2);
  app->add_option("--out", o->out, "Dataset output path");
  app->add_option("--cauchy-out", o->cauchy_out, "Also write u, du/dr on a circle to this CSV");
  app->add_option("--cauchy-radius", o->cauchy_radius, "Circle radius for --cauchy-out (default 1.2 times the largest vertex norm)");
  app->add_option("--cauchy-n", o->cauchy_n, "Points on the circle")->check(CLI::PositiveNumber);
  app->add_option("--panels-per-edge", o->disc.panels_per_edge);
  app->add_option("--max-panel-length", o->disc.max_panel_length);
  app->add_option("--grading-levels", o->disc.grading_levels);
  app->add_option("--order", o->disc.order, "Gauss-Legendre nodes per panel");
  app->add_option("--crack-degree", o->disc.crack_degree, "Chebyshev modes per crack arc");
  app->add_option("--crack-panels", o->disc.crack_panels);
  app->add_flag("--selfcheck", o->selfcheck, "Report reciprocity, optical theorem and boundary residuals");
  c.app = app;
  c.run = [o](const RunInfo& info) { return run(*o, info); };
  return c;
}

}  // namespace cli
