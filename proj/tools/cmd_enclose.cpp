#include <iostream>

#include "cli_common.hpp"
#include "scatter/enclosure.hpp"
#include "scatter/farfield.hpp"
#include "scatter/forward.hpp"
#include "scatter/io.hpp"

namespace cli {

using namespace scatter;

namespace {

struct EncloseOptions {
  std::vector<std::string> datasets;
  std::string scene, out;
  double k = 0.0;
  std::vector<double> d_angles;
  double cauchy_radius = 0.0;
  double beta = 0.5;
  double R = 0.0;
  double tau_offset = 0.0;
  int n_min = 10, n_max = 0, n_step = 2;
  int directions = 16;
  double jitter = 3.0;
  std::uint64_t seed = 1;
  std::vector<double> t_values;
};

void check_independent(const std::vector<geometry::Direction>& ds) {
  if (ds.size() == 2 && std::abs(cross(ds[0].unit(), ds[1].unit())) < 1e-6)
    throw InputError("enclose: the two incident directions must be linearly independent");
}

struct Prepared {
  std::vector<enclosure::IncidentSource> sources;
  double k = 0.0, R = 0.0;
  int order_limit = 0;
  bool crack = false;
  std::string route;
  std::optional<geometry::Shape> shape;
};

Prepared from_datasets(const EncloseOptions& o) {
  Prepared p;
  p.route = "far-field Fourier spectrum";
  std::vector<geometry::Direction> inc;
  p.order_limit = 1 << 30;
  for (const auto& path : o.datasets) {
    const auto ds = farfield::read_dataset(path);
    if (!ds.aperture.full) throw InputError("enclose: " + path + " is on an arc; use the aperture command");
    if (!p.sources.empty() && ds.k != p.k) throw InputError("enclose: datasets have different k");
    p.k = ds.k;
    if (ds.provenance.count("scene_type") && ds.provenance.at("scene_type") == "crack") p.crack = true;
    if (o.R <= 0 && ds.provenance.count("R")) p.R = std::stod(ds.provenance.at("R"));
    const int m_max = ds.n / 4 - 1;
    p.order_limit = std::min(p.order_limit, m_max);
    inc.push_back(ds.d);
    p.sources.push_back({ds.d, std::make_shared<enclosure::SpectrumSource>(farfield::fourier_spectrum(ds, m_max))});
  }
  check_independent(inc);
  if (o.R > 0) p.R = o.R;
  if (!(p.R > 0)) throw InputError("enclose: --R is required when the dataset does not record it");
  return p;
}

Prepared from_scene(const EncloseOptions& o, int n_max) {
  Prepared p;
  p.route = "near-field Cauchy data";
  if (!(o.k > 0)) throw InputError("enclose: --k must be positive with --scene");
  if (o.d_angles.empty() || o.d_angles.size() > 2) throw InputError("enclose: --d-angle takes one or two angles");
  const auto shape = geometry::read_scene(o.scene);
  p.shape = shape;
  p.k = o.k;
  p.R = o.R > 0 ? o.R : geometry::enclosing_R(shape);
  p.crack = std::holds_alternative<geometry::CrackSet>(shape);
  const auto inc = directions_from(o.d_angles);
  check_independent(inc);
  const double rc = o.cauchy_radius > 0 ? o.cauchy_radius : 1.2 * geometry::scene_radius(shape);
  const int n = std::max(512, 2 * (n_max + 1));
  for (const auto& d : inc) {
    const auto sol = forward::solve(shape, o.k, d);
    const auto c = forward::cauchy_data_on_circle(sol, rc, n);
    p.sources.push_back({d, std::make_shared<enclosure::CauchySource>(c, o.k)});
  }
  p.order_limit = p.sources.front().source->max_order();
  return p;
}

int run(const EncloseOptions& o, const RunInfo& info) {
  if (o.out.empty()) throw InputError("enclose: --out is required");
  if (o.datasets.empty() == o.scene.empty()) throw InputError("enclose: give either --dataset or --scene");
  if (o.datasets.size() > 2) throw InputError("enclose: at most two datasets");

  const int requested = o.n_max > 0 ? o.n_max : 240;
  Prepared p = o.scene.empty() ? from_datasets(o) : from_scene(o, requested);
  if (p.crack && p.sources.size() == 1)
    std::cerr << "warning: crack data with a single incident direction; the combined indicator needs two\n";

  enclosure::ReconstructionParams rp;
  rp.schedule = {o.beta, p.R, o.tau_offset};
  rp.ladder = {o.n_min, o.n_max > 0 ? o.n_max : std::min(requested, p.order_limit), o.n_step};
  rp.directions = o.directions;
  rp.jitter_deg = o.jitter;
  rp.seed = o.seed;
  rp.validate();
  if (rp.ladder.N_max > p.order_limit)
    throw InputError("enclose: --n-max " + std::to_string(rp.ladder.N_max) + " exceeds the data limit " +
                     std::to_string(p.order_limit));

  const auto result = enclosure::reconstruct_hull(p.sources, rp);

  json extra = {{"route", p.route}, {"t_values", o.t_values}};
  std::vector<geometry::Polygon> reference;
  if (p.shape) {
    const auto verts = geometry::vertices(*p.shape);
    reference.push_back(geometry::convex_hull(verts));
    json truth = json::array();
    for (const auto& d : result.directions) truth.push_back(geometry::support_function(*p.shape, d.omega));
    extra["true_support"] = truth;
    extra["hausdorff_to_true_hull"] = geometry::hausdorff_convex(result.hull, reference.front());
  }
  write_reconstruction(o.out, info, result, o.t_values, reference, extra);

  int estimated = 0;
  for (const auto& d : result.directions) estimated += d.estimate.has_value();
  json summary = {{"output", o.out},
                  {"mode", enclosure::mode_name(result.mode)},
                  {"route", p.route},
                  {"directions", result.directions.size()},
                  {"estimated", estimated},
                  {"hull_vertices", result.hull.size()}};
  if (p.shape) summary["hausdorff_to_true_hull"] = extra["hausdorff_to_true_hull"];
  std::cout << summary.dump(2) << "\n";
  return kOk;
}

}  // namespace

Command add_enclose(CLI::App& root) {
  Command c;
  auto o = std::make_shared<EncloseOptions>();
  CLI::App* app = root.add_subcommand("enclose", "Estimate support functions and the convex hull");
  app->option_defaults()->always_capture_default();
  app->add_option("--config", *c.config, "JSON file with option values (flags override it)");
  app->add_option("--dataset", o->datasets, "One or two far-field datasets (two: combined indicator)");
  app->add_option("--scene", o->scene, "Synthesize near-field Cauchy data from this scene instead");
  app->add_option("--k", o->k, "Wave number (with --scene)");
  app->add_option("--d-angle", o->d_angles, "One or two incident angles (with --scene)");
  app->add_option("--cauchy-radius", o->cauchy_radius, "Cauchy circle radius (with --scene; default 1.2 times the largest vertex norm)");
  app->add_option("--beta", o->beta, "Schedule slope, tau = beta N/(e R)");
  app->add_option("--R", o->R, "Radius of a disc containing the scatterer (default from the data)");
  app->add_option("--tau-offset", o->tau_offset);
  app->add_option("--n-min", o->n_min);
  app->add_option("--n-max", o->n_max, "Largest N (default min(240, data limit))");
  app->add_option("--n-step", o->n_step);
  app->add_option("--directions", o->directions, "Number of probe directions");
  app->add_option("--jitter", o->jitter, "Direction jitter in degrees");
  app->add_option("--seed", o->seed, "Seed for the direction jitter");
  app->add_option("--t", o->t_values, "Test levels t for the classification columns of the traces");
  app->add_option("--out", o->out, "Output directory");
  c.app = app;
  c.run = [o](const RunInfo& info) { return run(*o, info); };
  return c;
}

}  // namespace cli
