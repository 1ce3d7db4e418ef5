#include <Eigen/Dense>
#include <algorithm>

#include "forward_internal.hpp"
#include "quadrature.hpp"
#include "scatter/io.hpp"
#include "scatter/specfun.hpp"

namespace scatter::forward {

namespace {

// A target closer than this many panel lengths gets product integration.
constexpr double kNear = 1.5;

double interior_angle(const Vec2& a, const Vec2& b, const Vec2& c) {
  const Vec2 u = b - a, v = c - b;
  return kPi - std::atan2(cross(u, v), dot(u, v));
}

// Density singularity r^e at a corner seen from the exterior, e = π/(2π − α) − 1.
int corner_levels(double alpha, int max_levels) {
  const double e = std::abs(kPi / (2 * kPi - alpha) - 1.0);
  return static_cast<int>(std::lround(max_levels * std::min(1.0, 3.0 * e)));
}

struct PanelBasis {
  quad::Rule nodes;
  std::vector<double> bary;
  quad::Rule sub;
};

// Visits quadrature points of ∫_P (·) ds refined toward x; visit(y, weight, lagrange values).
template <class Visit>
void near_integrate(const Panel& P, const Vec2& x, const PanelBasis& pb, Visit&& visit) {
  const int order = static_cast<int>(pb.nodes.x.size());
  std::vector<double> L(static_cast<std::size_t>(order));
  const Vec2 dir = P.b - P.a;
  const double len = P.length();
  auto rec = [&](auto&& self, double ta, double tb, int depth) -> void {
    const Vec2 ya = P.a + dir * (0.5 * (ta + 1));
    const Vec2 yb = P.a + dir * (0.5 * (tb + 1));
    const double sublen = 0.5 * (tb - ta) * len;
    if (depth < 60 && sublen > geometry::segment_distance(x, ya, yb)) {
      const double tm = 0.5 * (ta + tb);
      self(self, ta, tm, depth + 1);
      self(self, tm, tb, depth + 1);
      return;
    }
    for (std::size_t q = 0; q < pb.sub.x.size(); ++q) {
      const double t = ta + 0.5 * (tb - ta) * (pb.sub.x[q] + 1);
      quad::lagrange_values(pb.nodes.x, pb.bary, t, L.data());
      visit(P.a + dir * (0.5 * (t + 1)), pb.sub.w[q] * 0.5 * sublen, L.data());
    }
  };
  rec(rec, -1.0, 1.0, 0);
}

PanelBasis panel_basis(int order) {
  PanelBasis pb{quad::gauss_legendre(order), {}, quad::gauss_legendre(16)};
  pb.bary = quad::barycentric_weights(pb.nodes.x);
  return pb;
}

// ∂Φ(x, y)/∂n_x.
cplx kernel_dn(double k, const Vec2& x, const Vec2& y, const Vec2& n_x) {
  const Vec2 r = x - y;
  const double rn = norm(r);
  const auto h = specfun::hankel01(k * rn);
  return -0.25 * kI * k * h.h1 * dot(r, n_x) / rn;
}

struct KernelValue {
  cplx phi;
  cplx gx, gy;
};

KernelValue kernel_phi(double k, const Vec2& x, const Vec2& y) {
  const Vec2 r = x - y;
  const double rn = norm(r);
  const auto h = specfun::hankel01(k * rn);
  const cplx g = -0.25 * kI * k * h.h1 / rn;
  return {0.25 * kI * h.h0, g * r.x, g * r.y};
}

// ∫ K'(x, y) ψ(y) ds over all panels not on the edge `skip_edge`.
cplx apply_dn(const ScatterSolution::Impl& s, const PanelBasis& pb, const Vec2& x, const Vec2& n_x,
              int skip_edge) {
  const auto& bd = s.disc;
  cplx acc = 0.0;
  for (const auto& P : bd.panels) {
    if (P.edge == skip_edge) continue;
    const double dist = geometry::segment_distance(x, P.a, P.b);
    if (dist > kNear * P.length()) {
      for (int q = 0; q < bd.order; ++q) {
        const std::size_t j = P.first + static_cast<std::size_t>(q);
        acc += kernel_dn(s.k, x, bd.nodes[j], n_x) * bd.weights[j] * s.psi[j];
      }
    } else {
      near_integrate(P, x, pb, [&](const Vec2& y, double w, const double* L) {
        cplx psi = 0.0;
        for (int q = 0; q < bd.order; ++q) psi += L[q] * s.psi[P.first + static_cast<std::size_t>(q)];
        acc += kernel_dn(s.k, x, y, n_x) * w * psi;
      });
    }
  }
  return acc;
}

FieldValue obstacle_scattered(const ScatterSolution::Impl& s, const Vec2& x) {
  const auto& bd = s.disc;
  const PanelBasis pb = panel_basis(bd.order);
  FieldValue f;
  for (const auto& P : bd.panels) {
    const double dist = geometry::segment_distance(x, P.a, P.b);
    if (dist > kNear * P.length()) {
      for (int q = 0; q < bd.order; ++q) {
        const std::size_t j = P.first + static_cast<std::size_t>(q);
        const auto kv = kernel_phi(s.k, x, bd.nodes[j]);
        const cplx c = bd.weights[j] * s.psi[j];
        f.value += kv.phi * c;
        f.dx += kv.gx * c;
        f.dy += kv.gy * c;
      }
    } else {
      if (dist == 0.0) throw InputError("field evaluation point lies on the boundary");
      near_integrate(P, x, pb, [&](const Vec2& y, double w, const double* L) {
        cplx psi = 0.0;
        for (int q = 0; q < bd.order; ++q) psi += L[q] * s.psi[P.first + static_cast<std::size_t>(q)];
        const auto kv = kernel_phi(s.k, x, y);
        f.value += kv.phi * w * psi;
        f.dx += kv.gx * w * psi;
        f.dy += kv.gy * w * psi;
      });
    }
  }
  return f;
}

}  // namespace

void DiscretizationParams::validate() const {
  if (combined_source)
    throw InputError("combined-source formulation is not available; shift k away from the interior eigenvalue");
  if (panels_per_edge < 1) throw InputError("discretization: panels_per_edge must be >= 1");
  if (!(max_panel_length > 0)) throw InputError("discretization: max_panel_length must be positive");
  if (grading_levels < 0 || grading_levels > 40) throw InputError("discretization: grading_levels must be in [0, 40]");
  if (order < 2 || order > 64) throw InputError("discretization: order must be in [2, 64]");
  if (crack_degree < 1 || crack_degree > 400) throw InputError("discretization: crack_degree must be in [1, 400]");
  if (crack_panels < 1) throw InputError("discretization: crack_panels must be >= 1");
}

BoundaryDiscretization BoundaryDiscretization::build(const PolygonalObstacle& obs, const DiscretizationParams& p) {
  p.validate();
  BoundaryDiscretization bd;
  bd.order = p.order;
  const auto rule = quad::gauss_legendre(p.order);
  int edge_id = 0;
  for (std::size_t c = 0; c < obs.components.size(); ++c) {
    const auto& poly = obs.components[c];
    const std::size_t n = poly.size();
    std::vector<int> lev(n);
    for (std::size_t v = 0; v < n; ++v)
      lev[v] = corner_levels(interior_angle(poly[(v + n - 1) % n], poly[v], poly[(v + 1) % n]), p.grading_levels);
    for (std::size_t e = 0; e < n; ++e, ++edge_id) {
      const Vec2 a = poly[e], b = poly[(e + 1) % n];
      const double len = norm(b - a);
      const int ls = lev[e], le = lev[(e + 1) % n];
      int nu = std::max(p.panels_per_edge, static_cast<int>(std::ceil(len / p.max_panel_length)));
      if (nu == 1 && (ls > 0 || le > 0)) nu = 2;
      std::vector<double> br;
      for (int i = 0; i <= nu; ++i) br.push_back(static_cast<double>(i) / nu);
      const double first = br[1], last = br[static_cast<std::size_t>(nu) - 1];
      for (int l = 1; l <= ls; ++l) br.push_back(first * std::ldexp(1.0, -l));
      for (int l = 1; l <= le; ++l) br.push_back(1.0 - (1.0 - last) * std::ldexp(1.0, -l));
      std::sort(br.begin(), br.end());
      const Vec2 t = (b - a) / len;
      const Vec2 inward{-t.y, t.x};
      for (std::size_t i = 0; i + 1 < br.size(); ++i) {
        Panel P{a + (b - a) * br[i], a + (b - a) * br[i + 1], bd.nodes.size(), static_cast<int>(c), edge_id,
                i == 0 || i + 2 == br.size()};
        const double h = P.length();
        for (int q = 0; q < p.order; ++q) {
          bd.nodes.push_back(P.a + (P.b - P.a) * (0.5 * (rule.x[static_cast<std::size_t>(q)] + 1)));
          bd.weights.push_back(0.5 * h * rule.w[static_cast<std::size_t>(q)]);
          bd.normals.push_back(inward);
        }
        bd.panels.push_back(P);
      }
    }
  }
  return bd;
}

ScatterSolution solve_obstacle(const PolygonalObstacle& obs_in, double k, const Direction& d,
                               const DiscretizationParams& p) {
  if (!(k > 0.0)) throw InputError("solve: k must be positive");
  PolygonalObstacle obs = obs_in;
  obs.validate();
  auto s = std::make_shared<ScatterSolution::Impl>();
  s->shape = obs;
  s->k = k;
  s->d = d;
  s->disc = BoundaryDiscretization::build(obs, p);
  const auto& bd = s->disc;
  const std::size_t N = bd.size();
  const PanelBasis pb = panel_basis(bd.order);

  Eigen::MatrixXcd A = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(N), static_cast<Eigen::Index>(N));
  Eigen::VectorXcd b(static_cast<Eigen::Index>(N));
  std::vector<int> edge_of(N);
  for (const auto& P : bd.panels)
    for (int q = 0; q < bd.order; ++q) edge_of[P.first + static_cast<std::size_t>(q)] = P.edge;

  parallel_for(N, [&](std::size_t i) {
    const Vec2 x = bd.nodes[i];
    const Vec2 n_x = -bd.normals[i];
    const auto ii = static_cast<Eigen::Index>(i);
    for (const auto& P : bd.panels) {
      if (P.edge == edge_of[i]) continue;  // K' vanishes on a straight edge
      const double dist = geometry::segment_distance(x, P.a, P.b);
      if (dist > kNear * P.length()) {
        for (int q = 0; q < bd.order; ++q) {
          const std::size_t j = P.first + static_cast<std::size_t>(q);
          A(ii, static_cast<Eigen::Index>(j)) = kernel_dn(k, x, bd.nodes[j], n_x) * bd.weights[j];
        }
      } else {
        near_integrate(P, x, pb, [&](const Vec2& y, double w, const double* L) {
          const cplx kv = kernel_dn(k, x, y, n_x) * w;
          for (int q = 0; q < bd.order; ++q)
            A(ii, static_cast<Eigen::Index>(P.first + static_cast<std::size_t>(q))) += kv * L[q];
        });
      }
    }
    A(ii, ii) += -0.5;
    b(ii) = -incident(x, k, d).normal_derivative(n_x);
  });

  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(A);
  const double rc = lu.rcond();
  s->info.condition = rc > 0 ? 1.0 / rc : std::numeric_limits<double>::infinity();
  s->info.unknowns = N;
  if (!(s->info.condition <= 1e10)) {
    s->info.resonance = true;
    throw ResonanceError("obstacle system is near-singular (condition " + io::num(s->info.condition) +
                             "); k is close to an interior eigenvalue, shift k slightly",
                         s->info.condition);
  }
  Eigen::VectorXcd x = lu.solve(b);
  Eigen::VectorXcd r = b - A * x;
  x += lu.solve(r);
  r = b - A * x;
  const double bn = b.lpNorm<Eigen::Infinity>();
  s->info.residual = bn > 0 ? r.lpNorm<Eigen::Infinity>() / bn : r.lpNorm<Eigen::Infinity>();
  if (s->info.residual > 1e-10)
    throw NumericalError("obstacle solve residual " + io::num(s->info.residual) + " exceeds 1e-10");
  s->psi.assign(x.data(), x.data() + x.size());
  return ScatterSolution(s);
}

ScatterSolution solve(const Shape& shape, double k, const Direction& d, const DiscretizationParams& p) {
  if (const auto* o = std::get_if<PolygonalObstacle>(&shape)) return solve_obstacle(*o, k, d, p);
  return solve_crack(std::get<CrackSet>(shape), k, d, p);
}

double ScatterSolution::k() const { return impl_->k; }
const Direction& ScatterSolution::d() const { return impl_->d; }
const Shape& ScatterSolution::shape() const { return impl_->shape; }
const SolveInfo& ScatterSolution::info() const { return impl_->info; }

FieldValue ScatterSolution::scattered(const Vec2& x) const {
  return impl_->crack ? crack_scattered(*impl_, x) : obstacle_scattered(*impl_, x);
}

FieldValue ScatterSolution::total(const Vec2& x) const {
  FieldValue f = scattered(x);
  const FieldValue ui = incident(x, impl_->k, impl_->d);
  return {f.value + ui.value, f.dx + ui.dx, f.dy + ui.dy};
}

cplx ScatterSolution::far_field(double phi) const {
  const auto& s = *impl_;
  if (s.crack) return crack_far_field(s, phi);
  const Vec2 u{std::cos(phi), std::sin(phi)};
  cplx acc = 0.0;
  for (std::size_t j = 0; j < s.disc.size(); ++j)
    acc += s.disc.weights[j] * s.psi[j] * std::exp(-kI * s.k * dot(u, s.disc.nodes[j]));
  return std::polar(1.0, kPi / 4) / std::sqrt(8 * kPi * s.k) * acc;
}

std::vector<cplx> far_field(const ScatterSolution& sol, const std::vector<double>& angles) {
  std::vector<cplx> out(angles.size());
  parallel_for(angles.size(), [&](std::size_t i) { out[i] = sol.far_field(angles[i]); });
  return out;
}

farfield::FarFieldDataset far_field_dataset(const ScatterSolution& sol, const farfield::Aperture& ap, int n) {
  if (n < 4) throw InputError("dataset: n must be at least 4");
  farfield::FarFieldDataset ds;
  ds.k = sol.k();
  ds.d = sol.d();
  ds.aperture = ap;
  ds.n = n;
  ds.values = far_field(sol, farfield::aperture_angles(ap, n));
  ds.provenance["scene_hash"] = io::hash_hex(geometry::scene_to_json(sol.shape()));
  ds.provenance["solver"] = sol.impl().crack ? "galerkin-chebyshev-hypersingular" : "nystrom-single-layer";
  ds.provenance["unknowns"] = std::to_string(sol.info().unknowns);
  ds.provenance["condition"] = io::num(sol.info().condition);
  return ds;
}

farfield::CauchyData cauchy_data_on_circle(const ScatterSolution& sol, double R, int n) {
  if (n < 1) throw InputError("cauchy data: n must be positive");
  if (!(R > geometry::scene_radius(sol.shape())))
    throw InputError("cauchy data: circle radius " + io::num(R) + " does not enclose the scene");
  farfield::CauchyData c;
  c.R = R;
  c.theta.resize(static_cast<std::size_t>(n));
  c.u.resize(c.theta.size());
  c.du.resize(c.theta.size());
  parallel_for(c.theta.size(), [&](std::size_t j) {
    const double t = 2 * kPi * static_cast<double>(j) / n;
    const Vec2 nu{std::cos(t), std::sin(t)};
    const FieldValue f = sol.total(R * nu);
    c.theta[j] = t;
    c.u[j] = f.value;
    c.du[j] = f.normal_derivative(nu);
  });
  return c;
}

double boundary_residual(const ScatterSolution& sol) {
  const auto& s = sol.impl();
  if (s.crack) return s.info.residual;
  const auto& bd = s.disc;
  const PanelBasis pb = panel_basis(bd.order);
  std::vector<double> L(static_cast<std::size_t>(bd.order));
  double worst = 0.0;
  for (const auto& P : bd.panels) {
    if (P.touches_corner) continue;
    for (int q = 0; q + 1 < bd.order; ++q) {
      const double t = 0.5 * (pb.nodes.x[static_cast<std::size_t>(q)] + pb.nodes.x[static_cast<std::size_t>(q) + 1]);
      quad::lagrange_values(pb.nodes.x, pb.bary, t, L.data());
      cplx psi = 0.0;
      for (int j = 0; j < bd.order; ++j) psi += L[static_cast<std::size_t>(j)] * s.psi[P.first + static_cast<std::size_t>(j)];
      const Vec2 x = P.a + (P.b - P.a) * (0.5 * (t + 1));
      const Vec2 n_x = -bd.normals[P.first];
      const cplx lhs = -0.5 * psi + apply_dn(s, pb, x, n_x, P.edge);
      worst = std::max(worst, std::abs(lhs + incident(x, s.k, s.d).normal_derivative(n_x)) / s.k);
    }
  }
  return worst;
}

PolygonalObstacle thin_obstacle(const Vec2& a, const Vec2& b, double width, double R) {
  const double len = norm(b - a);
  if (!(len > 0) || !(width > 0)) throw InputError("thin_obstacle: degenerate segment or width");
  const Vec2 t = (b - a) / len;
  const Vec2 n{-t.y * 0.5 * width, t.x * 0.5 * width};
  PolygonalObstacle o{{{a - n, b - n, b + n, a + n}}, R};
  o.validate();
  return o;
}

}  // namespace scatter::forward
