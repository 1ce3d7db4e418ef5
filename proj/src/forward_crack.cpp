#include <Eigen/Dense>
#include <algorithm>

#include "forward_internal.hpp"
#include "quadrature.hpp"
#include "scatter/io.hpp"
#include "scatter/specfun.hpp"

namespace scatter::forward {

namespace {

constexpr double kEulerGamma = 0.57721566490153286060651209;
constexpr int kKinkLevels = 10;

// ∫_{−1}^{1} √(1−t²)U_l(t) T_j(t) dt.
double sinu_cheb(int l, int j) {
  double v = 0.0;
  if (j == l) v += 1.0;
  if (l == 0 && j == 0) v += 1.0;
  if (j == l + 2) v -= 1.0;
  return 0.25 * kPi * v;
}

// ∫ log|t − t'| T_j(t') / √(1−t'²) dt' = log_coeff(j) T_j(t).
double log_coeff(int j) { return j == 0 ? -kPi * std::log(2.0) : -kPi / j; }

struct ArcNodes {
  std::vector<double> theta, w, t;
  std::vector<Vec2> y, nu;
};

// Composite Gauss-Legendre in θ = arccos t, graded toward interior vertices.
ArcNodes arc_nodes(const CrackArc& arc, int panels) {
  std::vector<double> br{0.0, kPi};
  std::vector<double> kinks;
  for (double tk : arc.kinks()) kinks.push_back(std::acos(std::clamp(tk, -1.0, 1.0)));
  br.insert(br.end(), kinks.begin(), kinks.end());
  std::sort(br.begin(), br.end());
  std::vector<double> cuts;
  for (std::size_t i = 0; i + 1 < br.size(); ++i) {
    const double a = br[i], b = br[i + 1];
    const int m = std::max(1, static_cast<int>(std::lround(panels * (b - a) / kPi)));
    for (int j = 0; j <= m; ++j) cuts.push_back(a + (b - a) * j / m);
    const double h = (b - a) / m;
    const bool ka = i > 0, kb = i + 2 < br.size();
    for (int l = 1; l <= kKinkLevels; ++l) {
      if (ka) cuts.push_back(a + h * std::ldexp(1.0, -l));
      if (kb) cuts.push_back(b - h * std::ldexp(1.0, -l));
    }
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end(), [](double x, double y) { return std::abs(x - y) < 1e-15; }),
             cuts.end());
  const auto g = quad::gauss_legendre(16);
  ArcNodes an;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double a = cuts[i], b = cuts[i + 1];
    for (std::size_t q = 0; q < g.x.size(); ++q) {
      const double th = a + 0.5 * (b - a) * (g.x[q] + 1);
      an.theta.push_back(th);
      an.w.push_back(0.5 * (b - a) * g.w[q]);
      const double t = std::cos(th);
      an.t.push_back(t);
      an.y.push_back(arc.point(t));
      an.nu.push_back(arc.normal(t));
    }
  }
  return an;
}

cplx helmholtz_phi(double k, double r) { return 0.25 * kI * specfun::hankel01(k * r).h0; }

}  // namespace

CrackArc::CrackArc(geometry::Polyline p) : pts(std::move(p)) {
  if (pts.size() < 2) throw InputError("crack arc needs at least two vertices");
  s.push_back(0.0);
  for (std::size_t i = 1; i < pts.size(); ++i) {
    const double h = norm(pts[i] - pts[i - 1]);
    if (!(h > 0)) throw InputError("crack arc has a repeated vertex");
    s.push_back(s.back() + h);
  }
  L = s.back();
}

int CrackArc::segment(double t) const {
  const double sig = 0.5 * (t + 1) * L;
  const auto it = std::upper_bound(s.begin(), s.end(), sig);
  const long i = std::distance(s.begin(), it) - 1;
  return static_cast<int>(std::clamp<long>(i, 0, static_cast<long>(pts.size()) - 2));
}

Vec2 CrackArc::point(double t) const {
  const int i = segment(t);
  const double sig = 0.5 * (t + 1) * L;
  const double h = s[static_cast<std::size_t>(i) + 1] - s[static_cast<std::size_t>(i)];
  const double u = (sig - s[static_cast<std::size_t>(i)]) / h;
  return pts[static_cast<std::size_t>(i)] + (pts[static_cast<std::size_t>(i) + 1] - pts[static_cast<std::size_t>(i)]) * u;
}

Vec2 CrackArc::normal(double t) const {
  const int i = segment(t);
  const Vec2 dv = pts[static_cast<std::size_t>(i) + 1] - pts[static_cast<std::size_t>(i)];
  const double h = norm(dv);
  return {-dv.y / h, dv.x / h};
}

std::vector<double> CrackArc::kinks() const {
  std::vector<double> out;
  for (std::size_t i = 1; i + 1 < pts.size(); ++i) out.push_back(2 * s[i] / L - 1);
  return out;
}

ScatterSolution solve_crack(const CrackSet& cracks, double k, const Direction& d, const DiscretizationParams& p) {
  if (!(k > 0.0)) throw InputError("solve: k must be positive");
  p.validate();
  cracks.validate();
  auto sp = std::make_shared<ScatterSolution::Impl>();
  auto& s = *sp;
  s.shape = cracks;
  s.k = k;
  s.d = d;
  s.crack = true;
  for (const auto& a : cracks.arcs) s.arcs.emplace_back(a);

  const int P = p.crack_degree;
  const std::size_t na = s.arcs.size();
  std::vector<ArcNodes> nodes;
  for (const auto& a : s.arcs) nodes.push_back(arc_nodes(a, p.crack_panels));

  // Basis samples with quadrature weights: Bm ↔ μ_n dt, Bd ↔ μ_n' dt.
  std::vector<Eigen::MatrixXd> Bm(na), Bd(na);
  for (std::size_t a = 0; a < na; ++a) {
    const auto& an = nodes[a];
    const auto Q = static_cast<Eigen::Index>(an.theta.size());
    Bm[a].resize(P, Q);
    Bd[a].resize(P, Q);
    for (Eigen::Index q = 0; q < Q; ++q) {
      const double th = an.theta[static_cast<std::size_t>(q)], w = an.w[static_cast<std::size_t>(q)];
      for (int n = 0; n < P; ++n) {
        Bm[a](n, q) = std::sin((n + 1) * th) * std::sin(th) * w;
        Bd[a](n, q) = -(n + 1) * std::cos((n + 1) * th) * w;
      }
    }
  }

  const auto dim = static_cast<Eigen::Index>(P * na);
  Eigen::MatrixXcd A = Eigen::MatrixXcd::Zero(dim, dim);
  Eigen::VectorXcd rhs(dim);
  for (std::size_t a = 0; a < na; ++a) {
    for (std::size_t b = 0; b < na; ++b) {
      const auto& na_ = nodes[a];
      const auto& nb = nodes[b];
      const std::size_t Qa = na_.theta.size(), Qb = nb.theta.size();
      Eigen::MatrixXcd K1(static_cast<Eigen::Index>(Qa), static_cast<Eigen::Index>(Qb));
      Eigen::MatrixXcd K2(static_cast<Eigen::Index>(Qa), static_cast<Eigen::Index>(Qb));
      const double La = s.arcs[a].L, Lb = s.arcs[b].L;
      const cplx kr_diag = 0.25 * kI - (std::log(0.5 * k) + kEulerGamma) / (2 * kPi) - std::log(0.5 * La) / (2 * kPi);
      parallel_for(Qa, [&](std::size_t q) {
        for (std::size_t r = 0; r < Qb; ++r) {
          const double nn = dot(na_.nu[q], nb.nu[r]);
          cplx k1, k2;
          if (a != b) {
            k1 = helmholtz_phi(k, norm(na_.y[q] - nb.y[r]));
            k2 = k1 * nn;
          } else if (q == r) {
            k1 = kr_diag;
            k2 = kr_diag;
          } else {
            const double lg = std::log(std::abs(na_.t[q] - nb.t[r])) / (2 * kPi);
            const cplx ph = helmholtz_phi(k, norm(na_.y[q] - nb.y[r]));
            k1 = ph + lg;
            k2 = ph * nn + lg;
          }
          K1(static_cast<Eigen::Index>(q), static_cast<Eigen::Index>(r)) = k1;
          K2(static_cast<Eigen::Index>(q), static_cast<Eigen::Index>(r)) = k2;
        }
      });
      Eigen::MatrixXcd blk = -(Bd[a].cast<cplx>() * K1 * Bd[b].transpose().cast<cplx>()) +
                             (k * k * 0.25 * La * Lb) * (Bm[a].cast<cplx>() * K2 * Bm[b].transpose().cast<cplx>());
      if (a == b) {
        const double c2 = -k * k * 0.25 * La * La / (2 * kPi);
        for (int l = 0; l < P; ++l) {
          blk(l, l) += -(l + 1) * kPi / 4;
          for (int n = 0; n < P; ++n) {
            const double g = 0.5 * (log_coeff(n) * sinu_cheb(l, n) - log_coeff(n + 2) * sinu_cheb(l, n + 2));
            blk(l, n) += c2 * g;
          }
        }
      }
      A.block(static_cast<Eigen::Index>(a) * P, static_cast<Eigen::Index>(b) * P, P, P) = blk;
    }
    const auto& an = nodes[a];
    for (int l = 0; l < P; ++l) {
      cplx acc = 0.0;
      for (std::size_t q = 0; q < an.theta.size(); ++q)
        acc += incident(an.y[q], k, d).normal_derivative(an.nu[q]) * Bm[a](l, static_cast<Eigen::Index>(q));
      rhs(static_cast<Eigen::Index>(a) * P + l) = -0.5 * s.arcs[a].L * acc;
    }
  }

  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(A);
  const double rc = lu.rcond();
  s.info.condition = rc > 0 ? 1.0 / rc : std::numeric_limits<double>::infinity();
  s.info.unknowns = static_cast<std::size_t>(dim);
  if (!(s.info.condition <= 1e10)) {
    s.info.resonance = true;
    throw ResonanceError("crack system is near-singular (condition " + io::num(s.info.condition) + ")",
                         s.info.condition);
  }
  Eigen::VectorXcd x = lu.solve(rhs);
  Eigen::VectorXcd res = rhs - A * x;
  x += lu.solve(res);
  res = rhs - A * x;
  const double bn = rhs.lpNorm<Eigen::Infinity>();
  s.info.residual = bn > 0 ? res.lpNorm<Eigen::Infinity>() / bn : res.lpNorm<Eigen::Infinity>();
  if (s.info.residual > 1e-10)
    throw NumericalError("crack solve residual " + io::num(s.info.residual) + " exceeds 1e-10");

  for (std::size_t a = 0; a < na; ++a) {
    std::vector<cplx> c(static_cast<std::size_t>(P));
    for (int n = 0; n < P; ++n) c[static_cast<std::size_t>(n)] = x(static_cast<Eigen::Index>(a) * P + n);
    s.coeffs.push_back(c);
    // Denser rule for field evaluation.
    const auto an = arc_nodes(s.arcs[a], std::max(2 * p.crack_panels, P));
    CrackQuad cq;
    for (std::size_t q = 0; q < an.theta.size(); ++q) {
      const double th = an.theta[q];
      cplx mu = 0.0;
      for (int n = 0; n < P; ++n) mu += c[static_cast<std::size_t>(n)] * std::sin((n + 1) * th);
      cq.y.push_back(an.y[q]);
      cq.nu.push_back(an.nu[q]);
      cq.w.push_back(an.w[q] * 0.5 * s.arcs[a].L * std::sin(th));
      cq.mu.push_back(mu);
    }
    s.quads.push_back(std::move(cq));
  }
  return ScatterSolution(sp);
}

FieldValue crack_scattered(const ScatterSolution::Impl& s, const Vec2& x) {
  FieldValue f;
  const double k = s.k;
  for (const auto& cq : s.quads) {
    for (std::size_t q = 0; q < cq.y.size(); ++q) {
      const Vec2 r = x - cq.y[q];
      const double rn = norm(r);
      if (rn == 0.0) throw InputError("field evaluation point lies on the crack");
      const auto h = specfun::hankel01(k * rn);
      const cplx fr = h.h1 / rn;
      const cplx dfr = (k * h.h0 - 2.0 * h.h1 / rn) / rn;
      const double rnu = dot(r, cq.nu[q]);
      const cplx c = 0.25 * kI * k * cq.w[q] * cq.mu[q];
      f.value += c * rnu * fr;
      f.dx += c * (cq.nu[q].x * fr + rnu * dfr * r.x / rn);
      f.dy += c * (cq.nu[q].y * fr + rnu * dfr * r.y / rn);
    }
  }
  return f;
}

cplx crack_far_field(const ScatterSolution::Impl& s, double phi) {
  const Vec2 u{std::cos(phi), std::sin(phi)};
  cplx acc = 0.0;
  for (const auto& cq : s.quads)
    for (std::size_t q = 0; q < cq.y.size(); ++q)
      acc += -kI * s.k * dot(u, cq.nu[q]) * std::exp(-kI * s.k * dot(u, cq.y[q])) * cq.w[q] * cq.mu[q];
  return std::polar(1.0, kPi / 4) / std::sqrt(8 * kPi * s.k) * acc;
}

}  // namespace scatter::forward
