#include "scatter/geometry.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

namespace scatter::geometry {

Direction Direction::from_vector(const Vec2& v) {
  const double n = norm(v);
  if (!(n > 0.0)) throw InputError("direction vector must be nonzero");
  return Direction(std::atan2(v.y, v.x));
}

double signed_area(std::span<const Vec2> loop) {
  double a = 0.0;
  const std::size_t n = loop.size();
  for (std::size_t i = 0; i < n; ++i) a += cross(loop[i], loop[(i + 1) % n]);
  return 0.5 * a;
}

double area(std::span<const Vec2> loop) { return std::abs(signed_area(loop)); }

namespace {

int orientation(const Vec2& a, const Vec2& b, const Vec2& c) {
  const double v = cross(b - a, c - a);
  const double scale = std::max({norm(b - a), norm(c - a), 1e-300});
  if (std::abs(v) <= 1e-14 * scale * scale) return 0;
  return v > 0 ? 1 : -1;
}

bool on_segment(const Vec2& a, const Vec2& b, const Vec2& p) {
  return std::min(a.x, b.x) - 1e-14 <= p.x && p.x <= std::max(a.x, b.x) + 1e-14 &&
         std::min(a.y, b.y) - 1e-14 <= p.y && p.y <= std::max(a.y, b.y) + 1e-14;
}

bool segments_intersect(const Vec2& p1, const Vec2& p2, const Vec2& q1, const Vec2& q2) {
  const int o1 = orientation(p1, p2, q1);
  const int o2 = orientation(p1, p2, q2);
  const int o3 = orientation(q1, q2, p1);
  const int o4 = orientation(q1, q2, p2);
  if (o1 != o2 && o3 != o4) return true;
  if (o1 == 0 && on_segment(p1, p2, q1)) return true;
  if (o2 == 0 && on_segment(p1, p2, q2)) return true;
  if (o3 == 0 && on_segment(q1, q2, p1)) return true;
  if (o4 == 0 && on_segment(q1, q2, p2)) return true;
  return false;
}

bool chains_intersect(std::span<const Vec2> a, bool a_closed, std::span<const Vec2> b,
                      bool b_closed) {
  const std::size_t na = a_closed ? a.size() : a.size() - 1;
  const std::size_t nb = b_closed ? b.size() : b.size() - 1;
  for (std::size_t i = 0; i < na; ++i)
    for (std::size_t j = 0; j < nb; ++j)
      if (segments_intersect(a[i], a[(i + 1) % a.size()], b[j], b[(j + 1) % b.size()]))
        return true;
  return false;
}

bool chain_is_simple(std::span<const Vec2> pts, bool closed) {
  const std::size_t n = pts.size();
  const std::size_t ne = closed ? n : n - 1;
  for (std::size_t i = 0; i < ne; ++i) {
    if (norm(pts[(i + 1) % n] - pts[i]) == 0.0) return false;
    for (std::size_t j = i + 1; j < ne; ++j) {
      const bool adjacent = (j == i + 1) || (closed && i == 0 && j == ne - 1);
      const Vec2 &a = pts[i], &b = pts[(i + 1) % n], &c = pts[j], &d = pts[(j + 1) % n];
      if (adjacent) {
        // Adjacent edges share one vertex; they may not fold back onto each other.
        const Vec2 shared = (j == i + 1) ? b : a;
        const Vec2 u = ((j == i + 1) ? a : b) - shared;
        const Vec2 w = ((j == i + 1) ? d : c) - shared;
        if (orientation(shared, shared + u, shared + w) == 0 && dot(u, w) > 0) return false;
        continue;
      }
      if (segments_intersect(a, b, c, d)) return false;
    }
  }
  return true;
}

void check_inside_disc(std::span<const Vec2> pts, double R, const char* what) {
  if (!(R > 0.0)) throw InputError("scene radius R must be positive");
  for (const auto& p : pts)
    if (!(norm(p) < R))
      throw InputError(std::string(what) + " vertex lies outside the disc of radius R");
}

}  // namespace

bool is_simple(std::span<const Vec2> loop) {
  if (loop.size() < 3) return false;
  return chain_is_simple(loop, true) && area(loop) > 0.0;
}

bool point_in_polygon(const Vec2& p, std::span<const Vec2> loop) {
  bool inside = false;
  const std::size_t n = loop.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Vec2 &a = loop[i], &b = loop[j];
    if ((a.y > p.y) != (b.y > p.y)) {
      const double xc = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
      if (p.x < xc) inside = !inside;
    }
  }
  return inside;
}

double segment_distance(const Vec2& p, const Vec2& a, const Vec2& b) {
  const Vec2 ab = b - a;
  const double len2 = dot(ab, ab);
  double t = len2 > 0.0 ? dot(p - a, ab) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return norm(p - (a + ab * t));
}

double distance_to_polygon(const Vec2& p, std::span<const Vec2> loop) {
  if (loop.size() >= 3 && point_in_polygon(p, loop)) return 0.0;
  double d = std::numeric_limits<double>::infinity();
  const std::size_t n = loop.size();
  for (std::size_t i = 0; i < n; ++i)
    d = std::min(d, segment_distance(p, loop[i], loop[(i + 1) % n]));
  return d;
}

Polygon convex_hull(std::vector<Vec2> pts) {
  std::sort(pts.begin(), pts.end(),
            [](const Vec2& a, const Vec2& b) { return a.x < b.x || (a.x == b.x && a.y < b.y); });
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  if (pts.size() < 3) return pts;
  Polygon h(2 * pts.size());
  std::size_t k = 0;
  for (const auto& p : pts) {
    while (k >= 2 && cross(h[k - 1] - h[k - 2], p - h[k - 2]) <= 0) --k;
    h[k++] = p;
  }
  for (std::size_t i = pts.size() - 1, t = k + 1; i-- > 0;) {
    while (k >= t && cross(h[k - 1] - h[k - 2], pts[i] - h[k - 2]) <= 0) --k;
    h[k++] = pts[i];
  }
  h.resize(k - 1);
  return h;
}

double hausdorff_convex(std::span<const Vec2> a, std::span<const Vec2> b) {
  // For convex sets the distance to the other set is convex along each edge,
  // so the one-sided maxima are attained at vertices.
  double d = 0.0;
  for (const auto& p : a) d = std::max(d, distance_to_polygon(p, b));
  for (const auto& p : b) d = std::max(d, distance_to_polygon(p, a));
  return d;
}

void PolygonalObstacle::validate() {
  if (components.empty()) throw InputError("obstacle has no components");
  for (auto& c : components) {
    if (c.size() < 3) throw InputError("obstacle component needs at least 3 vertices");
    if (!is_simple(c)) throw InputError("obstacle component is not a simple polygon");
    if (signed_area(c) < 0) std::reverse(c.begin(), c.end());
    check_inside_disc(c, R, "obstacle");
  }
  for (std::size_t i = 0; i < components.size(); ++i)
    for (std::size_t j = i + 1; j < components.size(); ++j) {
      const auto &a = components[i], &b = components[j];
      if (chains_intersect(a, true, b, true) || point_in_polygon(a[0], b) ||
          point_in_polygon(b[0], a))
        throw InputError("obstacle components are not disjoint");
    }
}

void CrackSet::validate() const {
  if (arcs.empty()) throw InputError("crack set has no arcs");
  if (witness.size() < 3 || !is_simple(witness))
    throw InputError("crack witness must be a simple polygon");
  check_inside_disc(witness, R, "crack witness");
  double diam = 0.0;
  for (const auto& p : witness)
    for (const auto& q : witness) diam = std::max(diam, norm(p - q));
  const double tol = 1e-9 * std::max(diam, 1.0);
  for (const auto& arc : arcs) {
    if (arc.size() < 2) throw InputError("crack arc needs at least 2 vertices");
    if (!chain_is_simple(arc, false)) throw InputError("crack arc intersects itself");
    check_inside_disc(arc, R, "crack");
    for (std::size_t i = 0; i + 1 < arc.size(); ++i)
      for (double t : {0.0, 0.25, 0.5, 0.75, 1.0}) {
        const Vec2 p = arc[i] + (arc[i + 1] - arc[i]) * t;
        double d = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < witness.size(); ++j)
          d = std::min(d, segment_distance(p, witness[j], witness[(j + 1) % witness.size()]));
        if (d > tol) throw InputError("crack arc does not lie on the witness polygon boundary");
      }
  }
  for (std::size_t i = 0; i < arcs.size(); ++i)
    for (std::size_t j = i + 1; j < arcs.size(); ++j)
      if (chains_intersect(arcs[i], false, arcs[j], false))
        throw InputError("crack arcs are not disjoint");
}

std::vector<Vec2> vertices(const Shape& shape) {
  std::vector<Vec2> out;
  std::visit(
      [&](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, PolygonalObstacle>) {
          for (const auto& c : s.components) out.insert(out.end(), c.begin(), c.end());
        } else {
          for (const auto& a : s.arcs) out.insert(out.end(), a.begin(), a.end());
        }
      },
      shape);
  return out;
}

double diameter(const Shape& shape) {
  const auto v = vertices(shape);
  double d = 0.0;
  for (const auto& p : v)
    for (const auto& q : v) d = std::max(d, norm(p - q));
  return d;
}

double support_function(std::span<const Vec2> pts, const Direction& omega) {
  if (pts.empty()) throw InputError("support function of an empty shape");
  double h = -std::numeric_limits<double>::infinity();
  for (const auto& p : pts) h = std::max(h, dot(p, omega.unit()));
  return h;
}

double support_function(const Shape& shape, const Direction& omega) {
  const auto v = vertices(shape);
  return support_function(v, omega);
}

bool is_regular_direction(const Shape& shape, const Direction& omega, double tol) {
  auto v = vertices(shape);
  if (v.empty()) return false;
  const double h = support_function(v, omega);
  const double eps = tol * std::max(diameter(shape), 1e-300);
  // Distinct attaining vertices; a repeated point (closing a loop) counts once.
  std::vector<Vec2> attain;
  for (const auto& p : v)
    if (h - dot(p, omega.unit()) <= eps &&
        std::none_of(attain.begin(), attain.end(), [&](const Vec2& q) { return norm(p - q) <= eps; }))
      attain.push_back(p);
  return attain.size() == 1;
}

HullResult hull_from_support(std::span<const SupportSample> samples, std::optional<double> bound_R) {
  if (samples.size() < 3) throw InputError("hull_from_support needs at least 3 directions");
  double R = 0.0;
  if (bound_R) {
    R = *bound_R;
  } else {
    for (const auto& s : samples) R = std::max(R, std::abs(s.h));
    R = std::max(1.0, 2.0 * R);
  }
  // Largest angular gap must be below π, otherwise the region is unbounded in some direction.
  std::vector<double> th;
  for (const auto& s : samples) th.push_back(std::remainder(s.omega.theta(), 2 * kPi));
  std::sort(th.begin(), th.end());
  double gap = th.front() + 2 * kPi - th.back();
  for (std::size_t i = 1; i < th.size(); ++i) gap = std::max(gap, th[i] - th[i - 1]);
  if (gap >= kPi) throw InputError("hull_from_support: directions do not span the circle");

  struct Vtx {
    Vec2 p;
    long edge_src;  // constraint generating the edge leaving this vertex (-1: bounding box)
  };
  const double B = 2.0 * R;
  std::vector<Vtx> poly{{{-B, -B}, -1}, {{B, -B}, -1}, {{B, B}, -1}, {{-B, B}, -1}};
  const double min_area = 1e-12 * R * R;

  for (std::size_t c = 0; c < samples.size(); ++c) {
    const Vec2 w = samples[c].omega.unit();
    const double h = samples[c].h;
    std::vector<Vtx> out;
    const std::size_t n = poly.size();
    for (std::size_t i = 0; i < n; ++i) {
      const Vtx& a = poly[i];
      const Vtx& b = poly[(i + 1) % n];
      const double fa = dot(a.p, w) - h;
      const double fb = dot(b.p, w) - h;
      if (fa <= 0) out.push_back(a);
      if ((fa < 0 && fb > 0) || (fa > 0 && fb < 0)) {
        const double t = fa / (fa - fb);
        const Vec2 q = a.p + (b.p - a.p) * t;
        // Entering the feasible side continues a's edge; leaving starts the new constraint edge.
        out.push_back({q, fa < 0 ? static_cast<long>(c) : a.edge_src});
      }
    }
    std::vector<Vec2> pts;
    for (const auto& v : out) pts.push_back(v.p);
    if (out.size() < 3 || area(pts) < min_area) {
      HullResult r;
      r.empty = true;
      for (const auto& v : poly)
        if (v.edge_src >= 0) r.violating.push_back(static_cast<std::size_t>(v.edge_src));
      r.violating.push_back(c);
      std::sort(r.violating.begin(), r.violating.end());
      r.violating.erase(std::unique(r.violating.begin(), r.violating.end()), r.violating.end());
      return r;
    }
    poly = std::move(out);
  }
  HullResult r;
  for (const auto& v : poly) r.vertices.push_back(v.p);
  // Drop vertices that coincide after clipping, then collinear ones.
  const double tol = 1e-10 * R;
  Polygon clean;
  for (const auto& p : r.vertices)
    if (clean.empty() || norm(p - clean.back()) > tol) clean.push_back(p);
  if (clean.size() > 1 && norm(clean.front() - clean.back()) <= tol) clean.pop_back();
  for (bool changed = true; changed && clean.size() > 3;) {
    changed = false;
    for (std::size_t i = 0; i < clean.size(); ++i) {
      const Vec2& a = clean[(i + clean.size() - 1) % clean.size()];
      const Vec2& b = clean[(i + 1) % clean.size()];
      if (std::abs(cross(clean[i] - a, b - a)) <= tol * norm(b - a)) {
        clean.erase(clean.begin() + static_cast<long>(i));
        changed = true;
        break;
      }
    }
  }
  r.vertices = std::move(clean);
  return r;
}

namespace {

using nlohmann::json;

const json& require(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key))
    throw ParseError(std::string("scene: missing field \"") + key + "\"");
  return j.at(key);
}

Vec2 parse_point(const json& p, const std::string& where) {
  if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number())
    throw ParseError("scene: " + where + " must be a [x, y] number pair");
  return {p[0].get<double>(), p[1].get<double>()};
}

std::vector<Vec2> parse_chain(const json& c, const std::string& where) {
  if (!c.is_array()) throw ParseError("scene: " + where + " must be an array of points");
  std::vector<Vec2> out;
  for (std::size_t i = 0; i < c.size(); ++i)
    out.push_back(parse_point(c[i], where + "[" + std::to_string(i) + "]"));
  return out;
}

json chain_json(std::span<const Vec2> c) {
  json a = json::array();
  for (const auto& p : c) a.push_back({p.x, p.y});
  return a;
}

}  // namespace

Shape parse_scene(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("scene: malformed JSON: ") + e.what());
  }
  const auto& ver = require(j, "version");
  if (!ver.is_number_integer() || ver.get<int>() != 1)
    throw ParseError("scene: unsupported \"version\" (expected 1)");
  const auto& type = require(j, "type");
  if (!type.is_string()) throw ParseError("scene: \"type\" must be a string");
  const auto& Rj = require(j, "R");
  if (!Rj.is_number()) throw ParseError("scene: \"R\" must be a number");
  const auto& comps = require(j, "components");
  if (!comps.is_array() || comps.empty())
    throw ParseError("scene: \"components\" must be a nonempty array");

  std::vector<std::vector<Vec2>> chains;
  for (std::size_t i = 0; i < comps.size(); ++i)
    chains.push_back(parse_chain(comps[i], "components[" + std::to_string(i) + "]"));

  const std::string t = type.get<std::string>();
  if (t == "obstacle") {
    PolygonalObstacle ob{chains, Rj.get<double>()};
    ob.validate();
    return ob;
  }
  if (t == "crack") {
    CrackSet cs{chains, parse_chain(require(j, "witness"), "witness"), Rj.get<double>()};
    cs.validate();
    return cs;
  }
  throw ParseError("scene: \"type\" must be \"obstacle\" or \"crack\"");
}

Shape read_scene(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open scene file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_scene(ss.str());
}

std::string scene_to_json(const Shape& shape) {
  json j;
  j["version"] = 1;
  std::visit(
      [&](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        json comps = json::array();
        if constexpr (std::is_same_v<T, PolygonalObstacle>) {
          j["type"] = "obstacle";
          for (const auto& c : s.components) comps.push_back(chain_json(c));
        } else {
          j["type"] = "crack";
          for (const auto& a : s.arcs) comps.push_back(chain_json(a));
          j["witness"] = chain_json(s.witness);
        }
        j["components"] = comps;
        j["R"] = s.R;
      },
      shape);
  return j.dump();
}

double scene_radius(const Shape& shape) {
  double r = 0.0;
  for (const auto& p : vertices(shape)) r = std::max(r, norm(p));
  return r;
}

double enclosing_R(const Shape& shape) {
  return std::visit([](const auto& s) { return s.R; }, shape);
}

}  // namespace scatter::geometry
