#include "scatter/farfield.hpp"

#include <json.hpp>
#include <limits>

#include "scatter/io.hpp"
#include "scatter/specfun.hpp"

namespace scatter::farfield {

using nlohmann::json;

Aperture Aperture::arc(double t1, double t2) {
  if (!(t2 > t1) || t2 - t1 > 2 * kPi + 1e-12) throw InputError("aperture: need theta1 < theta2 <= theta1 + 2pi");
  return {false, t1, t2};
}

std::vector<double> aperture_angles(const Aperture& ap, int n) {
  std::vector<double> a(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) {
    a[static_cast<std::size_t>(j)] = ap.full ? 2 * kPi * j / n
                                             : ap.theta1 + (j + 0.5) * (ap.theta2 - ap.theta1) / n;
  }
  return a;
}

double FarFieldDataset::angle(int j) const {
  return aperture.full ? 2 * kPi * j / n : aperture.theta1 + (j + 0.5) * aperture.length() / n;
}

std::vector<double> FarFieldDataset::angles() const { return aperture_angles(aperture, n); }

void FarFieldDataset::validate() const {
  if (n < 4) throw InputError("dataset: n must be at least 4");
  if (!(k > 0.0)) throw InputError("dataset: k must be positive");
  if (values.size() != static_cast<std::size_t>(n)) throw InputError("dataset: values length differs from n");
  if (!aperture.full && !(aperture.theta2 > aperture.theta1)) throw InputError("dataset: empty aperture arc");
  for (const auto& v : values)
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) throw InputError("dataset: non-finite value");
}

FourierSpectrum fourier_spectrum(const FarFieldDataset& ds, int m_max) {
  if (!ds.aperture.full)
    throw InputError("fourier_spectrum: needs a full-aperture dataset (arcs go through the aperture solver)");
  if (m_max < 0) throw InputError("fourier_spectrum: m_max must be nonnegative");
  const int n = ds.n;
  if (n % 2 != 0 || n < 4 * (m_max + 1))
    throw InputError("fourier_spectrum: n = " + std::to_string(n) + " aliases orders up to " +
                     std::to_string(m_max) + " (need even n >= 4(m_max+1))");
  std::vector<cplx> roots(static_cast<std::size_t>(n));
  for (int l = 0; l < n; ++l) roots[static_cast<std::size_t>(l)] = std::polar(1.0, 2 * kPi * l / n);
  FourierSpectrum s{m_max, ds.k, std::vector<cplx>(static_cast<std::size_t>(2 * m_max + 1))};
  const int half = n / 2;
  double l1 = 0.0;
  for (const auto& v : ds.values) l1 += std::abs(v);
  s.floor = 4 * std::numeric_limits<double>::epsilon() * l1 * (2 * kPi / n);
  for (int m = -m_max; m <= m_max; ++m) {
    cplx acc = 0.0;
    const long mm = ((m % n) + n) % n;
    for (int j = 0; j < n; ++j) {
      const cplx f = ds.values[static_cast<std::size_t>((j + half) % n)];  // F(−φ_j)
      acc += f * roots[static_cast<std::size_t>((mm * j) % n)];
    }
    s.G[static_cast<std::size_t>(m + m_max)] = acc * (2 * kPi / n);
  }
  return s;
}

FourierSpectrum plane_wave_spectrum(double k, const Vec2& y0, int m_max) {
  if (!(k > 0.0)) throw InputError("plane_wave_spectrum: k must be positive");
  if (m_max < 0) throw InputError("plane_wave_spectrum: m_max must be nonnegative");
  const double r = norm(y0), th = std::atan2(y0.y, y0.x);
  const auto J = specfun::bessel_j_seq(m_max, k * r);
  FourierSpectrum s{m_max, k, std::vector<cplx>(static_cast<std::size_t>(2 * m_max + 1))};
  const cplx ipow[4] = {1.0, {0.0, 1.0}, -1.0, {0.0, -1.0}};
  for (int m = -m_max; m <= m_max; ++m) {
    const int a = std::abs(m);
    s.G[static_cast<std::size_t>(m + m_max)] = 2 * kPi * ipow[a % 4] * J[a] * std::polar(1.0, m * th);
  }
  return s;
}

cplx pair_with_density(const FourierSpectrum& spec, const herglotz::DensityCoeffs& dc) {
  if (spec.m_max < dc.N())
    throw InputError("pairing: spectrum has m_max = " + std::to_string(spec.m_max) + " < N = " +
                     std::to_string(dc.N()));
  cplx acc = 0.0;
  for (int m = -dc.N(); m <= dc.N(); ++m) acc += dc.c(m) * spec.coeff(m);
  return acc;
}

cplx pair_by_quadrature(const FarFieldDataset& ds, const herglotz::DensityCoeffs& dc) {
  if (!ds.aperture.full) throw InputError("pair_by_quadrature: needs a full aperture");
  cplx acc = 0.0;
  for (int j = 0; j < ds.n; ++j) {
    const cplx f = ds.values[static_cast<std::size_t>((j + ds.n / 2) % ds.n)];
    acc += f * dc.evaluate_angle(ds.angle(j));
  }
  return acc * (2 * kPi / ds.n);
}

cplx nearfield_pairing(const CauchyData& c, const Field& v) {
  const std::size_t n = c.theta.size();
  if (n < 128) throw InputError("nearfield_pairing: need at least 128 samples");
  cplx acc = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const Vec2 nu{std::cos(c.theta[j]), std::sin(c.theta[j])};
    const FieldValue f = v(c.R * nu);
    acc += c.du[j] * f.value - f.normal_derivative(nu) * c.u[j];
  }
  return acc * (2 * kPi * c.R / static_cast<double>(n));
}

cplx pairing_factor(double k) { return -std::polar(1.0, kPi / 4) / std::sqrt(8 * kPi * k); }

namespace {

const json& field(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw ParseError(std::string("dataset: missing field \"") + key + "\"");
  return j.at(key);
}

double number(const json& j, const char* key) {
  const json& v = field(j, key);
  if (!v.is_number()) throw ParseError(std::string("dataset: field \"") + key + "\" must be a number");
  return v.get<double>();
}

}  // namespace

FarFieldDataset parse_dataset(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("dataset: ") + e.what());
  }
  const json& ver = field(j, "version");
  if (!ver.is_number_integer() || ver.get<int>() != 1)
    throw ParseError("dataset: unsupported version " + ver.dump());
  FarFieldDataset ds;
  ds.k = number(j, "k");
  const json& d = field(j, "d");
  if (!d.is_array() || d.size() != 2 || !d[0].is_number() || !d[1].is_number())
    throw ParseError("dataset: field \"d\" must be [dx, dy]");
  ds.d = Direction::from_vector({d[0].get<double>(), d[1].get<double>()});
  const json& ap = field(j, "aperture");
  const json& tj = field(ap, "type");
  const std::string type = tj.is_string() ? tj.get<std::string>() : std::string();
  if (type == "full") {
    ds.aperture = Aperture::circle();
  } else if (type == "arc") {
    ds.aperture = Aperture::arc(number(ap, "theta1"), number(ap, "theta2"));
  } else {
    throw ParseError("dataset: aperture type must be \"full\" or \"arc\"");
  }
  const json& n = field(j, "n");
  if (!n.is_number_integer()) throw ParseError("dataset: field \"n\" must be an integer");
  ds.n = n.get<int>();
  const json& vals = field(j, "values");
  if (!vals.is_array()) throw ParseError("dataset: field \"values\" must be an array");
  for (std::size_t i = 0; i < vals.size(); ++i) {
    const json& v = vals[i];
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
      throw ParseError("dataset: values[" + std::to_string(i) + "] must be [re, im]");
    ds.values.emplace_back(v[0].get<double>(), v[1].get<double>());
  }
  if (j.contains("provenance") && j["provenance"].is_object())
    for (const auto& [key, val] : j["provenance"].items())
      ds.provenance[key] = val.is_string() ? val.get<std::string>() : val.dump();
  try {
    ds.validate();
  } catch (const InputError& e) {
    throw ParseError(e.what());
  }
  return ds;
}

FarFieldDataset read_dataset(const std::string& path) { return parse_dataset(io::read_text(path)); }

std::string dataset_to_json(const FarFieldDataset& ds) {
  json j;
  j["version"] = 1;
  j["k"] = ds.k;
  j["d"] = {ds.d.unit().x, ds.d.unit().y};
  if (ds.aperture.full)
    j["aperture"] = {{"type", "full"}};
  else
    j["aperture"] = {{"type", "arc"}, {"theta1", ds.aperture.theta1}, {"theta2", ds.aperture.theta2}};
  j["n"] = ds.n;
  json vals = json::array();
  for (const auto& v : ds.values) vals.push_back({v.real(), v.imag()});
  j["values"] = std::move(vals);
  json prov = json::object();
  for (const auto& [key, val] : ds.provenance) prov[key] = val;
  j["provenance"] = std::move(prov);
  return j.dump(1) + "\n";
}

void write_dataset(const FarFieldDataset& ds, const std::string& path) { io::write_text(path, dataset_to_json(ds)); }

std::string spectrum_csv(const FourierSpectrum& spec) {
  std::string out = "m,re,im\n";
  for (int m = -spec.m_max; m <= spec.m_max; ++m) {
    const cplx g = spec.coeff(m);
    out += std::to_string(m) + "," + io::num(g.real()) + "," + io::num(g.imag()) + "\n";
  }
  return out;
}

std::string cauchy_csv(const CauchyData& c) {
  std::string out = "theta,re_u,im_u,re_du,im_du\n";
  for (std::size_t j = 0; j < c.theta.size(); ++j) {
    out += io::num(c.theta[j]) + "," + io::num(c.u[j].real()) + "," + io::num(c.u[j].imag()) + "," +
           io::num(c.du[j].real()) + "," + io::num(c.du[j].imag()) + "\n";
  }
  return out;
}

}  // namespace scatter::farfield
