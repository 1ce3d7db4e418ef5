#include "cli_common.hpp"

#include <filesystem>
#include <set>

#include "scatter/io.hpp"

namespace cli {

using namespace scatter;

namespace {

bool excluded(const CLI::Option* opt) {
  static const std::set<std::string> skip{"help", "config", "out"};
  return opt->get_lnames().empty() || skip.count(opt->get_lnames().front()) > 0;
}

std::vector<std::string> as_strings(const json& v, const std::string& key) {
  auto one = [&](const json& x) -> std::string {
    if (x.is_string()) return x.get<std::string>();
    if (x.is_boolean()) return x.get<bool>() ? "true" : "false";
    if (x.is_number_integer()) return std::to_string(x.get<long long>());
    if (x.is_number()) return io::num(x.get<double>());
    throw InputError("config: value of \"" + key + "\" must be a string, number, boolean or array of those");
  };
  std::vector<std::string> out;
  if (v.is_array()) {
    for (const auto& x : v) out.push_back(one(x));
  } else {
    out.push_back(one(v));
  }
  return out;
}

}  // namespace

void apply_config(CLI::App& cmd, const std::string& path) {
  json cfg;
  try {
    cfg = json::parse(io::read_text(path));
  } catch (const json::parse_error& e) {
    throw ParseError("config " + path + ": " + e.what());
  }
  if (!cfg.is_object()) throw ParseError("config " + path + ": top level must be an object");
  for (const auto& [key, value] : cfg.items()) {
    CLI::Option* opt = cmd.get_option_no_throw("--" + key);
    if (opt == nullptr || key == "help" || key == "config")
      throw InputError("config " + path + ": unknown key \"" + key + "\"");
    if (opt->count() > 0) continue;  // command line wins
    try {
      opt->add_result(as_strings(value, key));
      opt->run_callback();
    } catch (const CLI::Error& e) {
      throw InputError("config " + path + ": \"" + key + "\": " + e.what());
    }
  }
}

json effective_options(const CLI::App& cmd) {
  json j = json::object();
  for (const CLI::Option* opt : cmd.get_options()) {
    if (excluded(opt)) continue;
    const std::string& name = opt->get_lnames().front();
    if (opt->count() > 0) {
      const auto& r = opt->results();
      j[name] = r.size() == 1 ? json(r.front()) : json(r);
    } else {
      j[name] = opt->get_default_str();
    }
  }
  return j;
}

std::string provenance_line(const RunInfo& info) {
  return std::string("scatter-enclose ") + io::kToolVersion + " " + info.command + " config " + info.config_hash;
}

json provenance_json(const RunInfo& info) {
  return {{"tool", "scatter-enclose"},
          {"tool_version", io::kToolVersion},
          {"command", info.command},
          {"config_hash", info.config_hash},
          {"options", info.options}};
}

void ensure_directory(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw InputError("cannot create output directory " + dir + ": " + ec.message());
}

std::string join_path(const std::string& dir, const std::string& name) {
  return (std::filesystem::path(dir) / name).string();
}

void write_file(const std::string& dir, const std::string& name, const std::string& text) {
  io::write_text(join_path(dir, name), text);
}

std::vector<geometry::Direction> directions_from(const std::vector<double>& angles) {
  std::vector<geometry::Direction> out;
  for (double a : angles) out.emplace_back(a);
  return out;
}

geometry::Direction direction_from(const std::vector<double>& v, const std::string& what) {
  if (v.size() == 1) return geometry::Direction(v[0]);
  if (v.size() == 2) return geometry::Direction::from_vector({v[0], v[1]});
  throw InputError(what + ": expected an angle or a vector (x, y)");
}

void write_reconstruction(const std::string& out, const RunInfo& info, const enclosure::ReconstructionResult& r,
                          const std::vector<double>& t_values, const std::vector<geometry::Polygon>& reference,
                          const json& extra) {
  ensure_directory(out);
  const std::string header = provenance_line(info);
  for (std::size_t i = 0; i < r.directions.size(); ++i) {
    const auto& trace = r.directions[i].trace;
    const std::string stem = "trace_" + std::to_string(i);
    write_file(out, stem + ".csv", enclosure::trace_csv(trace, t_values, header));
    write_file(out, stem + ".dat", enclosure::trace_dat(trace, header));
  }
  write_file(out, "hull.dat", enclosure::hull_dat(r.hull, header));
  write_file(out, "hull.svg", enclosure::hull_svg(r.hull, reference, header));

  json j = json::parse(enclosure::result_json(r, {{"tool_version", io::kToolVersion},
                                                  {"config_hash", info.config_hash},
                                                  {"command", info.command}}));
  j["provenance"] = provenance_json(info);
  for (const auto& [key, value] : extra.items()) j[key] = value;
  write_file(out, "result.json", j.dump(2) + "\n");
}

}  // namespace cli
