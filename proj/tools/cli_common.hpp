#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "scatter/common.hpp"
#include "scatter/enclosure.hpp"
#include "scatter/geometry.hpp"

namespace cli {

using json = nlohmann::json;

enum ExitCode { kOk = 0, kInputFailure = 2, kNumericalFailure = 3, kSelftestFailure = 4 };

/// What a run knows about itself; embedded in every output file.
struct RunInfo {
  std::string command;
  std::string config_hash;  // hash of the effective options (output paths excluded)
  json options;             // effective options
};

struct Command {
  CLI::App* app = nullptr;
  std::shared_ptr<std::string> config = std::make_shared<std::string>();
  std::function<int(const RunInfo&)> run;
};

Command add_forward(CLI::App& root);
Command add_enclose(CLI::App& root);
Command add_aperture(CLI::App& root);
Command add_selftest(CLI::App& root);

/// Fills options of `cmd` that were not given on the command line from a JSON object file.
/// Keys are long option names without the dashes; unknown keys are rejected.
void apply_config(CLI::App& cmd, const std::string& path);

/// Effective values of the options of `cmd`, keyed by long name; --config and --out excluded.
json effective_options(const CLI::App& cmd);

/// "scatter-enclose <version> <command> config <hash>"
std::string provenance_line(const RunInfo& info);
json provenance_json(const RunInfo& info);

void ensure_directory(const std::string& dir);
std::string join_path(const std::string& dir, const std::string& name);
void write_file(const std::string& dir, const std::string& name, const std::string& text);

std::vector<scatter::geometry::Direction> directions_from(const std::vector<double>& angles);
scatter::geometry::Direction direction_from(const std::vector<double>& v, const std::string& what);

/// Writes trace CSV/.dat files, hull .dat/.svg and result.json for a reconstruction.
void write_reconstruction(const std::string& out, const RunInfo& info, const scatter::enclosure::ReconstructionResult& r,
                          const std::vector<double>& t_values, const std::vector<scatter::geometry::Polygon>& reference,
                          const json& extra = json::object());

}  // namespace cli
