#include <iostream>

#include "cli_common.hpp"
#include "scatter/io.hpp"

namespace {

void report_error(const std::string& kind, const std::string& message, int code) {
  const cli::json e = {{"error", kind}, {"message", message}, {"exit_code", code}};
  std::cerr << e.dump() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App root{"Enclosure-method reconstruction of sound-hard polygons and cracks from far-field data"};
  root.set_version_flag("--version", std::string(scatter::io::kToolVersion));
  root.require_subcommand(1);
  std::vector<cli::Command> commands{cli::add_forward(root), cli::add_enclose(root), cli::add_aperture(root),
                                     cli::add_selftest(root)};
  try {
    root.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return root.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return root.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return root.exit(e);
  } catch (const CLI::ParseError& e) {
    report_error("usage", e.what(), cli::kInputFailure);
    return cli::kInputFailure;
  }

  for (auto& cmd : commands) {
    if (!cmd.app->parsed()) continue;
    try {
      if (!cmd.config->empty()) cli::apply_config(*cmd.app, *cmd.config);
      cli::RunInfo info;
      info.command = cmd.app->get_name();
      info.options = cli::effective_options(*cmd.app);
      info.config_hash = scatter::io::hash_hex(info.command + "\n" + info.options.dump());
      return cmd.run(info);
    } catch (const scatter::ParseError& e) {
      report_error("parse", e.what(), cli::kInputFailure);
      return cli::kInputFailure;
    } catch (const scatter::InputError& e) {
      report_error("input", e.what(), cli::kInputFailure);
      return cli::kInputFailure;
    } catch (const scatter::ResonanceError& e) {
      report_error("resonance", e.what(), cli::kNumericalFailure);
      return cli::kNumericalFailure;
    } catch (const scatter::NumericalError& e) {
      report_error("numerical", e.what(), cli::kNumericalFailure);
      return cli::kNumericalFailure;
    } catch (const std::exception& e) {
      report_error("internal", e.what(), cli::kNumericalFailure);
      return cli::kNumericalFailure;
    }
  }
  return cli::kInputFailure;
}
