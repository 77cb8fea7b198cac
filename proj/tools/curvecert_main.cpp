#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "curvecert/runner.hpp"
#include "curvecert/version.hpp"

namespace {

struct CommonArgs {
  std::string config_path;
  std::string out_dir = ".";
  std::uint64_t seed = 0;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config_path, "scenario config file (JSON)")
      ->required();
  cmd->add_option("--out-dir", args.out_dir,
                  "directory for trajectory tables and certificate.json");
  cmd->add_option("--seed", args.seed, "RNG seed recorded in the report");
}

int dispatch(const std::string& subcommand, const CommonArgs& args) {
  curvecert::ScenarioConfig config;
  try {
    config = curvecert::load_config(args.config_path);
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return curvecert::kExitConfig;
  }
  if (subcommand == "check") {
    return curvecert::run_check(config, args.out_dir, args.seed);
  }
  if (curvecert::to_string(config.kind) != subcommand) {
    std::cerr << "config error: config kind '" << to_string(config.kind)
              << "' does not match subcommand '" << subcommand << "'\n";
    return curvecert::kExitConfig;
  }
  return curvecert::run_scenario(config, args.out_dir, args.seed);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"certified integral-curve engine"};
  app.set_version_flag("--version", std::string(curvecert::kToolVersion));
  app.require_subcommand(1);

  CommonArgs args;
  const char* names[] = {"solve", "flow", "certify", "manifold", "check"};
  const char* descriptions[] = {
      "solve one initial value problem and certify convergence",
      "build a local flow over several starts with pairwise distance bounds",
      "solve two starts and certify the distance / uniqueness bound",
      "integrate a named manifold scenario across charts",
      "validate declared constants or chart consistency without solving"};
  for (int i = 0; i < 5; ++i) {
    add_common(app.add_subcommand(names[i], descriptions[i]), args);
  }

  CLI11_PARSE(app, argc, argv);

  for (const char* name : names) {
    if (app.get_subcommand(name)->parsed()) {
      return dispatch(name, args);
    }
  }
  std::cerr << "no subcommand selected\n";
  return curvecert::kExitConfig;
}
