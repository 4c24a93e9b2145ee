#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "experiments.hpp"
#include "squeezelab/version.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Squeezed-light simulation experiments"};
  app.set_version_flag("--version", std::string(squeezelab::kVersion));
  app.require_subcommand(1);

  std::string config_path;
  std::vector<std::string> overrides;
  std::string out_dir = ".";
  auto* run = app.add_subcommand("run", "Run an experiment from a JSON config");
  run->add_option("--config", config_path, "Experiment config file")->required();
  run->add_option("--set", overrides, "Override a value, key=value (repeatable)");
  run->add_option("--out", out_dir, "Output directory");

  app.add_subcommand("list", "List experiments and their parameters");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : squeezelab::cli::kConfigError;
  }

  if (app.got_subcommand("list")) {
    std::cout << squeezelab::cli::list_experiments();
    return 0;
  }
  return squeezelab::cli::run_main(config_path, overrides, out_dir);
}
