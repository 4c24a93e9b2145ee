#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "table.hpp"

namespace squeezelab::cli {

// Malformed or inconsistent configuration (exit status 2).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum ExitCode : int {
  kSuccess = 0,
  kConfigError = 2,
  kValidationError = 3,
  kRuntimeError = 4,
};

enum class OutputFormat { kCsv, kJson };

struct ExperimentConfig {
  std::string experiment;
  Json parameters = Json::object();
  std::optional<std::uint64_t> seed;
  std::string output_path;  // empty: "<experiment>.<format>"
  OutputFormat output_format = OutputFormat::kCsv;
  // Directory relative paths inside `parameters` are resolved against.
  std::filesystem::path base_dir = ".";
};

struct ParameterDoc {
  std::string name;
  Json default_value;
  std::string description;
};

struct ExperimentInfo {
  std::string name;
  std::string figure;
  std::string summary;
  bool stochastic;
  std::vector<ParameterDoc> parameters;
};

// Fixed documentation order; `list` prints them in this order.
const std::vector<ExperimentInfo>& experiments();
std::string list_experiments();

ExperimentConfig parse_config(const std::string& text,
                              const std::string& source_name = "config");
ExperimentConfig load_config(const std::filesystem::path& path);

// Applies "key=value"; top-level keys are experiment, seed, output_path and
// output_format, anything else addresses `parameters` (dots descend into
// nested objects). Values are parsed as JSON, falling back to a string.
void apply_override(ExperimentConfig& config, const std::string& assignment);

// Fills defaults and rejects unknown keys. Returns the resolved parameters.
Json resolve_parameters(const ExperimentConfig& config);

struct RunResult {
  Table table;
  Json parameters;  // resolved
  std::vector<std::filesystem::path> outputs;
  std::filesystem::path manifest;
};

// Runs the experiment without touching the filesystem (except for reading
// data files named in the parameters).
Table compute(const ExperimentConfig& config, const Json& resolved);

// Runs and writes the data file plus "<stem>.manifest.json" into `out_dir`.
RunResult run(const ExperimentConfig& config,
              const std::filesystem::path& out_dir);

// Maps exceptions from parse/run to exit codes and prints diagnostics.
int run_main(const std::filesystem::path& config_path,
             const std::vector<std::string>& overrides,
             const std::filesystem::path& out_dir);

}  // namespace squeezelab::cli
