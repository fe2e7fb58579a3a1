#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "eiprec/experiments.hpp"

namespace eiprec::cli {

using nlohmann::json;

// Any problem with flags, config files, overrides or environment. Maps to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Subcommand { spectra, estimate_eta, clean_csi, ber, sweep };

Subcommand subcommand_from_string(std::string_view name);
std::string_view to_string(Subcommand s);
experiments::ExperimentKind experiment_for(Subcommand s);

struct Invocation {
  Subcommand subcommand = Subcommand::spectra;
  std::optional<std::filesystem::path> config_file;
  // "dotted.key=value", applied in order after the file.
  std::vector<std::string> overrides;
  std::filesystem::path out_dir = ".";
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  bool dry_run = false;
  // clean-csi only: observed channel matrix in the binary matrix format.
  std::optional<std::filesystem::path> input;
};

// Complete default tree for a subcommand. Every accepted key appears here.
json default_config(Subcommand s);

// Overlays `layer` onto `base`. Keys absent from `base` are rejected; `origin` names the layer in errors.
void merge_config(json& base, const json& layer, const std::string& origin);

// Parses "a.b=value". The value is read as JSON when possible, otherwise as a bare string.
void apply_override(json& cfg, std::string_view assignment);

// defaults < file < environment (EIPREC_SEED, EIPREC_THREADS) < --set < --seed/--threads.
json resolve(const Invocation& inv, const std::map<std::string, std::string>& env);

// Typed view of a resolved tree; throws ConfigError naming the offending field.
experiments::ExperimentConfig to_experiment(Subcommand s, const json& resolved);

std::uint64_t parse_seed(std::string_view text, std::string_view field);
int parse_threads(std::string_view text, std::string_view field);

}  // namespace eiprec::cli
