#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "ensmot/ensemble.hpp"
#include "ensmot/scenario.hpp"
#include "ensmot/tracker.hpp"

namespace ensmot::cli {

/// Bad or unreadable configuration; maps to exit code 1.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SourceConfig {
  std::string name;
  std::filesystem::path path;  // resolved against the config file's directory
  int stride = 1;
  std::optional<int> phase;  // unset: staggered by position in the list
};

/// Everything `track` and `bench` need:
///
///   kalman:   pos_sigma_scale, vel_sigma_scale, meas_sigma_scale
///   ensemble: nms_iou
///   assoc:    gate_chi2, min_iou
///   tracker:  confirm_hits, max_misses, min_confidence
///   sequence: last_frame
///   sources:  list of {name, path, stride, phase}
struct RunConfig {
  TrackerConfig tracker;
  std::vector<SourceConfig> sources;
  std::optional<FrameIndex> last_frame;
};

using Overrides = std::vector<std::pair<std::string, std::string>>;

/// Parses `--section.key value` pairs (also `--sources[0].stride 2`).
/// Throws ConfigError on a dangling flag or a non-flag token.
Overrides parse_overrides(const std::vector<std::string>& args);

/// Loads a YAML config, applies overrides (flag > file > default), and
/// rejects unknown keys.
RunConfig load_run_config(const std::filesystem::path& path, const Overrides& overrides = {});
RunConfig parse_run_config(const std::string& yaml_text, const std::filesystem::path& base_dir,
                           const Overrides& overrides = {});

/// Reads every source file. Throws ConfigError naming the path of a missing
/// file; MotParseError propagates for malformed rows.
EnsembleSchedule load_schedule(const RunConfig& config);

ScenarioSpec load_scenario_spec(const std::filesystem::path& path);
ScenarioSpec parse_scenario_spec(const std::string& yaml_text);

/// YAML run config for a generated scenario directory (sources point at the
/// `det_<name>.txt` files next to it).
std::string scenario_run_config(const ScenarioSpec& spec);

}  // namespace ensmot::cli
