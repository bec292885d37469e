#include "run_config.hpp"

#include <yaml-cpp/yaml.h>

#include <fstream>
#include <set>
#include <sstream>

#include "ensmot/mot_io.hpp"

namespace ensmot::cli {

namespace {

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config '" + path.string() + "'");
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

YAML::Node parse_yaml(const std::string& text) {
  try {
    YAML::Node root = YAML::Load(text);
    if (root.IsNull()) return YAML::Node(YAML::NodeType::Map);
    if (!root.IsMap()) throw ConfigError("config root must be a mapping");
    return root;
  } catch (const YAML::Exception& e) {
    throw ConfigError(std::string("config is not valid YAML: ") + e.what());
  }
}

template <class T>
T read(const YAML::Node& node, const std::string& key) {
  try {
    return node.as<T>();
  } catch (const YAML::Exception&) {
    throw ConfigError("config key '" + key + "' has an invalid value '" +
                      (node.IsScalar() ? node.Scalar() : std::string("<non-scalar>")) + "'");
  }
}

void require_map(const YAML::Node& node, const std::string& key) {
  if (!node.IsMap()) throw ConfigError("config key '" + key + "' must be a mapping");
}

void reject_unknown(const YAML::Node& map, const std::string& prefix,
                    const std::set<std::string>& allowed) {
  for (const auto& kv : map) {
    const auto key = kv.first.as<std::string>();
    if (!allowed.count(key)) {
      throw ConfigError("unknown config key '" + (prefix.empty() ? key : prefix + "." + key) + "'");
    }
  }
}

// "sources[1].stride" -> {sources, 1}, {stride}
struct PathStep {
  std::string key;
  std::optional<std::size_t> index;
};

std::vector<PathStep> split_key(const std::string& dotted) {
  std::vector<PathStep> steps;
  std::stringstream ss(dotted);
  std::string part;
  while (std::getline(ss, part, '.')) {
    PathStep step;
    const auto bracket = part.find('[');
    if (bracket != std::string::npos) {
      if (part.back() != ']') throw ConfigError("malformed override key '" + dotted + "'");
      try {
        step.index = std::stoul(part.substr(bracket + 1, part.size() - bracket - 2));
      } catch (const std::exception&) {
        throw ConfigError("malformed override key '" + dotted + "'");
      }
      part = part.substr(0, bracket);
    }
    if (part.empty()) throw ConfigError("malformed override key '" + dotted + "'");
    step.key = part;
    steps.push_back(step);
  }
  if (steps.empty()) throw ConfigError("empty override key");
  return steps;
}

void apply_override(YAML::Node root, const std::string& key, const std::string& value) {
  const auto steps = split_key(key);
  YAML::Node cur = root;
  for (std::size_t i = 0; i < steps.size(); ++i) {
    const bool last = i + 1 == steps.size();
    YAML::Node next = cur[steps[i].key];
    if (steps[i].index) {
      if (!next.IsSequence() || *steps[i].index >= next.size()) {
        throw ConfigError("override '" + key + "' refers to a missing list entry");
      }
      YAML::Node item = next[*steps[i].index];
      next.reset(item);
      if (last) throw ConfigError("override '" + key + "' must name a field");
    }
    if (last) {
      next = value;
    } else if (!next.IsDefined() || next.IsNull()) {
      next = YAML::Node(YAML::NodeType::Map);
    }
    cur.reset(next);
  }
}

}  // namespace

Overrides parse_overrides(const std::vector<std::string>& args) {
  Overrides out;
  for (std::size_t i = 0; i < args.size(); ++i) {
    const std::string& a = args[i];
    if (a.rfind("--", 0) != 0 || a.size() <= 2) {
      throw ConfigError("unexpected argument '" + a + "'");
    }
    std::string key = a.substr(2);
    const auto eq = key.find('=');
    if (eq != std::string::npos) {
      out.emplace_back(key.substr(0, eq), key.substr(eq + 1));
      continue;
    }
    if (i + 1 >= args.size()) throw ConfigError("flag '" + a + "' needs a value");
    out.emplace_back(key, args[++i]);
  }
  return out;
}

RunConfig parse_run_config(const std::string& yaml_text, const std::filesystem::path& base_dir,
                           const Overrides& overrides) {
  YAML::Node root = parse_yaml(yaml_text);
  for (const auto& [k, v] : overrides) apply_override(root, k, v);

  reject_unknown(root, "", {"kalman", "ensemble", "assoc", "tracker", "sequence", "sources"});
  RunConfig cfg;
  TrackerConfig& t = cfg.tracker;

  if (auto n = root["kalman"]) {
    require_map(n, "kalman");
    reject_unknown(n, "kalman", {"pos_sigma_scale", "vel_sigma_scale", "meas_sigma_scale"});
    if (n["pos_sigma_scale"]) t.noise.pos_sigma_scale = read<double>(n["pos_sigma_scale"], "kalman.pos_sigma_scale");
    if (n["vel_sigma_scale"]) t.noise.vel_sigma_scale = read<double>(n["vel_sigma_scale"], "kalman.vel_sigma_scale");
    if (n["meas_sigma_scale"]) t.noise.meas_sigma_scale = read<double>(n["meas_sigma_scale"], "kalman.meas_sigma_scale");
  }
  if (auto n = root["ensemble"]) {
    require_map(n, "ensemble");
    reject_unknown(n, "ensemble", {"nms_iou"});
    if (n["nms_iou"]) t.nms_iou = read<double>(n["nms_iou"], "ensemble.nms_iou");
  }
  if (auto n = root["assoc"]) {
    require_map(n, "assoc");
    reject_unknown(n, "assoc", {"gate_chi2", "min_iou"});
    if (n["gate_chi2"]) t.gate_chi2 = read<double>(n["gate_chi2"], "assoc.gate_chi2");
    if (n["min_iou"]) t.min_iou = read<double>(n["min_iou"], "assoc.min_iou");
  }
  if (auto n = root["tracker"]) {
    require_map(n, "tracker");
    reject_unknown(n, "tracker", {"confirm_hits", "max_misses", "min_confidence"});
    if (n["confirm_hits"]) t.confirm_hits = read<int>(n["confirm_hits"], "tracker.confirm_hits");
    if (n["max_misses"]) t.max_misses = read<int>(n["max_misses"], "tracker.max_misses");
    if (n["min_confidence"]) t.min_confidence = read<double>(n["min_confidence"], "tracker.min_confidence");
  }
  if (auto n = root["sequence"]) {
    require_map(n, "sequence");
    reject_unknown(n, "sequence", {"last_frame"});
    if (n["last_frame"]) cfg.last_frame = read<int>(n["last_frame"], "sequence.last_frame");
    if (cfg.last_frame && *cfg.last_frame < 1) throw ConfigError("sequence.last_frame must be >= 1");
  }
  if (auto n = root["sources"]) {
    if (!n.IsSequence()) throw ConfigError("config key 'sources' must be a list");
    for (std::size_t i = 0; i < n.size(); ++i) {
      const std::string prefix = "sources[" + std::to_string(i) + "]";
      const YAML::Node s = n[i];
      require_map(s, prefix);
      reject_unknown(s, prefix, {"name", "path", "stride", "phase"});
      SourceConfig sc;
      if (!s["path"]) throw ConfigError("config key '" + prefix + ".path' is required");
      sc.path = read<std::string>(s["path"], prefix + ".path");
      if (sc.path.is_relative()) sc.path = base_dir / sc.path;
      sc.name = s["name"] ? read<std::string>(s["name"], prefix + ".name")
                          : sc.path.stem().string();
      if (s["stride"]) sc.stride = read<int>(s["stride"], prefix + ".stride");
      if (s["phase"]) sc.phase = read<int>(s["phase"], prefix + ".phase");
      if (sc.stride < 1) throw ConfigError(prefix + ".stride must be >= 1");
      if (sc.phase && (*sc.phase < 0 || *sc.phase >= sc.stride)) {
        throw ConfigError(prefix + ".phase must lie in [0, stride)");
      }
      cfg.sources.push_back(std::move(sc));
    }
  }

  try {
    t.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path, const Overrides& overrides) {
  return parse_run_config(read_text(path), path.parent_path(), overrides);
}

EnsembleSchedule load_schedule(const RunConfig& config) {
  if (config.sources.empty()) throw ConfigError("config names no detector sources");
  std::vector<DetectorSource> sources;
  for (std::size_t i = 0; i < config.sources.size(); ++i) {
    const SourceConfig& sc = config.sources[i];
    if (!std::filesystem::is_regular_file(sc.path)) {
      throw ConfigError("source file not found: '" + sc.path.string() + "'");
    }
    DetectorSource s;
    s.source_id = static_cast<SourceId>(i + 1);
    s.name = sc.name;
    s.stride = sc.stride;
    s.phase = sc.phase.value_or(default_phase(static_cast<int>(i), sc.stride));
    const auto rows = parse_mot_file(sc.path);
    s.detections = to_detection_set(rows, s.source_id);
    sources.push_back(std::move(s));
  }
  return EnsembleSchedule(std::move(sources));
}

ScenarioSpec parse_scenario_spec(const std::string& yaml_text) {
  const YAML::Node root = parse_yaml(yaml_text);
  reject_unknown(root, "", {"num_objects", "num_frames", "arena_width", "arena_height", "layout",
                            "min_height", "max_height", "aspect", "min_speed", "max_speed",
                            "rng_seed", "detectors"});
  ScenarioSpec spec;
  if (root["num_objects"]) spec.num_objects = read<int>(root["num_objects"], "num_objects");
  if (root["num_frames"]) spec.num_frames = read<int>(root["num_frames"], "num_frames");
  if (root["arena_width"]) spec.arena_width = read<double>(root["arena_width"], "arena_width");
  if (root["arena_height"]) spec.arena_height = read<double>(root["arena_height"], "arena_height");
  if (root["min_height"]) spec.min_height = read<double>(root["min_height"], "min_height");
  if (root["max_height"]) spec.max_height = read<double>(root["max_height"], "max_height");
  if (root["aspect"]) spec.aspect = read<double>(root["aspect"], "aspect");
  if (root["min_speed"]) spec.min_speed = read<double>(root["min_speed"], "min_speed");
  if (root["max_speed"]) spec.max_speed = read<double>(root["max_speed"], "max_speed");
  if (root["rng_seed"]) spec.rng_seed = read<std::uint64_t>(root["rng_seed"], "rng_seed");
  if (root["layout"]) {
    const auto layout = read<std::string>(root["layout"], "layout");
    if (layout == "random") spec.layout = ScenarioLayout::Random;
    else if (layout == "lanes") spec.layout = ScenarioLayout::Lanes;
    else throw ConfigError("layout must be 'random' or 'lanes', got '" + layout + "'");
  }
  if (auto n = root["detectors"]) {
    if (!n.IsSequence()) throw ConfigError("'detectors' must be a list");
    spec.detectors.clear();
    for (std::size_t i = 0; i < n.size(); ++i) {
      const std::string prefix = "detectors[" + std::to_string(i) + "]";
      const YAML::Node d = n[i];
      require_map(d, prefix);
      reject_unknown(d, prefix, {"name", "stride", "phase", "miss_rate", "fp_rate", "noise_sigma"});
      DetectorSpec ds;
      ds.name = d["name"] ? read<std::string>(d["name"], prefix + ".name") : "det" + std::to_string(i);
      if (d["stride"]) ds.stride = read<int>(d["stride"], prefix + ".stride");
      ds.phase = d["phase"] ? read<int>(d["phase"], prefix + ".phase")
                            : default_phase(static_cast<int>(i), ds.stride);
      if (d["miss_rate"]) ds.miss_rate = read<double>(d["miss_rate"], prefix + ".miss_rate");
      if (d["fp_rate"]) ds.fp_rate = read<double>(d["fp_rate"], prefix + ".fp_rate");
      if (d["noise_sigma"]) ds.noise_sigma = read<double>(d["noise_sigma"], prefix + ".noise_sigma");
      spec.detectors.push_back(ds);
    }
  }
  try {
    spec.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return spec;
}

ScenarioSpec load_scenario_spec(const std::filesystem::path& path) {
  return parse_scenario_spec(read_text(path));
}

std::string scenario_run_config(const ScenarioSpec& spec) {
  YAML::Emitter out;
  out << YAML::BeginMap;
  out << YAML::Key << "sequence" << YAML::Value << YAML::BeginMap << YAML::Key << "last_frame"
      << YAML::Value << spec.num_frames << YAML::EndMap;
  out << YAML::Key << "sources" << YAML::Value << YAML::BeginSeq;
  for (const auto& d : spec.detectors) {
    out << YAML::BeginMap;
    out << YAML::Key << "name" << YAML::Value << d.name;
    out << YAML::Key << "path" << YAML::Value << ("det_" + d.name + ".txt");
    out << YAML::Key << "stride" << YAML::Value << d.stride;
    out << YAML::Key << "phase" << YAML::Value << d.phase;
    out << YAML::EndMap;
  }
  out << YAML::EndSeq << YAML::EndMap;
  return std::string(out.c_str()) + "\n";
}

}  // namespace ensmot::cli
