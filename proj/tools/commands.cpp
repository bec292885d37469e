#include "commands.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>
#include <thread>

#include "ensmot/metrics.hpp"
#include "ensmot/mot_io.hpp"
#include "ensmot/scenario.hpp"
#include "ensmot/tracker.hpp"
#include "run_config.hpp"

namespace ensmot::cli {

namespace {

namespace fs = std::filesystem;

void require_file(const fs::path& p, const std::string& what) {
  if (!fs::is_regular_file(p)) throw ConfigError(what + " not found: '" + p.string() + "'");
}

FrameIndex last_frame_of(const RunConfig& cfg, const EnsembleSchedule& schedule) {
  return cfg.last_frame.value_or(schedule.last_frame());
}

int cmd_track(const std::string& config_path, const std::string& out_path,
              const Overrides& overrides, std::ostream& err) {
  const RunConfig cfg = load_run_config(config_path, overrides);
  const EnsembleSchedule schedule = load_schedule(cfg);
  const FrameIndex last = last_frame_of(cfg, schedule);
  const TrackerOutput rows = run_sequence(schedule, 1, last, cfg.tracker);
  write_mot_file(out_path, rows);
  err << "tracked " << last << " frames, wrote " << rows.size() << " rows to " << out_path << "\n";
  return kExitOk;
}

int cmd_synth(const std::string& spec_path, const std::string& out_dir, std::ostream& err) {
  const ScenarioSpec spec = load_scenario_spec(spec_path);
  const Scenario scenario = generate_scenario(spec);
  write_scenario(scenario, out_dir);
  const fs::path cfg_path = fs::path(out_dir) / "track.yaml";
  std::ofstream cfg(cfg_path, std::ios::binary);
  if (!cfg) throw std::runtime_error("cannot write '" + cfg_path.string() + "'");
  cfg << scenario_run_config(spec);
  err << "wrote " << scenario.ground_truth.size() << " ground-truth rows and "
      << scenario.detectors.size() << " detector files to " << out_dir << "\n";
  return kExitOk;
}

int cmd_eval(const std::vector<std::string>& gt_paths, const std::vector<std::string>& pred_paths,
             double iou_threshold, int jobs, std::ostream& out) {
  if (gt_paths.size() != pred_paths.size()) {
    throw ConfigError("--gt and --pred must be given the same number of times");
  }
  if (iou_threshold <= 0.0 || iou_threshold > 1.0) throw ConfigError("--iou must lie in (0, 1]");
  for (const auto& p : gt_paths) require_file(p, "ground-truth file");
  for (const auto& p : pred_paths) require_file(p, "prediction file");

  const std::size_t n = gt_paths.size();
  std::vector<EvalReport> reports(n);
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        const auto gt = parse_mot_file(gt_paths[i]);
        const auto pred = parse_mot_file(pred_paths[i]);
        reports[i] = evaluate(gt, pred, iou_threshold);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t threads = std::min<std::size_t>(std::max(jobs, 1), n);
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  for (std::size_t i = 0; i < n; ++i) {
    if (n > 1) out << "[" << pred_paths[i] << "]\n";
    out << to_key_value(reports[i]);
  }
  return kExitOk;
}

int cmd_bench(const std::string& config_path, int repeats, const Overrides& overrides,
              std::ostream& out) {
  if (repeats < 3) throw ConfigError("--repeats must be at least 3");
  const RunConfig cfg = load_run_config(config_path, overrides);
  const EnsembleSchedule schedule = load_schedule(cfg);
  const FrameIndex last = last_frame_of(cfg, schedule);
  if (last < 1) throw ConfigError("sources contain no frames to benchmark");
  out << to_key_value(measure_throughput(schedule, 1, last, cfg.tracker, repeats));
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Ensemble multi-object tracker", "ensmot"};
  app.require_subcommand(1);

  std::string config, out_path, spec, out_dir;
  std::vector<std::string> gt, pred;
  double iou = 0.5;
  int jobs = 1, repeats = 5;

  auto* track = app.add_subcommand("track", "Track detections listed in a config file");
  track->add_option("--config", config, "Run config (YAML)")->required();
  track->add_option("--out", out_path, "Output MOT file")->required();
  track->allow_extras();
  track->footer("Any config key can be overridden with --section.key value.");

  auto* synth = app.add_subcommand("synth", "Generate a synthetic scenario");
  synth->add_option("--spec", spec, "Scenario spec (YAML)")->required();
  synth->add_option("--out-dir", out_dir, "Output directory")->required();

  auto* eval = app.add_subcommand("eval", "CLEAR-MOT evaluation");
  eval->add_option("--gt", gt, "Ground-truth MOT file (repeatable)")->required();
  eval->add_option("--pred", pred, "Tracker output MOT file (repeatable)")->required();
  eval->add_option("--iou", iou, "IoU threshold for a match");
  eval->add_option("--jobs", jobs, "Sequences evaluated in parallel")->check(CLI::PositiveNumber);

  auto* bench = app.add_subcommand("bench", "Measure tracking throughput");
  bench->add_option("--config", config, "Run config (YAML)")->required();
  bench->add_option("--repeats", repeats, "Timed repetitions");
  bench->allow_extras();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*track) {
      return cmd_track(config, out_path, parse_overrides(track->remaining()), err);
    }
    if (*synth) return cmd_synth(spec, out_dir, err);
    if (*eval) return cmd_eval(gt, pred, iou, jobs, out);
    if (*bench) return cmd_bench(config, repeats, parse_overrides(bench->remaining()), out);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const MotParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const DuplicateIdentityRow& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitUsage;
}

}  // namespace ensmot::cli
