#pragma once

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "ensmot/ensemble.hpp"
#include "ensmot/mot_io.hpp"
#include "ensmot/tracker.hpp"

namespace ensmot {

/// CLEAR-MOT counters and derived scores.
struct EvalReport {
  long long fp = 0;
  long long fn = 0;
  long long idsw = 0;
  long long frag = 0;
  long long gt = 0;
  long long matches = 0;
  double mota = 0.0;
  double motp = 0.0;  // mean IoU of matched pairs
  int mt = 0;
  int ml = 0;
  int num_objects = 0;
  double hz = 0.0;  // filled in by benchmarks only
};

class DuplicateIdentityRow : public std::runtime_error {
 public:
  DuplicateIdentityRow(FrameIndex frame, int id);
};

/// Matches predictions to ground truth frame by frame.
///
/// Correspondences from an object's last match are kept while their IoU
/// stays ≥ iou_threshold; the remaining pairs are matched by the Hungarian
/// method on 1 − IoU (pairs under the threshold are inadmissible). MOTA is
/// 1 − (FN + FP + IDSW) / max(GT, 1). MT / ML count objects matched in
/// ≥ 80% / ≤ 20% of their ground-truth frames. Frag counts every
/// matched → unmatched → matched interruption.
EvalReport evaluate(std::span<const MotRow> gt, std::span<const MotRow> pred,
                    double iou_threshold = 0.5);

/// `key=value` lines in a fixed order.
std::string to_key_value(const EvalReport& report);
std::string csv_header();
std::string to_csv_row(const EvalReport& report);

struct ThroughputReport {
  double hz = 0.0;  // median over repeats
  int frames = 0;
  int repeats = 0;
  std::vector<double> hz_samples;
  /// Median seconds per frame for each stage.
  StageTimings per_frame;
};

/// Runs run_sequence `repeats` (≥ 3) times on already loaded detections and
/// reports the median frame rate plus a per-stage breakdown.
ThroughputReport measure_throughput(const EnsembleSchedule& schedule, FrameIndex first,
                                    FrameIndex last, const TrackerConfig& config, int repeats);

std::string to_key_value(const ThroughputReport& report);

}  // namespace ensmot
