#pragma once

#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "ensmot/association.hpp"
#include "ensmot/ensemble.hpp"
#include "ensmot/geometry.hpp"
#include "ensmot/kalman.hpp"

namespace ensmot {

enum class TrackStatus { Tentative, Confirmed, Dead };

const char* to_string(TrackStatus status);

struct TrackSample {
  FrameIndex frame;
  BoundingBox box;
};

struct Track {
  TrackId id = 0;
  TrackStatus status = TrackStatus::Tentative;
  KalmanTrackState state;
  int hits = 0;    // consecutive updates
  int misses = 0;  // consecutive misses on frames where a detector fired
  FrameIndex first_frame = 0;
  FrameIndex last_update_frame = 0;
  std::vector<TrackSample> history;
};

struct TrackerConfig {
  int confirm_hits = 3;
  /// Unset: 2 × the largest source stride, at least 3.
  std::optional<int> max_misses;
  double gate_chi2 = kChi2Gate4Dof95;
  double min_iou = 0.1;
  double nms_iou = 0.7;
  double min_confidence = 0.3;
  NoiseScales noise;

  /// Throws std::invalid_argument when a field is out of range.
  void validate() const;
  int resolved_max_misses(int max_stride) const;
};

struct OutputRow {
  FrameIndex frame;
  TrackId id;
  BoundingBox box;

  friend bool operator==(const OutputRow&, const OutputRow&) = default;
};

/// Boxes of confirmed tracks, ordered by (frame, id).
using TrackerOutput = std::vector<OutputRow>;

class NonMonotoneFrame : public std::runtime_error {
 public:
  NonMonotoneFrame() : std::runtime_error("non-monotone frame index") {}
};

/// Wall-clock seconds spent per pipeline stage.
struct StageTimings {
  double fuse = 0.0;
  double predict = 0.0;
  double associate = 0.0;
  double update = 0.0;

  double total() const { return fuse + predict + associate + update; }
  StageTimings& operator+=(const StageTimings& o);
};

/// Online tracker state for one sequence. Frames must be stepped in
/// strictly increasing order.
class Tracker {
 public:
  Tracker(TrackerConfig config, int max_stride = 1);

  /// One predict / associate / update / spawn / prune cycle. Returns
  /// (id, box) of every live confirmed track, ordered by id.
  std::vector<std::pair<TrackId, BoundingBox>> step(const FrameBundle& bundle,
                                                    StageTimings* timings = nullptr);

  /// Live (tentative or confirmed) tracks.
  const std::vector<Track>& tracks() const { return live_; }
  /// Tracks that have died, in order of death.
  const std::vector<Track>& dead_tracks() const { return dead_; }
  const TrackerConfig& config() const { return config_; }
  int max_misses() const { return max_misses_; }
  std::optional<FrameIndex> last_frame() const { return last_frame_; }

 private:
  TrackerConfig config_;
  int max_misses_;
  MotionModel model_;
  std::vector<Track> live_;
  std::vector<Track> dead_;
  std::optional<FrameIndex> last_frame_;
  TrackId next_id_ = 1;
};

/// Runs the tracker over frames [first, last] of `schedule`, fusing each
/// frame before stepping.
TrackerOutput run_sequence(const EnsembleSchedule& schedule, FrameIndex first, FrameIndex last,
                           const TrackerConfig& config, StageTimings* timings = nullptr);

}  // namespace ensmot
