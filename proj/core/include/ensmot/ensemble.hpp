#pragma once

#include <string>
#include <vector>

#include "ensmot/geometry.hpp"

namespace ensmot {

/// One ensemble member: a detector that runs every `stride` frames,
/// starting at frame `phase + 1`.
struct DetectorSource {
  SourceId source_id = 0;
  std::string name;
  int stride = 1;
  int phase = 0;
  DetectionSet detections;

  bool fires_at(FrameIndex frame) const;
};

/// Detections fused for one frame plus the sources that were due there.
struct FrameBundle {
  FrameIndex frame = 0;
  std::vector<Detection> detections;
  std::vector<SourceId> active_sources;

  bool any_source_fired() const { return !active_sources.empty(); }
};

class EnsembleSchedule {
 public:
  EnsembleSchedule() = default;
  /// Validates stride ≥ 1, 0 ≤ phase < stride, and unique source ids;
  /// throws std::invalid_argument otherwise. Detections are re-tagged with
  /// their owning source id.
  explicit EnsembleSchedule(std::vector<DetectorSource> sources);

  const std::vector<DetectorSource>& sources() const { return sources_; }
  int max_stride() const;
  /// Last frame that carries any detection in any source.
  FrameIndex last_frame() const;

  /// Ids of sources due at `frame`, ascending.
  std::vector<SourceId> active_sources(FrameIndex frame) const;

  /// Gathers the detections of every due source and suppresses overlaps
  /// with greedy NMS.
  FrameBundle fuse_frame(FrameIndex frame, double iou_threshold) const;

 private:
  std::vector<DetectorSource> sources_;  // sorted by source_id
};

/// Phase used when a source does not set one: members are staggered
/// uniformly so the ensemble covers as many frames as possible.
int default_phase(int source_index, int stride);

}  // namespace ensmot
