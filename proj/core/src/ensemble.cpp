#include "ensmot/ensemble.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace ensmot {

bool DetectorSource::fires_at(FrameIndex frame) const {
  const int offset = frame - 1 - phase;
  return offset >= 0 && offset % stride == 0;
}

EnsembleSchedule::EnsembleSchedule(std::vector<DetectorSource> sources)
    : sources_(std::move(sources)) {
  std::sort(sources_.begin(), sources_.end(),
            [](const DetectorSource& a, const DetectorSource& b) { return a.source_id < b.source_id; });
  for (std::size_t i = 0; i < sources_.size(); ++i) {
    auto& s = sources_[i];
    if (s.stride < 1) {
      throw std::invalid_argument("source '" + s.name + "': stride must be >= 1");
    }
    if (s.phase < 0 || s.phase >= s.stride) {
      throw std::invalid_argument("source '" + s.name + "': phase must lie in [0, stride)");
    }
    if (i > 0 && sources_[i - 1].source_id == s.source_id) {
      throw std::invalid_argument("duplicate source id " + std::to_string(s.source_id));
    }
    DetectionSet retagged;
    for (const auto& [frame, dets] : s.detections.frames()) {
      for (const auto& d : dets) retagged.add(d.with_source(s.source_id));
    }
    s.detections = std::move(retagged);
  }
}

int EnsembleSchedule::max_stride() const {
  int m = 1;
  for (const auto& s : sources_) m = std::max(m, s.stride);
  return m;
}

FrameIndex EnsembleSchedule::last_frame() const {
  FrameIndex last = 0;
  for (const auto& s : sources_) last = std::max(last, s.detections.last_frame());
  return last;
}

std::vector<SourceId> EnsembleSchedule::active_sources(FrameIndex frame) const {
  std::vector<SourceId> ids;
  for (const auto& s : sources_) {
    if (s.fires_at(frame)) ids.push_back(s.source_id);
  }
  return ids;
}

FrameBundle EnsembleSchedule::fuse_frame(FrameIndex frame, double iou_threshold) const {
  FrameBundle bundle;
  bundle.frame = frame;
  std::vector<Detection> gathered;
  for (const auto& s : sources_) {
    if (!s.fires_at(frame)) continue;
    bundle.active_sources.push_back(s.source_id);
    const auto dets = s.detections.at(frame);
    gathered.insert(gathered.end(), dets.begin(), dets.end());
  }
  bundle.detections = nms(gathered, iou_threshold);
  return bundle;
}

int default_phase(int source_index, int stride) {
  return stride > 0 ? source_index % stride : 0;
}

}  // namespace ensmot
