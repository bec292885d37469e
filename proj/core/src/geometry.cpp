#include "ensmot/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace ensmot {

BoundingBox::BoundingBox(double left, double top, double width, double height)
    : left_(left), top_(top), width_(width), height_(height) {
  if (!std::isfinite(left) || !std::isfinite(top)) {
    throw std::invalid_argument("bounding box coordinates must be finite");
  }
  // Negated comparison so NaN is rejected as well.
  if (!(width > 0.0) || !(height > 0.0) || !std::isfinite(width) || !std::isfinite(height)) {
    throw std::invalid_argument("non-positive box dimension");
  }
}

BoundingBox BoundingBox::from_center(double cx, double cy, double width, double height) {
  return BoundingBox(cx - 0.5 * width, cy - 0.5 * height, width, height);
}

Detection::Detection(FrameIndex frame, BoundingBox box, double confidence, SourceId source_id)
    : frame_(frame), box_(box), confidence_(confidence), source_id_(source_id) {
  if (frame < 1) {
    throw std::invalid_argument("detection frame must be >= 1, got " + std::to_string(frame));
  }
  const bool scored = confidence >= 0.0 && confidence <= 1.0;
  if (!scored && confidence != kUnscored) {
    throw std::invalid_argument("detection confidence must lie in [0,1] or be -1");
  }
}

Detection Detection::with_source(SourceId source_id) const {
  Detection copy = *this;
  copy.source_id_ = source_id;
  return copy;
}

DetectionSet::DetectionSet(std::span<const Detection> detections) {
  for (const auto& d : detections) add(d);
}

void DetectionSet::add(const Detection& det) {
  by_frame_[det.frame()].push_back(det);
  ++count_;
}

std::span<const Detection> DetectionSet::at(FrameIndex frame) const {
  auto it = by_frame_.find(frame);
  if (it == by_frame_.end()) return {};
  return it->second;
}

FrameIndex DetectionSet::last_frame() const {
  return by_frame_.empty() ? 0 : by_frame_.rbegin()->first;
}

double iou(const BoundingBox& a, const BoundingBox& b) {
  const double iw = std::min(a.right(), b.right()) - std::max(a.left(), b.left());
  const double ih = std::min(a.bottom(), b.bottom()) - std::max(a.top(), b.top());
  if (iw <= 0.0 || ih <= 0.0) return 0.0;
  const double inter = iw * ih;
  const double uni = a.area() + b.area() - inter;
  return std::clamp(inter / uni, 0.0, 1.0);
}

std::vector<Detection> nms(std::span<const Detection> dets, double iou_threshold) {
  std::vector<std::size_t> order(dets.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
    const Detection& a = dets[i];
    const Detection& b = dets[j];
    if (a.confidence() != b.confidence()) return a.confidence() > b.confidence();
    if (a.box().area() != b.box().area()) return a.box().area() > b.box().area();
    return a.source_id() < b.source_id();
  });

  std::vector<Detection> kept;
  kept.reserve(dets.size());
  for (std::size_t idx : order) {
    const Detection& cand = dets[idx];
    const bool suppressed = std::any_of(kept.begin(), kept.end(), [&](const Detection& k) {
      return iou(k.box(), cand.box()) >= iou_threshold;
    });
    if (!suppressed) kept.push_back(cand);
  }
  return kept;
}

}  // namespace ensmot
