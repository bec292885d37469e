#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <vector>

namespace ensmot {

using FrameIndex = int;
using SourceId = int;
using TrackId = int;

/// Axis-aligned box in MOT Challenge convention (left, top, width, height).
/// Width and height are strictly positive; the constructor throws
/// std::invalid_argument otherwise.
class BoundingBox {
 public:
  BoundingBox(double left, double top, double width, double height);

  double left() const { return left_; }
  double top() const { return top_; }
  double width() const { return width_; }
  double height() const { return height_; }
  double right() const { return left_ + width_; }
  double bottom() const { return top_ + height_; }
  double area() const { return width_ * height_; }
  double center_x() const { return left_ + 0.5 * width_; }
  double center_y() const { return top_ + 0.5 * height_; }

  static BoundingBox from_center(double cx, double cy, double width, double height);

  friend bool operator==(const BoundingBox&, const BoundingBox&) = default;

 private:
  double left_;
  double top_;
  double width_;
  double height_;
};

inline constexpr double kUnscored = -1.0;

/// One observation: a box reported by detector `source_id` at `frame`.
/// Confidence is in [0, 1], or kUnscored (-1).
class Detection {
 public:
  Detection(FrameIndex frame, BoundingBox box, double confidence = kUnscored,
            SourceId source_id = 0);

  FrameIndex frame() const { return frame_; }
  const BoundingBox& box() const { return box_; }
  double confidence() const { return confidence_; }
  SourceId source_id() const { return source_id_; }

  Detection with_source(SourceId source_id) const;

  friend bool operator==(const Detection&, const Detection&) = default;

 private:
  FrameIndex frame_;
  BoundingBox box_;
  double confidence_;
  SourceId source_id_;
};

/// All detections of one video, grouped by frame. Insertion keeps the
/// per-frame order of arrival.
class DetectionSet {
 public:
  DetectionSet() = default;
  explicit DetectionSet(std::span<const Detection> detections);

  void add(const Detection& det);

  /// Detections at `frame`; empty when the frame has none.
  std::span<const Detection> at(FrameIndex frame) const;

  std::size_t size() const { return count_; }
  bool empty() const { return count_ == 0; }
  FrameIndex last_frame() const;

  const std::map<FrameIndex, std::vector<Detection>>& frames() const { return by_frame_; }

 private:
  std::map<FrameIndex, std::vector<Detection>> by_frame_;
  std::size_t count_ = 0;
};

/// Intersection over union in [0, 1]; exactly symmetric.
double iou(const BoundingBox& a, const BoundingBox& b);

/// Greedy non-maximum suppression.
///
/// Candidates are ranked by confidence (descending), then area (descending),
/// then source id (ascending); remaining ties keep input order. A candidate
/// survives iff its IoU with every already kept detection is below
/// `iou_threshold`. Output is in kept order.
std::vector<Detection> nms(std::span<const Detection> dets, double iou_threshold);

}  // namespace ensmot
