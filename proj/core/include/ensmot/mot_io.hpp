#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "ensmot/geometry.hpp"
#include "ensmot/tracker.hpp"

namespace ensmot {

/// One line of a MOT Challenge file:
/// frame, id, bb_left, bb_top, bb_width, bb_height, conf, x, y, z.
/// Detection files use id −1. World coordinates are read but never used.
struct MotRow {
  FrameIndex frame = 1;
  int id = -1;
  double bb_left = 0.0;
  double bb_top = 0.0;
  double bb_width = 1.0;
  double bb_height = 1.0;
  double conf = -1.0;
  double x = -1.0;
  double y = -1.0;
  double z = -1.0;

  BoundingBox box() const { return BoundingBox(bb_left, bb_top, bb_width, bb_height); }

  friend bool operator==(const MotRow&, const MotRow&) = default;
};

class MotParseError : public std::runtime_error {
 public:
  MotParseError(std::size_t line, std::string text, const std::string& reason);

  std::size_t line() const { return line_; }
  const std::string& text() const { return text_; }
  const std::string& reason() const { return reason_; }

 private:
  std::size_t line_;
  std::string text_;
  std::string reason_;
};

/// Parses comma-separated MOT rows (6 to 10 fields; missing trailing fields
/// default to −1). Blank lines are skipped. The result is stably sorted by
/// (frame, id). Throws MotParseError naming the 1-based line.
std::vector<MotRow> parse_mot_csv(std::istream& in);
/// Throws std::runtime_error naming the path if it cannot be opened.
std::vector<MotRow> parse_mot_file(const std::filesystem::path& path);

/// Shortest decimal string that parses back to exactly `value`.
std::string format_real(double value);

/// Writes rows as given, one per line, world coordinates as −1.
void write_mot_rows(std::ostream& out, std::span<const MotRow> rows);

/// Writes tracker output as `frame,id,l,t,w,h,1,-1,-1,-1`, sorted by
/// (frame, id).
void write_mot_csv(std::ostream& out, const TrackerOutput& rows);
void write_mot_file(const std::filesystem::path& path, const TrackerOutput& rows);

std::vector<MotRow> to_mot_rows(const TrackerOutput& rows);
/// Inverse of to_mot_rows on frame, id and box.
TrackerOutput to_tracker_output(std::span<const MotRow> rows);
DetectionSet to_detection_set(std::span<const MotRow> rows, SourceId source_id);

}  // namespace ensmot
