#include "ensmot/mot_io.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <string_view>

namespace ensmot {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

bool parse_double(std::string_view field, double& out) {
  field = trim(field);
  if (field.empty()) return false;
  if (field.front() == '+') field.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), out);
  return ec == std::errc() && ptr == field.data() + field.size() && std::isfinite(out);
}

bool as_integer(double v, int& out) {
  if (v != std::floor(v) || std::abs(v) > 2.0e9) return false;
  out = static_cast<int>(v);
  return true;
}

MotRow parse_line(std::string_view line, std::size_t line_no) {
  std::array<double, 10> values{};
  values.fill(-1.0);
  std::size_t count = 0;
  std::size_t pos = 0;
  while (true) {
    const auto comma = line.find(',', pos);
    const auto field = line.substr(pos, comma == std::string_view::npos ? line.size() - pos
                                                                        : comma - pos);
    if (count == values.size()) {
      throw MotParseError(line_no, std::string(line), "too many fields (max 10)");
    }
    if (!parse_double(field, values[count])) {
      throw MotParseError(line_no, std::string(line),
                          "field " + std::to_string(count + 1) + " is not a number");
    }
    ++count;
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  if (count < 6) {
    throw MotParseError(line_no, std::string(line),
                        "expected at least 6 fields, got " + std::to_string(count));
  }

  MotRow row;
  if (!as_integer(values[0], row.frame) || row.frame < 1) {
    throw MotParseError(line_no, std::string(line), "frame must be an integer >= 1");
  }
  if (!as_integer(values[1], row.id)) {
    throw MotParseError(line_no, std::string(line), "id must be an integer");
  }
  row.bb_left = values[2];
  row.bb_top = values[3];
  row.bb_width = values[4];
  row.bb_height = values[5];
  row.conf = values[6];
  row.x = values[7];
  row.y = values[8];
  row.z = values[9];
  if (!(row.bb_width > 0.0) || !(row.bb_height > 0.0)) {
    throw MotParseError(line_no, std::string(line), "non-positive box dimension");
  }
  return row;
}

}  // namespace

MotParseError::MotParseError(std::size_t line, std::string text, const std::string& reason)
    : std::runtime_error("line " + std::to_string(line) + ": " + reason + ": '" + text + "'"),
      line_(line),
      text_(std::move(text)),
      reason_(reason) {}

std::vector<MotRow> parse_mot_csv(std::istream& in) {
  std::vector<MotRow> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    rows.push_back(parse_line(line, line_no));
  }
  std::stable_sort(rows.begin(), rows.end(), [](const MotRow& a, const MotRow& b) {
    return a.frame != b.frame ? a.frame < b.frame : a.id < b.id;
  });
  return rows;
}

std::vector<MotRow> parse_mot_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path.string() + "'");
  try {
    return parse_mot_csv(in);
  } catch (const MotParseError& e) {
    throw MotParseError(e.line(), e.text(), path.string() + ": " + e.reason());
  }
}

std::string format_real(double value) {
  std::array<char, 64> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  if (ec != std::errc()) throw std::runtime_error("format_real: conversion failed");
  return std::string(buf.data(), ptr);
}

void write_mot_rows(std::ostream& out, std::span<const MotRow> rows) {
  for (const auto& r : rows) {
    out << r.frame << ',' << r.id << ',' << format_real(r.bb_left) << ','
        << format_real(r.bb_top) << ',' << format_real(r.bb_width) << ','
        << format_real(r.bb_height) << ',' << format_real(r.conf) << ",-1,-1,-1\n";
  }
}

std::vector<MotRow> to_mot_rows(const TrackerOutput& rows) {
  std::vector<MotRow> out;
  out.reserve(rows.size());
  for (const auto& r : rows) {
    MotRow m;
    m.frame = r.frame;
    m.id = r.id;
    m.bb_left = r.box.left();
    m.bb_top = r.box.top();
    m.bb_width = r.box.width();
    m.bb_height = r.box.height();
    m.conf = 1.0;
    out.push_back(m);
  }
  std::stable_sort(out.begin(), out.end(), [](const MotRow& a, const MotRow& b) {
    return a.frame != b.frame ? a.frame < b.frame : a.id < b.id;
  });
  return out;
}

void write_mot_csv(std::ostream& out, const TrackerOutput& rows) {
  const auto mot = to_mot_rows(rows);
  write_mot_rows(out, mot);
}

void write_mot_file(const std::filesystem::path& path, const TrackerOutput& rows) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  write_mot_csv(out, rows);
}

TrackerOutput to_tracker_output(std::span<const MotRow> rows) {
  TrackerOutput out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(OutputRow{r.frame, r.id, r.box()});
  return out;
}

DetectionSet to_detection_set(std::span<const MotRow> rows, SourceId source_id) {
  DetectionSet set;
  for (const auto& r : rows) {
    // Confidences outside [0,1] (some public detectors emit raw scores) are
    // treated as unscored.
    const double conf = (r.conf >= 0.0 && r.conf <= 1.0) ? r.conf : kUnscored;
    set.add(Detection(r.frame, r.box(), conf, source_id));
  }
  return set;
}

}  // namespace ensmot
