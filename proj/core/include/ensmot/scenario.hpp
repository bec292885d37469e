#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "ensmot/ensemble.hpp"
#include "ensmot/mot_io.hpp"

namespace ensmot {

/// Seedable generator whose output is identical on every platform:
/// std::mt19937_64 (fully specified by the standard) with the distribution
/// transforms implemented here rather than taken from <random>, whose
/// distributions are implementation-defined.
class PortableRng {
 public:
  explicit PortableRng(std::uint64_t seed, std::uint64_t stream = 0);

  std::uint64_t next() { return engine_(); }
  /// Uniform in [0, 1) with 53 random bits.
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Standard normal via the Box-Muller transform (one variate per call).
  double normal();
  /// Poisson by Knuth's multiplication method; mean must be ≤ 100.
  int poisson(double mean);

 private:
  std::mt19937_64 engine_;
};

enum class ScenarioLayout {
  Random,  // uniform start positions and headings; objects may cross
  Lanes,   // one horizontal lane per object; trajectories never overlap
};

struct DetectorSpec {
  std::string name = "det";
  int stride = 1;
  int phase = 0;
  double miss_rate = 0.0;
  double fp_rate = 0.0;      // mean false boxes per scheduled frame
  double noise_sigma = 0.0;  // pixels, applied to left, top, width, height
};

struct ScenarioSpec {
  int num_objects = 10;
  int num_frames = 200;
  double arena_width = 1920.0;
  double arena_height = 1080.0;
  ScenarioLayout layout = ScenarioLayout::Random;
  double min_height = 60.0;
  double max_height = 120.0;
  double aspect = 0.41;  // width / height
  double min_speed = 0.5;  // pixels/frame
  double max_speed = 3.0;
  std::vector<DetectorSpec> detectors{DetectorSpec{}};
  std::uint64_t rng_seed = 1;

  /// Throws std::invalid_argument on out-of-range fields.
  void validate() const;
};

struct GeneratedDetector {
  DetectorSpec spec;
  std::vector<MotRow> rows;
  std::size_t scheduled_object_frames = 0;
  std::size_t dropped = 0;
  std::size_t false_positives = 0;
};

struct Scenario {
  std::vector<MotRow> ground_truth;  // one row per object per frame
  std::vector<GeneratedDetector> detectors;
};

/// Objects move linearly and reflect off the arena walls. Each detector
/// observes only its scheduled frames: true boxes are dropped with
/// miss_rate, the survivors jittered by Gaussian noise, and Poisson(fp_rate)
/// clutter boxes are added uniformly in the arena.
Scenario generate_scenario(const ScenarioSpec& spec);

/// Position of a point moving at `velocity` from `start` inside [0, extent],
/// reflected at both ends, after `steps` frames.
double reflect_position(double start, double velocity, double steps, double extent);

/// Writes `gt/gt.txt` and one `det_<name>.txt` per detector under `dir`.
void write_scenario(const Scenario& scenario, const std::filesystem::path& dir);

/// Builds the ensemble for a generated scenario (source ids 1..n in
/// detector order).
EnsembleSchedule make_schedule(const Scenario& scenario);

}  // namespace ensmot
