#include "ensmot/scenario.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <stdexcept>

namespace ensmot {

PortableRng::PortableRng(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed & 0xffffffffu),
                    static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream & 0xffffffffu),
                    static_cast<std::uint32_t>(stream >> 32)};
  engine_.seed(seq);
}

double PortableRng::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double PortableRng::normal() {
  const double u1 = 1.0 - uniform();  // (0, 1]
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

int PortableRng::poisson(double mean) {
  if (mean <= 0.0) return 0;
  if (mean > 100.0) throw std::invalid_argument("poisson mean must be <= 100");
  const double limit = std::exp(-mean);
  int k = 0;
  double p = uniform();
  while (p > limit) {
    ++k;
    p *= uniform();
  }
  return k;
}

void ScenarioSpec::validate() const {
  auto fail = [](const std::string& what) { throw std::invalid_argument("scenario: " + what); };
  if (num_objects < 0) fail("num_objects must be >= 0");
  if (num_frames < 1) fail("num_frames must be >= 1");
  if (!(min_height > 0.0) || !(max_height >= min_height)) fail("need 0 < min_height <= max_height");
  if (!(aspect > 0.0)) fail("aspect must be > 0");
  if (!(max_height < arena_height) || !(max_height * aspect < arena_width)) {
    fail("objects must fit inside the arena");
  }
  if (!(min_speed >= 0.0) || !(max_speed >= min_speed)) fail("need 0 <= min_speed <= max_speed");
  if (layout == ScenarioLayout::Lanes && num_objects > 0 && arena_height / num_objects < 2.0) {
    fail("arena too short for one lane per object");
  }
  for (const auto& d : detectors) {
    if (d.stride < 1) fail("detector '" + d.name + "': stride must be >= 1");
    if (d.phase < 0 || d.phase >= d.stride) fail("detector '" + d.name + "': phase out of range");
    if (!(d.miss_rate >= 0.0 && d.miss_rate <= 1.0)) fail("detector '" + d.name + "': miss_rate");
    if (!(d.fp_rate >= 0.0 && d.fp_rate <= 100.0)) fail("detector '" + d.name + "': fp_rate");
    if (!(d.noise_sigma >= 0.0)) fail("detector '" + d.name + "': noise_sigma");
    if (d.name.empty()) fail("detector name must not be empty");
  }
}

double reflect_position(double start, double velocity, double steps, double extent) {
  if (extent <= 0.0) return 0.0;
  const double period = 2.0 * extent;
  double m = std::fmod(start + velocity * steps, period);
  if (m < 0.0) m += period;
  return m <= extent ? m : period - m;
}

namespace {

struct ObjectTrajectory {
  double left0, top0, width, height, vx, vy;
};

std::vector<ObjectTrajectory> make_objects(const ScenarioSpec& spec, PortableRng& rng) {
  std::vector<ObjectTrajectory> objs;
  const double lane_h = spec.num_objects > 0 ? spec.arena_height / spec.num_objects : 0.0;
  for (int i = 0; i < spec.num_objects; ++i) {
    ObjectTrajectory o{};
    double hi = spec.max_height;
    double lo = spec.min_height;
    if (spec.layout == ScenarioLayout::Lanes) {
      hi = std::min(hi, 0.8 * lane_h);
      lo = std::min(lo, hi);
    }
    o.height = rng.uniform(lo, hi);
    o.width = o.height * spec.aspect;
    const double speed = rng.uniform(spec.min_speed, spec.max_speed);
    if (spec.layout == ScenarioLayout::Lanes) {
      o.vx = rng.uniform() < 0.5 ? -speed : speed;
      o.vy = 0.0;
      o.left0 = rng.uniform(0.0, spec.arena_width - o.width);
      o.top0 = i * lane_h + 0.5 * (lane_h - o.height);
    } else {
      const double heading = rng.uniform(0.0, 2.0 * std::numbers::pi);
      o.vx = speed * std::cos(heading);
      o.vy = speed * std::sin(heading);
      o.left0 = rng.uniform(0.0, spec.arena_width - o.width);
      o.top0 = rng.uniform(0.0, spec.arena_height - o.height);
    }
    objs.push_back(o);
  }
  return objs;
}

}  // namespace

Scenario generate_scenario(const ScenarioSpec& spec) {
  spec.validate();
  PortableRng object_rng(spec.rng_seed, 0);
  const auto objects = make_objects(spec, object_rng);

  Scenario sc;
  // truth[f-1][i] is object i's box at frame f.
  std::vector<std::vector<MotRow>> truth(spec.num_frames);
  for (int f = 1; f <= spec.num_frames; ++f) {
    for (int i = 0; i < spec.num_objects; ++i) {
      const auto& o = objects[i];
      MotRow r;
      r.frame = f;
      r.id = i + 1;
      r.bb_left = reflect_position(o.left0, o.vx, f - 1, spec.arena_width - o.width);
      r.bb_top = reflect_position(o.top0, o.vy, f - 1, spec.arena_height - o.height);
      r.bb_width = o.width;
      r.bb_height = o.height;
      r.conf = 1.0;
      truth[f - 1].push_back(r);
      sc.ground_truth.push_back(r);
    }
  }

  for (std::size_t d = 0; d < spec.detectors.size(); ++d) {
    const DetectorSpec& ds = spec.detectors[d];
    PortableRng rng(spec.rng_seed, d + 1);
    GeneratedDetector gen;
    gen.spec = ds;
    for (int f = 1; f <= spec.num_frames; ++f) {
      const int offset = f - 1 - ds.phase;
      if (offset < 0 || offset % ds.stride != 0) continue;
      for (const MotRow& t : truth[f - 1]) {
        ++gen.scheduled_object_frames;
        if (rng.uniform() < ds.miss_rate) {
          ++gen.dropped;
          continue;
        }
        MotRow r = t;
        r.id = -1;
        r.conf = 1.0;
        if (ds.noise_sigma > 0.0) {
          r.bb_left += ds.noise_sigma * rng.normal();
          r.bb_top += ds.noise_sigma * rng.normal();
          r.bb_width = std::max(1.0, r.bb_width + ds.noise_sigma * rng.normal());
          r.bb_height = std::max(1.0, r.bb_height + ds.noise_sigma * rng.normal());
        }
        gen.rows.push_back(r);
      }
      const int clutter = rng.poisson(ds.fp_rate);
      for (int k = 0; k < clutter; ++k) {
        MotRow r;
        r.frame = f;
        r.id = -1;
        r.bb_height = rng.uniform(spec.min_height, spec.max_height);
        r.bb_width = r.bb_height * spec.aspect;
        r.bb_left = rng.uniform(0.0, spec.arena_width - r.bb_width);
        r.bb_top = rng.uniform(0.0, spec.arena_height - r.bb_height);
        r.conf = rng.uniform();
        gen.rows.push_back(r);
        ++gen.false_positives;
      }
    }
    sc.detectors.push_back(std::move(gen));
  }
  return sc;
}

void write_scenario(const Scenario& scenario, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir / "gt");
  auto write = [](const std::filesystem::path& p, const std::vector<MotRow>& rows) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + p.string() + "'");
    write_mot_rows(out, rows);
  };
  write(dir / "gt" / "gt.txt", scenario.ground_truth);
  for (const auto& d : scenario.detectors) write(dir / ("det_" + d.spec.name + ".txt"), d.rows);
}

EnsembleSchedule make_schedule(const Scenario& scenario) {
  std::vector<DetectorSource> sources;
  for (std::size_t i = 0; i < scenario.detectors.size(); ++i) {
    const auto& d = scenario.detectors[i];
    DetectorSource s;
    s.source_id = static_cast<SourceId>(i + 1);
    s.name = d.spec.name;
    s.stride = d.spec.stride;
    s.phase = d.spec.phase;
    s.detections = to_detection_set(d.rows, s.source_id);
    sources.push_back(std::move(s));
  }
  return EnsembleSchedule(std::move(sources));
}

}  // namespace ensmot
