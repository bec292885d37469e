#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "ensmot/ensemble.hpp"

using namespace ensmot;

namespace {

DetectorSource source(SourceId id, int stride, int phase, std::vector<Detection> dets = {}) {
  DetectorSource s;
  s.source_id = id;
  s.name = "s" + std::to_string(id);
  s.stride = stride;
  s.phase = phase;
  s.detections = DetectionSet(dets);
  return s;
}

}  // namespace

TEST_CASE("schedule validation") {
  CHECK_THROWS_AS(EnsembleSchedule({source(1, 0, 0)}), std::invalid_argument);
  CHECK_THROWS_AS(EnsembleSchedule({source(1, 2, 2)}), std::invalid_argument);
  CHECK_THROWS_AS(EnsembleSchedule({source(1, 2, -1)}), std::invalid_argument);
  CHECK_THROWS_AS(EnsembleSchedule({source(1, 1, 0), source(1, 2, 0)}), std::invalid_argument);
  CHECK(default_phase(0, 3) == 0);
  CHECK(default_phase(4, 3) == 1);
}

TEST_CASE("active sources") {
  SUBCASE("stride one fires every frame") {
    const EnsembleSchedule sched({source(1, 1, 0)});
    for (int f = 1; f <= 10; ++f) CHECK(sched.active_sources(f) == std::vector<SourceId>{1});
  }

  SUBCASE("complementary stride two alternates") {
    const EnsembleSchedule sched({source(1, 2, 0), source(2, 2, 1)});
    for (int f = 1; f <= 10; ++f) {
      CHECK(sched.active_sources(f) == std::vector<SourceId>{f % 2 == 1 ? 1 : 2});
    }
  }

  SUBCASE("strides two and three coincide every sixth frame") {
    const EnsembleSchedule sched({source(2, 3, 0), source(1, 2, 0)});
    std::vector<int> both;
    for (int f = 1; f <= 20; ++f) {
      // Direct modular arithmetic.
      const bool s1 = (f - 1) % 2 == 0;
      const bool s2 = (f - 1) % 3 == 0;
      std::vector<SourceId> expected;
      if (s1) expected.push_back(1);
      if (s2) expected.push_back(2);
      CHECK(sched.active_sources(f) == expected);
      if (s1 && s2) both.push_back(f);
    }
    CHECK(both == std::vector<int>{1, 7, 13, 19});
  }

  SUBCASE("phase delays the first firing") {
    const EnsembleSchedule sched({source(1, 4, 3)});
    CHECK(sched.active_sources(1).empty());
    CHECK(sched.active_sources(3).empty());
    CHECK(sched.active_sources(4) == std::vector<SourceId>{1});
    CHECK(sched.active_sources(8) == std::vector<SourceId>{1});
  }
}

TEST_CASE("each source fires window/stride times per lcm window") {
  std::mt19937 rng(4);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<DetectorSource> sources;
    int window = 1;
    const int n = 1 + static_cast<int>(rng() % 4);
    for (int i = 0; i < n; ++i) {
      const int stride = 1 + static_cast<int>(rng() % 6);
      sources.push_back(source(i + 1, stride, static_cast<int>(rng() % stride)));
      window = std::lcm(window, stride);
    }
    const EnsembleSchedule sched(sources);
    const int start = 1 + 6;  // past every phase offset
    for (const auto& s : sched.sources()) {
      int fired = 0;
      for (int f = start; f < start + window; ++f) {
        const auto act = sched.active_sources(f);
        fired += std::count(act.begin(), act.end(), s.source_id);
      }
      CHECK(fired == window / s.stride);
    }
  }
}

TEST_CASE("fuse frame") {
  SUBCASE("nothing due") {
    const EnsembleSchedule sched({source(1, 2, 1)});
    const auto b = sched.fuse_frame(1, 0.7);
    CHECK(b.detections.empty());
    CHECK(b.active_sources.empty());
  }

  SUBCASE("fired with zero detections is still recorded") {
    const EnsembleSchedule sched({source(1, 1, 0)});
    const auto b = sched.fuse_frame(5, 0.7);
    CHECK(b.detections.empty());
    CHECK(b.active_sources == std::vector<SourceId>{1});
  }

  SUBCASE("same object from two sources keeps the stronger one") {
    // Widths 10 vs 11 at the same corner: IoU = 100 / 110 ≈ 0.909.
    const Detection a(1, BoundingBox(0, 0, 10, 10), 0.8);
    const Detection b(1, BoundingBox(0, 0, 11, 10), 0.6);
    REQUIRE(iou(a.box(), b.box()) > 0.9);
    const EnsembleSchedule sched({source(1, 1, 0, {a}), source(2, 1, 0, {b})});
    const auto bundle = sched.fuse_frame(1, 0.7);
    REQUIRE(bundle.detections.size() == 1);
    CHECK(bundle.detections[0].confidence() == 0.8);
    CHECK(bundle.detections[0].source_id() == 1);
  }

  SUBCASE("disjoint objects both survive") {
    const Detection a(1, BoundingBox(0, 0, 10, 10), 0.8);
    const Detection b(1, BoundingBox(50, 0, 10, 10), 0.6);
    const EnsembleSchedule sched({source(1, 1, 0, {a}), source(2, 1, 0, {b})});
    CHECK(sched.fuse_frame(1, 0.7).detections.size() == 2);
  }

  SUBCASE("silent source's detections are ignored") {
    const Detection a(2, BoundingBox(0, 0, 10, 10), 0.8);
    const EnsembleSchedule sched({source(1, 2, 0, {a})});
    CHECK(sched.fuse_frame(2, 0.7).detections.empty());
  }
}

TEST_CASE("fusion is independent of source order and never synthesizes boxes") {
  std::mt19937 rng(21);
  std::uniform_real_distribution<double> pos(0, 200), size(10, 60), conf(0, 1);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<DetectorSource> sources;
    for (int s = 1; s <= 3; ++s) {
      std::vector<Detection> dets;
      for (int f = 1; f <= 4; ++f) {
        for (int k = 0; k < 4; ++k) {
          // Coarse confidences make ties common.
          dets.emplace_back(f, BoundingBox(pos(rng), pos(rng), size(rng), size(rng)),
                            std::round(conf(rng) * 4) / 4);
        }
      }
      sources.push_back(source(s, 1 + static_cast<int>(rng() % 2), 0, dets));
    }
    auto shuffled = sources;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    const EnsembleSchedule a(sources), b(shuffled);
    for (int f = 1; f <= 4; ++f) {
      const auto fa = a.fuse_frame(f, 0.5);
      const auto fb = b.fuse_frame(f, 0.5);
      CHECK(fa.detections == fb.detections);
      CHECK(fa.active_sources == fb.active_sources);
      for (const auto& d : fa.detections) {
        CHECK(d.frame() == f);
        CHECK(std::find(fa.active_sources.begin(), fa.active_sources.end(), d.source_id()) !=
              fa.active_sources.end());
        const auto& origin = a.sources()[d.source_id() - 1].detections.at(f);
        CHECK(std::count(origin.begin(), origin.end(), d) >= 1);
      }
    }
  }
}
