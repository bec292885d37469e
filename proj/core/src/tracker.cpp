#include "ensmot/tracker.hpp"

#include <algorithm>
#include <chrono>
#include <iterator>
#include <string>

namespace ensmot {

namespace {

using Clock = std::chrono::steady_clock;

class StageClock {
 public:
  explicit StageClock(double* sink) : sink_(sink), start_(Clock::now()) {}
  ~StageClock() {
    if (sink_ != nullptr) {
      *sink_ += std::chrono::duration<double>(Clock::now() - start_).count();
    }
  }
  StageClock(const StageClock&) = delete;
  StageClock& operator=(const StageClock&) = delete;

 private:
  double* sink_;
  Clock::time_point start_;
};

double* slot(StageTimings* t, double StageTimings::*member) {
  return t == nullptr ? nullptr : &(t->*member);
}

}  // namespace

const char* to_string(TrackStatus status) {
  switch (status) {
    case TrackStatus::Tentative:
      return "tentative";
    case TrackStatus::Confirmed:
      return "confirmed";
    case TrackStatus::Dead:
      return "dead";
  }
  return "unknown";
}

void TrackerConfig::validate() const {
  auto fail = [](const std::string& what) { throw std::invalid_argument("tracker config: " + what); };
  if (confirm_hits < 1) fail("confirm_hits must be >= 1");
  if (max_misses && *max_misses < 0) fail("max_misses must be >= 0");
  if (!(gate_chi2 > 0.0)) fail("gate_chi2 must be > 0");
  if (!(min_iou >= 0.0 && min_iou <= 1.0)) fail("min_iou must lie in [0,1]");
  if (!(nms_iou > 0.0 && nms_iou <= 1.0)) fail("nms_iou must lie in (0,1]");
  if (!(min_confidence >= 0.0 && min_confidence <= 1.0)) fail("min_confidence must lie in [0,1]");
  if (noise.pos_sigma_scale < 0.0 || noise.vel_sigma_scale < 0.0 || noise.meas_sigma_scale < 0.0) {
    fail("noise scales must be >= 0");
  }
}

int TrackerConfig::resolved_max_misses(int max_stride) const {
  if (max_misses) return *max_misses;
  return std::max(3, 2 * max_stride);
}

StageTimings& StageTimings::operator+=(const StageTimings& o) {
  fuse += o.fuse;
  predict += o.predict;
  associate += o.associate;
  update += o.update;
  return *this;
}

Tracker::Tracker(TrackerConfig config, int max_stride)
    : config_(std::move(config)),
      max_misses_(config_.resolved_max_misses(max_stride)),
      model_(config_.noise) {
  config_.validate();
}

std::vector<std::pair<TrackId, BoundingBox>> Tracker::step(const FrameBundle& bundle,
                                                           StageTimings* timings) {
  if (last_frame_ && bundle.frame <= *last_frame_) throw NonMonotoneFrame();
  const int dt = last_frame_ ? bundle.frame - *last_frame_ : 1;
  last_frame_ = bundle.frame;

  std::vector<Detection> dets;
  dets.reserve(bundle.detections.size());
  for (const auto& d : bundle.detections) {
    if (d.confidence() == kUnscored || d.confidence() >= config_.min_confidence) dets.push_back(d);
  }

  std::vector<KalmanTrackState> predicted;
  {
    StageClock clock(slot(timings, &StageTimings::predict));
    predicted.reserve(live_.size());
    for (auto& t : live_) {
      t.state = predict(t.state, model_, dt);
      if (!t.state.has_valid_box()) t.status = TrackStatus::Dead;
    }
    // Tracks whose predicted extent collapsed cannot be associated.
    auto collapsed = std::stable_partition(live_.begin(), live_.end(), [](const Track& t) {
      return t.status != TrackStatus::Dead;
    });
    std::move(collapsed, live_.end(), std::back_inserter(dead_));
    live_.erase(collapsed, live_.end());
    for (const auto& t : live_) predicted.push_back(t.state);
  }

  AssociationResult assoc;
  {
    StageClock clock(slot(timings, &StageTimings::associate));
    assoc = associate(predicted, dets, AssociationParams{config_.gate_chi2, config_.min_iou},
                      model_);
  }

  {
    StageClock clock(slot(timings, &StageTimings::update));
    std::vector<const Detection*> matched_det(live_.size(), nullptr);
    for (const auto& [k, i] : assoc.matches) {
      Track& t = live_[k];
      matched_det[k] = &dets[i];
      t.state = update(t.state, dets[i], model_);
      t.hits += 1;
      t.misses = 0;
      t.last_update_frame = bundle.frame;
      if (!t.state.has_valid_box()) t.status = TrackStatus::Dead;
    }
    if (bundle.any_source_fired()) {
      for (std::size_t k : assoc.unmatched_tracks) {
        Track& t = live_[k];
        t.hits = 0;
        t.misses += 1;
        if (t.misses > max_misses_) t.status = TrackStatus::Dead;
      }
    }
    for (std::size_t i : assoc.unmatched_detections) {
      Track t;
      t.id = next_id_++;
      t.state = initiate(dets[i], model_);
      t.hits = 1;
      t.first_frame = bundle.frame;
      t.last_update_frame = bundle.frame;
      live_.push_back(std::move(t));
    }

    // A track's box for this frame is its associated detection when it was
    // matched, and its predicted extent while coasting.
    for (std::size_t k = 0; k < live_.size(); ++k) {
      Track& t = live_[k];
      if (t.status == TrackStatus::Dead) continue;
      const bool fresh = k >= matched_det.size();
      if (fresh || matched_det[k] != nullptr) {
        const Detection& d = fresh ? dets[assoc.unmatched_detections[k - matched_det.size()]]
                                   : *matched_det[k];
        t.history.push_back(TrackSample{bundle.frame, d.box()});
      } else {
        t.history.push_back(TrackSample{bundle.frame, t.state.box()});
      }
      if (t.status == TrackStatus::Tentative && t.hits >= config_.confirm_hits) {
        t.status = TrackStatus::Confirmed;
      }
    }

    auto dead_begin = std::stable_partition(live_.begin(), live_.end(), [](const Track& t) {
      return t.status != TrackStatus::Dead;
    });
    std::move(dead_begin, live_.end(), std::back_inserter(dead_));
    live_.erase(dead_begin, live_.end());
  }

  std::vector<std::pair<TrackId, BoundingBox>> out;
  for (const auto& t : live_) {
    if (t.status == TrackStatus::Confirmed) out.emplace_back(t.id, t.history.back().box);
  }
  std::sort(out.begin(), out.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  return out;
}

TrackerOutput run_sequence(const EnsembleSchedule& schedule, FrameIndex first, FrameIndex last,
                           const TrackerConfig& config, StageTimings* timings) {
  if (first < 1) throw std::invalid_argument("run_sequence: first frame must be >= 1");
  Tracker tracker(config, schedule.max_stride());
  TrackerOutput output;
  for (FrameIndex f = first; f <= last; ++f) {
    FrameBundle bundle;
    {
      StageClock clock(slot(timings, &StageTimings::fuse));
      bundle = schedule.fuse_frame(f, config.nms_iou);
    }
    for (const auto& [id, box] : tracker.step(bundle, timings)) {
      output.push_back(OutputRow{f, id, box});
    }
  }
  return output;
}

}  // namespace ensmot
