#include "ensmot/metrics.hpp"

#include <algorithm>
#include <chrono>
#include <map>
#include <set>
#include <sstream>
#include <unordered_map>

#include "ensmot/assignment.hpp"

namespace ensmot {

DuplicateIdentityRow::DuplicateIdentityRow(FrameIndex frame, int id)
    : std::runtime_error("duplicate identity row (frame " + std::to_string(frame) + ", id " +
                         std::to_string(id) + ")") {}

namespace {

using FrameRows = std::map<FrameIndex, std::vector<const MotRow*>>;

FrameRows group_by_frame(std::span<const MotRow> rows) {
  FrameRows out;
  for (const auto& r : rows) out[r.frame].push_back(&r);
  for (auto& [frame, list] : out) {
    std::stable_sort(list.begin(), list.end(),
                     [](const MotRow* a, const MotRow* b) { return a->id < b->id; });
    for (std::size_t i = 1; i < list.size(); ++i) {
      if (list[i]->id == list[i - 1]->id) throw DuplicateIdentityRow(frame, list[i]->id);
    }
  }
  return out;
}

struct ObjectStats {
  int present = 0;
  int matched = 0;
  bool ever_matched = false;
  bool matched_last = false;
  int frag = 0;
};

}  // namespace

EvalReport evaluate(std::span<const MotRow> gt, std::span<const MotRow> pred,
                    double iou_threshold) {
  const FrameRows gt_frames = group_by_frame(gt);
  const FrameRows pred_frames = group_by_frame(pred);

  std::set<FrameIndex> frames;
  for (const auto& [f, _] : gt_frames) frames.insert(f);
  for (const auto& [f, _] : pred_frames) frames.insert(f);

  EvalReport rep;
  std::map<int, ObjectStats> objects;
  std::unordered_map<int, int> last_match;  // gt id → pred id
  double iou_sum = 0.0;
  static const std::vector<const MotRow*> kNone;

  for (FrameIndex f : frames) {
    const auto git = gt_frames.find(f);
    const auto pit = pred_frames.find(f);
    const auto& gts = git == gt_frames.end() ? kNone : git->second;
    const auto& preds = pit == pred_frames.end() ? kNone : pit->second;

    std::vector<char> gt_used(gts.size(), 0), pred_used(preds.size(), 0);
    std::vector<std::pair<std::size_t, std::size_t>> pairs;

    // Keep last correspondences that are still valid.
    for (std::size_t g = 0; g < gts.size(); ++g) {
      const auto lm = last_match.find(gts[g]->id);
      if (lm == last_match.end()) continue;
      for (std::size_t p = 0; p < preds.size(); ++p) {
        if (pred_used[p] || preds[p]->id != lm->second) continue;
        if (iou(gts[g]->box(), preds[p]->box()) >= iou_threshold) {
          gt_used[g] = pred_used[p] = 1;
          pairs.emplace_back(g, p);
        }
        break;
      }
    }

    std::vector<std::size_t> free_g, free_p;
    for (std::size_t g = 0; g < gts.size(); ++g)
      if (!gt_used[g]) free_g.push_back(g);
    for (std::size_t p = 0; p < preds.size(); ++p)
      if (!pred_used[p]) free_p.push_back(p);
    if (!free_g.empty() && !free_p.empty()) {
      CostMatrix costs(free_g.size(), free_p.size(), kInadmissible);
      for (std::size_t a = 0; a < free_g.size(); ++a) {
        for (std::size_t b = 0; b < free_p.size(); ++b) {
          const double o = iou(gts[free_g[a]]->box(), preds[free_p[b]]->box());
          if (o >= iou_threshold) costs(a, b) = 1.0 - o;
        }
      }
      for (const auto& [a, b] : solve_assignment(costs).matches) {
        const std::size_t g = free_g[a], p = free_p[b];
        gt_used[g] = pred_used[p] = 1;
        pairs.emplace_back(g, p);
        const auto lm = last_match.find(gts[g]->id);
        if (lm != last_match.end() && lm->second != preds[p]->id) ++rep.idsw;
      }
    }

    for (const auto& [g, p] : pairs) {
      last_match[gts[g]->id] = preds[p]->id;
      iou_sum += iou(gts[g]->box(), preds[p]->box());
      ++rep.matches;
    }
    for (std::size_t g = 0; g < gts.size(); ++g) {
      ObjectStats& obj = objects[gts[g]->id];
      ++obj.present;
      if (gt_used[g]) {
        ++obj.matched;
        if (obj.ever_matched && !obj.matched_last) ++obj.frag;
        obj.ever_matched = true;
      }
      obj.matched_last = gt_used[g] != 0;
      if (!gt_used[g]) ++rep.fn;
    }
    for (std::size_t p = 0; p < preds.size(); ++p)
      if (!pred_used[p]) ++rep.fp;
    rep.gt += static_cast<long long>(gts.size());
  }

  rep.num_objects = static_cast<int>(objects.size());
  for (const auto& [id, obj] : objects) {
    const double ratio = static_cast<double>(obj.matched) / obj.present;
    if (ratio >= 0.8) ++rep.mt;
    else if (ratio <= 0.2) ++rep.ml;
    rep.frag += obj.frag;
  }
  rep.mota = 1.0 - static_cast<double>(rep.fn + rep.fp + rep.idsw) /
                       static_cast<double>(std::max<long long>(rep.gt, 1));
  rep.motp = rep.matches > 0 ? iou_sum / static_cast<double>(rep.matches) : 0.0;
  return rep;
}

std::string to_key_value(const EvalReport& r) {
  std::ostringstream os;
  os << "MOTA=" << format_real(r.mota) << '\n'
     << "MOTP=" << format_real(r.motp) << '\n'
     << "FP=" << r.fp << '\n'
     << "FN=" << r.fn << '\n'
     << "IDSW=" << r.idsw << '\n'
     << "Frag=" << r.frag << '\n'
     << "GT=" << r.gt << '\n'
     << "MT=" << r.mt << '\n'
     << "ML=" << r.ml << '\n'
     << "num_objects=" << r.num_objects << '\n'
     << "Hz=" << format_real(r.hz) << '\n';
  return os.str();
}

std::string csv_header() { return "MOTA,MOTP,FP,FN,IDSW,Frag,GT,MT,ML,num_objects,Hz"; }

std::string to_csv_row(const EvalReport& r) {
  std::ostringstream os;
  os << format_real(r.mota) << ',' << format_real(r.motp) << ',' << r.fp << ',' << r.fn << ','
     << r.idsw << ',' << r.frag << ',' << r.gt << ',' << r.mt << ',' << r.ml << ','
     << r.num_objects << ',' << format_real(r.hz);
  return os.str();
}

namespace {

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

ThroughputReport measure_throughput(const EnsembleSchedule& schedule, FrameIndex first,
                                    FrameIndex last, const TrackerConfig& config, int repeats) {
  if (repeats < 3) throw std::invalid_argument("measure_throughput: repeats must be >= 3");
  using Clock = std::chrono::steady_clock;
  ThroughputReport rep;
  rep.frames = std::max(0, last - first + 1);
  rep.repeats = repeats;
  std::vector<double> fuse, pred, assoc, upd;
  const double frames = std::max(1, rep.frames);
  for (int i = 0; i < repeats; ++i) {
    StageTimings t;
    const auto start = Clock::now();
    const TrackerOutput out = run_sequence(schedule, first, last, config, &t);
    const double elapsed = std::chrono::duration<double>(Clock::now() - start).count();
    rep.hz_samples.push_back(rep.frames / std::max(elapsed, 1e-9));
    fuse.push_back(t.fuse / frames);
    pred.push_back(t.predict / frames);
    assoc.push_back(t.associate / frames);
    upd.push_back(t.update / frames);
  }
  rep.hz = median(rep.hz_samples);
  rep.per_frame.fuse = median(fuse);
  rep.per_frame.predict = median(pred);
  rep.per_frame.associate = median(assoc);
  rep.per_frame.update = median(upd);
  return rep;
}

std::string to_key_value(const ThroughputReport& r) {
  std::ostringstream os;
  os << "Hz=" << r.hz << '\n'
     << "frames=" << r.frames << '\n'
     << "repeats=" << r.repeats << '\n'
     << "fuse_us_per_frame=" << r.per_frame.fuse * 1e6 << '\n'
     << "predict_us_per_frame=" << r.per_frame.predict * 1e6 << '\n'
     << "associate_us_per_frame=" << r.per_frame.associate * 1e6 << '\n'
     << "update_us_per_frame=" << r.per_frame.update * 1e6 << '\n';
  return os.str();
}

}  // namespace ensmot
