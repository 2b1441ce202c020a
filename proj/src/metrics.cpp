#include "evsynth/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>

#include <json.hpp>

namespace evsynth {

namespace {

struct Interval {
  double x0, y0, x1, y1;
};

Interval corners(const Box& b) {
  return Interval{b.cx - b.w / 2.0, b.cy - b.h / 2.0, b.cx + b.w / 2.0,
                  b.cy + b.h / 2.0};
}

/// Prediction indices ordered by descending confidence, ties by input order.
std::vector<std::size_t> confidence_order(std::span<const Detection> preds) {
  std::vector<std::size_t> order(preds.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) {
                     return preds[a].confidence > preds[b].confidence;
                   });
  return order;
}

std::string row(const char* name, double v) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "%s: %.6f\n", name, v);
  return buf;
}

std::string row_opt(const char* name, const std::optional<double>& v) {
  if (!v) return std::string(name) + ": n/a\n";
  return row(name, *v);
}

}  // namespace

double iou(const Box& a, const Box& b) {
  if (a.w <= 0.0 || a.h <= 0.0 || b.w <= 0.0 || b.h <= 0.0)
    throw DataError("iou: degenerate zero-area box");
  const Interval ia = corners(a);
  const Interval ib = corners(b);
  const double ix = std::max(0.0, std::min(ia.x1, ib.x1) - std::max(ia.x0, ib.x0));
  const double iy = std::max(0.0, std::min(ia.y1, ib.y1) - std::max(ia.y0, ib.y0));
  const double inter = ix * iy;
  const double uni = a.w * a.h + b.w * b.h - inter;
  return inter <= 0.0 ? 0.0 : inter / uni;
}

MatchResult match_detections(std::span<const Detection> preds,
                             const std::map<std::string, AnnotationSet>& gts,
                             const EvalConfig& cfg) {
  if (!(cfg.iou_threshold > 0.0 && cfg.iou_threshold < 1.0))
    throw ConfigError("eval: iou_threshold must lie in (0, 1)");

  MatchResult res;
  res.gt_index.assign(preds.size(), -1);

  // claimed[image][gt index]
  std::map<std::string, std::vector<bool>> claimed;
  for (const auto& [id, ann] : gts)
    claimed.emplace(id, std::vector<bool>(ann.boxes.size(), false));

  for (const std::size_t pi : confidence_order(preds)) {
    const Detection& det = preds[pi];
    const auto git = gts.find(det.image_id);
    if (git == gts.end()) {
      ++res.fp;  // no ground truth for this image at all
      continue;
    }
    const auto& boxes = git->second.boxes;
    auto& used = claimed[det.image_id];

    double best_iou = 0.0;
    std::int64_t best = -1;
    for (std::size_t gi = 0; gi < boxes.size(); ++gi) {
      if (used[gi] || boxes[gi].cls != det.cls) continue;
      const double overlap = iou(det.box, boxes[gi]);
      if (overlap > best_iou) {
        best_iou = overlap;
        best = static_cast<std::int64_t>(gi);
      }
    }
    if (best >= 0 && best_iou >= cfg.iou_threshold) {
      used[static_cast<std::size_t>(best)] = true;
      res.gt_index[pi] = best;
      ++res.tp;
    } else {
      ++res.fp;
    }
  }

  for (const auto& [id, ann] : gts) {
    const auto& used = claimed[id];
    for (std::size_t gi = 0; gi < ann.boxes.size(); ++gi)
      if (!used[gi]) ++res.fn;
  }
  return res;
}

std::optional<double> average_precision(
    std::span<const Detection> preds,
    const std::map<std::string, AnnotationSet>& gts, int cls,
    const EvalConfig& cfg) {
  std::size_t gt_count = 0;
  for (const auto& [id, ann] : gts)
    for (const Box& b : ann.boxes)
      if (b.cls == cls) ++gt_count;
  if (gt_count == 0) return std::nullopt;  // AP undefined for this class

  const MatchResult matches = match_detections(preds, gts, cfg);

  // true/false labels of this class's predictions, in confidence order
  std::vector<bool> is_tp;
  for (const std::size_t pi : confidence_order(preds)) {
    if (preds[pi].cls != cls) continue;
    is_tp.push_back(matches.gt_index[pi] >= 0);
  }
  if (is_tp.empty()) return 0.0;

  std::vector<double> precision(is_tp.size());
  std::vector<double> recall(is_tp.size());
  long tp = 0;
  for (std::size_t i = 0; i < is_tp.size(); ++i) {
    if (is_tp[i]) ++tp;
    precision[i] = static_cast<double>(tp) / static_cast<double>(i + 1);
    recall[i] = static_cast<double>(tp) / static_cast<double>(gt_count);
  }

  // monotone precision envelope, then integrate over recall steps
  for (std::size_t i = precision.size() - 1; i-- > 0;)
    precision[i] = std::max(precision[i], precision[i + 1]);

  double ap = 0.0;
  double prev_recall = 0.0;
  for (std::size_t i = 0; i < recall.size(); ++i) {
    ap += (recall[i] - prev_recall) * precision[i];
    prev_recall = recall[i];
  }
  return ap;
}

MetricsReport evaluate(std::span<const Detection> preds,
                       const std::map<std::string, AnnotationSet>& gts,
                       const EvalConfig& cfg) {
  std::set<std::string> missing;
  for (const Detection& det : preds)
    if (!gts.contains(det.image_id)) missing.insert(det.image_id);
  if (!missing.empty()) {
    std::string ids;
    for (const auto& id : missing) ids += (ids.empty() ? "" : ", ") + id;
    throw EvaluationError("predictions reference images absent from ground "
                          "truth: " + ids);
  }

  MetricsReport report;
  const MatchResult matches = match_detections(preds, gts, cfg);
  report.tp = matches.tp;
  report.fp = matches.fp;
  report.fn = matches.fn;
  report.zero_tp = matches.tp == 0;
  report.precision = matches.tp + matches.fp == 0
                         ? 0.0
                         : double(matches.tp) / double(matches.tp + matches.fp);
  report.recall = matches.tp + matches.fn == 0
                      ? 0.0
                      : double(matches.tp) / double(matches.tp + matches.fn);
  report.f1 = report.precision + report.recall > 0.0
                  ? 2.0 * report.precision * report.recall /
                        (report.precision + report.recall)
                  : 0.0;

  double sq_sum = 0.0;
  std::size_t matched = 0;
  for (std::size_t pi = 0; pi < preds.size(); ++pi) {
    if (matches.gt_index[pi] < 0) continue;
    const Box& gt = gts.at(preds[pi].image_id)
                        .boxes[static_cast<std::size_t>(matches.gt_index[pi])];
    const Box& pb = preds[pi].box;
    const double dcx = pb.cx - gt.cx;
    const double dcy = pb.cy - gt.cy;
    const double dw = pb.w - gt.w;
    const double dh = pb.h - gt.h;
    sq_sum += (dcx * dcx + dcy * dcy + dw * dw + dh * dh) / 4.0;
    ++matched;
  }
  report.box_mse = matched == 0 ? 0.0 : sq_sum / static_cast<double>(matched);

  report.ap_face = average_precision(preds, gts, kClassFace, cfg);
  report.ap_eye = average_precision(preds, gts, kClassEye, cfg);
  double ap_sum = 0.0;
  int ap_n = 0;
  for (const auto& ap : {report.ap_face, report.ap_eye})
    if (ap) {
      ap_sum += *ap;
      ++ap_n;
    }
  if (ap_n > 0) report.map_all = ap_sum / ap_n;
  return report;
}

std::string MetricsReport::to_text() const {
  std::string out;
  out += row_opt("Mean Average Precision (All)", map_all);
  out += row_opt("Mean Average Precision (Face)", ap_face);
  out += row_opt("Mean Average Precision (Eye)", ap_eye);
  out += row("Precision", precision);
  out += row("Recall", recall);
  out += row("F1-Score", f1);
  out += row("Mean Squared Error", box_mse);
  out += "TP: " + std::to_string(tp) + "  FP: " + std::to_string(fp) +
         "  FN: " + std::to_string(fn) + "\n";
  if (zero_tp) out += "note: no true positives\n";
  return out;
}

std::string MetricsReport::to_json() const {
  nlohmann::json j;
  const auto opt = [](const std::optional<double>& v) {
    return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
  };
  j["map_all"] = opt(map_all);
  j["map_face"] = opt(ap_face);
  j["map_eye"] = opt(ap_eye);
  j["precision"] = precision;
  j["recall"] = recall;
  j["f1"] = f1;
  j["box_mse"] = box_mse;
  j["tp"] = tp;
  j["fp"] = fp;
  j["fn"] = fn;
  j["zero_tp"] = zero_tp;
  return j.dump(2);
}

}  // namespace evsynth
