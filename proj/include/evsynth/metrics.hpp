#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "evsynth/dataset.hpp"

namespace evsynth {

/// One externally produced detection, boxes normalized like labels.
struct Detection {
  std::string image_id;
  int cls = kClassFace;
  double confidence = 0.0;
  Box box;

  bool operator==(const Detection&) const = default;
};

struct EvalConfig {
  double iou_threshold = 0.5;
};

/// Greedy matching result. gt_index is parallel to the prediction span:
/// the matched ground-truth index within its image's box list, or -1.
struct MatchResult {
  std::vector<std::int64_t> gt_index;
  long tp = 0;
  long fp = 0;
  long fn = 0;
};

struct MetricsReport {
  std::optional<double> ap_face;
  std::optional<double> ap_eye;
  std::optional<double> map_all;  // mean of the defined per-class APs
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  double box_mse = 0.0;
  bool zero_tp = false;
  long tp = 0;
  long fp = 0;
  long fn = 0;

  /// Key-value rows matching the reported metric names.
  std::string to_text() const;
  /// Machine-readable JSON object (serialized).
  std::string to_json() const;
};

/// Intersection over union of two normalized boxes; 0 when disjoint.
double iou(const Box& a, const Box& b);

/// Per image and class, predictions claim (in descending confidence, ties
/// by input order) the unmatched ground truth of highest IoU >= threshold.
MatchResult match_detections(std::span<const Detection> preds,
                             const std::map<std::string, AnnotationSet>& gts,
                             const EvalConfig& cfg);

/// All-point interpolated average precision for one class, or nullopt when
/// the class has no ground truth.
std::optional<double> average_precision(
    std::span<const Detection> preds,
    const std::map<std::string, AnnotationSet>& gts, int cls,
    const EvalConfig& cfg);

/// Full report: per-class AP, pooled precision/recall/F1 and the mean
/// squared difference of matched box coordinates.
MetricsReport evaluate(std::span<const Detection> preds,
                       const std::map<std::string, AnnotationSet>& gts,
                       const EvalConfig& cfg);

}  // namespace evsynth
