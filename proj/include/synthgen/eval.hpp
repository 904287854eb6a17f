// Copyright 2026 The synthgen Authors
// SPDX-License-Identifier: Apache-2.0

// COCO-style detection evaluation: greedy per-class, per-image matching and
// 101-point interpolated average precision, reported at IoU 0.50 and averaged
// over IoU in {0.50, 0.55, ..., 0.95}.
//
// Matching contract: detections are processed in descending score order with
// ties kept in input order; each detection claims the still-unmatched ground
// truth box of its class and image with the highest IoU, provided that IoU
// reaches the threshold. Classes with zero ground-truth boxes are excluded
// from the mean. No cap is applied to detections per image.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>
#include <string>
#include <vector>

#include <json.hpp>

#include "synthgen/errors.hpp"

namespace synthgen {

struct EvalBox {
  double x = 0, y = 0, w = 0, h = 0;
};

inline double iou(const EvalBox& a, const EvalBox& b) {
  double ix = std::max(0.0, std::min(a.x + a.w, b.x + b.w) - std::max(a.x, b.x));
  double iy = std::max(0.0, std::min(a.y + a.h, b.y + b.h) - std::max(a.y, b.y));
  double inter = ix * iy;
  double uni = a.w * a.h + b.w * b.h - inter;
  return uni > 0 ? inter / uni : 0.0;
}

struct GroundTruthItem {
  int image_id = 0;
  int category_id = 0;
  EvalBox box;
};

struct DetectionItem {
  int image_id = 0;
  int category_id = 0;
  EvalBox box;
  double score = 0;
};

namespace evaldetail {

// True-positive flags for one class at one IoU threshold, aligned with the
// score-descending detection order.
inline std::vector<char> match_class(const std::vector<DetectionItem>& sorted_dets,
                                     const std::map<int, std::vector<EvalBox>>& gts_by_image,
                                     double threshold) {
  std::map<int, std::vector<char>> used;
  for (const auto& [image, boxes] : gts_by_image) used[image].assign(boxes.size(), 0);

  std::vector<char> tp(sorted_dets.size(), 0);
  for (size_t i = 0; i < sorted_dets.size(); ++i) {
    const DetectionItem& det = sorted_dets[i];
    auto it = gts_by_image.find(det.image_id);
    if (it == gts_by_image.end()) continue;
    const std::vector<EvalBox>& boxes = it->second;
    std::vector<char>& taken = used[det.image_id];
    double best = threshold;
    int best_j = -1;
    for (size_t j = 0; j < boxes.size(); ++j) {
      if (taken[j]) continue;
      double v = iou(det.box, boxes[j]);
      if (v >= best && (best_j < 0 || v > best)) {
        best = v;
        best_j = static_cast<int>(j);
      }
    }
    if (best_j >= 0) {
      taken[best_j] = 1;
      tp[i] = 1;
    }
  }
  return tp;
}

}  // namespace evaldetail

// 101-point interpolated AP over recall points {0.00, 0.01, ..., 1.00}.
// `tp` must be aligned with descending-score order.
inline double average_precision(const std::vector<char>& tp, long total_gt) {
  if (total_gt <= 0) return 0.0;
  size_t n = tp.size();
  std::vector<double> precision(n), recall(n);
  long cum = 0;
  for (size_t i = 0; i < n; ++i) {
    cum += tp[i];
    precision[i] = static_cast<double>(cum) / static_cast<double>(i + 1);
    recall[i] = static_cast<double>(cum) / static_cast<double>(total_gt);
  }
  for (size_t i = n; i-- > 1;) precision[i - 1] = std::max(precision[i - 1], precision[i]);

  double sum = 0;
  size_t j = 0;
  for (int r = 0; r <= 100; ++r) {
    double target = r / 100.0;
    while (j < n && recall[j] < target - 1e-12) ++j;
    if (j < n) sum += precision[j];
  }
  return sum / 101.0;
}

struct ClassMetrics {
  int category_id = 0;
  long gt_count = 0;
  double ap50 = 0;    // AP at IoU 0.50
  double ap5095 = 0;  // mean AP over IoU 0.50..0.95
};

struct EvalResult {
  double map50 = 0;
  double map5095 = 0;
  std::vector<ClassMetrics> per_class;  // ascending category id
  long gt_total = 0;
  long detection_total = 0;
};

inline EvalResult evaluate(const std::vector<GroundTruthItem>& ground_truth,
                           const std::vector<DetectionItem>& detections) {
  if (ground_truth.empty())
    throw DataError("evaluation requires ground truth with at least one annotation");

  // Group by class; classes without ground truth are skipped entirely.
  std::map<int, std::map<int, std::vector<EvalBox>>> gt_by_class;
  for (const GroundTruthItem& g : ground_truth)
    gt_by_class[g.category_id][g.image_id].push_back(g.box);

  std::map<int, std::vector<DetectionItem>> det_by_class;
  for (const DetectionItem& d : detections)
    if (gt_by_class.count(d.category_id)) det_by_class[d.category_id].push_back(d);

  EvalResult result;
  result.gt_total = static_cast<long>(ground_truth.size());
  result.detection_total = static_cast<long>(detections.size());

  for (auto& [category, gts_by_image] : gt_by_class) {
    std::vector<DetectionItem>& dets = det_by_class[category];
    std::stable_sort(dets.begin(), dets.end(),
                     [](const DetectionItem& a, const DetectionItem& b) { return a.score > b.score; });
    long gt_count = 0;
    for (const auto& [image, boxes] : gts_by_image) gt_count += static_cast<long>(boxes.size());

    ClassMetrics metrics;
    metrics.category_id = category;
    metrics.gt_count = gt_count;
    double sum = 0;
    for (int k = 0; k < 10; ++k) {
      double threshold = 0.50 + 0.05 * k;
      double ap = average_precision(evaldetail::match_class(dets, gts_by_image, threshold),
                                    gt_count);
      if (k == 0) metrics.ap50 = ap;
      sum += ap;
    }
    metrics.ap5095 = sum / 10.0;
    result.per_class.push_back(metrics);
  }

  for (const ClassMetrics& m : result.per_class) {
    result.map50 += m.ap50;
    result.map5095 += m.ap5095;
  }
  result.map50 /= static_cast<double>(result.per_class.size());
  result.map5095 /= static_cast<double>(result.per_class.size());
  return result;
}

// ---------------------------------------------------------------------------
// COCO JSON adapters.

namespace evaldetail {

inline EvalBox box_from_json(const nlohmann::json& j, const std::string& what) {
  if (!j.is_array() || j.size() != 4)
    throw DataError(what + ": bbox must be [x, y, w, h]");
  for (const auto& v : j)
    if (!v.is_number()) throw DataError(what + ": bbox must be numeric");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>(), j[3].get<double>()};
}

}  // namespace evaldetail

inline std::vector<GroundTruthItem> ground_truth_from_coco(
    const nlohmann::json& doc, std::map<int, std::string>* categories_out = nullptr) {
  if (!doc.is_object() || !doc.contains("annotations") || !doc["annotations"].is_array())
    throw DataError("ground truth: expected a COCO object with an \"annotations\" array");
  std::vector<GroundTruthItem> out;
  for (const auto& a : doc["annotations"]) {
    if (!a.contains("image_id") || !a.contains("category_id") || !a.contains("bbox"))
      throw DataError("ground truth: annotation needs image_id, category_id, bbox");
    out.push_back({a["image_id"].get<int>(), a["category_id"].get<int>(),
                   evaldetail::box_from_json(a["bbox"], "ground truth")});
  }
  if (categories_out && doc.contains("categories"))
    for (const auto& c : doc["categories"])
      (*categories_out)[c["id"].get<int>()] = c.value("name", std::string{});
  return out;
}

// COCO results format: a top-level array of detection objects.
inline std::vector<DetectionItem> detections_from_coco(const nlohmann::json& doc) {
  if (!doc.is_array())
    throw DataError("detections: expected a COCO results array");
  std::vector<DetectionItem> out;
  for (const auto& d : doc) {
    if (!d.contains("image_id") || !d.contains("category_id") || !d.contains("bbox") ||
        !d.contains("score"))
      throw DataError("detections: entry needs image_id, category_id, bbox, score");
    out.push_back({d["image_id"].get<int>(), d["category_id"].get<int>(),
                   evaldetail::box_from_json(d["bbox"], "detections"), d["score"].get<double>()});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Reports.

inline nlohmann::json eval_report_json(const EvalResult& result,
                                       const std::map<int, std::string>& categories) {
  nlohmann::json doc;
  doc["mAP50"] = result.map50;
  doc["mAP50_95"] = result.map5095;
  doc["ground_truth_count"] = result.gt_total;
  doc["detection_count"] = result.detection_total;
  doc["per_class"] = nlohmann::json::array();
  for (const ClassMetrics& m : result.per_class) {
    nlohmann::json entry = {{"category_id", m.category_id},
                            {"gt_count", m.gt_count},
                            {"AP50", m.ap50},
                            {"AP50_95", m.ap5095}};
    auto it = categories.find(m.category_id);
    if (it != categories.end()) entry["name"] = it->second;
    doc["per_class"].push_back(entry);
  }
  return doc;
}

inline std::string eval_report_table(const EvalResult& result,
                                     const std::map<int, std::string>& categories) {
  std::string out;
  char line[160];
  std::snprintf(line, sizeof(line), "%-24s %8s %12s %8s\n", "category", "AP@50", "AP@[50:95]",
                "GT");
  out += line;
  out += std::string(56, '-') + "\n";
  for (const ClassMetrics& m : result.per_class) {
    auto it = categories.find(m.category_id);
    std::string name = it != categories.end() && !it->second.empty()
                           ? it->second
                           : "category " + std::to_string(m.category_id);
    std::snprintf(line, sizeof(line), "%-24s %8.4f %12.4f %8ld\n", name.c_str(), m.ap50, m.ap5095,
                  m.gt_count);
    out += line;
  }
  out += std::string(56, '-') + "\n";
  std::snprintf(line, sizeof(line), "%-24s %8.4f %12.4f %8ld\n", "mAP", result.map50,
                result.map5095, result.gt_total);
  out += line;
  return out;
}

}  // namespace synthgen
