#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "sonochain/domain.hpp"
#include "sonochain/inference.hpp"

namespace sonochain {

// Rows are truth, columns are prediction.
struct ConfusionMatrix {
  int k = 0;
  std::vector<std::vector<long long>> counts;

  long long total() const;
  long long trace() const;
};

struct EvalRecord {
  std::string image_id;
  TaskId task = TaskId::Shape;
  int truth = 0;
  int pred = 0;
};

// All records must share one classification task.
ConfusionMatrix confusion(const std::vector<EvalRecord>& records);

struct ClassificationMetrics {
  double accuracy = 0;
  double macro_precision = 0;
  double macro_recall = 0;
  double macro_f1 = 0;
  std::vector<double> precision;  // per class; 0/0 defined as 0
  std::vector<double> recall;
  std::vector<double> f1;
  std::vector<int> undefined_classes;  // classes where a 0/0 was hit
};

ClassificationMetrics classification_metrics(const ConfusionMatrix& cm);

// Intersection over union of two valid boxes; 0 when disjoint.
double iou(const BBox& a, const BBox& b);

// Arithmetic mean at full precision.
double clinical_mean(const std::vector<ClinicalScore>& scores);

// Fixed two-decimal formatting used in reports ("3.67").
std::string format_score(double value);

// Truth/prediction box pair for detection evaluation.
struct DetectionRecord {
  std::string image_id;
  BBox truth;
  BBox predicted;
};

// Mean IoU of truth/prediction pairs (best-overlap pairing is assumed to be
// done upstream; each record is one matched pair).
double mean_iou(const std::vector<DetectionRecord>& records);

// CSV rows "image_id,task,truth,pred"; JSONL objects with the same fields.
std::vector<EvalRecord> load_eval_records(const std::filesystem::path& path);
// CSV rows "image_id,detect,tx0,ty0,tx1,ty1,px0,py0,px1,py1".
std::vector<DetectionRecord> load_detection_records(
    const std::filesystem::path& path);
// One score per line.
std::vector<ClinicalScore> load_clinical_scores(
    const std::filesystem::path& path);

nlohmann::json metrics_to_json(const ConfusionMatrix& cm,
                               const ClassificationMetrics& metrics);
std::string metrics_table(const ConfusionMatrix& cm,
                          const ClassificationMetrics& metrics);

}  // namespace sonochain
