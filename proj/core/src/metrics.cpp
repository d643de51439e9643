#include "sonochain/metrics.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace sonochain {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) {
    auto b = field.find_first_not_of(" \t\r");
    auto e = field.find_last_not_of(" \t\r");
    fields.push_back(b == std::string::npos
                         ? ""
                         : field.substr(b, e - b + 1));
  }
  return fields;
}

[[noreturn]] void bad_line(const std::filesystem::path& path, int line_no,
                           const std::string& why) {
  throw ParseError(path.string() + ":" + std::to_string(line_no) + ": " + why);
}

}  // namespace

long long ConfusionMatrix::total() const {
  long long n = 0;
  for (const auto& row : counts)
    for (long long c : row) n += c;
  return n;
}

long long ConfusionMatrix::trace() const {
  long long n = 0;
  for (int i = 0; i < k; ++i) n += counts[i][i];
  return n;
}

ConfusionMatrix confusion(const std::vector<EvalRecord>& records) {
  if (records.empty()) throw EvalError("no evaluation records");
  const TaskId task = records.front().task;
  if (!is_classification(task))
    throw EvalError("confusion matrix requires a classification task");
  const int k = class_count(task);

  ConfusionMatrix cm;
  cm.k = k;
  cm.counts.assign(k, std::vector<long long>(k, 0));
  for (const auto& r : records) {
    if (r.task != task)
      throw EvalError("mixed tasks in evaluation records: " +
                      task_name(task) + " vs " + task_name(r.task));
    if (r.truth < 0 || r.truth >= k || r.pred < 0 || r.pred >= k)
      throw EvalError("label index out of range for task " + task_name(task) +
                      " in record " + r.image_id);
    ++cm.counts[r.truth][r.pred];
  }
  return cm;
}

ClassificationMetrics classification_metrics(const ConfusionMatrix& cm) {
  if (cm.k <= 0 || cm.total() == 0)
    throw EvalError("empty confusion matrix");

  ClassificationMetrics m;
  m.accuracy = static_cast<double>(cm.trace()) / cm.total();

  for (int c = 0; c < cm.k; ++c) {
    long long tp = cm.counts[c][c];
    long long truth_total = 0, pred_total = 0;
    for (int j = 0; j < cm.k; ++j) {
      truth_total += cm.counts[c][j];
      pred_total += cm.counts[j][c];
    }
    bool undefined = false;
    double precision = 0, recall = 0;
    if (pred_total > 0)
      precision = static_cast<double>(tp) / pred_total;
    else
      undefined = true;
    if (truth_total > 0)
      recall = static_cast<double>(tp) / truth_total;
    else
      undefined = true;
    double f1 = (precision + recall) > 0
                    ? 2 * precision * recall / (precision + recall)
                    : 0.0;
    m.precision.push_back(precision);
    m.recall.push_back(recall);
    m.f1.push_back(f1);
    if (undefined) m.undefined_classes.push_back(c);
  }

  auto mean = [&](const std::vector<double>& v) {
    double sum = 0;
    for (double x : v) sum += x;
    return sum / v.size();
  };
  m.macro_precision = mean(m.precision);
  m.macro_recall = mean(m.recall);
  m.macro_f1 = mean(m.f1);
  return m;
}

double iou(const BBox& a, const BBox& b) {
  validate(a);
  validate(b);
  const double ix = std::max(0.0, std::min(a.x1, b.x1) - std::max(a.x0, b.x0));
  const double iy = std::max(0.0, std::min(a.y1, b.y1) - std::max(a.y0, b.y0));
  const double inter = ix * iy;
  const double area_a = (a.x1 - a.x0) * (a.y1 - a.y0);
  const double area_b = (b.x1 - b.x0) * (b.y1 - b.y0);
  const double uni = area_a + area_b - inter;
  return uni > 0 ? inter / uni : 0.0;
}

double clinical_mean(const std::vector<ClinicalScore>& scores) {
  if (scores.empty()) throw EvalError("no clinical scores");
  double sum = 0;
  for (const auto& s : scores) sum += s.value;
  return sum / scores.size();
}

std::string format_score(double value) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", value);
  return buf;
}

double mean_iou(const std::vector<DetectionRecord>& records) {
  if (records.empty()) throw EvalError("no detection records");
  double sum = 0;
  for (const auto& r : records) sum += iou(r.truth, r.predicted);
  return sum / records.size();
}

std::vector<EvalRecord> load_eval_records(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open records file: " + path.string());

  const bool jsonl = path.extension() == ".jsonl";
  std::vector<EvalRecord> records;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    EvalRecord r;
    if (jsonl) {
      try {
        auto obj = nlohmann::json::parse(line);
        r.image_id = obj.at("image_id").get<std::string>();
        r.task = parse_task(obj.at("task").get<std::string>());
        r.truth = obj.at("truth").get<int>();
        r.pred = obj.at("pred").get<int>();
      } catch (const nlohmann::json::exception& e) {
        bad_line(path, line_no, e.what());
      }
    } else {
      auto fields = split_csv_line(line);
      if (fields.size() != 4)
        bad_line(path, line_no, "expected 4 fields: image_id,task,truth,pred");
      try {
        r.image_id = fields[0];
        r.task = parse_task(fields[1]);
        r.truth = std::stoi(fields[2]);
        r.pred = std::stoi(fields[3]);
      } catch (const ParseError&) {
        bad_line(path, line_no, "unknown task \"" + fields[1] + "\"");
      } catch (const std::exception&) {
        bad_line(path, line_no, "labels must be integers");
      }
    }
    records.push_back(std::move(r));
  }
  return records;
}

std::vector<DetectionRecord> load_detection_records(
    const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open records file: " + path.string());
  std::vector<DetectionRecord> records;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    auto fields = split_csv_line(line);
    if (fields.size() != 10)
      bad_line(path, line_no,
               "expected 10 fields: image_id,detect,tx0..ty1,px0..py1");
    try {
      DetectionRecord r;
      r.image_id = fields[0];
      if (parse_task(fields[1]) != TaskId::Detect)
        bad_line(path, line_no, "task must be detect");
      r.truth = {std::stod(fields[2]), std::stod(fields[3]),
                 std::stod(fields[4]), std::stod(fields[5]), 1.0};
      r.predicted = {std::stod(fields[6]), std::stod(fields[7]),
                     std::stod(fields[8]), std::stod(fields[9]), 1.0};
      validate(r.truth);
      validate(r.predicted);
      records.push_back(std::move(r));
    } catch (const ParseError&) {
      throw;
    } catch (const std::exception& e) {
      bad_line(path, line_no, e.what());
    }
  }
  return records;
}

std::vector<ClinicalScore> load_clinical_scores(
    const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open scores file: " + path.string());
  std::vector<ClinicalScore> scores;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      scores.push_back(make_clinical_score(std::stoi(line)));
    } catch (const EvalError&) {
      throw;
    } catch (const std::exception&) {
      bad_line(path, line_no, "scores must be integers in [1,5]");
    }
  }
  return scores;
}

nlohmann::json metrics_to_json(const ConfusionMatrix& cm,
                               const ClassificationMetrics& metrics) {
  return {
      {"class_count", cm.k},
      {"total", cm.total()},
      {"confusion", cm.counts},
      {"accuracy", metrics.accuracy},
      {"macro_precision", metrics.macro_precision},
      {"macro_recall", metrics.macro_recall},
      {"macro_f1", metrics.macro_f1},
      {"averaging", "macro"},
      {"per_class",
       {{"precision", metrics.precision},
        {"recall", metrics.recall},
        {"f1", metrics.f1}}},
      {"undefined_classes", metrics.undefined_classes},
  };
}

std::string metrics_table(const ConfusionMatrix& cm,
                          const ClassificationMetrics& metrics) {
  std::ostringstream out;
  out << "confusion matrix (rows = truth, cols = prediction):\n";
  for (int i = 0; i < cm.k; ++i) {
    for (int j = 0; j < cm.k; ++j) out << cm.counts[i][j] << (j + 1 < cm.k ? "\t" : "");
    out << "\n";
  }
  out << "\naccuracy:        " << format_score(metrics.accuracy) << "\n"
      << "macro precision: " << format_score(metrics.macro_precision) << "\n"
      << "macro recall:    " << format_score(metrics.macro_recall) << "\n"
      << "macro F1:        " << format_score(metrics.macro_f1) << "\n";
  if (!metrics.undefined_classes.empty()) {
    out << "warning: 0/0 precision or recall (reported as 0) for classes:";
    for (int c : metrics.undefined_classes) out << " " << c;
    out << "\n";
  }
  return out.str();
}

}  // namespace sonochain
