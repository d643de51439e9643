#include <doctest.h>

#include <random>

#include "support.hpp"
#include "sonochain/metrics.hpp"

using namespace sonochain;
using namespace sonochain::testing;

namespace {

EvalRecord rec(TaskId task, int truth, int pred) {
  return {"img", task, truth, pred};
}

// Per-sample oracle: recompute metrics from an expanded (truth, pred) list.
ClassificationMetrics oracle_metrics(const ConfusionMatrix& cm) {
  std::vector<std::pair<int, int>> samples;
  for (int t = 0; t < cm.k; ++t)
    for (int p = 0; p < cm.k; ++p)
      for (long long n = 0; n < cm.counts[t][p]; ++n) samples.push_back({t, p});

  ClassificationMetrics m;
  long long correct = 0;
  for (auto [t, p] : samples)
    if (t == p) ++correct;
  m.accuracy = static_cast<double>(correct) / samples.size();

  for (int c = 0; c < cm.k; ++c) {
    long long tp = 0, pred_c = 0, truth_c = 0;
    for (auto [t, p] : samples) {
      if (t == c && p == c) ++tp;
      if (p == c) ++pred_c;
      if (t == c) ++truth_c;
    }
    double precision = pred_c ? static_cast<double>(tp) / pred_c : 0.0;
    double recall = truth_c ? static_cast<double>(tp) / truth_c : 0.0;
    m.precision.push_back(precision);
    m.recall.push_back(recall);
    m.f1.push_back(precision + recall > 0
                       ? 2 * precision * recall / (precision + recall)
                       : 0.0);
  }
  double sp = 0, sr = 0, sf = 0;
  for (int c = 0; c < cm.k; ++c) {
    sp += m.precision[c];
    sr += m.recall[c];
    sf += m.f1[c];
  }
  m.macro_precision = sp / cm.k;
  m.macro_recall = sr / cm.k;
  m.macro_f1 = sf / cm.k;
  return m;
}

}  // namespace

TEST_CASE("confusion counts by (truth, pred)") {
  auto cm = confusion({rec(TaskId::Shape, 0, 0), rec(TaskId::Shape, 0, 1),
                       rec(TaskId::Shape, 1, 1)});
  CHECK(cm.k == 2);
  CHECK(cm.counts[0][0] == 1);
  CHECK(cm.counts[0][1] == 1);
  CHECK(cm.counts[1][0] == 0);
  CHECK(cm.counts[1][1] == 1);
  CHECK(cm.total() == 3);
}

TEST_CASE("all-correct records produce a diagonal matrix") {
  std::vector<EvalRecord> records;
  for (int i = 0; i < 6; ++i) records.push_back(rec(TaskId::Shape, 0, 0));
  for (int i = 0; i < 4; ++i) records.push_back(rec(TaskId::Shape, 1, 1));
  auto cm = confusion(records);
  CHECK(cm.counts[0][0] == 6);
  CHECK(cm.counts[1][1] == 4);
  CHECK(cm.counts[0][1] == 0);
  CHECK(cm.counts[1][0] == 0);
}

TEST_CASE("mixed tasks are rejected") {
  CHECK_THROWS_AS(confusion({rec(TaskId::Shape, 0, 0), rec(TaskId::Echo, 1, 1)}),
                  EvalError);
  CHECK_THROWS_AS(confusion({}), EvalError);
  CHECK_THROWS_AS(confusion({rec(TaskId::Shape, 0, 2)}), EvalError);
}

TEST_CASE("confusion is permutation-invariant") {
  std::vector<EvalRecord> records = {rec(TaskId::Echo, 0, 1),
                                     rec(TaskId::Echo, 2, 2),
                                     rec(TaskId::Echo, 1, 0)};
  auto baseline = confusion(records);
  std::reverse(records.begin(), records.end());
  CHECK(confusion(records).counts == baseline.counts);
}

TEST_CASE("hand-computed metrics for [[1,1],[0,1]]") {
  ConfusionMatrix cm{2, {{1, 1}, {0, 1}}};
  auto m = classification_metrics(cm);
  CHECK(m.accuracy == doctest::Approx(2.0 / 3.0));
  // precision: class0 = 1/1, class1 = 1/2 -> macro 0.75
  CHECK(m.macro_precision == doctest::Approx(0.75));
  // recall: class0 = 1/2, class1 = 1/1 -> macro 0.75
  CHECK(m.macro_recall == doctest::Approx(0.75));
}

TEST_CASE("perfect diagonal scores 1.0 everywhere") {
  ConfusionMatrix cm{3, {{5, 0, 0}, {0, 7, 0}, {0, 0, 2}}};
  auto m = classification_metrics(cm);
  CHECK(m.accuracy == doctest::Approx(1.0));
  CHECK(m.macro_precision == doctest::Approx(1.0));
  CHECK(m.macro_recall == doctest::Approx(1.0));
  CHECK(m.macro_f1 == doctest::Approx(1.0));
  CHECK(m.undefined_classes.empty());
}

TEST_CASE("a class with no truth rows is flagged and scored 0") {
  ConfusionMatrix cm{2, {{3, 0}, {0, 0}}};
  auto m = classification_metrics(cm);
  CHECK(m.recall[1] == 0.0);
  REQUIRE(m.undefined_classes.size() == 1);
  CHECK(m.undefined_classes[0] == 1);
  CHECK_THROWS_AS(classification_metrics(ConfusionMatrix{0, {}}), EvalError);
}

TEST_CASE("metrics match the per-sample oracle on random matrices") {
  std::mt19937 rng(42);
  for (int trial = 0; trial < 100; ++trial) {
    int k = std::uniform_int_distribution<int>(2, 12)(rng);
    ConfusionMatrix cm{k, std::vector<std::vector<long long>>(
                              k, std::vector<long long>(k, 0))};
    int n = std::uniform_int_distribution<int>(1, 200)(rng);
    for (int s = 0; s < n; ++s) {
      int t = std::uniform_int_distribution<int>(0, k - 1)(rng);
      int p = std::uniform_int_distribution<int>(0, k - 1)(rng);
      ++cm.counts[t][p];
    }
    auto fast = classification_metrics(cm);
    auto slow = oracle_metrics(cm);
    CHECK(fast.accuracy == doctest::Approx(slow.accuracy).epsilon(1e-12));
    CHECK(fast.macro_precision ==
          doctest::Approx(slow.macro_precision).epsilon(1e-12));
    CHECK(fast.macro_recall ==
          doctest::Approx(slow.macro_recall).epsilon(1e-12));
    CHECK(fast.macro_f1 == doctest::Approx(slow.macro_f1).epsilon(1e-12));
  }
}

TEST_CASE("iou closed-form cases") {
  BBox a{0, 0, 0.5, 0.5, 1.0};
  CHECK(iou(a, a) == doctest::Approx(1.0));

  BBox far{0.6, 0.6, 0.9, 0.9, 1.0};
  CHECK(iou(a, far) == doctest::Approx(0.0));

  BBox b{0.25, 0.25, 0.75, 0.75, 1.0};
  CHECK(iou(a, b) == doctest::Approx(1.0 / 7.0).epsilon(1e-9));
}

TEST_CASE("iou is symmetric and bounded") {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    auto box = [&] {
      double x0 = u(rng) * 0.9, y0 = u(rng) * 0.9;
      return BBox{x0, y0, x0 + 0.05 + u(rng) * (0.99 - x0 - 0.05),
                  y0 + 0.05 + u(rng) * (0.99 - y0 - 0.05), 1.0};
    };
    BBox a = box(), b = box();
    double ab = iou(a, b);
    CHECK(ab == doctest::Approx(iou(b, a)));
    CHECK(ab >= 0.0);
    CHECK(ab <= 1.0);
  }
}

TEST_CASE("clinical mean") {
  CHECK(format_score(clinical_mean({{3}, {4}, {4}})) == "3.67");
  CHECK(format_score(clinical_mean({{5}, {5}, {5}})) == "5.00");
  CHECK_THROWS_AS(clinical_mean({}), EvalError);
}

TEST_CASE("record loaders: CSV, JSONL, and malformed rows") {
  TempDir dir;
  write_text(dir.file("r.csv"),
             "img1,shape,0,0\nimg2,shape,0,1\nimg3,shape,1,1\n");
  auto records = load_eval_records(dir.file("r.csv"));
  REQUIRE(records.size() == 3);
  CHECK(records[1].pred == 1);

  write_text(dir.file("r.jsonl"),
             R"({"image_id":"a","task":"probe","truth":3,"pred":3})"
             "\n");
  auto jl = load_eval_records(dir.file("r.jsonl"));
  REQUIRE(jl.size() == 1);
  CHECK(jl[0].task == TaskId::Probe);

  write_text(dir.file("bad.csv"), "img1,shape,0\n");
  CHECK_THROWS_WITH_AS(load_eval_records(dir.file("bad.csv")),
                       doctest::Contains(":1:"), ParseError);
}

TEST_CASE("detection records and mean IoU") {
  TempDir dir;
  write_text(dir.file("d.csv"),
             "img1,detect,0,0,0.5,0.5,0,0,0.5,0.5\n"
             "img2,detect,0,0,0.5,0.5,0.25,0.25,0.75,0.75\n");
  auto records = load_detection_records(dir.file("d.csv"));
  REQUIRE(records.size() == 2);
  CHECK(mean_iou(records) == doctest::Approx((1.0 + 1.0 / 7.0) / 2));
}

TEST_CASE("clinical score file loader") {
  TempDir dir;
  write_text(dir.file("s.txt"), "3\n4\n4\n");
  auto scores = load_clinical_scores(dir.file("s.txt"));
  CHECK(format_score(clinical_mean(scores)) == "3.67");

  write_text(dir.file("bad.txt"), "3\n9\n");
  CHECK_THROWS_AS(load_clinical_scores(dir.file("bad.txt")), EvalError);
}
