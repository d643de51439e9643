#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "sonochain/agent.hpp"
#include "sonochain/domain.hpp"
#include "sonochain/metrics.hpp"
#include "sonochain/region_splitter.hpp"
#include "sonochain/reports.hpp"
#include "sonochain/tools.hpp"

using namespace sonochain;

namespace {

LayoutConfig bench_layout() {
  LayoutConfig layout;
  layout.layout_id = "bench";
  layout.regions = {
      {"main", {0.0, 0.0, 0.75, 1.0}},
      {"probe_mark", {0.8, 0.05, 0.98, 0.3}},
      {"ocr_strip", {0.8, 0.7, 1.0, 0.95}},
  };
  return layout;
}

Raster bench_frame(int width, int height) {
  Raster frame;
  frame.width = width;
  frame.height = height;
  frame.pixels.resize(static_cast<std::size_t>(width) * height);
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x)
      frame.pixels[static_cast<std::size_t>(y) * width + x] =
          static_cast<std::uint8_t>((x * 7 + y * 13) % 256);
  return frame;
}

void BM_Split(benchmark::State& state) {
  auto layout = bench_layout();
  auto frame = bench_frame(static_cast<int>(state.range(0)),
                           static_cast<int>(state.range(0)) * 3 / 4);
  for (auto _ : state) {
    auto regions = split(frame, layout);
    benchmark::DoNotOptimize(regions);
  }
}
BENCHMARK(BM_Split)->Arg(256)->Arg(640)->Arg(1280);

void BM_PlanRule(benchmark::State& state) {
  auto registry = default_registry();
  Instruction instruction = parse_instruction(
      "Give me a probe information for the given image: a.pgm. Then, provide "
      "a category of image and description of it.");
  for (auto _ : state) {
    auto steps = plan_rule(instruction, registry);
    benchmark::DoNotOptimize(steps);
  }
}
BENCHMARK(BM_PlanRule);

void BM_RefineCategory(benchmark::State& state) {
  ProbVector probs({0.90, 0.05, 0.05});
  for (auto _ : state) {
    auto category = refine_category(probs);
    benchmark::DoNotOptimize(category);
  }
}
BENCHMARK(BM_RefineCategory);

void BM_ClassificationMetrics(benchmark::State& state) {
  const int k = static_cast<int>(state.range(0));
  std::mt19937 rng(42);
  ConfusionMatrix cm;
  cm.k = k;
  cm.counts.assign(k, std::vector<long long>(k, 0));
  std::uniform_int_distribution<int> cell(0, k - 1);
  for (int s = 0; s < 10000; ++s) ++cm.counts[cell(rng)][cell(rng)];
  for (auto _ : state) {
    auto metrics = classification_metrics(cm);
    benchmark::DoNotOptimize(metrics);
  }
}
BENCHMARK(BM_ClassificationMetrics)->Arg(3)->Arg(12);

void BM_AggregateFinal(benchmark::State& state) {
  std::vector<PreliminaryReport> reports;
  for (int i = 0; i < static_cast<int>(state.range(0)); ++i) {
    PreliminaryReport report;
    report.image_id = "img_" + std::to_string(i);
    report.probe = ProbePosition::from_index(i % 12);
    report.category = static_cast<BiRadsCategory>(1 + i % 5);
    report.body = "body " + std::to_string(i);
    reports.push_back(report);
  }
  for (auto _ : state) {
    auto final_report = aggregate_final("p001", reports);
    benchmark::DoNotOptimize(final_report);
  }
}
BENCHMARK(BM_AggregateFinal)->Arg(8)->Arg(64);

void BM_Iou(benchmark::State& state) {
  BBox a{0.1, 0.1, 0.6, 0.6, 0.9};
  BBox b{0.3, 0.3, 0.8, 0.8, 0.8};
  for (auto _ : state) {
    double value = iou(a, b);
    benchmark::DoNotOptimize(value);
  }
}
BENCHMARK(BM_Iou);

}  // namespace

BENCHMARK_MAIN();
