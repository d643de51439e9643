#include <doctest.h>

#include <algorithm>
#include <random>

#include "support.hpp"
#include "sonochain/reports.hpp"

using namespace sonochain;

namespace {

ToolObservation probe_obs(int index) {
  return {"probe_tool", ProbePosition::from_index(index),
          "The probe information of the given image is " +
              probe_label_long(index) + "."};
}

ToolObservation category_obs(BiRadsCategory c) {
  return {"category_tool", c,
          "The category of the given image is " + birads_label(c) + "."};
}

ToolObservation lesion_obs(Shape s, Margin m, Echo e) {
  LesionDescription lesion{s, m, e, 0.9, 0.9, 0.9};
  return {"suspicious_description_tool", lesion,
          "It appears " + shape_label(s) + " shape, " + margin_label(m) +
              " margin and " + echo_label(e) + " echo."};
}

PreliminaryReport make_report(const std::string& image_id, int probe_index,
                              BiRadsCategory category,
                              Shape shape = Shape::Oval,
                              Margin margin = Margin::Circumscribed,
                              Echo echo = Echo::Anechoic) {
  Memory memory{image_id,
                {probe_obs(probe_index), category_obs(category),
                 lesion_obs(shape, margin, echo)}};
  return make_preliminary(image_id, memory);
}

}  // namespace

TEST_CASE("make_preliminary orders sentences canonically") {
  // memory deliberately out of canonical order
  Memory memory{"img_a",
                {lesion_obs(Shape::Oval, Margin::Circumscribed, Echo::Anechoic),
                 probe_obs(4), category_obs(BiRadsCategory::C2)}};
  auto report = make_preliminary("img_a", memory);

  REQUIRE(report.probe.has_value());
  CHECK(report.probe->index() == 4);
  CHECK(report.category == BiRadsCategory::C2);
  REQUIRE(report.lesion.has_value());

  std::size_t probe_pos = report.body.find("probe information");
  std::size_t cat_pos = report.body.find("category");
  std::size_t desc_pos = report.body.find("It appears");
  CHECK(probe_pos != std::string::npos);
  CHECK(probe_pos < cat_pos);
  CHECK(cat_pos < desc_pos);
}

TEST_CASE("make_preliminary with only a detection observation") {
  Memory memory{"img_b",
                {{"detection_tool", std::vector<BBox>{{0.1, 0.1, 0.3, 0.3, 0.9}},
                  "A suspicious finding is located at [0.10, 0.10, 0.30, 0.30]."}}};
  auto report = make_preliminary("img_b", memory);
  CHECK_FALSE(report.probe.has_value());
  CHECK_FALSE(report.category.has_value());
  REQUIRE(report.detections.has_value());
  CHECK(report.body == "A suspicious finding is located at [0.10, 0.10, 0.30, 0.30].");
}

TEST_CASE("make_preliminary rejects empty memory") {
  Memory memory{"img_c", {}};
  CHECK_THROWS_AS(make_preliminary("img_c", memory), ReportError);
}

TEST_CASE("aggregate_final groups by position with worst-case category") {
  auto a = make_report("img_1", 4, BiRadsCategory::C2);
  auto b = make_report("img_2", 4, BiRadsCategory::C4, Shape::Irregular,
                       Margin::Indistinct, Echo::Hypoechoic);
  auto final_report = aggregate_final("patient_7", {a, b});

  REQUIRE(final_report.sections.size() == 1);
  const auto& section = final_report.sections[0];
  CHECK(section.probe->index() == 4);
  CHECK(section.category == BiRadsCategory::C4);
  CHECK(section.image_ids == std::vector<std::string>{"img_1", "img_2"});
  CHECK(final_report.overall == BiRadsCategory::C4);
}

TEST_CASE("aggregate_final keeps distinct positions separate") {
  auto a = make_report("img_1", 1, BiRadsCategory::C1);  // right nipple
  auto b = make_report("img_2", 9, BiRadsCategory::C3);  // left UOQ
  auto final_report = aggregate_final("p", {a, b});
  REQUIRE(final_report.sections.size() == 2);
  // right side first
  CHECK(final_report.sections[0].probe->index() == 1);
  CHECK(final_report.sections[1].probe->index() == 9);
  CHECK(final_report.overall == BiRadsCategory::C3);
}

TEST_CASE("single report mirrors into a single section") {
  auto a = make_report("only", 2, BiRadsCategory::C2);
  auto final_report = aggregate_final("p", {a});
  REQUIRE(final_report.sections.size() == 1);
  CHECK(final_report.sections[0].image_ids == std::vector<std::string>{"only"});
  CHECK(final_report.overall == BiRadsCategory::C2);
}

TEST_CASE("reports without a probe position land in an unlocalized section") {
  Memory memory{"img_x", {category_obs(BiRadsCategory::C5)}};
  auto unlocalized = make_preliminary("img_x", memory);
  auto localized = make_report("img_y", 0, BiRadsCategory::C1);
  auto final_report = aggregate_final("p", {unlocalized, localized});
  REQUIRE(final_report.sections.size() == 2);
  CHECK(final_report.sections[0].probe.has_value());
  CHECK_FALSE(final_report.sections[1].probe.has_value());  // last
  CHECK(final_report.overall == BiRadsCategory::C5);
}

TEST_CASE("identical lesion sentences are deduplicated") {
  auto a = make_report("img_1", 3, BiRadsCategory::C2);
  auto b = make_report("img_2", 3, BiRadsCategory::C2);
  auto final_report = aggregate_final("p", {a, b});
  const auto& desc = final_report.sections[0].description;
  CHECK(desc.find("It appears") == desc.rfind("It appears"));
}

TEST_CASE("aggregate_final is permutation-invariant") {
  std::vector<PreliminaryReport> reports = {
      make_report("img_1", 4, BiRadsCategory::C2),
      make_report("img_2", 4, BiRadsCategory::C4, Shape::Irregular,
                  Margin::Indistinct, Echo::Hypoechoic),
      make_report("img_3", 9, BiRadsCategory::C3),
      make_report("img_4", 0, BiRadsCategory::C1),
      make_report("img_5", 9, BiRadsCategory::C1, Shape::Irregular,
                  Margin::Microlobulated, Echo::Isoechoic),
  };
  auto baseline = aggregate_final("p", reports);

  std::mt19937 rng(99);
  for (int trial = 0; trial < 20; ++trial) {
    std::shuffle(reports.begin(), reports.end(), rng);
    CHECK(aggregate_final("p", reports) == baseline);
  }
}

TEST_CASE("every image id lands in exactly one section") {
  std::vector<PreliminaryReport> reports;
  for (int i = 0; i < 12; ++i)
    reports.push_back(make_report("img_" + std::to_string(i), i % 5,
                                  BiRadsCategory::C2));
  auto final_report = aggregate_final("p", reports);
  std::vector<std::string> seen;
  for (const auto& section : final_report.sections)
    seen.insert(seen.end(), section.image_ids.begin(),
                section.image_ids.end());
  std::sort(seen.begin(), seen.end());
  CHECK(seen.size() == reports.size());
  CHECK(std::adjacent_find(seen.begin(), seen.end()) == seen.end());
}

TEST_CASE("overall category dominates every section category") {
  std::vector<PreliminaryReport> reports = {
      make_report("a", 1, BiRadsCategory::C3),
      make_report("b", 7, BiRadsCategory::C2),
  };
  auto final_report = aggregate_final("p", reports);
  for (const auto& section : final_report.sections) {
    REQUIRE(section.category.has_value());
    CHECK(static_cast<int>(final_report.overall) >=
          static_cast<int>(*section.category));
  }
}

TEST_CASE("aggregate_final rejects an empty input") {
  CHECK_THROWS_AS(aggregate_final("p", {}), ReportError);
}

TEST_CASE("final report JSON round-trips losslessly") {
  auto final_report = aggregate_final(
      "patient_1", {make_report("img_1", 4, BiRadsCategory::C2),
                    make_report("img_2", 9, BiRadsCategory::C5)});
  final_report.degraded = true;
  final_report.llm_summary = "a summary";

  auto doc = to_json(final_report);
  CHECK(doc["schema_version"] == kReportSchemaVersion);
  auto parsed = final_report_from_json(doc);
  CHECK(parsed == final_report);

  // through text as well
  auto reparsed = final_report_from_json(
      nlohmann::json::parse(render(final_report, "json")));
  CHECK(reparsed == final_report);
}

TEST_CASE("markdown render shows one heading per position") {
  auto final_report = aggregate_final(
      "p", {make_report("img_1", 4, BiRadsCategory::C2),
            make_report("img_2", 9, BiRadsCategory::C3)});
  auto md = render(final_report, "markdown");
  CHECK(md.find("## right LOQ") != std::string::npos);
  CHECK(md.find("## left UOQ") != std::string::npos);
  CHECK(md.find("Overall category: C3") != std::string::npos);
}

TEST_CASE("unknown render format is a config error") {
  auto final_report = aggregate_final("p", {make_report("a", 0, BiRadsCategory::C1)});
  CHECK_THROWS_AS(render(final_report, "xml"), ConfigError);
}

TEST_CASE("LLM summary echoes every preliminary body") {
  std::vector<PreliminaryReport> reports = {
      make_report("img_1", 4, BiRadsCategory::C2),
      make_report("img_2", 9, BiRadsCategory::C3)};
  // scripted client that echoes the request content back
  class Echo : public ChatClient {
   public:
    std::string complete(const std::vector<ChatTurn>& messages) override {
      return messages.back().content;
    }
  } echo;
  auto summary = summarize_final_llm(reports, echo);
  for (const auto& report : reports)
    CHECK(summary.find(report.body) != std::string::npos);
  CHECK(summary.find("summary of the given observations based on a probe "
                     "position") != std::string::npos);
}

TEST_CASE("summary failure leaves the deterministic report intact") {
  std::vector<PreliminaryReport> reports = {
      make_report("img_1", 4, BiRadsCategory::C2)};
  class Down : public ChatClient {
   public:
    std::string complete(const std::vector<ChatTurn>&) override {
      throw BackendUnavailableError("offline");
    }
  } down;
  CHECK_THROWS_AS(summarize_final_llm(reports, down), SummaryUnavailableError);
  CHECK_NOTHROW(aggregate_final("p", reports));
}

TEST_CASE("summary of an empty report list fails before any network call") {
  class Boom : public ChatClient {
   public:
    std::string complete(const std::vector<ChatTurn>&) override {
      FAIL("network call should not happen");
      return "";
    }
  } boom;
  CHECK_THROWS_AS(summarize_final_llm({}, boom), ReportError);
}
