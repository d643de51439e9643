#include <doctest.h>

#include "support.hpp"
#include "sonochain/study.hpp"

using namespace sonochain;
using namespace sonochain::testing;

namespace {

struct StudyFixture {
  TempDir dir;
  LayoutConfig layout = test_layout();
  StudyManifest manifest;
  std::unique_ptr<FixtureBackend> backend;
  EngineConfig config;

  // 3 images: two at right LOQ (C2, C4), one at left UOQ (C3).
  explicit StudyFixture(bool include_broken_image = false) {
    std::vector<FixtureImage> fixtures;
    auto add = [&](const std::string& id, int probe,
                   std::vector<double> category) {
      FixtureImage img;
      img.image_id = id;
      img.probe_index = probe;
      img.category = std::move(category);
      fixtures.push_back(img);

      auto pgm = dir.file(id + ".pgm");
      write_test_pgm(pgm, 64, 64);
      manifest.images.push_back({id, pgm.string(), "test_layout", "p001"});
    };
    manifest.patient_id = "p001";
    add("img_a", 4, {0.90, 0.05, 0.05});  // C2
    add("img_b", 4, {0.05, 0.90, 0.05});  // C4 (malignant below 0.95)
    add("img_c", 9, {0.80, 0.15, 0.05});  // C3
    if (include_broken_image) {
      // manifest entry with no fixture data -> backend lookup fails
      auto pgm = dir.file("img_d.pgm");
      write_test_pgm(pgm, 64, 64);
      manifest.images.push_back({"img_d", pgm.string(), "test_layout", "p001"});
    }
    write_text(dir.file("f.jsonl"), fixture_jsonl(fixtures));
    backend = std::make_unique<FixtureBackend>(dir.file("f.jsonl"));
  }
};

}  // namespace

TEST_CASE("a 3-image study aggregates into per-position sections") {
  StudyFixture f;
  auto result = process_study(f.manifest, f.config, *f.backend, f.layout);

  CHECK_FALSE(result.final_report.degraded);
  REQUIRE(result.final_report.sections.size() == 2);

  const auto& right_loq = result.final_report.sections[0];
  CHECK(right_loq.probe->index() == 4);
  CHECK(right_loq.category == BiRadsCategory::C4);  // worst of C2, C4
  CHECK(right_loq.image_ids == std::vector<std::string>{"img_a", "img_b"});

  const auto& left_uoq = result.final_report.sections[1];
  CHECK(left_uoq.probe->index() == 9);
  CHECK(left_uoq.category == BiRadsCategory::C3);

  CHECK(result.final_report.overall == BiRadsCategory::C4);
}

TEST_CASE("one failing image degrades the study without aborting it") {
  StudyFixture f(/*include_broken_image=*/true);
  auto result = process_study(f.manifest, f.config, *f.backend, f.layout);

  CHECK(result.final_report.degraded);
  REQUIRE(result.outcomes.size() == 4);
  CHECK_FALSE(result.outcomes[3].ok());
  CHECK(result.outcomes[3].error.find("img_d") != std::string::npos);
  CHECK(result.final_report.sections.size() == 2);  // built from the other 3
}

TEST_CASE("all images failing is an error") {
  StudyFixture f;
  // a backend with no entries at all
  TempDir empty_dir;
  write_text(empty_dir.file("empty.jsonl"), "");
  FixtureBackend empty_backend(empty_dir.file("empty.jsonl"));
  CHECK_THROWS_AS(process_study(f.manifest, f.config, empty_backend, f.layout),
                  ReportError);
}

TEST_CASE("an empty manifest is an input error") {
  StudyFixture f;
  StudyManifest empty;
  empty.patient_id = "p";
  CHECK_THROWS_AS(process_study(empty, f.config, *f.backend, f.layout),
                  InputError);
}

TEST_CASE("study output is identical across worker counts") {
  StudyFixture f;
  f.config.workers = 1;
  auto baseline = process_study(f.manifest, f.config, *f.backend, f.layout);
  auto baseline_json = to_json(baseline.final_report).dump();
  for (int workers = 2; workers <= 4; ++workers) {
    f.config.workers = workers;
    auto result = process_study(f.manifest, f.config, *f.backend, f.layout);
    CHECK(to_json(result.final_report).dump() == baseline_json);
  }
}

TEST_CASE("an LLM summary is attached when a chat client is available") {
  StudyFixture f;
  ScriptedChatClient chat({"summary text"});
  auto result =
      process_study(f.manifest, f.config, *f.backend, f.layout, &chat);
  REQUIRE(result.final_report.llm_summary.has_value());
  CHECK(*result.final_report.llm_summary == "summary text");
}

TEST_CASE("summary failure leaves the deterministic report in place") {
  StudyFixture f;
  ScriptedChatClient chat({});  // exhausted transcript -> unavailable
  auto result =
      process_study(f.manifest, f.config, *f.backend, f.layout, &chat);
  CHECK_FALSE(result.final_report.llm_summary.has_value());
  CHECK(result.final_report.sections.size() == 2);
}
