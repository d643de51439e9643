#include "sonochain/study.hpp"

#include <atomic>
#include <thread>

namespace sonochain {

std::string default_study_instruction(const std::string& image_path) {
  return "Give me a probe information for the given image: " + image_path +
         ". Then, provide a category of image and description of it.";
}

StudyResult process_study(const StudyManifest& manifest,
                          const EngineConfig& config, Backend& backend,
                          const LayoutConfig& layout, ChatClient* chat,
                          const std::string& instruction_template) {
  if (manifest.images.empty())
    throw InputError("study manifest contains no images");

  ChainOptions options;
  options.benign_threshold = config.benign_threshold;
  options.malignant_threshold = config.malignant_threshold;
  options.detection_cutoff = config.detection_cutoff;

  StudyResult result;
  result.outcomes.resize(manifest.images.size());

  // llm planning shares one chat transcript budget per image; each worker
  // builds its own planner so chains never share state.
  auto process_one = [&](std::size_t i) {
    const ImageRecord& record = manifest.images[i];
    ImageOutcome& outcome = result.outcomes[i];
    outcome.image_id = record.image_id;
    try {
      Instruction instruction{instruction_template.empty()
                                  ? default_study_instruction(record.raster_ref)
                                  : instruction_template,
                              record.raster_ref};
      std::unique_ptr<Planner> planner;
      if (config.planner == "llm" && chat != nullptr)
        planner = std::make_unique<ReactPlanner>(*chat);
      else
        planner = std::make_unique<RulePlanner>();

      ChainResult chain = execute_chain(instruction, record, *planner,
                                        default_registry(), backend, layout,
                                        options);
      if (!chain.ok())
        throw ChainError(chain_status_name(chain.status) + ": " + chain.error);
      outcome.report = make_preliminary(record.image_id, chain.memory);
    } catch (const Error& e) {
      outcome.error = e.what();
    }
  };

  const std::size_t n = manifest.images.size();
  const int workers =
      std::max(1, std::min<int>(config.workers, static_cast<int>(n)));
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) process_one(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1))
          process_one(i);
      });
    }
    for (auto& t : pool) t.join();
  }

  std::vector<PreliminaryReport> reports;
  bool any_failed = false;
  for (const auto& outcome : result.outcomes) {
    if (outcome.ok())
      reports.push_back(*outcome.report);
    else
      any_failed = true;
  }
  if (reports.empty())
    throw ReportError("every image in the study failed");

  result.final_report = aggregate_final(manifest.patient_id, reports);
  result.final_report.degraded = any_failed;

  if (chat != nullptr) {
    try {
      result.final_report.llm_summary = summarize_final_llm(reports, *chat);
    } catch (const SummaryUnavailableError&) {
      // deterministic report stands on its own
    }
  }
  return result;
}

}  // namespace sonochain
