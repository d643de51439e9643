#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sonochain/agent.hpp"
#include "sonochain/config.hpp"
#include "sonochain/reports.hpp"

namespace sonochain {

// The instruction issued per image when the caller does not supply one.
std::string default_study_instruction(const std::string& image_path);

struct ImageOutcome {
  std::string image_id;
  std::optional<PreliminaryReport> report;
  std::string error;  // empty on success

  bool ok() const { return error.empty(); }
};

struct StudyResult {
  FinalReport final_report;
  std::vector<ImageOutcome> outcomes;  // manifest order
};

// Runs the chain for every image with a bounded worker pool, then aggregates.
// Per-image failures degrade the study instead of aborting it; all images
// failing is a ReportError. Output is deterministic regardless of worker
// scheduling. Pass a ChatClient to attach an LLM summary (failure to
// summarize leaves the deterministic report intact).
StudyResult process_study(const StudyManifest& manifest,
                          const EngineConfig& config, Backend& backend,
                          const LayoutConfig& layout,
                          ChatClient* chat = nullptr,
                          const std::string& instruction_template = "");

}  // namespace sonochain
