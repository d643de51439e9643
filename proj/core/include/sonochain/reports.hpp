#pragma once

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "sonochain/agent.hpp"
#include "sonochain/chat.hpp"
#include "sonochain/domain.hpp"

namespace sonochain {

inline constexpr int kReportSchemaVersion = 1;

// Per-image summary assembled from a chain's Memory.
struct PreliminaryReport {
  std::string image_id;
  std::optional<ProbePosition> probe;
  std::optional<BiRadsCategory> category;
  std::optional<LesionDescription> lesion;
  std::optional<std::vector<BBox>> detections;
  std::optional<std::string> annotation;
  std::string body;
};

// Structured fields are pulled from typed observation payloads; the body is
// the observation sentences reordered canonically (probe, category,
// description, detection, annotation). A memory with no structured payload
// is a ReportError.
PreliminaryReport make_preliminary(const std::string& image_id,
                                   const Memory& memory);

struct FinalSection {
  std::optional<ProbePosition> probe;  // nullopt = unlocalized
  std::optional<BiRadsCategory> category;
  std::string description;
  std::vector<std::string> image_ids;  // sorted, ascending

  bool operator==(const FinalSection&) const = default;
};

struct FinalReport {
  std::string patient_id;
  std::vector<FinalSection> sections;
  BiRadsCategory overall = BiRadsCategory::C1;
  bool degraded = false;
  std::optional<std::string> llm_summary;

  bool operator==(const FinalReport&) const = default;
};

// Groups preliminary reports by probe position (right side first, regions in
// taxonomy order, unlocalized last). Per-section category is the worst over
// the group; descriptions are deduplicated lesion sentences in image-id
// order; overall is the worst over sections.
FinalReport aggregate_final(const std::string& patient_id,
                            const std::vector<PreliminaryReport>& reports);

// Sends the summary instruction with all preliminary bodies attached and
// returns the completion verbatim. Stored alongside, never replacing, the
// deterministic report. Client failure is a SummaryUnavailableError.
std::string summarize_final_llm(const std::vector<PreliminaryReport>& reports,
                                ChatClient& chat);

std::string render_markdown(const PreliminaryReport& report);
std::string render_markdown(const FinalReport& report);

nlohmann::json to_json(const FinalReport& report);
FinalReport final_report_from_json(const nlohmann::json& doc);

// format is "markdown" or "json"; anything else is a ConfigError.
std::string render(const FinalReport& report, const std::string& format);

}  // namespace sonochain
