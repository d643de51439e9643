#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "sonochain/domain.hpp"
#include "sonochain/inference.hpp"
#include "sonochain/region_splitter.hpp"

namespace sonochain {

struct EngineConfig {
  std::optional<BackendDescriptor> backend;
  std::string planner = "rule";  // rule | llm
  std::filesystem::path layout_path;
  std::filesystem::path out_dir = ".";
  double benign_threshold = 0.85;
  double malignant_threshold = 0.95;
  double detection_cutoff = 0.5;
  int workers = 4;
  std::string format = "markdown";
  std::string llm_endpoint;
  std::string llm_model;

  // Throws ConfigError on out-of-range values or missing mandatory fields.
  void validate() const;
};

// Key/value config file: "key = value" lines, '#' comments. Keys mirror the
// struct fields (backend, planner, layout, out, benign_threshold,
// malignant_threshold, detection_cutoff, workers, format, llm_endpoint,
// llm_model).
EngineConfig load_config(const std::filesystem::path& path);

// SONOCHAIN_<KEY> environment variables override file values; command-line
// flags override both.
void apply_env_overrides(EngineConfig& config);

struct StudyManifest {
  std::string patient_id;
  std::vector<ImageRecord> images;
};

// JSON: {"patient_id": ..., "images": [{"image_id", "path", "layout_id"}]}.
StudyManifest load_manifest(const std::filesystem::path& path);
StudyManifest parse_manifest_json(const nlohmann::json& doc);

}  // namespace sonochain
