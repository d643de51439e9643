#pragma once

#include <functional>
#include <map>
#include <string>
#include <variant>
#include <vector>

#include "sonochain/domain.hpp"
#include "sonochain/inference.hpp"

namespace sonochain {

// Planner-visible tool metadata.
struct ToolSpec {
  std::string name;
  std::string description;
  std::string region;       // layout region the tool reads
  std::string template_id;  // observation sentence template
};

struct ToolObservation {
  std::string tool;
  std::variant<ProbePosition, BiRadsCategory, LesionDescription,
               std::vector<BBox>, std::string>
      payload;
  std::string text;  // rendered observation sentence(s)
};

// Everything a tool invocation needs; tools themselves are stateless.
struct ToolContext {
  Backend& backend;
  std::string image_id;
  const std::map<std::string, Raster>& regions;
  double benign_threshold = 0.85;
  double malignant_threshold = 0.95;
  double detection_cutoff = 0.5;
};

// Category refinement: argmax over {benign, malignant, normal}, then
// normal -> C1; benign with p >= benign_threshold -> C2 else C3;
// malignant with p >= malignant_threshold -> C5 else C4.
BiRadsCategory refine_category(const ProbVector& probs,
                               double benign_threshold = 0.85,
                               double malignant_threshold = 0.95);

ToolObservation run_suspicious_description_tool(const ToolContext& ctx);
ToolObservation run_category_tool(const ToolContext& ctx);
ToolObservation run_probe_tool(const ToolContext& ctx);
ToolObservation run_detection_tool(const ToolContext& ctx);
ToolObservation run_ocr_tool(const ToolContext& ctx);

class ToolRegistry {
 public:
  using Runner = std::function<ToolObservation(const ToolContext&)>;

  void add(ToolSpec spec, Runner runner);
  bool contains(const std::string& name) const;
  const ToolSpec& spec(const std::string& name) const;
  ToolObservation run(const std::string& name, const ToolContext& ctx) const;
  std::vector<std::string> names() const;  // registration order

 private:
  struct Entry {
    ToolSpec spec;
    Runner runner;
  };
  std::vector<std::string> order_;
  std::map<std::string, Entry> entries_;
};

// The five standard tools.
ToolRegistry default_registry();

}  // namespace sonochain
