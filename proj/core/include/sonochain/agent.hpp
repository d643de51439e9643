#pragma once

#include <functional>
#include <string>
#include <vector>

#include "sonochain/chat.hpp"
#include "sonochain/domain.hpp"
#include "sonochain/region_splitter.hpp"
#include "sonochain/tools.hpp"

namespace sonochain {

struct Instruction {
  std::string text;
  std::string image_ref;
};

// Extracts the "{image path}" slot from an instruction sentence, when present.
Instruction parse_instruction(std::string text);

struct PlanStep {
  std::string tool;
  std::string image_ref;
};

// Per-chain observation log; append-only while a chain runs.
struct Memory {
  std::string session_id;
  std::vector<ToolObservation> entries;
};

// Deterministic keyword dispatch: instruction phrases are matched against a
// fixed keyword table and ordered by phrase position. No match is a PlanError
// listing the candidate tools.
std::vector<PlanStep> plan_rule(const Instruction& instruction,
                                const ToolRegistry& registry);

// Drives tool execution for one chain. The executor callback runs one named
// tool and returns its rendered observation text.
class Planner {
 public:
  using Execute = std::function<std::string(const std::string& tool)>;

  virtual ~Planner() = default;
  virtual void run(const Instruction& instruction, const ToolRegistry& registry,
                   const Execute& execute) = 0;
};

class RulePlanner : public Planner {
 public:
  void run(const Instruction& instruction, const ToolRegistry& registry,
           const Execute& execute) override;
};

// ReAct-style loop over a chat client. Assistant output is parsed as
// "Action: <tool>" / "Action Input: <input>" lines; the loop ends on
// "Final Answer:". One reprompt with a format reminder is allowed per chain
// for malformed output or an unknown tool name, then PlanError.
class ReactPlanner : public Planner {
 public:
  explicit ReactPlanner(ChatClient& chat, int max_turns = 16);

  void run(const Instruction& instruction, const ToolRegistry& registry,
           const Execute& execute) override;

 private:
  ChatClient& chat_;
  int max_turns_;
};

// System prompt listing tool names, descriptions, and the Action grammar.
std::string react_system_prompt(const ToolRegistry& registry);

enum class ChainStatus { Ok, PlanFailed, ToolFailed, Overrun };

std::string chain_status_name(ChainStatus status);

struct ChainOptions {
  int max_iterations = 8;
  double benign_threshold = 0.85;
  double malignant_threshold = 0.95;
  double detection_cutoff = 0.5;
};

// A chain never loses work: on failure the partial Memory and the error are
// both preserved in the result.
struct ChainResult {
  Memory memory;
  std::string summary;  // ordered concatenation of observation texts
  ChainStatus status = ChainStatus::Ok;
  std::string error;
  std::exception_ptr cause;  // set when status != Ok

  bool ok() const { return status == ChainStatus::Ok; }
};

// Splits the frame once, executes planned tools in order, appends every
// observation to Memory, and renders the observation summary.
ChainResult execute_chain(const Instruction& instruction,
                          const std::string& image_id, const Raster& frame,
                          Planner& planner, const ToolRegistry& registry,
                          Backend& backend, const LayoutConfig& layout,
                          const ChainOptions& options = {});

// Convenience overload loading the frame from record.raster_ref (PGM).
ChainResult execute_chain(const Instruction& instruction,
                          const ImageRecord& record, Planner& planner,
                          const ToolRegistry& registry, Backend& backend,
                          const LayoutConfig& layout,
                          const ChainOptions& options = {});

}  // namespace sonochain
