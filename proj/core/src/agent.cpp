#include "sonochain/agent.hpp"

#include <algorithm>
#include <cctype>
#include <regex>
#include <sstream>

#include "sonochain/pgm.hpp"

namespace sonochain {

namespace {

std::string to_lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return out;
}

std::string trim(std::string_view s) {
  auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string_view::npos) return "";
  auto end = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(begin, end - begin + 1));
}

// Keyword dispatch table for the rule planner.
const std::vector<std::pair<std::string, std::string>> kKeywordTable = {
    {"probe", "probe_tool"},
    {"category", "category_tool"},
    {"description", "suspicious_description_tool"},
    {"describe", "suspicious_description_tool"},
    {"suspicious thing", "detection_tool"},
    {"detect", "detection_tool"},
    {"annotation", "ocr_tool"},
    {"text", "ocr_tool"},
};

}  // namespace

Instruction parse_instruction(std::string text) {
  static const std::regex path_re(
      R"(([A-Za-z0-9_\-./\\]+\.(png|jpg|jpeg|pgm|pnm|bmp|tif|tiff)))",
      std::regex::icase);
  Instruction instruction{std::move(text), ""};
  std::smatch m;
  if (std::regex_search(instruction.text, m, path_re))
    instruction.image_ref = m[1].str();
  return instruction;
}

std::vector<PlanStep> plan_rule(const Instruction& instruction,
                                const ToolRegistry& registry) {
  if (registry.names().empty()) throw PlanError("tool registry is empty");
  if (instruction.text.empty()) throw PlanError("empty instruction");

  const std::string haystack = to_lower(instruction.text);
  std::map<std::string, std::size_t> first_hit;  // tool -> earliest position
  for (const auto& [keyword, tool] : kKeywordTable) {
    if (!registry.contains(tool)) continue;
    auto pos = haystack.find(keyword);
    if (pos == std::string::npos) continue;
    auto it = first_hit.find(tool);
    if (it == first_hit.end() || pos < it->second) first_hit[tool] = pos;
  }
  if (first_hit.empty()) {
    std::string candidates;
    for (const auto& name : registry.names()) {
      if (!candidates.empty()) candidates += ", ";
      candidates += name;
    }
    throw PlanError("no tool matches instruction; candidates: " + candidates);
  }

  std::vector<std::pair<std::size_t, std::string>> ordered;
  for (const auto& [tool, pos] : first_hit) ordered.emplace_back(pos, tool);
  std::sort(ordered.begin(), ordered.end());

  std::vector<PlanStep> steps;
  for (const auto& [pos, tool] : ordered)
    steps.push_back({tool, instruction.image_ref});
  return steps;
}

void RulePlanner::run(const Instruction& instruction,
                      const ToolRegistry& registry, const Execute& execute) {
  for (const auto& step : plan_rule(instruction, registry))
    execute(step.tool);
}

std::string react_system_prompt(const ToolRegistry& registry) {
  std::ostringstream prompt;
  prompt << "You analyze breast ultrasound images using the tools below.\n"
         << "Tools:\n";
  for (const auto& name : registry.names())
    prompt << "- " << name << ": " << registry.spec(name).description << "\n";
  prompt << "\nTo use a tool, reply with exactly:\n"
         << "Action: <tool name>\n"
         << "Action Input: <image path>\n"
         << "After each action you receive an Observation. When every "
            "requested piece of information has been gathered, reply with:\n"
         << "Final Answer: <summary of the observations>\n";
  return prompt.str();
}

ReactPlanner::ReactPlanner(ChatClient& chat, int max_turns)
    : chat_(chat), max_turns_(max_turns) {}

void ReactPlanner::run(const Instruction& instruction,
                       const ToolRegistry& registry, const Execute& execute) {
  std::vector<ChatTurn> messages = {
      {"system", react_system_prompt(registry)},
      {"user", instruction.text},
  };
  int retries_left = 1;

  for (int turn = 0; turn < max_turns_; ++turn) {
    const std::string content = chat_.complete(messages);
    messages.push_back({"assistant", content});

    std::string action;
    bool final_answer = false;
    std::istringstream lines(content);
    for (std::string line; std::getline(lines, line);) {
      line = trim(line);
      if (line.rfind("Final Answer:", 0) == 0) {
        final_answer = true;
        break;
      }
      if (line.rfind("Action:", 0) == 0 && action.empty())
        action = trim(line.substr(7));
    }
    if (final_answer) return;

    if (action.empty() || !registry.contains(action)) {
      std::string complaint =
          action.empty()
              ? "Your reply did not contain an Action line."
              : "Unknown tool \"" + action + "\".";
      if (retries_left-- > 0) {
        messages.push_back(
            {"user", complaint +
                         " Reply with \"Action: <tool name>\" and \"Action "
                         "Input: <image path>\", or \"Final Answer: ...\"."});
        continue;
      }
      throw PlanError("planner output unusable after retry: " + complaint);
    }

    const std::string observation = execute(action);
    messages.push_back({"user", "Observation: " + observation});
  }
  throw ChainOverrunError("planner turn budget exhausted");
}

std::string chain_status_name(ChainStatus status) {
  switch (status) {
    case ChainStatus::Ok: return "ok";
    case ChainStatus::PlanFailed: return "plan_failed";
    case ChainStatus::ToolFailed: return "tool_failed";
    case ChainStatus::Overrun: return "overrun";
  }
  return "unknown";
}

ChainResult execute_chain(const Instruction& instruction,
                          const std::string& image_id, const Raster& frame,
                          Planner& planner, const ToolRegistry& registry,
                          Backend& backend, const LayoutConfig& layout,
                          const ChainOptions& options) {
  const auto regions = split(frame, layout);
  ToolContext ctx{backend,
                  image_id,
                  regions,
                  options.benign_threshold,
                  options.malignant_threshold,
                  options.detection_cutoff};

  ChainResult result;
  result.memory.session_id = image_id;

  int executed = 0;
  Planner::Execute execute = [&](const std::string& tool) -> std::string {
    if (executed >= options.max_iterations)
      throw ChainOverrunError("chain exceeded " +
                              std::to_string(options.max_iterations) +
                              " iterations");
    ToolObservation obs = registry.run(tool, ctx);
    ++executed;
    result.memory.entries.push_back(obs);
    return result.memory.entries.back().text;
  };

  try {
    planner.run(instruction, registry, execute);
    if (result.memory.entries.empty())
      throw PlanError("planner produced an empty plan");
    result.status = ChainStatus::Ok;
  } catch (const PlanError& e) {
    result.status = ChainStatus::PlanFailed;
    result.error = e.what();
    result.cause = std::current_exception();
  } catch (const ChainOverrunError& e) {
    result.status = ChainStatus::Overrun;
    result.error = e.what();
    result.cause = std::current_exception();
  } catch (const Error& e) {
    result.status = ChainStatus::ToolFailed;
    result.error = e.what();
    result.cause = std::current_exception();
  }

  for (const auto& obs : result.memory.entries) {
    if (!result.summary.empty()) result.summary += " ";
    result.summary += obs.text;
  }
  return result;
}

ChainResult execute_chain(const Instruction& instruction,
                          const ImageRecord& record, Planner& planner,
                          const ToolRegistry& registry, Backend& backend,
                          const LayoutConfig& layout,
                          const ChainOptions& options) {
  Raster frame = load_pgm(record.raster_ref);
  return execute_chain(instruction, record.image_id, frame, planner, registry,
                       backend, layout, options);
}

}  // namespace sonochain
