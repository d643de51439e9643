// sonochain — breast ultrasound report pipeline CLI.
//
// Subcommands: report-image, report-study, eval, tools-list.
// Exit codes: 0 success, 2 input error, 3 config error, 4 backend error,
// 5 chain error.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "sonochain/agent.hpp"
#include "sonochain/config.hpp"
#include "sonochain/metrics.hpp"
#include "sonochain/pgm.hpp"
#include "sonochain/reports.hpp"
#include "sonochain/study.hpp"

namespace fs = std::filesystem;
using namespace sonochain;

namespace {

struct CliFlags {
  std::string config_path;
  std::string backend;
  std::string planner;
  std::string layout;
  std::string out;
  int workers = -1;
  std::string format;
};

EngineConfig resolve_config(const CliFlags& flags) {
  EngineConfig config;
  if (!flags.config_path.empty()) config = load_config(flags.config_path);
  apply_env_overrides(config);
  // Flags win over both file and environment.
  if (!flags.backend.empty())
    config.backend = BackendDescriptor::parse(flags.backend);
  if (!flags.planner.empty()) config.planner = flags.planner;
  if (!flags.layout.empty()) config.layout_path = flags.layout;
  if (!flags.out.empty()) config.out_dir = flags.out;
  if (flags.workers > 0) config.workers = flags.workers;
  if (!flags.format.empty()) config.format = flags.format;
  config.validate();
  return config;
}

LayoutConfig require_layout(const EngineConfig& config) {
  if (config.layout_path.empty())
    throw ConfigError("a layout file is required (--layout)");
  LayoutConfig layout = load_layout(config.layout_path);
  auto violations = validate_layout(layout);
  if (!violations.empty())
    throw ConfigError("invalid layout: " + violations.front());
  return layout;
}

std::unique_ptr<Backend> require_backend(const EngineConfig& config) {
  if (!config.backend)
    throw ConfigError("a backend is required (--backend fixture:<path> | "
                      "remote:<url>)");
  return make_backend(*config.backend);
}

void write_file(const fs::path& path, const std::string& content) {
  fs::create_directories(path.parent_path().empty() ? "." : path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write output file: " + path.string());
  out << content;
}

ChainOptions chain_options(const EngineConfig& config) {
  ChainOptions options;
  options.benign_threshold = config.benign_threshold;
  options.malignant_threshold = config.malignant_threshold;
  options.detection_cutoff = config.detection_cutoff;
  return options;
}

int run_report_image(const CliFlags& flags, const std::string& image_path,
                     const std::string& instruction_text) {
  EngineConfig config = resolve_config(flags);
  LayoutConfig layout = require_layout(config);
  auto backend = require_backend(config);

  std::unique_ptr<ChatClient> chat;
  std::unique_ptr<Planner> planner;
  if (config.planner == "llm") {
    chat = std::make_unique<HttpChatClient>(config.llm_endpoint,
                                            config.llm_model);
    planner = std::make_unique<ReactPlanner>(*chat);
  } else {
    planner = std::make_unique<RulePlanner>();
  }

  const std::string image_id = fs::path(image_path).stem().string();
  ImageRecord record{image_id, image_path, layout.layout_id, ""};
  Instruction instruction{instruction_text.empty()
                              ? default_study_instruction(image_path)
                              : instruction_text,
                          image_path};

  ChainResult chain = execute_chain(instruction, record, *planner,
                                    default_registry(), *backend, layout,
                                    chain_options(config));
  if (!chain.ok()) std::rethrow_exception(chain.cause);

  PreliminaryReport report = make_preliminary(image_id, chain.memory);
  fs::path out_path = config.out_dir / fs::path(image_id + ".prelim.md");
  write_file(out_path, render_markdown(report));
  std::cout << "wrote " << out_path.string() << "\n";
  return 0;
}

int run_report_study(const CliFlags& flags, const std::string& manifest_path) {
  EngineConfig config = resolve_config(flags);
  LayoutConfig layout = require_layout(config);
  auto backend = require_backend(config);
  StudyManifest manifest = load_manifest(manifest_path);

  std::unique_ptr<ChatClient> chat;
  if (!config.llm_endpoint.empty())
    chat = std::make_unique<HttpChatClient>(config.llm_endpoint,
                                            config.llm_model);

  StudyResult result =
      process_study(manifest, config, *backend, layout, chat.get());

  for (const auto& outcome : result.outcomes) {
    if (outcome.ok()) {
      write_file(config.out_dir / fs::path(outcome.image_id + ".prelim.md"),
                 render_markdown(*outcome.report));
    } else {
      std::cerr << "image " << outcome.image_id << " failed: " << outcome.error
                << "\n";
    }
  }
  fs::path md_path =
      config.out_dir / fs::path(manifest.patient_id + ".final.md");
  fs::path json_path =
      config.out_dir / fs::path(manifest.patient_id + ".final.json");
  write_file(md_path, render_markdown(result.final_report));
  write_file(json_path, to_json(result.final_report).dump(2) + "\n");
  std::cout << "wrote " << md_path.string() << " and " << json_path.string()
            << (result.final_report.degraded ? " (degraded)" : "") << "\n";
  return 0;
}

int run_eval(const CliFlags& flags, const std::string& records_path,
             const std::string& task_str) {
  EngineConfig config = resolve_config(flags);
  const fs::path out_dir = config.out_dir;
  nlohmann::json doc;
  std::string table;

  if (task_str == "clinical") {
    auto scores = load_clinical_scores(records_path);
    double mean = clinical_mean(scores);
    doc = {{"task", "clinical"},
           {"count", scores.size()},
           {"mean", mean},
           {"mean_2dp", format_score(mean)}};
    table = "clinical mean over " + std::to_string(scores.size()) +
            " scores: " + format_score(mean) + "\n";
  } else if (task_str == "detect") {
    auto records = load_detection_records(records_path);
    double mean = mean_iou(records);
    doc = {{"task", "detect"},
           {"count", records.size()},
           {"mean_iou", mean},
           {"protocol", "mean IoU of matched truth/prediction pairs"}};
    table = "mean IoU over " + std::to_string(records.size()) +
            " pairs: " + format_score(mean) + "\n";
  } else {
    TaskId task = parse_task(task_str);
    auto records = load_eval_records(records_path);
    for (const auto& r : records) {
      if (r.task != task)
        throw EvalError("record for " + task_name(r.task) +
                        " does not match requested task " + task_str);
    }
    ConfusionMatrix cm = confusion(records);
    ClassificationMetrics metrics = classification_metrics(cm);
    doc = metrics_to_json(cm, metrics);
    doc["task"] = task_str;
    table = metrics_table(cm, metrics);
  }

  write_file(out_dir / "metrics.json", doc.dump(2) + "\n");
  write_file(out_dir / "metrics.txt", table);
  std::cout << table;
  return 0;
}

int run_tools_list() {
  ToolRegistry registry = default_registry();
  for (const auto& name : registry.names()) {
    const ToolSpec& spec = registry.spec(name);
    std::cout << name << "\t[" << spec.region << "]\t" << spec.description
              << "\n";
  }
  return 0;
}

int error_exit(const char* kind, const std::string& message, int code) {
  nlohmann::json err = {{"error", kind}, {"message", message}};
  std::cerr << err.dump() << "\n";
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Breast ultrasound report pipeline"};
  app.require_subcommand(1);

  CliFlags flags;
  app.add_option("--config", flags.config_path, "Config file (key = value)");
  app.add_option("--backend", flags.backend,
                 "Backend: fixture:<path> or remote:<url>");
  app.add_option("--planner", flags.planner, "Planner: rule or llm");
  app.add_option("--layout", flags.layout, "Layout JSON file");
  app.add_option("--out", flags.out, "Output directory");
  app.add_option("--workers", flags.workers, "Study worker pool size");
  app.add_option("--format", flags.format, "Report format: markdown or json");

  std::string image_path, instruction, manifest_path, records_path, task;

  auto* report_image =
      app.add_subcommand("report-image", "Generate a preliminary report");
  report_image->add_option("image", image_path, "Image file (PGM)")->required();
  report_image->add_option("--instruction", instruction,
                           "Instruction text for the planner");

  auto* report_study =
      app.add_subcommand("report-study", "Generate a study final report");
  report_study->add_option("manifest", manifest_path, "Study manifest JSON")
      ->required();

  auto* eval = app.add_subcommand("eval", "Evaluate records against truth");
  eval->add_option("records", records_path, "Records file (CSV or JSONL)")
      ->required();
  eval->add_option("--task", task,
                   "shape|margin|echo|category|probe|detect|clinical")
      ->required();

  auto* tools_list = app.add_subcommand("tools-list", "List registered tools");

  CLI11_PARSE(app, argc, argv);

  try {
    if (report_image->parsed())
      return run_report_image(flags, image_path, instruction);
    if (report_study->parsed()) return run_report_study(flags, manifest_path);
    if (eval->parsed()) return run_eval(flags, records_path, task);
    if (tools_list->parsed()) return run_tools_list();
    return 1;
  } catch (const ConfigError& e) {
    return error_exit("config", e.what(), 3);
  } catch (const BackendError& e) {
    return error_exit("backend", e.what(), 4);
  } catch (const ChainError& e) {
    return error_exit("chain", e.what(), 5);
  } catch (const InputError& e) {
    return error_exit("input", e.what(), 2);
  } catch (const Error& e) {
    return error_exit("internal", e.what(), 1);
  } catch (const std::exception& e) {
    return error_exit("internal", e.what(), 1);
  }
}
