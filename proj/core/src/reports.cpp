#include "sonochain/reports.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <sstream>

namespace sonochain {

namespace {

std::string lesion_sentence(const LesionDescription& lesion) {
  return "It appears " + shape_label(lesion.shape) + " shape, " +
         margin_label(lesion.margin) + " margin and " +
         echo_label(lesion.echo) + " echo.";
}

std::string normalize_whitespace(const std::string& s) {
  std::string out;
  bool in_space = true;  // also trims leading space
  for (char c : s) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      if (!in_space) out += ' ';
      in_space = true;
    } else {
      out += c;
      in_space = false;
    }
  }
  while (!out.empty() && out.back() == ' ') out.pop_back();
  return out;
}

void append_sentence(std::string& body, const std::string& sentence) {
  if (sentence.empty()) return;
  if (!body.empty()) body += " ";
  body += sentence;
}

}  // namespace

PreliminaryReport make_preliminary(const std::string& image_id,
                                   const Memory& memory) {
  if (memory.entries.empty())
    throw ReportError("cannot build preliminary report from empty memory");

  PreliminaryReport report;
  report.image_id = image_id;
  std::string probe_text, category_text, lesion_text, detection_text,
      annotation_text;

  for (const auto& obs : memory.entries) {
    if (auto* probe = std::get_if<ProbePosition>(&obs.payload)) {
      if (!report.probe) {
        report.probe = *probe;
        probe_text = obs.text;
      }
    } else if (auto* category = std::get_if<BiRadsCategory>(&obs.payload)) {
      if (!report.category) {
        report.category = *category;
        category_text = obs.text;
      }
    } else if (auto* lesion = std::get_if<LesionDescription>(&obs.payload)) {
      if (!report.lesion) {
        report.lesion = *lesion;
        lesion_text = obs.text;
      }
    } else if (auto* boxes = std::get_if<std::vector<BBox>>(&obs.payload)) {
      if (!report.detections) {
        report.detections = *boxes;
        detection_text = obs.text;
      }
    } else if (auto* text = std::get_if<std::string>(&obs.payload)) {
      if (!report.annotation) {
        report.annotation = *text;
        annotation_text = obs.text;
      }
    }
  }

  if (!report.probe && !report.category && !report.lesion &&
      !report.detections && !report.annotation)
    throw ReportError("memory carries no structured observation");

  append_sentence(report.body, probe_text);
  append_sentence(report.body, category_text);
  append_sentence(report.body, lesion_text);
  append_sentence(report.body, detection_text);
  append_sentence(report.body, annotation_text);
  return report;
}

FinalReport aggregate_final(const std::string& patient_id,
                            const std::vector<PreliminaryReport>& reports) {
  if (reports.empty())
    throw ReportError("cannot aggregate an empty report list");

  // Key 0..11 = probe index, 12 = unlocalized (kept last).
  std::map<int, std::vector<const PreliminaryReport*>> groups;
  for (const auto& report : reports) {
    int key = report.probe ? report.probe->index() : kProbeClassCount;
    groups[key].push_back(&report);
  }

  FinalReport final_report;
  final_report.patient_id = patient_id;
  std::vector<BiRadsCategory> section_categories;

  for (auto& [key, group] : groups) {
    std::sort(group.begin(), group.end(),
              [](const PreliminaryReport* a, const PreliminaryReport* b) {
                return a->image_id < b->image_id;
              });

    FinalSection section;
    if (key < kProbeClassCount)
      section.probe = ProbePosition::from_index(key);

    std::vector<BiRadsCategory> categories;
    std::vector<std::string> seen_sentences;
    for (const auto* report : group) {
      section.image_ids.push_back(report->image_id);
      if (report->category) categories.push_back(*report->category);
      if (report->lesion) {
        std::string sentence =
            normalize_whitespace(lesion_sentence(*report->lesion));
        if (std::find(seen_sentences.begin(), seen_sentences.end(),
                      sentence) == seen_sentences.end()) {
          seen_sentences.push_back(sentence);
          append_sentence(section.description, sentence);
        }
      }
    }
    if (!categories.empty()) {
      section.category = worst_category(categories);
      section_categories.push_back(*section.category);
    }
    final_report.sections.push_back(std::move(section));
  }

  final_report.overall = section_categories.empty()
                             ? BiRadsCategory::C1
                             : worst_category(section_categories);
  return final_report;
}

std::string summarize_final_llm(const std::vector<PreliminaryReport>& reports,
                                ChatClient& chat) {
  if (reports.empty())
    throw ReportError("cannot summarize an empty report list");

  std::string whole;
  for (const auto& report : reports) {
    if (!whole.empty()) whole += "\n";
    whole += report.body;
  }
  std::vector<ChatTurn> messages = {
      {"user",
       "Please provide a summary of the given observations based on a probe "
       "position: " +
           whole},
  };
  try {
    return chat.complete(messages);
  } catch (const Error& e) {
    throw SummaryUnavailableError(std::string("LLM summary failed: ") +
                                  e.what());
  }
}

std::string render_markdown(const PreliminaryReport& report) {
  std::ostringstream out;
  out << "# Preliminary report: " << report.image_id << "\n\n"
      << report.body << "\n";
  return out.str();
}

std::string render_markdown(const FinalReport& report) {
  std::ostringstream out;
  out << "# Final report: patient " << report.patient_id << "\n\n"
      << "Overall category: " << birads_label(report.overall) << "\n";
  if (report.degraded)
    out << "\n*Note: one or more images could not be analyzed; this report "
           "is incomplete.*\n";
  for (const auto& section : report.sections) {
    out << "\n## "
        << (section.probe ? probe_label(section.probe->index()) : "unlocalized")
        << "\n\n";
    out << "- Category: "
        << (section.category ? birads_label(*section.category) : "(none)")
        << "\n";
    out << "- Description: "
        << (section.description.empty() ? "(none)" : section.description)
        << "\n";
    out << "- Images: ";
    for (std::size_t i = 0; i < section.image_ids.size(); ++i) {
      if (i > 0) out << ", ";
      out << section.image_ids[i];
    }
    out << "\n";
  }
  if (report.llm_summary)
    out << "\n## LLM summary\n\n" << *report.llm_summary << "\n";
  return out.str();
}

nlohmann::json to_json(const FinalReport& report) {
  nlohmann::json sections = nlohmann::json::array();
  for (const auto& section : report.sections) {
    nlohmann::json s;
    if (section.probe) {
      s["probe_index"] = section.probe->index();
      s["probe"] = probe_label(section.probe->index());
    } else {
      s["probe_index"] = nullptr;
      s["probe"] = nullptr;
    }
    s["category"] =
        section.category ? nlohmann::json(birads_label(*section.category))
                         : nlohmann::json(nullptr);
    s["description"] = section.description;
    s["image_ids"] = section.image_ids;
    sections.push_back(std::move(s));
  }
  nlohmann::json doc = {
      {"schema_version", kReportSchemaVersion},
      {"patient_id", report.patient_id},
      {"overall_category", birads_label(report.overall)},
      {"degraded", report.degraded},
      {"sections", std::move(sections)},
  };
  doc["llm_summary"] =
      report.llm_summary ? nlohmann::json(*report.llm_summary)
                         : nlohmann::json(nullptr);
  return doc;
}

FinalReport final_report_from_json(const nlohmann::json& doc) {
  try {
    if (doc.at("schema_version").get<int>() != kReportSchemaVersion)
      throw ParseError("unsupported report schema version");
    FinalReport report;
    report.patient_id = doc.at("patient_id").get<std::string>();
    report.overall = parse_birads(doc.at("overall_category").get<std::string>());
    report.degraded = doc.at("degraded").get<bool>();
    if (!doc.at("llm_summary").is_null())
      report.llm_summary = doc["llm_summary"].get<std::string>();
    for (const auto& s : doc.at("sections")) {
      FinalSection section;
      if (!s.at("probe_index").is_null())
        section.probe = ProbePosition::from_index(s["probe_index"].get<int>());
      if (!s.at("category").is_null())
        section.category = parse_birads(s["category"].get<std::string>());
      section.description = s.at("description").get<std::string>();
      section.image_ids = s.at("image_ids").get<std::vector<std::string>>();
      report.sections.push_back(std::move(section));
    }
    return report;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed final report document: ") +
                     e.what());
  }
}

std::string render(const FinalReport& report, const std::string& format) {
  if (format == "markdown") return render_markdown(report);
  if (format == "json") return to_json(report).dump(2) + "\n";
  throw ConfigError("unknown report format: \"" + format + "\"");
}

}  // namespace sonochain
