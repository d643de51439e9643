#include "sonochain/config.hpp"

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <set>

namespace sonochain {

namespace {

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

void apply_key(EngineConfig& config, const std::string& key,
               const std::string& value) {
  try {
    if (key == "backend") {
      config.backend = BackendDescriptor::parse(value);
    } else if (key == "planner") {
      config.planner = value;
    } else if (key == "layout") {
      config.layout_path = value;
    } else if (key == "out") {
      config.out_dir = value;
    } else if (key == "benign_threshold") {
      config.benign_threshold = std::stod(value);
    } else if (key == "malignant_threshold") {
      config.malignant_threshold = std::stod(value);
    } else if (key == "detection_cutoff") {
      config.detection_cutoff = std::stod(value);
    } else if (key == "workers") {
      config.workers = std::stoi(value);
    } else if (key == "format") {
      config.format = value;
    } else if (key == "llm_endpoint") {
      config.llm_endpoint = value;
    } else if (key == "llm_model") {
      config.llm_model = value;
    } else {
      throw ConfigError("unknown config key: " + key);
    }
  } catch (const std::invalid_argument&) {
    throw ConfigError("config key " + key + " has non-numeric value \"" +
                      value + "\"");
  }
}

}  // namespace

void EngineConfig::validate() const {
  if (planner != "rule" && planner != "llm")
    throw ConfigError("planner must be \"rule\" or \"llm\", got \"" + planner +
                      "\"");
  for (auto [name, v] : {std::pair{"benign_threshold", benign_threshold},
                         {"malignant_threshold", malignant_threshold}}) {
    if (!(v > 0.0 && v < 1.0))
      throw ConfigError(std::string(name) + " must be in (0,1)");
  }
  if (!(detection_cutoff >= 0.0 && detection_cutoff <= 1.0))
    throw ConfigError("detection_cutoff must be in [0,1]");
  if (workers < 1) throw ConfigError("workers must be >= 1");
  if (format != "markdown" && format != "json")
    throw ConfigError("format must be \"markdown\" or \"json\"");
  if (planner == "llm" && llm_endpoint.empty())
    throw ConfigError("planner=llm requires llm_endpoint");
}

EngineConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path.string());
  EngineConfig config;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(path.string() + ":" + std::to_string(line_no) +
                        ": expected key = value");
    apply_key(config, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return config;
}

void apply_env_overrides(EngineConfig& config) {
  static const char* keys[] = {
      "backend",          "planner",           "layout",
      "out",              "benign_threshold",  "malignant_threshold",
      "detection_cutoff", "workers",           "format",
      "llm_endpoint",     "llm_model"};
  for (const char* key : keys) {
    std::string env_name = "SONOCHAIN_";
    for (const char* p = key; *p; ++p)
      env_name += static_cast<char>(std::toupper(*p));
    if (const char* value = std::getenv(env_name.c_str()))
      apply_key(config, key, value);
  }
}

StudyManifest parse_manifest_json(const nlohmann::json& doc) {
  StudyManifest manifest;
  try {
    manifest.patient_id = doc.at("patient_id").get<std::string>();
    std::set<std::string> seen;
    for (const auto& img : doc.at("images")) {
      ImageRecord record;
      record.image_id = img.at("image_id").get<std::string>();
      record.raster_ref = img.at("path").get<std::string>();
      record.layout_id = img.value("layout_id", "");
      record.patient_id = manifest.patient_id;
      if (!seen.insert(record.image_id).second)
        throw ParseError("duplicate image_id in manifest: " + record.image_id);
      manifest.images.push_back(std::move(record));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed study manifest: ") + e.what());
  }
  return manifest;
}

StudyManifest load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open manifest: " + path.string());
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("manifest " + path.string() + ": " + e.what());
  }
  return parse_manifest_json(doc);
}

}  // namespace sonochain
