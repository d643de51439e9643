#include "sonochain/inference.hpp"

#include <algorithm>
#include <fstream>
#include <thread>

#include <httplib.h>

namespace sonochain {

namespace {

std::string strip(std::string_view s) {
  auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string_view::npos) return "";
  auto end = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(begin, end - begin + 1));
}

std::string base64_encode(const std::vector<std::uint8_t>& data) {
  static const char* table =
      "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
  std::string out;
  out.reserve((data.size() + 2) / 3 * 4);
  for (std::size_t i = 0; i < data.size(); i += 3) {
    std::uint32_t chunk = data[i] << 16;
    if (i + 1 < data.size()) chunk |= data[i + 1] << 8;
    if (i + 2 < data.size()) chunk |= data[i + 2];
    out.push_back(table[(chunk >> 18) & 0x3f]);
    out.push_back(table[(chunk >> 12) & 0x3f]);
    out.push_back(i + 1 < data.size() ? table[(chunk >> 6) & 0x3f] : '=');
    out.push_back(i + 2 < data.size() ? table[chunk & 0x3f] : '=');
  }
  return out;
}

std::vector<BBox> parse_boxes(const nlohmann::json& arr) {
  std::vector<BBox> boxes;
  for (const auto& b : arr) {
    BBox box{b.at("x0").get<double>(), b.at("y0").get<double>(),
             b.at("x1").get<double>(), b.at("y1").get<double>(),
             b.at("score").get<double>()};
    validate(box);
    boxes.push_back(box);
  }
  std::stable_sort(boxes.begin(), boxes.end(),
                   [](const BBox& a, const BBox& b) { return a.score > b.score; });
  return boxes;
}

}  // namespace

bool is_classification(TaskId task) {
  switch (task) {
    case TaskId::Shape:
    case TaskId::Margin:
    case TaskId::Echo:
    case TaskId::Category:
    case TaskId::Probe:
      return true;
    default:
      return false;
  }
}

int class_count(TaskId task) {
  switch (task) {
    case TaskId::Shape: return 2;
    case TaskId::Margin: return 3;
    case TaskId::Echo: return 3;
    case TaskId::Category: return 3;
    case TaskId::Probe: return kProbeClassCount;
    default:
      throw DomainError("task has no class count: " + task_name(task));
  }
}

std::string task_name(TaskId task) {
  switch (task) {
    case TaskId::Shape: return "shape";
    case TaskId::Margin: return "margin";
    case TaskId::Echo: return "echo";
    case TaskId::Category: return "category";
    case TaskId::Probe: return "probe";
    case TaskId::Detect: return "detect";
    case TaskId::Ocr: return "ocr";
  }
  throw DomainError("invalid task id");
}

TaskId parse_task(std::string_view name) {
  for (TaskId t : {TaskId::Shape, TaskId::Margin, TaskId::Echo,
                   TaskId::Category, TaskId::Probe, TaskId::Detect,
                   TaskId::Ocr}) {
    if (name == task_name(t)) return t;
  }
  throw ParseError("unknown task: \"" + std::string(name) + "\"");
}

BackendDescriptor BackendDescriptor::parse(std::string_view flag) {
  BackendDescriptor d;
  if (flag.rfind("fixture:", 0) == 0) {
    d.kind = Kind::Fixture;
    d.location = std::string(flag.substr(8));
  } else if (flag.rfind("remote:", 0) == 0) {
    d.kind = Kind::Remote;
    d.location = std::string(flag.substr(7));
  } else {
    throw ConfigError("backend must be fixture:<path> or remote:<url>, got: " +
                      std::string(flag));
  }
  if (d.location.empty())
    throw ConfigError("backend descriptor has empty location");
  return d;
}

// ---------------------------------------------------------------------------
// FixtureBackend
// ---------------------------------------------------------------------------

FixtureBackend::FixtureBackend(const std::filesystem::path& fixture_path) {
  std::ifstream in(fixture_path);
  if (!in)
    throw ConfigError("cannot open fixture file: " + fixture_path.string());
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (strip(line).empty()) continue;
    nlohmann::json obj;
    try {
      obj = nlohmann::json::parse(line);
      Entry entry;
      TaskId task = parse_task(obj.at("task").get<std::string>());
      if (obj.contains("probs")) {
        entry.kind = Entry::Kind::Probs;
        entry.probs = obj["probs"].get<std::vector<double>>();
      } else if (obj.contains("boxes")) {
        entry.kind = Entry::Kind::Boxes;
        entry.boxes = parse_boxes(obj["boxes"]);
      } else if (obj.contains("text")) {
        entry.kind = Entry::Kind::Text;
        entry.text = obj["text"].get<std::string>();
      } else {
        throw ParseError("entry carries none of probs/boxes/text");
      }
      entries_[{obj.at("image_id").get<std::string>(), task}] = std::move(entry);
    } catch (const nlohmann::json::exception& e) {
      throw ParseError("fixture line " + std::to_string(line_no) + ": " +
                       e.what());
    }
  }
}

const FixtureBackend::Entry& FixtureBackend::lookup(const std::string& image_id,
                                                    TaskId task) const {
  auto it = entries_.find({image_id, task});
  if (it == entries_.end())
    throw UnknownImageError("no fixture entry for (" + image_id + ", " +
                            task_name(task) + ")");
  return it->second;
}

ProbVector FixtureBackend::classify(TaskId task, const std::string& image_id,
                                    const Raster&) {
  if (!is_classification(task))
    throw DomainError("classify called with non-classification task " +
                      task_name(task));
  const Entry& entry = lookup(image_id, task);
  if (entry.kind != Entry::Kind::Probs)
    throw ProtocolError("fixture entry for " + task_name(task) +
                        " does not carry probabilities");
  if (entry.probs.size() != static_cast<std::size_t>(class_count(task)))
    throw ProtocolError("fixture probabilities for " + task_name(task) +
                        " have length " + std::to_string(entry.probs.size()) +
                        ", expected " + std::to_string(class_count(task)));
  try {
    return ProbVector(entry.probs);
  } catch (const DomainError& e) {
    throw ProtocolError(std::string("invalid fixture probabilities: ") +
                        e.what());
  }
}

std::vector<BBox> FixtureBackend::detect(const std::string& image_id,
                                         const Raster&) {
  const Entry& entry = lookup(image_id, TaskId::Detect);
  if (entry.kind != Entry::Kind::Boxes)
    throw ProtocolError("fixture entry for detect does not carry boxes");
  return entry.boxes;
}

std::string FixtureBackend::recognize_text(const std::string& image_id,
                                           const Raster&) {
  const Entry& entry = lookup(image_id, TaskId::Ocr);
  if (entry.kind != Entry::Kind::Text)
    throw ProtocolError("fixture entry for ocr does not carry text");
  return strip(entry.text);
}

// ---------------------------------------------------------------------------
// RemoteBackend
// ---------------------------------------------------------------------------

RemoteBackend::RemoteBackend(std::string endpoint,
                             std::chrono::milliseconds timeout)
    : endpoint_(std::move(endpoint)), timeout_(timeout) {
  if (endpoint_.empty()) throw ConfigError("remote backend requires endpoint");
}

nlohmann::json RemoteBackend::post_infer(TaskId task,
                                         const std::string& image_id,
                                         const Raster& region) {
  nlohmann::json body = {
      {"task", task_name(task)},
      {"image_id", image_id},
      {"width", region.width},
      {"height", region.height},
      {"pixels", base64_encode(region.pixels)},
  };
  const std::string payload = body.dump();

  httplib::Client client(endpoint_);
  client.set_connection_timeout(timeout_);
  client.set_read_timeout(timeout_);
  client.set_write_timeout(timeout_);

  httplib::Result res;
  for (int attempt = 0; attempt < 2; ++attempt) {
    if (attempt > 0) std::this_thread::sleep_for(kRetryBackoff);
    res = client.Post("/v1/infer", payload, "application/json");
    if (res && res->status < 500) break;  // 5xx treated as transient
  }
  if (!res)
    throw BackendUnavailableError("backend unreachable or timed out: " +
                                  endpoint_);
  if (res->status >= 500)
    throw BackendUnavailableError("backend error " +
                                  std::to_string(res->status) + " from " +
                                  endpoint_);
  if (res->status != 200)
    throw ProtocolError("unexpected status " + std::to_string(res->status) +
                        " from " + endpoint_);
  try {
    return nlohmann::json::parse(res->body);
  } catch (const nlohmann::json::exception& e) {
    throw ProtocolError(std::string("malformed backend response: ") + e.what());
  }
}

ProbVector RemoteBackend::classify(TaskId task, const std::string& image_id,
                                   const Raster& region) {
  if (!is_classification(task))
    throw DomainError("classify called with non-classification task " +
                      task_name(task));
  nlohmann::json doc = post_infer(task, image_id, region);
  if (!doc.contains("probs") || !doc["probs"].is_array())
    throw ProtocolError("backend response lacks probs array");
  std::vector<double> probs;
  try {
    probs = doc["probs"].get<std::vector<double>>();
  } catch (const nlohmann::json::exception& e) {
    throw ProtocolError(std::string("malformed probs array: ") + e.what());
  }
  if (probs.size() != static_cast<std::size_t>(class_count(task)))
    throw ProtocolError("backend returned " + std::to_string(probs.size()) +
                        " probabilities for " + task_name(task) +
                        ", expected " + std::to_string(class_count(task)));
  try {
    return ProbVector(std::move(probs));
  } catch (const DomainError& e) {
    throw ProtocolError(std::string("invalid backend probabilities: ") +
                        e.what());
  }
}

std::vector<BBox> RemoteBackend::detect(const std::string& image_id,
                                        const Raster& region) {
  nlohmann::json doc = post_infer(TaskId::Detect, image_id, region);
  if (!doc.contains("boxes") || !doc["boxes"].is_array())
    throw ProtocolError("backend response lacks boxes array");
  try {
    return parse_boxes(doc["boxes"]);
  } catch (const nlohmann::json::exception& e) {
    throw ProtocolError(std::string("malformed box entry: ") + e.what());
  } catch (const DomainError& e) {
    throw ProtocolError(std::string("invalid backend box: ") + e.what());
  }
}

std::string RemoteBackend::recognize_text(const std::string& image_id,
                                          const Raster& region) {
  nlohmann::json doc = post_infer(TaskId::Ocr, image_id, region);
  if (!doc.contains("text") || !doc["text"].is_string())
    throw ProtocolError("backend response lacks text field");
  return strip(doc["text"].get<std::string>());
}

std::unique_ptr<Backend> make_backend(const BackendDescriptor& descriptor) {
  if (descriptor.kind == BackendDescriptor::Kind::Fixture)
    return std::make_unique<FixtureBackend>(descriptor.location);
  return std::make_unique<RemoteBackend>(descriptor.location,
                                         descriptor.timeout);
}

}  // namespace sonochain
