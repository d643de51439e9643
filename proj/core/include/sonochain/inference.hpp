#pragma once

#include <chrono>
#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "sonochain/domain.hpp"
#include "sonochain/region_splitter.hpp"

namespace sonochain {

enum class TaskId { Shape, Margin, Echo, Category, Probe, Detect, Ocr };

bool is_classification(TaskId task);
// Class count for classification tasks; DomainError otherwise.
int class_count(TaskId task);
std::string task_name(TaskId task);
TaskId parse_task(std::string_view name);

struct BackendDescriptor {
  enum class Kind { Fixture, Remote };
  Kind kind = Kind::Fixture;
  std::string location;  // fixture path or endpoint URL
  std::chrono::milliseconds timeout{10000};

  // Accepts "fixture:<path>" or "remote:<url>".
  static BackendDescriptor parse(std::string_view flag);
};

// Answers classification, detection, and text-recognition queries for image
// regions. Implementations must be safe for concurrent requests. Every value
// returned is validated against domain invariants before use.
class Backend {
 public:
  virtual ~Backend() = default;

  virtual ProbVector classify(TaskId task, const std::string& image_id,
                              const Raster& region) = 0;
  // Boxes sorted by descending score.
  virtual std::vector<BBox> detect(const std::string& image_id,
                                   const Raster& region) = 0;
  // Stripped of leading/trailing whitespace.
  virtual std::string recognize_text(const std::string& image_id,
                                     const Raster& region) = 0;
};

// Deterministic lookup-table backend: JSON Lines, one object per
// (image_id, task). Read-only after load.
class FixtureBackend : public Backend {
 public:
  explicit FixtureBackend(const std::filesystem::path& fixture_path);

  ProbVector classify(TaskId task, const std::string& image_id,
                      const Raster& region) override;
  std::vector<BBox> detect(const std::string& image_id,
                           const Raster& region) override;
  std::string recognize_text(const std::string& image_id,
                             const Raster& region) override;

 private:
  struct Entry {
    std::vector<double> probs;
    std::vector<BBox> boxes;
    std::string text;
    enum class Kind { Probs, Boxes, Text } kind;
  };
  const Entry& lookup(const std::string& image_id, TaskId task) const;

  std::map<std::pair<std::string, TaskId>, Entry> entries_;
};

// HTTP client for the POST /v1/infer protocol. One automatic retry on
// transient failure, then BackendUnavailable; never blocks past the
// configured timeout per attempt.
class RemoteBackend : public Backend {
 public:
  RemoteBackend(std::string endpoint,
                std::chrono::milliseconds timeout = std::chrono::seconds(10));

  ProbVector classify(TaskId task, const std::string& image_id,
                      const Raster& region) override;
  std::vector<BBox> detect(const std::string& image_id,
                           const Raster& region) override;
  std::string recognize_text(const std::string& image_id,
                             const Raster& region) override;

  static constexpr std::chrono::milliseconds kRetryBackoff{500};

 private:
  nlohmann::json post_infer(TaskId task, const std::string& image_id,
                            const Raster& region);

  std::string endpoint_;
  std::chrono::milliseconds timeout_;
};

std::unique_ptr<Backend> make_backend(const BackendDescriptor& descriptor);

}  // namespace sonochain
