#include "support.hpp"

#include <atomic>
#include <fstream>
#include <random>

#include <nlohmann/json.hpp>

#include "sonochain/pgm.hpp"

namespace sonochain::testing {

namespace fs = std::filesystem;

TempDir::TempDir() {
  static std::atomic<unsigned> counter{0};
  std::random_device rd;
  path = fs::temp_directory_path() /
         ("sonochain_test_" + std::to_string(rd()) + "_" +
          std::to_string(counter.fetch_add(1)));
  fs::create_directories(path);
}

TempDir::~TempDir() {
  std::error_code ec;
  fs::remove_all(path, ec);
}

void write_text(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
}

LayoutConfig test_layout() {
  LayoutConfig layout;
  layout.layout_id = "test_layout";
  layout.regions["main"] = {0.0, 0.0, 0.75, 1.0};
  layout.regions["probe_mark"] = {0.8, 0.05, 0.98, 0.3};
  layout.regions["ocr_strip"] = {0.8, 0.7, 1.0, 0.95};
  return layout;
}

std::string test_layout_json() {
  nlohmann::json doc = {
      {"layout_id", "test_layout"},
      {"regions",
       {{"main", {0.0, 0.0, 0.75, 1.0}},
        {"probe_mark", {0.8, 0.05, 0.98, 0.3}},
        {"ocr_strip", {0.8, 0.7, 1.0, 0.95}}}},
  };
  return doc.dump();
}

Raster test_frame(int width, int height) {
  std::vector<std::uint8_t> pixels(static_cast<std::size_t>(width) * height);
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x)
      pixels[static_cast<std::size_t>(y) * width + x] =
          static_cast<std::uint8_t>((x * 7 + y * 13) % 256);
  return Raster{width, height, std::move(pixels)};
}

void write_test_pgm(const fs::path& path, int width, int height) {
  save_pgm(test_frame(width, height), path);
}

std::string fixture_jsonl(const std::vector<FixtureImage>& images) {
  std::string out;
  for (const auto& img : images) {
    std::vector<double> probe(kProbeClassCount, 0.0);
    probe[img.probe_index] = 1.0;
    auto line = [&](const std::string& task, nlohmann::json payload_key,
                    nlohmann::json payload) {
      nlohmann::json obj = {{"image_id", img.image_id}, {"task", task}};
      obj[payload_key.get<std::string>()] = std::move(payload);
      out += obj.dump() + "\n";
    };
    line("probe", "probs", probe);
    line("category", "probs", img.category);
    line("shape", "probs", img.shape);
    line("margin", "probs", img.margin);
    line("echo", "probs", img.echo);
    if (img.ocr_text) line("ocr", "text", *img.ocr_text);
    if (img.boxes) {
      nlohmann::json boxes = nlohmann::json::array();
      for (const auto& b : *img.boxes)
        boxes.push_back({{"x0", b.x0},
                         {"y0", b.y0},
                         {"x1", b.x1},
                         {"y1", b.y1},
                         {"score", b.score}});
      line("detect", "boxes", boxes);
    }
  }
  return out;
}

}  // namespace sonochain::testing
