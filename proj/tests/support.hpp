#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "sonochain/domain.hpp"
#include "sonochain/region_splitter.hpp"

namespace sonochain::testing {

// Unique scratch directory, removed on destruction.
struct TempDir {
  std::filesystem::path path;
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  std::filesystem::path file(const std::string& name) const {
    return path / name;
  }
};

void write_text(const std::filesystem::path& path, const std::string& content);

// Layout with main, probe_mark, and ocr_strip regions.
LayoutConfig test_layout();
std::string test_layout_json();

Raster test_frame(int width = 100, int height = 100);
void write_test_pgm(const std::filesystem::path& path, int width = 100,
                    int height = 100);

// Backend answers for one fixture image; defaults give
// (right lymph node, C1, irregular/indistinct/hypoechoic).
struct FixtureImage {
  std::string image_id;
  int probe_index = 0;
  std::vector<double> category = {0.1, 0.1, 0.8};
  std::vector<double> shape = {0.9, 0.1};
  std::vector<double> margin = {0.1, 0.8, 0.1};
  std::vector<double> echo = {0.05, 0.05, 0.9};
  std::optional<std::string> ocr_text;
  std::optional<std::vector<BBox>> boxes;
};

std::string fixture_jsonl(const std::vector<FixtureImage>& images);

}  // namespace sonochain::testing
