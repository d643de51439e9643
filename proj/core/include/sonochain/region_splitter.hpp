#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "sonochain/errors.hpp"

namespace sonochain {

// Normalized rectangle, coordinates in [0,1].
struct Rect {
  double x0 = 0, y0 = 0, x1 = 0, y1 = 0;

  bool operator==(const Rect&) const = default;
};

// Rule-based frame layout: named regions cut out of a full scanner frame.
// "main" and "probe_mark" are mandatory, "ocr_strip" is optional.
struct LayoutConfig {
  std::string layout_id;
  std::map<std::string, Rect> regions;
};

// Single-channel raster, row-major.
struct Raster {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;

  std::uint8_t at(int x, int y) const { return pixels[y * width + x]; }

  bool operator==(const Raster&) const = default;
};

Raster make_raster(int width, int height,
                   std::vector<std::uint8_t> pixels = {});

// Returns every invariant violation; empty means the layout is valid.
std::vector<std::string> validate_layout(const LayoutConfig& layout);

// Crops each region. Pixel origin is floor(x0*W), floor(y0*H); extent is
// ceil(span*W), ceil(span*H), clamped to the frame. A region whose span
// rounds to zero pixels is a SplitError naming the region.
std::map<std::string, Raster> split(const Raster& raster,
                                    const LayoutConfig& layout);

LayoutConfig parse_layout_json(const nlohmann::json& doc);
LayoutConfig load_layout(const std::filesystem::path& path);

}  // namespace sonochain
