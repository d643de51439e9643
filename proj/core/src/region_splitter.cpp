#include "sonochain/region_splitter.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

namespace sonochain {

namespace {

const std::set<std::string> kKnownRegions = {"main", "probe_mark", "ocr_strip"};
const std::set<std::string> kMandatoryRegions = {"main", "probe_mark"};

}  // namespace

Raster make_raster(int width, int height, std::vector<std::uint8_t> pixels) {
  if (width < 1 || height < 1)
    throw DomainError("raster dimensions must be positive");
  if (pixels.empty())
    pixels.assign(static_cast<std::size_t>(width) * height, 0);
  if (pixels.size() != static_cast<std::size_t>(width) * height)
    throw DomainError("raster pixel count does not match dimensions");
  return Raster{width, height, std::move(pixels)};
}

std::vector<std::string> validate_layout(const LayoutConfig& layout) {
  std::vector<std::string> violations;
  if (layout.layout_id.empty()) violations.push_back("layout_id is empty");
  for (const auto& name : kMandatoryRegions) {
    if (!layout.regions.count(name))
      violations.push_back("mandatory region absent: " + name);
  }
  for (const auto& [name, r] : layout.regions) {
    if (!kKnownRegions.count(name))
      violations.push_back("unknown region name: " + name);
    auto in_unit = [](double v) { return v >= 0.0 && v <= 1.0; };
    if (!in_unit(r.x0) || !in_unit(r.y0) || !in_unit(r.x1) || !in_unit(r.y1))
      violations.push_back("region " + name + " has coordinates outside [0,1]");
    if (!(r.x0 < r.x1) || !(r.y0 < r.y1))
      violations.push_back("region " + name +
                           " rectangle is degenerate (requires x0<x1, y0<y1)");
  }
  return violations;
}

std::map<std::string, Raster> split(const Raster& raster,
                                    const LayoutConfig& layout) {
  auto violations = validate_layout(layout);
  if (!violations.empty())
    throw SplitError("invalid layout: " + violations.front());
  if (raster.width < 1 || raster.height < 1)
    throw SplitError("empty raster");

  std::map<std::string, Raster> crops;
  for (const auto& [name, r] : layout.regions) {
    const double span_x = (r.x1 - r.x0) * raster.width;
    const double span_y = (r.y1 - r.y0) * raster.height;
    if (std::llround(span_x) == 0 || std::llround(span_y) == 0)
      throw SplitError("region " + name + " rounds to zero pixels");

    int x = static_cast<int>(std::floor(r.x0 * raster.width));
    int y = static_cast<int>(std::floor(r.y0 * raster.height));
    int w = static_cast<int>(std::ceil(span_x));
    int h = static_cast<int>(std::ceil(span_y));
    x = std::min(x, raster.width - 1);
    y = std::min(y, raster.height - 1);
    w = std::min(w, raster.width - x);
    h = std::min(h, raster.height - y);
    if (w <= 0 || h <= 0)
      throw SplitError("region " + name + " rounds to zero pixels");

    std::vector<std::uint8_t> pixels(static_cast<std::size_t>(w) * h);
    for (int row = 0; row < h; ++row) {
      const auto* src = raster.pixels.data() +
                        static_cast<std::size_t>(y + row) * raster.width + x;
      std::copy(src, src + w, pixels.begin() + static_cast<std::size_t>(row) * w);
    }
    crops.emplace(name, Raster{w, h, std::move(pixels)});
  }
  return crops;
}

LayoutConfig parse_layout_json(const nlohmann::json& doc) {
  LayoutConfig layout;
  try {
    layout.layout_id = doc.at("layout_id").get<std::string>();
    for (const auto& [name, rect] : doc.at("regions").items()) {
      if (!rect.is_array() || rect.size() != 4)
        throw ParseError("region " + name + " must be [x0,y0,x1,y1]");
      layout.regions[name] = Rect{rect[0].get<double>(), rect[1].get<double>(),
                                  rect[2].get<double>(), rect[3].get<double>()};
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed layout document: ") + e.what());
  }
  return layout;
}

LayoutConfig load_layout(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open layout file: " + path.string());
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("layout file " + path.string() + ": " + e.what());
  }
  return parse_layout_json(doc);
}

}  // namespace sonochain
