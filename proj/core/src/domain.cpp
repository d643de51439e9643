#include "sonochain/domain.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <numeric>

namespace sonochain {

namespace {

constexpr std::array<const char*, 6> kRegionShort = {
    "lymph node", "nipple", "UIQ", "UOQ", "LOQ", "LIQ"};

constexpr std::array<const char*, 6> kRegionLong = {
    "axillary lymph node",
    "nipple",
    "Upper Inner Quadrant (UIQ)",
    "Upper Outer Quadrant (UOQ)",
    "Lower Outer Quadrant (LOQ)",
    "Lower Inner Quadrant (LIQ)"};

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

// Accepted spellings per region, lowercase. Versioned with the taxonomy.
const std::array<std::vector<std::string>, 6> kRegionSynonyms = {{
    {"lymph node", "axillary lymph node"},
    {"nipple"},
    {"uiq", "upper inner quadrant (uiq)", "upper inner quadrant"},
    {"uoq", "upper outer quadrant (uoq)", "upper outer quadrant"},
    {"loq", "lower outer quadrant (loq)", "lower outer quadrant"},
    {"liq", "lower inner quadrant (liq)", "lower inner quadrant"},
}};

}  // namespace

ProbePosition ProbePosition::from_index(int index) {
  if (index < 0 || index >= kProbeClassCount)
    throw DomainError("probe index out of range: " + std::to_string(index));
  return {static_cast<Side>(index / 6), static_cast<Region>(index % 6)};
}

std::string probe_label(int index) {
  auto pos = ProbePosition::from_index(index);
  std::string side = pos.side == Side::Right ? "right" : "left";
  return side + " " + kRegionShort[static_cast<int>(pos.region)];
}

std::string probe_label_long(int index) {
  auto pos = ProbePosition::from_index(index);
  std::string side = pos.side == Side::Right ? "right" : "left";
  return side + " " + kRegionLong[static_cast<int>(pos.region)];
}

ProbePosition parse_probe_label(std::string_view label) {
  std::string s = to_lower(trim(label));
  Side side;
  if (s.rfind("right ", 0) == 0) {
    side = Side::Right;
    s = trim(s.substr(6));
  } else if (s.rfind("left ", 0) == 0) {
    side = Side::Left;
    s = trim(s.substr(5));
  } else {
    throw ParseError("probe label must start with a side, got: \"" +
                     std::string(label) + "\"");
  }
  for (int r = 0; r < 6; ++r) {
    for (const auto& syn : kRegionSynonyms[r]) {
      if (s == syn) return {side, static_cast<Region>(r)};
    }
  }
  throw ParseError("unrecognized probe region: \"" + s + "\"");
}

std::string birads_label(BiRadsCategory c) {
  return "C" + std::to_string(static_cast<int>(c));
}

BiRadsCategory parse_birads(std::string_view label) {
  std::string s = to_lower(trim(label));
  if (s.size() == 2 && s[0] == 'c' && s[1] >= '1' && s[1] <= '5')
    return static_cast<BiRadsCategory>(s[1] - '0');
  throw ParseError("unrecognized BI-RADS category: \"" + std::string(label) +
                   "\"");
}

BiRadsCategory worst_category(const std::vector<BiRadsCategory>& categories) {
  if (categories.empty())
    throw DomainError("worst_category: empty category list");
  return *std::max_element(categories.begin(), categories.end());
}

std::string shape_label(Shape s) {
  return s == Shape::Irregular ? "irregular" : "oval";
}

std::string margin_label(Margin m) {
  switch (m) {
    case Margin::Circumscribed: return "circumscribed";
    case Margin::Indistinct: return "indistinct";
    case Margin::Microlobulated: return "microlobulated";
  }
  throw DomainError("invalid margin value");
}

std::string echo_label(Echo e) {
  switch (e) {
    case Echo::Anechoic: return "anechoic";
    case Echo::Isoechoic: return "isoechoic";
    case Echo::Hypoechoic: return "hypoechoic";
  }
  throw DomainError("invalid echo value");
}

void validate(const LesionDescription& lesion) {
  for (double c : {lesion.shape_confidence, lesion.margin_confidence,
                   lesion.echo_confidence}) {
    if (!(c >= 0.0 && c <= 1.0))
      throw DomainError("lesion confidence outside [0,1]");
  }
}

ProbVector::ProbVector(std::vector<double> values) : values_(std::move(values)) {
  if (values_.empty()) throw DomainError("probability vector is empty");
  double sum = 0.0;
  for (double v : values_) {
    if (!(v >= 0.0) || !std::isfinite(v))
      throw DomainError("probability entry negative or non-finite");
    sum += v;
  }
  if (std::abs(sum - 1.0) > kNormTolerance)
    throw DomainError("probabilities sum to " + std::to_string(sum) +
                      ", expected 1 within tolerance");
  for (double& v : values_) v /= sum;
}

int ProbVector::argmax() const {
  return static_cast<int>(
      std::max_element(values_.begin(), values_.end()) - values_.begin());
}

void validate(const BBox& box) {
  auto in_unit = [](double v) { return v >= 0.0 && v <= 1.0; };
  if (!in_unit(box.x0) || !in_unit(box.y0) || !in_unit(box.x1) ||
      !in_unit(box.y1))
    throw DomainError("bounding box coordinate outside [0,1]");
  if (!(box.x0 < box.x1) || !(box.y0 < box.y1))
    throw DomainError("bounding box must satisfy x0 < x1 and y0 < y1");
  if (!in_unit(box.score)) throw DomainError("bounding box score outside [0,1]");
}

ClinicalScore make_clinical_score(int value) {
  if (value < 1 || value > 5)
    throw EvalError("clinical score must be in [1,5], got " +
                    std::to_string(value));
  return ClinicalScore{value};
}

}  // namespace sonochain
