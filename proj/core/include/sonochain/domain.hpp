#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "sonochain/errors.hpp"

namespace sonochain {

// ---------------------------------------------------------------------------
// Probe position taxonomy: side x anatomical region, 12 classes.
// Canonical index order is right-side-first, regions in the order
// lymph node, nipple, UIQ, UOQ, LOQ, LIQ.
// ---------------------------------------------------------------------------

enum class Side { Right = 0, Left = 1 };
enum class Region { LymphNode = 0, Nipple, UIQ, UOQ, LOQ, LIQ };

inline constexpr int kProbeClassCount = 12;

struct ProbePosition {
  Side side;
  Region region;

  int index() const {
    return static_cast<int>(side) * 6 + static_cast<int>(region);
  }
  static ProbePosition from_index(int index);

  bool operator==(const ProbePosition&) const = default;
};

// Canonical short label, e.g. "right lymph node", "left LIQ".
std::string probe_label(int index);
// Long form used in rendered observations, e.g.
// "right Lower Outer Quadrant (LOQ)".
std::string probe_label_long(int index);

// Case-insensitive; accepts canonical labels and long-form synonyms
// ("right Lower Outer Quadrant (LOQ)", "left axillary lymph node").
ProbePosition parse_probe_label(std::string_view label);

// ---------------------------------------------------------------------------
// BI-RADS assessment categories, totally ordered C1 < ... < C5.
// ---------------------------------------------------------------------------

enum class BiRadsCategory { C1 = 1, C2, C3, C4, C5 };

std::string birads_label(BiRadsCategory c);
BiRadsCategory parse_birads(std::string_view label);

// Maximum under the C1 < ... < C5 order. Empty input is a DomainError.
BiRadsCategory worst_category(const std::vector<BiRadsCategory>& categories);

// ---------------------------------------------------------------------------
// Lesion descriptors. Index order follows the training-label convention:
// shape irregular=0 / oval=1; margin circumscribed/indistinct/microlobulated;
// echo anechoic/isoechoic/hypoechoic.
// ---------------------------------------------------------------------------

enum class Shape { Irregular = 0, Oval = 1 };
enum class Margin { Circumscribed = 0, Indistinct = 1, Microlobulated = 2 };
enum class Echo { Anechoic = 0, Isoechoic = 1, Hypoechoic = 2 };

std::string shape_label(Shape s);
std::string margin_label(Margin m);
std::string echo_label(Echo e);

struct LesionDescription {
  Shape shape;
  Margin margin;
  Echo echo;
  double shape_confidence = 0.0;
  double margin_confidence = 0.0;
  double echo_confidence = 0.0;

  bool operator==(const LesionDescription&) const = default;
};

// Throws DomainError when a confidence falls outside [0,1].
void validate(const LesionDescription& lesion);

// ---------------------------------------------------------------------------
// Validated class-probability vector.
// ---------------------------------------------------------------------------

class ProbVector {
 public:
  // Entries must be non-negative and sum to 1 within kNormTolerance;
  // vectors within tolerance are renormalized, beyond it rejected.
  explicit ProbVector(std::vector<double> values);

  static constexpr double kNormTolerance = 1e-6;

  const std::vector<double>& values() const { return values_; }
  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }

  // Lowest index attaining the maximum value.
  int argmax() const;

 private:
  std::vector<double> values_;
};

// ---------------------------------------------------------------------------
// Normalized bounding box with detection score.
// ---------------------------------------------------------------------------

struct BBox {
  double x0 = 0, y0 = 0, x1 = 0, y1 = 0;
  double score = 0;

  bool operator==(const BBox&) const = default;
};

// Requires x0 < x1, y0 < y1, all coordinates and score in [0,1].
void validate(const BBox& box);

// ---------------------------------------------------------------------------
// Plumbing records.
// ---------------------------------------------------------------------------

struct ImageRecord {
  std::string image_id;
  std::string raster_ref;
  std::string layout_id;
  std::string patient_id;
};

struct ClinicalScore {
  int value = 1;  // 1 (unacceptable) .. 5 (excellent)
};

// Throws EvalError when out of [1,5].
ClinicalScore make_clinical_score(int value);

}  // namespace sonochain
