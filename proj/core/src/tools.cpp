#include "sonochain/tools.hpp"

#include <cstdio>

namespace sonochain {

namespace {

const Raster& region_or_throw(const ToolContext& ctx, const std::string& name,
                              const std::string& tool) {
  auto it = ctx.regions.find(name);
  if (it == ctx.regions.end())
    throw ConfigError(tool + ": layout provides no \"" + name + "\" region");
  return it->second;
}

// Re-throws backend errors with the failing sub-task named.
template <typename Fn>
auto labeled(const std::string& sub_task, Fn&& fn) {
  try {
    return fn();
  } catch (const UnknownImageError& e) {
    throw UnknownImageError(sub_task + ": " + e.what());
  } catch (const BackendUnavailableError& e) {
    throw BackendUnavailableError(sub_task + ": " + e.what());
  } catch (const ProtocolError& e) {
    throw ProtocolError(sub_task + ": " + e.what());
  }
}

std::string format2(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

}  // namespace

BiRadsCategory refine_category(const ProbVector& probs,
                               double benign_threshold,
                               double malignant_threshold) {
  // Class order: benign, malignant, normal.
  const int cls = probs.argmax();
  const double p = probs[cls];
  switch (cls) {
    case 0:
      return p >= benign_threshold ? BiRadsCategory::C2 : BiRadsCategory::C3;
    case 1:
      return p >= malignant_threshold ? BiRadsCategory::C5 : BiRadsCategory::C4;
    default:
      return BiRadsCategory::C1;
  }
}

ToolObservation run_suspicious_description_tool(const ToolContext& ctx) {
  const Raster& main = region_or_throw(ctx, "main", "suspicious_description_tool");
  ProbVector shape = labeled("shape", [&] {
    return ctx.backend.classify(TaskId::Shape, ctx.image_id, main);
  });
  ProbVector margin = labeled("margin", [&] {
    return ctx.backend.classify(TaskId::Margin, ctx.image_id, main);
  });
  ProbVector echo = labeled("echo", [&] {
    return ctx.backend.classify(TaskId::Echo, ctx.image_id, main);
  });

  LesionDescription lesion{
      static_cast<Shape>(shape.argmax()),
      static_cast<Margin>(margin.argmax()),
      static_cast<Echo>(echo.argmax()),
      shape[shape.argmax()],
      margin[margin.argmax()],
      echo[echo.argmax()],
  };
  std::string text = "It appears " + shape_label(lesion.shape) + " shape, " +
                     margin_label(lesion.margin) + " margin and " +
                     echo_label(lesion.echo) + " echo.";
  return {"suspicious_description_tool", lesion, std::move(text)};
}

ToolObservation run_category_tool(const ToolContext& ctx) {
  const Raster& main = region_or_throw(ctx, "main", "category_tool");
  ProbVector probs = labeled("category", [&] {
    return ctx.backend.classify(TaskId::Category, ctx.image_id, main);
  });
  BiRadsCategory category =
      refine_category(probs, ctx.benign_threshold, ctx.malignant_threshold);
  std::string text =
      "The category of the given image is " + birads_label(category) + ".";
  return {"category_tool", category, std::move(text)};
}

ToolObservation run_probe_tool(const ToolContext& ctx) {
  const Raster& mark = region_or_throw(ctx, "probe_mark", "probe_tool");
  ProbVector probs = labeled("probe", [&] {
    return ctx.backend.classify(TaskId::Probe, ctx.image_id, mark);
  });
  const int index = probs.argmax();
  std::string text = "The probe information of the given image is " +
                     probe_label_long(index) + ".";
  return {"probe_tool", ProbePosition::from_index(index), std::move(text)};
}

ToolObservation run_detection_tool(const ToolContext& ctx) {
  const Raster& main = region_or_throw(ctx, "main", "detection_tool");
  std::vector<BBox> boxes = labeled("detect", [&] {
    return ctx.backend.detect(ctx.image_id, main);
  });
  std::erase_if(boxes, [&](const BBox& b) { return b.score < ctx.detection_cutoff; });

  std::string text;
  if (boxes.empty()) {
    text = "No suspicious finding detected.";
  } else {
    for (std::size_t i = 0; i < boxes.size(); ++i) {
      if (i > 0) text += " ";
      const BBox& b = boxes[i];
      text += "A suspicious finding is located at [" + format2(b.x0) + ", " +
              format2(b.y0) + ", " + format2(b.x1) + ", " + format2(b.y1) +
              "].";
    }
  }
  return {"detection_tool", std::move(boxes), std::move(text)};
}

ToolObservation run_ocr_tool(const ToolContext& ctx) {
  const Raster& strip = region_or_throw(ctx, "ocr_strip", "ocr_tool");
  std::string recognized = labeled("ocr", [&] {
    return ctx.backend.recognize_text(ctx.image_id, strip);
  });
  std::string text =
      "Annotation: " + (recognized.empty() ? "(none)" : recognized) + ".";
  return {"ocr_tool", recognized, std::move(text)};
}

void ToolRegistry::add(ToolSpec spec, Runner runner) {
  if (spec.name.empty() || spec.description.empty())
    throw ConfigError("tool registration requires name and description");
  if (entries_.count(spec.name))
    throw ConfigError("duplicate tool name: " + spec.name);
  std::string name = spec.name;
  order_.push_back(name);
  entries_.emplace(std::move(name), Entry{std::move(spec), std::move(runner)});
}

bool ToolRegistry::contains(const std::string& name) const {
  return entries_.count(name) > 0;
}

const ToolSpec& ToolRegistry::spec(const std::string& name) const {
  auto it = entries_.find(name);
  if (it == entries_.end()) throw ConfigError("unknown tool: " + name);
  return it->second.spec;
}

ToolObservation ToolRegistry::run(const std::string& name,
                                  const ToolContext& ctx) const {
  auto it = entries_.find(name);
  if (it == entries_.end()) throw ConfigError("unknown tool: " + name);
  return it->second.runner(ctx);
}

std::vector<std::string> ToolRegistry::names() const { return order_; }

ToolRegistry default_registry() {
  ToolRegistry registry;
  registry.add({"probe_tool",
                "Gives the probe position information of the given image.",
                "probe_mark", "probe"},
               run_probe_tool);
  registry.add({"category_tool",
                "Gives the BI-RADS category of the given image.", "main",
                "category"},
               run_category_tool);
  registry.add({"suspicious_description_tool",
                "Describes the shape, margin and echo of a suspicious "
                "finding in the given image.",
                "main", "description"},
               run_suspicious_description_tool);
  registry.add({"detection_tool",
                "Finds where a suspicious thing is located in the given image.",
                "main", "detection"},
               run_detection_tool);
  registry.add({"ocr_tool",
                "Reads the annotation text printed on the given image.",
                "ocr_strip", "annotation"},
               run_ocr_tool);
  return registry;
}

}  // namespace sonochain
