#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "evsynth/dataset.hpp"
#include "evsynth/geometry.hpp"
#include "evsynth/metrics.hpp"
#include "evsynth/representation.hpp"
#include "evsynth/simulator.hpp"

namespace evsynth {

/// Aggregate settings for the whole pipeline, loaded from one declarative
/// JSON file with CLI-flag overrides layered on top.
struct PipelineConfig {
  std::uint64_t seed = 42;
  MotionConfig motion;

  // Virtual camera. focal <= 0 means "use the image width"; an absent
  // principal point means the image center.
  double focal = 0.0;
  std::optional<std::array<double, 2>> principal_point;
  double plane_depth = 1.0;
  Border border;

  SimConfig sim;
  TbrConfig tbr;
  bool single_frame = true;

  BoxClassConfig boxes;
  EvalConfig eval;

  double train_ratio = 0.8;
  std::optional<Resize> resize;
  int jobs = 1;
};

/// Parse a config file; unknown keys are rejected ("comment" keys are
/// allowed anywhere). Missing keys keep their defaults.
PipelineConfig load_pipeline_config(const std::filesystem::path& path);
PipelineConfig parse_pipeline_config(const std::string& json_text);

/// Serialize the effective configuration (the --dump-config output).
std::string dump_pipeline_config(const PipelineConfig& cfg);

/// Intrinsics for a concrete image under this configuration.
Intrinsics resolve_intrinsics(const PipelineConfig& cfg, int width, int height);

/// Per-sample trajectory seed: global seed XOR fnv1a64(image_id).
std::uint64_t sample_seed(const PipelineConfig& cfg, const std::string& image_id);

}  // namespace evsynth
