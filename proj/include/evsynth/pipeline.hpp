#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "evsynth/config.hpp"
#include "evsynth/metrics.hpp"

namespace evsynth {

struct SimulateSummary {
  std::string image_id;
  std::filesystem::path events_path;
  std::filesystem::path homography_path;
  std::size_t event_count = 0;
  std::uint64_t duration_us = 0;
};

/// simulate: image -> EVS1 event file + per-frame homography sidecar
/// ("t_us h00 .. h22" per line). Deterministic per global seed.
SimulateSummary simulate_image_file(const std::filesystem::path& image_path,
                                    const std::filesystem::path& out_dir,
                                    const PipelineConfig& cfg);

struct EncodeSummary {
  std::string stream_id;
  std::vector<std::filesystem::path> frame_paths;
};

/// encode: EVS1 file -> TBR image(s). Single-frame mode emits exactly one
/// image; streaming mode emits ceil(W / n_bits).
EncodeSummary encode_events_file(const std::filesystem::path& events_path,
                                 const std::filesystem::path& out_dir,
                                 const PipelineConfig& cfg);

struct ExportSummary {
  Manifest manifest;  // sorted by image id
  Manifest train;
  Manifest val;
  std::size_t image_count = 0;
};

/// export: landmark-annotated corpus -> labeled dataset directory with
/// images/, labels/, manifest.tsv and train/val lists. Corpus images and
/// landmark .txt files pair by shared basename. Idempotent per seed.
ExportSummary export_corpus(const std::filesystem::path& corpus_dir,
                            const std::filesystem::path& out_dir,
                            const PipelineConfig& cfg);

enum class EvalSplit { all, train, val };

/// evaluate: prediction file against an exported dataset directory.
MetricsReport evaluate_dataset(const std::filesystem::path& predictions_path,
                               const std::filesystem::path& dataset_dir,
                               const PipelineConfig& cfg,
                               EvalSplit split = EvalSplit::all);

/// info: human-readable summary of an EVS1, label or prediction file.
std::string describe_file(const std::filesystem::path& path);

}  // namespace evsynth
