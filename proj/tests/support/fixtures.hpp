#pragma once

#include <filesystem>
#include <map>
#include <random>
#include <span>
#include <string>

#include "evsynth/dataset.hpp"
#include "evsynth/events.hpp"
#include "evsynth/image.hpp"
#include "evsynth/metrics.hpp"

namespace evtest {

using namespace evsynth;

/// Unique scratch directory, removed on destruction.
class TempDir {
public:
  explicit TempDir(const std::string& tag);
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }

private:
  std::filesystem::path path_;
};

/// Procedural face-like test image: gradient background, bright face
/// ellipse, dark eyes, mouth bar. Variant shifts the face around.
GrayImage synth_face_image(int width, int height, unsigned variant);

/// 194 landmarks laid out in the Helen component order used by the default
/// BoxClassConfig (eyes at [114,134) and [134,154)), tracking the shapes
/// drawn by synth_face_image.
LandmarkSet synth_face_landmarks(int width, int height, unsigned variant);

/// Write <count> image (.pgm) + landmark (.txt) pairs into dir.
void write_fixture_corpus(const std::filesystem::path& dir, int count,
                          int width, int height);

/// Sorted random event stream covering [0, duration_us).
EventStream random_event_stream(std::mt19937_64& rng, std::size_t count,
                                int width, int height,
                                std::uint64_t duration_us);

/// Brute-force average precision: fresh greedy matching for every
/// prediction prefix, then envelope integration. Independent of the
/// metrics module internals.
double oracle_average_precision(std::span<const Detection> preds,
                                const std::map<std::string, AnnotationSet>& gts,
                                int cls, const EvalConfig& cfg);

}  // namespace evtest
