#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "evsynth/geometry.hpp"
#include "evsynth/representation.hpp"

namespace evsynth {

inline constexpr int kClassFace = 0;
inline constexpr int kClassEye = 1;

/// Ordered landmark points of one annotated image, in pixels.
struct LandmarkSet {
  std::string image_id;
  std::vector<std::array<double, 2>> points;
};

/// Half-open index range into a landmark list.
struct IndexRange {
  int begin = 0;
  int end = 0;

  int size() const { return end - begin; }
  bool operator==(const IndexRange&) const = default;
};

/// How face/eye boxes are derived from landmarks. The default eye ranges
/// follow the Helen 194-point convention; verify against your annotation
/// copy before relying on them.
struct BoxClassConfig {
  IndexRange eye_left{134, 154};
  IndexRange eye_right{114, 134};
  double face_margin = 0.10;
  double eye_margin = 0.25;
  double min_visible_fraction = 0.25;
};

/// Axis-aligned box in normalized [0, 1] coordinates: center + extent.
struct Box {
  int cls = kClassFace;
  double cx = 0.0;
  double cy = 0.0;
  double w = 0.0;
  double h = 0.0;

  bool operator==(const Box&) const = default;
};

struct AnnotationSet {
  std::string image_id;
  std::vector<Box> boxes;

  bool operator==(const AnnotationSet&) const = default;
};

struct ManifestEntry {
  std::string sample_path;
  std::string label_path;
  std::string image_id;
  std::uint64_t seed = 0;

  bool operator==(const ManifestEntry&) const = default;
};

using Manifest = std::vector<ManifestEntry>;

struct Resize {
  int width = 0;
  int height = 0;
  bool operator==(const Resize&) const = default;
};

/// Landmark text format: first line is the image identifier, then one
/// "x , y" decimal pair per line.
LandmarkSet load_landmarks(const std::filesystem::path& path);
LandmarkSet parse_landmarks(std::istream& in, const std::string& origin);

/// Face box = bounding rectangle of all points expanded by face_margin of
/// its own width/height per side; each eye box likewise from its index
/// range with eye_margin. Results are clipped to the image and normalized.
AnnotationSet landmarks_to_boxes(const LandmarkSet& lm,
                                 const BoxClassConfig& cfg, int width,
                                 int height);

/// Map each box through h (four corners, axis-aligned hull), clip to the
/// frame, and drop boxes whose clipped area falls below
/// min_visible_fraction of the unclipped area.
AnnotationSet project_annotations(const AnnotationSet& ann, const Homography& h,
                                  int width, int height,
                                  const BoxClassConfig& cfg);

/// Write frames as 8-bit grayscale images plus one "class cx cy w h" label
/// line per box (6 decimals). Files land in out_dir/images and
/// out_dir/labels as <image_id>_<k>.<ext>. Resizing rescales pixels only;
/// normalized labels are untouched.
std::vector<ManifestEntry> export_sample(
    const std::string& image_id, std::span<const TbrFrame> frames,
    std::span<const AnnotationSet> annotations,
    const std::filesystem::path& out_dir, const std::optional<Resize>& resize,
    std::uint64_t seed_used, const std::string& image_ext = ".png");

/// Deterministic shuffled split: |train| = round(ratio * total), no
/// overlap, union = input. Both halves come back sorted by sample path.
std::pair<Manifest, Manifest> split_dataset(const Manifest& manifest,
                                            double ratio, std::uint64_t seed);

/// Manifest text format: "sample<TAB>label<TAB>image_id<TAB>seed" per line.
void write_manifest(const Manifest& manifest,
                    const std::filesystem::path& path);
Manifest read_manifest(const std::filesystem::path& path);

/// FNV-1a 64-bit; combined with the global seed to derive per-sample seeds.
std::uint64_t fnv1a64(std::string_view s);

}  // namespace evsynth
