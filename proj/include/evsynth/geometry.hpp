#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "evsynth/errors.hpp"
#include "evsynth/image.hpp"

namespace evsynth {

/// 6-DOF camera pose relative to the source view: axis-angle rotation
/// (radians) and translation in plane-depth units.
struct CameraPose {
  std::array<double, 3> rotation{0.0, 0.0, 0.0};     // rx, ry, rz
  std::array<double, 3> translation{0.0, 0.0, 0.0};  // tx, ty, tz

  bool is_identity() const {
    return rotation == std::array<double, 3>{0.0, 0.0, 0.0} &&
           translation == std::array<double, 3>{0.0, 0.0, 0.0};
  }
  bool operator==(const CameraPose&) const = default;
};

/// Pinhole intrinsics of the virtual camera.
struct Intrinsics {
  double focal = 0.0;
  double cx = 0.0;
  double cy = 0.0;
  int width = 0;
  int height = 0;
};

/// Row-major 3x3 projective map between image planes, normalized so that
/// m[8] == 1 after construction.
struct Homography {
  std::array<double, 9> m{1, 0, 0, 0, 1, 0, 0, 0, 1};

  static Homography identity() { return Homography{}; }
  double at(int r, int c) const { return m[static_cast<std::size_t>(r) * 3 + c]; }
  bool operator==(const Homography&) const = default;
};

Homography compose(const Homography& a, const Homography& b);  // a * b
Homography invert(const Homography& h);
Homography normalized(const Homography& h);  // scale so m[8] == 1

/// Clamped Gaussian random-walk settings for the virtual camera.
/// Component order everywhere: rx, ry, rz, tx, ty, tz.
struct MotionConfig {
  double pause_probability = 0.5;
  int max_frames = 100;
  std::array<double, 6> step_std{0.002, 0.002, 0.002, 0.003, 0.003, 0.001};
  std::array<double, 6> amplitude_clamp{0.05, 0.05, 0.05, 0.08, 0.08, 0.03};
  std::uint64_t seed = 0;
};

/// Out-of-image sample policy for warping.
enum class BorderMode { mirrored, constant };

struct Border {
  BorderMode mode = BorderMode::mirrored;
  double value = 0.0;
};

inline Border mirror_border() { return Border{BorderMode::mirrored, 0.0}; }
inline Border constant_border(double value) {
  return Border{BorderMode::constant, value};
}

/// Random 6-DOF walk of length max_frames. Pose 0 is the identity; each
/// later pose either holds (with pause_probability) or adds a zero-mean
/// Gaussian step per component, clamped to +/- amplitude_clamp.
/// Deterministic for a fixed seed within one build.
std::vector<CameraPose> sample_trajectory(const MotionConfig& config);

/// H = K (R + t n^T / d) K^-1 with n = (0,0,1) and d = plane_depth,
/// normalized so m[8] == 1. The zero pose yields the exact identity.
Homography pose_to_homography(const CameraPose& pose, const Intrinsics& k,
                              double plane_depth);

/// Map from the view at pose_a to the view at pose_b:
/// H(pose_b) * H(pose_a)^-1, normalized.
Homography relative_homography(const CameraPose& pose_a,
                               const CameraPose& pose_b, const Intrinsics& k,
                               double plane_depth);

/// Inverse-mapped bilinear warp onto an image of identical dimensions.
/// Out-of-bounds samples follow the border mode; mirrored reflection does
/// not repeat the edge pixel (reflect-101).
GrayImage warp_image(const GrayImage& src, const Homography& h,
                     const Border& border);

/// Forward-map points through h with homogeneous normalization. Points are
/// not clipped; a point with w' = 0 raises PointAtInfinityError carrying
/// its index.
std::vector<std::array<double, 2>> warp_points(
    std::span<const std::array<double, 2>> pts, const Homography& h);

}  // namespace evsynth
