#include "evsynth/geometry.hpp"

#include <cmath>
#include <random>

namespace evsynth {

namespace {

using Mat3 = std::array<double, 9>;

constexpr Mat3 kIdentity{1, 0, 0, 0, 1, 0, 0, 0, 1};

Mat3 mul(const Mat3& a, const Mat3& b) {
  Mat3 r{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      double s = 0.0;
      for (int k = 0; k < 3; ++k) s += a[i * 3 + k] * b[k * 3 + j];
      r[i * 3 + j] = s;
    }
  return r;
}

double det3(const Mat3& m) {
  return m[0] * (m[4] * m[8] - m[5] * m[7]) -
         m[1] * (m[3] * m[8] - m[5] * m[6]) +
         m[2] * (m[3] * m[7] - m[4] * m[6]);
}

Mat3 adjugate(const Mat3& m) {
  return Mat3{m[4] * m[8] - m[5] * m[7], m[2] * m[7] - m[1] * m[8],
              m[1] * m[5] - m[2] * m[4], m[5] * m[6] - m[3] * m[8],
              m[0] * m[8] - m[2] * m[6], m[2] * m[3] - m[0] * m[5],
              m[3] * m[7] - m[4] * m[6], m[1] * m[6] - m[0] * m[7],
              m[0] * m[4] - m[1] * m[3]};
}

Mat3 inverse3(const Mat3& m) {
  const double d = det3(m);
  if (!std::isfinite(d) || std::abs(d) < 1e-30)
    throw GeometryError("singular 3x3 matrix (det = " + std::to_string(d) + ")");
  Mat3 adj = adjugate(m);
  for (double& v : adj) v /= d;
  return adj;
}

/// Rodrigues rotation from an axis-angle vector.
Mat3 axis_angle_to_matrix(const std::array<double, 3>& r) {
  const double theta2 = r[0] * r[0] + r[1] * r[1] + r[2] * r[2];
  if (theta2 == 0.0) return kIdentity;
  const double theta = std::sqrt(theta2);
  // sin(t)/t and (1-cos(t))/t^2, series below the precision knee
  double a, b;
  if (theta < 1e-8) {
    a = 1.0 - theta2 / 6.0;
    b = 0.5 - theta2 / 24.0;
  } else {
    a = std::sin(theta) / theta;
    b = (1.0 - std::cos(theta)) / theta2;
  }
  const Mat3 k{0, -r[2], r[1], r[2], 0, -r[0], -r[1], r[0], 0};
  const Mat3 k2 = mul(k, k);
  Mat3 out = kIdentity;
  for (int i = 0; i < 9; ++i) out[i] += a * k[i] + b * k2[i];
  return out;
}

void validate_intrinsics(const Intrinsics& k) {
  if (!(k.focal > 0.0) || !std::isfinite(k.focal))
    throw GeometryError("intrinsics: focal must be positive");
  if (k.width < 1 || k.height < 1)
    throw GeometryError("intrinsics: image dimensions must be positive");
  if (!(k.cx >= 0.0 && k.cx < k.width) || !(k.cy >= 0.0 && k.cy < k.height))
    throw GeometryError("intrinsics: principal point outside the image");
}

/// Reflect an index into [0, n) without repeating the edge sample.
int reflect101(int i, int n) {
  if (n == 1) return 0;
  const int period = 2 * (n - 1);
  i %= period;
  if (i < 0) i += period;
  return i < n ? i : period - i;
}

double fetch(const GrayImage& src, int x, int y, const Border& border) {
  if (x >= 0 && x < src.width && y >= 0 && y < src.height) return src.at(x, y);
  if (border.mode == BorderMode::constant) return border.value;
  return src.at(reflect101(x, src.width), reflect101(y, src.height));
}

double sample_bilinear(const GrayImage& src, double sx, double sy,
                       const Border& border) {
  const double fx0 = std::floor(sx);
  const double fy0 = std::floor(sy);
  const int x0 = static_cast<int>(fx0);
  const int y0 = static_cast<int>(fy0);
  const double ax = sx - fx0;
  const double ay = sy - fy0;
  const double v00 = fetch(src, x0, y0, border);
  const double v10 = fetch(src, x0 + 1, y0, border);
  const double v01 = fetch(src, x0, y0 + 1, border);
  const double v11 = fetch(src, x0 + 1, y0 + 1, border);
  return (1.0 - ay) * ((1.0 - ax) * v00 + ax * v10) +
         ay * ((1.0 - ax) * v01 + ax * v11);
}

}  // namespace

Homography compose(const Homography& a, const Homography& b) {
  return Homography{mul(a.m, b.m)};
}

Homography invert(const Homography& h) { return Homography{inverse3(h.m)}; }

Homography normalized(const Homography& h) {
  const double w = h.m[8];
  if (!std::isfinite(w) || std::abs(w) < 1e-12)
    throw GeometryError("homography cannot be normalized: m[2][2] ~ 0");
  if (w == 1.0) return h;
  Homography out = h;
  for (double& v : out.m) v /= w;
  out.m[8] = 1.0;
  return out;
}

std::vector<CameraPose> sample_trajectory(const MotionConfig& config) {
  if (!(config.pause_probability >= 0.0 && config.pause_probability <= 1.0))
    throw ConfigError("motion: pause_probability must lie in [0, 1]");
  if (config.max_frames < 1)
    throw ConfigError("motion: max_frames must be at least 1");
  for (int i = 0; i < 6; ++i) {
    if (!(config.step_std[i] >= 0.0) || !std::isfinite(config.step_std[i]))
      throw ConfigError("motion: step_std must be non-negative");
    if (!(config.amplitude_clamp[i] > 0.0) ||
        !std::isfinite(config.amplitude_clamp[i]))
      throw ConfigError("motion: amplitude_clamp must be positive");
  }

  std::mt19937_64 rng(config.seed);
  std::uniform_real_distribution<double> pause(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);

  std::vector<CameraPose> poses(static_cast<std::size_t>(config.max_frames));
  for (std::size_t i = 1; i < poses.size(); ++i) {
    if (pause(rng) < config.pause_probability) {
      poses[i] = poses[i - 1];
      continue;
    }
    CameraPose next = poses[i - 1];
    for (int c = 0; c < 6; ++c) {
      double v = (c < 3 ? next.rotation[c] : next.translation[c - 3]) +
                 gauss(rng) * config.step_std[c];
      const double bound = config.amplitude_clamp[c];
      v = std::clamp(v, -bound, bound);
      (c < 3 ? next.rotation[c] : next.translation[c - 3]) = v;
    }
    poses[i] = next;
  }
  return poses;
}

Homography pose_to_homography(const CameraPose& pose, const Intrinsics& k,
                              double plane_depth) {
  validate_intrinsics(k);
  if (!(plane_depth > 0.0) || !std::isfinite(plane_depth))
    throw GeometryError("plane_depth must be positive");
  if (pose.is_identity()) return Homography::identity();

  // M = R + t n^T / d with n = (0,0,1): adds t/d into the third column.
  Mat3 m = axis_angle_to_matrix(pose.rotation);
  m[2] += pose.translation[0] / plane_depth;
  m[5] += pose.translation[1] / plane_depth;
  m[8] += pose.translation[2] / plane_depth;

  const Mat3 cam{k.focal, 0, k.cx, 0, k.focal, k.cy, 0, 0, 1};
  const double inv_f = 1.0 / k.focal;
  const Mat3 cam_inv{inv_f, 0, -k.cx * inv_f, 0, inv_f, -k.cy * inv_f, 0, 0, 1};
  return normalized(Homography{mul(cam, mul(m, cam_inv))});
}

Homography relative_homography(const CameraPose& pose_a,
                               const CameraPose& pose_b, const Intrinsics& k,
                               double plane_depth) {
  const Homography ha = pose_to_homography(pose_a, k, plane_depth);
  const Homography hb = pose_to_homography(pose_b, k, plane_depth);
  return normalized(compose(hb, invert(ha)));
}

GrayImage warp_image(const GrayImage& src, const Homography& h,
                     const Border& border) {
  if (src.empty()) throw GeometryError("warp_image: empty source image");
  const Mat3 hinv = inverse3(h.m);

  GrayImage out(src.width, src.height);
  for (int y = 0; y < src.height; ++y) {
    for (int x = 0; x < src.width; ++x) {
      const double w = hinv[6] * x + hinv[7] * y + hinv[8];
      if (std::abs(w) < 1e-12) {
        // degenerate ray; never reached by clamped planar trajectories
        out.at(x, y) = border.mode == BorderMode::constant ? border.value : 0.0;
        continue;
      }
      const double sx = (hinv[0] * x + hinv[1] * y + hinv[2]) / w;
      const double sy = (hinv[3] * x + hinv[4] * y + hinv[5]) / w;
      out.at(x, y) = sample_bilinear(src, sx, sy, border);
    }
  }
  return out;
}

std::vector<std::array<double, 2>> warp_points(
    std::span<const std::array<double, 2>> pts, const Homography& h) {
  std::vector<std::array<double, 2>> out;
  out.reserve(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const double x = pts[i][0];
    const double y = pts[i][1];
    const double w = h.m[6] * x + h.m[7] * y + h.m[8];
    if (std::abs(w) < 1e-12) throw PointAtInfinityError(i);
    out.push_back({(h.m[0] * x + h.m[1] * y + h.m[2]) / w,
                   (h.m[3] * x + h.m[4] * y + h.m[5]) / w});
  }
  return out;
}

}  // namespace evsynth
