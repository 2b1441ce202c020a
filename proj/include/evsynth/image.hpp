#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "evsynth/errors.hpp"

namespace evsynth {

/// Single-channel image, row-major, intensities in [0, 1].
struct GrayImage {
  int width = 0;
  int height = 0;
  std::vector<double> px;

  GrayImage() = default;
  GrayImage(int w, int h, double fill = 0.0)
      : width(w), height(h), px(static_cast<std::size_t>(w) * h, fill) {}

  double& at(int x, int y) {
    return px[static_cast<std::size_t>(y) * width + x];
  }
  double at(int x, int y) const {
    return px[static_cast<std::size_t>(y) * width + x];
  }

  bool empty() const { return px.empty(); }
  bool same_dims(const GrayImage& o) const {
    return width == o.width && height == o.height;
  }

  bool operator==(const GrayImage& o) const = default;
};

/// Bilinear rescale; samples are clamped to the source rectangle.
GrayImage resize_bilinear(const GrayImage& src, int out_width, int out_height);

/// Quantize to 8 bits: round(v * 255) to nearest, clamped to [0, 255].
std::vector<std::uint8_t> to_bytes(const GrayImage& img);

/// Widen 8-bit pixels to [0, 1].
GrayImage from_bytes(const std::uint8_t* data, int width, int height);

}  // namespace evsynth
