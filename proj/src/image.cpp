#include "evsynth/image.hpp"

#include <algorithm>
#include <cmath>

namespace evsynth {

GrayImage resize_bilinear(const GrayImage& src, int out_width, int out_height) {
  if (src.empty()) throw DataError("resize: empty source image");
  if (out_width < 1 || out_height < 1)
    throw ConfigError("resize: target dimensions must be positive");
  if (out_width == src.width && out_height == src.height) return src;

  GrayImage out(out_width, out_height);
  const double sx = static_cast<double>(src.width) / out_width;
  const double sy = static_cast<double>(src.height) / out_height;
  for (int y = 0; y < out_height; ++y) {
    const double fy = std::clamp((y + 0.5) * sy - 0.5, 0.0,
                                 static_cast<double>(src.height - 1));
    const int y0 = static_cast<int>(fy);
    const int y1 = std::min(y0 + 1, src.height - 1);
    const double ay = fy - y0;
    for (int x = 0; x < out_width; ++x) {
      const double fx = std::clamp((x + 0.5) * sx - 0.5, 0.0,
                                   static_cast<double>(src.width - 1));
      const int x0 = static_cast<int>(fx);
      const int x1 = std::min(x0 + 1, src.width - 1);
      const double ax = fx - x0;
      out.at(x, y) = (1.0 - ay) * ((1.0 - ax) * src.at(x0, y0) + ax * src.at(x1, y0)) +
                     ay * ((1.0 - ax) * src.at(x0, y1) + ax * src.at(x1, y1));
    }
  }
  return out;
}

std::vector<std::uint8_t> to_bytes(const GrayImage& img) {
  std::vector<std::uint8_t> out(img.px.size());
  for (std::size_t i = 0; i < img.px.size(); ++i) {
    const long v = std::lround(img.px[i] * 255.0);
    out[i] = static_cast<std::uint8_t>(std::clamp(v, 0L, 255L));
  }
  return out;
}

GrayImage from_bytes(const std::uint8_t* data, int width, int height) {
  GrayImage img(width, height);
  const std::size_t n = img.px.size();
  for (std::size_t i = 0; i < n; ++i) img.px[i] = data[i] / 255.0;
  return img;
}

}  // namespace evsynth
