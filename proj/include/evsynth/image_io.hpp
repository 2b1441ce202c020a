#pragma once

#include <filesystem>

#include "evsynth/image.hpp"

namespace evsynth {

/// Load any grayscale-convertible image. PGM (P5) is handled natively;
/// other formats go through the OpenCV codecs.
GrayImage load_gray(const std::filesystem::path& path);

/// Write as 8-bit grayscale, format chosen by extension (.pgm native).
void save_gray(const GrayImage& img, const std::filesystem::path& path);

}  // namespace evsynth
