#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "evsynth/events.hpp"
#include "evsynth/image.hpp"

namespace evsynth {

/// Position of the earliest window inside the per-pixel code.
enum class BitOrder { earliest_msb, latest_msb };

/// Denominator used to map codes onto [0, 1]: max_code divides by
/// 2^n_bits - 1 (bounded), window_count divides by n_bits (the code can
/// then exceed 1 for n_bits >= 3).
enum class Normalizer { max_code, window_count };

struct TbrConfig {
  std::uint64_t delta_t_us = 10000;  // accumulation window
  int n_bits = 8;                    // windows folded into one frame
  BitOrder bit_order = BitOrder::earliest_msb;
  Normalizer normalizer = Normalizer::max_code;
};

/// Per-pixel event-presence indicator for one accumulation window.
struct BinaryFrame {
  int width = 0;
  int height = 0;
  std::uint64_t window_index = 0;
  std::vector<std::uint8_t> bits;  // 0/1, row-major

  BinaryFrame() = default;
  BinaryFrame(int w, int h, std::uint64_t window)
      : width(w), height(h), window_index(window),
        bits(static_cast<std::size_t>(w) * h, 0) {}

  bool operator==(const BinaryFrame&) const = default;
};

/// n_bits consecutive windows folded into one decimal-coded frame. Every
/// value lies on the grid {k / D} for the configured denominator D.
struct TbrFrame {
  int width = 0;
  int height = 0;
  std::uint64_t first_window_index = 0;
  int n_bits = 0;
  std::vector<double> values;

  bool operator==(const TbrFrame&) const = default;
};

/// Presence bit per pixel over [window_start, window_start + delta_t),
/// either polarity. Events must be time-sorted.
BinaryFrame binarize_window(std::span<const Event> events,
                            std::uint64_t window_start, const TbrConfig& cfg,
                            int width, int height);

/// Fold exactly n_bits consecutive binary frames into one TbrFrame.
/// Lossless: decode_tbr recovers every bit.
TbrFrame encode_tbr(std::span<const BinaryFrame> frames, const TbrConfig& cfg);

/// Inverse of encode_tbr for frames produced with the same configuration.
std::vector<BinaryFrame> decode_tbr(const TbrFrame& frame,
                                    const TbrConfig& cfg);

/// Partition [0, duration) into ceil(duration / delta_t) windows and emit
/// ceil(W / n_bits) frames; the final group is zero-padded with empty
/// windows. An empty or shorter-than-delta_t stream yields one frame.
std::vector<TbrFrame> stream_encode(const EventStream& es,
                                    const TbrConfig& cfg);

/// delta_t that folds the whole stream into a single frame.
TbrConfig single_frame_config(const TbrConfig& base, std::uint64_t duration_us);

/// View a TbrFrame as a [0, 1] image for export (values above 1 clamp).
GrayImage tbr_to_gray(const TbrFrame& frame);

}  // namespace evsynth
