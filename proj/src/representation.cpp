#include "evsynth/representation.hpp"

#include <algorithm>
#include <cmath>

#include "evsynth/errors.hpp"

namespace evsynth {

namespace {

void validate_tbr_config(const TbrConfig& cfg) {
  if (cfg.delta_t_us < 1) throw ConfigError("tbr: delta_t_us must be >= 1");
  if (cfg.n_bits < 1 || cfg.n_bits > 32)
    throw ConfigError("tbr: n_bits must lie in [1, 32]");
}

double denominator(const TbrConfig& cfg) {
  if (cfg.normalizer == Normalizer::max_code)
    return static_cast<double>((std::uint64_t{1} << cfg.n_bits) - 1);
  return static_cast<double>(cfg.n_bits);
}

int bit_shift(const TbrConfig& cfg, int window_slot) {
  return cfg.bit_order == BitOrder::earliest_msb ? cfg.n_bits - 1 - window_slot
                                                 : window_slot;
}

[[noreturn]] void throw_event_out_of_dims(const Event& e, int w, int h) {
  throw DataError("event (x=" + std::to_string(e.x) + ", y=" +
                  std::to_string(e.y) + ", t=" + std::to_string(e.t) +
                  ") outside " + std::to_string(w) + "x" + std::to_string(h));
}

}  // namespace

BinaryFrame binarize_window(std::span<const Event> events,
                            std::uint64_t window_start, const TbrConfig& cfg,
                            int width, int height) {
  validate_tbr_config(cfg);
  if (width < 1 || height < 1)
    throw ConfigError("binarize_window: dimensions must be positive");

  BinaryFrame frame(width, height, window_start / cfg.delta_t_us);
  const std::uint64_t window_end = window_start + cfg.delta_t_us;
  const Event probe_lo{0, 0, window_start, 0};
  auto it = std::lower_bound(events.begin(), events.end(), probe_lo,
                             [](const Event& a, const Event& b) { return a.t < b.t; });
  for (; it != events.end() && it->t < window_end; ++it) {
    if (static_cast<int>(it->x) >= width || static_cast<int>(it->y) >= height)
      throw_event_out_of_dims(*it, width, height);
    frame.bits[static_cast<std::size_t>(it->y) * width + it->x] = 1;
  }
  return frame;
}

TbrFrame encode_tbr(std::span<const BinaryFrame> frames, const TbrConfig& cfg) {
  validate_tbr_config(cfg);
  if (frames.size() != static_cast<std::size_t>(cfg.n_bits))
    throw ConfigError("encode_tbr: expected " + std::to_string(cfg.n_bits) +
                      " frames, got " + std::to_string(frames.size()));
  const BinaryFrame& first = frames.front();
  for (std::size_t i = 0; i < frames.size(); ++i) {
    if (frames[i].width != first.width || frames[i].height != first.height)
      throw ConfigError("encode_tbr: mismatched frame dimensions");
    if (frames[i].window_index != first.window_index + i)
      throw ConfigError("encode_tbr: window indices are not consecutive");
  }

  TbrFrame out;
  out.width = first.width;
  out.height = first.height;
  out.first_window_index = first.window_index;
  out.n_bits = cfg.n_bits;
  out.values.assign(first.bits.size(), 0.0);

  const double d = denominator(cfg);
  for (std::size_t p = 0; p < out.values.size(); ++p) {
    std::uint64_t code = 0;
    for (int i = 0; i < cfg.n_bits; ++i)
      if (frames[i].bits[p])
        code |= std::uint64_t{1} << bit_shift(cfg, i);
    out.values[p] = static_cast<double>(code) / d;
  }
  return out;
}

std::vector<BinaryFrame> decode_tbr(const TbrFrame& frame,
                                    const TbrConfig& cfg) {
  validate_tbr_config(cfg);
  if (frame.n_bits != cfg.n_bits)
    throw ConfigError("decode_tbr: frame was encoded with n_bits = " +
                      std::to_string(frame.n_bits));

  const double d = denominator(cfg);
  const std::uint64_t max_code = (std::uint64_t{1} << cfg.n_bits) - 1;

  std::vector<BinaryFrame> out;
  out.reserve(static_cast<std::size_t>(cfg.n_bits));
  for (int i = 0; i < cfg.n_bits; ++i)
    out.emplace_back(frame.width, frame.height, frame.first_window_index + i);

  for (std::size_t p = 0; p < frame.values.size(); ++p) {
    const double scaled = frame.values[p] * d;
    const auto code = static_cast<std::uint64_t>(std::llround(scaled));
    if (std::abs(scaled - static_cast<double>(code)) > 1e-6 || code > max_code)
      throw CorruptionError("decode_tbr: value " +
                            std::to_string(frame.values[p]) +
                            " is not on the representable grid");
    for (int i = 0; i < cfg.n_bits; ++i)
      out[static_cast<std::size_t>(i)].bits[p] =
          static_cast<std::uint8_t>((code >> bit_shift(cfg, i)) & 1);
  }
  return out;
}

std::vector<TbrFrame> stream_encode(const EventStream& es, const TbrConfig& cfg) {
  validate_tbr_config(cfg);
  if (es.width < 1 || es.height < 1)
    throw ConfigError("stream_encode: stream dimensions must be positive");
  for (std::size_t i = 1; i < es.events.size(); ++i)
    if (es.events[i].t < es.events[i - 1].t)
      throw DataError("stream_encode: events are not time-sorted");
  if (!es.events.empty() && es.events.back().t >= es.duration_us)
    throw DataError("stream_encode: event at t=" +
                    std::to_string(es.events.back().t) +
                    " outside duration " + std::to_string(es.duration_us));

  const std::uint64_t window_count =
      es.duration_us == 0
          ? 1
          : (es.duration_us + cfg.delta_t_us - 1) / cfg.delta_t_us;
  const std::uint64_t group_count =
      (window_count + cfg.n_bits - 1) / cfg.n_bits;

  std::vector<TbrFrame> out;
  out.reserve(group_count);
  std::size_t cursor = 0;
  for (std::uint64_t g = 0; g < group_count; ++g) {
    std::vector<BinaryFrame> group;
    group.reserve(static_cast<std::size_t>(cfg.n_bits));
    for (int j = 0; j < cfg.n_bits; ++j) {
      const std::uint64_t w = g * cfg.n_bits + j;
      BinaryFrame bf(es.width, es.height, w);
      if (w < window_count) {
        const std::uint64_t window_end = (w + 1) * cfg.delta_t_us;
        for (; cursor < es.events.size() && es.events[cursor].t < window_end;
             ++cursor) {
          const Event& e = es.events[cursor];
          if (static_cast<int>(e.x) >= es.width ||
              static_cast<int>(e.y) >= es.height)
            throw_event_out_of_dims(e, es.width, es.height);
          bf.bits[static_cast<std::size_t>(e.y) * es.width + e.x] = 1;
        }
      }
      group.push_back(std::move(bf));
    }
    out.push_back(encode_tbr(group, cfg));
  }
  return out;
}

TbrConfig single_frame_config(const TbrConfig& base, std::uint64_t duration_us) {
  validate_tbr_config(base);
  TbrConfig cfg = base;
  const auto n = static_cast<std::uint64_t>(base.n_bits);
  cfg.delta_t_us = std::max<std::uint64_t>(1, (duration_us + n - 1) / n);
  return cfg;
}

GrayImage tbr_to_gray(const TbrFrame& frame) {
  GrayImage img(frame.width, frame.height);
  for (std::size_t i = 0; i < frame.values.size(); ++i)
    img.px[i] = std::clamp(frame.values[i], 0.0, 1.0);
  return img;
}

}  // namespace evsynth
