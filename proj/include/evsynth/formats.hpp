#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

#include "evsynth/dataset.hpp"
#include "evsynth/events.hpp"
#include "evsynth/metrics.hpp"

namespace evsynth {

// EVS1 wire format, all little-endian, packed:
//   header  (16 bytes): magic "EVS1" | width u16 | height u16 | count u64
//   record  (13 bytes): t u64 | x u16 | y u16 | p u8
// Record i starts at byte 16 + 13 * i. Timestamps are absolute microseconds
// from stream start and non-decreasing.
inline constexpr std::array<unsigned char, 4> kEvsMagic{'E', 'V', 'S', '1'};
inline constexpr std::size_t kEvsHeaderSize = 16;
inline constexpr std::size_t kEvsRecordSize = 13;

/// Serialize a sorted stream; returns the byte count (16 + 13 * count).
std::size_t write_events(const EventStream& stream, std::ostream& out);
std::size_t write_events_file(const EventStream& stream,
                              const std::filesystem::path& path);

/// Strict reader: every corruption listed in FormatErrorCode is rejected
/// with its own diagnostic. duration_us is restored as last timestamp + 1
/// (0 for an empty stream).
EventStream read_events(std::istream& in);
EventStream read_events_file(const std::filesystem::path& path);

/// Interchange/debug CSV: header "t,x,y,p", one event per line, decimal.
void write_events_csv(const EventStream& stream, std::ostream& out);
EventStream read_events_csv(std::istream& in, int width, int height);

/// Label lines: "class cx cy w h", 6-decimal fixed point.
std::vector<Box> read_labels(std::istream& in);
std::vector<Box> read_labels_file(const std::filesystem::path& path);
void write_labels(std::span<const Box> boxes, std::ostream& out);

/// Prediction lines: "image_id class confidence cx cy w h".
std::vector<Detection> read_predictions(std::istream& in);
std::vector<Detection> read_predictions_file(const std::filesystem::path& path);
void write_predictions(std::span<const Detection> preds, std::ostream& out);

}  // namespace evsynth
