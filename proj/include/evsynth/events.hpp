#pragma once

#include <cstdint>
#include <tuple>
#include <vector>

namespace evsynth {

/// One asynchronous brightness-change record. Polarity p is 1 for an
/// increasing change and 0 for a decreasing change.
struct Event {
  std::uint16_t x = 0;
  std::uint16_t y = 0;
  std::uint64_t t = 0;  // microseconds from stream start
  std::uint8_t p = 0;

  bool operator==(const Event&) const = default;
};

/// Canonical stream order: (t, y, x).
inline bool event_before(const Event& a, const Event& b) {
  return std::tie(a.t, a.y, a.x) < std::tie(b.t, b.y, b.x);
}

/// Time-sorted events plus sensor dimensions. duration_us is an exclusive
/// upper bound on event timestamps: the stream covers [0, duration_us).
struct EventStream {
  int width = 0;
  int height = 0;
  std::uint64_t duration_us = 0;
  std::vector<Event> events;

  bool operator==(const EventStream&) const = default;
};

}  // namespace evsynth
