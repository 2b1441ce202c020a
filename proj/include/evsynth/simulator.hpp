#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "evsynth/events.hpp"
#include "evsynth/geometry.hpp"
#include "evsynth/image.hpp"

namespace evsynth {

/// Contrast-threshold model parameters. Intensities are expected in [0, 1];
/// thresholds are in log-intensity units.
struct SimConfig {
  double contrast_threshold_pos = 0.15;
  double contrast_threshold_neg = 0.15;
  double log_eps = 1e-3;
  std::uint64_t refractory_us = 0;
  double fps = 30.0;
};

/// Per-pixel reference log-intensity and last-event timestamp. Single
/// writer per stream; initialize from the first frame.
struct PixelState {
  int width = 0;
  int height = 0;
  std::vector<double> ref_log;
  std::vector<std::int64_t> last_event_us;  // -1 while no event was emitted

  static PixelState from_frame(const GrayImage& frame, const SimConfig& cfg);
};

/// One warped frame with its timestamp and the homography that produced it
/// from the source image.
struct StreamFrame {
  GrayImage image;
  std::uint64_t t_us = 0;
  Homography from_source;
};

/// Frame i carries timestamp round(i * 1e6 / fps); timestamps are strictly
/// increasing and all frames share one geometry.
struct FrameStream {
  int width = 0;
  int height = 0;
  double fps = 0.0;
  std::vector<StreamFrame> frames;
};

/// Warp the source image once per pose. Frame i is the source viewed from
/// poses[i]; the homography is stored alongside for annotation projection.
FrameStream stream_frames(const GrayImage& image,
                          std::span<const CameraPose> poses,
                          const Intrinsics& k, double plane_depth,
                          const Border& border, double fps);

/// Events for one frame pair under linear-in-log interpolation. Each
/// crossing of reference +/- threshold emits one event at the crossing time
/// rounded to the nearest microsecond (ties away from zero); the reference
/// then moves by one threshold step. Events closer than refractory_us to
/// the pixel's previous event are suppressed. The returned batch is sorted
/// by (t, y, x) and the state is updated in place.
std::vector<Event> simulate_events(const GrayImage& prev, const GrayImage& next,
                                   std::uint64_t t0, std::uint64_t t1,
                                   const SimConfig& cfg, PixelState& state);

/// Run simulate_events over consecutive frame pairs with a shared evolving
/// state seeded from frame 0. The result is globally (t, y, x)-sorted and
/// covers [0, last frame timestamp].
EventStream simulate_sequence(const FrameStream& fs, const SimConfig& cfg);

/// Streaming equivalent of simulate_sequence(stream_frames(...)) that keeps
/// only two warped frames resident. Produces bit-identical events and also
/// returns the per-frame timestamps and homographies.
struct MotionSimResult {
  EventStream events;
  std::vector<std::uint64_t> frame_t_us;
  std::vector<Homography> frame_homographies;
};

MotionSimResult simulate_planar_motion(const GrayImage& image,
                                       std::span<const CameraPose> poses,
                                       const Intrinsics& k, double plane_depth,
                                       const Border& border,
                                       const SimConfig& cfg);

}  // namespace evsynth
