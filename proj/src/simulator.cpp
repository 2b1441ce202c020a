#include "evsynth/simulator.hpp"

#include <algorithm>
#include <cmath>

// Contrast-threshold event model: per-pixel log intensity is interpolated
// linearly between consecutive frames; every time it moves one threshold
// away from the pixel's reference level, one event fires and the reference
// follows. The reference is reset from the first frame of a stream.

namespace evsynth {

namespace {

// Absorbs floating-point noise when a stimulus lands exactly on a
// threshold multiple; see the crossing loop below.
constexpr double kCrossingTol = 1e-9;

double log_intensity(double v, double log_eps) {
  return std::log(std::max(v, log_eps));
}

void validate_sim_config(const SimConfig& cfg) {
  if (!(cfg.contrast_threshold_pos > 0.0) || !(cfg.contrast_threshold_neg > 0.0))
    throw ConfigError("sim: contrast thresholds must be positive");
  if (!(cfg.log_eps > 0.0)) throw ConfigError("sim: log_eps must be positive");
  if (!(cfg.fps > 0.0)) throw ConfigError("sim: fps must be positive");
  if (cfg.fps > 1e6)
    throw ConfigError("sim: fps above 1e6 collapses microsecond timestamps");
}

std::uint64_t frame_timestamp(std::size_t index, double fps) {
  return static_cast<std::uint64_t>(
      std::llround(static_cast<double>(index) * 1e6 / fps));
}

EventStream finalize_stream(std::vector<Event>&& events, int width, int height,
                            std::uint64_t last_frame_t) {
  std::stable_sort(events.begin(), events.end(), event_before);
  EventStream out;
  out.width = width;
  out.height = height;
  out.duration_us = last_frame_t + 1;  // exclusive bound, covers [0, last_t]
  out.events = std::move(events);
  return out;
}

}  // namespace

PixelState PixelState::from_frame(const GrayImage& frame, const SimConfig& cfg) {
  PixelState st;
  st.width = frame.width;
  st.height = frame.height;
  st.ref_log.resize(frame.px.size());
  for (std::size_t i = 0; i < frame.px.size(); ++i)
    st.ref_log[i] = log_intensity(frame.px[i], cfg.log_eps);
  st.last_event_us.assign(frame.px.size(), -1);
  return st;
}

FrameStream stream_frames(const GrayImage& image,
                          std::span<const CameraPose> poses,
                          const Intrinsics& k, double plane_depth,
                          const Border& border, double fps) {
  if (image.empty()) throw ConfigError("stream_frames: empty source image");
  if (poses.empty()) throw ConfigError("stream_frames: empty pose list");
  if (!(fps > 0.0) || fps > 1e6)
    throw ConfigError("stream_frames: fps must lie in (0, 1e6]");

  FrameStream fs;
  fs.width = image.width;
  fs.height = image.height;
  fs.fps = fps;
  fs.frames.reserve(poses.size());
  for (std::size_t i = 0; i < poses.size(); ++i) {
    const Homography h = pose_to_homography(poses[i], k, plane_depth);
    fs.frames.push_back(
        StreamFrame{warp_image(image, h, border), frame_timestamp(i, fps), h});
  }
  return fs;
}

std::vector<Event> simulate_events(const GrayImage& prev, const GrayImage& next,
                                   std::uint64_t t0, std::uint64_t t1,
                                   const SimConfig& cfg, PixelState& state) {
  validate_sim_config(cfg);
  if (!prev.same_dims(next) || prev.width != state.width ||
      prev.height != state.height)
    throw StateError("simulate_events: frame/state dimension mismatch");
  if (t1 <= t0) throw StateError("simulate_events: t1 must exceed t0");

  const double span = static_cast<double>(t1 - t0);
  std::vector<Event> events;

  for (int y = 0; y < prev.height; ++y) {
    for (int x = 0; x < prev.width; ++x) {
      const std::size_t i = static_cast<std::size_t>(y) * prev.width + x;
      const double l0 = log_intensity(prev.px[i], cfg.log_eps);
      const double l1 = log_intensity(next.px[i], cfg.log_eps);
      if (l1 == l0) continue;

      const bool rising = l1 > l0;
      const double step = rising ? cfg.contrast_threshold_pos
                                 : -cfg.contrast_threshold_neg;
      double ref = state.ref_log[i];
      for (;;) {
        const double level = ref + step;
        const bool crossed = rising
                                 ? (level > l0 && level <= l1 + kCrossingTol)
                                 : (level < l0 && level >= l1 - kCrossingTol);
        if (!crossed) break;
        double frac = (level - l0) / (l1 - l0);
        if (frac > 1.0) frac = 1.0;
        const std::uint64_t t = t0 + static_cast<std::uint64_t>(
                                         std::llround(frac * span));
        const std::int64_t last = state.last_event_us[i];
        const bool suppressed =
            cfg.refractory_us > 0 && last >= 0 &&
            t - static_cast<std::uint64_t>(last) < cfg.refractory_us;
        if (!suppressed) {
          events.push_back(Event{static_cast<std::uint16_t>(x),
                                 static_cast<std::uint16_t>(y), t,
                                 static_cast<std::uint8_t>(rising ? 1 : 0)});
          state.last_event_us[i] = static_cast<std::int64_t>(t);
        }
        ref = level;  // the reference follows every crossing, emitted or not
      }
      state.ref_log[i] = ref;
    }
  }

  std::stable_sort(events.begin(), events.end(), event_before);
  return events;
}

EventStream simulate_sequence(const FrameStream& fs, const SimConfig& cfg) {
  if (fs.frames.empty()) throw ConfigError("simulate_sequence: empty stream");
  PixelState state = PixelState::from_frame(fs.frames.front().image, cfg);
  std::vector<Event> all;
  for (std::size_t i = 1; i < fs.frames.size(); ++i) {
    auto batch = simulate_events(fs.frames[i - 1].image, fs.frames[i].image,
                                 fs.frames[i - 1].t_us, fs.frames[i].t_us, cfg,
                                 state);
    all.insert(all.end(), batch.begin(), batch.end());
  }
  return finalize_stream(std::move(all), fs.width, fs.height,
                         fs.frames.back().t_us);
}

MotionSimResult simulate_planar_motion(const GrayImage& image,
                                       std::span<const CameraPose> poses,
                                       const Intrinsics& k, double plane_depth,
                                       const Border& border,
                                       const SimConfig& cfg) {
  if (image.empty()) throw ConfigError("simulate_planar_motion: empty image");
  if (poses.empty()) throw ConfigError("simulate_planar_motion: empty pose list");
  validate_sim_config(cfg);

  MotionSimResult res;
  res.frame_t_us.reserve(poses.size());
  res.frame_homographies.reserve(poses.size());

  Homography h = pose_to_homography(poses[0], k, plane_depth);
  GrayImage prev = warp_image(image, h, border);
  res.frame_t_us.push_back(frame_timestamp(0, cfg.fps));
  res.frame_homographies.push_back(h);

  PixelState state = PixelState::from_frame(prev, cfg);
  std::vector<Event> all;
  for (std::size_t i = 1; i < poses.size(); ++i) {
    h = pose_to_homography(poses[i], k, plane_depth);
    GrayImage next = warp_image(image, h, border);
    const std::uint64_t t = frame_timestamp(i, cfg.fps);
    auto batch = simulate_events(prev, next, res.frame_t_us.back(), t, cfg, state);
    all.insert(all.end(), batch.begin(), batch.end());
    res.frame_t_us.push_back(t);
    res.frame_homographies.push_back(h);
    prev = std::move(next);
  }
  res.events = finalize_stream(std::move(all), image.width, image.height,
                               res.frame_t_us.back());
  return res;
}

}  // namespace evsynth
