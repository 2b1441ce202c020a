#include "support/fixtures.hpp"

#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "evsynth/image_io.hpp"

namespace evtest {

namespace {

constexpr double kPi = 3.14159265358979323846;

struct FaceLayout {
  double cx, cy;    // face center, pixels
  double rx, ry;    // face ellipse radii
  double eye_dx, eye_dy, eye_r;
  double mouth_dy, mouth_rx, mouth_ry;
};

FaceLayout layout(int width, int height, unsigned variant) {
  FaceLayout f;
  f.cx = width * (0.5 + 0.04 * std::sin(1.7 * variant + 0.3));
  f.cy = height * (0.5 + 0.04 * std::cos(2.3 * variant + 1.1));
  f.rx = width * (0.26 + 0.02 * std::sin(0.9 * variant));
  f.ry = height * (0.32 + 0.02 * std::cos(1.3 * variant));
  f.eye_dx = f.rx * 0.42;
  f.eye_dy = -f.ry * 0.25;
  f.eye_r = std::min(f.rx, f.ry) * 0.16;
  f.mouth_dy = f.ry * 0.45;
  f.mouth_rx = f.rx * 0.38;
  f.mouth_ry = f.ry * 0.12;
  return f;
}

bool in_ellipse(double x, double y, double cx, double cy, double rx, double ry) {
  const double nx = (x - cx) / rx;
  const double ny = (y - cy) / ry;
  return nx * nx + ny * ny <= 1.0;
}

}  // namespace

TempDir::TempDir(const std::string& tag) {
  static std::atomic<unsigned> counter{0};
  const auto base = std::filesystem::temp_directory_path();
  path_ = base / ("evsynth_" + tag + "_" + std::to_string(::getpid()) + "_" +
                  std::to_string(counter.fetch_add(1)));
  std::filesystem::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  std::filesystem::remove_all(path_, ec);
}

GrayImage synth_face_image(int width, int height, unsigned variant) {
  const FaceLayout f = layout(width, height, variant);
  GrayImage img(width, height);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      double v = 0.22 + 0.10 * (double(x) / width) + 0.05 * (double(y) / height);
      if (in_ellipse(x, y, f.cx, f.cy, f.rx, f.ry)) v = 0.82;
      if (in_ellipse(x, y, f.cx - f.eye_dx, f.cy + f.eye_dy, f.eye_r, f.eye_r) ||
          in_ellipse(x, y, f.cx + f.eye_dx, f.cy + f.eye_dy, f.eye_r, f.eye_r))
        v = 0.12;
      if (in_ellipse(x, y, f.cx, f.cy + f.mouth_dy, f.mouth_rx, f.mouth_ry))
        v = 0.35;
      img.at(x, y) = v;
    }
  }
  return img;
}

LandmarkSet synth_face_landmarks(int width, int height, unsigned variant) {
  const FaceLayout f = layout(width, height, variant);
  LandmarkSet lm;
  lm.image_id = "face" + std::to_string(variant);

  const auto ring = [&](double cx, double cy, double rx, double ry, int n,
                        double a0, double a1) {
    for (int i = 0; i < n; ++i) {
      const double a = a0 + (a1 - a0) * (n == 1 ? 0.0 : double(i) / (n - 1));
      lm.points.push_back({cx + rx * std::cos(a), cy + ry * std::sin(a)});
    }
  };

  // Helen 194-point component order:
  // 0-40 jaw, 41-57 nose, 58-113 mouth, 114-133 right eye,
  // 134-153 left eye, 154-193 brows.
  ring(f.cx, f.cy, f.rx, f.ry, 41, 0.1 * kPi, 0.9 * kPi);  // lower arc
  ring(f.cx, f.cy + f.ry * 0.1, f.rx * 0.12, f.ry * 0.18, 17, 0.0, 2.0 * kPi);
  ring(f.cx, f.cy + f.mouth_dy, f.mouth_rx, f.mouth_ry, 56, 0.0, 2.0 * kPi);
  ring(f.cx + f.eye_dx, f.cy + f.eye_dy, f.eye_r, f.eye_r, 20, 0.0, 2.0 * kPi);
  ring(f.cx - f.eye_dx, f.cy + f.eye_dy, f.eye_r, f.eye_r, 20, 0.0, 2.0 * kPi);
  ring(f.cx + f.eye_dx, f.cy + f.eye_dy - f.eye_r * 2.0, f.eye_r * 1.4,
       f.eye_r * 0.5, 20, kPi, 2.0 * kPi);
  ring(f.cx - f.eye_dx, f.cy + f.eye_dy - f.eye_r * 2.0, f.eye_r * 1.4,
       f.eye_r * 0.5, 20, kPi, 2.0 * kPi);

  // keep the fixture inside the frame
  for (auto& p : lm.points) {
    p[0] = std::clamp(p[0], 0.0, double(width - 1));
    p[1] = std::clamp(p[1], 0.0, double(height - 1));
  }
  return lm;
}

void write_fixture_corpus(const std::filesystem::path& dir, int count,
                          int width, int height) {
  std::filesystem::create_directories(dir);
  char buf[64];
  for (int i = 0; i < count; ++i) {
    std::snprintf(buf, sizeof buf, "face%03d", i);
    const std::string stem = buf;
    save_gray(synth_face_image(width, height, unsigned(i)),
              dir / (stem + ".pgm"));

    const LandmarkSet lm = synth_face_landmarks(width, height, unsigned(i));
    std::ofstream out(dir / (stem + ".txt"));
    out << stem << "\n";
    for (const auto& p : lm.points) {
      std::snprintf(buf, sizeof buf, "%.3f , %.3f\n", p[0], p[1]);
      out << buf;
    }
  }
}

EventStream random_event_stream(std::mt19937_64& rng, std::size_t count,
                                int width, int height,
                                std::uint64_t duration_us) {
  std::uniform_int_distribution<std::uint64_t> time(0, duration_us - 1);
  std::uniform_int_distribution<int> xs(0, width - 1);
  std::uniform_int_distribution<int> ys(0, height - 1);
  std::uniform_int_distribution<int> ps(0, 1);

  EventStream stream;
  stream.width = width;
  stream.height = height;
  stream.duration_us = duration_us;
  stream.events.reserve(count);
  for (std::size_t i = 0; i < count; ++i)
    stream.events.push_back(Event{std::uint16_t(xs(rng)), std::uint16_t(ys(rng)),
                                  time(rng), std::uint8_t(ps(rng))});
  std::sort(stream.events.begin(), stream.events.end(), event_before);
  return stream;
}

namespace {

double oracle_iou(const Box& a, const Box& b) {
  const double ax0 = a.cx - a.w / 2, ax1 = a.cx + a.w / 2;
  const double ay0 = a.cy - a.h / 2, ay1 = a.cy + a.h / 2;
  const double bx0 = b.cx - b.w / 2, bx1 = b.cx + b.w / 2;
  const double by0 = b.cy - b.h / 2, by1 = b.cy + b.h / 2;
  const double iw = std::max(0.0, std::min(ax1, bx1) - std::max(ax0, bx0));
  const double ih = std::max(0.0, std::min(ay1, by1) - std::max(ay0, by0));
  const double inter = iw * ih;
  const double uni = a.w * a.h + b.w * b.h - inter;
  return inter <= 0.0 ? 0.0 : inter / uni;
}

/// TP count of the first k class predictions under fresh greedy matching.
long oracle_tp(std::span<const Detection* const> ordered, std::size_t k,
               const std::map<std::string, AnnotationSet>& gts, int cls,
               double threshold) {
  std::map<std::string, std::vector<bool>> used;
  long tp = 0;
  for (std::size_t i = 0; i < k; ++i) {
    const Detection& det = *ordered[i];
    const auto it = gts.find(det.image_id);
    if (it == gts.end()) continue;
    auto& claimed = used.try_emplace(det.image_id,
                                     std::vector<bool>(it->second.boxes.size(),
                                                       false))
                        .first->second;
    double best_iou = 0.0;
    std::ptrdiff_t best = -1;
    for (std::size_t g = 0; g < it->second.boxes.size(); ++g) {
      if (claimed[g] || it->second.boxes[g].cls != cls) continue;
      const double v = oracle_iou(det.box, it->second.boxes[g]);
      if (v > best_iou) {
        best_iou = v;
        best = std::ptrdiff_t(g);
      }
    }
    if (best >= 0 && best_iou >= threshold) {
      claimed[std::size_t(best)] = true;
      ++tp;
    }
  }
  return tp;
}

}  // namespace

double oracle_average_precision(std::span<const Detection> preds,
                                const std::map<std::string, AnnotationSet>& gts,
                                int cls, const EvalConfig& cfg) {
  std::size_t gt_count = 0;
  for (const auto& [id, ann] : gts)
    for (const Box& b : ann.boxes)
      if (b.cls == cls) ++gt_count;

  std::vector<const Detection*> ordered;
  for (const Detection& d : preds)
    if (d.cls == cls) ordered.push_back(&d);
  std::stable_sort(ordered.begin(), ordered.end(),
                   [](const Detection* a, const Detection* b) {
                     return a->confidence > b->confidence;
                   });
  if (ordered.empty()) return 0.0;

  std::vector<double> precision, recall;
  for (std::size_t k = 1; k <= ordered.size(); ++k) {
    const long tp = oracle_tp(ordered, k, gts, cls, cfg.iou_threshold);
    precision.push_back(double(tp) / double(k));
    recall.push_back(double(tp) / double(gt_count));
  }

  double ap = 0.0;
  double prev = 0.0;
  for (std::size_t k = 0; k < recall.size(); ++k) {
    double best_p = 0.0;
    for (std::size_t j = k; j < precision.size(); ++j)
      best_p = std::max(best_p, precision[j]);
    ap += (recall[k] - prev) * best_p;
    prev = recall[k];
  }
  return ap;
}

}  // namespace evtest
