#include "evsynth/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

#include "evsynth/image_io.hpp"

namespace evsynth {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

double parse_double_token(const std::string& token, std::size_t line,
                          const char* what) {
  const std::string t = trim(token);
  double value = 0.0;
  const char* begin = t.data();
  const char* end = begin + t.size();
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc{} || ptr != end || t.empty())
    throw ParseError(line, std::string("malformed ") + what + " '" + t + "'");
  if (!std::isfinite(value))
    throw ParseError(line, std::string(what) + " is not finite");
  return value;
}

struct Rect {
  double x0, y0, x1, y1;

  double width() const { return x1 - x0; }
  double height() const { return y1 - y0; }
  double area() const { return std::max(0.0, width()) * std::max(0.0, height()); }
};

Rect bounding_rect(std::span<const std::array<double, 2>> pts) {
  Rect r{pts[0][0], pts[0][1], pts[0][0], pts[0][1]};
  for (const auto& p : pts) {
    r.x0 = std::min(r.x0, p[0]);
    r.y0 = std::min(r.y0, p[1]);
    r.x1 = std::max(r.x1, p[0]);
    r.y1 = std::max(r.y1, p[1]);
  }
  return r;
}

Rect expand(const Rect& r, double margin) {
  const double mx = margin * r.width();
  const double my = margin * r.height();
  return Rect{r.x0 - mx, r.y0 - my, r.x1 + mx, r.y1 + my};
}

Rect clip(const Rect& r, int width, int height) {
  return Rect{std::clamp(r.x0, 0.0, double(width)),
              std::clamp(r.y0, 0.0, double(height)),
              std::clamp(r.x1, 0.0, double(width)),
              std::clamp(r.y1, 0.0, double(height))};
}

Box rect_to_box(const Rect& r, int cls, int width, int height) {
  return Box{cls, (r.x0 + r.x1) / 2.0 / width, (r.y0 + r.y1) / 2.0 / height,
             r.width() / width, r.height() / height};
}

Rect box_to_rect(const Box& b, int width, int height) {
  const double cx = b.cx * width;
  const double cy = b.cy * height;
  const double w = b.w * width;
  const double h = b.h * height;
  return Rect{cx - w / 2.0, cy - h / 2.0, cx + w / 2.0, cy + h / 2.0};
}

Box derive_box(std::span<const std::array<double, 2>> pts, double margin,
               int cls, int width, int height, const char* what) {
  const Rect clipped = clip(expand(bounding_rect(pts), margin), width, height);
  if (clipped.area() <= 0.0)
    throw DataError(std::string("degenerate annotation: zero-area ") + what +
                    " box");
  return rect_to_box(clipped, cls, width, height);
}

void check_range(const IndexRange& r, std::size_t count, const char* what) {
  if (r.begin >= r.end)
    throw ConfigError(std::string("boxes: empty index range for ") + what);
  if (r.begin < 0 || static_cast<std::size_t>(r.end) > count)
    throw ConfigError(std::string("boxes: ") + what + " range [" +
                      std::to_string(r.begin) + ", " + std::to_string(r.end) +
                      ") exceeds " + std::to_string(count) + " landmarks");
}

}  // namespace

LandmarkSet parse_landmarks(std::istream& in, const std::string& origin) {
  std::string line;
  std::size_t line_no = 0;
  LandmarkSet lm;

  if (!std::getline(in, line))
    throw DataError("empty landmark file: " + origin);
  ++line_no;
  lm.image_id = trim(line);
  if (lm.image_id.empty()) throw ParseError(line_no, "empty image identifier");

  while (std::getline(in, line)) {
    ++line_no;
    const std::string stripped = trim(line);
    if (stripped.empty()) continue;  // tolerate blank trailing lines
    const auto comma = stripped.find(',');
    if (comma == std::string::npos)
      throw ParseError(line_no, "expected 'x , y', got '" + stripped + "'");
    const double x =
        parse_double_token(stripped.substr(0, comma), line_no, "x coordinate");
    const double y =
        parse_double_token(stripped.substr(comma + 1), line_no, "y coordinate");
    lm.points.push_back({x, y});
  }

  if (lm.points.empty())
    throw DataError("landmark file has no points: " + origin);
  return lm;
}

LandmarkSet load_landmarks(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open landmark file: " + path.string());
  return parse_landmarks(in, path.string());
}

AnnotationSet landmarks_to_boxes(const LandmarkSet& lm,
                                 const BoxClassConfig& cfg, int width,
                                 int height) {
  if (width < 1 || height < 1)
    throw ConfigError("landmarks_to_boxes: dimensions must be positive");
  check_range(cfg.eye_left, lm.points.size(), "left eye");
  check_range(cfg.eye_right, lm.points.size(), "right eye");

  const std::span<const std::array<double, 2>> all(lm.points);
  AnnotationSet ann;
  ann.image_id = lm.image_id;
  ann.boxes.push_back(
      derive_box(all, cfg.face_margin, kClassFace, width, height, "face"));
  ann.boxes.push_back(derive_box(
      all.subspan(cfg.eye_left.begin, cfg.eye_left.size()), cfg.eye_margin,
      kClassEye, width, height, "left eye"));
  ann.boxes.push_back(derive_box(
      all.subspan(cfg.eye_right.begin, cfg.eye_right.size()), cfg.eye_margin,
      kClassEye, width, height, "right eye"));
  return ann;
}

AnnotationSet project_annotations(const AnnotationSet& ann, const Homography& h,
                                  int width, int height,
                                  const BoxClassConfig& cfg) {
  AnnotationSet out;
  out.image_id = ann.image_id;
  for (const Box& box : ann.boxes) {
    const Rect r = box_to_rect(box, width, height);
    const std::array<std::array<double, 2>, 4> corners{
        {{r.x0, r.y0}, {r.x1, r.y0}, {r.x1, r.y1}, {r.x0, r.y1}}};
    const auto mapped = warp_points(corners, h);
    const Rect hull = bounding_rect(mapped);
    const Rect clipped = clip(hull, width, height);
    if (hull.area() <= 0.0 || clipped.area() <= 0.0) continue;
    if (clipped.area() < cfg.min_visible_fraction * hull.area()) continue;
    out.boxes.push_back(rect_to_box(clipped, box.cls, width, height));
  }
  return out;
}

std::vector<ManifestEntry> export_sample(
    const std::string& image_id, std::span<const TbrFrame> frames,
    std::span<const AnnotationSet> annotations,
    const std::filesystem::path& out_dir, const std::optional<Resize>& resize,
    std::uint64_t seed_used, const std::string& image_ext) {
  if (frames.size() != annotations.size())
    throw ConfigError("export_sample: frames and annotations differ in count");

  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(out_dir / "images", ec);
  fs::create_directories(out_dir / "labels", ec);

  std::vector<ManifestEntry> entries;
  entries.reserve(frames.size());
  for (std::size_t k = 0; k < frames.size(); ++k) {
    const std::string stem = image_id + "_" + std::to_string(k);
    const fs::path image_rel = fs::path("images") / (stem + image_ext);
    const fs::path label_rel = fs::path("labels") / (stem + ".txt");

    GrayImage img = tbr_to_gray(frames[k]);
    if (resize) img = resize_bilinear(img, resize->width, resize->height);
    save_gray(img, out_dir / image_rel);

    std::ofstream label(out_dir / label_rel);
    if (!label)
      throw IoError("cannot write label file: " + (out_dir / label_rel).string());
    char buf[128];
    for (const Box& b : annotations[k].boxes) {
      std::snprintf(buf, sizeof buf, "%d %.6f %.6f %.6f %.6f\n", b.cls, b.cx,
                    b.cy, b.w, b.h);
      label << buf;
    }

    entries.push_back(ManifestEntry{image_rel.generic_string(),
                                    label_rel.generic_string(), image_id,
                                    seed_used});
  }
  return entries;
}

std::pair<Manifest, Manifest> split_dataset(const Manifest& manifest,
                                            double ratio, std::uint64_t seed) {
  if (manifest.empty()) throw DataError("split_dataset: empty manifest");
  if (!(ratio > 0.0 && ratio < 1.0))
    throw ConfigError("split_dataset: ratio must lie in (0, 1)");

  std::vector<std::size_t> idx(manifest.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::mt19937_64 rng(seed);
  std::shuffle(idx.begin(), idx.end(), rng);

  const auto n_train = static_cast<std::size_t>(std::clamp<long long>(
      std::llround(ratio * static_cast<double>(manifest.size())), 0,
      static_cast<long long>(manifest.size())));

  Manifest train, val;
  for (std::size_t i = 0; i < idx.size(); ++i)
    (i < n_train ? train : val).push_back(manifest[idx[i]]);
  const auto by_path = [](const ManifestEntry& a, const ManifestEntry& b) {
    return a.sample_path < b.sample_path;
  };
  std::sort(train.begin(), train.end(), by_path);
  std::sort(val.begin(), val.end(), by_path);
  return {std::move(train), std::move(val)};
}

void write_manifest(const Manifest& manifest,
                    const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write manifest: " + path.string());
  for (const ManifestEntry& e : manifest)
    out << e.sample_path << '\t' << e.label_path << '\t' << e.image_id << '\t'
        << e.seed << '\n';
}

Manifest read_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open manifest: " + path.string());

  Manifest manifest;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    std::istringstream fields(line);
    ManifestEntry e;
    std::string seed_text;
    if (!std::getline(fields, e.sample_path, '\t') ||
        !std::getline(fields, e.label_path, '\t') ||
        !std::getline(fields, e.image_id, '\t') ||
        !std::getline(fields, seed_text, '\t'))
      throw ParseError(line_no, "expected 4 tab-separated manifest fields");
    seed_text = trim(seed_text);
    const char* begin = seed_text.data();
    auto [ptr, ec] =
        std::from_chars(begin, begin + seed_text.size(), e.seed);
    if (ec != std::errc{} || ptr != begin + seed_text.size())
      throw ParseError(line_no, "malformed seed '" + seed_text + "'");
    manifest.push_back(std::move(e));
  }
  return manifest;
}

std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t hash = 1469598103934665603ull;
  for (const unsigned char c : s) {
    hash ^= c;
    hash *= 1099511628211ull;
  }
  return hash;
}

}  // namespace evsynth
