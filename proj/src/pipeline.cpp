#include "evsynth/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "evsynth/formats.hpp"
#include "evsynth/image_io.hpp"
#include "evsynth/simulator.hpp"

namespace evsynth {

namespace fs = std::filesystem;

namespace {

const std::set<std::string> kImageExts{".png", ".jpg", ".jpeg", ".pgm", ".bmp"};

MotionConfig motion_for_sample(const PipelineConfig& cfg,
                               const std::string& image_id) {
  MotionConfig m = cfg.motion;
  m.seed = sample_seed(cfg, image_id);
  return m;
}

MotionSimResult run_motion_sim(const GrayImage& image,
                               const std::string& image_id,
                               const PipelineConfig& cfg) {
  const Intrinsics k = resolve_intrinsics(cfg, image.width, image.height);
  const auto poses = sample_trajectory(motion_for_sample(cfg, image_id));
  return simulate_planar_motion(image, poses, k, cfg.plane_depth, cfg.border,
                                cfg.sim);
}

void write_homography_sidecar(const MotionSimResult& sim, const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write homography sidecar: " + path.string());
  out << "# t_us h00 h01 h02 h10 h11 h12 h20 h21 h22\n";
  char buf[64];
  for (std::size_t i = 0; i < sim.frame_t_us.size(); ++i) {
    out << sim.frame_t_us[i];
    for (const double v : sim.frame_homographies[i].m) {
      std::snprintf(buf, sizeof buf, " %.17g", v);
      out << buf;
    }
    out << '\n';
  }
}

TbrConfig effective_tbr(const PipelineConfig& cfg, std::uint64_t duration_us) {
  return cfg.single_frame ? single_frame_config(cfg.tbr, duration_us) : cfg.tbr;
}

/// Homography governing the labels of one TBR frame: the motion frame at
/// the temporal midpoint of the frame's window span.
const Homography& label_homography(const MotionSimResult& sim,
                                   const TbrFrame& frame,
                                   const TbrConfig& tbr) {
  const std::uint64_t span_start = frame.first_window_index * tbr.delta_t_us;
  const std::uint64_t span_end =
      span_start + static_cast<std::uint64_t>(tbr.n_bits) * tbr.delta_t_us;
  const std::uint64_t mid = span_start + (span_end - span_start) / 2;
  auto it = std::upper_bound(sim.frame_t_us.begin(), sim.frame_t_us.end(), mid);
  const std::size_t idx =
      it == sim.frame_t_us.begin()
          ? 0
          : static_cast<std::size_t>(it - sim.frame_t_us.begin()) - 1;
  return sim.frame_homographies[idx];
}

struct CorpusPair {
  std::string stem;
  fs::path image_path;
  fs::path landmark_path;
};

std::vector<CorpusPair> scan_corpus(const fs::path& corpus_dir) {
  if (!fs::is_directory(corpus_dir))
    throw IoError("corpus directory not found: " + corpus_dir.string());

  std::map<std::string, fs::path> images, landmarks;
  for (const auto& entry : fs::directory_iterator(corpus_dir)) {
    if (!entry.is_regular_file()) continue;
    std::string ext = entry.path().extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    const std::string stem = entry.path().stem().string();
    if (kImageExts.contains(ext))
      images[stem] = entry.path();
    else if (ext == ".txt")
      landmarks[stem] = entry.path();
  }

  std::string problems;
  for (const auto& [stem, path] : images)
    if (!landmarks.contains(stem))
      problems += (problems.empty() ? "" : ", ") + stem + " (no landmark file)";
  for (const auto& [stem, path] : landmarks)
    if (!images.contains(stem))
      problems += (problems.empty() ? "" : ", ") + stem + " (no image)";
  if (!problems.empty())
    throw DataError("image/landmark mismatch: " + problems);
  if (images.empty()) throw DataError("empty corpus: " + corpus_dir.string());

  std::vector<CorpusPair> pairs;
  pairs.reserve(images.size());
  for (const auto& [stem, path] : images)
    pairs.push_back(CorpusPair{stem, path, landmarks.at(stem)});
  return pairs;  // map iteration: already sorted by stem
}

std::string stem_of(const std::string& rel_path) {
  return fs::path(rel_path).stem().string();
}

}  // namespace

SimulateSummary simulate_image_file(const fs::path& image_path,
                                    const fs::path& out_dir,
                                    const PipelineConfig& cfg) {
  const std::string image_id = image_path.stem().string();
  const GrayImage image = load_gray(image_path);
  const MotionSimResult sim = run_motion_sim(image, image_id, cfg);

  std::error_code ec;
  fs::create_directories(out_dir, ec);
  SimulateSummary summary;
  summary.image_id = image_id;
  summary.events_path = out_dir / (image_id + ".evs");
  summary.homography_path = out_dir / (image_id + ".homog.txt");
  summary.event_count = sim.events.events.size();
  summary.duration_us = sim.events.duration_us;
  write_events_file(sim.events, summary.events_path);
  write_homography_sidecar(sim, summary.homography_path);
  return summary;
}

EncodeSummary encode_events_file(const fs::path& events_path,
                                 const fs::path& out_dir,
                                 const PipelineConfig& cfg) {
  const EventStream stream = read_events_file(events_path);
  const TbrConfig tbr = effective_tbr(cfg, stream.duration_us);
  const auto frames = stream_encode(stream, tbr);

  std::error_code ec;
  fs::create_directories(out_dir, ec);
  EncodeSummary summary;
  summary.stream_id = events_path.stem().string();
  for (std::size_t k = 0; k < frames.size(); ++k) {
    fs::path out = out_dir / (summary.stream_id + "_" + std::to_string(k) +
                              ".png");
    GrayImage img = tbr_to_gray(frames[k]);
    if (cfg.resize) img = resize_bilinear(img, cfg.resize->width,
                                          cfg.resize->height);
    save_gray(img, out);
    summary.frame_paths.push_back(std::move(out));
  }
  return summary;
}

ExportSummary export_corpus(const fs::path& corpus_dir, const fs::path& out_dir,
                            const PipelineConfig& cfg) {
  const auto pairs = scan_corpus(corpus_dir);

  std::error_code ec;
  fs::create_directories(out_dir / "images", ec);
  fs::create_directories(out_dir / "labels", ec);

  std::vector<Manifest> per_image(pairs.size());
  std::vector<std::exception_ptr> failures(pairs.size());
  std::atomic<std::size_t> next{0};

  const auto worker = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= pairs.size()) return;
      try {
        const CorpusPair& pair = pairs[i];
        const GrayImage image = load_gray(pair.image_path);
        const LandmarkSet lm = load_landmarks(pair.landmark_path);
        const AnnotationSet base =
            landmarks_to_boxes(lm, cfg.boxes, image.width, image.height);

        const MotionSimResult sim = run_motion_sim(image, pair.stem, cfg);
        const TbrConfig tbr = effective_tbr(cfg, sim.events.duration_us);
        const auto frames = stream_encode(sim.events, tbr);

        std::vector<AnnotationSet> annotations;
        annotations.reserve(frames.size());
        for (const TbrFrame& frame : frames)
          annotations.push_back(
              project_annotations(base, label_homography(sim, frame, tbr),
                                  image.width, image.height, cfg.boxes));

        per_image[i] =
            export_sample(pair.stem, frames, annotations, out_dir, cfg.resize,
                          sample_seed(cfg, pair.stem));
      } catch (...) {
        failures[i] = std::current_exception();
      }
    }
  };

  const int jobs = std::max(1, std::min<int>(cfg.jobs,
                                             static_cast<int>(pairs.size())));
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> threads;
    threads.reserve(static_cast<std::size_t>(jobs));
    for (int j = 0; j < jobs; ++j) threads.emplace_back(worker);
    for (auto& t : threads) t.join();
  }

  for (std::size_t i = 0; i < pairs.size(); ++i) {
    if (!failures[i]) continue;
    try {
      std::rethrow_exception(failures[i]);
    } catch (const std::exception& e) {
      throw EvsError("export of '" + pairs[i].stem + "' failed: " + e.what());
    }
  }

  ExportSummary summary;
  summary.image_count = pairs.size();
  for (const auto& entries : per_image)  // pairs are stem-sorted
    summary.manifest.insert(summary.manifest.end(), entries.begin(),
                            entries.end());

  auto [train, val] = split_dataset(summary.manifest, cfg.train_ratio, cfg.seed);
  summary.train = std::move(train);
  summary.val = std::move(val);

  write_manifest(summary.manifest, out_dir / "manifest.tsv");
  const auto write_list = [&](const Manifest& m, const fs::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write split list: " + path.string());
    for (const ManifestEntry& e : m) out << e.sample_path << '\n';
  };
  write_list(summary.train, out_dir / "train.txt");
  write_list(summary.val, out_dir / "val.txt");
  return summary;
}

MetricsReport evaluate_dataset(const fs::path& predictions_path,
                               const fs::path& dataset_dir,
                               const PipelineConfig& cfg, EvalSplit split) {
  Manifest manifest = read_manifest(dataset_dir / "manifest.tsv");
  if (split != EvalSplit::all) {
    const fs::path list_path =
        dataset_dir / (split == EvalSplit::train ? "train.txt" : "val.txt");
    std::ifstream in(list_path);
    if (!in) throw IoError("cannot open split list: " + list_path.string());
    std::set<std::string> keep;
    std::string line;
    while (std::getline(in, line))
      if (!line.empty()) keep.insert(line);
    std::erase_if(manifest, [&](const ManifestEntry& e) {
      return !keep.contains(e.sample_path);
    });
  }
  if (manifest.empty()) throw DataError("no samples selected for evaluation");

  std::map<std::string, AnnotationSet> gts;
  for (const ManifestEntry& e : manifest) {
    const std::string sample_id = stem_of(e.sample_path);
    AnnotationSet ann;
    ann.image_id = sample_id;
    ann.boxes = read_labels_file(dataset_dir / e.label_path);
    gts.emplace(sample_id, std::move(ann));
  }

  const auto preds = read_predictions_file(predictions_path);
  return evaluate(preds, gts, cfg.eval);
}

std::string describe_file(const fs::path& path) {
  std::ifstream probe(path, std::ios::binary);
  if (!probe) throw IoError("cannot open: " + path.string());
  std::array<char, 4> head{};
  probe.read(head.data(), head.size());
  const auto head_len = static_cast<std::size_t>(probe.gcount());

  std::ostringstream out;
  if (head_len == 4 &&
      std::equal(kEvsMagic.begin(), kEvsMagic.end(),
                 reinterpret_cast<const unsigned char*>(head.data()))) {
    const EventStream stream = read_events_file(path);
    out << "format: EVS1\n"
        << "dimensions: " << stream.width << "x" << stream.height << "\n"
        << "events: " << stream.events.size() << "\n";
    if (!stream.events.empty())
      out << "first_t_us: " << stream.events.front().t << "\n"
          << "last_t_us: " << stream.events.back().t << "\n";
    out << "duration_us: " << stream.duration_us << "\n";
    return out.str();
  }

  // text: labels (5 fields) or predictions (7 fields)
  std::ifstream text(path);
  std::string line;
  std::size_t field_count = 0;
  while (std::getline(text, line)) {
    std::istringstream fields(line);
    std::string tok;
    std::size_t n = 0;
    while (fields >> tok) ++n;
    if (n > 0) {
      field_count = n;
      break;
    }
  }

  if (field_count == 0) {
    out << "format: labels\nboxes: 0\n";
    return out.str();
  }
  if (field_count == 5) {
    const auto boxes = read_labels_file(path);
    std::size_t faces = 0, eyes = 0;
    for (const Box& b : boxes) (b.cls == kClassFace ? faces : eyes) += 1;
    out << "format: labels\nboxes: " << boxes.size() << "\nface: " << faces
        << "\neye: " << eyes << "\n";
    return out.str();
  }
  if (field_count == 7) {
    const auto preds = read_predictions_file(path);
    std::size_t faces = 0, eyes = 0;
    std::set<std::string> ids;
    for (const Detection& d : preds) {
      (d.cls == kClassFace ? faces : eyes) += 1;
      ids.insert(d.image_id);
    }
    out << "format: predictions\ndetections: " << preds.size()
        << "\nimages: " << ids.size() << "\nface: " << faces
        << "\neye: " << eyes << "\n";
    return out.str();
  }
  throw DataError("unknown file type: " + path.string());
}

}  // namespace evsynth
