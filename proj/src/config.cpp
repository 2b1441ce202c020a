#include "evsynth/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace evsynth {

namespace {

using nlohmann::json;

bool is_comment_key(const std::string& key) {
  return key == "comment" || key == "_comment";
}

void check_keys(const json& obj, const std::set<std::string>& allowed,
                const std::string& section) {
  for (const auto& [key, value] : obj.items())
    if (!allowed.contains(key) && !is_comment_key(key))
      throw ConfigError("config: unknown key '" + key + "' in " + section);
}

template <typename T>
void read_field(const json& obj, const char* key, T& out) {
  if (const auto it = obj.find(key); it != obj.end()) out = it->get<T>();
}

void read_array6(const json& obj, const char* key, std::array<double, 6>& out,
                 const std::string& section) {
  const auto it = obj.find(key);
  if (it == obj.end()) return;
  if (!it->is_array() || it->size() != 6)
    throw ConfigError("config: " + section + "." + key +
                      " must be an array of 6 numbers");
  for (std::size_t i = 0; i < 6; ++i) out[i] = (*it)[i].get<double>();
}

void parse_motion(const json& obj, MotionConfig& m) {
  check_keys(obj, {"pause_probability", "max_frames", "step_std",
                   "amplitude_clamp"},
             "motion");
  read_field(obj, "pause_probability", m.pause_probability);
  read_field(obj, "max_frames", m.max_frames);
  read_array6(obj, "step_std", m.step_std, "motion");
  read_array6(obj, "amplitude_clamp", m.amplitude_clamp, "motion");
}

void parse_camera(const json& obj, PipelineConfig& cfg) {
  check_keys(obj, {"focal", "principal_point", "plane_depth"}, "camera");
  read_field(obj, "focal", cfg.focal);
  read_field(obj, "plane_depth", cfg.plane_depth);
  if (const auto it = obj.find("principal_point"); it != obj.end()) {
    if (it->is_null()) {
      cfg.principal_point.reset();
    } else {
      if (!it->is_array() || it->size() != 2)
        throw ConfigError("config: camera.principal_point must be null or "
                          "[cx, cy]");
      cfg.principal_point = {{(*it)[0].get<double>(), (*it)[1].get<double>()}};
    }
  }
}

void parse_border(const json& obj, Border& b) {
  check_keys(obj, {"mode", "value"}, "border");
  if (const auto it = obj.find("mode"); it != obj.end()) {
    const auto mode = it->get<std::string>();
    if (mode == "mirrored")
      b.mode = BorderMode::mirrored;
    else if (mode == "constant")
      b.mode = BorderMode::constant;
    else
      throw ConfigError("config: border.mode must be 'mirrored' or 'constant'");
  }
  read_field(obj, "value", b.value);
}

void parse_sim(const json& obj, SimConfig& s) {
  check_keys(obj, {"contrast_threshold_pos", "contrast_threshold_neg",
                   "log_eps", "refractory_us", "fps"},
             "sim");
  read_field(obj, "contrast_threshold_pos", s.contrast_threshold_pos);
  read_field(obj, "contrast_threshold_neg", s.contrast_threshold_neg);
  read_field(obj, "log_eps", s.log_eps);
  read_field(obj, "refractory_us", s.refractory_us);
  read_field(obj, "fps", s.fps);
}

void parse_tbr(const json& obj, PipelineConfig& cfg) {
  check_keys(obj, {"delta_t_us", "n_bits", "bit_order", "normalizer",
                   "single_frame"},
             "tbr");
  read_field(obj, "delta_t_us", cfg.tbr.delta_t_us);
  read_field(obj, "n_bits", cfg.tbr.n_bits);
  read_field(obj, "single_frame", cfg.single_frame);
  if (const auto it = obj.find("bit_order"); it != obj.end()) {
    const auto order = it->get<std::string>();
    if (order == "earliest_msb")
      cfg.tbr.bit_order = BitOrder::earliest_msb;
    else if (order == "latest_msb")
      cfg.tbr.bit_order = BitOrder::latest_msb;
    else
      throw ConfigError("config: tbr.bit_order must be 'earliest_msb' or "
                        "'latest_msb'");
  }
  if (const auto it = obj.find("normalizer"); it != obj.end()) {
    const auto norm = it->get<std::string>();
    if (norm == "max_code")
      cfg.tbr.normalizer = Normalizer::max_code;
    else if (norm == "window_count")
      cfg.tbr.normalizer = Normalizer::window_count;
    else
      throw ConfigError("config: tbr.normalizer must be 'max_code' or "
                        "'window_count'");
  }
}

void parse_range(const json& obj, const char* key, IndexRange& r) {
  const auto it = obj.find(key);
  if (it == obj.end()) return;
  if (!it->is_array() || it->size() != 2)
    throw ConfigError(std::string("config: boxes.") + key +
                      " must be [begin, end)");
  r.begin = (*it)[0].get<int>();
  r.end = (*it)[1].get<int>();
}

void parse_boxes(const json& obj, BoxClassConfig& b) {
  check_keys(obj, {"eye_left_indices", "eye_right_indices", "face_margin",
                   "eye_margin", "min_visible_fraction"},
             "boxes");
  parse_range(obj, "eye_left_indices", b.eye_left);
  parse_range(obj, "eye_right_indices", b.eye_right);
  read_field(obj, "face_margin", b.face_margin);
  read_field(obj, "eye_margin", b.eye_margin);
  read_field(obj, "min_visible_fraction", b.min_visible_fraction);
}

void parse_export(const json& obj, PipelineConfig& cfg) {
  check_keys(obj, {"train_ratio", "resize"}, "export");
  read_field(obj, "train_ratio", cfg.train_ratio);
  if (const auto it = obj.find("resize"); it != obj.end()) {
    if (it->is_null()) {
      cfg.resize.reset();
    } else {
      if (!it->is_array() || it->size() != 2)
        throw ConfigError("config: export.resize must be null or [w, h]");
      cfg.resize = Resize{(*it)[0].get<int>(), (*it)[1].get<int>()};
    }
  }
}

}  // namespace

PipelineConfig parse_pipeline_config(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: invalid JSON: ") + e.what());
  }
  if (!root.is_object()) throw ConfigError("config: root must be an object");

  check_keys(root,
             {"seed", "jobs", "motion", "camera", "border", "sim", "tbr",
              "boxes", "eval", "export"},
             "root");

  PipelineConfig cfg;
  read_field(root, "seed", cfg.seed);
  read_field(root, "jobs", cfg.jobs);
  if (root.contains("motion")) parse_motion(root["motion"], cfg.motion);
  if (root.contains("camera")) parse_camera(root["camera"], cfg);
  if (root.contains("border")) parse_border(root["border"], cfg.border);
  if (root.contains("sim")) parse_sim(root["sim"], cfg.sim);
  if (root.contains("tbr")) parse_tbr(root["tbr"], cfg);
  if (root.contains("boxes")) parse_boxes(root["boxes"], cfg.boxes);
  if (root.contains("eval")) {
    check_keys(root["eval"], {"iou_threshold"}, "eval");
    read_field(root["eval"], "iou_threshold", cfg.eval.iou_threshold);
  }
  if (root.contains("export")) parse_export(root["export"], cfg);

  if (cfg.jobs < 1) throw ConfigError("config: jobs must be >= 1");
  return cfg;
}

PipelineConfig load_pipeline_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file: " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_pipeline_config(text.str());
}

std::string dump_pipeline_config(const PipelineConfig& cfg) {
  json root;
  root["seed"] = cfg.seed;
  root["jobs"] = cfg.jobs;
  root["motion"] = {{"pause_probability", cfg.motion.pause_probability},
                    {"max_frames", cfg.motion.max_frames},
                    {"step_std", cfg.motion.step_std},
                    {"amplitude_clamp", cfg.motion.amplitude_clamp}};
  root["camera"]["focal"] = cfg.focal;
  root["camera"]["principal_point"] =
      cfg.principal_point ? json(*cfg.principal_point) : json(nullptr);
  root["camera"]["plane_depth"] = cfg.plane_depth;
  root["border"] = {
      {"mode", cfg.border.mode == BorderMode::mirrored ? "mirrored" : "constant"},
      {"value", cfg.border.value}};
  root["sim"] = {{"contrast_threshold_pos", cfg.sim.contrast_threshold_pos},
                 {"contrast_threshold_neg", cfg.sim.contrast_threshold_neg},
                 {"log_eps", cfg.sim.log_eps},
                 {"refractory_us", cfg.sim.refractory_us},
                 {"fps", cfg.sim.fps}};
  root["tbr"] = {
      {"delta_t_us", cfg.tbr.delta_t_us},
      {"n_bits", cfg.tbr.n_bits},
      {"bit_order", cfg.tbr.bit_order == BitOrder::earliest_msb ? "earliest_msb"
                                                                : "latest_msb"},
      {"normalizer", cfg.tbr.normalizer == Normalizer::max_code ? "max_code"
                                                                : "window_count"},
      {"single_frame", cfg.single_frame}};
  root["boxes"] = {
      {"eye_left_indices", json::array({cfg.boxes.eye_left.begin,
                                        cfg.boxes.eye_left.end})},
      {"eye_right_indices", json::array({cfg.boxes.eye_right.begin,
                                         cfg.boxes.eye_right.end})},
      {"face_margin", cfg.boxes.face_margin},
      {"eye_margin", cfg.boxes.eye_margin},
      {"min_visible_fraction", cfg.boxes.min_visible_fraction},
      {"comment", "eye ranges follow the Helen 194-point convention; verify "
                  "against your annotation copy"}};
  root["eval"] = {{"iou_threshold", cfg.eval.iou_threshold}};
  root["export"]["train_ratio"] = cfg.train_ratio;
  root["export"]["resize"] =
      cfg.resize ? json::array({cfg.resize->width, cfg.resize->height})
                 : json(nullptr);
  return root.dump(2) + "\n";
}

Intrinsics resolve_intrinsics(const PipelineConfig& cfg, int width, int height) {
  Intrinsics k;
  k.width = width;
  k.height = height;
  k.focal = cfg.focal > 0.0 ? cfg.focal : static_cast<double>(width);
  if (cfg.principal_point) {
    k.cx = (*cfg.principal_point)[0];
    k.cy = (*cfg.principal_point)[1];
  } else {
    k.cx = width / 2.0;
    k.cy = height / 2.0;
  }
  return k;
}

std::uint64_t sample_seed(const PipelineConfig& cfg,
                          const std::string& image_id) {
  return cfg.seed ^ fnv1a64(image_id);
}

}  // namespace evsynth
