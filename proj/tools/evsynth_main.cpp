#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "evsynth/pipeline.hpp"

namespace {

using namespace evsynth;

std::optional<Resize> parse_resize(const std::string& text) {
  const auto x = text.find('x');
  if (x == std::string::npos)
    throw ConfigError("--resize expects WxH, e.g. 256x256");
  try {
    const int w = std::stoi(text.substr(0, x));
    const int h = std::stoi(text.substr(x + 1));
    if (w < 1 || h < 1) throw ConfigError("--resize dimensions must be positive");
    return Resize{w, h};
  } catch (const std::invalid_argument&) {
    throw ConfigError("--resize expects WxH, e.g. 256x256");
  }
}

struct CliOptions {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> jobs;
  bool dump_config = false;

  bool single_frame = false;
  bool streaming = false;
  std::string resize_text;

  std::vector<std::string> inputs;
  std::string out_dir = ".";
  std::string corpus_dir;
  std::string dataset_dir;
  std::string pred_path;
  std::string report_path;
  std::string split = "all";
};

PipelineConfig effective_config(const CliOptions& opt) {
  PipelineConfig cfg;
  if (!opt.config_path.empty()) cfg = load_pipeline_config(opt.config_path);
  if (opt.seed) cfg.seed = *opt.seed;
  if (opt.jobs) cfg.jobs = *opt.jobs;
  if (opt.single_frame) cfg.single_frame = true;
  if (opt.streaming) cfg.single_frame = false;
  if (!opt.resize_text.empty()) cfg.resize = parse_resize(opt.resize_text);
  return cfg;
}

int run_simulate(const CliOptions& opt) {
  const PipelineConfig cfg = effective_config(opt);
  for (const std::string& input : opt.inputs) {
    const SimulateSummary s = simulate_image_file(input, opt.out_dir, cfg);
    std::cout << s.image_id << ": events=" << s.event_count
              << " duration_us=" << s.duration_us << " -> "
              << s.events_path.string() << "\n";
  }
  return 0;
}

int run_encode(const CliOptions& opt) {
  const PipelineConfig cfg = effective_config(opt);
  for (const std::string& input : opt.inputs) {
    const EncodeSummary s = encode_events_file(input, opt.out_dir, cfg);
    std::cout << s.stream_id << ": frames=" << s.frame_paths.size() << "\n";
  }
  return 0;
}

int run_export(const CliOptions& opt) {
  const PipelineConfig cfg = effective_config(opt);
  const ExportSummary s = export_corpus(opt.corpus_dir, opt.out_dir, cfg);
  std::cout << "images: " << s.image_count << "\nsamples: "
            << s.manifest.size() << "\ntrain: " << s.train.size()
            << "\nval: " << s.val.size() << "\n";
  return 0;
}

int run_evaluate(const CliOptions& opt) {
  const PipelineConfig cfg = effective_config(opt);
  EvalSplit split = EvalSplit::all;
  if (opt.split == "train") split = EvalSplit::train;
  else if (opt.split == "val") split = EvalSplit::val;
  else if (opt.split != "all")
    throw ConfigError("--split must be all, train or val");

  const MetricsReport report =
      evaluate_dataset(opt.pred_path, opt.dataset_dir, cfg, split);
  std::cout << report.to_text();
  if (!opt.report_path.empty()) {
    std::ofstream out(opt.report_path);
    if (!out) throw IoError("cannot write report: " + opt.report_path);
    out << report.to_json() << "\n";
  }
  return 0;
}

int run_info(const CliOptions& opt) {
  for (const std::string& input : opt.inputs) {
    if (opt.inputs.size() > 1) std::cout << input << ":\n";
    std::cout << describe_file(input);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Synthetic event-camera face dataset toolkit"};
  app.require_subcommand(0, 1);
  app.fallthrough();

  CliOptions opt;
  app.add_option("-c,--config", opt.config_path, "JSON configuration file");
  app.add_option("--seed", opt.seed, "Override the global seed");
  app.add_option("--jobs", opt.jobs, "Parallel workers for export");
  app.add_flag("--dump-config", opt.dump_config,
               "Print the effective configuration and exit");

  auto* simulate = app.add_subcommand(
      "simulate", "Image(s) -> EVS1 event stream + homography sidecar");
  simulate->add_option("images", opt.inputs, "Input image files")->required();
  simulate->add_option("-o,--out", opt.out_dir, "Output directory");

  auto* encode =
      app.add_subcommand("encode", "EVS1 event stream(s) -> TBR frame images");
  encode->add_option("events", opt.inputs, "Input .evs files")->required();
  encode->add_option("-o,--out", opt.out_dir, "Output directory");
  encode->add_flag("--single-frame", opt.single_frame,
                   "Fold each stream into exactly one frame");
  encode->add_flag("--stream", opt.streaming,
                   "Emit one frame per n_bits windows");
  encode->add_option("--resize", opt.resize_text, "Rescale output, WxH");

  auto* export_cmd = app.add_subcommand(
      "export", "Image+landmark corpus -> labeled TBR dataset");
  export_cmd->add_option("corpus", opt.corpus_dir, "Corpus directory")
      ->required();
  export_cmd->add_option("-o,--out", opt.out_dir, "Output dataset directory");
  export_cmd->add_flag("--single-frame", opt.single_frame,
                       "One frame per source image (default)");
  export_cmd->add_flag("--stream", opt.streaming,
                       "One frame per n_bits windows");
  export_cmd->add_option("--resize", opt.resize_text, "Rescale samples, WxH");

  auto* evaluate = app.add_subcommand(
      "evaluate", "Score a prediction file against an exported dataset");
  evaluate->add_option("predictions", opt.pred_path, "Prediction file")
      ->required();
  evaluate->add_option("-d,--dataset", opt.dataset_dir, "Dataset directory")
      ->required();
  evaluate->add_option("-o,--out", opt.report_path, "Write JSON report here");
  evaluate->add_option("--split", opt.split, "all, train or val");

  auto* info = app.add_subcommand("info", "Describe an artifact file");
  info->add_option("files", opt.inputs, "EVS1/label/prediction files")
      ->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (opt.dump_config) {
      std::cout << dump_pipeline_config(effective_config(opt));
      return 0;
    }
    if (simulate->parsed()) return run_simulate(opt);
    if (encode->parsed()) return run_encode(opt);
    if (export_cmd->parsed()) return run_export(opt);
    if (evaluate->parsed()) return run_evaluate(opt);
    if (info->parsed()) return run_info(opt);
    std::cerr << app.help();
    return 1;
  } catch (const evsynth::EvsError& e) {
    std::cerr << "evsynth: error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "evsynth: unexpected error: " << e.what() << "\n";
    return 2;
  }
}
