// Command-line front end: the full demarcation pipeline plus one
// subcommand per stage.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "vqdemark/vqdemark.hpp"

namespace {

using namespace vqdemark;

constexpr int kExitUsage = 1;
constexpr int kExitIo = 2;
constexpr int kExitConfig = 3;

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::IoFailure:
    case ErrorCode::MalformedFile:
    case ErrorCode::UnsupportedDepth:
      return kExitIo;
    default:
      return kExitConfig;
  }
}

// Raw flag values; only flags the user actually passed are applied on top
// of the config file.
struct ConfigFlags {
  std::string config_path;
  std::size_t codebook_size = 0;
  std::size_t groups = 0;
  std::string block;
  std::size_t window = 0;
  std::size_t levels = 0;
  std::size_t distance = 0;
  std::string angle;
  double epsilon = 0.0;
  double sigma = 0.0;
  double low = 0.0;
  double high = 0.0;
  double watershed_smooth = 0.0;
  std::string out;
  std::string emit;
  bool timings = false;
  std::map<std::string, CLI::Option*> options;
};

void add_config_flags(CLI::App* cmd, ConfigFlags& f) {
  cmd->add_option("--config", f.config_path, "INI file of key = value settings");
  f.options["codebook_size"] = cmd->add_option("--codebook-size", f.codebook_size, "LBG codebook size (power of two)");
  f.options["groups"] = cmd->add_option("--groups", f.groups, "requantized group count (power of two)");
  f.options["block"] = cmd->add_option("--block", f.block, "block shape WxH, e.g. 4x3");
  f.options["epsilon"] = cmd->add_option("--epsilon", f.epsilon, "LBG split perturbation");
  f.options["window"] = cmd->add_option("--window", f.window, "GLCM window side (odd)");
  f.options["levels"] = cmd->add_option("--levels", f.levels, "GLCM gray levels");
  f.options["distance"] = cmd->add_option("--distance", f.distance, "GLCM pixel distance");
  f.options["angle"] = cmd->add_option("--angle", f.angle, "GLCM angle: 0, 45, 90 or 135");
  f.options["sigma"] = cmd->add_option("--sigma", f.sigma, "Canny Gaussian sigma");
  f.options["low"] = cmd->add_option("--low", f.low, "Canny low threshold (relative)");
  f.options["high"] = cmd->add_option("--high", f.high, "Canny high threshold (relative)");
  f.options["watershed_smooth"] =
      cmd->add_option("--watershed-smooth", f.watershed_smooth, "Gaussian sigma before the watershed gradient");
  f.options["out"] = cmd->add_option("--out", f.out, "output directory");
  f.options["emit"] = cmd->add_option("--emit", f.emit, "comma list of clusters,edges,superimposed,glcm,watershed,report");
  f.options["timings"] = cmd->add_flag("--timings", f.timings, "record stage timings in report.json");
}

template <typename T>
std::string as_text(const T& v) {
  std::ostringstream ss;
  ss << std::setprecision(17) << v;
  return ss.str();
}

PipelineConfig build_config(const ConfigFlags& f) {
  PipelineConfig cfg;
  if (!f.config_path.empty()) load_config(f.config_path, cfg);
  auto given = [&](const char* key) { return f.options.at(key)->count() > 0; };
  if (given("codebook_size")) apply_setting(cfg, "codebook_size", as_text(f.codebook_size));
  if (given("groups")) apply_setting(cfg, "groups", as_text(f.groups));
  if (given("block")) apply_setting(cfg, "block", f.block);
  if (given("epsilon")) apply_setting(cfg, "epsilon", as_text(f.epsilon));
  if (given("window")) apply_setting(cfg, "window", as_text(f.window));
  if (given("levels")) apply_setting(cfg, "levels", as_text(f.levels));
  if (given("distance")) apply_setting(cfg, "distance", as_text(f.distance));
  if (given("angle")) apply_setting(cfg, "angle", f.angle);
  if (given("sigma")) apply_setting(cfg, "sigma", as_text(f.sigma));
  if (given("low")) apply_setting(cfg, "low", as_text(f.low));
  if (given("high")) apply_setting(cfg, "high", as_text(f.high));
  if (given("watershed_smooth")) apply_setting(cfg, "watershed_smooth", as_text(f.watershed_smooth));
  if (given("out")) apply_setting(cfg, "out", f.out);
  if (given("emit")) apply_setting(cfg, "emit", f.emit);
  if (given("timings")) cfg.record_timings = f.timings;
  return cfg;
}

struct PhantomFlags {
  PhantomSpec spec;
  bool enabled = false;
};

void add_phantom_flags(CLI::App* cmd, PhantomFlags& p, bool with_switch) {
  if (with_switch) cmd->add_flag("--phantom", p.enabled, "use a synthetic phantom instead of an input file");
  cmd->add_option("--width", p.spec.width, "phantom width")->capture_default_str();
  cmd->add_option("--height", p.spec.height, "phantom height")->capture_default_str();
  cmd->add_option("--cx", p.spec.tumor_cx, "disc centre x")->capture_default_str();
  cmd->add_option("--cy", p.spec.tumor_cy, "disc centre y")->capture_default_str();
  cmd->add_option("--radius", p.spec.tumor_r, "disc radius")->capture_default_str();
  cmd->add_option("--bg-mean", p.spec.bg_mean, "background mean")->capture_default_str();
  cmd->add_option("--tumor-mean", p.spec.tumor_mean, "disc mean")->capture_default_str();
  cmd->add_option("--noise", p.spec.noise_sigma, "Gaussian noise sigma")->capture_default_str();
  cmd->add_option("--seed", p.spec.seed, "noise seed")->capture_default_str();
}

GrayImage input_or_phantom(const std::string& input, const PhantomFlags& ph, PipelineConfig& cfg,
                           std::string& source) {
  if (!input.empty() && ph.enabled) throw Error(ErrorCode::InvalidConfig, "give an input file or --phantom, not both");
  if (ph.enabled) {
    cfg.phantom = ph.spec;
    source = "phantom";
    return generate_phantom(ph.spec);
  }
  if (input.empty()) throw Error(ErrorCode::InvalidConfig, "no input image (pass a path or --phantom)");
  source = std::filesystem::path(input).filename().string();
  return load_image(input);
}

FeatureKind parse_feature(const std::string& name) {
  if (name == "probability" || name == "max_probability") return FeatureKind::MaxProbability;
  if (name == "variance") return FeatureKind::Variance;
  if (name == "correlation") return FeatureKind::Correlation;
  if (name == "entropy") return FeatureKind::Entropy;
  throw Error(ErrorCode::InvalidConfig, "unknown feature '" + name + "'");
}

void write_codebook_dump(const std::filesystem::path& path, const vq::Codebook& cb, const vq::GroupMap& gm) {
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw Error(ErrorCode::IoFailure, "cannot write " + path.string());
  f << "# codebook size " << cb.size() << " dim " << cb.dim() << " distortion " << std::setprecision(17)
    << cb.distortion << "\n# group: components\n";
  for (std::size_t c = 0; c < cb.size(); ++c) {
    f << gm.group_of[c] << ":";
    for (double v : cb.codevectors[c]) f << ' ' << v;
    f << '\n';
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Vector-quantization tumor demarcation toolkit"};
  app.require_subcommand(1);

  // pipeline
  ConfigFlags pipeline_flags;
  PhantomFlags pipeline_phantom;
  std::string pipeline_input;
  auto* pipeline_cmd = app.add_subcommand("pipeline", "run every stage and write the output tree");
  pipeline_cmd->add_option("input", pipeline_input, "input PGM or PNG");
  add_config_flags(pipeline_cmd, pipeline_flags);
  add_phantom_flags(pipeline_cmd, pipeline_phantom, true);

  // compare
  ConfigFlags compare_flags;
  PhantomFlags compare_phantom;
  std::string compare_input;
  auto* compare_cmd = app.add_subcommand("compare", "print the method comparison report (JSON) to stdout");
  compare_cmd->add_option("input", compare_input, "input PGM or PNG");
  add_config_flags(compare_cmd, compare_flags);
  add_phantom_flags(compare_cmd, compare_phantom, true);

  // vq
  ConfigFlags vq_flags;
  std::string vq_input;
  auto* vq_cmd = app.add_subcommand("vq", "LBG segmentation only: cluster images and a codebook dump");
  vq_cmd->add_option("input", vq_input, "input PGM or PNG")->required();
  add_config_flags(vq_cmd, vq_flags);

  // glcm
  std::string glcm_input;
  std::string glcm_output;
  std::string glcm_feature = "entropy";
  std::string glcm_angle = "0";
  bool glcm_equalize = false;
  glcm::Params glcm_params;
  auto* glcm_cmd = app.add_subcommand("glcm", "co-occurrence feature map");
  glcm_cmd->add_option("input", glcm_input, "input PGM or PNG")->required();
  glcm_cmd->add_option("-o,--output", glcm_output, "output image")->required();
  glcm_cmd->add_option("--feature", glcm_feature, "probability, variance, correlation or entropy")->capture_default_str();
  glcm_cmd->add_option("--window", glcm_params.window, "window side (odd)")->capture_default_str();
  glcm_cmd->add_option("--levels", glcm_params.levels, "gray levels")->capture_default_str();
  glcm_cmd->add_option("--distance", glcm_params.distance, "pixel distance")->capture_default_str();
  glcm_cmd->add_option("--angle", glcm_angle, "0, 45, 90 or 135")->capture_default_str();
  glcm_cmd->add_flag("--equalize", glcm_equalize, "histogram-equalize the rendered map");

  // watershed
  std::string ws_input;
  std::string ws_output;
  double ws_smooth = 0.0;
  auto* ws_cmd = app.add_subcommand("watershed", "immersion watershed on the Sobel gradient");
  ws_cmd->add_option("input", ws_input, "input PGM or PNG")->required();
  ws_cmd->add_option("-o,--output", ws_output, "overlay image")->required();
  ws_cmd->add_option("--smooth", ws_smooth, "Gaussian sigma before the gradient (0 = none)")->capture_default_str();

  // canny
  std::string canny_input;
  std::string canny_output;
  std::string canny_overlay;
  CannyParams canny_params;
  auto* canny_cmd = app.add_subcommand("canny", "Canny edge map");
  canny_cmd->add_option("input", canny_input, "input PGM or PNG")->required();
  canny_cmd->add_option("-o,--output", canny_output, "edge map image")->required();
  canny_cmd->add_option("--overlay", canny_overlay, "also write the edges superimposed on the input");
  canny_cmd->add_option("--sigma", canny_params.sigma, "Gaussian sigma")->capture_default_str();
  canny_cmd->add_option("--low", canny_params.low, "low threshold (relative)")->capture_default_str();
  canny_cmd->add_option("--high", canny_params.high, "high threshold (relative)")->capture_default_str();

  // phantom
  PhantomFlags phantom_only;
  std::string phantom_output;
  auto* phantom_cmd = app.add_subcommand("phantom", "write a synthetic disc phantom");
  phantom_cmd->add_option("-o,--output", phantom_output, "output image")->required();
  add_phantom_flags(phantom_cmd, phantom_only, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "vqdemark: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (*pipeline_cmd) {
      auto cfg = build_config(pipeline_flags);
      if (!pipeline_input.empty() && pipeline_phantom.enabled) {
        throw Error(ErrorCode::InvalidConfig, "give an input file or --phantom, not both");
      }
      if (pipeline_phantom.enabled) cfg.phantom = pipeline_phantom.spec;
      const auto report = run_pipeline(cfg, pipeline_input);
      std::cout << "wrote " << cfg.output_dir.string() << " (" << report.occupied_groups
                << " occupied groups, watershed regions " << report.watershed_regions << ")\n";
    } else if (*compare_cmd) {
      auto cfg = build_config(compare_flags);
      std::string source;
      const auto img = input_or_phantom(compare_input, compare_phantom, cfg, source);
      std::cout << report_to_json(compare_methods(img, cfg, source), true).dump(2) << '\n';
    } else if (*vq_cmd) {
      auto cfg = build_config(vq_flags);
      cfg.validate();
      const auto img = load_image(vq_input);
      const auto ts = vq::extract_training_vectors(img, cfg.block_w, cfg.block_h);
      if (ts.vectors.size() < cfg.codebook_size) {
        throw Error(ErrorCode::InvalidConfig, "image has fewer blocks than codebook_size");
      }
      const auto lbg = vq::lbg_generate(ts, cfg.codebook_size, cfg.split);
      const auto rq = vq::requantize_detailed(lbg.codebook, cfg.group_count, cfg.split);
      const auto clusters = vq::cluster_images(img, ts.geometry, lbg.assignment, rq.groups);
      std::filesystem::create_directories(cfg.output_dir);
      for (std::size_t g = 0; g < clusters.size(); ++g) {
        save_image(clusters[g], cfg.output_dir / ("cluster_" + std::to_string(g) + ".pgm"), ImageFormat::Pgm);
      }
      write_codebook_dump(cfg.output_dir / "codebook.txt", lbg.codebook, rq.groups);
      std::cout << "codebook " << lbg.codebook.size() << " distortion " << lbg.codebook.distortion << '\n';
    } else if (*glcm_cmd) {
      glcm_params.angle = parse_angle(glcm_angle);
      try {
        glcm_params.validate();
      } catch (const Error& e) {
        throw Error(ErrorCode::InvalidConfig, e.what());
      }
      const auto img = load_image(glcm_input);
      auto rendered = render_feature(glcm::feature_map(img, glcm_params, parse_feature(glcm_feature)));
      if (glcm_equalize) rendered = histogram_equalize(rendered);
      save_image(rendered, glcm_output);
    } else if (*ws_cmd) {
      const auto img = load_image(ws_input);
      const auto labels = watershed::watershed_segment(watershed::gradient_magnitude(img, ws_smooth));
      save_image(superimpose(img, watershed::watershed_edges(labels)), ws_output);
      std::cout << "regions " << labels.region_count << '\n';
    } else if (*canny_cmd) {
      try {
        canny_params.validate();
      } catch (const Error& e) {
        throw Error(ErrorCode::InvalidConfig, e.what());
      }
      const auto img = load_image(canny_input);
      const auto edges = canny(img, canny_params);
      save_image(render_edges(edges), canny_output);
      if (!canny_overlay.empty()) save_image(superimpose(img, edges), canny_overlay);
    } else if (*phantom_cmd) {
      try {
        phantom_only.spec.validate();
      } catch (const Error& e) {
        throw Error(ErrorCode::InvalidConfig, e.what());
      }
      save_image(generate_phantom(phantom_only.spec), phantom_output);
    }
  } catch (const Error& e) {
    std::cerr << "vqdemark: " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "vqdemark: IoFailure: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "vqdemark: " << e.what() << '\n';
    return kExitConfig;
  }
  return 0;
}
