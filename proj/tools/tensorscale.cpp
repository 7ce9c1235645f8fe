// tensorscale command-line tool: analyze, synth, compare, resample, calibrate.
//
// Exit codes: 0 success, 2 I/O, 3 configuration, 4 shape mismatch,
// 5 numerical failure.

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <iostream>
#include <numeric>
#include <sstream>
#include <thread>

#include "tensorscale/calibrate.hpp"
#include "tensorscale/io.hpp"
#include "tensorscale/scalespace.hpp"
#include "tensorscale/synth.hpp"

using namespace tensorscale;
using json = nlohmann::json;

namespace {

constexpr int kExitIo = 2;
constexpr int kExitConfig = 3;
constexpr int kExitShape = 4;
constexpr int kExitNumerical = 5;

struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct RunConfig {
  std::string input;
  std::string outdir = ".";
  double gamma = 1.2;
  double k = kDefaultRingRatio;
  double sigma_min = 1.0;
  double sigma_max = 12.0;
  std::optional<double> sigma_step;
  std::string spacing = "linear";
  std::optional<double> post_smooth;
  bool no_correction = false;
  std::string mask;
  int bins = 20;
  std::uint64_t seed = 0;
  int threads = 0;
};

void add_scale_flags(CLI::App* cmd, RunConfig& cfg) {
  cmd->add_option("--gamma", cfg.gamma, "Derivative normalization exponent, in (1, 3)");
  cmd->add_option("--k", cfg.k, "Ring inner/outer Gaussian ratio, in (0, 1)");
  cmd->add_option("--sigma-min", cfg.sigma_min, "Smallest derivative scale (px)");
  cmd->add_option("--sigma-max", cfg.sigma_max, "Largest derivative scale (px)");
  cmd->add_option("--sigma-step", cfg.sigma_step,
                  "Linear: additive step (default 1). Geometric: ratio (default 2^(1/4))");
  cmd->add_option("--spacing", cfg.spacing, "Scale spacing")->check(CLI::IsMember({"linear", "geometric"}));
  cmd->add_option("--post-smooth", cfg.post_smooth, "Gaussian smoothing of the tensor after integration");
  cmd->add_flag("--no-correction", cfg.no_correction, "Skip the iso/anisotropic scale correction");
  cmd->add_option("--threads", cfg.threads, "Worker threads (0 = hardware)");
}

ScaleGrid make_grid(const RunConfig& cfg) {
  try {
    if (cfg.spacing == "geometric")
      return ScaleGrid::geometric(cfg.sigma_min, cfg.sigma_max, cfg.sigma_step.value_or(std::pow(2.0, 0.25)));
    return ScaleGrid::linear(cfg.sigma_min, cfg.sigma_max, cfg.sigma_step.value_or(1.0));
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }
}

SweepOptions make_options(const RunConfig& cfg) {
  SweepOptions options;
  if (!(cfg.gamma > 1.0 && cfg.gamma < 3.0)) throw ConfigError("--gamma must lie in (1, 3)");
  if (!(cfg.k > 0.0 && cfg.k < 1.0)) throw ConfigError("--k must lie in (0, 1)");
  if (cfg.post_smooth && !(*cfg.post_smooth > 0.0)) throw ConfigError("--post-smooth must be positive");
  if (cfg.threads < 0) throw ConfigError("--threads must be >= 0");
  options.params = GammaParams::from_gamma(cfg.gamma);
  options.k = cfg.k;
  options.post_smooth_sigma = cfg.post_smooth;
  options.correct = !cfg.no_correction;
  return options;
}

struct Stats {
  double mean = 0, std = 0, median = 0, min = 0, max = 0;
  Index count = 0;
};

Stats stats_of(std::vector<double> v) {
  Stats s;
  s.count = Index(v.size());
  if (v.empty()) return s;
  s.mean = std::accumulate(v.begin(), v.end(), 0.0) / double(v.size());
  double ss = 0;
  for (double x : v) ss += (x - s.mean) * (x - s.mean);
  s.std = std::sqrt(ss / double(v.size()));
  std::sort(v.begin(), v.end());
  const std::size_t h = v.size() / 2;
  s.median = v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
  s.min = v.front();
  s.max = v.back();
  return s;
}

json to_json(const Stats& s) {
  return {{"count", s.count}, {"mean", s.mean}, {"std", s.std}, {"median", s.median}, {"min", s.min}, {"max", s.max}};
}

std::vector<double> values(const ScalarField& f, const MaskField* mask) {
  std::vector<double> v;
  for (Index p = 0; p < f.size(); ++p)
    if (!mask || (*mask)[p]) v.push_back(f[p]);
  return v;
}

json field_stats(const ScalarField& f, const MaskField* mask) {
  json j{{"full", to_json(stats_of(values(f, nullptr)))}};
  if (mask) j["mask"] = to_json(stats_of(values(f, mask)));
  return j;
}

void apply_threads(int threads) {
  set_thread_count(threads > 0 ? threads : static_cast<int>(std::max(1u, std::thread::hardware_concurrency())));
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
}

int cmd_analyze(const RunConfig& cfg) {
  const SweepOptions options = make_options(cfg);
  const ScaleGrid grid = make_grid(cfg);
  if (cfg.bins < 2) throw ConfigError("--bins must be >= 2");
  const ScalarField field = read_field(cfg.input);
  std::optional<MaskField> mask;
  if (!cfg.mask.empty()) {
    mask = read_mask(cfg.mask);
    if (!(mask->shape() == field.shape())) throw ShapeError("mask shape does not match input");
  }
  const MaskField* mp = mask ? &*mask : nullptr;

  const ScaleSpaceResult r = sweep(field, grid, options);
  const fs::path out(cfg.outdir);
  ensure_dir(out);
  write_field(out / "scale.f32", r.scale);
  write_field(out / "scale_corrected.f32", r.corrected_scale);
  write_field(out / "width.f32", r.width);

  json stats;
  stats["scale"] = field_stats(r.scale, mp);
  stats["scale_corrected"] = field_stats(r.corrected_scale, mp);
  stats["width"] = field_stats(r.width, mp);
  if (field.rank() == 2) {
    write_field(out / "anisotropy.f32", r.measures.anisotropy);
    write_field(out / "orientation.f32", r.orientation[0]);
    write_orientation_preview(out / "orientation_preview.ppm", r.orientation[0], r.measures.anisotropy);
    stats["anisotropy"] = field_stats(r.measures.anisotropy, mp);
  } else {
    write_field(out / "fa.f32", r.measures.fa);
    write_field(out / "linearity.f32", r.measures.linearity);
    write_field(out / "planarity.f32", r.measures.planarity);
    write_field(out / "sphericity.f32", r.measures.sphericity);
    write_field(out / "orientation_x.f32", r.orientation[0]);
    write_field(out / "orientation_y.f32", r.orientation[1]);
    write_field(out / "orientation_z.f32", r.orientation[2]);
    stats["fa"] = field_stats(r.measures.fa, mp);
    stats["linearity"] = field_stats(r.measures.linearity, mp);
    stats["planarity"] = field_stats(r.measures.planarity, mp);
    stats["sphericity"] = field_stats(r.measures.sphericity, mp);
  }

  const ScaleHistogram hist = scale_histogram(r.scale, mp, cfg.bins, grid);
  write_histogram_csv(out / "histogram.csv", hist);
  const RangeAdvice advice = range_advice(hist, grid);
  write_text_atomic(out / "advice.txt", std::string(to_string(advice)) + "\n");

  json run;
  run["command"] = "analyze";
  run["input"] = cfg.input;
  run["shape"] = field.shape().extents();
  run["gamma"] = options.params.gamma;
  run["t"] = options.params.t;
  run["k"] = options.k;
  run["scale_grid"] = {{"spacing", cfg.spacing},
                       {"sigma_min", cfg.sigma_min},
                       {"sigma_max", cfg.sigma_max},
                       {"sigma_step", cfg.sigma_step ? json(*cfg.sigma_step) : json(nullptr)},
                       {"sigmas", grid.sigmas()}};
  run["post_smooth"] = cfg.post_smooth ? json(*cfg.post_smooth) : json(nullptr);
  run["correction"] = options.correct;
  if (options.correct && field.rank() == 2) {
    const double anis = anis_ratio_for(options.params.gamma, options.k);
    const auto c = Correction2D::for_gamma(options.params.gamma, anis);
    run["correction_2d"] = {{"anis_ratio", c.anis_ratio}, {"iso_ratio", c.iso_ratio}};
  } else if (options.correct) {
    const auto& c = options.correction_3d;
    run["correction_3d"] = {{"c0", c.c0}, {"c_s", c.c_s}, {"c_p", c.c_p}, {"c_l", c.c_l}};
  }
  run["mask"] = cfg.mask.empty() ? json(nullptr) : json(cfg.mask);
  run["bins"] = cfg.bins;
  run["seed"] = cfg.seed;
  run["advice"] = to_string(advice);
  run["statistics"] = stats;
  write_text_atomic(out / "run.json", run.dump(2) + "\n");
  std::cout << to_string(advice) << "\n";
  return 0;
}

struct SynthConfig {
  std::string kind = "disk2d";
  double width = 20.0;
  double width_max = 24.0;
  std::vector<Index> shape{128, 128};
  std::uint64_t seed = 0;
  double foreground = 1.0;
  double background = 0.0;
  std::string noise = "none";
  double amplitude = 0.0;
  int noise_axis = -1;
  double noise_sigma = 4.0;
  double gap_ratio = 1.5;
  int bands = 6;
  std::string outdir = ".";
};

int cmd_synth(const SynthConfig& cfg) {
  PhantomSpec spec;
  try {
    spec.kind = phantom_kind_from_string(cfg.kind);
    spec.shape = Shape(cfg.shape);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  spec.width = cfg.width;
  spec.width_max = cfg.width_max;
  spec.seed = cfg.seed;
  spec.foreground = cfg.foreground;
  spec.background = cfg.background;
  spec.gap_ratio = cfg.gap_ratio;
  spec.bands = cfg.bands;
  if (cfg.amplitude < 0.0) throw ConfigError("--noise-amplitude must be >= 0");

  Phantom phantom = generate(spec);
  ScalarField field = phantom.field;
  if (cfg.noise == "iid") {
    field = add_noise(field, NoiseKind::Iid, cfg.amplitude, cfg.seed);
  } else if (cfg.noise == "anisotropic") {
    if (cfg.noise_axis < 0 || cfg.noise_axis >= field.rank()) throw ConfigError("--noise-axis out of range");
    field = add_noise(field, NoiseKind::Anisotropic, cfg.amplitude, cfg.seed, cfg.noise_axis, cfg.noise_sigma);
  }

  const fs::path out(cfg.outdir);
  ensure_dir(out);
  write_field(out / "field.f32", field);
  write_mask(out / "feature_mask.u8", phantom.feature_mask);
  write_mask(out / "skeleton_mask.u8", phantom.skeleton_mask);
  json parts = json::array();
  for (const auto& part : phantom.parts) {
    write_mask(out / ("skeleton_" + part.name + ".u8"), part.skeleton);
    write_mask(out / ("center_" + part.name + ".u8"), part.center);
    parts.push_back({{"name", part.name}, {"width", part.width}});
  }
  json info{{"command", "synth"},  {"kind", cfg.kind},   {"width", cfg.width},
            {"width_max", cfg.width_max}, {"shape", cfg.shape}, {"seed", cfg.seed},
            {"noise", cfg.noise},  {"noise_amplitude", cfg.amplitude}, {"parts", parts}};
  write_text_atomic(out / "synth.json", info.dump(2) + "\n");
  return 0;
}

std::vector<ScalarField> read_orientation(const fs::path& dir) {
  if (fs::exists(dir / "orientation.f32")) return {read_field(dir / "orientation.f32")};
  return {read_field(dir / "orientation_x.f32"), read_field(dir / "orientation_y.f32"),
          read_field(dir / "orientation_z.f32")};
}

int cmd_compare(const std::string& a_dir, const std::string& b_dir, const std::string& mask_path,
                const std::string& output) {
  const auto a = read_orientation(a_dir);
  const auto b = read_orientation(b_dir);
  if (a.size() != b.size() || !(a[0].shape() == b[0].shape()))
    throw ShapeError("compare: orientation fields differ in shape");
  std::optional<MaskField> mask;
  if (!mask_path.empty()) {
    mask = read_mask(mask_path);
    if (!(mask->shape() == a[0].shape())) throw ShapeError("compare: mask shape mismatch");
  }
  ScalarField diff(a[0].shape());
  for (Index p = 0; p < diff.size(); ++p) {
    double angle;
    if (a.size() == 1) {
      angle = std::fmod(std::abs(a[0][p] - b[0][p]), M_PI);
      angle = std::min(angle, M_PI - angle);
    } else {
      const double dot = a[0][p] * b[0][p] + a[1][p] * b[1][p] + a[2][p] * b[2][p];
      angle = std::acos(std::min(1.0, std::abs(dot)));
    }
    diff[p] = angle * 180.0 / M_PI;
  }
  json report{{"command", "compare"}, {"a", a_dir}, {"b", b_dir}, {"unit", "degrees"}};
  report["statistics"] = field_stats(diff, mask ? &*mask : nullptr);
  const std::string text = report.dump(2) + "\n";
  if (output.empty()) {
    std::cout << text;
  } else {
    write_text_atomic(output, text);
  }
  return 0;
}

int cmd_resample(const std::string& input, const std::string& mode, const std::vector<Index>& target,
                 const std::string& outdir) {
  const ScalarField field = read_field(input);
  ScalarField result;
  if (mode == "down2") {
    result = downscale2(field);
  } else {
    Shape shape = [&] {
      if (target.empty()) {
        std::vector<Index> ext = field.shape().extents();
        for (auto& e : ext) e *= 2;
        return Shape(ext);
      }
      try {
        return Shape(target);
      } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
      }
    }();
    result = upsample2_nearest(field, shape);
  }
  const fs::path out(outdir);
  ensure_dir(out);
  write_field(out / fs::path(input).filename().replace_extension(".f32"), result);
  return 0;
}

int cmd_calibrate(const std::string& mode, const RunConfig& cfg, const std::vector<double>& widths, double width) {
  const SweepOptions options = make_options(cfg);
  const fs::path out(cfg.outdir);
  ensure_dir(out);
  std::ostringstream csv;
  csv.precision(9);
  json report{{"command", "calibrate"}, {"mode", mode}, {"gamma", cfg.gamma}, {"k", cfg.k}};
  if (mode == "anis-ratio") {
    const auto c = calibrate_anis_ratio(widths, cfg.gamma, cfg.k);
    csv << "width,ratio\n";
    for (std::size_t i = 0; i < c.widths.size(); ++i) csv << c.widths[i] << ',' << c.ratios[i] << '\n';
    report["widths"] = c.widths;
    report["ratios"] = c.ratios;
    report["mean"] = c.mean;
    report["std"] = c.stddev;
  } else {
    const ScaleGrid grid = make_grid(cfg);
    const auto fit = optimize_correction_3d(width, grid, options);
    const auto names = {"c0", "c_s", "c_p", "c_l"};
    const auto values = fit.coefficients.as_array();
    csv << "coefficient,value\n";
    std::size_t i = 0;
    for (const char* name : names) {
      csv << name << ',' << values[i] << '\n';
      report["coefficients"][name] = values[i++];
    }
    report["width"] = width;
    report["target_scale"] = fit.target;
    report["objective_start"] = fit.objective_start;
    report["objective_end"] = fit.objective_end;
    report["improved"] = fit.improved;
    report["center_scales"] = {fit.centers[0].scale, fit.centers[1].scale, fit.centers[2].scale};
  }
  write_text_atomic(out / "calibration.csv", csv.str());
  write_text_atomic(out / "calibration.json", report.dump(2) + "\n");
  std::cout << csv.str();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Feature-size aware structure tensor analysis"};
  app.require_subcommand(1);

  RunConfig cfg;
  auto* analyze = app.add_subcommand("analyze", "Scale-space analysis of a 2D/3D field");
  analyze->add_option("--input", cfg.input, "Field file (.f32/.u8 with sidecar) or PGM")->required();
  analyze->add_option("--outdir", cfg.outdir, "Output directory");
  analyze->add_option("--mask", cfg.mask, "Mask for histogram and statistics");
  analyze->add_option("--bins", cfg.bins, "Histogram bins");
  analyze->add_option("--seed", cfg.seed, "Recorded in run.json");
  add_scale_flags(analyze, cfg);

  SynthConfig syn;
  auto* synth = app.add_subcommand("synth", "Generate a phantom");
  synth->add_option("--kind", syn.kind, "Phantom kind");
  synth->add_option("--width", syn.width, "Feature width (px)");
  synth->add_option("--width-max", syn.width_max, "Largest width for multi-width phantoms");
  synth->add_option("--shape", syn.shape, "Extents, slowest axis first")->delimiter(',');
  synth->add_option("--seed", syn.seed, "Noise seed");
  synth->add_option("--foreground", syn.foreground);
  synth->add_option("--background", syn.background);
  synth->add_option("--noise", syn.noise)->check(CLI::IsMember({"none", "iid", "anisotropic"}));
  synth->add_option("--noise-amplitude", syn.amplitude, "Noise standard deviation");
  synth->add_option("--noise-axis", syn.noise_axis, "Smoothing axis of anisotropic noise");
  synth->add_option("--noise-sigma", syn.noise_sigma, "Smoothing sigma of anisotropic noise");
  synth->add_option("--gap-ratio", syn.gap_ratio, "Bar gap / bar width for increasing lines");
  synth->add_option("--bands", syn.bands, "Width bands for increasing lines");
  synth->add_option("--outdir", syn.outdir, "Output directory");

  std::string cmp_a, cmp_b, cmp_mask, cmp_out;
  auto* compare = app.add_subcommand("compare", "Axial orientation difference of two analyze outputs");
  compare->add_option("--a", cmp_a, "First analyze output directory")->required();
  compare->add_option("--b", cmp_b, "Second analyze output directory")->required();
  compare->add_option("--mask", cmp_mask, "Mask for the statistics");
  compare->add_option("--output", cmp_out, "Write the JSON report here instead of stdout");

  std::string rs_input, rs_mode = "down2", rs_outdir = ".";
  std::vector<Index> rs_shape;
  auto* resample = app.add_subcommand("resample", "2x block-mean downscale or nearest upsample");
  resample->add_option("--input", rs_input, "Field file")->required();
  resample->add_option("--mode", rs_mode)->check(CLI::IsMember({"down2", "up2"}));
  resample->add_option("--shape", rs_shape, "Target shape for up2")->delimiter(',');
  resample->add_option("--outdir", rs_outdir, "Output directory");

  std::string cal_mode = "anis-ratio";
  std::vector<double> cal_widths{10, 20, 30, 40};
  double cal_width = 12.0;
  RunConfig cal_cfg;
  cal_cfg.spacing = "geometric";
  cal_cfg.sigma_min = 2.0;
  cal_cfg.sigma_max = 10.0;
  cal_cfg.sigma_step = std::pow(2.0, 1.0 / 16.0);
  auto* calibrate = app.add_subcommand("calibrate", "Measure the anisotropic ratio or fit the 3D correction");
  calibrate->add_option("--mode", cal_mode)->check(CLI::IsMember({"anis-ratio", "corr3d"}));
  calibrate->add_option("--widths", cal_widths, "Line widths for anis-ratio")->delimiter(',');
  calibrate->add_option("--width", cal_width, "Phantom width for corr3d");
  calibrate->add_option("--outdir", cal_cfg.outdir, "Output directory");
  calibrate->add_option("--seed", cal_cfg.seed, "Recorded only; calibration is noise free");
  add_scale_flags(calibrate, cal_cfg);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (*analyze) {
      apply_threads(cfg.threads);
      return cmd_analyze(cfg);
    }
    if (*synth) return cmd_synth(syn);
    if (*compare) return cmd_compare(cmp_a, cmp_b, cmp_mask, cmp_out);
    if (*resample) return cmd_resample(rs_input, rs_mode, rs_shape, rs_outdir);
    if (*calibrate) {
      apply_threads(cal_cfg.threads);
      return cmd_calibrate(cal_mode, cal_cfg, cal_widths, cal_width);
    }
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const ShapeError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitShape;
  } catch (const NumericalError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::logic_error& e) {
    // DomainError, SizeError, ConfigError and friends.
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
  return 0;
}
