// muller_cli: command-line front end over the muller C API.

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "muller/muller.h"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

struct CliError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void check(muller_status status) {
  if (status != MULLER_OK) {
    throw CliError(std::string(muller_status_name(status)) + ": " + muller_last_error());
  }
}

struct ImageDeleter {
  void operator()(muller_image* p) const { muller_image_destroy(p); }
};
struct ParamsDeleter {
  void operator()(muller_params* p) const { muller_params_destroy(p); }
};
struct PartsDeleter {
  void operator()(muller_decomposition* p) const { muller_decomposition_destroy(p); }
};
struct GradcheckDeleter {
  void operator()(muller_gradcheck_report* p) const { muller_gradcheck_destroy(p); }
};
struct DatasetDeleter {
  void operator()(muller_dataset* p) const { muller_dataset_destroy(p); }
};
struct TrainDeleter {
  void operator()(muller_train_result* p) const { muller_train_result_destroy(p); }
};
struct StringDeleter {
  void operator()(char* p) const { muller_string_free(p); }
};

using ImagePtr = std::unique_ptr<muller_image, ImageDeleter>;
using ParamsPtr = std::unique_ptr<muller_params, ParamsDeleter>;
using StringPtr = std::unique_ptr<char, StringDeleter>;

ImagePtr load(const std::string& path) {
  muller_image* img = nullptr;
  check(muller_image_load(path.c_str(), &img));
  return ImagePtr(img);
}

void save(const muller_image* img, const std::string& path) {
  check(muller_image_save(img, path.c_str(), 1));
}

// Shortest decimal string that round-trips to the same double.
std::string fmt(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string read_text(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CliError("cannot read '" + path + "'");
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  out << text;
  if (!out) throw CliError("cannot write '" + path + "'");
}

// ---- parameter source ------------------------------------------------------

struct ParamOptions {
  std::string preset;
  std::string params_file;
  std::vector<double> alpha;
  std::vector<double> beta;
  bool antialias_input = false;
  std::optional<int> k;
  std::optional<int> ksize;
  std::optional<double> std;
  std::string nonlinearity;
  std::string base_method;
  std::string term_order;

  void attach(CLI::App* cmd) {
    cmd->add_option("--preset", preset, "named parameter preset (see 'presets')");
    cmd->add_option("--params-file", params_file, "parameter JSON file");
    cmd->add_option("--alpha", alpha, "explicit alpha per layer, coarsest band first")
        ->delimiter(',');
    cmd->add_option("--beta", beta, "explicit beta per layer, coarsest band first")
        ->delimiter(',');
    cmd->add_flag("--antialias-input", antialias_input,
                  "AREA-downscale the source to the resizer input size first; selects the "
                  "anti-aliased preset variant");
    cmd->add_option("--k", k, "number of Laplacian layers")->check(CLI::PositiveNumber);
    cmd->add_option("--ksize", ksize, "Gaussian kernel size (odd)");
    cmd->add_option("--std", std, "Gaussian standard deviation");
    cmd->add_option("--nonlinearity", nonlinearity, "tanh | identity")
        ->check(CLI::IsMember({"tanh", "identity"}));
    cmd->add_option("--base-method", base_method, "bilinear | nearest")
        ->check(CLI::IsMember({"bilinear", "nearest"}));
    cmd->add_option("--term-order", term_order, "scale_then_shift | shift_then_scale")
        ->check(CLI::IsMember({"scale_then_shift", "shift_then_scale"}));
  }

  ParamsPtr build() const {
    const bool explicit_values = !alpha.empty() || !beta.empty();
    const int sources = (preset.empty() ? 0 : 1) + (params_file.empty() ? 0 : 1) +
                        (explicit_values ? 1 : 0);
    if (sources > 1) {
      throw CliError("give exactly one of --preset, --params-file or --alpha/--beta");
    }
    muller_params* raw = nullptr;
    if (!preset.empty()) {
      check(muller_params_preset(preset.c_str(), antialias_input ? 1 : 0, &raw));
    } else if (!params_file.empty()) {
      check(muller_params_from_json(read_text(params_file).c_str(), &raw));
    } else {
      const int layers = k.value_or(static_cast<int>(std::max<std::size_t>(
          {alpha.size(), beta.size(), std::size_t{2}})));
      const auto n = static_cast<std::size_t>(layers);
      if ((!alpha.empty() && alpha.size() != n) || (!beta.empty() && beta.size() != n)) {
        throw CliError("--alpha and --beta each take none or exactly k values");
      }
      check(muller_params_create(layers, &raw));
      for (std::size_t i = 0; i < n && explicit_values; ++i) {
        check(muller_params_set_layer(raw, static_cast<int>(i), alpha.empty() ? 0.0 : alpha[i],
                                      beta.empty() ? 0.0 : beta[i]));
      }
    }
    ParamsPtr params(raw);
    if (k && *k != muller_params_k(raw)) check(muller_params_set_k(raw, *k));
    if (ksize || std) {
      check(muller_params_set_kernel(raw, ksize.value_or(muller_params_ksize(raw)),
                                     std.value_or(muller_params_std(raw))));
    }
    if (!nonlinearity.empty()) {
      check(muller_params_set_nonlinearity(raw, nonlinearity == "tanh"
                                                    ? MULLER_NONLINEARITY_TANH
                                                    : MULLER_NONLINEARITY_IDENTITY));
    }
    if (!base_method.empty()) {
      check(muller_params_set_base_method(
          raw, base_method == "bilinear" ? MULLER_BASE_BILINEAR : MULLER_BASE_NEAREST));
    }
    if (!term_order.empty()) {
      check(muller_params_set_term_order(raw, term_order == "scale_then_shift"
                                                   ? MULLER_TERM_SCALE_THEN_SHIFT
                                                   : MULLER_TERM_SHIFT_THEN_SCALE));
    }
    return params;
  }
};

struct InputOptions {
  std::string input;
  int input_width = 512;
  int input_height = 512;

  void attach(CLI::App* cmd, bool required) {
    auto* opt = cmd->add_option("--input", input, "source image (PNG, PPM or PGM)");
    if (required) opt->required()->check(CLI::ExistingFile);
    cmd->add_option("--input-width", input_width,
                    "resizer input width used with --antialias-input")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--input-height", input_height,
                    "resizer input height used with --antialias-input")
        ->check(CLI::PositiveNumber);
  }

  // Loads the source and applies the optional AREA pre-downscale.
  ImagePtr prepare(bool antialias) const {
    ImagePtr img = load(input);
    if (!antialias) return img;
    const int h = std::min(input_height, muller_image_height(img.get()));
    const int w = std::min(input_width, muller_image_width(img.get()));
    if (h == muller_image_height(img.get()) && w == muller_image_width(img.get())) return img;
    muller_image* small = nullptr;
    check(muller_resize(img.get(), h, w, MULLER_RESIZE_AREA, &small));
    return ImagePtr(small);
  }
};

json params_json(const muller_params* params) {
  char* raw = nullptr;
  check(muller_params_to_json(params, &raw));
  StringPtr text(raw);
  return json::parse(text.get());
}

json stats_json(const muller_image* img) {
  muller_image_stats s;
  check(muller_image_compute_stats(img, &s));
  return {{"min", s.min}, {"max", s.max}, {"mean", s.mean}, {"high_freq_energy", s.high_freq_energy}};
}

ImagePtr base_resize(const muller_image* img, const muller_params* params, int h, int w) {
  muller_image* out = nullptr;
  check(muller_resize(img, h, w,
                      muller_params_base_method(params) == MULLER_BASE_NEAREST
                          ? MULLER_RESIZE_NEAREST
                          : MULLER_RESIZE_BILINEAR,
                      &out));
  return ImagePtr(out);
}

// ---- subcommands -----------------------------------------------------------

struct ResizeCmd {
  ParamOptions params;
  InputOptions in;
  std::string output;
  std::string emit_diff;
  std::string method = "muller";
  int width = 224;
  int height = 224;

  void attach(CLI::App& app) {
    auto* cmd = app.add_subcommand("resize", "resize an image with the multilayer resizer");
    params.attach(cmd);
    in.attach(cmd, true);
    cmd->add_option("--output", output, "output image path")->required();
    cmd->add_option("--width", width, "output width")->check(CLI::PositiveNumber);
    cmd->add_option("--height", height, "output height")->check(CLI::PositiveNumber);
    cmd->add_option("--emit-diff", emit_diff,
                    "also write (output - base resize), mapped to 0.5 + d / (2 max|d|)");
    cmd->add_option("--method", method, "muller | bilinear | nearest | area")
        ->check(CLI::IsMember({"muller", "bilinear", "nearest", "area"}));
    cmd->callback([this] { run(); });
  }

  void run() {
    const ParamsPtr p = params.build();
    const ImagePtr src = in.prepare(params.antialias_input);
    muller_image* raw = nullptr;
    if (method == "muller") {
      check(muller_forward(src.get(), p.get(), height, width, &raw));
    } else {
      const muller_resize_method m = method == "bilinear"  ? MULLER_RESIZE_BILINEAR
                                     : method == "nearest" ? MULLER_RESIZE_NEAREST
                                                           : MULLER_RESIZE_AREA;
      check(muller_resize(src.get(), height, width, m, &raw));
    }
    const ImagePtr out(raw);
    save(out.get(), output);

    const ImagePtr base = base_resize(src.get(), p.get(), height, width);
    if (!emit_diff.empty()) {
      muller_image* diff = nullptr;
      check(muller_image_difference(out.get(), base.get(), &diff));
      const ImagePtr d(diff);
      save(d.get(), emit_diff);
    }
    const json report = {{"output", output},
                         {"input_height", muller_image_height(src.get())},
                         {"input_width", muller_image_width(src.get())},
                         {"method", method},
                         {"stats", stats_json(out.get())},
                         {"base_stats", stats_json(base.get())}};
    std::cout << report.dump() << '\n';
  }
};

struct DecomposeCmd {
  ParamOptions params;
  InputOptions in;
  std::string output;
  std::string format = "png";
  int width = 224;
  int height = 224;

  void attach(CLI::App& app) {
    auto* cmd = app.add_subcommand("decompose", "write the resized base image and subbands");
    params.attach(cmd);
    in.attach(cmd, true);
    cmd->add_option("--output", output, "output directory")->required();
    cmd->add_option("--format", format, "png | ppm")->check(CLI::IsMember({"png", "ppm"}));
    cmd->add_option("--width", width, "output width")->check(CLI::PositiveNumber);
    cmd->add_option("--height", height, "output height")->check(CLI::PositiveNumber);
    cmd->callback([this] { run(); });
  }

  void run() {
    const ParamsPtr p = params.build();
    const ImagePtr src = in.prepare(params.antialias_input);
    muller_decomposition* raw = nullptr;
    check(muller_decompose(src.get(), p.get(), height, width, &raw));
    const std::unique_ptr<muller_decomposition, PartsDeleter> parts(raw);
    fs::create_directories(output);

    const std::string ext = format == "png" ? ".png" : ".ppm";
    const muller_image* base = muller_decomposition_base(parts.get());
    const std::string base_path = (fs::path(output) / ("base" + ext)).string();
    save(base, base_path);

    // Telescoping check: base + sum of subbands equals the linear form with
    // unit alpha, zero beta and identity activation.
    const int n = muller_decomposition_count(parts.get());
    const int hh = muller_image_height(base);
    const int ww = muller_image_width(base);
    const int cc = muller_image_channels(base);
    const std::size_t size = static_cast<std::size_t>(hh) * ww * cc;
    std::vector<double> sum(muller_image_data(base), muller_image_data(base) + size);

    json bands = json::array();
    for (int i = 0; i < n; ++i) {
      const muller_image* band = muller_decomposition_subband(parts.get(), i);
      const double* v = muller_image_data(band);
      double maxabs = 0.0;
      for (std::size_t j = 0; j < size; ++j) {
        sum[j] += v[j];
        maxabs = std::max(maxabs, std::abs(v[j]));
      }
      muller_image* shown = nullptr;
      check(muller_image_display_normalize(band, &shown));
      const ImagePtr s(shown);
      const std::string path = (fs::path(output) / ("subband_" + std::to_string(i + 1) + ext)).string();
      save(s.get(), path);
      bands.push_back({{"path", path}, {"max_abs", maxabs}});
    }

    muller_params* unit_raw = nullptr;
    check(muller_params_clone(p.get(), &unit_raw));
    const ParamsPtr unit(unit_raw);
    check(muller_params_set_nonlinearity(unit_raw, MULLER_NONLINEARITY_IDENTITY));
    check(muller_params_set_term_order(unit_raw, MULLER_TERM_SCALE_THEN_SHIFT));
    for (int i = 0; i < muller_params_k(unit_raw); ++i) {
      check(muller_params_set_layer(unit_raw, i, 1.0, 0.0));
    }
    muller_image* lin_raw = nullptr;
    check(muller_forward_linear_form(src.get(), unit.get(), height, width, &lin_raw));
    const ImagePtr lin(lin_raw);
    double telescoping = 0.0;
    const double* lv = muller_image_data(lin.get());
    for (std::size_t j = 0; j < size; ++j) {
      telescoping = std::max(telescoping, std::abs(sum[j] - lv[j]));
    }
    constexpr double kTelescopingTolerance = 1e-10;
    const json report = {{"base", base_path},
                         {"subbands", bands},
                         {"telescoping_max_error", telescoping}};
    std::cout << report.dump() << '\n';
    if (!(telescoping <= kTelescopingTolerance)) {
      throw CliError("subbands do not telescope to the linear form (max error " +
                     fmt(telescoping) + ")");
    }
  }
};

struct TrainCmd {
  ParamOptions params;
  std::uint64_t seed = 0;
  int epochs = 0;
  int batch_size = 0;
  double lr_resizer = 0.0;
  double lr_model = 0.0;
  int samples = 2000;
  int classes = 4;
  int source_size = 64;
  int width = 16;
  int height = 16;
  int hidden = 0;
  std::string mode = "joint";
  bool control = false;
  std::string metrics_out;
  std::string checkpoint_dir;

  void attach(CLI::App& app) {
    muller_train_config d;
    muller_train_config_default(&d);
    epochs = d.epochs;
    batch_size = d.batch_size;
    lr_resizer = d.lr_resizer;
    lr_model = d.lr_model;
    hidden = d.hidden_units;

    auto* cmd = app.add_subcommand("train", "jointly train the resizer and a toy classifier");
    params.attach(cmd);
    cmd->add_option("--seed", seed, "dataset, initialization and shuffling seed");
    cmd->add_option("--epochs", epochs)->check(CLI::NonNegativeNumber);
    cmd->add_option("--batch-size", batch_size)->check(CLI::PositiveNumber);
    cmd->add_option("--lr-resizer", lr_resizer)->check(CLI::NonNegativeNumber);
    cmd->add_option("--lr-model", lr_model)->check(CLI::PositiveNumber);
    cmd->add_option("--samples", samples, "synthetic dataset size")->check(CLI::PositiveNumber);
    cmd->add_option("--classes", classes, "number of texture classes")->check(CLI::Range(2, 1000));
    cmd->add_option("--source-size", source_size, "synthetic image side length")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--width", width, "resizer output width")->check(CLI::PositiveNumber);
    cmd->add_option("--height", height, "resizer output height")->check(CLI::PositiveNumber);
    cmd->add_option("--hidden", hidden, "classifier hidden units")->check(CLI::PositiveNumber);
    cmd->add_option("--mode", mode, "joint | frozen | none")
        ->check(CLI::IsMember({"joint", "frozen", "none"}));
    cmd->add_flag("--control", control, "same as --mode frozen");
    cmd->add_option("--metrics-out", metrics_out, "NDJSON metrics path (default: stdout)");
    cmd->add_option("--checkpoint-dir", checkpoint_dir,
                    "write params.json and classifier.bin here");
    cmd->callback([this] { run(); });
  }

  void run() {
    const ParamsPtr init = params.build();
    muller_dataset* data_raw = nullptr;
    check(muller_dataset_create(seed, samples, classes, source_size, source_size, &data_raw));
    const std::unique_ptr<muller_dataset, DatasetDeleter> data(data_raw);

    muller_train_config cfg;
    muller_train_config_default(&cfg);
    cfg.epochs = epochs;
    cfg.batch_size = batch_size;
    cfg.hidden_units = hidden;
    cfg.out_h = height;
    cfg.out_w = width;
    cfg.lr_resizer = lr_resizer;
    cfg.lr_model = lr_model;
    cfg.seed = seed;
    cfg.mode = control || mode == "frozen" ? MULLER_MODE_FROZEN
               : mode == "none"            ? MULLER_MODE_NONE
                                           : MULLER_MODE_JOINT;

    muller_train_result* raw = nullptr;
    check(muller_train(data.get(), init.get(), &cfg, &raw));
    const std::unique_ptr<muller_train_result, TrainDeleter> result(raw);

    char* nd_raw = nullptr;
    check(muller_train_result_metrics_ndjson(result.get(), &nd_raw));
    const StringPtr ndjson(nd_raw);
    if (metrics_out.empty()) {
      std::cout << ndjson.get();
    } else {
      write_text(metrics_out, ndjson.get());
    }
    if (!checkpoint_dir.empty()) {
      fs::create_directories(checkpoint_dir);
      const muller_params* final_params = muller_train_result_params(result.get());
      write_text((fs::path(checkpoint_dir) / "params.json").string(),
                 params_json(final_params).dump(2) + "\n");
      check(muller_train_result_save_classifier(
          result.get(), (fs::path(checkpoint_dir) / "classifier.bin").string().c_str()));
    }

    const int n = muller_train_result_epoch_count(result.get());
    muller_epoch_metrics first;
    muller_epoch_metrics last;
    check(muller_train_result_epoch(result.get(), 0, &first, nullptr, nullptr));
    check(muller_train_result_epoch(result.get(), n - 1, &last, nullptr, nullptr));
    std::cerr << "loss " << fmt(first.loss) << " -> " << fmt(last.loss) << ", val_accuracy "
              << fmt(first.val_accuracy) << " -> " << fmt(last.val_accuracy) << '\n';
  }
};

struct GradcheckCmd {
  muller_gradcheck_options opts{};
  bool json_out = false;
  bool verbose = false;

  void attach(CLI::App& app) {
    muller_gradcheck_options_default(&opts);
    auto* cmd = app.add_subcommand("gradcheck", "compare analytic gradients to finite differences");
    cmd->add_option("--seed", opts.seed);
    cmd->add_option("--instances", opts.instances, "parameter-gradient instances")
        ->check(CLI::NonNegativeNumber);
    cmd->add_option("--input-instances", opts.input_instances, "input-gradient instances")
        ->check(CLI::NonNegativeNumber);
    cmd->add_option("--image-size", opts.image_size)->check(CLI::PositiveNumber);
    cmd->add_option("--input-size", opts.input_size)->check(CLI::PositiveNumber);
    cmd->add_option("--eps", opts.param_eps, "finite-difference step for parameters")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--input-eps", opts.input_eps)->check(CLI::PositiveNumber);
    cmd->add_option("--tolerance", opts.param_tolerance)->check(CLI::PositiveNumber);
    cmd->add_option("--input-tolerance", opts.input_tolerance)->check(CLI::PositiveNumber);
    cmd->add_flag("--inject-bug", opts.inject_bug, "perturb the analytic alpha gradient by 1%");
    cmd->add_flag("--json", json_out, "print the report as JSON");
    cmd->add_flag("--verbose", verbose, "list every checked component");
    cmd->callback([this] { run(); });
  }

  int failures = 0;

  void run() {
    muller_gradcheck_report* raw = nullptr;
    check(muller_gradcheck_run(&opts, &raw));
    const std::unique_ptr<muller_gradcheck_report, GradcheckDeleter> report(raw);
    const int n = muller_gradcheck_entry_count(report.get());
    json entries = json::array();
    for (int i = 0; i < n; ++i) {
      muller_gradcheck_entry e;
      check(muller_gradcheck_entry_get(report.get(), i, &e));
      if (!e.passed) ++failures;
      if (json_out) {
        entries.push_back({{"instance", e.instance}, {"name", e.name}, {"analytic", e.analytic},
                           {"numeric", e.numeric}, {"rel_error", e.rel_error},
                           {"passed", e.passed != 0}});
      } else if (verbose || !e.passed) {
        std::cout << (e.passed ? "ok   " : "FAIL ") << "instance " << e.instance << ' ' << e.name
                  << " analytic=" << fmt(e.analytic) << " numeric=" << fmt(e.numeric)
                  << " rel_error=" << fmt(e.rel_error) << '\n';
      }
    }
    const double pmax = muller_gradcheck_max_param_error(report.get());
    const double imax = muller_gradcheck_max_input_error(report.get());
    if (json_out) {
      std::cout << json{{"passed", failures == 0}, {"checked", n}, {"failures", failures},
                        {"max_param_error", pmax}, {"max_input_error", imax},
                        {"entries", entries}}
                       .dump(2)
                << '\n';
    } else {
      std::cout << "checked " << n << " components, " << failures << " failed; max param error "
                << fmt(pmax) << " (tol " << fmt(opts.param_tolerance) << "), max input error "
                << fmt(imax) << " (tol " << fmt(opts.input_tolerance) << ")\n";
    }
    if (failures > 0) throw CliError("gradient check failed");
  }
};

struct FlopsCmd {
  ParamOptions params;
  int input_width = 512;
  int input_height = 512;
  int width = 224;
  int height = 224;
  int channels = 3;
  bool json_out = false;

  void attach(CLI::App& app) {
    auto* cmd = app.add_subcommand("flops", "report the analytic operation count");
    params.attach(cmd);
    cmd->add_option("--input-width", input_width)->check(CLI::PositiveNumber);
    cmd->add_option("--input-height", input_height)->check(CLI::PositiveNumber);
    cmd->add_option("--width", width)->check(CLI::PositiveNumber);
    cmd->add_option("--height", height)->check(CLI::PositiveNumber);
    cmd->add_option("--channels", channels)->check(CLI::IsMember({1, 3}));
    cmd->add_flag("--json", json_out);
    cmd->callback([this] { run(); });
  }

  void run() {
    const ParamsPtr p = params.build();
    muller_flops_report r;
    check(muller_flops(input_height, input_width, height, width, channels, p.get(), &r));
    double base = 0.0;
    check(muller_base_resize_flops(input_height, input_width, height, width, channels,
                                   MULLER_RESIZE_BILINEAR, &base));
    if (json_out) {
      std::cout << json{{"k", muller_params_k(p.get())},
                        {"resize_flops", r.resize_flops},
                        {"filter_flops", r.filter_flops},
                        {"pointwise_flops", r.pointwise_flops},
                        {"total", r.total},
                        {"gflops", r.total / 1e9},
                        {"resize_applications", r.resize_applications},
                        {"filter_applications", r.filter_applications},
                        {"bilinear_flops", base}}
                       .dump(2)
                << '\n';
    } else {
      std::cout << "k=" << muller_params_k(p.get()) << " " << input_height << "x" << input_width
                << "x" << channels << " -> " << height << "x" << width << '\n'
                << "resize    " << fmt(r.resize_flops) << " (" << r.resize_applications
                << " applications)\n"
                << "filter    " << fmt(r.filter_flops) << " (" << r.filter_applications
                << " applications)\n"
                << "pointwise " << fmt(r.pointwise_flops) << '\n'
                << "total     " << fmt(r.total) << " (" << fmt(r.total / 1e9) << " GFLOPs)\n"
                << "bilinear  " << fmt(base) << '\n';
    }
  }
};

struct BenchCmd {
  ParamOptions params;
  InputOptions in;
  int width = 224;
  int height = 224;
  int reps = 20;
  int threads = 1;
  std::uint64_t seed = 0;
  bool json_out = false;

  void attach(CLI::App& app) {
    auto* cmd = app.add_subcommand("bench", "time plain bilinear against the full resizer");
    params.attach(cmd);
    in.attach(cmd, false);
    cmd->add_option("--width", width)->check(CLI::PositiveNumber);
    cmd->add_option("--height", height)->check(CLI::PositiveNumber);
    cmd->add_option("--reps", reps)->check(CLI::PositiveNumber);
    cmd->add_option("--threads", threads, "worker threads (default 1 for stable timings)")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--seed", seed, "seed for the synthetic input when --input is absent");
    cmd->add_flag("--json", json_out);
    cmd->callback([this] { run(); });
  }

  void run() {
    const ParamsPtr p = params.build();
    ImagePtr src;
    if (in.input.empty()) {
      std::mt19937_64 rng(seed);
      std::uniform_real_distribution<double> unit(0.0, 1.0);
      std::vector<double> values(static_cast<std::size_t>(in.input_height) * in.input_width * 3);
      for (double& v : values) v = unit(rng);
      muller_image* raw = nullptr;
      check(muller_image_create(in.input_height, in.input_width, 3, values.data(), &raw));
      src.reset(raw);
    } else {
      src = in.prepare(params.antialias_input);
    }
    muller_set_num_threads(threads);
    muller_bench_report r;
    check(muller_bench(src.get(), p.get(), height, width, reps, &r));
    if (json_out) {
      std::cout << json{{"reps", r.reps},
                        {"bilinear_median_ms", r.bilinear_median_ms},
                        {"bilinear_p90_ms", r.bilinear_p90_ms},
                        {"muller_median_ms", r.muller_median_ms},
                        {"muller_p90_ms", r.muller_p90_ms},
                        {"overhead_ratio", r.overhead_ratio}}
                       .dump(2)
                << '\n';
    } else {
      std::printf("reps %d\nbilinear median %.3f ms  p90 %.3f ms\nmuller   median %.3f ms  p90 %.3f ms\n"
                  "overhead ratio %.2f\n",
                  r.reps, r.bilinear_median_ms, r.bilinear_p90_ms, r.muller_median_ms,
                  r.muller_p90_ms, r.overhead_ratio);
    }
  }
};

struct PresetsCmd {
  std::string filter;
  bool json_out = false;

  void attach(CLI::App& app) {
    auto* cmd = app.add_subcommand("presets", "list the built-in parameter presets");
    cmd->add_option("--filter", filter, "only show this preset");
    cmd->add_flag("--json", json_out);
    cmd->callback([this] { run(); });
  }

  void run() {
    std::vector<std::string> names;
    for (int i = 0; i < muller_preset_count(); ++i) names.emplace_back(muller_preset_name(i));
    if (!filter.empty()) {
      if (std::find(names.begin(), names.end(), filter) == names.end()) {
        throw CliError("unknown preset '" + filter + "'");
      }
      names = {filter};
    }
    json all = json::array();
    for (const std::string& name : names) {
      for (const int antialias : {1, 0}) {
        muller_params* raw = nullptr;
        check(muller_params_preset(name.c_str(), antialias, &raw));
        const ParamsPtr p(raw);
        if (json_out) {
          all.push_back({{"name", name}, {"antialias", antialias != 0}, {"params", params_json(p.get())}});
          continue;
        }
        std::cout << name << " antialias=" << (antialias ? "true " : "false");
        for (int l = 0; l < muller_params_k(p.get()); ++l) {
          double a = 0.0;
          double b = 0.0;
          check(muller_params_get_layer(p.get(), l, &a, &b));
          std::cout << " alpha" << l + 1 << '=' << fmt(a) << " beta" << l + 1 << '=' << fmt(b);
        }
        std::cout << '\n';
      }
    }
    if (json_out) std::cout << all.dump(2) << '\n';
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multilayer Laplacian resizer"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(muller_version()));

  ResizeCmd resize;
  DecomposeCmd decompose;
  TrainCmd train;
  GradcheckCmd gradcheck;
  FlopsCmd flops;
  BenchCmd bench;
  PresetsCmd presets;
  resize.attach(app);
  decompose.attach(app);
  train.attach(app);
  gradcheck.attach(app);
  flops.attach(app);
  bench.attach(app);
  presets.attach(app);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
