#include "muller/muller.h"

#include <algorithm>
#include <cstring>
#include <exception>
#include <new>
#include <string>

#include "muller/bench.hpp"
#include "muller/error.hpp"
#include "muller/gradients.hpp"
#include "muller/image.hpp"
#include "muller/parallel.hpp"
#include "muller/resize.hpp"
#include "muller/resizer.hpp"
#include "muller/training.hpp"

struct muller_image {
  muller::Image value;
};

struct muller_params {
  muller::MullerParams value;
};

struct muller_decomposition {
  muller_image base;
  std::vector<muller_image> subbands;
};

struct muller_gradcheck_report {
  muller::GradcheckReport value;
};

struct muller_dataset {
  muller::TextureDataset value;
  std::vector<muller_image> images;
};

struct muller_train_result {
  muller::TrainResult value;
  muller_params params;
};

namespace {

thread_local std::string g_last_error;

muller_status to_status(muller::ErrorCode code) {
  switch (code) {
    case muller::ErrorCode::InvalidArgument:
      return MULLER_ERR_INVALID_ARGUMENT;
    case muller::ErrorCode::Io:
      return MULLER_ERR_IO;
    case muller::ErrorCode::Format:
      return MULLER_ERR_FORMAT;
    case muller::ErrorCode::Range:
      return MULLER_ERR_RANGE;
    case muller::ErrorCode::Dimension:
      return MULLER_ERR_DIMENSION;
    case muller::ErrorCode::Unsupported:
      return MULLER_ERR_UNSUPPORTED;
  }
  return MULLER_ERR_INTERNAL;
}

// Runs fn, translating exceptions into status codes and the thread-local
// error message.
template <typename Fn>
muller_status guarded(Fn&& fn) {
  try {
    g_last_error.clear();
    fn();
    return MULLER_OK;
  } catch (const muller::Error& e) {
    g_last_error = e.what();
    return to_status(e.code());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return MULLER_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return MULLER_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return MULLER_ERR_INTERNAL;
  }
}

void require(const void* ptr, const char* what) {
  if (ptr == nullptr) {
    muller::fail(muller::ErrorCode::InvalidArgument, std::string(what) + " must not be NULL");
  }
}

char* copy_string(const std::string& text) {
  char* out = new char[text.size() + 1];
  std::memcpy(out, text.c_str(), text.size() + 1);
  return out;
}

muller::ResizeMethod to_cpp(muller_resize_method method) {
  switch (method) {
    case MULLER_RESIZE_BILINEAR:
      return muller::ResizeMethod::Bilinear;
    case MULLER_RESIZE_NEAREST:
      return muller::ResizeMethod::Nearest;
    case MULLER_RESIZE_AREA:
      return muller::ResizeMethod::Area;
  }
  muller::fail(muller::ErrorCode::InvalidArgument, "unknown resize method");
}

muller_image* wrap(muller::Image img) { return new muller_image{std::move(img)}; }

}  // namespace

extern "C" {

const char* muller_version(void) { return "0.1.0"; }

const char* muller_status_name(muller_status status) {
  switch (status) {
    case MULLER_OK:
      return "ok";
    case MULLER_ERR_INVALID_ARGUMENT:
      return "invalid argument";
    case MULLER_ERR_IO:
      return "i/o error";
    case MULLER_ERR_FORMAT:
      return "format error";
    case MULLER_ERR_RANGE:
      return "value out of range";
    case MULLER_ERR_DIMENSION:
      return "dimension mismatch";
    case MULLER_ERR_UNSUPPORTED:
      return "unsupported";
    case MULLER_ERR_INTERNAL:
      return "internal error";
  }
  return "unknown status";
}

const char* muller_last_error(void) { return g_last_error.c_str(); }

void muller_string_free(char* text) { delete[] text; }

void muller_set_num_threads(int threads) { muller::set_num_threads(threads); }
int muller_get_num_threads(void) { return muller::num_threads(); }

// ---- images ----------------------------------------------------------------

muller_status muller_image_create(int height, int width, int channels, const double* data,
                                  muller_image** out) {
  return guarded([&] {
    require(out, "out");
    muller::Image img(height, width, channels);
    if (data != nullptr) {
      std::copy(data, data + img.size(), img.values().begin());
    }
    *out = wrap(std::move(img));
  });
}

muller_status muller_image_clone(const muller_image* img, muller_image** out) {
  return guarded([&] {
    require(img, "img");
    require(out, "out");
    *out = wrap(img->value);
  });
}

muller_status muller_image_load(const char* path, muller_image** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = wrap(muller::load_image(path));
  });
}

muller_status muller_image_save(const muller_image* img, const char* path, int clip) {
  return guarded([&] {
    require(img, "img");
    require(path, "path");
    muller::save_image(img->value, path, clip != 0);
  });
}

void muller_image_destroy(muller_image* img) { delete img; }

int muller_image_height(const muller_image* img) { return img ? img->value.height() : 0; }
int muller_image_width(const muller_image* img) { return img ? img->value.width() : 0; }
int muller_image_channels(const muller_image* img) { return img ? img->value.channels() : 0; }
const double* muller_image_data(const muller_image* img) {
  return img ? img->value.values().data() : nullptr;
}

muller_status muller_image_compute_stats(const muller_image* img, muller_image_stats* out) {
  return guarded([&] {
    require(img, "img");
    require(out, "out");
    const muller::ImageStats stats = muller::image_stats(img->value);
    *out = {stats.min, stats.max, stats.mean, stats.high_freq_energy};
  });
}

muller_status muller_resize(const muller_image* img, int out_h, int out_w,
                            muller_resize_method method, muller_image** out) {
  return guarded([&] {
    require(img, "img");
    require(out, "out");
    *out = wrap(muller::resize(img->value, out_h, out_w, to_cpp(method)));
  });
}

muller_status muller_resize_bilinear_vjp(int in_h, int in_w, const muller_image* cotangent,
                                         muller_image** out) {
  return guarded([&] {
    require(cotangent, "cotangent");
    require(out, "out");
    *out = wrap(muller::resize_bilinear_vjp(in_h, in_w, cotangent->value.height(),
                                            cotangent->value.width(), cotangent->value));
  });
}

muller_status muller_image_display_normalize(const muller_image* img, muller_image** out) {
  return guarded([&] {
    require(img, "img");
    require(out, "out");
    *out = wrap(muller::display_normalize(img->value));
  });
}

muller_status muller_image_difference(const muller_image* a, const muller_image* b,
                                      muller_image** out) {
  return guarded([&] {
    require(a, "a");
    require(b, "b");
    require(out, "out");
    *out = wrap(muller::display_normalize(muller::subtract(a->value, b->value)));
  });
}

// ---- parameters --------------------------------------------------------------

muller_status muller_params_create(int k, muller_params** out) {
  return guarded([&] {
    require(out, "out");
    *out = new muller_params{muller::MullerParams::with_layers(k)};
  });
}

muller_status muller_params_preset(const char* name, int antialias, muller_params** out) {
  return guarded([&] {
    require(name, "name");
    require(out, "out");
    *out = new muller_params{muller::preset(name, antialias != 0)};
  });
}

muller_status muller_params_from_json(const char* json, muller_params** out) {
  return guarded([&] {
    require(json, "json");
    require(out, "out");
    *out = new muller_params{muller::params_from_json(json)};
  });
}

muller_status muller_params_to_json(const muller_params* params, char** out_json) {
  return guarded([&] {
    require(params, "params");
    require(out_json, "out_json");
    *out_json = copy_string(muller::params_to_json(params->value));
  });
}

muller_status muller_params_clone(const muller_params* params, muller_params** out) {
  return guarded([&] {
    require(params, "params");
    require(out, "out");
    *out = new muller_params{params->value};
  });
}

void muller_params_destroy(muller_params* params) { delete params; }

int muller_params_k(const muller_params* params) { return params ? params->value.k() : 0; }

muller_status muller_params_set_k(muller_params* params, int k) {
  return guarded([&] {
    require(params, "params");
    if (k < 1) {
      muller::fail(muller::ErrorCode::InvalidArgument, "layer count must be at least 1");
    }
    params->value.layers.resize(static_cast<std::size_t>(k));
  });
}

namespace {

void check_layer(const muller_params* params, int index) {
  require(params, "params");
  if (index < 0 || index >= params->value.k()) {
    muller::fail(muller::ErrorCode::Range, "layer index out of range");
  }
}

}  // namespace

muller_status muller_params_get_layer(const muller_params* params, int index, double* alpha,
                                      double* beta) {
  return guarded([&] {
    check_layer(params, index);
    const auto& layer = params->value.layers[static_cast<std::size_t>(index)];
    if (alpha) *alpha = layer.alpha;
    if (beta) *beta = layer.beta;
  });
}

muller_status muller_params_set_layer(muller_params* params, int index, double alpha,
                                      double beta) {
  return guarded([&] {
    check_layer(params, index);
    params->value.layers[static_cast<std::size_t>(index)] = {alpha, beta};
  });
}

int muller_params_ksize(const muller_params* params) { return params ? params->value.ksize : 0; }
double muller_params_std(const muller_params* params) { return params ? params->value.std : 0.0; }

muller_status muller_params_set_kernel(muller_params* params, int ksize, double std) {
  return guarded([&] {
    require(params, "params");
    muller::MullerParams updated = params->value;
    updated.ksize = ksize;
    updated.std = std;
    updated.validate();
    params->value = std::move(updated);
  });
}

muller_nonlinearity muller_params_nonlinearity(const muller_params* params) {
  return params && params->value.nonlinearity == muller::Nonlinearity::Identity
             ? MULLER_NONLINEARITY_IDENTITY
             : MULLER_NONLINEARITY_TANH;
}

muller_status muller_params_set_nonlinearity(muller_params* params, muller_nonlinearity value) {
  return guarded([&] {
    require(params, "params");
    if (value != MULLER_NONLINEARITY_TANH && value != MULLER_NONLINEARITY_IDENTITY) {
      muller::fail(muller::ErrorCode::InvalidArgument, "unknown nonlinearity");
    }
    params->value.nonlinearity = value == MULLER_NONLINEARITY_TANH
                                     ? muller::Nonlinearity::Tanh
                                     : muller::Nonlinearity::Identity;
  });
}

muller_base_method muller_params_base_method(const muller_params* params) {
  return params && params->value.base_method == muller::BaseMethod::Nearest
             ? MULLER_BASE_NEAREST
             : MULLER_BASE_BILINEAR;
}

muller_status muller_params_set_base_method(muller_params* params, muller_base_method value) {
  return guarded([&] {
    require(params, "params");
    if (value != MULLER_BASE_BILINEAR && value != MULLER_BASE_NEAREST) {
      muller::fail(muller::ErrorCode::InvalidArgument, "unknown base method");
    }
    params->value.base_method = value == MULLER_BASE_BILINEAR ? muller::BaseMethod::Bilinear
                                                              : muller::BaseMethod::Nearest;
  });
}

muller_term_order muller_params_term_order(const muller_params* params) {
  return params && params->value.term_order == muller::TermOrder::ShiftThenScale
             ? MULLER_TERM_SHIFT_THEN_SCALE
             : MULLER_TERM_SCALE_THEN_SHIFT;
}

muller_status muller_params_set_term_order(muller_params* params, muller_term_order value) {
  return guarded([&] {
    require(params, "params");
    if (value != MULLER_TERM_SCALE_THEN_SHIFT && value != MULLER_TERM_SHIFT_THEN_SCALE) {
      muller::fail(muller::ErrorCode::InvalidArgument, "unknown term order");
    }
    params->value.term_order = value == MULLER_TERM_SCALE_THEN_SHIFT
                                    ? muller::TermOrder::ScaleThenShift
                                    : muller::TermOrder::ShiftThenScale;
  });
}

int muller_preset_count(void) { return static_cast<int>(muller::preset_names().size()); }

const char* muller_preset_name(int index) {
  static const std::vector<std::string> names = muller::preset_names();
  if (index < 0 || index >= static_cast<int>(names.size())) {
    return nullptr;
  }
  return names[static_cast<std::size_t>(index)].c_str();
}

// ---- forward ---------------------------------------------------------------

muller_status muller_forward(const muller_image* img, const muller_params* params, int out_h,
                             int out_w, muller_image** out) {
  return guarded([&] {
    require(img, "img");
    require(params, "params");
    require(out, "out");
    *out = wrap(muller::muller_forward(img->value, params->value, out_h, out_w));
  });
}

muller_status muller_forward_linear_form(const muller_image* img, const muller_params* params,
                                         int out_h, int out_w, muller_image** out) {
  return guarded([&] {
    require(img, "img");
    require(params, "params");
    require(out, "out");
    *out = wrap(muller::muller_forward_linear_form(img->value, params->value, out_h, out_w));
  });
}

muller_status muller_derive_gamma(const muller_params* params, double* gamma, int gamma_len,
                                  double* delta) {
  return guarded([&] {
    require(params, "params");
    require(gamma, "gamma");
    const muller::GammaCoeffs coeffs = muller::derive_gamma(params->value);
    if (gamma_len < static_cast<int>(coeffs.gamma.size())) {
      muller::fail(muller::ErrorCode::Dimension, "gamma buffer too small");
    }
    std::copy(coeffs.gamma.begin(), coeffs.gamma.end(), gamma);
    if (delta) *delta = coeffs.delta;
  });
}

muller_status muller_decompose(const muller_image* img, const muller_params* params, int out_h,
                               int out_w, muller_decomposition** out) {
  return guarded([&] {
    require(img, "img");
    require(params, "params");
    require(out, "out");
    muller::MullerDecomposition parts =
        muller::muller_decompose(img->value, params->value, out_h, out_w);
    auto* result = new muller_decomposition{{std::move(parts.base)}, {}};
    for (muller::Image& band : parts.subbands) {
      result->subbands.push_back({std::move(band)});
    }
    *out = result;
  });
}

int muller_decomposition_count(const muller_decomposition* parts) {
  return parts ? static_cast<int>(parts->subbands.size()) : 0;
}

const muller_image* muller_decomposition_base(const muller_decomposition* parts) {
  return parts ? &parts->base : nullptr;
}

const muller_image* muller_decomposition_subband(const muller_decomposition* parts, int index) {
  if (!parts || index < 0 || index >= static_cast<int>(parts->subbands.size())) {
    return nullptr;
  }
  return &parts->subbands[static_cast<std::size_t>(index)];
}

void muller_decomposition_destroy(muller_decomposition* parts) { delete parts; }

muller_status muller_flops(int in_h, int in_w, int out_h, int out_w, int channels,
                           const muller_params* params, muller_flops_report* out) {
  return guarded([&] {
    require(params, "params");
    require(out, "out");
    muller::ResizeSpec spec{in_h, in_w, out_h, out_w, muller::ResizeMethod::Bilinear, false};
    const muller::FlopsReport r = muller::muller_flops(spec, channels, params->value);
    *out = {r.resize_flops, r.filter_flops, r.pointwise_flops,
            r.total,        r.resize_applications, r.filter_applications};
  });
}

muller_status muller_base_resize_flops(int in_h, int in_w, int out_h, int out_w, int channels,
                                       muller_resize_method method, double* out) {
  return guarded([&] {
    require(out, "out");
    muller::ResizeSpec spec{in_h, in_w, out_h, out_w, to_cpp(method), false};
    *out = muller::base_resize_flops(spec, channels);
  });
}

// ---- gradients -------------------------------------------------------------

muller_status muller_vjp(const muller_image* img, const muller_params* params, int out_h,
                         int out_w, const muller_image* cotangent, double* d_alpha,
                         double* d_beta, muller_image** d_input) {
  return guarded([&] {
    require(img, "img");
    require(params, "params");
    require(cotangent, "cotangent");
    muller::GradBuffer grads = muller::muller_vjp(img->value, params->value, out_h, out_w,
                                                  cotangent->value, d_input != nullptr);
    if (d_alpha) std::copy(grads.d_alpha.begin(), grads.d_alpha.end(), d_alpha);
    if (d_beta) std::copy(grads.d_beta.begin(), grads.d_beta.end(), d_beta);
    if (d_input) *d_input = wrap(std::move(*grads.d_input));
  });
}

void muller_gradcheck_options_default(muller_gradcheck_options* options) {
  if (!options) return;
  const muller::GradcheckOptions d;
  *options = {d.seed,      d.instances, d.image_size,      d.input_instances, d.input_size,
              d.param_eps, d.input_eps, d.param_tolerance, d.input_tolerance, d.inject_bug ? 1 : 0};
}

muller_status muller_gradcheck_run(const muller_gradcheck_options* options,
                                   muller_gradcheck_report** out) {
  return guarded([&] {
    require(options, "options");
    require(out, "out");
    muller::GradcheckOptions o;
    o.seed = options->seed;
    o.instances = options->instances;
    o.image_size = options->image_size;
    o.input_instances = options->input_instances;
    o.input_size = options->input_size;
    o.param_eps = options->param_eps;
    o.input_eps = options->input_eps;
    o.param_tolerance = options->param_tolerance;
    o.input_tolerance = options->input_tolerance;
    o.inject_bug = options->inject_bug != 0;
    *out = new muller_gradcheck_report{muller::run_gradcheck(o)};
  });
}

int muller_gradcheck_passed(const muller_gradcheck_report* report) {
  return report && report->value.passed() ? 1 : 0;
}

int muller_gradcheck_entry_count(const muller_gradcheck_report* report) {
  return report ? static_cast<int>(report->value.entries.size()) : 0;
}

muller_status muller_gradcheck_entry_get(const muller_gradcheck_report* report, int index,
                                         muller_gradcheck_entry* out) {
  return guarded([&] {
    require(report, "report");
    require(out, "out");
    if (index < 0 || index >= static_cast<int>(report->value.entries.size())) {
      muller::fail(muller::ErrorCode::InvalidArgument, "entry index out of range");
    }
    const muller::GradcheckEntry& e = report->value.entries[static_cast<std::size_t>(index)];
    out->instance = e.instance;
    std::memset(out->name, 0, sizeof(out->name));
    std::strncpy(out->name, e.name.c_str(), sizeof(out->name) - 1);
    out->analytic = e.analytic;
    out->numeric = e.numeric;
    out->rel_error = e.rel_error;
    out->tolerance = e.tolerance;
    out->passed = e.passed ? 1 : 0;
  });
}

double muller_gradcheck_max_param_error(const muller_gradcheck_report* report) {
  return report ? report->value.max_param_error : 0.0;
}

double muller_gradcheck_max_input_error(const muller_gradcheck_report* report) {
  return report ? report->value.max_input_error : 0.0;
}

void muller_gradcheck_destroy(muller_gradcheck_report* report) { delete report; }

// ---- training --------------------------------------------------------------

muller_status muller_dataset_create(uint64_t seed, int n_samples, int n_classes, int src_h,
                                    int src_w, muller_dataset** out) {
  return guarded([&] {
    require(out, "out");
    auto* data = new muller_dataset{
        muller::make_texture_dataset(seed, n_samples, n_classes, src_h, src_w), {}};
    data->images.reserve(data->value.images.size());
    for (const muller::Image& img : data->value.images) {
      data->images.push_back({img});
    }
    *out = data;
  });
}

int muller_dataset_size(const muller_dataset* data) {
  return data ? static_cast<int>(data->value.images.size()) : 0;
}

int muller_dataset_classes(const muller_dataset* data) { return data ? data->value.n_classes : 0; }

int muller_dataset_label(const muller_dataset* data, int index) {
  if (!data || index < 0 || index >= static_cast<int>(data->value.labels.size())) {
    return -1;
  }
  return data->value.labels[static_cast<std::size_t>(index)];
}

const muller_image* muller_dataset_image(const muller_dataset* data, int index) {
  if (!data || index < 0 || index >= static_cast<int>(data->images.size())) {
    return nullptr;
  }
  return &data->images[static_cast<std::size_t>(index)];
}

void muller_dataset_destroy(muller_dataset* data) { delete data; }

void muller_train_config_default(muller_train_config* config) {
  if (!config) return;
  const muller::TrainConfig d;
  config->epochs = d.epochs;
  config->batch_size = d.batch_size;
  config->hidden_units = d.hidden_units;
  config->out_h = d.out_h;
  config->out_w = d.out_w;
  config->lr_resizer = d.lr_resizer;
  config->lr_model = d.lr_model;
  config->adam_beta1 = d.adam.beta1;
  config->adam_beta2 = d.adam.beta2;
  config->adam_eps = d.adam.eps;
  config->val_fraction = d.val_fraction;
  config->seed = d.seed;
  config->mode = MULLER_MODE_JOINT;
}

muller_status muller_train(const muller_dataset* data, const muller_params* init,
                           const muller_train_config* config, muller_train_result** out) {
  return guarded([&] {
    require(data, "data");
    require(init, "init");
    require(config, "config");
    require(out, "out");
    muller::TrainConfig cfg;
    cfg.epochs = config->epochs;
    cfg.batch_size = config->batch_size;
    cfg.hidden_units = config->hidden_units;
    cfg.out_h = config->out_h;
    cfg.out_w = config->out_w;
    cfg.lr_resizer = config->lr_resizer;
    cfg.lr_model = config->lr_model;
    cfg.adam = {config->adam_beta1, config->adam_beta2, config->adam_eps};
    cfg.val_fraction = config->val_fraction;
    cfg.seed = config->seed;
    switch (config->mode) {
      case MULLER_MODE_JOINT:
        cfg.mode = muller::ResizerMode::Joint;
        break;
      case MULLER_MODE_FROZEN:
        cfg.mode = muller::ResizerMode::Frozen;
        break;
      case MULLER_MODE_NONE:
        cfg.mode = muller::ResizerMode::None;
        break;
      default:
        muller::fail(muller::ErrorCode::InvalidArgument, "unknown resizer mode");
    }
    cfg.validate();
    if (data->value.images.empty()) {
      muller::fail(muller::ErrorCode::InvalidArgument, "dataset is empty");
    }
    const int channels = data->value.images.front().channels();
    const muller::ToyClassifier model0 = muller::ToyClassifier::initialized(
        cfg.out_h * cfg.out_w * channels, cfg.hidden_units, data->value.n_classes, cfg.seed);
    muller::TrainResult result = muller::train_joint(data->value, init->value, model0, cfg);
    muller::MullerParams params = result.params;
    *out = new muller_train_result{std::move(result), {std::move(params)}};
  });
}

const muller_params* muller_train_result_params(const muller_train_result* result) {
  return result ? &result->params : nullptr;
}

int muller_train_result_epoch_count(const muller_train_result* result) {
  return result ? static_cast<int>(result->value.metrics.size()) : 0;
}

muller_status muller_train_result_epoch(const muller_train_result* result, int index,
                                        muller_epoch_metrics* out, double* alpha, double* beta) {
  return guarded([&] {
    require(result, "result");
    if (index < 0 || index >= static_cast<int>(result->value.metrics.size())) {
      muller::fail(muller::ErrorCode::InvalidArgument, "epoch index out of range");
    }
    const muller::EpochMetrics& m = result->value.metrics[static_cast<std::size_t>(index)];
    if (out) *out = {m.epoch, m.loss, m.accuracy, m.val_loss, m.val_accuracy};
    if (alpha) std::copy(m.alpha.begin(), m.alpha.end(), alpha);
    if (beta) std::copy(m.beta.begin(), m.beta.end(), beta);
  });
}

muller_status muller_train_result_metrics_ndjson(const muller_train_result* result, char** out) {
  return guarded([&] {
    require(result, "result");
    require(out, "out");
    *out = copy_string(muller::metrics_to_ndjson(result->value.metrics));
  });
}

muller_status muller_train_result_save_classifier(const muller_train_result* result,
                                                  const char* path) {
  return guarded([&] {
    require(result, "result");
    require(path, "path");
    muller::save_classifier(result->value.model, path);
  });
}

void muller_train_result_destroy(muller_train_result* result) { delete result; }

// ---- bench -----------------------------------------------------------------

muller_status muller_bench(const muller_image* img, const muller_params* params, int out_h,
                           int out_w, int reps, muller_bench_report* out) {
  return guarded([&] {
    require(img, "img");
    require(params, "params");
    require(out, "out");
    const muller::BenchReport r = muller::bench_resizer(img->value, params->value, out_h, out_w, reps);
    *out = {r.bilinear.median_ms, r.bilinear.p90_ms, r.muller.median_ms,
            r.muller.p90_ms,      r.overhead_ratio,  r.reps};
  });
}

}  // extern "C"
