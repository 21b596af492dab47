/*
 * C interface to the multilayer Laplacian resizer library.
 *
 * Every object is an opaque handle created by a *_create / *_load / producer
 * function and released with the matching *_destroy. Functions that can fail
 * return a muller_status; on failure muller_last_error() describes the most
 * recent error on the calling thread. Output handles are only written on
 * success. Borrowed pointers (const returns from accessors) stay valid until
 * the owning handle is destroyed.
 */
#ifndef MULLER_MULLER_H
#define MULLER_MULLER_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(MULLER_BUILDING_LIBRARY)
#    define MULLER_API __declspec(dllexport)
#  else
#    define MULLER_API __declspec(dllimport)
#  endif
#else
#  define MULLER_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum muller_status {
  MULLER_OK = 0,
  MULLER_ERR_INVALID_ARGUMENT = 1,
  MULLER_ERR_IO = 2,
  MULLER_ERR_FORMAT = 3,
  MULLER_ERR_RANGE = 4,
  MULLER_ERR_DIMENSION = 5,
  MULLER_ERR_UNSUPPORTED = 6,
  MULLER_ERR_INTERNAL = 7
} muller_status;

MULLER_API const char* muller_version(void);
MULLER_API const char* muller_status_name(muller_status status);
/* Message for the last failed call on this thread ("" if none). */
MULLER_API const char* muller_last_error(void);
/* Releases strings returned through char** out-parameters. */
MULLER_API void muller_string_free(char* text);

/* Row-parallelism cap. Defaults to MULLER_THREADS, else 1. */
MULLER_API void muller_set_num_threads(int threads);
MULLER_API int muller_get_num_threads(void);

/* ---- images ------------------------------------------------------------ */

typedef struct muller_image muller_image;

typedef enum muller_resize_method {
  MULLER_RESIZE_BILINEAR = 0,
  MULLER_RESIZE_NEAREST = 1,
  MULLER_RESIZE_AREA = 2
} muller_resize_method;

typedef struct muller_image_stats {
  double min;
  double max;
  double mean;
  double high_freq_energy;
} muller_image_stats;

/* data may be NULL for a zero image; otherwise height*width*channels values. */
MULLER_API muller_status muller_image_create(int height, int width, int channels,
                                             const double* data, muller_image** out);
MULLER_API muller_status muller_image_clone(const muller_image* img, muller_image** out);
MULLER_API muller_status muller_image_load(const char* path, muller_image** out);
MULLER_API muller_status muller_image_save(const muller_image* img, const char* path, int clip);
MULLER_API void muller_image_destroy(muller_image* img);

MULLER_API int muller_image_height(const muller_image* img);
MULLER_API int muller_image_width(const muller_image* img);
MULLER_API int muller_image_channels(const muller_image* img);
MULLER_API const double* muller_image_data(const muller_image* img);

MULLER_API muller_status muller_image_compute_stats(const muller_image* img,
                                                    muller_image_stats* out);
MULLER_API muller_status muller_resize(const muller_image* img, int out_h, int out_w,
                                       muller_resize_method method, muller_image** out);
/* Adjoint of the bilinear resize from in_h x in_w to the cotangent's size. */
MULLER_API muller_status muller_resize_bilinear_vjp(int in_h, int in_w,
                                                    const muller_image* cotangent,
                                                    muller_image** out);
/* 0.5 + v / (2 max|v|); zero maps to mid-gray. */
MULLER_API muller_status muller_image_display_normalize(const muller_image* img,
                                                        muller_image** out);
/* display_normalize(a - b). */
MULLER_API muller_status muller_image_difference(const muller_image* a, const muller_image* b,
                                                 muller_image** out);

/* ---- resizer parameters ------------------------------------------------ */

typedef struct muller_params muller_params;

typedef enum muller_nonlinearity {
  MULLER_NONLINEARITY_TANH = 0,
  MULLER_NONLINEARITY_IDENTITY = 1
} muller_nonlinearity;

typedef enum muller_base_method {
  MULLER_BASE_BILINEAR = 0,
  MULLER_BASE_NEAREST = 1
} muller_base_method;

typedef enum muller_term_order {
  /* sigma(alpha * R(s) + beta) */
  MULLER_TERM_SCALE_THEN_SHIFT = 0,
  /* sigma(alpha * (R(s) + beta)) */
  MULLER_TERM_SHIFT_THEN_SCALE = 1
} muller_term_order;

/* k zero layers, ksize 5, std 1, tanh, bilinear, scale-then-shift. */
MULLER_API muller_status muller_params_create(int k, muller_params** out);
MULLER_API muller_status muller_params_preset(const char* name, int antialias,
                                              muller_params** out);
MULLER_API muller_status muller_params_from_json(const char* json, muller_params** out);
MULLER_API muller_status muller_params_to_json(const muller_params* params, char** out_json);
MULLER_API muller_status muller_params_clone(const muller_params* params, muller_params** out);
MULLER_API void muller_params_destroy(muller_params* params);

MULLER_API int muller_params_k(const muller_params* params);
/* Grows with zero layers or truncates. */
MULLER_API muller_status muller_params_set_k(muller_params* params, int k);
MULLER_API muller_status muller_params_get_layer(const muller_params* params, int index,
                                                 double* alpha, double* beta);
MULLER_API muller_status muller_params_set_layer(muller_params* params, int index, double alpha,
                                                 double beta);
MULLER_API int muller_params_ksize(const muller_params* params);
MULLER_API double muller_params_std(const muller_params* params);
MULLER_API muller_status muller_params_set_kernel(muller_params* params, int ksize, double std);
MULLER_API muller_nonlinearity muller_params_nonlinearity(const muller_params* params);
MULLER_API muller_status muller_params_set_nonlinearity(muller_params* params,
                                                        muller_nonlinearity value);
MULLER_API muller_base_method muller_params_base_method(const muller_params* params);
MULLER_API muller_status muller_params_set_base_method(muller_params* params,
                                                       muller_base_method value);
MULLER_API muller_term_order muller_params_term_order(const muller_params* params);
MULLER_API muller_status muller_params_set_term_order(muller_params* params,
                                                       muller_term_order value);

MULLER_API int muller_preset_count(void);
/* Name of the index-th preset, NULL when out of range. */
MULLER_API const char* muller_preset_name(int index);

/* ---- forward pass ------------------------------------------------------ */

MULLER_API muller_status muller_forward(const muller_image* img, const muller_params* params,
                                        int out_h, int out_w, muller_image** out);
/* Identity nonlinearity only. */
MULLER_API muller_status muller_forward_linear_form(const muller_image* img,
                                                    const muller_params* params, int out_h,
                                                    int out_w, muller_image** out);
/* gamma receives k + 1 values; gamma_len must be at least k + 1. */
MULLER_API muller_status muller_derive_gamma(const muller_params* params, double* gamma,
                                             int gamma_len, double* delta);

typedef struct muller_decomposition muller_decomposition;

/* Base image and the k resized Laplacian subbands at output resolution. */
MULLER_API muller_status muller_decompose(const muller_image* img, const muller_params* params,
                                          int out_h, int out_w, muller_decomposition** out);
MULLER_API int muller_decomposition_count(const muller_decomposition* parts);
MULLER_API const muller_image* muller_decomposition_base(const muller_decomposition* parts);
MULLER_API const muller_image* muller_decomposition_subband(const muller_decomposition* parts,
                                                            int index);
MULLER_API void muller_decomposition_destroy(muller_decomposition* parts);

typedef struct muller_flops_report {
  double resize_flops;
  double filter_flops;
  double pointwise_flops;
  double total;
  int resize_applications;
  int filter_applications;
} muller_flops_report;

MULLER_API muller_status muller_flops(int in_h, int in_w, int out_h, int out_w, int channels,
                                      const muller_params* params, muller_flops_report* out);
MULLER_API muller_status muller_base_resize_flops(int in_h, int in_w, int out_h, int out_w,
                                                  int channels, muller_resize_method method,
                                                  double* out);

/* ---- gradients --------------------------------------------------------- */

/* d_alpha and d_beta receive k values each (either may be NULL). d_input may
 * be NULL; otherwise it receives the input-image gradient. */
MULLER_API muller_status muller_vjp(const muller_image* img, const muller_params* params,
                                    int out_h, int out_w, const muller_image* cotangent,
                                    double* d_alpha, double* d_beta, muller_image** d_input);

typedef struct muller_gradcheck_options {
  uint64_t seed;
  int instances;
  int image_size;
  int input_instances;
  int input_size;
  double param_eps;
  double input_eps;
  double param_tolerance;
  double input_tolerance;
  int inject_bug;
} muller_gradcheck_options;

typedef struct muller_gradcheck_entry {
  int instance;
  char name[32];
  double analytic;
  double numeric;
  double rel_error;
  double tolerance;
  int passed;
} muller_gradcheck_entry;

typedef struct muller_gradcheck_report muller_gradcheck_report;

MULLER_API void muller_gradcheck_options_default(muller_gradcheck_options* options);
MULLER_API muller_status muller_gradcheck_run(const muller_gradcheck_options* options,
                                              muller_gradcheck_report** out);
MULLER_API int muller_gradcheck_passed(const muller_gradcheck_report* report);
MULLER_API int muller_gradcheck_entry_count(const muller_gradcheck_report* report);
MULLER_API muller_status muller_gradcheck_entry_get(const muller_gradcheck_report* report,
                                                    int index, muller_gradcheck_entry* out);
MULLER_API double muller_gradcheck_max_param_error(const muller_gradcheck_report* report);
MULLER_API double muller_gradcheck_max_input_error(const muller_gradcheck_report* report);
MULLER_API void muller_gradcheck_destroy(muller_gradcheck_report* report);

/* ---- joint training ---------------------------------------------------- */

typedef struct muller_dataset muller_dataset;

MULLER_API muller_status muller_dataset_create(uint64_t seed, int n_samples, int n_classes,
                                               int src_h, int src_w, muller_dataset** out);
MULLER_API int muller_dataset_size(const muller_dataset* data);
MULLER_API int muller_dataset_classes(const muller_dataset* data);
MULLER_API int muller_dataset_label(const muller_dataset* data, int index);
MULLER_API const muller_image* muller_dataset_image(const muller_dataset* data, int index);
MULLER_API void muller_dataset_destroy(muller_dataset* data);

typedef enum muller_resizer_mode {
  MULLER_MODE_JOINT = 0,
  MULLER_MODE_FROZEN = 1,
  MULLER_MODE_NONE = 2
} muller_resizer_mode;

typedef struct muller_train_config {
  int epochs;
  int batch_size;
  int hidden_units;
  int out_h;
  int out_w;
  double lr_resizer;
  double lr_model;
  double adam_beta1;
  double adam_beta2;
  double adam_eps;
  double val_fraction;
  uint64_t seed;
  muller_resizer_mode mode;
} muller_train_config;

typedef struct muller_epoch_metrics {
  int epoch;
  double loss;
  double accuracy;
  double val_loss;
  double val_accuracy;
} muller_epoch_metrics;

typedef struct muller_train_result muller_train_result;

MULLER_API void muller_train_config_default(muller_train_config* config);
/* The classifier is initialized from config->seed. */
MULLER_API muller_status muller_train(const muller_dataset* data, const muller_params* init,
                                      const muller_train_config* config,
                                      muller_train_result** out);
MULLER_API const muller_params* muller_train_result_params(const muller_train_result* result);
MULLER_API int muller_train_result_epoch_count(const muller_train_result* result);
/* alpha and beta (either may be NULL) receive k values. */
MULLER_API muller_status muller_train_result_epoch(const muller_train_result* result, int index,
                                                   muller_epoch_metrics* out, double* alpha,
                                                   double* beta);
MULLER_API muller_status muller_train_result_metrics_ndjson(const muller_train_result* result,
                                                            char** out);
MULLER_API muller_status muller_train_result_save_classifier(const muller_train_result* result,
                                                             const char* path);
MULLER_API void muller_train_result_destroy(muller_train_result* result);

/* ---- benchmarking ------------------------------------------------------ */

typedef struct muller_bench_report {
  double bilinear_median_ms;
  double bilinear_p90_ms;
  double muller_median_ms;
  double muller_p90_ms;
  double overhead_ratio;
  int reps;
} muller_bench_report;

MULLER_API muller_status muller_bench(const muller_image* img, const muller_params* params,
                                      int out_h, int out_w, int reps, muller_bench_report* out);

#ifdef __cplusplus
}
#endif

#endif /* MULLER_MULLER_H */
