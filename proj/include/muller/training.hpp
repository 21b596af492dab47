#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "muller/image.hpp"
#include "muller/resizer.hpp"

namespace muller {

/// Two-layer perceptron: flatten -> tanh hidden layer -> logits. All weights
/// live in one flat vector laid out as [w1 (hidden x in), b1, w2 (classes x
/// hidden), b2] so a single optimizer state can cover them.
class ToyClassifier {
 public:
  ToyClassifier() = default;
  /// Zero weights.
  ToyClassifier(int input_dim, int hidden, int classes);
  /// Uniform(+-1/sqrt(fan_in)) weights, zero biases.
  static ToyClassifier initialized(int input_dim, int hidden, int classes, std::uint64_t seed);

  int input_dim() const noexcept { return input_dim_; }
  int hidden() const noexcept { return hidden_; }
  int classes() const noexcept { return classes_; }

  std::span<double> parameters() noexcept { return params_; }
  std::span<const double> parameters() const noexcept { return params_; }

  std::size_t w1_offset() const noexcept { return 0; }
  std::size_t b1_offset() const noexcept { return static_cast<std::size_t>(hidden_ * input_dim_); }
  std::size_t w2_offset() const noexcept { return b1_offset() + static_cast<std::size_t>(hidden_); }
  std::size_t b2_offset() const noexcept {
    return w2_offset() + static_cast<std::size_t>(classes_ * hidden_);
  }

  friend bool operator==(const ToyClassifier&, const ToyClassifier&) = default;

 private:
  int input_dim_ = 0;
  int hidden_ = 0;
  int classes_ = 0;
  std::vector<double> params_;
};

std::vector<std::vector<double>> classifier_forward(const ToyClassifier& model,
                                                    std::span<const Image> batch);

struct ClassifierBackward {
  double loss = 0.0;  // mean softmax cross-entropy over the batch
  int correct = 0;
  std::vector<double> param_grads;  // same layout as ToyClassifier::parameters
  std::vector<Image> input_grads;   // d loss / d input, one per batch entry
};

ClassifierBackward classifier_backward(const ToyClassifier& model, std::span<const Image> batch,
                                       std::span<const int> labels);

void save_classifier(const ToyClassifier& model, const std::string& path);
ToyClassifier load_classifier(const std::string& path);

struct AdamConfig {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

struct AdamState {
  std::vector<double> m;
  std::vector<double> v;
  std::int64_t step = 0;

  explicit AdamState(std::size_t size = 0) : m(size, 0.0), v(size, 0.0) {}
};

/// One bias-corrected Adam update of params in place.
void adam_step(AdamState& state, std::span<double> params, std::span<const double> grads,
               double lr, const AdamConfig& config = {});

struct TextureDataset {
  std::vector<Image> images;
  std::vector<int> labels;
  int n_classes = 0;
  std::uint64_t seed = 0;
};

/// Single-channel images: smooth random background plus an oriented
/// sinusoid whose orientation encodes the class, with random phase and mild
/// pixel noise. Every class has the same texture amplitude, so pixel
/// variance carries no label information.
TextureDataset make_texture_dataset(std::uint64_t seed, int n_samples, int n_classes, int src_h,
                                    int src_w);

enum class ResizerMode {
  Joint,   // resizer parameters trained with the classifier
  Frozen,  // resizer parameters held at their initial values
  None,    // plain bilinear resize, no multilayer resizer at all
};

struct TrainConfig {
  int epochs = 20;
  int batch_size = 32;
  int hidden_units = 32;
  int out_h = 16;
  int out_w = 16;
  double lr_resizer = 0.02;
  double lr_model = 0.003;
  AdamConfig adam;
  double val_fraction = 0.2;
  std::uint64_t seed = 0;
  ResizerMode mode = ResizerMode::Joint;

  void validate() const;
};

struct EpochMetrics {
  int epoch = 0;  // 0 is the state before any update
  double loss = 0.0;
  double accuracy = 0.0;
  double val_loss = 0.0;
  double val_accuracy = 0.0;
  std::vector<double> alpha;
  std::vector<double> beta;

  friend bool operator==(const EpochMetrics&, const EpochMetrics&) = default;
};

struct TrainResult {
  MullerParams params;
  ToyClassifier model;
  std::vector<EpochMetrics> metrics;
};

/// Mini-batch joint training: resizer forward -> classifier -> cross-entropy,
/// with the classifier's input gradient chained into the resizer parameter
/// gradient. Deterministic for a fixed configuration.
TrainResult train_joint(const TextureDataset& dataset, const MullerParams& params0,
                        const ToyClassifier& model0, const TrainConfig& config);

/// One JSON object per line: epoch, loss, accuracy, val_loss, val_accuracy,
/// alpha, beta.
std::string metrics_to_ndjson(const std::vector<EpochMetrics>& metrics);

}  // namespace muller
