#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>
#include <sstream>
#include <string>

#include "muller/error.hpp"
#include "muller/gradients.hpp"
#include "muller/training.hpp"

namespace muller {

TextureDataset make_texture_dataset(std::uint64_t seed, int n_samples, int n_classes, int src_h,
                                    int src_w) {
  if (n_classes < 2) {
    fail(ErrorCode::InvalidArgument, "texture dataset needs at least two classes");
  }
  if (n_samples < 0 || src_h < 1 || src_w < 1) {
    fail(ErrorCode::InvalidArgument, "invalid texture dataset size");
  }
  constexpr double kTwoPi = 2.0 * std::numbers::pi;
  // Cycles per source pixel. At 4:1 bilinear the 2-tap sampling keeps
  // roughly cos(pi * f) = 0.6 of the texture and aliases it.
  constexpr double kTextureFrequency = 0.3;
  constexpr double kTextureAmplitude = 0.12;
  constexpr double kNoise = 0.03;
  constexpr int kBackgroundWaves = 3;
  constexpr double kBackgroundAmplitude = 0.08;

  TextureDataset data;
  data.n_classes = n_classes;
  data.seed = seed;
  data.labels.resize(static_cast<std::size_t>(n_samples));
  for (int i = 0; i < n_samples; ++i) {
    data.labels[static_cast<std::size_t>(i)] = i % n_classes;
  }
  std::mt19937_64 rng(seed);
  std::shuffle(data.labels.begin(), data.labels.end(), rng);

  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<int> low_freq(-2, 2);
  std::normal_distribution<double> noise(0.0, kNoise);

  data.images.reserve(static_cast<std::size_t>(n_samples));
  for (int n = 0; n < n_samples; ++n) {
    const int label = data.labels[static_cast<std::size_t>(n)];
    const double theta = std::numbers::pi * static_cast<double>(label) / static_cast<double>(n_classes);
    const double kx = kTextureFrequency * std::cos(theta);
    const double ky = kTextureFrequency * std::sin(theta);
    const double phase = kTwoPi * unit(rng);

    struct Wave {
      double fx, fy, amplitude, phase;
    };
    Wave waves[kBackgroundWaves];
    for (Wave& w : waves) {
      w.fx = static_cast<double>(low_freq(rng)) / static_cast<double>(src_w);
      w.fy = static_cast<double>(low_freq(rng)) / static_cast<double>(src_h);
      w.amplitude = kBackgroundAmplitude * unit(rng);
      w.phase = kTwoPi * unit(rng);
    }
    const double offset = 0.35 + 0.3 * unit(rng);

    Image img(src_h, src_w, 1);
    for (int y = 0; y < src_h; ++y) {
      for (int x = 0; x < src_w; ++x) {
        const double fx = static_cast<double>(x);
        const double fy = static_cast<double>(y);
        double v = offset + kTextureAmplitude * std::cos(kTwoPi * (kx * fx + ky * fy) + phase);
        for (const Wave& w : waves) {
          v += w.amplitude * std::cos(kTwoPi * (w.fx * fx + w.fy * fy) + w.phase);
        }
        img.at(y, x, 0) = v + noise(rng);
      }
    }
    data.images.push_back(std::move(img));
  }
  return data;
}

void TrainConfig::validate() const {
  if (epochs < 0 || batch_size < 1 || hidden_units < 1 || out_h < 1 || out_w < 1) {
    fail(ErrorCode::InvalidArgument, "training counts and sizes must be positive");
  }
  if (!(lr_resizer >= 0.0) || !(lr_model > 0.0)) {
    fail(ErrorCode::InvalidArgument, "learning rates must be positive");
  }
  if (!(val_fraction >= 0.0 && val_fraction < 1.0)) {
    fail(ErrorCode::InvalidArgument, "validation fraction must lie in [0, 1)");
  }
  if (!(adam.beta1 >= 0.0 && adam.beta1 < 1.0 && adam.beta2 >= 0.0 && adam.beta2 < 1.0 &&
        adam.eps > 0.0)) {
    fail(ErrorCode::InvalidArgument, "invalid Adam hyperparameters");
  }
}

namespace {

struct Evaluation {
  double loss = 0.0;
  double accuracy = 0.0;
};

class Pipeline {
 public:
  Pipeline(const TextureDataset& data, const MullerParams& params, const TrainConfig& config)
      : mode_(config.mode) {
    parts_.reserve(data.images.size());
    for (const Image& img : data.images) {
      if (img.height() < config.out_h || img.width() < config.out_w) {
        fail(ErrorCode::InvalidArgument, "source images must be at least the output size");
      }
      if (mode_ == ResizerMode::None) {
        parts_.push_back({resize_bilinear(img, config.out_h, config.out_w), {}});
      } else {
        parts_.push_back(muller_decompose(img, params, config.out_h, config.out_w));
      }
    }
  }

  Image input(std::size_t index, const MullerParams& params) const {
    return mode_ == ResizerMode::None ? parts_[index].base : muller_compose(parts_[index], params);
  }

  const MullerDecomposition& parts(std::size_t index) const { return parts_[index]; }

 private:
  ResizerMode mode_;
  std::vector<MullerDecomposition> parts_;
};

Evaluation evaluate(const Pipeline& pipeline, const MullerParams& params,
                    const ToyClassifier& model, const TextureDataset& data,
                    std::span<const std::size_t> indices, int batch_size) {
  Evaluation eval;
  if (indices.empty()) {
    return eval;
  }
  double loss_sum = 0.0;
  int correct = 0;
  for (std::size_t start = 0; start < indices.size(); start += static_cast<std::size_t>(batch_size)) {
    const std::size_t end = std::min(indices.size(), start + static_cast<std::size_t>(batch_size));
    std::vector<Image> batch;
    std::vector<int> labels;
    for (std::size_t i = start; i < end; ++i) {
      batch.push_back(pipeline.input(indices[i], params));
      labels.push_back(data.labels[indices[i]]);
    }
    const ClassifierBackward out = classifier_backward(model, batch, labels);
    loss_sum += out.loss * static_cast<double>(end - start);
    correct += out.correct;
  }
  eval.loss = loss_sum / static_cast<double>(indices.size());
  eval.accuracy = static_cast<double>(correct) / static_cast<double>(indices.size());
  return eval;
}

EpochMetrics snapshot(int epoch, const Evaluation& train, const Evaluation& val,
                      const MullerParams& params) {
  EpochMetrics m;
  m.epoch = epoch;
  m.loss = train.loss;
  m.accuracy = train.accuracy;
  m.val_loss = val.loss;
  m.val_accuracy = val.accuracy;
  m.alpha = params.alphas();
  m.beta = params.betas();
  return m;
}

}  // namespace

TrainResult train_joint(const TextureDataset& dataset, const MullerParams& params0,
                        const ToyClassifier& model0, const TrainConfig& config) {
  config.validate();
  params0.validate();
  if (dataset.images.empty() || dataset.images.size() != dataset.labels.size()) {
    fail(ErrorCode::InvalidArgument, "dataset is empty or inconsistent");
  }
  const int channels = dataset.images.front().channels();
  if (model0.input_dim() != config.out_h * config.out_w * channels) {
    fail(ErrorCode::Dimension, "classifier input size does not match the resizer output");
  }
  if (model0.classes() < dataset.n_classes) {
    fail(ErrorCode::Dimension, "classifier has fewer outputs than the dataset has classes");
  }

  const std::size_t n = dataset.images.size();
  const std::size_t n_val = static_cast<std::size_t>(std::floor(config.val_fraction * static_cast<double>(n)));
  const std::size_t n_train = n - n_val;
  if (n_train == 0) {
    fail(ErrorCode::InvalidArgument, "no training samples left after the validation split");
  }
  std::vector<std::size_t> train_idx(n_train);
  std::iota(train_idx.begin(), train_idx.end(), std::size_t{0});
  std::vector<std::size_t> val_idx(n_val);
  std::iota(val_idx.begin(), val_idx.end(), n_train);

  TrainResult result;
  result.params = params0;
  result.model = model0;
  const Pipeline pipeline(dataset, params0, config);
  const bool train_resizer = config.mode == ResizerMode::Joint;

  AdamState model_opt(result.model.parameters().size());
  AdamState resizer_opt(static_cast<std::size_t>(params0.trainable_count()));
  std::vector<double> resizer_flat(resizer_opt.m.size());
  std::vector<double> resizer_grads(resizer_opt.m.size());
  std::mt19937_64 rng(config.seed);

  auto record = [&](int epoch) {
    result.metrics.push_back(snapshot(
        epoch, evaluate(pipeline, result.params, result.model, dataset, train_idx, config.batch_size),
        evaluate(pipeline, result.params, result.model, dataset, val_idx, config.batch_size),
        result.params));
  };
  record(0);

  const std::size_t k = result.params.layers.size();
  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    std::shuffle(train_idx.begin(), train_idx.end(), rng);
    for (std::size_t start = 0; start < n_train; start += static_cast<std::size_t>(config.batch_size)) {
      const std::size_t end = std::min(n_train, start + static_cast<std::size_t>(config.batch_size));
      std::vector<Image> batch;
      std::vector<int> labels;
      for (std::size_t i = start; i < end; ++i) {
        batch.push_back(pipeline.input(train_idx[i], result.params));
        labels.push_back(dataset.labels[train_idx[i]]);
      }
      const ClassifierBackward back = classifier_backward(result.model, batch, labels);

      if (train_resizer) {
        std::fill(resizer_grads.begin(), resizer_grads.end(), 0.0);
        for (std::size_t b = 0; b < batch.size(); ++b) {
          const GradBuffer g = muller_param_grads(pipeline.parts(train_idx[start + b]),
                                                  result.params, back.input_grads[b]);
          for (std::size_t l = 0; l < k; ++l) {
            resizer_grads[2 * l] += g.d_alpha[l];
            resizer_grads[2 * l + 1] += g.d_beta[l];
          }
        }
        for (std::size_t l = 0; l < k; ++l) {
          resizer_flat[2 * l] = result.params.layers[l].alpha;
          resizer_flat[2 * l + 1] = result.params.layers[l].beta;
        }
        adam_step(resizer_opt, resizer_flat, resizer_grads, config.lr_resizer, config.adam);
        for (std::size_t l = 0; l < k; ++l) {
          result.params.layers[l] = {resizer_flat[2 * l], resizer_flat[2 * l + 1]};
        }
      }
      adam_step(model_opt, result.model.parameters(), back.param_grads, config.lr_model,
                config.adam);
    }
    record(epoch);
  }
  return result;
}

std::string metrics_to_ndjson(const std::vector<EpochMetrics>& metrics) {
  std::ostringstream out;
  for (const EpochMetrics& m : metrics) {
    const nlohmann::ordered_json record = {
        {"epoch", m.epoch},       {"loss", m.loss},
        {"accuracy", m.accuracy}, {"val_loss", m.val_loss},
        {"val_accuracy", m.val_accuracy}, {"alpha", m.alpha},
        {"beta", m.beta},
    };
    out << record.dump() << '\n';
  }
  return out.str();
}

}  // namespace muller
