#include <cmath>
#include <cstring>
#include <fstream>
#include <random>
#include <string>

#include "muller/error.hpp"
#include "muller/training.hpp"

namespace muller {

ToyClassifier::ToyClassifier(int input_dim, int hidden, int classes)
    : input_dim_(input_dim), hidden_(hidden), classes_(classes) {
  if (input_dim < 1 || hidden < 1 || classes < 2) {
    fail(ErrorCode::InvalidArgument, "classifier needs input_dim >= 1, hidden >= 1, classes >= 2");
  }
  params_.assign(b2_offset() + static_cast<std::size_t>(classes), 0.0);
}

ToyClassifier ToyClassifier::initialized(int input_dim, int hidden, int classes,
                                         std::uint64_t seed) {
  ToyClassifier model(input_dim, hidden, classes);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> w1(-1.0, 1.0);
  const double s1 = 1.0 / std::sqrt(static_cast<double>(input_dim));
  const double s2 = 1.0 / std::sqrt(static_cast<double>(hidden));
  auto p = model.parameters();
  for (std::size_t i = model.w1_offset(); i < model.b1_offset(); ++i) p[i] = s1 * w1(rng);
  for (std::size_t i = model.w2_offset(); i < model.b2_offset(); ++i) p[i] = s2 * w1(rng);
  return model;
}

namespace {

void check_input(const ToyClassifier& model, const Image& img) {
  if (static_cast<int>(img.size()) != model.input_dim()) {
    fail(ErrorCode::Dimension, "classifier expects " + std::to_string(model.input_dim()) +
                                   " inputs, got " + std::to_string(img.size()));
  }
}

// hidden = tanh(W1 x + b1), logits = W2 hidden + b2
void forward_one(const ToyClassifier& model, std::span<const double> x, std::vector<double>& hidden,
                 std::vector<double>& logits) {
  const auto p = model.parameters();
  const std::size_t in = static_cast<std::size_t>(model.input_dim());
  const std::size_t nh = static_cast<std::size_t>(model.hidden());
  hidden.resize(nh);
  logits.resize(static_cast<std::size_t>(model.classes()));
  for (std::size_t j = 0; j < nh; ++j) {
    const double* w = p.data() + model.w1_offset() + j * in;
    double a = p[model.b1_offset() + j];
    for (std::size_t i = 0; i < in; ++i) a += w[i] * x[i];
    hidden[j] = std::tanh(a);
  }
  for (std::size_t c = 0; c < logits.size(); ++c) {
    const double* w = p.data() + model.w2_offset() + c * nh;
    double a = p[model.b2_offset() + c];
    for (std::size_t j = 0; j < nh; ++j) a += w[j] * hidden[j];
    logits[c] = a;
  }
}

}  // namespace

std::vector<std::vector<double>> classifier_forward(const ToyClassifier& model,
                                                    std::span<const Image> batch) {
  std::vector<std::vector<double>> out;
  out.reserve(batch.size());
  std::vector<double> hidden;
  for (const Image& img : batch) {
    check_input(model, img);
    std::vector<double> logits;
    forward_one(model, img.values(), hidden, logits);
    out.push_back(std::move(logits));
  }
  return out;
}

ClassifierBackward classifier_backward(const ToyClassifier& model, std::span<const Image> batch,
                                       std::span<const int> labels) {
  if (batch.size() != labels.size() || batch.empty()) {
    fail(ErrorCode::Dimension, "batch and label counts differ or are zero");
  }
  const std::size_t in = static_cast<std::size_t>(model.input_dim());
  const std::size_t nh = static_cast<std::size_t>(model.hidden());
  const std::size_t nc = static_cast<std::size_t>(model.classes());
  const auto p = model.parameters();
  const double inv_batch = 1.0 / static_cast<double>(batch.size());

  ClassifierBackward result;
  result.param_grads.assign(p.size(), 0.0);
  result.input_grads.reserve(batch.size());
  auto& g = result.param_grads;

  std::vector<double> hidden;
  std::vector<double> logits;
  std::vector<double> d_logits(nc);
  std::vector<double> d_pre(nh);

  for (std::size_t b = 0; b < batch.size(); ++b) {
    check_input(model, batch[b]);
    const int label = labels[b];
    if (label < 0 || label >= model.classes()) {
      fail(ErrorCode::InvalidArgument, "label out of range");
    }
    const auto x = batch[b].values();
    forward_one(model, x, hidden, logits);

    // Softmax cross-entropy with the max subtracted for stability.
    double top = logits[0];
    std::size_t argmax = 0;
    for (std::size_t c = 1; c < nc; ++c) {
      if (logits[c] > top) {
        top = logits[c];
        argmax = c;
      }
    }
    double total = 0.0;
    for (std::size_t c = 0; c < nc; ++c) total += std::exp(logits[c] - top);
    const double log_total = std::log(total);
    result.loss += (log_total - (logits[static_cast<std::size_t>(label)] - top)) * inv_batch;
    if (argmax == static_cast<std::size_t>(label)) ++result.correct;

    for (std::size_t c = 0; c < nc; ++c) {
      const double prob = std::exp(logits[c] - top - log_total);
      d_logits[c] = (prob - (c == static_cast<std::size_t>(label) ? 1.0 : 0.0)) * inv_batch;
      g[model.b2_offset() + c] += d_logits[c];
      double* gw = g.data() + model.w2_offset() + c * nh;
      for (std::size_t j = 0; j < nh; ++j) gw[j] += d_logits[c] * hidden[j];
    }
    for (std::size_t j = 0; j < nh; ++j) {
      double dh = 0.0;
      for (std::size_t c = 0; c < nc; ++c) dh += p[model.w2_offset() + c * nh + j] * d_logits[c];
      d_pre[j] = dh * (1.0 - hidden[j] * hidden[j]);
    }

    Image d_input(batch[b].height(), batch[b].width(), batch[b].channels());
    auto dx = d_input.values();
    for (std::size_t j = 0; j < nh; ++j) {
      const double dj = d_pre[j];
      g[model.b1_offset() + j] += dj;
      double* gw = g.data() + model.w1_offset() + j * in;
      const double* w = p.data() + model.w1_offset() + j * in;
      for (std::size_t i = 0; i < in; ++i) {
        gw[i] += dj * x[i];
        dx[i] += dj * w[i];
      }
    }
    result.input_grads.push_back(std::move(d_input));
  }
  return result;
}

namespace {

constexpr char kBlobMagic[8] = {'M', 'L', 'R', 'C', 'L', 'F', '0', '1'};

}  // namespace

// Layout: 8-byte magic, int32 input_dim, hidden, classes, reserved, then the
// parameter vector as little-endian float64.
void save_classifier(const ToyClassifier& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    fail(ErrorCode::Io, "cannot open '" + path + "' for writing");
  }
  const std::int32_t header[4] = {model.input_dim(), model.hidden(), model.classes(), 0};
  out.write(kBlobMagic, sizeof(kBlobMagic));
  out.write(reinterpret_cast<const char*>(header), sizeof(header));
  const auto p = model.parameters();
  out.write(reinterpret_cast<const char*>(p.data()),
            static_cast<std::streamsize>(p.size() * sizeof(double)));
  if (!out) {
    fail(ErrorCode::Io, "error while writing '" + path + "'");
  }
}

ToyClassifier load_classifier(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    fail(ErrorCode::Io, "cannot open '" + path + "' for reading");
  }
  char magic[8];
  std::int32_t header[4];
  in.read(magic, sizeof(magic));
  in.read(reinterpret_cast<char*>(header), sizeof(header));
  if (!in || std::memcmp(magic, kBlobMagic, sizeof(magic)) != 0) {
    fail(ErrorCode::Format, "'" + path + "' is not a classifier checkpoint");
  }
  ToyClassifier model(header[0], header[1], header[2]);
  auto p = model.parameters();
  in.read(reinterpret_cast<char*>(p.data()), static_cast<std::streamsize>(p.size() * sizeof(double)));
  if (!in) {
    fail(ErrorCode::Format, "truncated classifier checkpoint '" + path + "'");
  }
  return model;
}

void adam_step(AdamState& state, std::span<double> params, std::span<const double> grads,
               double lr, const AdamConfig& config) {
  if (params.size() != grads.size() || state.m.size() != params.size()) {
    fail(ErrorCode::Dimension, "optimizer state, parameters and gradients differ in size");
  }
  ++state.step;
  const double t = static_cast<double>(state.step);
  const double correction1 = 1.0 - std::pow(config.beta1, t);
  const double correction2 = 1.0 - std::pow(config.beta2, t);
  for (std::size_t i = 0; i < params.size(); ++i) {
    state.m[i] = config.beta1 * state.m[i] + (1.0 - config.beta1) * grads[i];
    state.v[i] = config.beta2 * state.v[i] + (1.0 - config.beta2) * grads[i] * grads[i];
    const double m_hat = state.m[i] / correction1;
    const double v_hat = state.v[i] / correction2;
    params[i] -= lr * m_hat / (std::sqrt(v_hat) + config.eps);
  }
}

}  // namespace muller
