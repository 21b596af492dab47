#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <map>
#include <random>

#include "muller/error.hpp"
#include "muller/training.hpp"
#include "support.hpp"

using namespace muller;
using testing_support::random_image;

namespace {

double cross_entropy(const ToyClassifier& model, const std::vector<Image>& batch,
                     const std::vector<int>& labels) {
  const auto logits = classifier_forward(model, batch);
  double total = 0.0;
  for (std::size_t b = 0; b < batch.size(); ++b) {
    double m = logits[b][0];
    for (double v : logits[b]) m = std::max(m, v);
    double z = 0.0;
    for (double v : logits[b]) z += std::exp(v - m);
    total += -(logits[b][static_cast<std::size_t>(labels[b])] - m - std::log(z));
  }
  return total / static_cast<double>(batch.size());
}

TrainConfig quick_config(ResizerMode mode) {
  TrainConfig cfg;
  cfg.epochs = 6;
  cfg.mode = mode;
  return cfg;
}

}  // namespace

TEST_CASE("zero classifier predicts uniformly") {
  const ToyClassifier model(4, 3, 5);
  std::mt19937_64 rng(61);
  const std::vector<Image> batch = {random_image(rng, 2, 2, 1), random_image(rng, 2, 2, 1)};
  const std::vector<int> labels = {0, 4};
  const ClassifierBackward out = classifier_backward(model, batch, labels);
  CHECK(out.loss == doctest::Approx(std::log(5.0)).epsilon(1e-15));
}

TEST_CASE("classifier gradients match central differences") {
  ToyClassifier model = ToyClassifier::initialized(4, 5, 3, 62);
  std::mt19937_64 rng(62);
  std::vector<Image> batch;
  for (int i = 0; i < 3; ++i) batch.push_back(random_image(rng, 2, 2, 1, -1.0, 1.0));
  // Non-zero biases so every parameter has a generic gradient.
  for (double& p : model.parameters()) p += std::uniform_real_distribution<double>(-0.2, 0.2)(rng);
  const std::vector<int> labels = {2, 0, 1};
  const ClassifierBackward back = classifier_backward(model, batch, labels);
  CHECK(back.loss == doctest::Approx(cross_entropy(model, batch, labels)).epsilon(1e-14));

  const double eps = 1e-5;
  for (std::size_t i = 0; i < model.parameters().size(); ++i) {
    ToyClassifier plus = model;
    ToyClassifier minus = model;
    plus.parameters()[i] += eps;
    minus.parameters()[i] -= eps;
    const double fd = (cross_entropy(plus, batch, labels) - cross_entropy(minus, batch, labels)) / (2 * eps);
    CHECK(std::fabs(back.param_grads[i] - fd) / std::max({std::fabs(fd), std::fabs(back.param_grads[i]), 1e-8}) < 1e-6);
  }
  for (std::size_t b = 0; b < batch.size(); ++b) {
    for (std::size_t i = 0; i < 4; ++i) {
      std::vector<Image> plus = batch;
      std::vector<Image> minus = batch;
      plus[b].values()[i] += eps;
      minus[b].values()[i] -= eps;
      const double fd = (cross_entropy(model, plus, labels) - cross_entropy(model, minus, labels)) / (2 * eps);
      const double g = back.input_grads[b].values()[i];
      CHECK(std::fabs(g - fd) / std::max({std::fabs(fd), std::fabs(g), 1e-8}) < 1e-6);
    }
  }
}

TEST_CASE("logits are linear in the output weights") {
  ToyClassifier model = ToyClassifier::initialized(9, 4, 3, 63);
  std::mt19937_64 rng(63);
  const std::vector<Image> batch = {random_image(rng, 3, 3, 1)};
  const auto l0 = classifier_forward(model, batch)[0];
  ToyClassifier doubled = model;
  for (std::size_t i = model.w2_offset(); i < model.b2_offset(); ++i) doubled.parameters()[i] *= 2.0;
  const auto l2 = classifier_forward(doubled, batch)[0];
  for (std::size_t c = 0; c < 3; ++c) CHECK(l2[c] == doctest::Approx(2.0 * l0[c]).epsilon(1e-14));
}

TEST_CASE("classifier checkpoint round trip") {
  const ToyClassifier model = ToyClassifier::initialized(16, 6, 4, 64);
  const auto path = std::filesystem::temp_directory_path() / "muller_test_classifier.bin";
  save_classifier(model, path.string());
  CHECK(load_classifier(path.string()) == model);
  CHECK_THROWS_AS(load_classifier((path.string() + ".missing")), Error);
}

TEST_CASE("adam step properties") {
  std::vector<double> params = {1.0, -2.0, 0.5};
  AdamState zero(3);
  adam_step(zero, params, std::vector<double>(3, 0.0), 0.1);
  CHECK(params == std::vector<double>{1.0, -2.0, 0.5});

  AdamState state(3);
  const std::vector<double> g = {3.0, -1e-3, 250.0};
  std::vector<double> p = {0.0, 0.0, 0.0};
  adam_step(state, p, g, 0.01);
  CHECK(p[0] == doctest::Approx(-0.01).epsilon(1e-6));
  CHECK(p[1] == doctest::Approx(0.01).epsilon(1e-4));
  CHECK(p[2] == doctest::Approx(-0.01).epsilon(1e-6));

  std::vector<double> a = {0.3, 0.1};
  std::vector<double> b = a;
  AdamState sa(2);
  AdamState sb(2);
  for (int i = 0; i < 5; ++i) {
    const std::vector<double> grad = {std::sin(i + a[0]), std::cos(i * a[1])};
    adam_step(sa, a, grad, 0.05);
    adam_step(sb, b, grad, 0.05);
  }
  CHECK(a == b);
  CHECK_THROWS_AS(adam_step(sa, a, std::vector<double>(3), 0.05), Error);
}

TEST_CASE("texture dataset construction") {
  const TextureDataset d1 = make_texture_dataset(5, 203, 4, 32, 32);
  const TextureDataset d2 = make_texture_dataset(5, 203, 4, 32, 32);
  CHECK(d1.images == d2.images);
  CHECK(d1.labels == d2.labels);
  CHECK(make_texture_dataset(6, 203, 4, 32, 32).images != d1.images);

  std::map<int, int> counts;
  for (int l : d1.labels) counts[l]++;
  REQUIRE(counts.size() == 4);
  for (auto [label, count] : counts) {
    CHECK(label >= 0);
    CHECK(label < 4);
    CHECK(std::abs(count - 203 / 4) <= 1);
  }
  for (const Image& img : d1.images) {
    CHECK(img.height() == 32);
    CHECK(img.channels() == 1);
  }
  CHECK_THROWS_AS(make_texture_dataset(0, 10, 1, 8, 8), Error);
}

TEST_CASE("pixel variance carries no label information") {
  const TextureDataset data = make_texture_dataset(7, 2000, 4, 64, 64);
  auto variance = [](const Image& img) {
    const double mean = image_stats(img).mean;
    double v = 0.0;
    for (double x : img.values()) v += (x - mean) * (x - mean);
    return v / static_cast<double>(img.size());
  };
  // Nearest class-mean on variance, fit on the first 1600, scored on the rest.
  std::vector<double> sum(4, 0.0);
  std::vector<int> count(4, 0);
  for (std::size_t i = 0; i < 1600; ++i) {
    sum[static_cast<std::size_t>(data.labels[i])] += variance(data.images[i]);
    count[static_cast<std::size_t>(data.labels[i])]++;
  }
  int correct = 0;
  for (std::size_t i = 1600; i < 2000; ++i) {
    const double v = variance(data.images[i]);
    int best = 0;
    for (int c = 1; c < 4; ++c) {
      if (std::fabs(v - sum[static_cast<std::size_t>(c)] / count[static_cast<std::size_t>(c)]) <
          std::fabs(v - sum[static_cast<std::size_t>(best)] / count[static_cast<std::size_t>(best)])) {
        best = c;
      }
    }
    correct += best == data.labels[i];
  }
  const double accuracy = correct / 400.0;
  MESSAGE("variance-only accuracy " << accuracy);
  CHECK(accuracy < 0.35);
}

TEST_CASE("training loop") {
  const TextureDataset data = make_texture_dataset(0, 600, 4, 64, 64);
  const MullerParams p0 = MullerParams::with_layers(2);
  const ToyClassifier m0 = ToyClassifier::initialized(256, 32, 4, 0);

  const TrainResult joint = train_joint(data, p0, m0, quick_config(ResizerMode::Joint));
  REQUIRE(joint.metrics.size() == 7);
  CHECK(joint.metrics.front().epoch == 0);
  CHECK(joint.metrics.front().alpha == std::vector<double>{0.0, 0.0});
  CHECK(joint.metrics.back().loss < joint.metrics.front().loss);
  CHECK(std::fabs(joint.params.layers[0].alpha) > 0.05);
  CHECK(joint.metrics.back().val_accuracy > 0.4);

  SUBCASE("deterministic") {
    const TrainResult again = train_joint(data, p0, m0, quick_config(ResizerMode::Joint));
    CHECK(again.metrics == joint.metrics);
    CHECK(again.params == joint.params);
    CHECK(again.model == joint.model);
  }
  SUBCASE("frozen zero resizer equals plain bilinear") {
    const TrainResult frozen = train_joint(data, p0, m0, quick_config(ResizerMode::Frozen));
    const TrainResult none = train_joint(data, p0, m0, quick_config(ResizerMode::None));
    CHECK(frozen.metrics == none.metrics);
    CHECK(frozen.model == none.model);
    CHECK(frozen.params == p0);
  }
  SUBCASE("ndjson has one record per epoch") {
    const std::string text = metrics_to_ndjson(joint.metrics);
    CHECK(std::count(text.begin(), text.end(), '\n') == 7);
    CHECK(text.rfind("{\"epoch\":0,", 0) == 0);
  }
}

TEST_CASE("training configuration is validated") {
  const TextureDataset data = make_texture_dataset(0, 20, 2, 16, 16);
  const MullerParams p0 = MullerParams::with_layers(2);
  TrainConfig cfg;
  CHECK_THROWS_AS(train_joint(data, p0, ToyClassifier(100, 4, 2), cfg), Error);
  cfg.batch_size = 0;
  CHECK_THROWS_AS(train_joint(data, p0, ToyClassifier(256, 4, 2), cfg), Error);
  cfg = TrainConfig{};
  cfg.out_h = cfg.out_w = 32;
  CHECK_THROWS_AS(train_joint(data, p0, ToyClassifier(1024, 4, 2), cfg), Error);
}
