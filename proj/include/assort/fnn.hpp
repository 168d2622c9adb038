#pragma once

#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace assort {

// One-hidden-layer network: lambda = sigmoid(w2 . relu(W1 x + b1) + b2).
struct FnnModel {
  Eigen::MatrixXd w1;  // hidden x input
  Eigen::VectorXd b1;  // hidden
  Eigen::VectorXd w2;  // hidden
  double b2 = 0.0;

  std::size_t input_dim() const { return static_cast<std::size_t>(w1.cols()); }
  std::size_t hidden() const { return static_cast<std::size_t>(w1.rows()); }
  std::size_t parameter_count() const { return w1.size() + b1.size() + w2.size() + 1; }

  bool operator==(const FnnModel& other) const;

  // `embedding_dim` is recorded so loaders can refuse a model trained
  // against a different embedding provider.
  void write(std::ostream& out, std::size_t embedding_dim) const;
  static FnnModel read(std::istream& in, std::optional<std::size_t> expected_embedding_dim = std::nullopt);
};

// Rows are examples.
struct Dataset {
  Eigen::MatrixXd features;
  Eigen::VectorXd labels;  // 0 or 1

  std::size_t size() const { return static_cast<std::size_t>(labels.size()); }
};

struct TrainConfig {
  double learning_rate = 1e-5;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::size_t batch_size = 512;
  std::size_t epochs = 150;
  std::uint64_t seed = 0;
  std::size_t hidden = 256;
  // Multiplier on the positive-class loss term; 1 disables weighting.
  double positive_weight = 1.0;
};

inline constexpr double kProbabilityClamp = 1e-12;

// Glorot-uniform weights from a seeded generator, zero biases.
FnnModel init_fnn(std::uint64_t seed, std::size_t input_dim, std::size_t hidden);

// Throws UsageError when the encoding length differs from input_dim().
double forward(const FnnModel& model, std::span<const double> encoding);
Eigen::VectorXd forward(const FnnModel& model, const Eigen::MatrixXd& batch);

// Mean binary cross-entropy with predictions clamped to
// [1e-12, 1 - 1e-12]. Throws on an empty batch.
double loss(const FnnModel& model, const Dataset& batch, double positive_weight = 1.0);

// Analytic gradient of loss() in FnnModel layout.
FnnModel gradient(const FnnModel& model, const Dataset& batch, double positive_weight = 1.0);

struct FnnTrainResult {
  FnnModel model;
  // Full-dataset loss after each epoch.
  std::vector<double> epoch_loss;
};

// Adam over shuffled minibatches. The input model is not modified.
// Throws DataError unless both labels occur.
FnnTrainResult train_with_history(const FnnModel& model, const Dataset& data, const TrainConfig& config);
FnnModel train(const FnnModel& model, const Dataset& data, const TrainConfig& config);

// Largest |analytic - numeric| / max(|analytic| + |numeric|, 1e-8) over all
// parameters, where numeric is the central difference with step epsilon.
double grad_check(const FnnModel& model, const Dataset& batch, double epsilon, double positive_weight = 1.0);

}  // namespace assort
