#pragma once

#include <Eigen/Dense>
#include <filesystem>
#include <span>
#include <vector>

#include "pdw/dataset.hpp"

namespace pdw {

struct TrainConfig {
  double learning_rate = 0.01;
  int epochs = 200;  // upper bound; early stopping may end sooner
  int batch_size = 32;
  std::uint64_t seed = 1;
  double validation_fraction = 0.1;
  // Epochs without a validation-accuracy improvement before stopping;
  // 0 disables early stopping.
  int patience = 50;

  void validate() const;
};

// Feedforward network 17-325-320-K: rectifier hidden layers, normalized
// exponential output. Inputs are standardized per feature with statistics
// fitted on the training set (identity until trained).
struct MlpModel {
  std::vector<int> layer_sizes;
  std::vector<Eigen::MatrixXd> weights;  // weights[l]: sizes[l] x sizes[l+1]
  std::vector<Eigen::VectorXd> biases;
  Eigen::VectorXd feature_mean;
  Eigen::VectorXd feature_std;

  int num_classes() const { return layer_sizes.back(); }
};

// Fan-in-scaled zero-mean Gaussian weights, zero biases.
MlpModel init_model(int num_classes, Rng& rng);
MlpModel init_model(const std::vector<int>& layer_sizes, Rng& rng);

// Class probabilities for one input; non-negative, summing to 1.
Eigen::VectorXd forward(const MlpModel& model, const FeatureVector& x);

// Argmax of forward probabilities, ties toward the lowest class index.
int predict(const MlpModel& model, const FeatureVector& x);

struct MlpGradients {
  std::vector<Eigen::MatrixXd> weights;
  std::vector<Eigen::VectorXd> biases;
};

// Mean cross-entropy over the batch and its gradients for every parameter,
// by back-propagation.
double loss_and_gradients(const MlpModel& model,
                          std::span<const LabeledSample> batch,
                          MlpGradients& grads);

struct EpochStats {
  int epoch = 0;
  double train_loss = 0.0;
  double val_accuracy = 0.0;
};

struct TrainResult {
  MlpModel model;
  std::vector<EpochStats> log;
  int best_epoch = 0;
};

// Mini-batch gradient descent; returns the parameter snapshot with the best
// held-out validation accuracy. Throws std::runtime_error on a non-finite
// loss (divergence).
TrainResult train_mlp(MlpModel model, const Dataset& train_set,
                      const TrainConfig& cfg);

struct LoadedMlp {
  MlpModel model;
  LabelScheme scheme = LabelScheme::Binary;
  TrainConfig train_config;
};

// audit describes the data the model was fitted on (scenario, seeds, size).
void save_mlp(const MlpModel& model, LabelScheme scheme, const TrainConfig& cfg,
              const std::filesystem::path& path, const std::string& audit = "");
LoadedMlp load_mlp(const std::filesystem::path& path);

}  // namespace pdw
