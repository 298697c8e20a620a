#include "pdw/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "pdw/json_util.hpp"

namespace pdw {

void TrainConfig::validate() const {
  if (!(learning_rate > 0.0)) throw std::invalid_argument("TrainConfig: learning_rate must be > 0");
  if (epochs < 1) throw std::invalid_argument("TrainConfig: epochs must be >= 1");
  if (batch_size < 1) throw std::invalid_argument("TrainConfig: batch_size must be >= 1");
  if (validation_fraction < 0.0 || validation_fraction >= 1.0)
    throw std::invalid_argument("TrainConfig: validation_fraction must be in [0, 1)");
  if (patience < 0) throw std::invalid_argument("TrainConfig: patience must be >= 0");
}

MlpModel init_model(int num_classes, Rng& rng) {
  return init_model({static_cast<int>(kNumFeatures), 325, 320, num_classes}, rng);
}

MlpModel init_model(const std::vector<int>& layer_sizes, Rng& rng) {
  if (layer_sizes.size() < 2)
    throw std::invalid_argument("init_model: need at least input and output layers");
  if (layer_sizes.front() != static_cast<int>(kNumFeatures))
    throw std::invalid_argument("init_model: input layer must have 17 neurons");
  if (layer_sizes.back() < 2)
    throw std::invalid_argument("init_model: need at least two classes");
  for (int s : layer_sizes)
    if (s < 1) throw std::invalid_argument("init_model: empty layer");

  MlpModel model;
  model.layer_sizes = layer_sizes;
  std::normal_distribution<double> unit(0.0, 1.0);
  for (std::size_t l = 0; l + 1 < layer_sizes.size(); ++l) {
    const int fan_in = layer_sizes[l];
    const int fan_out = layer_sizes[l + 1];
    const double scale = std::sqrt(2.0 / fan_in);
    Eigen::MatrixXd w(fan_in, fan_out);
    for (int i = 0; i < fan_in; ++i)
      for (int j = 0; j < fan_out; ++j) w(i, j) = scale * unit(rng);
    model.weights.push_back(std::move(w));
    model.biases.push_back(Eigen::VectorXd::Zero(fan_out));
  }
  model.feature_mean = Eigen::VectorXd::Zero(kNumFeatures);
  model.feature_std = Eigen::VectorXd::Ones(kNumFeatures);
  return model;
}

namespace {

Eigen::RowVectorXd normalize_input(const MlpModel& model, const FeatureVector& x) {
  Eigen::RowVectorXd row(kNumFeatures);
  for (std::size_t i = 0; i < kNumFeatures; ++i)
    row(i) = (x.values[i] - model.feature_mean(i)) / model.feature_std(i);
  return row;
}

// Hidden activations are rectifiers; the output layer is a row-wise
// normalized exponential computed against shifted logits.
Eigen::MatrixXd forward_batch(const MlpModel& model, const Eigen::MatrixXd& inputs) {
  Eigen::MatrixXd a = inputs;
  const std::size_t layers = model.weights.size();
  for (std::size_t l = 0; l + 1 < layers; ++l)
    a = ((a * model.weights[l]).rowwise() + model.biases[l].transpose()).cwiseMax(0.0);
  Eigen::MatrixXd z =
      (a * model.weights.back()).rowwise() + model.biases.back().transpose();
  const Eigen::VectorXd row_max = z.rowwise().maxCoeff();
  z.colwise() -= row_max;
  Eigen::MatrixXd p = z.array().exp();
  const Eigen::VectorXd row_sum = p.rowwise().sum();
  p.array().colwise() /= row_sum.array();
  return p;
}

void resize_like(MlpGradients& grads, const MlpModel& model) {
  grads.weights.resize(model.weights.size());
  grads.biases.resize(model.biases.size());
  for (std::size_t l = 0; l < model.weights.size(); ++l) {
    grads.weights[l].resize(model.weights[l].rows(), model.weights[l].cols());
    grads.biases[l].resize(model.biases[l].size());
  }
}

// Cross-entropy loss and back-propagated gradients on pre-normalized rows.
double backprop(const MlpModel& model, const Eigen::MatrixXd& inputs,
                std::span<const int> labels, MlpGradients& grads) {
  const Eigen::Index batch = inputs.rows();
  const std::size_t layers = model.weights.size();
  resize_like(grads, model);

  std::vector<Eigen::MatrixXd> activations(layers + 1);
  activations[0] = inputs;
  for (std::size_t l = 0; l + 1 < layers; ++l)
    activations[l + 1] =
        ((activations[l] * model.weights[l]).rowwise() + model.biases[l].transpose())
            .cwiseMax(0.0);
  Eigen::MatrixXd logits = (activations[layers - 1] * model.weights.back()).rowwise() +
                           model.biases.back().transpose();
  const Eigen::VectorXd row_max = logits.rowwise().maxCoeff();
  logits.colwise() -= row_max;

  const Eigen::VectorXd log_norm = logits.array().exp().rowwise().sum().log();
  double loss = 0.0;
  for (Eigen::Index i = 0; i < batch; ++i)
    loss += log_norm(i) - logits(i, labels[i]);
  loss /= static_cast<double>(batch);

  // Output delta: (softmax - onehot) / batch.
  Eigen::MatrixXd delta = logits.array().exp();
  delta.array().colwise() /= log_norm.array().exp();
  for (Eigen::Index i = 0; i < batch; ++i) delta(i, labels[i]) -= 1.0;
  delta /= static_cast<double>(batch);

  for (std::size_t l = layers; l-- > 0;) {
    grads.weights[l].noalias() = activations[l].transpose() * delta;
    grads.biases[l] = delta.colwise().sum();
    if (l == 0) break;
    const Eigen::MatrixXd upstream = delta * model.weights[l].transpose();
    delta = ((activations[l].array() > 0.0).cast<double>() * upstream.array()).matrix();
  }
  return loss;
}

}  // namespace

Eigen::VectorXd forward(const MlpModel& model, const FeatureVector& x) {
  return forward_batch(model, normalize_input(model, x)).row(0).transpose();
}

int predict(const MlpModel& model, const FeatureVector& x) {
  const Eigen::VectorXd p = forward(model, x);
  int best = 0;
  for (int k = 1; k < p.size(); ++k)
    if (p(k) > p(best)) best = k;  // ties keep the lowest index
  return best;
}

double loss_and_gradients(const MlpModel& model,
                          std::span<const LabeledSample> batch,
                          MlpGradients& grads) {
  if (batch.empty()) throw std::invalid_argument("loss_and_gradients: empty batch");
  Eigen::MatrixXd inputs(batch.size(), kNumFeatures);
  std::vector<int> labels(batch.size());
  for (std::size_t i = 0; i < batch.size(); ++i) {
    inputs.row(i) = normalize_input(model, batch[i].features);
    labels[i] = batch[i].label;
    if (labels[i] < 0 || labels[i] >= model.num_classes())
      throw std::invalid_argument("loss_and_gradients: label out of range");
  }
  return backprop(model, inputs, labels, grads);
}

TrainResult train_mlp(MlpModel model, const Dataset& train_set,
                      const TrainConfig& cfg) {
  cfg.validate();
  if (train_set.samples.empty())
    throw std::invalid_argument("train_mlp: empty training set");
  if (num_classes(train_set.scheme) != model.num_classes())
    throw std::invalid_argument("train_mlp: scheme does not match output layer");

  const std::size_t n = train_set.samples.size();

  // Per-feature standardization fitted on the training set.
  model.feature_mean = Eigen::VectorXd::Zero(kNumFeatures);
  for (const LabeledSample& s : train_set.samples)
    for (std::size_t i = 0; i < kNumFeatures; ++i) model.feature_mean(i) += s.features.values[i];
  model.feature_mean /= static_cast<double>(n);
  Eigen::VectorXd var = Eigen::VectorXd::Zero(kNumFeatures);
  for (const LabeledSample& s : train_set.samples)
    for (std::size_t i = 0; i < kNumFeatures; ++i) {
      const double d = s.features.values[i] - model.feature_mean(i);
      var(i) += d * d;
    }
  var /= static_cast<double>(n);
  for (std::size_t i = 0; i < kNumFeatures; ++i)
    model.feature_std(i) = var(i) > 1e-24 ? std::sqrt(var(i)) : 1.0;

  Eigen::MatrixXd all_inputs(n, kNumFeatures);
  std::vector<int> all_labels(n);
  for (std::size_t i = 0; i < n; ++i) {
    all_inputs.row(i) = normalize_input(model, train_set.samples[i].features);
    all_labels[i] = train_set.samples[i].label;
    if (all_labels[i] < 0 || all_labels[i] >= model.num_classes())
      throw std::invalid_argument("train_mlp: label out of range");
  }

  Rng rng(derive_seed(cfg.seed, 0));
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);

  const std::size_t n_val =
      static_cast<std::size_t>(std::llround(cfg.validation_fraction * static_cast<double>(n)));
  const std::size_t n_train = n - n_val;
  if (n_train == 0) throw std::invalid_argument("train_mlp: no training samples left");
  std::vector<std::size_t> train_idx(order.begin(), order.begin() + n_train);
  const std::vector<std::size_t> val_idx(order.begin() + n_train, order.end());

  Eigen::MatrixXd val_inputs(n_val, kNumFeatures);
  std::vector<int> val_labels(n_val);
  for (std::size_t i = 0; i < n_val; ++i) {
    val_inputs.row(i) = all_inputs.row(val_idx[i]);
    val_labels[i] = all_labels[val_idx[i]];
  }

  const auto val_accuracy = [&]() {
    if (n_val == 0) return 0.0;
    const Eigen::MatrixXd probs = forward_batch(model, val_inputs);
    std::size_t correct = 0;
    for (std::size_t i = 0; i < n_val; ++i) {
      int best = 0;
      for (int k = 1; k < probs.cols(); ++k)
        if (probs(i, k) > probs(i, best)) best = k;
      if (best == val_labels[i]) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(n_val);
  };

  TrainResult result;
  MlpGradients grads;
  MlpModel best_model = model;
  double best_val = -1.0;
  int epochs_since_best = 0;
  const std::size_t batch_size = static_cast<std::size_t>(cfg.batch_size);

  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    std::shuffle(train_idx.begin(), train_idx.end(), rng);
    double epoch_loss = 0.0;
    for (std::size_t begin = 0; begin < n_train; begin += batch_size) {
      const std::size_t size = std::min(batch_size, n_train - begin);
      Eigen::MatrixXd inputs(size, kNumFeatures);
      std::vector<int> labels(size);
      for (std::size_t i = 0; i < size; ++i) {
        inputs.row(i) = all_inputs.row(train_idx[begin + i]);
        labels[i] = all_labels[train_idx[begin + i]];
      }
      const double loss = backprop(model, inputs, labels, grads);
      if (!std::isfinite(loss))
        throw std::runtime_error("train_mlp: training diverged (non-finite loss at epoch " +
                                 std::to_string(epoch) + ")");
      epoch_loss += loss * static_cast<double>(size);
      for (std::size_t l = 0; l < model.weights.size(); ++l) {
        model.weights[l].noalias() -= cfg.learning_rate * grads.weights[l];
        model.biases[l].noalias() -= cfg.learning_rate * grads.biases[l];
      }
    }
    epoch_loss /= static_cast<double>(n_train);

    const double acc = val_accuracy();
    result.log.push_back({epoch, epoch_loss, acc});
    if (n_val > 0) {
      // Ties keep the later snapshot: equal validation accuracy at a lower
      // training loss.
      if (acc >= best_val) {
        best_model = model;
        result.best_epoch = epoch;
      }
      if (acc > best_val) {
        best_val = acc;
        epochs_since_best = 0;
      } else if (cfg.patience > 0 && ++epochs_since_best >= cfg.patience) {
        break;
      }
    } else {
      result.best_epoch = epoch;
    }
  }

  result.model = n_val > 0 ? std::move(best_model) : std::move(model);
  return result;
}

namespace {

nlohmann::json matrix_to_json(const Eigen::MatrixXd& m) {
  std::vector<double> flat(m.size());
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      flat[i * m.cols() + j] = m(i, j);  // row-major
  return flat;
}

Eigen::MatrixXd matrix_from_json(const nlohmann::json& j, Eigen::Index rows,
                                 Eigen::Index cols) {
  const auto flat = j.get<std::vector<double>>();
  if (static_cast<Eigen::Index>(flat.size()) != rows * cols)
    throw std::runtime_error("mlp model file: weight size mismatch");
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j2 = 0; j2 < cols; ++j2) m(i, j2) = flat[i * cols + j2];
  return m;
}

std::vector<double> vector_to_json(const Eigen::VectorXd& v) {
  return {v.data(), v.data() + v.size()};
}

Eigen::VectorXd vector_from_json(const nlohmann::json& j) {
  const auto values = j.get<std::vector<double>>();
  return Eigen::Map<const Eigen::VectorXd>(values.data(), values.size());
}

}  // namespace

void save_mlp(const MlpModel& model, LabelScheme scheme, const TrainConfig& cfg,
              const std::filesystem::path& path, const std::string& audit) {
  nlohmann::json weights = nlohmann::json::array();
  nlohmann::json biases = nlohmann::json::array();
  for (const Eigen::MatrixXd& w : model.weights) weights.push_back(matrix_to_json(w));
  for (const Eigen::VectorXd& b : model.biases) biases.push_back(vector_to_json(b));
  nlohmann::json j{
      {"model", "mlp"},
      {"scheme", scheme_name(scheme)},
      {"layer_sizes", model.layer_sizes},
      {"weights", weights},
      {"biases", biases},
      {"feature_mean", vector_to_json(model.feature_mean)},
      {"feature_std", vector_to_json(model.feature_std)},
      {"train_config",
       {{"learning_rate", cfg.learning_rate},
        {"epochs", cfg.epochs},
        {"batch_size", cfg.batch_size},
        {"seed", cfg.seed},
        {"validation_fraction", cfg.validation_fraction},
        {"patience", cfg.patience}}},
  };
  if (!audit.empty()) j["audit"] = audit;
  save_json_file(j, path);
}

LoadedMlp load_mlp(const std::filesystem::path& path) {
  const nlohmann::json j = load_json_file(path);
  if (j.value("model", "") != "mlp")
    throw std::runtime_error("load_mlp: not an mlp model file");
  LoadedMlp loaded;
  const auto scheme = scheme_from_name(j.at("scheme").get<std::string>());
  if (!scheme) throw std::runtime_error("load_mlp: unknown scheme");
  loaded.scheme = *scheme;
  loaded.model.layer_sizes = j.at("layer_sizes").get<std::vector<int>>();
  const auto& sizes = loaded.model.layer_sizes;
  if (sizes.size() < 2) throw std::runtime_error("load_mlp: bad layer_sizes");
  for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
    loaded.model.weights.push_back(
        matrix_from_json(j.at("weights").at(l), sizes[l], sizes[l + 1]));
    loaded.model.biases.push_back(vector_from_json(j.at("biases").at(l)));
    if (loaded.model.biases.back().size() != sizes[l + 1])
      throw std::runtime_error("load_mlp: bias size mismatch");
  }
  loaded.model.feature_mean = vector_from_json(j.at("feature_mean"));
  loaded.model.feature_std = vector_from_json(j.at("feature_std"));
  if (loaded.model.feature_mean.size() != static_cast<Eigen::Index>(kNumFeatures) ||
      loaded.model.feature_std.size() != static_cast<Eigen::Index>(kNumFeatures))
    throw std::runtime_error("load_mlp: normalization size mismatch");
  const nlohmann::json& tc = j.at("train_config");
  loaded.train_config.learning_rate = tc.at("learning_rate").get<double>();
  loaded.train_config.epochs = tc.at("epochs").get<int>();
  loaded.train_config.batch_size = tc.at("batch_size").get<int>();
  loaded.train_config.seed = tc.at("seed").get<std::uint64_t>();
  loaded.train_config.validation_fraction = tc.at("validation_fraction").get<double>();
  loaded.train_config.patience = tc.at("patience").get<int>();
  return loaded;
}

}  // namespace pdw
