#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "lacogsea/expression.hpp"

namespace lacogsea {

enum class Activation { Relu, Tanh };

const char* to_string(Activation a) noexcept;
Activation parse_activation(const std::string& name);

struct AutoencoderConfig {
  int latent_dim = 8;
  std::vector<int> hidden_dims{512, 128};  // encoder widths; decoder mirrors them
  Activation activation = Activation::Relu;
  double l1 = 0.0;
  double l2 = 0.0;
  double learning_rate = 1e-3;
  int batch_size = 0;  // 0 = min(128, N)
  int epochs = 100;
  std::uint64_t seed = 0;
  bool penalize_biases = false;
  double holdout_fraction = 0.0;

  // Adam
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;

  /// Throws on out-of-range values. `genes` is the input width G.
  void validate(Eigen::Index genes) const;
  int effective_batch_size(Eigen::Index samples) const;
};

/// One affine map `activation(weight * x + bias)`; weight is (out x in).
struct DenseLayer {
  Eigen::MatrixXd weight;
  Eigen::VectorXd bias;
  bool activated = true;
};

struct EpochLog {
  int epoch = 0;
  double mse = 0.0;
  double penalty = 0.0;
  double total = 0.0;
  double holdout_mse = 0.0;  // 0 when no hold-out split
};

struct AutoencoderModel {
  AutoencoderConfig config;
  std::vector<std::string> gene_ids;
  std::vector<DenseLayer> encoder;  // G -> hidden... -> D (last layer linear)
  std::vector<DenseLayer> decoder;  // D -> mirrored hidden... -> G (last layer linear)
  std::vector<EpochLog> training_log;
  std::vector<std::uint64_t> update_counts;  // per tensor: weight, bias for each layer

  Eigen::Index input_dim() const { return encoder.front().weight.cols(); }
  Eigen::Index latent_dim() const { return encoder.back().weight.rows(); }
  std::size_t layer_count() const { return encoder.size() + decoder.size(); }
  const DenseLayer& layer(std::size_t i) const;
  DenseLayer& layer(std::size_t i);

  /// Checks G -> hidden -> D -> mirrored -> G chaining and finiteness.
  void check_shapes() const;
};

/// Layers sized from the config, weights uniform in +-1/sqrt(fan_in), zero biases.
AutoencoderModel initialize_autoencoder(const std::vector<std::string>& gene_ids, const AutoencoderConfig& cfg);

struct LatentMatrix {
  std::vector<std::string> sample_ids;
  Eigen::MatrixXd values;  // N x D
};

struct LayerGradient {
  Eigen::MatrixXd weight;
  Eigen::VectorXd bias;
};

struct LossAndGradient {
  double loss = 0.0;  // mse + penalty
  double mse = 0.0;
  double penalty = 0.0;
  std::vector<LayerGradient> gradients;  // same order as AutoencoderModel::layer()
};

/// Elastic-net objective on a (G x B) batch whose columns are samples:
/// mean over columns of the squared reconstruction error, plus
/// l1 * |theta|_1 + l2 * |theta|_2^2 over weights (and biases if configured).
/// The L1 subgradient at exactly zero is zero.
LossAndGradient loss_and_gradient(const AutoencoderModel& model, const Eigen::MatrixXd& batch);

/// Loss only (no backward pass).
LossAndGradient evaluate_loss(const AutoencoderModel& model, const Eigen::MatrixXd& batch);

double penalty_term(const AutoencoderModel& model);

AutoencoderModel train_autoencoder(const ExpressionMatrix& m, const AutoencoderConfig& cfg);

LatentMatrix encode(const AutoencoderModel& model, const ExpressionMatrix& m);

/// Reconstruction in genes x samples orientation.
ExpressionMatrix decode(const AutoencoderModel& model, const LatentMatrix& z);

}  // namespace lacogsea
