#include "lacogsea/autoencoder.hpp"

#include <cmath>

#include "lacogsea/error.hpp"
#include "lacogsea/random.hpp"

namespace lacogsea {

const char* to_string(Activation a) noexcept { return a == Activation::Relu ? "relu" : "tanh"; }

Activation parse_activation(const std::string& name) {
  if (name == "relu") return Activation::Relu;
  if (name == "tanh") return Activation::Tanh;
  throw Error(ErrorKind::InvalidArgument, "unknown activation: " + name);
}

void AutoencoderConfig::validate(Eigen::Index genes) const {
  auto fail = [](const std::string& msg) { throw Error(ErrorKind::InvalidArgument, "autoencoder config: " + msg); };
  if (latent_dim < 1) fail("latent_dim must be >= 1");
  if (latent_dim >= genes) fail("latent_dim must be smaller than the gene count");
  for (int h : hidden_dims)
    if (h < 1) fail("hidden widths must be positive");
  if (!(std::isfinite(l1) && l1 >= 0.0)) fail("l1 must be finite and >= 0");
  if (!(std::isfinite(l2) && l2 >= 0.0)) fail("l2 must be finite and >= 0");
  if (!(std::isfinite(learning_rate) && learning_rate > 0.0)) fail("learning_rate must be > 0");
  if (batch_size < 0) fail("batch_size must be >= 1 (or 0 for automatic)");
  if (epochs < 1) fail("epochs must be >= 1");
  if (!(holdout_fraction >= 0.0 && holdout_fraction < 1.0)) fail("holdout_fraction must be in [0, 1)");
  if (!(beta1 >= 0.0 && beta1 < 1.0 && beta2 >= 0.0 && beta2 < 1.0 && epsilon > 0.0)) fail("invalid Adam constants");
}

int AutoencoderConfig::effective_batch_size(Eigen::Index samples) const {
  if (batch_size == 0) return static_cast<int>(std::min<Eigen::Index>(128, samples));
  return batch_size;
}

const DenseLayer& AutoencoderModel::layer(std::size_t i) const {
  return i < encoder.size() ? encoder[i] : decoder[i - encoder.size()];
}

DenseLayer& AutoencoderModel::layer(std::size_t i) {
  return i < encoder.size() ? encoder[i] : decoder[i - encoder.size()];
}

void AutoencoderModel::check_shapes() const {
  if (encoder.empty() || decoder.empty()) throw Error(ErrorKind::Shape, "autoencoder has no layers");
  const auto g = static_cast<Eigen::Index>(gene_ids.size());
  Eigen::Index width = g;
  for (std::size_t i = 0; i < layer_count(); ++i) {
    const auto& l = layer(i);
    if (l.weight.cols() != width || l.bias.size() != l.weight.rows())
      throw Error(ErrorKind::Shape, "autoencoder layer " + std::to_string(i) + " does not chain");
    if (!l.weight.allFinite() || !l.bias.allFinite())
      throw Error(ErrorKind::Numeric, "autoencoder layer " + std::to_string(i) + " has non-finite parameters");
    width = l.weight.rows();
  }
  if (width != g) throw Error(ErrorKind::Shape, "autoencoder output width differs from input width");
  if (encoder.size() != decoder.size()) throw Error(ErrorKind::Shape, "decoder does not mirror encoder");
  for (std::size_t i = 0; i < encoder.size(); ++i)
    if (encoder[i].weight.rows() != decoder[decoder.size() - 1 - i].weight.cols())
      throw Error(ErrorKind::Shape, "decoder does not mirror encoder");
}

AutoencoderModel initialize_autoencoder(const std::vector<std::string>& gene_ids, const AutoencoderConfig& cfg) {
  const auto g = static_cast<Eigen::Index>(gene_ids.size());
  cfg.validate(g);
  AutoencoderModel model;
  model.config = cfg;
  model.gene_ids = gene_ids;

  std::vector<Eigen::Index> widths{g};
  for (int h : cfg.hidden_dims) widths.push_back(h);
  widths.push_back(cfg.latent_dim);
  for (auto it = cfg.hidden_dims.rbegin(); it != cfg.hidden_dims.rend(); ++it) widths.push_back(*it);
  widths.push_back(g);

  Rng rng(derive_seed(cfg.seed, {0x1a7e}));
  const std::size_t n_layers = widths.size() - 1;
  const std::size_t n_encoder = cfg.hidden_dims.size() + 1;
  for (std::size_t i = 0; i < n_layers; ++i) {
    DenseLayer layer;
    const Eigen::Index in = widths[i];
    const Eigen::Index out = widths[i + 1];
    const double bound = 1.0 / std::sqrt(static_cast<double>(in));
    layer.weight.resize(out, in);
    // Row-major fill so the draw sequence does not depend on storage order.
    for (Eigen::Index r = 0; r < out; ++r)
      for (Eigen::Index c = 0; c < in; ++c) layer.weight(r, c) = rng.uniform(-bound, bound);
    layer.bias = Eigen::VectorXd::Zero(out);
    // Latent layer and output layer are linear.
    layer.activated = !(i == n_encoder - 1 || i == n_layers - 1);
    (i < n_encoder ? model.encoder : model.decoder).push_back(std::move(layer));
  }
  model.update_counts.assign(2 * n_layers, 0);
  model.check_shapes();
  return model;
}

namespace {

void apply_activation(Activation a, Eigen::MatrixXd& z) {
  if (a == Activation::Relu)
    z = z.cwiseMax(0.0);
  else
    z = z.array().tanh().matrix();
}

// Forward pass; keeps every layer output when `cache` is non-null.
Eigen::MatrixXd forward(const AutoencoderModel& model, const Eigen::MatrixXd& x, std::size_t first, std::size_t last,
                        std::vector<Eigen::MatrixXd>* cache) {
  Eigen::MatrixXd a = x;
  if (cache) cache->push_back(a);
  for (std::size_t i = first; i < last; ++i) {
    const auto& l = model.layer(i);
    Eigen::MatrixXd z = l.weight * a;
    z.colwise() += l.bias;
    if (l.activated) apply_activation(model.config.activation, z);
    a = std::move(z);
    if (cache) cache->push_back(a);
  }
  return a;
}

}  // namespace

double penalty_term(const AutoencoderModel& model) {
  const auto& cfg = model.config;
  if (cfg.l1 == 0.0 && cfg.l2 == 0.0) return 0.0;
  double abs_sum = 0.0;
  double sq_sum = 0.0;
  for (std::size_t i = 0; i < model.layer_count(); ++i) {
    const auto& l = model.layer(i);
    abs_sum += l.weight.cwiseAbs().sum();
    sq_sum += l.weight.squaredNorm();
    if (cfg.penalize_biases) {
      abs_sum += l.bias.cwiseAbs().sum();
      sq_sum += l.bias.squaredNorm();
    }
  }
  return cfg.l1 * abs_sum + cfg.l2 * sq_sum;
}

LossAndGradient evaluate_loss(const AutoencoderModel& model, const Eigen::MatrixXd& batch) {
  if (batch.rows() != model.input_dim())
    throw Error(ErrorKind::Shape, "batch has " + std::to_string(batch.rows()) + " rows, model expects " +
                                      std::to_string(model.input_dim()));
  if (batch.cols() < 1) throw Error(ErrorKind::Shape, "empty batch");
  LossAndGradient r;
  const Eigen::MatrixXd out = forward(model, batch, 0, model.layer_count(), nullptr);
  r.mse = (out - batch).squaredNorm() / static_cast<double>(batch.cols());
  r.penalty = penalty_term(model);
  r.loss = r.mse + r.penalty;
  return r;
}

LossAndGradient loss_and_gradient(const AutoencoderModel& model, const Eigen::MatrixXd& batch) {
  if (batch.rows() != model.input_dim())
    throw Error(ErrorKind::Shape, "batch has " + std::to_string(batch.rows()) + " rows, model expects " +
                                      std::to_string(model.input_dim()));
  if (batch.cols() < 1) throw Error(ErrorKind::Shape, "empty batch");
  const auto& cfg = model.config;
  const std::size_t n_layers = model.layer_count();
  const double inv_b = 1.0 / static_cast<double>(batch.cols());

  std::vector<Eigen::MatrixXd> acts;
  acts.reserve(n_layers + 1);
  forward(model, batch, 0, n_layers, &acts);

  LossAndGradient r;
  Eigen::MatrixXd delta = acts.back() - batch;
  r.mse = delta.squaredNorm() * inv_b;
  r.penalty = penalty_term(model);
  r.loss = r.mse + r.penalty;
  delta *= 2.0 * inv_b;

  r.gradients.resize(n_layers);
  for (std::size_t i = n_layers; i-- > 0;) {
    const auto& l = model.layer(i);
    if (l.activated) {
      const auto& a = acts[i + 1];
      if (cfg.activation == Activation::Relu)
        delta = delta.cwiseProduct((a.array() > 0.0).cast<double>().matrix());
      else
        delta = delta.cwiseProduct((1.0 - a.array().square()).matrix());
    }
    auto& g = r.gradients[i];
    g.weight.noalias() = delta * acts[i].transpose();
    g.bias = delta.rowwise().sum();
    if (i > 0) delta = l.weight.transpose() * delta;

    auto add_penalty = [&](auto& grad, const auto& param) {
      if (cfg.l1 != 0.0) grad.array() += cfg.l1 * param.array().sign();
      if (cfg.l2 != 0.0) grad.array() += 2.0 * cfg.l2 * param.array();
    };
    add_penalty(g.weight, l.weight);
    if (cfg.penalize_biases) add_penalty(g.bias, l.bias);

    if (!g.weight.allFinite() || !g.bias.allFinite())
      throw Error(ErrorKind::Numeric, "non-finite gradient in layer " + std::to_string(i));
  }
  return r;
}

namespace {

struct AdamState {
  std::vector<Eigen::MatrixXd> m_w, v_w;
  std::vector<Eigen::VectorXd> m_b, v_b;
  std::uint64_t step = 0;

  explicit AdamState(const AutoencoderModel& model) {
    for (std::size_t i = 0; i < model.layer_count(); ++i) {
      const auto& l = model.layer(i);
      m_w.push_back(Eigen::MatrixXd::Zero(l.weight.rows(), l.weight.cols()));
      v_w.push_back(Eigen::MatrixXd::Zero(l.weight.rows(), l.weight.cols()));
      m_b.push_back(Eigen::VectorXd::Zero(l.bias.size()));
      v_b.push_back(Eigen::VectorXd::Zero(l.bias.size()));
    }
  }
};

template <typename Param, typename Moment>
void adam_update(Param& param, const Param& grad, Moment& m, Moment& v, const AutoencoderConfig& cfg, double c1,
                 double c2) {
  m = cfg.beta1 * m + (1.0 - cfg.beta1) * grad;
  v = cfg.beta2 * v + (1.0 - cfg.beta2) * grad.cwiseProduct(grad);
  param.array() -= cfg.learning_rate * (m.array() / c1) / ((v.array() / c2).sqrt() + cfg.epsilon);
}

Eigen::MatrixXd gather_columns(const Eigen::MatrixXd& x, const std::vector<Eigen::Index>& cols, std::size_t begin,
                               std::size_t end) {
  Eigen::MatrixXd out(x.rows(), static_cast<Eigen::Index>(end - begin));
  for (std::size_t j = begin; j < end; ++j) out.col(static_cast<Eigen::Index>(j - begin)) = x.col(cols[j]);
  return out;
}

}  // namespace

AutoencoderModel train_autoencoder(const ExpressionMatrix& m, const AutoencoderConfig& cfg) {
  m.validate();
  cfg.validate(m.genes());
  const Eigen::Index n = m.samples();
  const auto n_holdout = static_cast<Eigen::Index>(std::floor(cfg.holdout_fraction * static_cast<double>(n)));
  const Eigen::Index n_train = n - n_holdout;
  const int batch_size = cfg.effective_batch_size(n_train);
  if (n_train < 1 || batch_size > n_train)
    throw Error(ErrorKind::InvalidArgument, "train_autoencoder: batch_size " + std::to_string(batch_size) +
                                                " exceeds the " + std::to_string(n_train) + " training samples");

  AutoencoderModel model = initialize_autoencoder(m.gene_ids, cfg);
  AdamState adam(model);
  Rng rng(derive_seed(cfg.seed, {0x5ffe}));

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
  rng.shuffle(std::span(order));
  std::vector<Eigen::Index> train_cols(order.begin(), order.begin() + n_train);
  std::vector<Eigen::Index> holdout_cols(order.begin() + n_train, order.end());
  std::sort(train_cols.begin(), train_cols.end());
  std::sort(holdout_cols.begin(), holdout_cols.end());
  const Eigen::MatrixXd train_data = gather_columns(m.values, train_cols, 0, train_cols.size());
  const Eigen::MatrixXd holdout_data = gather_columns(m.values, holdout_cols, 0, holdout_cols.size());

  std::vector<Eigen::Index> perm(static_cast<std::size_t>(n_train));
  for (Eigen::Index i = 0; i < n_train; ++i) perm[static_cast<std::size_t>(i)] = i;

  const std::size_t n_layers = model.layer_count();
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    rng.shuffle(std::span(perm));
    std::size_t batch_index = 0;
    for (std::size_t start = 0; start < perm.size(); start += static_cast<std::size_t>(batch_size), ++batch_index) {
      const std::size_t end = std::min(perm.size(), start + static_cast<std::size_t>(batch_size));
      const Eigen::MatrixXd batch = gather_columns(train_data, perm, start, end);
      LossAndGradient lg;
      try {
        lg = loss_and_gradient(model, batch);
      } catch (const Error& e) {
        throw Error(e.kind(), std::string(e.what()) + " at epoch " + std::to_string(epoch) + ", batch " +
                                  std::to_string(batch_index));
      }
      if (!std::isfinite(lg.loss))
        throw Error(ErrorKind::Numeric, "non-finite loss at epoch " + std::to_string(epoch) + ", batch " +
                                            std::to_string(batch_index));
      ++adam.step;
      const double c1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(adam.step));
      const double c2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(adam.step));
      for (std::size_t i = 0; i < n_layers; ++i) {
        auto& l = model.layer(i);
        adam_update(l.weight, lg.gradients[i].weight, adam.m_w[i], adam.v_w[i], cfg, c1, c2);
        ++model.update_counts[2 * i];
        adam_update(l.bias, lg.gradients[i].bias, adam.m_b[i], adam.v_b[i], cfg, c1, c2);
        ++model.update_counts[2 * i + 1];
      }
    }

    const LossAndGradient full = evaluate_loss(model, train_data);
    if (!std::isfinite(full.loss))
      throw Error(ErrorKind::Numeric, "non-finite full-data loss after epoch " + std::to_string(epoch));
    EpochLog log{epoch, full.mse, full.penalty, full.loss, 0.0};
    if (n_holdout > 0) log.holdout_mse = evaluate_loss(model, holdout_data).mse;
    model.training_log.push_back(log);
  }
  model.check_shapes();
  return model;
}

namespace {

void check_genes(const AutoencoderModel& model, const ExpressionMatrix& m) {
  if (m.gene_ids.size() != model.gene_ids.size())
    throw Error(ErrorKind::UniverseMismatch, "encode: matrix has " + std::to_string(m.gene_ids.size()) +
                                                 " genes, model was trained on " +
                                                 std::to_string(model.gene_ids.size()));
  for (std::size_t i = 0; i < m.gene_ids.size(); ++i)
    if (m.gene_ids[i] != model.gene_ids[i])
      throw Error(ErrorKind::UniverseMismatch, "encode: gene order differs from training at position " +
                                                   std::to_string(i) + ": '" + m.gene_ids[i] + "' vs '" +
                                                   model.gene_ids[i] + "'");
}

}  // namespace

LatentMatrix encode(const AutoencoderModel& model, const ExpressionMatrix& m) {
  check_genes(model, m);
  LatentMatrix z;
  z.sample_ids = m.sample_ids;
  z.values = forward(model, m.values, 0, model.encoder.size(), nullptr).transpose();
  return z;
}

ExpressionMatrix decode(const AutoencoderModel& model, const LatentMatrix& z) {
  if (z.values.cols() != model.latent_dim())
    throw Error(ErrorKind::Shape, "decode: latent width " + std::to_string(z.values.cols()) + " != model D " +
                                      std::to_string(model.latent_dim()));
  if (z.values.rows() != static_cast<Eigen::Index>(z.sample_ids.size()))
    throw Error(ErrorKind::Shape, "decode: latent rows do not match sample ids");
  ExpressionMatrix out;
  out.gene_ids = model.gene_ids;
  out.sample_ids = z.sample_ids;
  out.transformed = true;
  const Eigen::MatrixXd zt = z.values.transpose();
  out.values = forward(model, zt, model.encoder.size(), model.layer_count(), nullptr);
  return out;
}

}  // namespace lacogsea
