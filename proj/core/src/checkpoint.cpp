#include "lacogsea/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "lacogsea/error.hpp"
#include "lacogsea/tsv.hpp"

namespace lacogsea {

namespace {

using nlohmann::ordered_json;

constexpr char kAlphabet[] = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";

std::string base64_encode(const std::vector<unsigned char>& bytes) {
  std::string out;
  out.reserve((bytes.size() + 2) / 3 * 4);
  std::size_t i = 0;
  for (; i + 2 < bytes.size(); i += 3) {
    const unsigned v = (bytes[i] << 16) | (bytes[i + 1] << 8) | bytes[i + 2];
    out += kAlphabet[(v >> 18) & 63];
    out += kAlphabet[(v >> 12) & 63];
    out += kAlphabet[(v >> 6) & 63];
    out += kAlphabet[v & 63];
  }
  if (i < bytes.size()) {
    unsigned v = bytes[i] << 16;
    if (i + 1 < bytes.size()) v |= bytes[i + 1] << 8;
    out += kAlphabet[(v >> 18) & 63];
    out += kAlphabet[(v >> 12) & 63];
    out += i + 1 < bytes.size() ? kAlphabet[(v >> 6) & 63] : '=';
    out += '=';
  }
  return out;
}

std::vector<unsigned char> base64_decode(const std::string& text) {
  int lookup[256];
  std::fill(std::begin(lookup), std::end(lookup), -1);
  for (int i = 0; i < 64; ++i) lookup[static_cast<unsigned char>(kAlphabet[i])] = i;
  std::vector<unsigned char> out;
  unsigned buffer = 0;
  int bits = 0;
  for (char ch : text) {
    if (ch == '=') break;
    const int v = lookup[static_cast<unsigned char>(ch)];
    if (v < 0) throw Error(ErrorKind::Format, "checkpoint: invalid base64 payload");
    buffer = (buffer << 6) | static_cast<unsigned>(v);
    bits += 6;
    if (bits >= 8) {
      bits -= 8;
      out.push_back(static_cast<unsigned char>((buffer >> bits) & 0xff));
    }
  }
  return out;
}

std::string encode_doubles(const std::vector<double>& values) {
  std::vector<unsigned char> bytes(values.size() * 8);
  for (std::size_t i = 0; i < values.size(); ++i) {
    std::uint64_t bitsv = std::bit_cast<std::uint64_t>(values[i]);
    for (int b = 0; b < 8; ++b) bytes[i * 8 + static_cast<std::size_t>(b)] = static_cast<unsigned char>(bitsv >> (8 * b));
  }
  return base64_encode(bytes);
}

std::vector<double> decode_doubles(const std::string& text, std::size_t expected) {
  const auto bytes = base64_decode(text);
  if (bytes.size() != expected * 8) throw Error(ErrorKind::Format, "checkpoint: tensor payload has wrong length");
  std::vector<double> out(expected);
  for (std::size_t i = 0; i < expected; ++i) {
    std::uint64_t v = 0;
    for (int b = 0; b < 8; ++b) v |= static_cast<std::uint64_t>(bytes[i * 8 + static_cast<std::size_t>(b)]) << (8 * b);
    out[i] = std::bit_cast<double>(v);
  }
  return out;
}

ordered_json config_json(const AutoencoderConfig& c) {
  ordered_json j;
  j["latent_dim"] = c.latent_dim;
  j["hidden_dims"] = c.hidden_dims;
  j["activation"] = to_string(c.activation);
  j["l1"] = c.l1;
  j["l2"] = c.l2;
  j["learning_rate"] = c.learning_rate;
  j["batch_size"] = c.batch_size;
  j["epochs"] = c.epochs;
  j["seed"] = c.seed;
  j["penalize_biases"] = c.penalize_biases;
  j["holdout_fraction"] = c.holdout_fraction;
  j["optimizer"] = {{"name", "adam"}, {"beta1", c.beta1}, {"beta2", c.beta2}, {"epsilon", c.epsilon}};
  return j;
}

AutoencoderConfig config_from_json(const ordered_json& j) {
  AutoencoderConfig c;
  c.latent_dim = j.at("latent_dim").get<int>();
  c.hidden_dims = j.at("hidden_dims").get<std::vector<int>>();
  c.activation = parse_activation(j.at("activation").get<std::string>());
  c.l1 = j.at("l1").get<double>();
  c.l2 = j.at("l2").get<double>();
  c.learning_rate = j.at("learning_rate").get<double>();
  c.batch_size = j.at("batch_size").get<int>();
  c.epochs = j.at("epochs").get<int>();
  c.seed = j.at("seed").get<std::uint64_t>();
  c.penalize_biases = j.at("penalize_biases").get<bool>();
  c.holdout_fraction = j.at("holdout_fraction").get<double>();
  const auto& opt = j.at("optimizer");
  c.beta1 = opt.at("beta1").get<double>();
  c.beta2 = opt.at("beta2").get<double>();
  c.epsilon = opt.at("epsilon").get<double>();
  return c;
}

ordered_json layer_json(const DenseLayer& l) {
  std::vector<double> w(static_cast<std::size_t>(l.weight.size()));
  std::size_t k = 0;
  for (Eigen::Index r = 0; r < l.weight.rows(); ++r)
    for (Eigen::Index c = 0; c < l.weight.cols(); ++c) w[k++] = l.weight(r, c);
  std::vector<double> b(l.bias.data(), l.bias.data() + l.bias.size());
  ordered_json j;
  j["weight_shape"] = {l.weight.rows(), l.weight.cols()};
  j["weight"] = encode_doubles(w);
  j["bias_shape"] = {l.bias.size()};
  j["bias"] = encode_doubles(b);
  j["activated"] = l.activated;
  return j;
}

DenseLayer layer_from_json(const ordered_json& j) {
  DenseLayer l;
  const auto shape = j.at("weight_shape").get<std::vector<Eigen::Index>>();
  const auto bshape = j.at("bias_shape").get<std::vector<Eigen::Index>>();
  if (shape.size() != 2 || bshape.size() != 1) throw Error(ErrorKind::Format, "checkpoint: bad tensor shape");
  const auto w = decode_doubles(j.at("weight").get<std::string>(), static_cast<std::size_t>(shape[0] * shape[1]));
  const auto b = decode_doubles(j.at("bias").get<std::string>(), static_cast<std::size_t>(bshape[0]));
  l.weight.resize(shape[0], shape[1]);
  std::size_t k = 0;
  for (Eigen::Index r = 0; r < shape[0]; ++r)
    for (Eigen::Index c = 0; c < shape[1]; ++c) l.weight(r, c) = w[k++];
  l.bias = Eigen::Map<const Eigen::VectorXd>(b.data(), bshape[0]);
  l.activated = j.at("activated").get<bool>();
  return l;
}

ordered_json log_json(const EpochLog& e) {
  return {{"epoch", e.epoch}, {"mse", e.mse}, {"penalty", e.penalty}, {"total", e.total}, {"holdout_mse", e.holdout_mse}};
}

}  // namespace

std::string serialize_model(const AutoencoderModel& model) {
  ordered_json j;
  j["format"] = kCheckpointFormat;
  j["version"] = kCheckpointVersion;
  j["config"] = config_json(model.config);
  j["gene_ids"] = model.gene_ids;
  j["tensor_encoding"] = "base64-float64-le-row-major";
  j["encoder"] = ordered_json::array();
  for (const auto& l : model.encoder) j["encoder"].push_back(layer_json(l));
  j["decoder"] = ordered_json::array();
  for (const auto& l : model.decoder) j["decoder"].push_back(layer_json(l));
  j["update_counts"] = model.update_counts;
  j["training_log"] = ordered_json::array();
  for (const auto& e : model.training_log) j["training_log"].push_back(log_json(e));
  return j.dump(1) + "\n";
}

AutoencoderModel deserialize_model(const std::string& text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const std::exception& e) {
    throw Error(ErrorKind::Format, std::string("checkpoint: invalid JSON: ") + e.what());
  }
  try {
    if (j.at("format").get<std::string>() != kCheckpointFormat)
      throw Error(ErrorKind::Format, "checkpoint: unexpected format tag");
    if (j.at("version").get<int>() != kCheckpointVersion)
      throw Error(ErrorKind::Format, "checkpoint: unsupported version");
    AutoencoderModel m;
    m.config = config_from_json(j.at("config"));
    m.gene_ids = j.at("gene_ids").get<std::vector<std::string>>();
    for (const auto& l : j.at("encoder")) m.encoder.push_back(layer_from_json(l));
    for (const auto& l : j.at("decoder")) m.decoder.push_back(layer_from_json(l));
    m.update_counts = j.at("update_counts").get<std::vector<std::uint64_t>>();
    for (const auto& e : j.at("training_log"))
      m.training_log.push_back({e.at("epoch").get<int>(), e.at("mse").get<double>(), e.at("penalty").get<double>(),
                                e.at("total").get<double>(), e.at("holdout_mse").get<double>()});
    m.check_shapes();
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Format, std::string("checkpoint: ") + e.what());
  }
}

void save_model(const AutoencoderModel& model, const std::filesystem::path& path) {
  tsv::write_file(path, serialize_model(model));
}

AutoencoderModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::NotFound, "cannot open model checkpoint: " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return deserialize_model(ss.str());
}

std::string training_manifest(const AutoencoderModel& model, Eigen::Index samples, unsigned threads) {
  ordered_json j;
  j["format"] = "lacogsea-training-manifest";
  j["version"] = kCheckpointVersion;
  auto cfg = config_json(model.config);
  cfg["effective_batch_size"] = model.config.effective_batch_size(
      samples - static_cast<Eigen::Index>(std::floor(model.config.holdout_fraction * static_cast<double>(samples))));
  cfg["latent_activation"] = "linear";
  cfg["output_activation"] = "linear";
  cfg["weight_init"] = "uniform(+-1/sqrt(fan_in)), zero bias";
  cfg["penalty_scope"] = model.config.penalize_biases ? "weights+biases" : "weights";
  j["hyperparameters"] = cfg;
  j["seed"] = model.config.seed;
  j["threads"] = threads;
  j["genes"] = model.gene_ids.size();
  j["samples"] = samples;
  if (!model.training_log.empty()) j["final"] = log_json(model.training_log.back());
  return j.dump(2) + "\n";
}

std::string format_latent_matrix(const LatentMatrix& z) {
  std::string out = "sample_id";
  for (Eigen::Index k = 0; k < z.values.cols(); ++k) out += "\tdim_" + std::to_string(k);
  out += '\n';
  for (Eigen::Index i = 0; i < z.values.rows(); ++i) {
    out += z.sample_ids[static_cast<std::size_t>(i)];
    for (Eigen::Index k = 0; k < z.values.cols(); ++k) out += '\t' + tsv::format_double(z.values(i, k));
    out += '\n';
  }
  return out;
}

LatentMatrix load_latent_matrix(const std::filesystem::path& path) {
  // Same layout as an expression matrix with samples in rows.
  const ExpressionMatrix m = load_expression_matrix(path, Orientation::SamplesInRows);
  LatentMatrix z;
  z.sample_ids = m.sample_ids;
  z.values = m.values.transpose();
  return z;
}

}  // namespace lacogsea
