#include "detect/model/transformer.hpp"

#include <cmath>

#include "detect/core/errors.hpp"
#include "detect/core/ops.hpp"

namespace detect::model {

using core::Tensor;

namespace {

Tensor xavier(std::size_t fan_in, std::size_t fan_out, std::mt19937_64& rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  std::uniform_real_distribution<double> dist(-limit, limit);
  std::vector<double> v(fan_in * fan_out);
  for (double& x : v) x = dist(rng);
  return Tensor::from_values({fan_in, fan_out}, std::move(v), true);
}

Tensor normal(std::size_t rows, std::size_t cols, double stddev, std::mt19937_64& rng) {
  std::normal_distribution<double> dist(0.0, stddev);
  std::vector<double> v(rows * cols);
  for (double& x : v) x = dist(rng);
  return Tensor::from_values({rows, cols}, std::move(v), true);
}

Tensor filled(std::size_t n, double value) { return Tensor::full({n}, value, true); }

Tensor maybe_dropout(const Tensor& x, double p, bool train_mode, std::mt19937_64* rng) {
  if (!train_mode || p == 0.0) return x;
  if (rng == nullptr) throw ContractError("train-mode forward needs a dropout rng");
  return core::dropout(x, p, *rng);
}

Tensor self_attention(const EncoderLayerParams& layer, const Tensor& x,
                      const ModelConfig& cfg) {
  const std::size_t m = cfg.latent_dim;
  const std::size_t heads = cfg.num_heads;
  const std::size_t head_dim = m / heads;

  const Tensor qkv = core::linear(x, layer.w_qkv, layer.b_qkv);  // [B, n, 3m]
  const Tensor q = core::split_heads(qkv, 0, heads, head_dim);  // [B*h, n, hd]
  const Tensor k = core::split_heads(qkv, m, heads, head_dim);
  const Tensor v = core::split_heads(qkv, 2 * m, heads, head_dim);

  const Tensor scores = core::batched_matmul(
      q, k, /*transpose_b=*/true, 1.0 / std::sqrt(static_cast<double>(head_dim)));
  const Tensor attn = core::softmax(scores);
  const Tensor context = core::merge_heads(core::batched_matmul(attn, v), heads);
  return core::linear(context, layer.w_out, layer.b_out);
}

}  // namespace

core::ParameterSet ClassifierBundle::parameters() const {
  core::ParameterSet set;
  set.push_back({"input.weight", params.w_in});
  set.push_back({"input.bias", params.b_in});
  for (std::size_t i = 0; i < params.layers.size(); ++i) {
    const auto& l = params.layers[i];
    const std::string p = "layer" + std::to_string(i) + ".";
    set.push_back({p + "qkv.weight", l.w_qkv});
    set.push_back({p + "qkv.bias", l.b_qkv});
    set.push_back({p + "attn_out.weight", l.w_out});
    set.push_back({p + "attn_out.bias", l.b_out});
    set.push_back({p + "norm1.gamma", l.ln1_gamma});
    set.push_back({p + "norm1.beta", l.ln1_beta});
    set.push_back({p + "ffn1.weight", l.w_ff1});
    set.push_back({p + "ffn1.bias", l.b_ff1});
    set.push_back({p + "ffn2.weight", l.w_ff2});
    set.push_back({p + "ffn2.bias", l.b_ff2});
    set.push_back({p + "norm2.gamma", l.ln2_gamma});
    set.push_back({p + "norm2.beta", l.ln2_beta});
  }
  set.push_back({"head.weight", params.w_head});
  set.push_back({"head.bias", params.b_head});
  return set;
}

ClassifierBundle ClassifierBundle::clone() const {
  ClassifierBundle out = *this;
  auto& p = out.params;
  p.w_in = p.w_in.clone();
  p.b_in = p.b_in.clone();
  for (auto& l : p.layers) {
    for (Tensor* t : {&l.w_qkv, &l.b_qkv, &l.w_out, &l.b_out, &l.ln1_gamma, &l.ln1_beta,
                      &l.w_ff1, &l.b_ff1, &l.w_ff2, &l.b_ff2, &l.ln2_gamma, &l.ln2_beta}) {
      *t = t->clone();
    }
  }
  p.w_head = p.w_head.clone();
  p.b_head = p.b_head.clone();
  return out;
}

ClassifierBundle init_params(const ModelConfig& config) {
  config.validate();
  std::mt19937_64 rng(config.seed);
  const std::size_t m = config.latent_dim;
  ClassifierBundle bundle;
  bundle.config = config;
  bundle.class_names = data::default_class_names();
  if (bundle.class_names.size() != config.num_classes) {
    bundle.class_names.clear();
    for (std::size_t k = 0; k < config.num_classes; ++k) {
      bundle.class_names.push_back("class" + std::to_string(k));
    }
  }
  auto& p = bundle.params;
  p.w_in = xavier(config.input_dim, m, rng);
  p.b_in = filled(m, 0.0);
  for (std::size_t i = 0; i < config.num_layers; ++i) {
    EncoderLayerParams l;
    l.w_qkv = xavier(m, 3 * m, rng);
    l.b_qkv = filled(3 * m, 0.0);
    l.w_out = xavier(m, m, rng);
    l.b_out = filled(m, 0.0);
    l.ln1_gamma = filled(m, 1.0);
    l.ln1_beta = filled(m, 0.0);
    l.w_ff1 = xavier(m, config.ffn_dim, rng);
    l.b_ff1 = filled(config.ffn_dim, 0.0);
    l.w_ff2 = xavier(config.ffn_dim, m, rng);
    l.b_ff2 = filled(m, 0.0);
    l.ln2_gamma = filled(m, 1.0);
    l.ln2_beta = filled(m, 0.0);
    p.layers.push_back(std::move(l));
  }
  p.w_head = normal(m, config.num_classes, 0.02, rng);
  p.b_head = filled(config.num_classes, 0.0);
  return bundle;
}

Tensor positional_encoding(std::size_t length, std::size_t dim) {
  if (dim % 2 != 0) {
    throw ConfigError("positional encoding needs an even dimension, got " +
                      std::to_string(dim));
  }
  std::vector<double> table(length * dim);
  for (std::size_t pos = 0; pos < length; ++pos) {
    for (std::size_t i = 0; i < dim / 2; ++i) {
      const double freq = std::pow(10000.0, static_cast<double>(2 * i) / static_cast<double>(dim));
      const double angle = static_cast<double>(pos) / freq;
      table[pos * dim + 2 * i] = std::sin(angle);
      table[pos * dim + 2 * i + 1] = std::cos(angle);
    }
  }
  return Tensor::from_values({length, dim}, std::move(table));
}

Tensor forward(const ClassifierBundle& bundle, const Tensor& batch, bool train_mode,
               std::mt19937_64* rng) {
  const auto& cfg = bundle.config;
  if (batch.rank() != 3 || batch.dim(1) != cfg.seq_len || batch.dim(2) != cfg.input_dim) {
    throw DimensionError("forward expects [B x " + std::to_string(cfg.seq_len) + " x " +
                         std::to_string(cfg.input_dim) + "], got " +
                         core::shape_to_string(batch.shape()));
  }
  const auto& p = bundle.params;
  Tensor x = core::linear(batch, p.w_in, p.b_in);
  if (cfg.positional_encoding) {
    x = core::add(x, positional_encoding(cfg.seq_len, cfg.latent_dim));
  }
  for (const auto& layer : p.layers) {
    Tensor attn = maybe_dropout(self_attention(layer, x, cfg), cfg.dropout, train_mode, rng);
    x = core::layer_norm(core::add(x, attn), layer.ln1_gamma, layer.ln1_beta,
                         cfg.layer_norm_eps);
    Tensor hidden = core::linear(x, layer.w_ff1, layer.b_ff1);
    hidden = cfg.activation == Activation::gelu ? core::gelu(hidden) : core::relu(hidden);
    Tensor ffn = maybe_dropout(core::linear(hidden, layer.w_ff2, layer.b_ff2), cfg.dropout,
                               train_mode, rng);
    x = core::layer_norm(core::add(x, ffn), layer.ln2_gamma, layer.ln2_beta,
                         cfg.layer_norm_eps);
  }
  Tensor pooled = core::mean_over_axis1(x);  // [B, m]
  pooled = maybe_dropout(pooled, cfg.dropout, train_mode, rng);
  return core::linear(pooled, p.w_head, p.b_head);
}

std::size_t argmax_lowest(std::span<const double> row) {
  std::size_t best = 0;
  for (std::size_t k = 1; k < row.size(); ++k) {
    if (row[k] > row[best]) best = k;
  }
  return best;
}

Prediction predict(const ClassifierBundle& bundle, const Tensor& batch) {
  core::NoGradGuard no_grad;
  Prediction out;
  out.probabilities = core::softmax(forward(bundle, batch, false));
  const std::size_t classes = out.probabilities.dim(1);
  const auto probs = out.probabilities.values();
  for (std::size_t b = 0; b < out.probabilities.dim(0); ++b) {
    out.classes.push_back(argmax_lowest(probs.subspan(b * classes, classes)));
  }
  return out;
}

std::size_t expected_parameter_count(const ModelConfig& c) {
  const std::size_t m = c.latent_dim;
  const std::size_t per_layer = (m * 3 * m + 3 * m) + (m * m + m) + 2 * m +
                                (m * c.ffn_dim + c.ffn_dim) + (c.ffn_dim * m + m) + 2 * m;
  return (c.input_dim * m + m) + c.num_layers * per_layer + (m * c.num_classes + c.num_classes);
}

}  // namespace detect::model
