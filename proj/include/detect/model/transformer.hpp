#pragma once

#include <cstddef>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "detect/core/optim.hpp"
#include "detect/core/tensor.hpp"
#include "detect/data/types.hpp"
#include "detect/model/config.hpp"

namespace detect::model {

struct EncoderLayerParams {
  core::Tensor w_qkv, b_qkv;      // [m, 3m], [3m]
  core::Tensor w_out, b_out;      // [m, m], [m]
  core::Tensor ln1_gamma, ln1_beta;
  core::Tensor w_ff1, b_ff1;      // [m, ffn], [ffn]
  core::Tensor w_ff2, b_ff2;      // [ffn, m], [m]
  core::Tensor ln2_gamma, ln2_beta;
};

struct TransformerParams {
  core::Tensor w_in, b_in;        // [d, m], [m]
  std::vector<EncoderLayerParams> layers;
  core::Tensor w_head, b_head;    // [m, K], [K]
};

/// Everything needed to classify windows: architecture, learned weights,
/// the normalization frozen from the training split and the label names.
///
/// Copies share parameter storage (Tensor is a handle); use `clone()` for
/// an independent model.
struct ClassifierBundle {
  ModelConfig config;
  TransformerParams params;
  std::optional<data::NormStats> norm_stats;
  std::vector<std::string> class_names;
  /// Keys of pre-treatment windows held out from training; per-patient
  /// baseline accuracy is measured on these.
  std::vector<std::string> holdout_keys;

  /// Named view in a fixed order ("input.weight", "layer0.qkv.weight", ...).
  core::ParameterSet parameters() const;
  ClassifierBundle clone() const;
};

/// Deterministic initialization from config.seed. Linear weights are
/// Xavier-uniform; the head is drawn with a small std so initial logits are
/// near zero and the initial loss is close to ln K.
ClassifierBundle init_params(const ModelConfig& config);

/// Fixed sinusoidal table: PE(p, 2i) = sin(p / 10000^(2i/m)),
/// PE(p, 2i+1) = cos(same).
core::Tensor positional_encoding(std::size_t length, std::size_t dim);

/// [B, n, d] -> [B, K] logits. Dropout (after attention, after the FFN,
/// before the head) is active only in train mode and then needs `rng`.
core::Tensor forward(const ClassifierBundle& bundle, const core::Tensor& batch,
                     bool train_mode, std::mt19937_64* rng = nullptr);

struct Prediction {
  std::vector<std::size_t> classes;
  core::Tensor probabilities;  // [B, K]
};

/// Eval-mode forward, softmax, argmax with ties broken toward the lowest
/// class index.
Prediction predict(const ClassifierBundle& bundle, const core::Tensor& batch);

std::size_t argmax_lowest(std::span<const double> row);

/// Closed-form parameter count for a configuration.
std::size_t expected_parameter_count(const ModelConfig& config);

}  // namespace detect::model
