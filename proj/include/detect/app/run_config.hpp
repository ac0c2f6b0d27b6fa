#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>

#include "detect/data/preprocess.hpp"
#include "detect/data/split.hpp"
#include "detect/eval/detect.hpp"
#include "detect/model/config.hpp"
#include "detect/model/trainer.hpp"

namespace detect::app {

enum class SplitMode { holdout, kfold };

/// Every tunable of a run. Defaults are the reference training recipe.
///
/// Text form: one `key = value` per line, '#' starts a comment, unknown keys
/// are errors. Keys:
///
///   seed, epochs, batch_size, lr, weight_decay, label_smoothing, clip_norm,
///   warmup_fraction, adam_beta1, adam_beta2, adam_eps,
///   split (holdout_<frac> | kfold_<k>), split_granularity (window | trial),
///   trim_s, window, step,
///   latent_dim, num_layers, num_heads, ffn_dim, dropout, activation
///   (gelu | relu), positional_encoding (true | false), layer_norm_eps,
///   nrs_predicate (and | or)
struct RunConfig {
  std::uint64_t seed = 42;
  std::size_t epochs = 100;
  std::size_t batch_size = 32;
  double lr = 1e-3;
  double weight_decay = 1e-4;
  double label_smoothing = 0.1;
  double clip_norm = 1.0;
  double warmup_fraction = 0.1;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;

  SplitMode split_mode = SplitMode::holdout;
  double train_fraction = 0.8;
  std::size_t folds = 5;
  data::SplitGranularity split_granularity = data::SplitGranularity::window;

  data::PreprocessOptions preprocess;
  model::ModelConfig model;
  eval::NrsPredicate nrs_predicate = eval::NrsPredicate::both;

  /// Applies one `key`/`value` pair. Throws ConfigError.
  void set(std::string_view key, std::string_view value);
  /// Throws ConfigError on the first violated constraint.
  void validate() const;

  model::TrainOptions train_options() const;
  /// Model config with the run seed and the preprocessing window length.
  model::ModelConfig model_config() const;
  std::string split_text() const;
  /// Canonical text form; parse_run_config(to_text()) reproduces *this.
  std::string to_text() const;
};

RunConfig parse_run_config(const std::string& text);
RunConfig load_run_config(const std::filesystem::path& file);

}  // namespace detect::app
