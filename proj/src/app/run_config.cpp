#include "detect/app/run_config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "detect/core/errors.hpp"
#include "detect/data/text.hpp"

namespace detect::app {
namespace {

std::uint64_t to_u64(std::string_view key, std::string_view value) {
  const auto v = data::parse_int(value);
  if (!v || *v < 0) {
    throw ConfigError(std::string(key) + ": expected a non-negative integer, got '" +
                      std::string(value) + "'");
  }
  return static_cast<std::uint64_t>(*v);
}

double to_real(std::string_view key, std::string_view value) {
  const auto v = data::parse_double(value);
  if (!v || !std::isfinite(*v)) {
    throw ConfigError(std::string(key) + ": expected a number, got '" +
                      std::string(value) + "'");
  }
  return *v;
}

bool to_bool(std::string_view key, std::string_view value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  throw ConfigError(std::string(key) + ": expected true or false, got '" +
                    std::string(value) + "'");
}

}  // namespace

void RunConfig::set(std::string_view key, std::string_view value) {
  value = data::trim_space(value);
  if (key == "seed") {
    seed = to_u64(key, value);
  } else if (key == "epochs") {
    epochs = to_u64(key, value);
  } else if (key == "batch_size") {
    batch_size = to_u64(key, value);
  } else if (key == "lr") {
    lr = to_real(key, value);
  } else if (key == "weight_decay") {
    weight_decay = to_real(key, value);
  } else if (key == "label_smoothing") {
    label_smoothing = to_real(key, value);
  } else if (key == "clip_norm") {
    clip_norm = to_real(key, value);
  } else if (key == "warmup_fraction") {
    warmup_fraction = to_real(key, value);
  } else if (key == "adam_beta1") {
    adam_beta1 = to_real(key, value);
  } else if (key == "adam_beta2") {
    adam_beta2 = to_real(key, value);
  } else if (key == "adam_eps") {
    adam_eps = to_real(key, value);
  } else if (key == "split") {
    if (value.starts_with("holdout_")) {
      split_mode = SplitMode::holdout;
      train_fraction = to_real(key, value.substr(8));
    } else if (value.starts_with("kfold_")) {
      split_mode = SplitMode::kfold;
      folds = to_u64(key, value.substr(6));
    } else {
      throw ConfigError("split: expected holdout_<fraction> or kfold_<k>, got '" +
                        std::string(value) + "'");
    }
  } else if (key == "split_granularity") {
    if (value == "window") {
      split_granularity = data::SplitGranularity::window;
    } else if (value == "trial") {
      split_granularity = data::SplitGranularity::trial;
    } else {
      throw ConfigError("split_granularity: expected window or trial");
    }
  } else if (key == "trim_s") {
    preprocess.trim_s = to_real(key, value);
  } else if (key == "window") {
    preprocess.window = to_u64(key, value);
  } else if (key == "step") {
    preprocess.step = to_u64(key, value);
  } else if (key == "latent_dim") {
    model.latent_dim = to_u64(key, value);
  } else if (key == "num_layers") {
    model.num_layers = to_u64(key, value);
  } else if (key == "num_heads") {
    model.num_heads = to_u64(key, value);
  } else if (key == "ffn_dim") {
    model.ffn_dim = to_u64(key, value);
  } else if (key == "dropout") {
    model.dropout = to_real(key, value);
  } else if (key == "activation") {
    if (value == "gelu") {
      model.activation = model::Activation::gelu;
    } else if (value == "relu") {
      model.activation = model::Activation::relu;
    } else {
      throw ConfigError("activation: expected gelu or relu");
    }
  } else if (key == "positional_encoding") {
    model.positional_encoding = to_bool(key, value);
  } else if (key == "layer_norm_eps") {
    model.layer_norm_eps = to_real(key, value);
  } else if (key == "nrs_predicate") {
    nrs_predicate = eval::parse_nrs_predicate(value);
  } else {
    throw ConfigError("unknown config key '" + std::string(key) + "'");
  }
}

void RunConfig::validate() const {
  if (epochs == 0) throw ConfigError("epochs must be >= 1");
  if (batch_size == 0) throw ConfigError("batch_size must be >= 1");
  if (!(lr > 0.0)) throw ConfigError("lr must be positive");
  if (weight_decay < 0.0) throw ConfigError("weight_decay must be >= 0");
  if (!(label_smoothing >= 0.0 && label_smoothing < 1.0)) {
    throw ConfigError("label_smoothing must be in [0, 1)");
  }
  if (!(clip_norm > 0.0)) throw ConfigError("clip_norm must be positive");
  if (!(warmup_fraction >= 0.0 && warmup_fraction < 1.0)) {
    throw ConfigError("warmup_fraction must be in [0, 1)");
  }
  if (!(adam_beta1 >= 0.0 && adam_beta1 < 1.0) || !(adam_beta2 >= 0.0 && adam_beta2 < 1.0)) {
    throw ConfigError("adam betas must be in [0, 1)");
  }
  if (!(adam_eps > 0.0)) throw ConfigError("adam_eps must be positive");
  if (split_mode == SplitMode::holdout && !(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw ConfigError("holdout fraction must be in (0, 1)");
  }
  if (split_mode == SplitMode::kfold && folds < 2) throw ConfigError("kfold needs k >= 2");
  if (preprocess.trim_s < 0.0) throw ConfigError("trim_s must be >= 0");
  if (preprocess.window == 0 || preprocess.step == 0) {
    throw ConfigError("window and step must be >= 1");
  }
  model_config().validate();
}

model::TrainOptions RunConfig::train_options() const {
  model::TrainOptions o;
  o.epochs = epochs;
  o.batch_size = batch_size;
  o.learning_rate = lr;
  o.weight_decay = weight_decay;
  o.label_smoothing = label_smoothing;
  o.clip_norm = clip_norm;
  o.warmup_fraction = warmup_fraction;
  o.beta1 = adam_beta1;
  o.beta2 = adam_beta2;
  o.adam_eps = adam_eps;
  o.seed = seed;
  return o;
}

model::ModelConfig RunConfig::model_config() const {
  model::ModelConfig c = model;
  c.seed = seed;
  c.seq_len = preprocess.window;
  return c;
}

std::string RunConfig::split_text() const {
  return split_mode == SplitMode::holdout
             ? "holdout_" + data::format_exact(train_fraction)
             : "kfold_" + std::to_string(folds);
}

std::string RunConfig::to_text() const {
  std::ostringstream o;
  auto real = [](double v) { return data::format_exact(v); };
  o << "seed = " << seed << '\n'
    << "epochs = " << epochs << '\n'
    << "batch_size = " << batch_size << '\n'
    << "lr = " << real(lr) << '\n'
    << "weight_decay = " << real(weight_decay) << '\n'
    << "label_smoothing = " << real(label_smoothing) << '\n'
    << "clip_norm = " << real(clip_norm) << '\n'
    << "warmup_fraction = " << real(warmup_fraction) << '\n'
    << "adam_beta1 = " << real(adam_beta1) << '\n'
    << "adam_beta2 = " << real(adam_beta2) << '\n'
    << "adam_eps = " << real(adam_eps) << '\n'
    << "split = " << split_text() << '\n'
    << "split_granularity = "
    << (split_granularity == data::SplitGranularity::window ? "window" : "trial") << '\n'
    << "trim_s = " << real(preprocess.trim_s) << '\n'
    << "window = " << preprocess.window << '\n'
    << "step = " << preprocess.step << '\n'
    << "latent_dim = " << model.latent_dim << '\n'
    << "num_layers = " << model.num_layers << '\n'
    << "num_heads = " << model.num_heads << '\n'
    << "ffn_dim = " << model.ffn_dim << '\n'
    << "dropout = " << real(model.dropout) << '\n'
    << "activation = " << model::to_string(model.activation) << '\n'
    << "positional_encoding = " << (model.positional_encoding ? "true" : "false") << '\n'
    << "layer_norm_eps = " << real(model.layer_norm_eps) << '\n'
    << "nrs_predicate = " << eval::to_string(nrs_predicate) << '\n';
  return o.str();
}

RunConfig parse_run_config(const std::string& text) {
  RunConfig config;
  std::istringstream in(text);
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = raw;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = data::trim_space(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    try {
      if (eq == std::string_view::npos) throw ConfigError("expected 'key = value'");
      config.set(data::trim_space(line.substr(0, eq)), line.substr(eq + 1));
    } catch (const ConfigError& e) {
      throw ConfigError("config line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  config.validate();
  return config;
}

RunConfig load_run_config(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError("cannot open config " + file.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  try {
    return parse_run_config(buffer.str());
  } catch (const ConfigError& e) {
    throw ConfigError(file.string() + ": " + e.what());
  }
}

}  // namespace detect::app
