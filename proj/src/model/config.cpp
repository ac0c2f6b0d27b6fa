#include "detect/model/config.hpp"

#include <string>

#include "detect/core/errors.hpp"

namespace detect::model {

std::string_view to_string(Activation a) {
  return a == Activation::gelu ? "gelu" : "relu";
}

void ModelConfig::validate() const {
  auto require = [](bool ok, const std::string& message) {
    if (!ok) throw ConfigError("invalid model config: " + message);
  };
  require(input_dim > 0, "input_dim must be positive");
  require(seq_len > 0, "seq_len must be positive");
  require(latent_dim > 0, "latent_dim must be positive");
  require(latent_dim % 2 == 0, "latent_dim must be even for sinusoidal encoding");
  require(num_layers > 0, "num_layers must be positive");
  require(num_heads > 0 && latent_dim % num_heads == 0,
          "num_heads must divide latent_dim (" + std::to_string(latent_dim) + ")");
  require(ffn_dim > 0, "ffn_dim must be positive");
  require(dropout >= 0.0 && dropout < 1.0, "dropout must be in [0, 1)");
  require(num_classes >= 2, "num_classes must be at least 2");
  require(layer_norm_eps > 0.0, "layer_norm_eps must be positive");
}

}  // namespace detect::model
