#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>

namespace detect::model {

enum class Activation { gelu, relu };

std::string_view to_string(Activation a);

struct ModelConfig {
  std::size_t input_dim = 6;
  std::size_t seq_len = 100;
  std::size_t latent_dim = 64;
  std::size_t num_layers = 2;
  std::size_t num_heads = 4;
  std::size_t ffn_dim = 128;
  double dropout = 0.1;
  std::size_t num_classes = 3;
  std::uint64_t seed = 42;
  Activation activation = Activation::gelu;
  bool positional_encoding = true;
  double layer_norm_eps = 1e-8;

  bool operator==(const ModelConfig&) const = default;

  /// Throws ConfigError on the first violated constraint.
  void validate() const;
};

}  // namespace detect::model
