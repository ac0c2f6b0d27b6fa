#include "detect/model/bundle_io.hpp"

#include <fstream>
#include <map>
#include <sstream>

#include "detect/core/binary_io.hpp"
#include "detect/data/text.hpp"

namespace detect::model {

namespace bin = core::binary;

namespace {

constexpr char kMagic[9] = "DTBUNDLE";

std::string config_to_text(const ModelConfig& c) {
  std::ostringstream out;
  out << "input_dim=" << c.input_dim << '\n'
      << "seq_len=" << c.seq_len << '\n'
      << "latent_dim=" << c.latent_dim << '\n'
      << "num_layers=" << c.num_layers << '\n'
      << "num_heads=" << c.num_heads << '\n'
      << "ffn_dim=" << c.ffn_dim << '\n'
      << "dropout=" << data::format_exact(c.dropout) << '\n'
      << "num_classes=" << c.num_classes << '\n'
      << "seed=" << c.seed << '\n'
      << "activation=" << to_string(c.activation) << '\n'
      << "positional_encoding=" << (c.positional_encoding ? 1 : 0) << '\n'
      << "layer_norm_eps=" << data::format_exact(c.layer_norm_eps) << '\n';
  return out.str();
}

ModelConfig config_from_text(const std::string& text) {
  std::map<std::string, std::string> kv;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    kv[line.substr(0, eq)] = line.substr(eq + 1);
  }
  auto get = [&](const char* key) -> const std::string& {
    auto it = kv.find(key);
    if (it == kv.end()) throw IoError(std::string("bundle config is missing '") + key + "'");
    return it->second;
  };
  auto as_size = [&](const char* key) {
    const auto v = data::parse_int(get(key));
    if (!v || *v < 0) throw IoError(std::string("bad bundle config value for ") + key);
    return static_cast<std::size_t>(*v);
  };
  auto as_double = [&](const char* key) {
    const auto v = data::parse_double(get(key));
    if (!v) throw IoError(std::string("bad bundle config value for ") + key);
    return *v;
  };
  ModelConfig c;
  c.input_dim = as_size("input_dim");
  c.seq_len = as_size("seq_len");
  c.latent_dim = as_size("latent_dim");
  c.num_layers = as_size("num_layers");
  c.num_heads = as_size("num_heads");
  c.ffn_dim = as_size("ffn_dim");
  c.dropout = as_double("dropout");
  c.num_classes = as_size("num_classes");
  c.seed = as_size("seed");
  c.activation = get("activation") == "relu" ? Activation::relu : Activation::gelu;
  c.positional_encoding = as_size("positional_encoding") != 0;
  c.layer_norm_eps = as_double("layer_norm_eps");
  c.validate();
  return c;
}

}  // namespace

void write_bundle(const ClassifierBundle& bundle, std::ostream& out) {
  out.write(kMagic, 8);
  bin::write_pod<std::uint32_t>(out, kBundleVersion);
  bin::write_string(out, config_to_text(bundle.config));
  bin::write_pod<std::uint64_t>(out, bundle.class_names.size());
  for (const auto& n : bundle.class_names) bin::write_string(out, n);
  bin::write_pod<std::uint8_t>(out, bundle.norm_stats ? 1 : 0);
  if (bundle.norm_stats) {
    bin::write_doubles(out, bundle.norm_stats->mean.data(), data::kChannels);
    bin::write_doubles(out, bundle.norm_stats->stddev.data(), data::kChannels);
  }
  bin::write_pod<std::uint64_t>(out, bundle.holdout_keys.size());
  for (const auto& k : bundle.holdout_keys) bin::write_string(out, k);
  const auto params = bundle.parameters();
  bin::write_pod<std::uint64_t>(out, params.size());
  for (const auto& p : params) {
    bin::write_string(out, p.name);
    const auto& shape = p.tensor.shape();
    bin::write_pod<std::uint64_t>(out, shape.size());
    for (auto e : shape) bin::write_pod<std::uint64_t>(out, e);
    const auto values = p.tensor.values();
    bin::write_doubles(out, values.data(), values.size());
  }
}

ClassifierBundle read_bundle(std::istream& in) {
  bin::expect_magic(in, kMagic, "classifier bundle");
  const auto version = bin::read_pod<std::uint32_t>(in);
  if (version != kBundleVersion) {
    throw IoError("unsupported bundle version " + std::to_string(version));
  }
  const ModelConfig config = config_from_text(bin::read_string(in));
  // Shapes come from the config; the stored values overwrite the init.
  ClassifierBundle bundle = init_params(config);
  bundle.class_names.clear();
  const auto n_classes = bin::read_pod<std::uint64_t>(in);
  for (std::uint64_t i = 0; i < n_classes; ++i) bundle.class_names.push_back(bin::read_string(in));
  if (bin::read_pod<std::uint8_t>(in) != 0) {
    data::NormStats stats;
    bin::read_doubles(in, stats.mean.data(), data::kChannels);
    bin::read_doubles(in, stats.stddev.data(), data::kChannels);
    bundle.norm_stats = stats;
  }
  const auto n_keys = bin::read_pod<std::uint64_t>(in);
  bundle.holdout_keys.reserve(n_keys);
  for (std::uint64_t i = 0; i < n_keys; ++i) bundle.holdout_keys.push_back(bin::read_string(in));

  auto params = bundle.parameters();
  const auto count = bin::read_pod<std::uint64_t>(in);
  if (count != params.size()) {
    throw IoError("bundle stores " + std::to_string(count) + " parameters, config implies " +
                  std::to_string(params.size()));
  }
  for (auto& p : params) {
    const auto name = bin::read_string(in);
    if (name != p.name) throw IoError("bundle parameter '" + name + "' where '" + p.name + "' expected");
    const auto rank = bin::read_pod<std::uint64_t>(in);
    core::Shape shape;
    for (std::uint64_t r = 0; r < rank && r < 8; ++r) shape.push_back(bin::read_pod<std::uint64_t>(in));
    if (shape != p.tensor.shape()) {
      throw IoError("parameter '" + name + "' has shape " + core::shape_to_string(shape) +
                    ", expected " + core::shape_to_string(p.tensor.shape()));
    }
    auto values = p.tensor.mutable_values();
    bin::read_doubles(in, values.data(), values.size());
  }
  return bundle;
}

void save_bundle(const ClassifierBundle& bundle, const std::filesystem::path& file) {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw IoError("cannot write " + file.string());
  write_bundle(bundle, out);
  if (!out) throw IoError("write failed for " + file.string());
}

ClassifierBundle load_bundle(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw IoError("cannot open " + file.string());
  return read_bundle(in);
}

}  // namespace detect::model
