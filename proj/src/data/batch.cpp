#include "detect/data/batch.hpp"

#include "detect/core/errors.hpp"

namespace detect::data {

core::Tensor make_batch(const WindowSet& set, std::span<const std::size_t> indices) {
  if (indices.empty()) throw ContractError("cannot build an empty batch");
  const std::size_t per_window = set.window_length * kChannels;
  std::vector<double> values;
  values.reserve(indices.size() * per_window);
  for (auto i : indices) {
    const auto& w = set.windows.at(i).values;
    if (w.size() != per_window) throw ContractError("window length mismatch in batch");
    values.insert(values.end(), w.begin(), w.end());
  }
  return core::Tensor::from_values({indices.size(), set.window_length, kChannels},
                                   std::move(values));
}

std::vector<std::size_t> batch_labels(const WindowSet& set,
                                      std::span<const std::size_t> indices) {
  std::vector<std::size_t> labels;
  labels.reserve(indices.size());
  for (auto i : indices) labels.push_back(set.windows.at(i).label);
  return labels;
}

}  // namespace detect::data
