#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "detect/core/tensor.hpp"
#include "detect/data/types.hpp"

namespace detect::data {

/// Stacks the selected windows into a [B, length, 6] tensor.
core::Tensor make_batch(const WindowSet& set, std::span<const std::size_t> indices);

std::vector<std::size_t> batch_labels(const WindowSet& set,
                                      std::span<const std::size_t> indices);

}  // namespace detect::data
