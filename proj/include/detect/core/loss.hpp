#pragma once

#include <cstddef>
#include <span>

#include "detect/core/tensor.hpp"

namespace detect::core {

using ClassIndex = std::size_t;

/// Label-smoothed cross-entropy evaluated on probabilities [N, K]:
///
///   L = -1/N sum_j sum_k [(1 - eps) 1{y_j = k} + eps / K] log p_jk
///
/// Throws NumericalDomainError when a probability with nonzero target
/// weight is not strictly positive.
double smoothed_cross_entropy(const Tensor& probs,
                              std::span<const ClassIndex> labels,
                              double epsilon);

/// Same loss computed from pre-softmax logits through a fused log-softmax,
/// recorded in the graph so the gradient reaches the logits.
Tensor smoothed_cross_entropy_from_logits(const Tensor& logits,
                                          std::span<const ClassIndex> labels,
                                          double epsilon);

}  // namespace detect::core
