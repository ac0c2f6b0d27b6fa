#include "detect/core/loss.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "detect/core/detail/node.hpp"
#include "detect/core/errors.hpp"

namespace detect::core {

namespace {

void check_inputs(const Tensor& t, std::span<const ClassIndex> labels,
                  double epsilon, const char* what) {
  if (t.rank() != 2) {
    throw DimensionError(std::string(what) + " must be [N x K], got " +
                         shape_to_string(t.shape()));
  }
  if (labels.size() != t.dim(0)) {
    throw DimensionError(std::string(what) + " has " + std::to_string(t.dim(0)) +
                         " rows but " + std::to_string(labels.size()) +
                         " labels were given");
  }
  if (!(epsilon >= 0.0 && epsilon < 1.0)) {
    throw ContractError("label smoothing must be in [0, 1), got " +
                        std::to_string(epsilon));
  }
  const std::size_t classes = t.dim(1);
  for (std::size_t j = 0; j < labels.size(); ++j) {
    if (labels[j] >= classes) {
      throw ContractError("label " + std::to_string(labels[j]) + " at row " +
                          std::to_string(j) + " is outside 0.." +
                          std::to_string(classes - 1));
    }
  }
}

double target_weight(bool is_label, double epsilon, std::size_t classes) {
  return (is_label ? 1.0 - epsilon : 0.0) + epsilon / static_cast<double>(classes);
}

}  // namespace

double smoothed_cross_entropy(const Tensor& probs,
                              std::span<const ClassIndex> labels,
                              double epsilon) {
  check_inputs(probs, labels, epsilon, "probabilities");
  const std::size_t rows = probs.dim(0);
  const std::size_t classes = probs.dim(1);
  const auto p = probs.values();
  double total = 0.0;
  for (std::size_t j = 0; j < rows; ++j) {
    double row_sum = 0.0;
    for (std::size_t k = 0; k < classes; ++k) row_sum += p[j * classes + k];
    if (std::abs(row_sum - 1.0) > 1e-9) {
      throw ContractError("probability row " + std::to_string(j) + " sums to " +
                          std::to_string(row_sum));
    }
    for (std::size_t k = 0; k < classes; ++k) {
      const double w = target_weight(labels[j] == k, epsilon, classes);
      if (w == 0.0) continue;
      const double pk = p[j * classes + k];
      if (!(pk > 0.0)) {
        throw NumericalDomainError("log of non-positive probability " +
                                   std::to_string(pk) + " at row " +
                                   std::to_string(j) + ", class " +
                                   std::to_string(k));
      }
      total -= w * std::log(pk);
    }
  }
  return total / static_cast<double>(rows);
}

Tensor smoothed_cross_entropy_from_logits(const Tensor& logits,
                                          std::span<const ClassIndex> labels,
                                          double epsilon) {
  check_inputs(logits, labels, epsilon, "logits");
  const std::size_t rows = logits.dim(0);
  const std::size_t classes = logits.dim(1);
  const auto z = logits.values();

  // softmax is kept for the backward pass: dL/dz = (softmax - target) / N.
  std::vector<double> probs(z.size());
  double total = 0.0;
  for (std::size_t j = 0; j < rows; ++j) {
    const double* row = z.data() + j * classes;
    const double peak = *std::max_element(row, row + classes);
    double denom = 0.0;
    for (std::size_t k = 0; k < classes; ++k) denom += std::exp(row[k] - peak);
    const double log_denom = std::log(denom);
    for (std::size_t k = 0; k < classes; ++k) {
      const double log_p = row[k] - peak - log_denom;
      probs[j * classes + k] = std::exp(log_p);
      total -= target_weight(labels[j] == k, epsilon, classes) * log_p;
    }
  }
  const double inv_rows = 1.0 / static_cast<double>(rows);
  auto out = detail::make_output({1}, {logits.node()});
  out->values[0] = total * inv_rows;
  if (out->requires_grad) {
    std::vector<ClassIndex> label_copy(labels.begin(), labels.end());
    out->backward = [rows, classes, epsilon, inv_rows, probs = std::move(probs),
                     label_copy = std::move(label_copy)](detail::Node& self) {
      detail::Node& parent = *self.parents[0];
      const double g = self.grad[0] * inv_rows;
      for (std::size_t j = 0; j < rows; ++j) {
        for (std::size_t k = 0; k < classes; ++k) {
          const double t = target_weight(label_copy[j] == k, epsilon, classes);
          parent.grad[j * classes + k] += g * (probs[j * classes + k] - t);
        }
      }
    };
  }
  return Tensor(std::move(out));
}

}  // namespace detect::core
