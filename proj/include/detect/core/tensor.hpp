#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace detect::core {

using Shape = std::vector<std::size_t>;

std::size_t shape_numel(const Shape& shape);
std::string shape_to_string(const Shape& shape);

namespace detail {
struct Node;
}

/// Dense row-major float64 tensor that records the operations producing it
/// so gradients can be propagated with `backward`.
///
/// A Tensor is a reference handle: copies share the same storage and graph
/// node, the way parameters are shared between a model and its optimizer.
/// Use `clone()` for an independent deep copy.
class Tensor {
 public:
  Tensor() = default;

  static Tensor zeros(Shape shape, bool requires_grad = false);
  static Tensor full(Shape shape, double value, bool requires_grad = false);
  static Tensor from_values(Shape shape, std::vector<double> values,
                            bool requires_grad = false);
  static Tensor scalar(double value, bool requires_grad = false);

  bool defined() const noexcept { return node_ != nullptr; }

  const Shape& shape() const;
  std::size_t rank() const { return shape().size(); }
  std::size_t dim(std::size_t axis) const;
  std::size_t numel() const;

  std::span<const double> values() const;
  std::span<double> mutable_values();
  double item() const;

  bool requires_grad() const;
  void set_requires_grad(bool flag);

  /// Gradient buffer written by the last `backward` call; empty when this
  /// tensor was not reached.
  std::span<const double> grad() const;
  /// Writable gradient; allocated as zeros when absent.
  std::span<double> mutable_grad();
  bool has_grad() const;
  void clear_grad();

  /// Deep copy of the values with no graph history.
  Tensor clone() const;

  const std::shared_ptr<detail::Node>& node() const { return node_; }
  explicit Tensor(std::shared_ptr<detail::Node> node) : node_(std::move(node)) {}

 private:
  std::shared_ptr<detail::Node> node_;
};

/// Reverse-mode sweep from a scalar. Gradients of every reachable tensor
/// that requires them are reset to zero before propagation, so repeated
/// calls overwrite rather than accumulate.
void backward(const Tensor& loss);

bool grad_enabled() noexcept;

/// Raises the heap's mmap and trim thresholds (glibc only) so the large,
/// short-lived activation buffers of a training step are recycled from the
/// heap instead of being mapped and faulted in on every allocation.
/// Idempotent; a no-op elsewhere.
void tune_allocator_for_training();

/// Disables graph recording on the current thread for its lifetime.
class NoGradGuard {
 public:
  NoGradGuard();
  ~NoGradGuard();
  NoGradGuard(const NoGradGuard&) = delete;
  NoGradGuard& operator=(const NoGradGuard&) = delete;

 private:
  bool previous_;
};

}  // namespace detect::core
