#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <new>
#include <vector>

#include "detect/core/tensor.hpp"

namespace detect::core::detail {

// Storage starts on a cache-line boundary so that vectorized reductions
// split their work identically for every buffer of the same shape. This
// keeps results bit-identical across equal-valued tensors.
template <typename T>
struct CacheAlignedAllocator {
  using value_type = T;
  static constexpr std::align_val_t kAlignment{64};

  CacheAlignedAllocator() = default;
  template <typename U>
  CacheAlignedAllocator(const CacheAlignedAllocator<U>&) noexcept {}

  T* allocate(std::size_t n) {
    return static_cast<T*>(::operator new(n * sizeof(T), kAlignment));
  }
  void deallocate(T* p, std::size_t) noexcept { ::operator delete(p, kAlignment); }

  template <typename U>
  bool operator==(const CacheAlignedAllocator<U>&) const noexcept {
    return true;
  }
};

using Buffer = std::vector<double, CacheAlignedAllocator<double>>;

struct Node {
  Shape shape;
  Buffer values;
  Buffer grad;
  bool requires_grad = false;
  std::vector<std::shared_ptr<Node>> parents;
  // Reads this node's grad and accumulates into parents that require grad.
  std::function<void(Node&)> backward;
};

// Creates the output node of an op. Graph links are only kept when grad
// mode is on and at least one parent requires grad.
std::shared_ptr<Node> make_output(Shape shape,
                                  std::vector<std::shared_ptr<Node>> parents);

}  // namespace detect::core::detail
