#pragma once

#include <cstddef>
#include <random>

#include "detect/core/tensor.hpp"

namespace detect::core {

/// Matrix product. `a` is [..., K] (leading axes are flattened into rows),
/// `b` is [K, N]; the result is [..., N].
Tensor matmul(const Tensor& a, const Tensor& b);

/// x W + b for x [..., K], W [K, N], b [N].
Tensor linear(const Tensor& x, const Tensor& w, const Tensor& b);

/// Per-batch product alpha * A_i B_i of [B, M, K] with [B, K, N], or with
/// [B, N, K] when `transpose_b` is set.
Tensor batched_matmul(const Tensor& a, const Tensor& b, bool transpose_b = false,
                      double alpha = 1.0);

/// Takes columns [offset, offset + heads * head_dim) of x [B, n, P] and
/// lays them out per head: [B * heads, n, head_dim].
Tensor split_heads(const Tensor& x, std::size_t offset, std::size_t heads,
                   std::size_t head_dim);

/// Inverse layout of split_heads: [B * heads, n, hd] -> [B, n, heads * hd].
Tensor merge_heads(const Tensor& x, std::size_t heads);

/// Element-wise sum. `b` either matches `a` or matches a trailing suffix of
/// `a`'s shape, in which case it is broadcast over the leading axes.
Tensor add(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);
Tensor scale(const Tensor& a, double factor);

Tensor sum(const Tensor& a);
Tensor mean(const Tensor& a);

/// Mean over axis 1 of a rank >= 3 tensor: [B, n, ...] -> [B, ...].
Tensor mean_over_axis1(const Tensor& a);

Tensor reshape(const Tensor& a, Shape shape);

/// [A, B, C, D] -> [A, C, B, D].
Tensor swap_axes_1_2(const Tensor& a);

/// Columns [offset, offset + length) of the last axis.
Tensor slice_last(const Tensor& a, std::size_t offset, std::size_t length);

/// Softmax along the last axis, evaluated with max subtraction.
Tensor softmax(const Tensor& a);

/// Normalizes each vector along the last axis to zero mean and unit
/// variance, then applies gamma * x + beta. gamma and beta are [D].
Tensor layer_norm(const Tensor& x, const Tensor& gamma, const Tensor& beta,
                  double eps);

/// Exact GELU, x * Phi(x).
Tensor gelu(const Tensor& a);
Tensor relu(const Tensor& a);

/// Inverted dropout: zeroes each element with probability p and scales the
/// survivors by 1 / (1 - p). The mask is drawn from `rng`.
Tensor dropout(const Tensor& a, double p, std::mt19937_64& rng);

}  // namespace detect::core
