#include "detect/core/ops.hpp"

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <numbers>

#include "detect/core/detail/node.hpp"
#include "detect/core/errors.hpp"

namespace detect::core {

namespace {

using RowMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ConstMap = Eigen::Map<const RowMatrix>;
using MutMap = Eigen::Map<RowMatrix>;

using detail::make_output;
using detail::Node;

ConstMap cmap(const detail::Buffer& v, std::size_t rows, std::size_t cols,
              std::size_t offset = 0) {
  return ConstMap(v.data() + offset, static_cast<Eigen::Index>(rows),
                  static_cast<Eigen::Index>(cols));
}

MutMap mmap(detail::Buffer& v, std::size_t rows, std::size_t cols,
            std::size_t offset = 0) {
  return MutMap(v.data() + offset, static_cast<Eigen::Index>(rows),
                static_cast<Eigen::Index>(cols));
}

[[noreturn]] void shape_mismatch(const char* op, const Tensor& a,
                                 const Tensor& b) {
  throw DimensionError(std::string(op) + ": incompatible shapes " +
                       shape_to_string(a.shape()) + " and " +
                       shape_to_string(b.shape()));
}

Tensor finish(std::shared_ptr<Node> out, std::function<void(Node&)> fn) {
  if (out->requires_grad) out->backward = std::move(fn);
  return Tensor(std::move(out));
}

std::size_t last_dim(const Tensor& a) { return a.shape().back(); }

}  // namespace

Tensor matmul(const Tensor& a, const Tensor& b) {
  if (b.rank() != 2 || a.rank() < 1 || last_dim(a) != b.dim(0)) {
    shape_mismatch("matmul", a, b);
  }
  const std::size_t k = b.dim(0);
  const std::size_t n = b.dim(1);
  const std::size_t rows = a.numel() / k;
  Shape out_shape = a.shape();
  out_shape.back() = n;
  auto out = make_output(out_shape, {a.node(), b.node()});
  mmap(out->values, rows, n).noalias() =
      cmap(a.node()->values, rows, k) * cmap(b.node()->values, k, n);
  return finish(std::move(out), [rows, k, n](Node& self) {
    Node& pa = *self.parents[0];
    Node& pb = *self.parents[1];
    auto dout = cmap(self.grad, rows, n);
    if (pa.requires_grad) {
      mmap(pa.grad, rows, k).noalias() += dout * cmap(pb.values, k, n).transpose();
    }
    if (pb.requires_grad) {
      mmap(pb.grad, k, n).noalias() += cmap(pa.values, rows, k).transpose() * dout;
    }
  });
}

Tensor linear(const Tensor& x, const Tensor& w, const Tensor& b) {
  if (w.rank() != 2 || x.rank() < 1 || last_dim(x) != w.dim(0) ||
      b.shape() != Shape{w.dim(1)}) {
    throw DimensionError("linear: incompatible shapes " + shape_to_string(x.shape()) +
                         ", " + shape_to_string(w.shape()) + ", " +
                         shape_to_string(b.shape()));
  }
  const std::size_t k = w.dim(0);
  const std::size_t n = w.dim(1);
  const std::size_t rows = x.numel() / k;
  Shape out_shape = x.shape();
  out_shape.back() = n;
  auto out = make_output(out_shape, {x.node(), w.node(), b.node()});
  auto dst = mmap(out->values, rows, n);
  dst.noalias() = cmap(x.node()->values, rows, k) * cmap(w.node()->values, k, n);
  dst.rowwise() += cmap(b.node()->values, 1, n).row(0);
  return finish(std::move(out), [rows, k, n](Node& self) {
    Node& px = *self.parents[0];
    Node& pw = *self.parents[1];
    Node& pb = *self.parents[2];
    auto dout = cmap(self.grad, rows, n);
    if (px.requires_grad) {
      mmap(px.grad, rows, k).noalias() += dout * cmap(pw.values, k, n).transpose();
    }
    if (pw.requires_grad) {
      mmap(pw.grad, k, n).noalias() += cmap(px.values, rows, k).transpose() * dout;
    }
    if (pb.requires_grad) mmap(pb.grad, 1, n) += dout.colwise().sum();
  });
}

Tensor batched_matmul(const Tensor& a, const Tensor& b, bool transpose_b, double alpha) {
  if (a.rank() != 3 || b.rank() != 3 || a.dim(0) != b.dim(0)) {
    shape_mismatch("batched_matmul", a, b);
  }
  const std::size_t batch = a.dim(0);
  const std::size_t m = a.dim(1);
  const std::size_t k = a.dim(2);
  const std::size_t bk = transpose_b ? b.dim(2) : b.dim(1);
  const std::size_t n = transpose_b ? b.dim(1) : b.dim(2);
  if (bk != k) shape_mismatch("batched_matmul", a, b);

  auto out = make_output({batch, m, n}, {a.node(), b.node()});
  const auto& av = a.node()->values;
  const auto& bv = b.node()->values;
  for (std::size_t i = 0; i < batch; ++i) {
    auto dst = mmap(out->values, m, n, i * m * n);
    auto lhs = cmap(av, m, k, i * m * k);
    if (transpose_b) {
      dst.noalias() = alpha * (lhs * cmap(bv, n, k, i * n * k).transpose());
    } else {
      dst.noalias() = alpha * (lhs * cmap(bv, k, n, i * k * n));
    }
  }
  return finish(std::move(out), [batch, m, k, n, transpose_b, alpha](Node& self) {
    Node& pa = *self.parents[0];
    Node& pb = *self.parents[1];
    for (std::size_t i = 0; i < batch; ++i) {
      auto dout = cmap(self.grad, m, n, i * m * n);
      if (pa.requires_grad) {
        auto da = mmap(pa.grad, m, k, i * m * k);
        if (transpose_b) {
          da.noalias() += alpha * (dout * cmap(pb.values, n, k, i * n * k));
        } else {
          da.noalias() += alpha * (dout * cmap(pb.values, k, n, i * k * n).transpose());
        }
      }
      if (pb.requires_grad) {
        auto lhs = cmap(pa.values, m, k, i * m * k);
        if (transpose_b) {
          mmap(pb.grad, n, k, i * n * k).noalias() += alpha * (dout.transpose() * lhs);
        } else {
          mmap(pb.grad, k, n, i * k * n).noalias() += alpha * (lhs.transpose() * dout);
        }
      }
    }
  });
}

Tensor split_heads(const Tensor& x, std::size_t offset, std::size_t heads,
                   std::size_t head_dim) {
  if (x.rank() != 3 || heads == 0 || head_dim == 0 ||
      offset + heads * head_dim > x.dim(2)) {
    throw DimensionError("split_heads: cannot take " + std::to_string(heads) + "x" +
                         std::to_string(head_dim) + " columns at offset " +
                         std::to_string(offset) + " from " + shape_to_string(x.shape()));
  }
  const std::size_t batch = x.dim(0);
  const std::size_t steps = x.dim(1);
  const std::size_t width = x.dim(2);
  auto out = make_output({batch * heads, steps, head_dim}, {x.node()});
  const auto& xv = x.node()->values;
  for (std::size_t b = 0; b < batch; ++b) {
    for (std::size_t h = 0; h < heads; ++h) {
      for (std::size_t t = 0; t < steps; ++t) {
        const double* src = xv.data() + (b * steps + t) * width + offset + h * head_dim;
        double* dst = out->values.data() + ((b * heads + h) * steps + t) * head_dim;
        std::copy_n(src, head_dim, dst);
      }
    }
  }
  return finish(std::move(out), [batch, steps, width, offset, heads, head_dim](Node& self) {
    Node& px = *self.parents[0];
    for (std::size_t b = 0; b < batch; ++b) {
      for (std::size_t h = 0; h < heads; ++h) {
        for (std::size_t t = 0; t < steps; ++t) {
          double* dst = px.grad.data() + (b * steps + t) * width + offset + h * head_dim;
          const double* g = self.grad.data() + ((b * heads + h) * steps + t) * head_dim;
          for (std::size_t i = 0; i < head_dim; ++i) dst[i] += g[i];
        }
      }
    }
  });
}

Tensor merge_heads(const Tensor& x, std::size_t heads) {
  if (x.rank() != 3 || heads == 0 || x.dim(0) % heads != 0) {
    throw DimensionError("merge_heads: " + shape_to_string(x.shape()) +
                         " is not divisible into " + std::to_string(heads) + " heads");
  }
  const std::size_t batch = x.dim(0) / heads;
  const std::size_t steps = x.dim(1);
  const std::size_t head_dim = x.dim(2);
  const std::size_t width = heads * head_dim;
  auto out = make_output({batch, steps, width}, {x.node()});
  const auto& xv = x.node()->values;
  for (std::size_t b = 0; b < batch; ++b) {
    for (std::size_t h = 0; h < heads; ++h) {
      for (std::size_t t = 0; t < steps; ++t) {
        const double* src = xv.data() + ((b * heads + h) * steps + t) * head_dim;
        double* dst = out->values.data() + (b * steps + t) * width + h * head_dim;
        std::copy_n(src, head_dim, dst);
      }
    }
  }
  return finish(std::move(out), [batch, steps, heads, head_dim, width](Node& self) {
    Node& px = *self.parents[0];
    for (std::size_t b = 0; b < batch; ++b) {
      for (std::size_t h = 0; h < heads; ++h) {
        for (std::size_t t = 0; t < steps; ++t) {
          double* dst = px.grad.data() + ((b * heads + h) * steps + t) * head_dim;
          const double* g = self.grad.data() + (b * steps + t) * width + h * head_dim;
          for (std::size_t i = 0; i < head_dim; ++i) dst[i] += g[i];
        }
      }
    }
  });
}

Tensor add(const Tensor& a, const Tensor& b) {
  const auto& as = a.shape();
  const auto& bs = b.shape();
  if (bs.size() > as.size() ||
      !std::equal(bs.begin(), bs.end(), as.end() - static_cast<long>(bs.size()))) {
    shape_mismatch("add", a, b);
  }
  const std::size_t inner = b.numel();
  const std::size_t outer = a.numel() / inner;
  auto out = make_output(as, {a.node(), b.node()});
  const auto& av = a.node()->values;
  const auto& bv = b.node()->values;
  for (std::size_t o = 0; o < outer; ++o) {
    for (std::size_t i = 0; i < inner; ++i) {
      out->values[o * inner + i] = av[o * inner + i] + bv[i];
    }
  }
  return finish(std::move(out), [outer, inner](Node& self) {
    Node& pa = *self.parents[0];
    Node& pb = *self.parents[1];
    if (pa.requires_grad) {
      for (std::size_t j = 0; j < self.grad.size(); ++j) pa.grad[j] += self.grad[j];
    }
    if (pb.requires_grad) {
      for (std::size_t o = 0; o < outer; ++o) {
        for (std::size_t i = 0; i < inner; ++i) {
          pb.grad[i] += self.grad[o * inner + i];
        }
      }
    }
  });
}

Tensor mul(const Tensor& a, const Tensor& b) {
  if (a.shape() != b.shape()) shape_mismatch("mul", a, b);
  auto out = make_output(a.shape(), {a.node(), b.node()});
  const auto& av = a.node()->values;
  const auto& bv = b.node()->values;
  for (std::size_t j = 0; j < av.size(); ++j) out->values[j] = av[j] * bv[j];
  return finish(std::move(out), [](Node& self) {
    Node& pa = *self.parents[0];
    Node& pb = *self.parents[1];
    for (std::size_t j = 0; j < self.grad.size(); ++j) {
      if (pa.requires_grad) pa.grad[j] += self.grad[j] * pb.values[j];
      if (pb.requires_grad) pb.grad[j] += self.grad[j] * pa.values[j];
    }
  });
}

Tensor scale(const Tensor& a, double factor) {
  auto out = make_output(a.shape(), {a.node()});
  const auto& av = a.node()->values;
  for (std::size_t j = 0; j < av.size(); ++j) out->values[j] = av[j] * factor;
  return finish(std::move(out), [factor](Node& self) {
    Node& pa = *self.parents[0];
    for (std::size_t j = 0; j < self.grad.size(); ++j) {
      pa.grad[j] += self.grad[j] * factor;
    }
  });
}

Tensor sum(const Tensor& a) {
  auto out = make_output({1}, {a.node()});
  double total = 0.0;
  for (double v : a.node()->values) total += v;
  out->values[0] = total;
  return finish(std::move(out), [](Node& self) {
    Node& pa = *self.parents[0];
    for (double& g : pa.grad) g += self.grad[0];
  });
}

Tensor mean(const Tensor& a) {
  return scale(sum(a), 1.0 / static_cast<double>(a.numel()));
}

Tensor mean_over_axis1(const Tensor& a) {
  if (a.rank() < 3) {
    throw DimensionError("mean_over_axis1 needs rank >= 3, got " +
                         shape_to_string(a.shape()));
  }
  const std::size_t batch = a.dim(0);
  const std::size_t steps = a.dim(1);
  const std::size_t inner = a.numel() / (batch * steps);
  Shape out_shape(a.shape().begin() + 2, a.shape().end());
  out_shape.insert(out_shape.begin(), batch);
  auto out = make_output(out_shape, {a.node()});
  const auto& av = a.node()->values;
  const double inv = 1.0 / static_cast<double>(steps);
  for (std::size_t b = 0; b < batch; ++b) {
    double* dst = out->values.data() + b * inner;
    for (std::size_t t = 0; t < steps; ++t) {
      const double* src = av.data() + (b * steps + t) * inner;
      for (std::size_t i = 0; i < inner; ++i) dst[i] += src[i];
    }
    for (std::size_t i = 0; i < inner; ++i) dst[i] *= inv;
  }
  return finish(std::move(out), [batch, steps, inner, inv](Node& self) {
    Node& pa = *self.parents[0];
    for (std::size_t b = 0; b < batch; ++b) {
      const double* g = self.grad.data() + b * inner;
      for (std::size_t t = 0; t < steps; ++t) {
        double* dst = pa.grad.data() + (b * steps + t) * inner;
        for (std::size_t i = 0; i < inner; ++i) dst[i] += g[i] * inv;
      }
    }
  });
}

Tensor reshape(const Tensor& a, Shape shape) {
  if (shape_numel(shape) != a.numel()) {
    throw DimensionError("reshape: cannot view " + shape_to_string(a.shape()) +
                         " as " + shape_to_string(shape));
  }
  auto out = make_output(std::move(shape), {a.node()});
  out->values = a.node()->values;
  return finish(std::move(out), [](Node& self) {
    Node& pa = *self.parents[0];
    for (std::size_t j = 0; j < self.grad.size(); ++j) pa.grad[j] += self.grad[j];
  });
}

Tensor swap_axes_1_2(const Tensor& a) {
  if (a.rank() != 4) {
    throw DimensionError("swap_axes_1_2 needs rank 4, got " +
                         shape_to_string(a.shape()));
  }
  const std::size_t d0 = a.dim(0), d1 = a.dim(1), d2 = a.dim(2), d3 = a.dim(3);
  auto out = make_output({d0, d2, d1, d3}, {a.node()});
  const auto& av = a.node()->values;
  for (std::size_t i = 0; i < d0; ++i) {
    for (std::size_t j = 0; j < d1; ++j) {
      for (std::size_t k = 0; k < d2; ++k) {
        const double* src = av.data() + ((i * d1 + j) * d2 + k) * d3;
        double* dst = out->values.data() + ((i * d2 + k) * d1 + j) * d3;
        std::copy(src, src + d3, dst);
      }
    }
  }
  return finish(std::move(out), [d0, d1, d2, d3](Node& self) {
    Node& pa = *self.parents[0];
    for (std::size_t i = 0; i < d0; ++i) {
      for (std::size_t j = 0; j < d1; ++j) {
        for (std::size_t k = 0; k < d2; ++k) {
          const double* g = self.grad.data() + ((i * d2 + k) * d1 + j) * d3;
          double* dst = pa.grad.data() + ((i * d1 + j) * d2 + k) * d3;
          for (std::size_t l = 0; l < d3; ++l) dst[l] += g[l];
        }
      }
    }
  });
}

Tensor slice_last(const Tensor& a, std::size_t offset, std::size_t length) {
  const std::size_t width = last_dim(a);
  if (length == 0 || offset + length > width) {
    throw DimensionError("slice_last: [" + std::to_string(offset) + ", " +
                         std::to_string(offset + length) + ") out of range for " +
                         shape_to_string(a.shape()));
  }
  const std::size_t rows = a.numel() / width;
  Shape out_shape = a.shape();
  out_shape.back() = length;
  auto out = make_output(out_shape, {a.node()});
  const auto& av = a.node()->values;
  for (std::size_t r = 0; r < rows; ++r) {
    std::copy_n(av.data() + r * width + offset, length,
                out->values.data() + r * length);
  }
  return finish(std::move(out), [rows, width, offset, length](Node& self) {
    Node& pa = *self.parents[0];
    for (std::size_t r = 0; r < rows; ++r) {
      for (std::size_t i = 0; i < length; ++i) {
        pa.grad[r * width + offset + i] += self.grad[r * length + i];
      }
    }
  });
}

Tensor softmax(const Tensor& a) {
  const std::size_t width = last_dim(a);
  const std::size_t rows = a.numel() / width;
  auto out = make_output(a.shape(), {a.node()});
  const auto& av = a.node()->values;
  for (std::size_t r = 0; r < rows; ++r) {
    auto x = cmap(av, 1, width, r * width).array();
    auto y = mmap(out->values, 1, width, r * width).array();
    y = (x - x.maxCoeff()).exp();
    y /= y.sum();
  }
  return finish(std::move(out), [rows, width](Node& self) {
    Node& pa = *self.parents[0];
    for (std::size_t r = 0; r < rows; ++r) {
      auto y = cmap(self.values, 1, width, r * width).array();
      auto g = cmap(self.grad, 1, width, r * width).array();
      const double dot = (g * y).sum();
      mmap(pa.grad, 1, width, r * width).array() += y * (g - dot);
    }
  });
}

Tensor layer_norm(const Tensor& x, const Tensor& gamma, const Tensor& beta,
                  double eps) {
  const std::size_t width = last_dim(x);
  if (gamma.shape() != Shape{width} || beta.shape() != Shape{width}) {
    throw DimensionError("layer_norm: gamma/beta must be [" +
                         std::to_string(width) + "], got " +
                         shape_to_string(gamma.shape()) + " and " +
                         shape_to_string(beta.shape()));
  }
  const std::size_t rows = x.numel() / width;
  auto out = make_output(x.shape(), {x.node(), gamma.node(), beta.node()});
  detail::Buffer normalized(x.numel());
  detail::Buffer inv_std(rows);
  const auto& xv = x.node()->values;
  const auto& gv = gamma.node()->values;
  const auto& bv = beta.node()->values;
  const double inv_width = 1.0 / static_cast<double>(width);
  for (std::size_t r = 0; r < rows; ++r) {
    const double* src = xv.data() + r * width;
    double mu = 0.0;
    for (std::size_t i = 0; i < width; ++i) mu += src[i];
    mu *= inv_width;
    double var = 0.0;
    for (std::size_t i = 0; i < width; ++i) var += (src[i] - mu) * (src[i] - mu);
    var *= inv_width;
    const double inv = 1.0 / std::sqrt(var + eps);
    inv_std[r] = inv;
    double* xhat = normalized.data() + r * width;
    double* y = out->values.data() + r * width;
    for (std::size_t i = 0; i < width; ++i) {
      xhat[i] = (src[i] - mu) * inv;
      y[i] = gv[i] * xhat[i] + bv[i];
    }
  }
  if (!out->requires_grad) return Tensor(std::move(out));
  return finish(std::move(out), [rows, width, inv_width,
                                 normalized = std::move(normalized),
                                 inv_std = std::move(inv_std)](Node& self) {
    Node& px = *self.parents[0];
    Node& pg = *self.parents[1];
    Node& pb = *self.parents[2];
    detail::Buffer dxhat(width);
    for (std::size_t r = 0; r < rows; ++r) {
      const double* g = self.grad.data() + r * width;
      const double* xhat = normalized.data() + r * width;
      double sum_dxhat = 0.0;
      double sum_dxhat_xhat = 0.0;
      for (std::size_t i = 0; i < width; ++i) {
        if (pg.requires_grad) pg.grad[i] += g[i] * xhat[i];
        if (pb.requires_grad) pb.grad[i] += g[i];
        dxhat[i] = g[i] * pg.values[i];
        sum_dxhat += dxhat[i];
        sum_dxhat_xhat += dxhat[i] * xhat[i];
      }
      if (!px.requires_grad) continue;
      double* dst = px.grad.data() + r * width;
      for (std::size_t i = 0; i < width; ++i) {
        dst[i] += inv_std[r] *
                  (dxhat[i] - inv_width * sum_dxhat - xhat[i] * inv_width * sum_dxhat_xhat);
      }
    }
  });
}

Tensor gelu(const Tensor& a) {
  auto out = make_output(a.shape(), {a.node()});
  const auto& av = a.node()->values;
  constexpr double kInvSqrt2 = 1.0 / std::numbers::sqrt2;
  constexpr double kInvSqrt2Pi = 0.5 * std::numbers::inv_sqrtpi * std::numbers::sqrt2;
  // d/dx [x Phi(x)] = Phi(x) + x phi(x), kept from the forward pass.
  detail::Buffer slope(out->requires_grad ? av.size() : 0);
  for (std::size_t j = 0; j < av.size(); ++j) {
    const double x = av[j];
    const double cdf = 0.5 * (1.0 + std::erf(x * kInvSqrt2));
    out->values[j] = x * cdf;
    if (!slope.empty()) slope[j] = cdf + x * kInvSqrt2Pi * std::exp(-0.5 * x * x);
  }
  return finish(std::move(out), [slope = std::move(slope)](Node& self) {
    Node& pa = *self.parents[0];
    for (std::size_t j = 0; j < self.grad.size(); ++j) pa.grad[j] += self.grad[j] * slope[j];
  });
}

Tensor relu(const Tensor& a) {
  auto out = make_output(a.shape(), {a.node()});
  const auto& av = a.node()->values;
  for (std::size_t j = 0; j < av.size(); ++j) out->values[j] = std::max(av[j], 0.0);
  return finish(std::move(out), [](Node& self) {
    Node& pa = *self.parents[0];
    for (std::size_t j = 0; j < self.grad.size(); ++j) {
      if (pa.values[j] > 0.0) pa.grad[j] += self.grad[j];
    }
  });
}

Tensor dropout(const Tensor& a, double p, std::mt19937_64& rng) {
  if (p < 0.0 || p >= 1.0) {
    throw ContractError("dropout probability must be in [0, 1), got " +
                        std::to_string(p));
  }
  if (p == 0.0) return a;
  const double keep_scale = 1.0 / (1.0 - p);
  // Uniform in [0, 1) from the top 53 bits of each draw.
  const double keep_prob = 1.0 - p;
  detail::Buffer mask(a.numel());
  for (double& m : mask) {
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    m = u < keep_prob ? keep_scale : 0.0;
  }
  auto out = make_output(a.shape(), {a.node()});
  const auto& av = a.node()->values;
  for (std::size_t j = 0; j < av.size(); ++j) out->values[j] = av[j] * mask[j];
  return finish(std::move(out), [mask = std::move(mask)](Node& self) {
    Node& pa = *self.parents[0];
    for (std::size_t j = 0; j < self.grad.size(); ++j) {
      pa.grad[j] += self.grad[j] * mask[j];
    }
  });
}

}  // namespace detect::core
