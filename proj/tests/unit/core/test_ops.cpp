#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "detect/core/errors.hpp"
#include "detect/core/ops.hpp"
#include "gradcheck.hpp"

namespace detect::core {
namespace {

using testing::random_tensor;

void expect_values(const Tensor& t, std::vector<double> expected, double tol = 0.0) {
  ASSERT_EQ(t.values().size(), expected.size());
  for (std::size_t i = 0; i < expected.size(); ++i) {
    EXPECT_NEAR(t.values()[i], expected[i], tol) << "element " << i;
  }
}

TEST(Matmul, IdentityLeavesMatrixUnchanged) {
  auto eye = Tensor::from_values({2, 2}, {1, 0, 0, 1});
  auto m = Tensor::from_values({2, 2}, {1, 2, 3, 4});
  expect_values(matmul(eye, m), {1, 2, 3, 4});
}

TEST(Matmul, ProjectorKeepsFirstRow) {
  auto p = Tensor::from_values({2, 2}, {1, 0, 0, 0});
  auto v = Tensor::from_values({2, 1}, {5, 7});
  expect_values(matmul(p, v), {5, 0});
}

TEST(Matmul, MatchesTripleLoop) {
  std::mt19937_64 rng(7);
  auto a = random_tensor({3, 4}, rng);
  auto b = random_tensor({4, 2}, rng);
  auto c = matmul(a, b);
  ASSERT_EQ(c.shape(), (Shape{3, 2}));
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 2; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < 4; ++k) s += a.values()[i * 4 + k] * b.values()[k * 2 + j];
      EXPECT_NEAR(c.values()[i * 2 + j], s, 1e-12);
    }
  }
}

TEST(Matmul, ShapeMismatchNamesBothShapes) {
  auto a = Tensor::zeros({2, 3});
  auto b = Tensor::zeros({4, 2});
  try {
    matmul(a, b);
    FAIL() << "expected DimensionError";
  } catch (const DimensionError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("[2x3]"), std::string::npos) << msg;
    EXPECT_NE(msg.find("[4x2]"), std::string::npos) << msg;
  }
}

TEST(Linear, EqualsMatmulPlusBias) {
  std::mt19937_64 rng(3);
  auto x = random_tensor({2, 3, 4}, rng);
  auto w = random_tensor({4, 5}, rng);
  auto b = random_tensor({5}, rng);
  auto fused = linear(x, w, b);
  auto ref = add(matmul(x, w), b);
  expect_values(fused, std::vector<double>(ref.values().begin(), ref.values().end()), 1e-12);
}

TEST(BatchedMatmul, TransposedMatchesExplicitTranspose) {
  std::mt19937_64 rng(5);
  auto a = random_tensor({2, 3, 4}, rng);
  auto b = random_tensor({2, 5, 4}, rng);
  auto c = batched_matmul(a, b, true, 2.0);
  ASSERT_EQ(c.shape(), (Shape{2, 3, 5}));
  for (std::size_t n = 0; n < 2; ++n) {
    for (std::size_t i = 0; i < 3; ++i) {
      for (std::size_t j = 0; j < 5; ++j) {
        double s = 0.0;
        for (std::size_t k = 0; k < 4; ++k) {
          s += a.values()[(n * 3 + i) * 4 + k] * b.values()[(n * 5 + j) * 4 + k];
        }
        EXPECT_NEAR(c.values()[(n * 3 + i) * 5 + j], 2.0 * s, 1e-12);
      }
    }
  }
}

TEST(Heads, MergeInvertsSplit) {
  std::mt19937_64 rng(11);
  auto x = random_tensor({2, 3, 8}, rng);
  auto merged = merge_heads(split_heads(x, 0, 2, 4), 2);
  expect_values(merged, std::vector<double>(x.values().begin(), x.values().end()));
}

TEST(Heads, SplitLayout) {
  // x[b, t, offset + h * hd + d] -> out[b * heads + h, t, d]
  std::vector<double> v(1 * 2 * 6);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = static_cast<double>(i);
  auto x = Tensor::from_values({1, 2, 6}, v);
  auto s = split_heads(x, 2, 2, 2);
  ASSERT_EQ(s.shape(), (Shape{2, 2, 2}));
  expect_values(s, {2, 3, 8, 9, 4, 5, 10, 11});
}

TEST(Softmax, UniformInput) {
  auto p = softmax(Tensor::from_values({1, 3}, {0, 0, 0}));
  expect_values(p, {1.0 / 3, 1.0 / 3, 1.0 / 3}, 1e-15);
}

TEST(Softmax, ShiftInvariant) {
  std::mt19937_64 rng(2);
  auto x = random_tensor({4, 5}, rng);
  std::vector<double> shifted(x.values().begin(), x.values().end());
  for (double& v : shifted) v += 123.25;
  auto a = softmax(x);
  auto b = softmax(Tensor::from_values({4, 5}, shifted));
  expect_values(b, std::vector<double>(a.values().begin(), a.values().end()), 1e-14);
}

TEST(Softmax, LargeLogitsDoNotOverflow) {
  auto p = softmax(Tensor::from_values({1, 2}, {1000, 0}));
  EXPECT_EQ(p.values()[0], 1.0);
  // exp(-1000) is below the smallest subnormal double.
  EXPECT_EQ(p.values()[1], 0.0);
}

TEST(Softmax, RowsSumToOne) {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 20; ++trial) {
    auto p = softmax(random_tensor({6, 7}, rng, 10.0));
    for (std::size_t r = 0; r < 6; ++r) {
      double s = 0.0;
      for (std::size_t c = 0; c < 7; ++c) {
        const double v = p.values()[r * 7 + c];
        EXPECT_GE(v, 0.0);
        s += v;
      }
      EXPECT_NEAR(s, 1.0, 1e-12);
    }
  }
}

TEST(LayerNorm, ZeroMeanUnitVariance) {
  std::mt19937_64 rng(4);
  auto x = random_tensor({3, 5, 16}, rng, 3.0);
  auto y = layer_norm(x, Tensor::full({16}, 1.0), Tensor::zeros({16}), 1e-8);
  for (std::size_t r = 0; r < 15; ++r) {
    double m = 0, v = 0;
    for (std::size_t c = 0; c < 16; ++c) m += y.values()[r * 16 + c];
    m /= 16;
    for (std::size_t c = 0; c < 16; ++c) {
      v += (y.values()[r * 16 + c] - m) * (y.values()[r * 16 + c] - m);
    }
    v /= 16;
    EXPECT_NEAR(m, 0.0, 1e-12);
    EXPECT_NEAR(v, 1.0, 1e-6);
  }
}

TEST(Gelu, KnownValues) {
  auto y = gelu(Tensor::from_values({3}, {0.0, 1.0, -1.0}));
  expect_values(y, {0.0, 0.8413447460685429, -0.15865525393145707}, 1e-15);
}

TEST(Relu, ClampsNegatives) {
  expect_values(relu(Tensor::from_values({3}, {-1, 0, 2})), {0, 0, 2});
}

TEST(Dropout, ZeroProbabilityIsIdentity) {
  std::mt19937_64 rng(1);
  auto x = Tensor::from_values({3}, {1, 2, 3});
  expect_values(dropout(x, 0.0, rng), {1, 2, 3});
}

TEST(Dropout, KeepsExpectationAndScalesSurvivors) {
  std::mt19937_64 rng(1);
  auto x = Tensor::full({20000}, 1.0);
  auto y = dropout(x, 0.25, rng);
  double total = 0.0;
  std::size_t zeros = 0;
  for (double v : y.values()) {
    if (v == 0.0) {
      ++zeros;
    } else {
      EXPECT_DOUBLE_EQ(v, 1.0 / 0.75);
    }
    total += v;
  }
  EXPECT_NEAR(static_cast<double>(zeros) / 20000.0, 0.25, 0.015);
  EXPECT_NEAR(total / 20000.0, 1.0, 0.02);
}

TEST(Dropout, RejectsInvalidProbability) {
  std::mt19937_64 rng(1);
  EXPECT_THROW(dropout(Tensor::zeros({2}), 1.0, rng), ContractError);
  EXPECT_THROW(dropout(Tensor::zeros({2}), -0.1, rng), ContractError);
}

TEST(Add, BroadcastsTrailingSuffix) {
  auto a = Tensor::from_values({2, 2}, {1, 2, 3, 4});
  auto b = Tensor::from_values({2}, {10, 20});
  expect_values(add(a, b), {11, 22, 13, 24});
  EXPECT_THROW(add(a, Tensor::zeros({3})), DimensionError);
}

TEST(MeanOverAxis1, AveragesPositions) {
  auto x = Tensor::from_values({1, 2, 2}, {1, 2, 3, 6});
  expect_values(mean_over_axis1(x), {2, 4});
}

TEST(SwapAxes, MovesElements) {
  std::vector<double> v(2 * 3 * 4 * 1);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = static_cast<double>(i);
  auto y = swap_axes_1_2(Tensor::from_values({2, 3, 4, 1}, v));
  ASSERT_EQ(y.shape(), (Shape{2, 4, 3, 1}));
  // y[a, c, b] = x[a, b, c]
  EXPECT_DOUBLE_EQ(y.values()[(0 * 4 + 1) * 3 + 2], v[(0 * 3 + 2) * 4 + 1]);
  EXPECT_DOUBLE_EQ(y.values()[(1 * 4 + 3) * 3 + 0], v[(1 * 3 + 0) * 4 + 3]);
}

TEST(SliceLast, TakesColumns) {
  auto x = Tensor::from_values({2, 3}, {1, 2, 3, 4, 5, 6});
  expect_values(slice_last(x, 1, 2), {2, 3, 5, 6});
  EXPECT_THROW(slice_last(x, 2, 2), DimensionError);
}

TEST(Reshape, RejectsDifferentSize) {
  EXPECT_THROW(reshape(Tensor::zeros({2, 3}), {4}), DimensionError);
}

}  // namespace
}  // namespace detect::core
