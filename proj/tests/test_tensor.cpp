#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "dsts/error.hpp"
#include "dsts/finite_diff.hpp"
#include "dsts/rng.hpp"
#include "dsts/tensor.hpp"
#include "oracles.hpp"

namespace dsts {
namespace {

using testing::random_tensor;

TEST(Tensor, CreateFillsEveryElement) {
  EXPECT_EQ(tensor_create({2, 2}, 0.0), Tensor::matrix({{0, 0}, {0, 0}}));
  const Tensor t = tensor_create({3}, 1.5);
  EXPECT_EQ(t.shape(), (Shape{3}));
  for (double v : t.data()) EXPECT_EQ(v, 1.5);
}

TEST(Tensor, EmptyAxisGivesZeroElements) {
  const Tensor t = tensor_create({2, 0}, 7.0);
  EXPECT_EQ(t.size(), 0u);
  EXPECT_EQ(t.rank(), 2u);
}

TEST(Tensor, RankZeroHoldsOneElement) {
  EXPECT_EQ(Tensor::scalar(3.0).size(), 1u);
  EXPECT_EQ(Tensor::scalar(3.0)[0], 3.0);
}

TEST(Tensor, DataLengthMustMatchShape) {
  EXPECT_THROW(Tensor(Shape{2, 3}, std::vector<double>(5, 0.0)), ShapeError);
}

TEST(Tensor, RowMajorSetThenGet) {
  Tensor t({2, 3, 4}, 0.0);
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 3; ++j)
      for (std::size_t k = 0; k < 4; ++k) t.at({i, j, k}) = static_cast<double>(100 * i + 10 * j + k);
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 3; ++j)
      for (std::size_t k = 0; k < 4; ++k) {
        EXPECT_EQ(t.at({i, j, k}), static_cast<double>(100 * i + 10 * j + k));
        EXPECT_EQ(t[(i * 3 + j) * 4 + k], t.at({i, j, k}));
      }
  EXPECT_THROW(t.at({2, 0, 0}), ShapeError);
  EXPECT_THROW(t.at({0, 0}), ShapeError);
}

TEST(Matmul, IdentityLeavesOperandUnchanged) {
  Rng rng(3);
  const Tensor b = random_tensor({2, 5}, rng);
  EXPECT_EQ(matmul(Tensor::matrix({{1, 0}, {0, 1}}), b), b);
}

TEST(Matmul, HandExample) {
  EXPECT_EQ(matmul(Tensor::matrix({{1, 2}, {3, 4}}), Tensor::matrix({{5}, {6}})), Tensor::matrix({{17}, {39}}));
}

TEST(Matmul, MismatchNamesBothShapes) {
  try {
    matmul(Tensor({2, 3}), Tensor({2, 2}));
    FAIL() << "expected ShapeError";
  } catch (const ShapeError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("[2,3]"), std::string::npos) << msg;
    EXPECT_NE(msg.find("[2,2]"), std::string::npos) << msg;
  }
}

TEST(Matmul, Associative) {
  Rng rng(11);
  for (int rep = 0; rep < 20; ++rep) {
    const std::size_t m = 1 + rng.index(5), k = 1 + rng.index(5), n = 1 + rng.index(5), p = 1 + rng.index(5);
    const Tensor a = random_tensor({m, k}, rng), b = random_tensor({k, n}, rng), c = random_tensor({n, p}, rng);
    const Tensor lhs = matmul(matmul(a, b), c);
    const Tensor rhs = matmul(a, matmul(b, c));
    for (std::size_t i = 0; i < lhs.size(); ++i) {
      EXPECT_NEAR(lhs[i], rhs[i], 1e-9 * std::max(1.0, std::abs(rhs[i])));
    }
  }
}

TEST(Transpose, SwapsAxes) {
  EXPECT_EQ(transpose(Tensor::matrix({{1, 2, 3}, {4, 5, 6}})), Tensor::matrix({{1, 4}, {2, 5}, {3, 6}}));
}

TEST(Reduce, MaxOverTime) {
  const Tensor r = reduce(Tensor::matrix({{1, 5, 3}, {2, 2, 2}}), 1, ReduceKind::Max);
  EXPECT_EQ(r, Tensor(Shape{2}, std::vector<double>{5, 2}));
}

TEST(Reduce, SumAndMean) {
  const Tensor v(Shape{3}, std::vector<double>{1, 2, 3});
  EXPECT_EQ(reduce(v, 0, ReduceKind::Sum)[0], 6.0);
  EXPECT_EQ(reduce(v, 0, ReduceKind::Mean)[0], 2.0);
  EXPECT_EQ(reduce(Tensor::matrix({{1, 2}, {3, 4}}), 0, ReduceKind::Sum), Tensor(Shape{2}, std::vector<double>{4, 6}));
}

TEST(Reduce, EmptyAxis) {
  EXPECT_THROW(reduce(Tensor({2, 0}), 1, ReduceKind::Mean), DegenerateInputError);
  EXPECT_THROW(reduce(Tensor({2, 0}), 1, ReduceKind::Max), DegenerateInputError);
  EXPECT_EQ(reduce(Tensor({2, 0}), 1, ReduceKind::Sum), Tensor(Shape{2}, 0.0));
  EXPECT_THROW(reduce(Tensor({2, 2}), 2, ReduceKind::Sum), ShapeError);
}

TEST(Reduce, MaxIsPermutationInvariant) {
  Rng rng(5);
  Tensor x = random_tensor({3, 9}, rng);
  const Tensor expected = reduce(x, 1, ReduceKind::Max);
  for (int rep = 0; rep < 10; ++rep) {
    for (std::size_t row = 0; row < 3; ++row) rng.shuffle(x.data().subspan(row * 9, 9));
    EXPECT_EQ(reduce(x, 1, ReduceKind::Max), expected);
  }
}

TEST(Elementwise, ArithmeticAndShapes) {
  const Tensor a = Tensor::matrix({{1, 2}, {3, 4}});
  const Tensor b = Tensor::matrix({{10, 20}, {30, 40}});
  EXPECT_EQ(a + b, Tensor::matrix({{11, 22}, {33, 44}}));
  EXPECT_EQ(b - a, Tensor::matrix({{9, 18}, {27, 36}}));
  EXPECT_EQ(2.0 * a, Tensor::matrix({{2, 4}, {6, 8}}));
  EXPECT_EQ(a + 1.0, Tensor::matrix({{2, 3}, {4, 5}}));
  EXPECT_EQ(hadamard(a, b), Tensor::matrix({{10, 40}, {90, 160}}));
  EXPECT_EQ(sum(a), 10.0);
  EXPECT_EQ(inner(a, b), 300.0);
  EXPECT_THROW(a + Tensor({4}), ShapeError);
}

TEST(Rng, EqualSeedsGiveEqualStreams) {
  Rng a(1234), b(1234);
  for (int i = 0; i < 10000; ++i) ASSERT_EQ(a.next_u64(), b.next_u64());
}

TEST(Rng, DifferentSeedsDiffer) {
  for (std::uint64_t s = 0; s < 50; ++s) {
    Rng a(s), b(s + 1);
    bool differ = false;
    for (int i = 0; i < 100 && !differ; ++i) differ = a.next_u64() != b.next_u64();
    EXPECT_TRUE(differ) << "seed " << s;
  }
}

TEST(Rng, KnownSplitMixOutput) {
  // Published first outputs of SplitMix64 seeded with 0.
  Rng r(0);
  EXPECT_EQ(r.next_u64(), 0xE220A8397B1DCDAFULL);
  EXPECT_EQ(r.next_u64(), 0x6E789E6AA1B965F4ULL);
  EXPECT_EQ(r.next_u64(), 0x06C45D188009454FULL);
}

TEST(Rng, UniformAndIndexRanges) {
  Rng r(9);
  std::vector<int> hist(7, 0);
  double mean = 0.0;
  const int n = 70000;
  for (int i = 0; i < n; ++i) {
    const double u = r.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    mean += u / n;
    const std::size_t k = r.index(7);
    ASSERT_LT(k, 7u);
    ++hist[k];
  }
  EXPECT_NEAR(mean, 0.5, 0.01);
  for (int h : hist) EXPECT_NEAR(h, n / 7, 400);
}

TEST(Rng, NormalMoments) {
  Rng r(21);
  const int n = 100000;
  double m = 0.0, m2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double z = r.normal();
    ASSERT_TRUE(std::isfinite(z));
    m += z;
    m2 += z * z;
  }
  m /= n;
  EXPECT_NEAR(m, 0.0, 0.02);
  EXPECT_NEAR(m2 / n - m * m, 1.0, 0.02);
}

TEST(Rng, DerivedStreamsAreIndependentOfDrawCount) {
  Rng a(77);
  const Rng fresh = a.derive(3);
  a.next_u64();
  Rng after = a.derive(3);
  Rng before = fresh;
  EXPECT_EQ(after.next_u64(), before.next_u64());
  EXPECT_NE(Rng(77).derive(3).next_u64(), Rng(77).derive(4).next_u64());
}

TEST(Rng, ShuffleIsAPermutation) {
  Rng r(4);
  std::vector<int> v(50);
  for (int i = 0; i < 50; ++i) v[i] = i;
  r.shuffle(std::span<int>(v));
  std::vector<int> sorted = v;
  std::sort(sorted.begin(), sorted.end());
  for (int i = 0; i < 50; ++i) EXPECT_EQ(sorted[i], i);
  EXPECT_FALSE(std::is_sorted(v.begin(), v.end()));
}

TEST(FiniteDiff, SumOfSquares) {
  const Tensor x(Shape{2}, std::vector<double>{1, 2});
  const Tensor g = finite_diff_grad([](const Tensor& v) { return inner(v, v); }, x, 1e-5);
  EXPECT_NEAR(g[0], 2.0, 1e-6);
  EXPECT_NEAR(g[1], 4.0, 1e-6);
}

TEST(FiniteDiff, ConstantFunction) {
  Rng rng(1);
  const Tensor g = finite_diff_grad([](const Tensor&) { return 3.25; }, random_tensor({3, 4}, rng), 1e-5);
  for (double v : g.data()) EXPECT_NEAR(v, 0.0, 1e-9);
}

TEST(FiniteDiff, Errors) {
  const Tensor x(Shape{2}, 1.0);
  EXPECT_THROW(finite_diff_grad([](const Tensor&) { return 0.0; }, x, 0.0), ConfigError);
  EXPECT_THROW(finite_diff_grad([](const Tensor& v) { return v[0] > 1.0 ? NAN : 0.0; }, x, 1e-5), NumericError);
}

TEST(FiniteDiff, RelativeErrorIsScaledByTensorMagnitude) {
  const Tensor a(Shape{3}, std::vector<double>{1.0, 0.0, -2.0});
  const Tensor n(Shape{3}, std::vector<double>{1.0, 1e-9, -2.0});
  EXPECT_NEAR(max_relative_error(a, n), 1e-9 / (2.0 + 1e-8), 1e-20);
  EXPECT_EQ(max_relative_error(a, a), 0.0);
  EXPECT_THROW(max_relative_error(a, Tensor({2})), ShapeError);
}

}  // namespace
}  // namespace dsts
