#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>
#include <cmath>

#include "kmm/error.hpp"
#include "kmm/kernels.hpp"
#include "oracles.hpp"

using namespace kmm;

namespace {

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

}  // namespace

TEST(KernelEval, ImqAtCoincidentPointsIsOneOverC) {
  const Vector x = vec({0.3, -1.2, 4.0});
  EXPECT_NEAR(kernel_eval(KernelSpec::imq(10.0), x, x), 0.1, 1e-15);
}

TEST(KernelEval, GaussianAtCoincidentPointsIsOne) {
  const Vector x = vec({7.0, -2.0});
  EXPECT_EQ(kernel_eval(KernelSpec::gaussian(0.37), x, x), 1.0);
}

TEST(KernelEval, ImqKnownValue) {
  EXPECT_NEAR(kernel_eval(KernelSpec::imq(1.0), vec({0, 0}), vec({3, 4})), 1.0 / std::sqrt(26.0), 1e-15);
  EXPECT_NEAR(kernel_eval(KernelSpec::imq(1.0), vec({0, 0}), vec({3, 4})), 0.196116, 1e-6);
}

TEST(KernelEval, LinearIsDotProduct) {
  EXPECT_EQ(kernel_eval(KernelSpec::linear(), vec({1, 2}), vec({3, -1})), 1.0);
}

TEST(KernelEval, DiagonalValues) {
  const Vector x = vec({1.5, -2.0, 0.5});
  EXPECT_NEAR(kernel_eval(KernelSpec::linear(), x, x), x.squaredNorm(), 1e-15);
  EXPECT_NEAR(kernel_eval(KernelSpec::imq(2.5), x, x), 0.4, 1e-15);
}

TEST(KernelEval, ValuesLieInDocumentedRanges) {
  const Matrix P = oracle::random_matrix(30, 3, 11, -5, 5);
  for (int i = 0; i < P.rows(); ++i) {
    for (int j = 0; j < P.rows(); ++j) {
      const double g = kernel_eval(KernelSpec::gaussian(1.3), P.row(i), P.row(j));
      const double q = kernel_eval(KernelSpec::imq(2.0), P.row(i), P.row(j));
      EXPECT_GT(g, 0.0);
      EXPECT_LE(g, 1.0);
      EXPECT_GT(q, 0.0);
      EXPECT_LE(q, 0.5);
    }
  }
}

TEST(KernelEval, RejectsBadInput) {
  EXPECT_THROW(kernel_eval(KernelSpec::linear(), vec({1, 2}), vec({1})), InvalidArgument);
  EXPECT_THROW(kernel_eval(KernelSpec::gaussian(0.0), vec({1}), vec({1})), InvalidArgument);
  EXPECT_THROW(kernel_eval(KernelSpec::imq(-1.0), vec({1}), vec({1})), InvalidArgument);
}

TEST(KernelEval, SymmetricExactly) {
  for (int s = 0; s < 20; ++s) {
    const Matrix P = oracle::random_matrix(2, 4, 100 + s, -3, 3);
    for (const auto& k : {KernelSpec::linear(), KernelSpec::gaussian(0.8), KernelSpec::imq(1.5)}) {
      EXPECT_EQ(kernel_eval(k, P.row(0), P.row(1)), kernel_eval(k, P.row(1), P.row(0)));
    }
  }
}

TEST(KernelEval, GaussianBandwidthScaling) {
  for (int s = 0; s < 20; ++s) {
    const Matrix P = oracle::random_matrix(2, 3, 200 + s, -2, 2);
    const double t = 0.5 + s * 0.3;
    const double sigma = 1.7;
    const Matrix Q = t * P;
    EXPECT_NEAR(kernel_eval(KernelSpec::gaussian(sigma), Q.row(0), Q.row(1)),
                kernel_eval(KernelSpec::gaussian(sigma / t), P.row(0), P.row(1)), 1e-12);
  }
}

TEST(Gram, SelfGramIsSymmetricWithUnitDiagonal) {
  const Matrix A = (Matrix(3, 2) << 0, 0, 1, 0, 0, 2).finished();
  const Matrix G = gram(KernelSpec::gaussian(1.0), A, A);
  ASSERT_EQ(G.rows(), 3);
  ASSERT_EQ(G.cols(), 3);
  for (int i = 0; i < 3; ++i) {
    EXPECT_EQ(G(i, i), 1.0);
    for (int j = 0; j < 3; ++j) EXPECT_NEAR(G(i, j), G(j, i), 1e-12);
  }
}

TEST(Gram, SinglePointMatchesKernelEval) {
  const Matrix A = (Matrix(1, 2) << 1, 2).finished();
  const Matrix B = (Matrix(1, 2) << -1, 0.5).finished();
  const KernelSpec k = KernelSpec::imq(3.0);
  EXPECT_EQ(gram(k, A, B)(0, 0), kernel_eval(k, A.row(0), B.row(0)));
}

TEST(Gram, MatchesDoubleLoopOracle) {
  const Matrix A = oracle::random_matrix(5, 2, 1);
  const Matrix B = oracle::random_matrix(4, 2, 2);
  const KernelSpec k = KernelSpec::imq(1.0);
  const Matrix G = gram(k, A, B);
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 4; ++j) EXPECT_NEAR(G(i, j), oracle::kernel(k, A, i, B, j), 1e-14);
}

TEST(Gram, RejectsDimensionMismatch) {
  EXPECT_THROW(gram(KernelSpec::linear(), Matrix::Zero(2, 3), Matrix::Zero(2, 2)), InvalidArgument);
}

TEST(Gram, PositiveSemidefinite) {
  for (int s = 0; s < 20; ++s) {
    const int n = 2 + s % 19;
    const Matrix A = oracle::random_matrix(n, 3, 300 + s, -2, 2);
    for (const auto& k : {KernelSpec::gaussian(0.7), KernelSpec::imq(1.0), KernelSpec::imq(10.0)}) {
      const Matrix G = gram(k, A, A);
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(G);
      const auto ev = es.eigenvalues();
      EXPECT_GE(ev.minCoeff(), -1e-8 * ev.maxCoeff());
    }
  }
}

TEST(KernelGrad, VanishesAtCoincidentPointsForRadialKernels) {
  const Vector a = vec({0.4, -0.9});
  EXPECT_TRUE(kernel_grad_second_arg(KernelSpec::gaussian(1.0), a, a).isZero(0.0));
  EXPECT_TRUE(kernel_grad_second_arg(KernelSpec::imq(1.0), a, a).isZero(0.0));
}

TEST(KernelGrad, LinearGradientIsFirstArgument) {
  const Vector a = vec({1, 2});
  EXPECT_EQ(kernel_grad_second_arg(KernelSpec::linear(), a, vec({-7, 3})), a);
}

TEST(KernelGrad, ImqOneDimensionalFiniteDifference) {
  const KernelSpec k = KernelSpec::imq(1.0);
  const Vector a = vec({0.0});
  const double h = 1e-6;
  const double fd = (kernel_eval(k, a, vec({1.0 + h})) - kernel_eval(k, a, vec({1.0 - h}))) / (2 * h);
  const double an = kernel_grad_second_arg(k, a, vec({1.0}))(0);
  EXPECT_LT(std::abs(an - fd) / std::abs(fd), 1e-6);
  // Closed form: -(1 + 1)^{-3/2}.
  EXPECT_NEAR(an, -std::pow(2.0, -1.5), 1e-15);
}

TEST(KernelGrad, MatchesCentralDifferencesOnRandomInstances) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> param(0.3, 3.0);
  for (int s = 0; s < 100; ++s) {
    const int d = 1 + s % 5;
    const Matrix P = oracle::random_matrix(2, d, 400 + s, -2, 2);
    KernelSpec k;
    switch (s % 3) {
      case 0: k = KernelSpec::linear(); break;
      case 1: k = KernelSpec::gaussian(param(rng)); break;
      default: k = KernelSpec::imq(param(rng)); break;
    }
    const Vector a = P.row(0).transpose();
    const Matrix b = P.row(1);
    const Matrix fd = oracle::numeric_gradient(
        [&](const Matrix& B) { return kernel_eval(k, a, B.row(0)); }, b, 1e-5);
    const Matrix an = kernel_grad_second_arg(k, a, b.row(0)).transpose();
    EXPECT_LT(oracle::rel_error(an, fd), 1e-5) << "instance " << s;
  }
}

TEST(KernelGrad, AccumulateAddsScaledGradient) {
  const KernelSpec k = KernelSpec::gaussian(0.9);
  const Vector a = vec({0.1, 0.2}), b = vec({-0.3, 0.5});
  Vector out = vec({1.0, -1.0});
  accumulate_kernel_grad(k, a, b, 2.5, out);
  const Vector expected = vec({1.0, -1.0}) + 2.5 * kernel_grad_second_arg(k, a, b);
  EXPECT_NEAR((out - expected).cwiseAbs().maxCoeff(), 0.0, 1e-15);
}

TEST(MedianHeuristic, SinglePair) {
  EXPECT_EQ(median_heuristic((Matrix(2, 1) << 0, 1).finished()), 1.0);
}

TEST(MedianHeuristic, ThreePoints) {
  EXPECT_EQ(median_heuristic((Matrix(3, 1) << 0, 1, 3).finished()), 2.0);
}

TEST(MedianHeuristic, EvenCountUsesLowerMedian) {
  // Pairs: 1, 3, 6, 2, 5, 3 -> sorted 1 2 3 3 5 6 -> lower median 3.
  EXPECT_EQ(median_heuristic((Matrix(4, 1) << 0, 1, 3, 6).finished()), 3.0);
  // Pairs: 1,2,4,1,3,2 -> sorted 1 1 2 2 3 4; lower median 2.
  EXPECT_EQ(median_heuristic((Matrix(4, 1) << 0, 1, 2, 4).finished()), 2.0);
}

TEST(MedianHeuristic, MatchesSortOracleExactly) {
  const Matrix P = oracle::random_matrix(50, 2, 99, 0, 1);
  EXPECT_EQ(median_heuristic(P), oracle::median_pairwise(P));
}

TEST(MedianHeuristic, Errors) {
  EXPECT_THROW(median_heuristic(Matrix::Zero(1, 2)), InvalidArgument);
  EXPECT_THROW(median_heuristic(Matrix::Ones(4, 2)), InvalidArgument);
}

TEST(KernelSpec, NamesRoundTrip) {
  for (auto kind : {KernelKind::Linear, KernelKind::Gaussian, KernelKind::Imq}) {
    EXPECT_EQ(kernel_kind_from_string(to_string(kind)), kind);
  }
  EXPECT_THROW(kernel_kind_from_string("rbf"), InvalidArgument);
}
