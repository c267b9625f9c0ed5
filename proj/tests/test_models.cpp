#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "kmm/error.hpp"
#include "kmm/models.hpp"
#include "oracles.hpp"

using namespace kmm;

namespace {

Matrix row(std::initializer_list<double> v) {
  Matrix out(1, static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out(0, i++) = x;
  return out;
}

// Jacobian-transpose product by central differences of a vector function.
template <typename F>
Vector fd_vjp(F f, Vector x, const Vector& cotangent, double h = 1e-6) {
  Vector out(x.size());
  for (Eigen::Index k = 0; k < x.size(); ++k) {
    const double x0 = x(k);
    x(k) = x0 + h;
    const Vector up = f(x);
    x(k) = x0 - h;
    const Vector down = f(x);
    x(k) = x0;
    out(k) = cotangent.dot(up - down) / (2 * h);
  }
  return out;
}

}  // namespace

TEST(Generator, IdentityReturnsInput) {
  const Matrix Z = oracle::random_matrix(4, 3, 1);
  EXPECT_EQ(generator_forward(GeneratorSpec::identity(3), Z), Z);
}

TEST(Generator, RingEndpoints) {
  const Matrix Y = generator_forward(GeneratorSpec::ring(), (Matrix(2, 1) << 0.0, 1.0).finished());
  EXPECT_NEAR(Y(0, 0), 1.0, 1e-12);
  EXPECT_NEAR(Y(0, 1), 0.0, 1e-12);
  EXPECT_NEAR(Y(1, 0), -1.0, 1e-12);
  EXPECT_NEAR(Y(1, 1), 0.0, 1e-12);
}

TEST(Generator, AffineMatchesHandComputedProduct) {
  const GeneratorSpec g = GeneratorSpec::affine(3, 2, 17);
  ASSERT_EQ(g.parameters.size(), 2u * 3u + 2u);
  const Matrix z = row({0.3, -0.7, 0.5});
  const Vector y = generator_forward(g, z).row(0).transpose();
  const auto& p = g.parameters;
  for (int i = 0; i < 2; ++i) {
    double expect = p[6 + i];
    for (int j = 0; j < 3; ++j) expect += p[i * 3 + j] * z(0, j);
    EXPECT_NEAR(y(i), expect, 1e-14);
  }
}

TEST(Generator, AffineExplicitParameters) {
  const GeneratorSpec g = GeneratorSpec::affine(1, 2, std::vector<double>{2.0, -1.0, 0.5, 0.25});
  const Matrix Y = generator_forward(g, row({3.0}));
  EXPECT_EQ(Y(0, 0), 6.5);
  EXPECT_EQ(Y(0, 1), -2.75);
}

TEST(Generator, MlpOutputsInUnitInterval) {
  const GeneratorSpec g = GeneratorSpec::mlp({2, 8, 5}, 3);
  const Matrix Y = generator_forward(g, oracle::random_matrix(50, 2, 4, -3, 3));
  EXPECT_GT(Y.minCoeff(), 0.0);
  EXPECT_LT(Y.maxCoeff(), 1.0);
}

TEST(Generator, MlpMatchesHandWrittenForward) {
  const GeneratorSpec g = GeneratorSpec::mlp({2, 3, 2}, 5);
  const auto& p = g.parameters;
  ASSERT_EQ(p.size(), 3u * 2u + 3u + 2u * 3u + 2u);
  const double z[2] = {0.4, -0.6};
  double h[3];
  for (int i = 0; i < 3; ++i) h[i] = std::tanh(p[i * 2] * z[0] + p[i * 2 + 1] * z[1] + p[6 + i]);
  const Vector y = generator_forward(g, row({z[0], z[1]})).row(0).transpose();
  for (int i = 0; i < 2; ++i) {
    double a = p[9 + 6 + i];
    for (int j = 0; j < 3; ++j) a += p[9 + i * 3 + j] * h[j];
    EXPECT_NEAR(y(i), 1.0 / (1.0 + std::exp(-a)), 1e-14);
  }
}

TEST(Generator, ValidationErrors) {
  EXPECT_THROW(generator_forward(GeneratorSpec::identity(3), Matrix::Zero(1, 2)), InvalidArgument);
  EXPECT_THROW(GeneratorSpec::affine(2, 2, std::vector<double>{1, 2, 3}), InvalidArgument);
  GeneratorSpec ring = GeneratorSpec::ring();
  ring.output_dim = 3;
  EXPECT_THROW(ring.validate(), InvalidArgument);
  EXPECT_THROW(generator_kind_from_string("gan"), InvalidArgument);
}

TEST(Generator, DeterministicInitialisation) {
  EXPECT_EQ(GeneratorSpec::mlp({2, 4, 3}, 9).parameters, GeneratorSpec::mlp({2, 4, 3}, 9).parameters);
  EXPECT_NE(GeneratorSpec::mlp({2, 4, 3}, 9).parameters, GeneratorSpec::mlp({2, 4, 3}, 10).parameters);
}

TEST(GeneratorVjp, IdentityPassesCotangentThrough) {
  const Vector c = (Vector(3) << 1, -2, 3).finished();
  EXPECT_EQ(generator_vjp(GeneratorSpec::identity(3), Vector::Zero(3), c), c);
}

TEST(GeneratorVjp, RingAtZero) {
  const Vector v = generator_vjp(GeneratorSpec::ring(), Vector::Zero(1), (Vector(2) << 0, 1).finished());
  EXPECT_NEAR(v(0), std::numbers::pi, 1e-14);
}

TEST(GeneratorVjp, MatchesFiniteDifferencesForEveryKind) {
  for (int s = 0; s < 20; ++s) {
    GeneratorSpec g;
    switch (s % 3) {
      case 0: g = GeneratorSpec::affine(3, 4, s); break;
      case 1: g = GeneratorSpec::mlp({3, 7, 5, 4}, s); break;
      default: g = GeneratorSpec::ring(); break;
    }
    const Vector z = oracle::random_matrix(1, g.latent_dim, 100 + s).row(0).transpose();
    const Vector c = oracle::random_matrix(1, g.output_dim, 200 + s).row(0).transpose();
    const Vector fd = fd_vjp([&](const Vector& x) { return generate_one(g, x); }, z, c);
    const Vector an = generator_vjp(g, z, c);
    EXPECT_LT(oracle::rel_error(an.transpose(), fd.transpose()), 1e-5) << "instance " << s;
  }
}

TEST(Extractor, IdentityReturnsInput) {
  const Vector x = (Vector(3) << 1, 2, 3).finished();
  EXPECT_EQ(extractor_forward(ExtractorSpec::identity(3), x), x);
}

TEST(Extractor, ColorMaxPoolBlockOrder) {
  // 3 x 2 x 4 image: each channel split into 2 x 2 blocks of 1 x 2 pixels.
  const int h = 2, w = 4;
  Vector x(3 * h * w);
  for (int c = 0; c < 3; ++c)
    for (int r = 0; r < h; ++r)
      for (int col = 0; col < w; ++col) x(c * h * w + r * w + col) = 100 * c + 10 * r + col;
  const ExtractorSpec e = ExtractorSpec::color_max_pool(h, w);
  ASSERT_EQ(e.feature_dim, 12);
  const Vector f = extractor_forward(e, x);
  for (int c = 0; c < 3; ++c) {
    EXPECT_EQ(f(c * 4 + 0), 100 * c + 1);
    EXPECT_EQ(f(c * 4 + 1), 100 * c + 3);
    EXPECT_EQ(f(c * 4 + 2), 100 * c + 11);
    EXPECT_EQ(f(c * 4 + 3), 100 * c + 13);
  }
}

TEST(Extractor, ColorMaxPoolRequiresEvenLayout) {
  EXPECT_THROW(ExtractorSpec::color_max_pool(3, 4), InvalidArgument);
  EXPECT_THROW(ExtractorSpec::color_max_pool(0, 4), InvalidArgument);
  EXPECT_THROW(extractor_forward(ExtractorSpec::color_max_pool(2, 2), Vector::Zero(4)), InvalidArgument);
}

TEST(Extractor, RandomProjectionTanhMatchesFormula) {
  const ExtractorSpec e = ExtractorSpec::random_projection_tanh(3, 2, 8);
  const auto& p = e.parameters;
  const Vector x = (Vector(3) << 0.2, -0.4, 0.9).finished();
  const Vector f = extractor_forward(e, x);
  for (int i = 0; i < 2; ++i) {
    double a = p[6 + i];
    for (int j = 0; j < 3; ++j) a += p[i * 3 + j] * x(j);
    EXPECT_NEAR(f(i), std::tanh(a), 1e-14);
  }
}

TEST(Extractor, ConcatStacksChildrenInOrder) {
  const ExtractorSpec a = ExtractorSpec::color_max_pool(2, 2);
  const ExtractorSpec b = ExtractorSpec::random_projection_tanh(12, 3, 1);
  const ExtractorSpec e = ExtractorSpec::concat({a, b});
  EXPECT_EQ(e.feature_dim, 15);
  const Vector x = oracle::random_matrix(1, 12, 3).row(0).transpose();
  const Vector f = extractor_forward(e, x);
  EXPECT_EQ(f.head(12), extractor_forward(a, x));
  EXPECT_EQ(f.tail(3), extractor_forward(b, x));
}

TEST(ExtractorVjp, MatchesFiniteDifferencesAwayFromTies) {
  const int dim = 3 * 4 * 4;
  for (int s = 0; s < 12; ++s) {
    ExtractorSpec e;
    switch (s % 3) {
      case 0: e = ExtractorSpec::color_max_pool(4, 4); break;
      case 1: e = ExtractorSpec::random_projection_tanh(dim, 5, s); break;
      default: e = ExtractorSpec::concat({ExtractorSpec::color_max_pool(4, 4), ExtractorSpec::random_projection_tanh(dim, 5, s)});
    }
    Vector x = oracle::random_matrix(1, dim, 300 + s, 0, 1).row(0).transpose();
    for (int t = 0; pooling_tie_margin(e, x) < 1e-3; ++t) x = oracle::random_matrix(1, dim, 400 + 10 * s + t, 0, 1).row(0).transpose();
    const Vector c = oracle::random_matrix(1, e.feature_dim, 500 + s).row(0).transpose();
    const Vector fd = fd_vjp([&](const Vector& v) { return extractor_forward(e, v); }, x, c);
    EXPECT_LT(oracle::rel_error(extractor_vjp(e, x, c).transpose(), fd.transpose()), 1e-5) << "instance " << s;
  }
}

TEST(ExtractorVjp, ColorMaxPoolRoutesToFirstMaximiser) {
  const ExtractorSpec e = ExtractorSpec::color_max_pool(2, 4);
  Vector x = Vector::Zero(24);
  // Channel 0, block (0,0) covers columns 0-1 of row 0; both pixels tie.
  x(0) = 0.5;
  x(1) = 0.5;
  Vector c = Vector::Zero(12);
  c(0) = 1.0;
  const Vector g = extractor_vjp(e, x, c);
  EXPECT_EQ(g(0), 1.0);
  EXPECT_EQ(g(1), 0.0);
  EXPECT_EQ(g.sum(), 1.0);
}

TEST(TieMargin, NoPoolingIsInfinite) {
  EXPECT_TRUE(std::isinf(pooling_tie_margin(ExtractorSpec::identity(3), Vector::Zero(3))));
}

TEST(SamplePrior, DeterministicAndInSupport) {
  const GeneratorSpec g = GeneratorSpec::identity(3);
  const Matrix A = sample_prior(g, 100, 5);
  EXPECT_EQ(A, sample_prior(g, 100, 5));
  EXPECT_NE(A, sample_prior(g, 100, 6));
  EXPECT_LE(A.cwiseAbs().maxCoeff(), 1.0);
}

TEST(SamplePrior, StandardNormalMoments) {
  const Matrix A = sample_prior(GeneratorSpec::identity(2, Prior::StandardNormal), 20000, 1);
  for (int j = 0; j < 2; ++j) {
    const double mean = A.col(j).mean();
    const double var = (A.col(j).array() - mean).square().sum() / (A.rows() - 1);
    EXPECT_NEAR(mean, 0.0, 0.05);
    EXPECT_NEAR(var, 1.0, 0.05);
  }
}

TEST(SamplePrior, DefaultClampRadii) {
  EXPECT_EQ(default_clamp_radius(Prior::UniformBox), 1.0);
  EXPECT_EQ(default_clamp_radius(Prior::StandardNormal), 3.5);
}
