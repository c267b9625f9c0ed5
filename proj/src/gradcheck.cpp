#include "kmm/gradcheck.hpp"

#include <algorithm>
#include <array>
#include <limits>
#include <random>
#include <string>

#include "kmm/error.hpp"
#include "kmm/eval.hpp"
#include "kmm/optimize.hpp"

namespace kmm {

namespace {

constexpr int kImageSide = 4;
constexpr int kImageDim = 3 * kImageSide * kImageSide;
constexpr int kPlainDim = 3;
constexpr int kInputs = 3;
constexpr int kOutputs = 3;
constexpr double kTieMargin = 1e-3;

struct Combo {
  GeneratorKind generator;
  ExtractorKind extractor;
  KernelKind kernel;
};

bool pools(ExtractorKind e) {
  return e == ExtractorKind::ColorMaxPool || e == ExtractorKind::Concat;
}

std::vector<Combo> valid_combos() {
  std::vector<Combo> combos;
  for (auto gk : {GeneratorKind::Identity, GeneratorKind::Affine, GeneratorKind::Mlp, GeneratorKind::Ring}) {
    for (auto ek : {ExtractorKind::Identity, ExtractorKind::ColorMaxPool,
                    ExtractorKind::RandomProjectionTanh, ExtractorKind::Concat}) {
      // The ring's 2-D outputs are not images.
      if (gk == GeneratorKind::Ring && pools(ek)) continue;
      for (auto kk : {KernelKind::Linear, KernelKind::Gaussian, KernelKind::Imq}) {
        combos.push_back({gk, ek, kk});
      }
    }
  }
  return combos;
}

ExtractorSpec make_extractor(ExtractorKind kind, int dim, std::uint64_t seed) {
  switch (kind) {
    case ExtractorKind::Identity:
      return ExtractorSpec::identity(dim);
    case ExtractorKind::ColorMaxPool:
      return ExtractorSpec::color_max_pool(kImageSide, kImageSide);
    case ExtractorKind::RandomProjectionTanh:
      return ExtractorSpec::random_projection_tanh(dim, 5, seed);
    case ExtractorKind::Concat:
      return ExtractorSpec::concat({ExtractorSpec::color_max_pool(kImageSide, kImageSide),
                                    ExtractorSpec::random_projection_tanh(dim, 5, seed)});
  }
  throw InvalidArgument("unknown extractor kind");
}

GeneratorSpec make_generator(GeneratorKind kind, int dim, std::uint64_t seed) {
  switch (kind) {
    case GeneratorKind::Identity:
      return GeneratorSpec::identity(dim);
    case GeneratorKind::Affine:
      return GeneratorSpec::affine(2, dim, seed);
    case GeneratorKind::Mlp:
      return GeneratorSpec::mlp({2, 6, dim}, seed);
    case GeneratorKind::Ring:
      return GeneratorSpec::ring();
  }
  throw InvalidArgument("unknown generator kind");
}

}  // namespace

std::vector<GradcheckCase> gradcheck_cases(int count, std::uint64_t seed) {
  detail::require(count >= 1, "gradcheck needs at least one case");
  const std::vector<Combo> combos = valid_combos();
  std::vector<GradcheckCase> cases;
  cases.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    const Combo& combo = combos[static_cast<std::size_t>(i) % combos.size()];
    const std::uint64_t case_seed = derive_seed(seed, static_cast<std::uint64_t>(i));
    std::mt19937_64 rng(case_seed);

    const int dim = combo.generator == GeneratorKind::Ring ? 2
                    : pools(combo.extractor)              ? kImageDim
                                                          : kPlainDim;
    GeneratorSpec g = make_generator(combo.generator, dim, case_seed + 1);
    ExtractorSpec e = make_extractor(combo.extractor, dim, case_seed + 2);

    Matrix X(kInputs, dim);
    if (pools(combo.extractor)) {
      std::uniform_real_distribution<double> u(0.0, 1.0);
      for (Eigen::Index k = 0; k < X.size(); ++k) X.data()[k] = u(rng);
    } else {
      std::normal_distribution<double> nd(0.0, 1.0);
      for (Eigen::Index k = 0; k < X.size(); ++k) X.data()[k] = nd(rng);
    }

    KernelSpec k;
    switch (combo.kernel) {
      case KernelKind::Linear: k = KernelSpec::linear(); break;
      case KernelKind::Gaussian: k = KernelSpec::gaussian(median_heuristic(extract_features(e, X))); break;
      case KernelKind::Imq: k = KernelSpec::imq(1.0); break;
    }

    Matrix Z;
    for (std::uint64_t attempt = 0;; ++attempt) {
      detail::require(attempt < 1000, "could not draw tie-free latents");
      Z = sample_prior(g, kOutputs, case_seed + 3 + attempt);
      const Matrix Y = generator_forward(g, Z);
      double margin = std::numeric_limits<double>::infinity();
      for (Eigen::Index j = 0; j < Y.rows(); ++j) margin = std::min(margin, pooling_tie_margin(e, Y.row(j)));
      if (margin > kTieMargin) break;
    }

    std::string label = std::string(to_string(combo.generator)) + "/" +
                        std::string(to_string(combo.extractor)) + "/" +
                        std::string(to_string(combo.kernel));
    MatchObjective obj(WeightedInput::uniform(X), k, e, true);
    cases.push_back({std::move(label), std::move(g), std::move(e), k, std::move(obj), std::move(Z)});
  }
  return cases;
}

double latent_objective(const GradcheckCase& c, MatrixRef Z) {
  return c.objective.value(generator_forward(c.generator, Z));
}

Matrix latent_gradient(const GradcheckCase& c, MatrixRef Z) {
  const Matrix Y = generator_forward(c.generator, Z);
  return pullback_to_latents(c.generator, Z, c.objective.gradient(Y));
}

double max_relative_error(MatrixRef analytic, MatrixRef numeric) {
  detail::require(analytic.rows() == numeric.rows() && analytic.cols() == numeric.cols(),
                  "relative error: shape mismatch");
  const double scale = std::max(analytic.cwiseAbs().maxCoeff(), numeric.cwiseAbs().maxCoeff());
  const double diff = (analytic - numeric).cwiseAbs().maxCoeff();
  if (scale == 0.0) return diff;
  return diff / scale;
}

GradcheckReport run_gradcheck(int count, std::uint64_t seed, double h) {
  detail::require(h > 0.0, "finite-difference step must be positive");
  GradcheckReport report;
  for (const GradcheckCase& c : gradcheck_cases(count, seed)) {
    const Matrix analytic = latent_gradient(c, c.latents);
    Matrix numeric(c.latents.rows(), c.latents.cols());
    Matrix Z = c.latents;
    for (Eigen::Index k = 0; k < Z.size(); ++k) {
      const double z0 = Z.data()[k];
      Z.data()[k] = z0 + h;
      const double up = latent_objective(c, Z);
      Z.data()[k] = z0 - h;
      const double down = latent_objective(c, Z);
      Z.data()[k] = z0;
      numeric.data()[k] = (up - down) / (2.0 * h);
    }
    const double err = max_relative_error(analytic, numeric);
    report.results.push_back({c.label, err});
    report.max_rel_error = std::max(report.max_rel_error, err);
  }
  return report;
}

}  // namespace kmm
