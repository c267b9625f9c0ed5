#pragma once

#include <cstdint>
#include <vector>

#include "kmm/kernels.hpp"
#include "kmm/mmd.hpp"
#include "kmm/models.hpp"
#include "kmm/optimize.hpp"
#include "kmm/types.hpp"

// Evaluation metrics and scaling experiments. Both metrics work in the
// configured extractor's feature space, so absolute values depend on the
// extractor; only orderings between methods are meaningful.

namespace kmm {

struct GaussianMoments {
  Vector mean;
  Matrix covariance;
};

/// Sample mean and unbiased (s - 1) sample covariance of the rows.
GaussianMoments fit_moments(MatrixRef features);

/// Squared 2-Wasserstein distance between Gaussians:
///   ||mu_a - mu_b||^2 + tr(S_a + S_b - 2 (S_a^1/2 S_b S_a^1/2)^1/2).
/// Square roots go through symmetric eigendecompositions with negative
/// eigenvalues clamped to zero.
double frechet_feature_distance(const GaussianMoments& a, const GaussianMoments& b);

/// 1/(mn) sum_i sum_j ||E(x_i) - E(y_j)||.
double mean_pairwise_feature_distance(MatrixRef X, MatrixRef Y, const ExtractorSpec& e);

/// Convenience: Frechet distance between moments fitted to E(X) and E(Y).
double frechet_between_sets(MatrixRef X, MatrixRef Y, const ExtractorSpec& e);

struct CurvePoint {
  int n = 1;
  double value = 0.0;  // mean over repeats
  int repeats = 1;
  double std = 0.0;    // sample standard deviation; 0 for a single repeat
};

/// Per-cell seed for fan-out experiments.
constexpr std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) { return base ^ index; }

/// Final reporting objective of solve_kmm as a function of n. Repeat r uses
/// seed derive_seed(seed, r), shared across n values.
std::vector<CurvePoint> objective_vs_n_curve(const WeightedInput& input, const GeneratorSpec& g,
                                             const ExtractorSpec& e, const KernelSpec& k,
                                             const SolverOptions& base,
                                             const std::vector<int>& n_values, int repeats,
                                             std::uint64_t seed);

struct BenchCell {
  int m = 1;
  int n = 1;
  double ms_per_iter = 0.0;  // median over timed iterations
  double mean_ms = 0.0;
  double std_ms = 0.0;
  int iterations = 0;
};

struct BenchOptions {
  int iters_per_point = 50;
  int warmup = 5;
  AdamOptions adam;
  std::optional<double> clamp_radius;
};

/// Wall time of one full optimisation iteration (forward, objective and
/// gradient, pullback, Adam, clamp) for every (m, n) pair. Inputs are m
/// generator samples; warm-up iterations are discarded.
std::vector<BenchCell> runtime_vs_n(const std::vector<int>& m_values, const std::vector<int>& n_values,
                                    const GeneratorSpec& g, const ExtractorSpec& e,
                                    const KernelSpec& k, const BenchOptions& opts,
                                    std::uint64_t seed);

/// g((1 - t) z_a + t z_b) for `steps` evenly spaced t in [0, 1].
Matrix interpolation_baseline(VectorRef z_a, VectorRef z_b, int steps, const GeneratorSpec& g);

}  // namespace kmm
