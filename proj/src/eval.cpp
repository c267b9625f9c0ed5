#include "kmm/eval.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "kmm/error.hpp"

namespace kmm {

namespace {

// Eigenvalues below the solver's noise floor are treated as exact zeros;
// otherwise their square roots (~1e-8) leak into the distance.
Vector clamp_noise(const Vector& eigenvalues) {
  const double top = eigenvalues.cwiseAbs().maxCoeff();
  const double floor = static_cast<double>(eigenvalues.size()) * std::numeric_limits<double>::epsilon() * top;
  return eigenvalues.unaryExpr([floor](double v) { return v > floor ? v : 0.0; });
}

Matrix psd_sqrt(const Matrix& S) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S);
  const Vector roots = clamp_noise(es.eigenvalues()).cwiseSqrt();
  return es.eigenvectors() * roots.asDiagonal() * es.eigenvectors().transpose();
}

double sample_std(const std::vector<double>& xs, double mean) {
  if (xs.size() < 2) return 0.0;
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(xs.size() - 1));
}

double mean_of(const std::vector<double>& xs) {
  return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

}  // namespace

GaussianMoments fit_moments(MatrixRef features) {
  const Eigen::Index s = features.rows();
  if (s < 2) throw InvalidArgument("fit_moments needs at least 2 samples");
  GaussianMoments out;
  out.mean = features.colwise().mean().transpose();
  const Matrix centered = features.rowwise() - out.mean.transpose();
  out.covariance = (centered.transpose() * centered) / static_cast<double>(s - 1);
  return out;
}

double frechet_feature_distance(const GaussianMoments& a, const GaussianMoments& b) {
  const Eigen::Index d = a.mean.size();
  if (b.mean.size() != d || a.covariance.rows() != d || a.covariance.cols() != d ||
      b.covariance.rows() != d || b.covariance.cols() != d) {
    throw InvalidArgument("frechet distance: moment dimensions differ");
  }
  const Matrix sa = psd_sqrt(a.covariance);
  Matrix inner = sa * b.covariance * sa;
  inner = 0.5 * (inner + inner.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(inner, Eigen::EigenvaluesOnly);
  const double trace_sqrt = clamp_noise(es.eigenvalues()).cwiseSqrt().sum();
  const double dist = (a.mean - b.mean).squaredNorm() + a.covariance.trace() +
                      b.covariance.trace() - 2.0 * trace_sqrt;
  return std::max(dist, 0.0);
}

double mean_pairwise_feature_distance(MatrixRef X, MatrixRef Y, const ExtractorSpec& e) {
  if (X.rows() < 1 || Y.rows() < 1) throw InvalidArgument("mean pairwise distance needs nonempty sets");
  const Matrix fx = extract_features(e, X);
  const Matrix fy = extract_features(e, Y);
  double total = 0.0;
  for (Eigen::Index i = 0; i < fx.rows(); ++i) {
    for (Eigen::Index j = 0; j < fy.rows(); ++j) total += (fx.row(i) - fy.row(j)).norm();
  }
  return total / (static_cast<double>(fx.rows()) * static_cast<double>(fy.rows()));
}

double frechet_between_sets(MatrixRef X, MatrixRef Y, const ExtractorSpec& e) {
  return frechet_feature_distance(fit_moments(extract_features(e, X)),
                                  fit_moments(extract_features(e, Y)));
}

std::vector<CurvePoint> objective_vs_n_curve(const WeightedInput& input, const GeneratorSpec& g,
                                             const ExtractorSpec& e, const KernelSpec& k,
                                             const SolverOptions& base,
                                             const std::vector<int>& n_values, int repeats,
                                             std::uint64_t seed) {
  detail::require(!n_values.empty(), "objective curve needs at least one n");
  detail::require(repeats >= 1, "objective curve needs repeats >= 1");
  std::vector<CurvePoint> curve;
  curve.reserve(n_values.size());
  for (int n : n_values) {
    detail::require(n >= 1, "objective curve n values must be >= 1");
    std::vector<double> finals;
    finals.reserve(static_cast<std::size_t>(repeats));
    for (int r = 0; r < repeats; ++r) {
      SolverOptions opts = base;
      opts.seed = derive_seed(seed, static_cast<std::uint64_t>(r));
      finals.push_back(solve_kmm(input, g, e, k, n, opts).final_objective());
    }
    const double mean = mean_of(finals);
    curve.push_back({n, mean, repeats, sample_std(finals, mean)});
  }
  return curve;
}

std::vector<BenchCell> runtime_vs_n(const std::vector<int>& m_values, const std::vector<int>& n_values,
                                    const GeneratorSpec& g, const ExtractorSpec& e,
                                    const KernelSpec& k, const BenchOptions& opts,
                                    std::uint64_t seed) {
  detail::require(opts.iters_per_point >= 1, "benchmark needs iters_per_point >= 1");
  detail::require(opts.warmup >= 0, "benchmark warmup must be nonnegative");
  SolverOptions clamp_opts;
  clamp_opts.clamp_radius = opts.clamp_radius;
  const double radius = resolve_clamp_radius(g, clamp_opts);

  using Clock = std::chrono::steady_clock;
  std::vector<BenchCell> cells;
  std::uint64_t cell_index = 0;
  for (int m : m_values) {
    for (int n : n_values) {
      detail::require(m >= 1 && n >= 1, "benchmark counts must be >= 1");
      const std::uint64_t cell_seed = derive_seed(seed, cell_index++);
      const Matrix X = generator_forward(g, sample_prior(g, m, cell_seed));
      const MatchObjective obj(WeightedInput::uniform(X), k, e, false);

      Matrix Z = clamp_latents(sample_prior(g, n, cell_seed + 1), radius);
      AdamState adam = AdamState::zeros(Z.rows(), Z.cols(), opts.adam);
      auto iterate = [&] {
        const Matrix Y = generator_forward(g, Z);
        const ObjectiveEvaluation ev = obj.evaluate(Y);
        const Matrix grad = pullback_to_latents(g, Z, ev.gradient);
        auto [next_state, next_Z] = adam_step(std::move(adam), Z, grad);
        adam = std::move(next_state);
        Z = clamp_latents(next_Z, radius);
      };

      for (int w = 0; w < opts.warmup; ++w) iterate();
      std::vector<double> times;
      times.reserve(static_cast<std::size_t>(opts.iters_per_point));
      for (int it = 0; it < opts.iters_per_point; ++it) {
        const auto t0 = Clock::now();
        iterate();
        times.push_back(std::chrono::duration<double, std::milli>(Clock::now() - t0).count());
      }

      BenchCell cell;
      cell.m = m;
      cell.n = n;
      cell.iterations = opts.iters_per_point;
      cell.mean_ms = mean_of(times);
      cell.std_ms = sample_std(times, cell.mean_ms);
      std::vector<double> sorted = times;
      const auto mid = sorted.begin() + static_cast<std::ptrdiff_t>((sorted.size() - 1) / 2);
      std::nth_element(sorted.begin(), mid, sorted.end());
      cell.ms_per_iter = *mid;
      cells.push_back(cell);
    }
  }
  return cells;
}

Matrix interpolation_baseline(VectorRef z_a, VectorRef z_b, int steps, const GeneratorSpec& g) {
  detail::require(z_a.size() == z_b.size(), "interpolation endpoints differ in dimension");
  detail::require(steps >= 2, "interpolation needs at least 2 steps");
  Matrix Z(steps, z_a.size());
  for (int s = 0; s < steps; ++s) {
    const double t = static_cast<double>(s) / static_cast<double>(steps - 1);
    if (s == 0) {
      Z.row(s) = z_a.transpose();
    } else if (s == steps - 1) {
      Z.row(s) = z_b.transpose();
    } else {
      Z.row(s) = ((1.0 - t) * z_a + t * z_b).transpose();
    }
  }
  return generator_forward(g, Z);
}

}  // namespace kmm
