#pragma once

#include "kmm/kernels.hpp"
#include "kmm/models.hpp"
#include "kmm/types.hpp"

// =============================================================================
// Mean embeddings and the squared maximum mean discrepancy.
//
// Unweighted plug-in (V-statistic) estimator, diagonal terms included:
//
//   MMD^2(X, Y) = 1/m^2 sum K(x_i, x_j) + 1/n^2 sum K(y_i, y_j)
//               - 2/(mn) sum K(x_i, y_j)
//
// Weighted input embedding mu_w = sum_i w_i K(x_i, .) gives
//
//   MMD^2(X, Y, w) = sum w_i w_j K(x_i, x_j) + 1/n^2 sum K(y_i, y_j)
//                  - 2/n sum_i w_i sum_j K(x_i, y_j)
//
// which reduces to the unweighted estimator when w_i = 1/m. All sums run in
// fixed row-major index order.
// =============================================================================

namespace kmm {

/// Input points with simplex weights. Weights are validated, never renormalised.
class WeightedInput {
 public:
  WeightedInput(Matrix points, Vector weights);

  static WeightedInput uniform(Matrix points);

  const Matrix& points() const { return points_; }
  const Vector& weights() const { return weights_; }
  Eigen::Index size() const { return points_.rows(); }
  Eigen::Index dim() const { return points_.cols(); }

  /// sum_i w_i x_i
  Vector weighted_mean() const;

 private:
  Matrix points_;
  Vector weights_;
};

double mmd2_hat(const KernelSpec& kernel, MatrixRef X, MatrixRef Y);
double mmd2_hat_weighted(const KernelSpec& kernel, const WeightedInput& input, MatrixRef Y);

/// Value and output-gradient of the matching objective in one pass.
struct ObjectiveEvaluation {
  double value = 0.0;
  Matrix gradient;  // n x d, row j = d value / d y_j
};

/// The matching objective with the composed kernel K(x, y) = k(E(x), E(y)).
///
/// With include_constant off this is the optimisation form, where the
/// input-only term sum w_i w_j K(x_i, x_j) is dropped; with it on the value
/// is a genuine squared distance. Input features and the constant are
/// computed once at construction.
class MatchObjective {
 public:
  MatchObjective(WeightedInput input, KernelSpec kernel, ExtractorSpec extractor,
                 bool include_constant = true);

  const WeightedInput& input() const { return input_; }
  const KernelSpec& kernel() const { return kernel_; }
  const ExtractorSpec& extractor() const { return extractor_; }
  bool include_constant() const { return include_constant_; }
  double constant() const { return constant_; }
  const Matrix& input_features() const { return input_features_; }

  MatchObjective with_constant(bool include) const;

  double value(MatrixRef Y) const;
  Matrix gradient(MatrixRef Y) const;
  ObjectiveEvaluation evaluate(MatrixRef Y) const;

 private:
  WeightedInput input_;
  KernelSpec kernel_;
  ExtractorSpec extractor_;
  bool include_constant_;
  Matrix input_features_;
  double constant_ = 0.0;
};

inline double kmm_objective(const MatchObjective& obj, MatrixRef Y) { return obj.value(Y); }

inline Matrix kmm_gradient_wrt_outputs(const MatchObjective& obj, MatrixRef Y) {
  return obj.gradient(Y);
}

}  // namespace kmm
