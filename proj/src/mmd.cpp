#include "kmm/mmd.hpp"

#include <cmath>
#include <string>

#include "kmm/error.hpp"

namespace kmm {

namespace {

constexpr double kWeightSumTolerance = 1e-9;

double sum_all(const Matrix& G) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < G.rows(); ++i) {
    for (Eigen::Index j = 0; j < G.cols(); ++j) s += G(i, j);
  }
  return s;
}

// sum_i sum_j w_i w_j G(i, j)
double weighted_quadratic(const Matrix& G, const Vector& w) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < G.rows(); ++i) {
    for (Eigen::Index j = 0; j < G.cols(); ++j) s += w[i] * w[j] * G(i, j);
  }
  return s;
}

// sum_i w_i sum_j G(i, j)
double weighted_rows(const Matrix& G, const Vector& w) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < G.rows(); ++i) {
    double row = 0.0;
    for (Eigen::Index j = 0; j < G.cols(); ++j) row += G(i, j);
    s += w[i] * row;
  }
  return s;
}

// The Y-dependent part 1/n^2 sum K(y, y') - 2/n sum_i w_i sum_j K(x_i, y_j),
// evaluated on features.
double output_terms(const KernelSpec& k, const Matrix& fx, const Vector& w, const Matrix& fy) {
  const auto n = static_cast<double>(fy.rows());
  const double yy = sum_all(gram(k, fy, fy));
  const double xy = weighted_rows(gram(k, fx, fy), w);
  return yy / (n * n) - 2.0 * xy / n;
}

void require_nonempty(MatrixRef A, const char* name) {
  if (A.rows() < 1) throw InvalidArgument(std::string(name) + " must contain at least one point");
}

}  // namespace

// -----------------------------------------------------------------------------
// WeightedInput
// -----------------------------------------------------------------------------

WeightedInput::WeightedInput(Matrix points, Vector weights)
    : points_(std::move(points)), weights_(std::move(weights)) {
  detail::require(points_.rows() >= 1, "weighted input needs at least one point");
  detail::require(points_.cols() >= 1, "weighted input points need at least one coordinate");
  detail::require(weights_.size() == points_.rows(),
                  "weight vector has " + std::to_string(weights_.size()) + " entries for " +
                      std::to_string(points_.rows()) + " points");
  detail::require(points_.allFinite(), "input points must be finite");
  double total = 0.0;
  for (Eigen::Index i = 0; i < weights_.size(); ++i) {
    detail::require(std::isfinite(weights_[i]) && weights_[i] >= 0.0,
                    "weights must be nonnegative, got w[" + std::to_string(i) +
                        "] = " + std::to_string(weights_[i]));
    total += weights_[i];
  }
  if (std::abs(total - 1.0) > kWeightSumTolerance) {
    throw InvalidArgument("weights must sum to 1 (within 1e-9), got sum " + std::to_string(total));
  }
}

WeightedInput WeightedInput::uniform(Matrix points) {
  const Eigen::Index m = points.rows();
  detail::require(m >= 1, "weighted input needs at least one point");
  return WeightedInput(std::move(points), Vector::Constant(m, 1.0 / static_cast<double>(m)));
}

Vector WeightedInput::weighted_mean() const { return points_.transpose() * weights_; }

// -----------------------------------------------------------------------------
// Estimators
// -----------------------------------------------------------------------------

double mmd2_hat(const KernelSpec& kernel, MatrixRef X, MatrixRef Y) {
  require_nonempty(X, "X");
  require_nonempty(Y, "Y");
  const auto m = static_cast<double>(X.rows());
  const auto n = static_cast<double>(Y.rows());
  const double xx = sum_all(gram(kernel, X, X));
  const double yy = sum_all(gram(kernel, Y, Y));
  const double xy = sum_all(gram(kernel, X, Y));
  return xx / (m * m) + yy / (n * n) - 2.0 * xy / (m * n);
}

double mmd2_hat_weighted(const KernelSpec& kernel, const WeightedInput& input, MatrixRef Y) {
  require_nonempty(Y, "Y");
  const Matrix& X = input.points();
  const double xx = weighted_quadratic(gram(kernel, X, X), input.weights());
  return xx + output_terms(kernel, X, input.weights(), Y);
}

// -----------------------------------------------------------------------------
// MatchObjective
// -----------------------------------------------------------------------------

MatchObjective::MatchObjective(WeightedInput input, KernelSpec kernel, ExtractorSpec extractor,
                               bool include_constant)
    : input_(std::move(input)),
      kernel_(kernel),
      extractor_(std::move(extractor)),
      include_constant_(include_constant) {
  kernel_.validate();
  extractor_.validate();
  if (input_.dim() != extractor_.input_dim) {
    throw InvalidArgument("input points have dimension " + std::to_string(input_.dim()) +
                          " but the extractor expects " + std::to_string(extractor_.input_dim));
  }
  input_features_ = extract_features(extractor_, input_.points());
  constant_ = weighted_quadratic(gram(kernel_, input_features_, input_features_), input_.weights());
}

MatchObjective MatchObjective::with_constant(bool include) const {
  MatchObjective copy = *this;
  copy.include_constant_ = include;
  return copy;
}

double MatchObjective::value(MatrixRef Y) const {
  require_nonempty(Y, "Y");
  const Matrix fy = extract_features(extractor_, Y);
  const double v = output_terms(kernel_, input_features_, input_.weights(), fy);
  return include_constant_ ? constant_ + v : v;
}

Matrix MatchObjective::gradient(MatrixRef Y) const { return evaluate(Y).gradient; }

ObjectiveEvaluation MatchObjective::evaluate(MatrixRef Y) const {
  require_nonempty(Y, "Y");
  const Matrix fy = extract_features(extractor_, Y);
  const Eigen::Index n = fy.rows();
  const Eigen::Index m = input_features_.rows();
  const auto nd = static_cast<double>(n);

  ObjectiveEvaluation out;
  const double v = output_terms(kernel_, input_features_, input_.weights(), fy);
  out.value = include_constant_ ? constant_ + v : v;

  // d/df_j: 2/n^2 sum_i grad_2 k(f_i, f_j) - 2/n sum_i w_i grad_2 k(e_i, f_j),
  // then pulled back through the extractor.
  out.gradient.resize(n, Y.cols());
  Vector feat_grad(fy.cols());
  const double self_scale = 2.0 / (nd * nd);
  const double cross_scale = -2.0 / nd;
  for (Eigen::Index j = 0; j < n; ++j) {
    feat_grad.setZero();
    for (Eigen::Index i = 0; i < n; ++i) {
      accumulate_kernel_grad(kernel_, fy.row(i), fy.row(j), self_scale, feat_grad);
    }
    for (Eigen::Index i = 0; i < m; ++i) {
      accumulate_kernel_grad(kernel_, input_features_.row(i), fy.row(j),
                             cross_scale * input_.weights()[i], feat_grad);
    }
    out.gradient.row(j) = extractor_vjp(extractor_, Y.row(j), feat_grad).transpose();
  }
  return out;
}

}  // namespace kmm
