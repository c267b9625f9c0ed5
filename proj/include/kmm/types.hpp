#pragma once

#include <Eigen/Dense>

namespace kmm {

// Rows are samples. Row-major so that a row binds to a contiguous vector view.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using SampleSet = Matrix;
using Vector = Eigen::VectorXd;
using VectorRef = Eigen::Ref<const Vector>;
using MatrixRef = Eigen::Ref<const Matrix>;

}  // namespace kmm
