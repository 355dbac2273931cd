#pragma once

#include <Eigen/Core>

namespace pqc {

using Index = Eigen::Index;

/// Dense row-major matrix; rows are samples, columns are features/time steps.
template <typename T>
using Matrix = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

template <typename T>
using Vector = Eigen::Matrix<T, Eigen::Dynamic, 1>;

using MatrixXd = Matrix<double>;
using MatrixXf = Matrix<float>;
using VectorXd = Vector<double>;
using VectorXf = Vector<float>;

}  // namespace pqc
