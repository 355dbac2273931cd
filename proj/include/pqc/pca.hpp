#pragma once

#include <Eigen/Eigenvalues>

#include "pqc/errors.hpp"
#include "pqc/types.hpp"

namespace pqc {

/// Principal axes as rows of `components`, ordered by descending variance.
/// `eigenvalues` and `explained_variance_ratio` keep all d entries so a
/// report can show the full spectrum regardless of the cut.
template <typename T>
struct Pca {
  Vector<T> mean;
  Matrix<T> components;  // m x d
  Vector<T> eigenvalues;
  Vector<T> explained_variance_ratio;

  Index n_components() const { return components.rows(); }
};

namespace detail {

template <typename T>
Pca<T> pca_eig(const Matrix<T>& x) {
  if (x.rows() < 2) throw std::invalid_argument("pca: need at least 2 rows");
  Pca<T> model;
  model.mean = x.colwise().mean();
  const Matrix<T> centered = x.rowwise() - model.mean.transpose();
  const Matrix<T> cov =
      centered.transpose() * centered / static_cast<T>(x.rows() - 1);

  Eigen::SelfAdjointEigenSolver<Matrix<T>> eig(cov);
  if (eig.info() != Eigen::Success)
    throw numerical_error("pca: eigendecomposition failed");

  const Index d = x.cols();
  model.eigenvalues.resize(d);
  Matrix<T> axes(d, d);  // rows, descending
  for (Index i = 0; i < d; ++i) {
    model.eigenvalues[i] = std::max(eig.eigenvalues()[d - 1 - i], T(0));
    axes.row(i) = eig.eigenvectors().col(d - 1 - i).transpose();
    Index peak;
    axes.row(i).cwiseAbs().maxCoeff(&peak);
    if (axes(i, peak) < T(0)) axes.row(i) = -axes.row(i);
  }

  const T total = model.eigenvalues.sum();
  if (!(total > T(0)))
    throw numerical_error("pca: data has zero variance");
  model.explained_variance_ratio = model.eigenvalues / total;
  model.components = std::move(axes);
  return model;
}

}  // namespace detail

/// Keep the smallest m whose cumulative explained variance reaches
/// `variance_target`.
template <typename T>
Pca<T> pca_fit(const Matrix<T>& x, double variance_target = 0.95) {
  if (!(variance_target > 0.0) || variance_target > 1.0)
    throw config_error("pca: variance_target must be in (0, 1]");
  Pca<T> model = detail::pca_eig(x);
  const Index d = model.components.rows();
  Index m = d;
  T cum = T(0);
  for (Index i = 0; i < d; ++i) {
    cum += model.explained_variance_ratio[i];
    if (static_cast<double>(cum) >= variance_target - 1e-12) {
      m = i + 1;
      break;
    }
  }
  model.components.conservativeResize(m, Eigen::NoChange);
  return model;
}

template <typename T>
Pca<T> pca_fit_fixed(const Matrix<T>& x, Index m) {
  if (m < 1) throw config_error("pca: fixed_m must be >= 1");
  if (m > x.cols())
    throw config_error("pca: fixed_m exceeds feature dimension");
  Pca<T> model = detail::pca_eig(x);
  model.components.conservativeResize(m, Eigen::NoChange);
  return model;
}

template <typename T>
Matrix<T> pca_transform(const Pca<T>& model, const Matrix<T>& x) {
  if (x.cols() != model.mean.size())
    throw std::invalid_argument("pca_transform: dimension mismatch");
  return (x.rowwise() - model.mean.transpose()) * model.components.transpose();
}

template <typename T>
Matrix<T> pca_inverse_transform(const Pca<T>& model, const Matrix<T>& y) {
  if (y.cols() != model.n_components())
    throw std::invalid_argument("pca_inverse_transform: dimension mismatch");
  return (y * model.components).rowwise() + model.mean.transpose();
}

}  // namespace pqc
