#pragma once

#include <stdexcept>
#include <vector>

#include "pqc/rng.hpp"
#include "pqc/types.hpp"

namespace pqc {

/// View over one trainable array and its gradient accumulator.
template <typename T>
struct ParamView {
  T* value;
  T* grad;
  Index size;
};

/// 1-D convolution, stride 1, symmetric same-padding (kernel must be odd).
/// Activations are (channels x length); the kernel is stored as one
/// (out_ch x in_ch) matrix per tap so forward/backward run as tap-GEMMs on a
/// zero-padded copy of the input.
template <typename T>
class Conv1D {
 public:
  Conv1D(Index in_ch, Index out_ch, Index kernel)
      : in_ch_(in_ch), out_ch_(out_ch), kernel_(kernel) {
    if (kernel % 2 == 0) throw std::invalid_argument("Conv1D: kernel must be odd");
    w_.assign(static_cast<std::size_t>(kernel), Matrix<T>::Zero(out_ch, in_ch));
    gw_.assign(static_cast<std::size_t>(kernel), Matrix<T>::Zero(out_ch, in_ch));
    b_ = Vector<T>::Zero(out_ch);
    gb_ = Vector<T>::Zero(out_ch);
  }

  Index in_channels() const { return in_ch_; }
  Index out_channels() const { return out_ch_; }
  Index kernel() const { return kernel_; }
  Index fan_in() const { return in_ch_ * kernel_; }

  Matrix<T>& tap(Index k) { return w_[static_cast<std::size_t>(k)]; }
  const Matrix<T>& tap(Index k) const { return w_[static_cast<std::size_t>(k)]; }
  Vector<T>& bias() { return b_; }

  Matrix<T> forward(const Matrix<T>& x) {
    if (x.rows() != in_ch_) throw std::invalid_argument("Conv1D: channel mismatch");
    const Index len = x.cols();
    const Index pad = (kernel_ - 1) / 2;
    x_pad_.setZero(in_ch_, len + kernel_ - 1);
    x_pad_.middleCols(pad, len) = x;
    Matrix<T> y = b_.replicate(1, len);
    for (Index k = 0; k < kernel_; ++k)
      y.noalias() += w_[static_cast<std::size_t>(k)] * x_pad_.middleCols(k, len);
    return y;
  }

  /// Accumulates parameter gradients; pass need_dx = false for the first
  /// layer of a net to skip the unused input gradient.
  Matrix<T> backward(const Matrix<T>& dy, bool need_dx = true) {
    const Index len = dy.cols();
    const Index pad = (kernel_ - 1) / 2;
    gb_ += dy.rowwise().sum();
    for (Index k = 0; k < kernel_; ++k)
      gw_[static_cast<std::size_t>(k)].noalias() +=
          dy * x_pad_.middleCols(k, len).transpose();
    if (!need_dx) return {};
    Matrix<T> dx_pad = Matrix<T>::Zero(in_ch_, len + kernel_ - 1);
    for (Index k = 0; k < kernel_; ++k)
      dx_pad.middleCols(k, len).noalias() +=
          w_[static_cast<std::size_t>(k)].transpose() * dy;
    return dx_pad.middleCols(pad, len);
  }

  void zero_grad() {
    for (auto& g : gw_) g.setZero();
    gb_.setZero();
  }

  void collect(std::vector<ParamView<T>>& out) {
    for (Index k = 0; k < kernel_; ++k)
      out.push_back({w_[static_cast<std::size_t>(k)].data(),
                     gw_[static_cast<std::size_t>(k)].data(), out_ch_ * in_ch_});
    out.push_back({b_.data(), gb_.data(), out_ch_});
  }

 private:
  Index in_ch_, out_ch_, kernel_;
  std::vector<Matrix<T>> w_, gw_;
  Vector<T> b_, gb_;
  Matrix<T> x_pad_;
};

/// Max pooling, width 2, stride 2. Stores the argmax offset of each window;
/// ties resolve to the lower index. Backward routes gradient only there.
template <typename T>
class MaxPool1D {
 public:
  Matrix<T> forward(const Matrix<T>& x) {
    if (x.cols() % 2 != 0)
      throw std::invalid_argument("MaxPool1D: odd input length");
    const Index rows = x.rows(), out_len = x.cols() / 2;
    Matrix<T> y(rows, out_len);
    argmax_.resize(rows, out_len);
    in_len_ = x.cols();
    for (Index r = 0; r < rows; ++r) {
      const T* xr = x.data() + r * x.cols();
      T* yr = y.data() + r * out_len;
      std::uint8_t* ar = argmax_.data() + r * out_len;
      for (Index t = 0; t < out_len; ++t) {
        const T a = xr[2 * t], b = xr[2 * t + 1];
        const bool right = b > a;
        yr[t] = right ? b : a;
        ar[t] = right ? 1 : 0;
      }
    }
    return y;
  }

  Matrix<T> backward(const Matrix<T>& dy) {
    const Index rows = dy.rows(), out_len = dy.cols();
    Matrix<T> dx = Matrix<T>::Zero(rows, in_len_);
    for (Index r = 0; r < rows; ++r) {
      const T* dyr = dy.data() + r * out_len;
      T* dxr = dx.data() + r * in_len_;
      const std::uint8_t* ar = argmax_.data() + r * out_len;
      for (Index t = 0; t < out_len; ++t) dxr[2 * t + ar[t]] = dyr[t];
    }
    return dx;
  }

 private:
  Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>
      argmax_;
  Index in_len_ = 0;
};

/// Fully connected layer on flattened activations.
template <typename T>
class Dense {
 public:
  Dense(Index in, Index out)
      : w_(Matrix<T>::Zero(out, in)),
        gw_(Matrix<T>::Zero(out, in)),
        b_(Vector<T>::Zero(out)),
        gb_(Vector<T>::Zero(out)) {}

  Index in_size() const { return w_.cols(); }
  Index out_size() const { return w_.rows(); }
  Matrix<T>& weights() { return w_; }
  Vector<T>& bias() { return b_; }

  Vector<T> forward(const Vector<T>& x) {
    x_ = x;
    Vector<T> y = b_;
    y.noalias() += w_ * x;
    return y;
  }

  Vector<T> backward(const Vector<T>& dy) {
    gw_.noalias() += dy * x_.transpose();
    gb_ += dy;
    return w_.transpose() * dy;
  }

  void zero_grad() {
    gw_.setZero();
    gb_.setZero();
  }

  void collect(std::vector<ParamView<T>>& out) {
    out.push_back({w_.data(), gw_.data(), w_.size()});
    out.push_back({b_.data(), gb_.data(), b_.size()});
  }

 private:
  Matrix<T> w_, gw_;
  Vector<T> b_, gb_;
  Vector<T> x_;
};

/// Elementwise max(x, 0) with a cached activation mask.
template <typename T>
class ReLU {
 public:
  Matrix<T> forward(const Matrix<T>& x) {
    mask_ = (x.array() > T(0)).template cast<T>();
    return x.cwiseMax(T(0));
  }
  Matrix<T> backward(const Matrix<T>& dy) { return dy.cwiseProduct(mask_); }

 private:
  Matrix<T> mask_;
};

/// Nearest-neighbour upsampling along the time axis.
template <typename T>
class Upsample1D {
 public:
  explicit Upsample1D(Index factor) : factor_(factor) {}

  Matrix<T> forward(const Matrix<T>& x) {
    const Index rows = x.rows(), len = x.cols();
    Matrix<T> y(rows, len * factor_);
    for (Index r = 0; r < rows; ++r)
      for (Index t = 0; t < len; ++t)
        y.row(r).segment(t * factor_, factor_).setConstant(x(r, t));
    return y;
  }

  Matrix<T> backward(const Matrix<T>& dy) {
    const Index rows = dy.rows(), out_len = dy.cols() / factor_;
    Matrix<T> dx(rows, out_len);
    for (Index r = 0; r < rows; ++r)
      for (Index t = 0; t < out_len; ++t)
        dx(r, t) = dy.row(r).segment(t * factor_, factor_).sum();
    return dx;
  }

 private:
  Index factor_;
};

/// He-uniform fill: U(-sqrt(6/fan_in), +sqrt(6/fan_in)).
template <typename T>
void he_uniform_fill(T* data, Index n, Index fan_in, SplitMix64& rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(fan_in));
  for (Index i = 0; i < n; ++i)
    data[i] = static_cast<T>(rng.uniform(-limit, limit));
}

}  // namespace pqc
