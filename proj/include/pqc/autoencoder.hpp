#pragma once

#include <algorithm>
#include <cmath>
#include <unordered_map>
#include <vector>

#include "pqc/errors.hpp"
#include "pqc/layers.hpp"
#include "pqc/waveform.hpp"

namespace pqc {

/// Network plan. Defaults: five conv+pool stages embedding a (3 x 4096)
/// record into 60 features, mirrored by a dense entry and three
/// upsample+conv stages back to (3 x 4096).
struct AutoencoderConfig {
  Index in_channels = 3;
  Index in_length = 4096;
  std::vector<Index> encoder_channels = {16, 32, 32, 64, 64};
  Index kernel = 9;
  Index latent_dim = 60;
  std::vector<Index> decoder_upsample = {4, 4, 2};
  std::vector<Index> decoder_channels = {32, 16, 3};

  Index stages() const { return static_cast<Index>(encoder_channels.size()); }
  Index reduced_length() const { return in_length >> stages(); }
  Index bottleneck_in() const {
    return encoder_channels.back() * reduced_length();
  }

  void check() const {
    if (encoder_channels.empty() || decoder_channels.empty())
      throw config_error("autoencoder: empty channel plan");
    if (kernel % 2 == 0 || kernel < 1)
      throw config_error("autoencoder: kernel must be odd and positive");
    if (in_length % (Index(1) << stages()) != 0)
      throw config_error("autoencoder: input length not divisible by 2^stages");
    if (decoder_upsample.size() != decoder_channels.size())
      throw config_error("autoencoder: decoder plan length mismatch");
    Index len = reduced_length();
    for (Index f : decoder_upsample) len *= f;
    if (len != in_length)
      throw config_error("autoencoder: decoder does not restore input length");
    if (decoder_channels.back() != in_channels)
      throw config_error("autoencoder: decoder does not restore channel count");
    if (latent_dim < 1) throw config_error("autoencoder: latent_dim < 1");
  }
};

/// Conv/pool stack and a linear dense head mapping to the feature vector.
template <typename T>
class EncoderNet {
 public:
  explicit EncoderNet(const AutoencoderConfig& cfg)
      : cfg_(cfg), head_(cfg.bottleneck_in(), cfg.latent_dim) {
    cfg.check();
    Index ch = cfg.in_channels;
    for (Index out : cfg.encoder_channels) {
      convs_.emplace_back(ch, out, cfg.kernel);
      relus_.emplace_back();
      pools_.emplace_back();
      ch = out;
    }
  }

  const AutoencoderConfig& config() const { return cfg_; }

  void init_params(SplitMix64& rng) {
    for (auto& c : convs_) {
      for (Index k = 0; k < c.kernel(); ++k)
        he_uniform_fill(c.tap(k).data(), c.tap(k).size(), c.fan_in(), rng);
      c.bias().setZero();
    }
    he_uniform_fill(head_.weights().data(), head_.weights().size(),
                    head_.in_size(), rng);
    head_.bias().setZero();
  }

  Vector<T> encode(const Matrix<T>& x) {
    if (x.rows() != cfg_.in_channels || x.cols() != cfg_.in_length)
      throw std::invalid_argument("encode: input shape mismatch");
    Matrix<T> a = x;
    for (std::size_t s = 0; s < convs_.size(); ++s)
      a = pools_[s].forward(relus_[s].forward(convs_[s].forward(a)));
    pooled_rows_ = a.rows();
    pooled_cols_ = a.cols();
    const Eigen::Map<const Vector<T>> flat(a.data(), a.size());
    return head_.forward(flat);
  }

  /// Backward from a feature-space gradient; input gradient is not produced.
  void backward(const Vector<T>& dh) {
    const Vector<T> dflat = head_.backward(dh);
    Matrix<T> da =
        Eigen::Map<const Matrix<T>>(dflat.data(), pooled_rows_, pooled_cols_);
    for (std::size_t s = convs_.size(); s-- > 0;) {
      da = relus_[s].backward(pools_[s].backward(da));
      da = convs_[s].backward(da, /*need_dx=*/s != 0);
    }
  }

  void zero_grad() {
    for (auto& c : convs_) c.zero_grad();
    head_.zero_grad();
  }

  void collect(std::vector<ParamView<T>>& out) {
    for (auto& c : convs_) c.collect(out);
    head_.collect(out);
  }

  Conv1D<T>& conv(std::size_t i) { return convs_[i]; }
  Dense<T>& head() { return head_; }

 private:
  AutoencoderConfig cfg_;
  std::vector<Conv1D<T>> convs_;
  std::vector<ReLU<T>> relus_;
  std::vector<MaxPool1D<T>> pools_;
  Dense<T> head_;
  Index pooled_rows_ = 0, pooled_cols_ = 0;
};

/// Dense entry, then upsample+conv stages; the last conv stays linear since
/// per-unit voltages are signed.
template <typename T>
class DecoderNet {
 public:
  explicit DecoderNet(const AutoencoderConfig& cfg)
      : cfg_(cfg), entry_(cfg.latent_dim, cfg.bottleneck_in()) {
    cfg.check();
    Index ch = cfg.encoder_channels.back();
    for (std::size_t s = 0; s < cfg.decoder_channels.size(); ++s) {
      ups_.emplace_back(cfg.decoder_upsample[s]);
      convs_.emplace_back(ch, cfg.decoder_channels[s], cfg.kernel);
      ch = cfg.decoder_channels[s];
    }
    relus_.resize(convs_.size());  // last entry unused
  }

  void init_params(SplitMix64& rng) {
    he_uniform_fill(entry_.weights().data(), entry_.weights().size(),
                    entry_.in_size(), rng);
    entry_.bias().setZero();
    for (auto& c : convs_) {
      for (Index k = 0; k < c.kernel(); ++k)
        he_uniform_fill(c.tap(k).data(), c.tap(k).size(), c.fan_in(), rng);
      c.bias().setZero();
    }
  }

  Matrix<T> decode(const Vector<T>& h) {
    if (h.size() != cfg_.latent_dim)
      throw std::invalid_argument("decode: feature size mismatch");
    const Vector<T> flat = entry_.forward(h);
    Matrix<T> a = Eigen::Map<const Matrix<T>>(
        flat.data(), cfg_.encoder_channels.back(), cfg_.reduced_length());
    a = entry_relu_.forward(a);
    for (std::size_t s = 0; s < convs_.size(); ++s) {
      a = convs_[s].forward(ups_[s].forward(a));
      if (s + 1 < convs_.size()) a = relus_[s].forward(a);
    }
    return a;
  }

  Vector<T> backward(const Matrix<T>& dxhat) {
    Matrix<T> da = dxhat;
    for (std::size_t s = convs_.size(); s-- > 0;) {
      if (s + 1 < convs_.size()) da = relus_[s].backward(da);
      da = ups_[s].backward(convs_[s].backward(da));
    }
    da = entry_relu_.backward(da);
    const Eigen::Map<const Vector<T>> dflat(da.data(), da.size());
    return entry_.backward(dflat);
  }

  void zero_grad() {
    entry_.zero_grad();
    for (auto& c : convs_) c.zero_grad();
  }

  void collect(std::vector<ParamView<T>>& out) {
    entry_.collect(out);
    for (auto& c : convs_) c.collect(out);
  }

  Dense<T>& entry() { return entry_; }
  Conv1D<T>& conv(std::size_t i) { return convs_[i]; }

 private:
  AutoencoderConfig cfg_;
  Dense<T> entry_;
  ReLU<T> entry_relu_;
  std::vector<Upsample1D<T>> ups_;
  std::vector<Conv1D<T>> convs_;
  std::vector<ReLU<T>> relus_;
};

/// Reconstruction objective: per-record squared L2 over every element,
/// averaged over the batch.
template <typename T>
double mse_loss(const std::vector<Matrix<T>>& x,
                const std::vector<Matrix<T>>& xhat) {
  if (x.size() != xhat.size() || x.empty())
    throw std::invalid_argument("mse_loss: batch size mismatch");
  double sum = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i].rows() != xhat[i].rows() || x[i].cols() != xhat[i].cols())
      throw std::invalid_argument("mse_loss: shape mismatch");
    sum += static_cast<double>((xhat[i] - x[i]).squaredNorm());
  }
  return sum / static_cast<double>(x.size());
}

struct TrainConfig {
  int epochs = 30;
  int batch_size = 32;
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::uint64_t seed = 0;
  std::string init = "he-uniform";
  AutoencoderConfig arch;
};

template <typename T>
class Adam {
 public:
  explicit Adam(const std::vector<ParamView<T>>& params) {
    Index total = 0;
    for (const auto& p : params) total += p.size;
    m_ = Vector<T>::Zero(total);
    v_ = Vector<T>::Zero(total);
  }

  void step(const std::vector<ParamView<T>>& params, const TrainConfig& cfg) {
    ++t_;
    const double bc1 = 1.0 - std::pow(cfg.beta1, t_);
    const double bc2 = 1.0 - std::pow(cfg.beta2, t_);
    const T lr = static_cast<T>(cfg.learning_rate);
    const T b1 = static_cast<T>(cfg.beta1), b2 = static_cast<T>(cfg.beta2);
    const T eps = static_cast<T>(cfg.epsilon);
    Index off = 0;
    for (const auto& p : params) {
      for (Index i = 0; i < p.size; ++i) {
        const T g = p.grad[i];
        T& m = m_[off + i];
        T& v = v_[off + i];
        m = b1 * m + (T(1) - b1) * g;
        v = b2 * v + (T(1) - b2) * g * g;
        const T mhat = static_cast<T>(m / bc1);
        const T vhat = static_cast<T>(v / bc2);
        p.value[i] -= lr * mhat / (std::sqrt(vhat) + eps);
      }
      off += p.size;
    }
  }

 private:
  Vector<T> m_, v_;
  int t_ = 0;
};

struct LossHistory {
  std::vector<double> train;
  std::vector<double> val;
};

template <typename T>
struct TrainedAutoencoder {
  EncoderNet<T> encoder;
  DecoderNet<T> decoder;
  LossHistory history;
  std::uint64_t seed = 0;
};

template <typename T>
Matrix<T> record_tensor(const WaveformRecord& r) {
  return channel_matrix(r).cast<T>();
}

/// Adam over seeded shuffled mini-batches. The dataset must carry a
/// train/val split; per-epoch train and validation losses are recorded.
/// Throws numerical_error when the loss stops being finite.
template <typename T>
TrainedAutoencoder<T> train_autoencoder(const Dataset& dataset,
                                        const TrainConfig& cfg) {
  if (!dataset.split)
    throw std::invalid_argument("train_autoencoder: dataset has no split");
  if (cfg.epochs < 1 || cfg.learning_rate < 0 || cfg.batch_size < 1)
    throw config_error("train_autoencoder: invalid config");
  if (cfg.init != "he-uniform")
    throw config_error("train_autoencoder: unknown init scheme " + cfg.init);

  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < dataset.records.size(); ++i)
    index.emplace(dataset.records[i].id, i);
  const auto resolve = [&](const std::vector<std::string>& ids) {
    std::vector<std::size_t> out;
    out.reserve(ids.size());
    for (const auto& id : ids) out.push_back(index.at(id));
    return out;
  };
  const std::vector<std::size_t> train_idx = resolve(dataset.split->train_ids);
  const std::vector<std::size_t> val_idx = resolve(dataset.split->val_ids);
  if (train_idx.empty()) throw std::invalid_argument("empty training split");

  std::vector<Matrix<T>> tensors(dataset.records.size());
  for (std::size_t i : train_idx) tensors[i] = record_tensor<T>(dataset.records[i]);
  for (std::size_t i : val_idx) tensors[i] = record_tensor<T>(dataset.records[i]);

  TrainedAutoencoder<T> out{EncoderNet<T>(cfg.arch), DecoderNet<T>(cfg.arch),
                            {}, cfg.seed};
  SplitMix64 init_rng(substream_seed(cfg.seed, 0));
  out.encoder.init_params(init_rng);
  out.decoder.init_params(init_rng);

  std::vector<ParamView<T>> params;
  out.encoder.collect(params);
  out.decoder.collect(params);
  Adam<T> adam(params);

  std::vector<std::size_t> order = train_idx;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    SplitMix64 shuffle_rng(substream_seed(cfg.seed, 1 + epoch));
    shuffle_rng.shuffle(order);

    double epoch_sum = 0.0;
    for (std::size_t start = 0; start < order.size();
         start += static_cast<std::size_t>(cfg.batch_size)) {
      const std::size_t nb = std::min<std::size_t>(
          static_cast<std::size_t>(cfg.batch_size), order.size() - start);
      out.encoder.zero_grad();
      out.decoder.zero_grad();
      const T scale = static_cast<T>(2.0 / static_cast<double>(nb));
      for (std::size_t j = 0; j < nb; ++j) {
        const Matrix<T>& x = tensors[order[start + j]];
        const Vector<T> h = out.encoder.encode(x);
        const Matrix<T> xhat = out.decoder.decode(h);
        const Matrix<T> diff = xhat - x;
        epoch_sum += static_cast<double>(diff.squaredNorm());
        const Vector<T> dh = out.decoder.backward(scale * diff);
        out.encoder.backward(dh);
      }
      adam.step(params, cfg);
    }
    const double train_loss = epoch_sum / static_cast<double>(order.size());

    double val_sum = 0.0;
    for (std::size_t i : val_idx) {
      const Matrix<T>& x = tensors[i];
      val_sum += static_cast<double>(
          (out.decoder.decode(out.encoder.encode(x)) - x).squaredNorm());
    }
    const double val_loss =
        val_idx.empty() ? 0.0 : val_sum / static_cast<double>(val_idx.size());

    if (!std::isfinite(train_loss) || !std::isfinite(val_loss))
      throw numerical_error("train_autoencoder: non-finite loss at epoch " +
                            std::to_string(epoch + 1));
    out.history.train.push_back(train_loss);
    out.history.val.push_back(val_loss);
  }
  return out;
}

/// Row i = encode(record i), in dataset order.
template <typename T>
MatrixXd encode_dataset(const Dataset& dataset, EncoderNet<T>& encoder) {
  MatrixXd features(dataset.size(), encoder.config().latent_dim);
  for (Index i = 0; i < dataset.size(); ++i)
    features.row(i) =
        encoder.encode(record_tensor<T>(dataset.records[static_cast<std::size_t>(i)]))
            .template cast<double>()
            .transpose();
  return features;
}

}  // namespace pqc
