#pragma once

#include <string>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

#include "pqc/autoencoder.hpp"
#include "pqc/io.hpp"
#include "pqc/pca.hpp"

namespace pqc {

namespace detail {

template <typename T>
constexpr const char* dtype_tag() {
  return sizeof(T) == 4 ? "f32" : "f64";
}

template <typename T>
BlobArray conv_blob(const std::string& name, const Conv1D<T>& c) {
  std::vector<T> buf(static_cast<std::size_t>(c.kernel() * c.out_channels() *
                                              c.in_channels()));
  T* dst = buf.data();
  for (Index k = 0; k < c.kernel(); ++k) {
    const auto& tap = c.tap(k);
    std::copy(tap.data(), tap.data() + tap.size(), dst);
    dst += tap.size();
  }
  return BlobArray::from(name, {c.kernel(), c.out_channels(), c.in_channels()},
                         buf.data(), static_cast<Index>(buf.size()));
}

template <typename T>
void fill_conv(Conv1D<T>& c, const BlobArray& blob) {
  std::vector<T> buf(static_cast<std::size_t>(blob.count()));
  blob.to(buf.data(), blob.count());
  const T* src = buf.data();
  for (Index k = 0; k < c.kernel(); ++k) {
    std::copy(src, src + c.tap(k).size(), c.tap(k).data());
    src += c.tap(k).size();
  }
}

inline AutoencoderConfig arch_from_json(const nlohmann::json& j) {
  AutoencoderConfig arch;
  arch.in_channels = j.at("in_channels").get<Index>();
  arch.in_length = j.at("in_length").get<Index>();
  arch.encoder_channels = j.at("encoder_channels").get<std::vector<Index>>();
  arch.kernel = j.at("kernel").get<Index>();
  arch.latent_dim = j.at("latent_dim").get<Index>();
  arch.decoder_upsample = j.at("decoder_upsample").get<std::vector<Index>>();
  arch.decoder_channels = j.at("decoder_channels").get<std::vector<Index>>();
  arch.check();
  return arch;
}

inline nlohmann::json arch_to_json(const AutoencoderConfig& arch) {
  return {{"in_channels", arch.in_channels},
          {"in_length", arch.in_length},
          {"encoder_channels", arch.encoder_channels},
          {"kernel", arch.kernel},
          {"latent_dim", arch.latent_dim},
          {"decoder_upsample", arch.decoder_upsample},
          {"decoder_channels", arch.decoder_channels}};
}

}  // namespace detail

template <typename T>
void save_autoencoder(const std::string& path, TrainedAutoencoder<T>& model) {
  const AutoencoderConfig& arch = model.encoder.config();
  nlohmann::json header = {{"format", "pqc-model"},
                           {"version", 1},
                           {"kind", "autoencoder"},
                           {"dtype", detail::dtype_tag<T>()},
                           {"seed", model.seed},
                           {"arch", detail::arch_to_json(arch)},
                           {"history",
                            {{"train", model.history.train},
                             {"val", model.history.val}}}};
  std::vector<BlobArray> arrays;
  for (std::size_t i = 0; i < arch.encoder_channels.size(); ++i) {
    auto& c = model.encoder.conv(i);
    const std::string base = "enc.conv" + std::to_string(i);
    arrays.push_back(detail::conv_blob(base + ".w", c));
    arrays.push_back(BlobArray::from(base + ".b", {c.out_channels()},
                                     c.bias().data(), c.bias().size()));
  }
  auto& head = model.encoder.head();
  arrays.push_back(BlobArray::from("enc.head.w",
                                   {head.out_size(), head.in_size()},
                                   head.weights().data(), head.weights().size()));
  arrays.push_back(BlobArray::from("enc.head.b", {head.out_size()},
                                   head.bias().data(), head.bias().size()));
  auto& entry = model.decoder.entry();
  arrays.push_back(BlobArray::from("dec.entry.w",
                                   {entry.out_size(), entry.in_size()},
                                   entry.weights().data(),
                                   entry.weights().size()));
  arrays.push_back(BlobArray::from("dec.entry.b", {entry.out_size()},
                                   entry.bias().data(), entry.bias().size()));
  for (std::size_t i = 0; i < arch.decoder_channels.size(); ++i) {
    auto& c = model.decoder.conv(i);
    const std::string base = "dec.conv" + std::to_string(i);
    arrays.push_back(detail::conv_blob(base + ".w", c));
    arrays.push_back(BlobArray::from(base + ".b", {c.out_channels()},
                                     c.bias().data(), c.bias().size()));
  }
  write_container(path, header, arrays);
}

template <typename T>
TrainedAutoencoder<T> load_autoencoder(const std::string& path) {
  auto [header, arrays] = read_container(path);
  if (header.value("kind", "") != "autoencoder")
    throw config_error("load_autoencoder: not an autoencoder container");
  if (header.value("dtype", "") != detail::dtype_tag<T>())
    throw config_error("load_autoencoder: dtype mismatch");
  const AutoencoderConfig arch = detail::arch_from_json(header.at("arch"));

  std::unordered_map<std::string, const BlobArray*> by_name;
  for (const auto& a : arrays) by_name.emplace(a.name, &a);
  const auto get = [&](const std::string& name) -> const BlobArray& {
    auto it = by_name.find(name);
    if (it == by_name.end())
      throw config_error("load_autoencoder: missing array " + name);
    return *it->second;
  };

  TrainedAutoencoder<T> model{EncoderNet<T>(arch), DecoderNet<T>(arch), {},
                              header.value("seed", std::uint64_t{0})};
  if (header.contains("history")) {
    model.history.train =
        header["history"].value("train", std::vector<double>{});
    model.history.val = header["history"].value("val", std::vector<double>{});
  }
  for (std::size_t i = 0; i < arch.encoder_channels.size(); ++i) {
    auto& c = model.encoder.conv(i);
    const std::string base = "enc.conv" + std::to_string(i);
    detail::fill_conv(c, get(base + ".w"));
    get(base + ".b").to(c.bias().data(), c.bias().size());
  }
  auto& head = model.encoder.head();
  get("enc.head.w").to(head.weights().data(), head.weights().size());
  get("enc.head.b").to(head.bias().data(), head.bias().size());
  auto& entry = model.decoder.entry();
  get("dec.entry.w").to(entry.weights().data(), entry.weights().size());
  get("dec.entry.b").to(entry.bias().data(), entry.bias().size());
  for (std::size_t i = 0; i < arch.decoder_channels.size(); ++i) {
    auto& c = model.decoder.conv(i);
    const std::string base = "dec.conv" + std::to_string(i);
    detail::fill_conv(c, get(base + ".w"));
    get(base + ".b").to(c.bias().data(), c.bias().size());
  }
  return model;
}

inline void save_pca(const std::string& path, const Pca<double>& model) {
  nlohmann::json header = {{"format", "pqc-model"},
                           {"version", 1},
                           {"kind", "pca"},
                           {"dtype", "f64"},
                           {"n_components", model.n_components()},
                           {"dim", model.mean.size()}};
  std::vector<BlobArray> arrays;
  arrays.push_back(BlobArray::from("mean", {model.mean.size()},
                                   model.mean.data(), model.mean.size()));
  arrays.push_back(BlobArray::from(
      "components", {model.components.rows(), model.components.cols()},
      model.components.data(), model.components.size()));
  arrays.push_back(BlobArray::from("eigenvalues", {model.eigenvalues.size()},
                                   model.eigenvalues.data(),
                                   model.eigenvalues.size()));
  arrays.push_back(BlobArray::from(
      "explained_variance_ratio", {model.explained_variance_ratio.size()},
      model.explained_variance_ratio.data(),
      model.explained_variance_ratio.size()));
  write_container(path, header, arrays);
}

inline Pca<double> load_pca(const std::string& path) {
  auto [header, arrays] = read_container(path);
  if (header.value("kind", "") != "pca")
    throw config_error("load_pca: not a pca container");
  std::unordered_map<std::string, const BlobArray*> by_name;
  for (const auto& a : arrays) by_name.emplace(a.name, &a);
  const auto get = [&](const std::string& name) -> const BlobArray& {
    auto it = by_name.find(name);
    if (it == by_name.end()) throw config_error("load_pca: missing " + name);
    return *it->second;
  };
  Pca<double> model;
  const BlobArray& mean = get("mean");
  model.mean.resize(mean.count());
  mean.to(model.mean.data(), mean.count());
  const BlobArray& comp = get("components");
  if (comp.shape.size() != 2)
    throw config_error("load_pca: components must be 2-D");
  model.components.resize(comp.shape[0], comp.shape[1]);
  comp.to(model.components.data(), comp.count());
  const BlobArray& eig = get("eigenvalues");
  model.eigenvalues.resize(eig.count());
  eig.to(model.eigenvalues.data(), eig.count());
  const BlobArray& evr = get("explained_variance_ratio");
  model.explained_variance_ratio.resize(evr.count());
  evr.to(model.explained_variance_ratio.data(), evr.count());
  return model;
}

}  // namespace pqc
