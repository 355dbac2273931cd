#include "pqc/waveform.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "pqc/rng.hpp"

namespace pqc {

std::string to_string(EventLabel label) {
  switch (label) {
    case EventLabel::Normal: return "normal";
    case EventLabel::Sag: return "sag";
    case EventLabel::Swell: return "swell";
    case EventLabel::Interruption: return "interruption";
    case EventLabel::Transient: return "transient";
    case EventLabel::Harmonics: return "harmonics";
  }
  return "unknown";
}

std::optional<EventLabel> label_from_string(const std::string& s) {
  for (EventLabel l : kAllLabels)
    if (to_string(l) == s) return l;
  return std::nullopt;
}

void validate(const WaveformRecord& record) {
  if (record.samples_per_cycle <= 0 || record.n_cycles <= 0)
    throw std::invalid_argument("record '" + record.id +
                                "': non-positive dimensions");
  const Index n = record.samples();
  for (int p = 0; p < 3; ++p) {
    const VectorXd& v = record.channel(p);
    if (v.size() != n)
      throw std::invalid_argument("record '" + record.id +
                                  "': channel length mismatch");
    if (!v.allFinite())
      throw std::invalid_argument("record '" + record.id +
                                  "': non-finite sample");
  }
}

double median_cycle_peak(const WaveformRecord& record) {
  const int spc = record.samples_per_cycle;
  std::vector<double> peaks(record.n_cycles);
  for (int c = 0; c < record.n_cycles; ++c)
    peaks[c] = record.va.segment(static_cast<Index>(c) * spc, spc)
                   .cwiseAbs()
                   .maxCoeff();
  std::sort(peaks.begin(), peaks.end());
  const std::size_t m = peaks.size() / 2;
  return peaks.size() % 2 == 1 ? peaks[m] : 0.5 * (peaks[m - 1] + peaks[m]);
}

WaveformRecord per_unit_scale(const WaveformRecord& record,
                              std::optional<double> base) {
  validate(record);
  if (base && *base <= 0.0)
    throw std::invalid_argument("per_unit_scale: base must be positive");
  const double b = base ? *base : median_cycle_peak(record);
  if (b <= 0.0) throw std::invalid_argument("per_unit_scale: degenerate base");
  WaveformRecord out = record;
  out.va /= b;
  out.vb /= b;
  out.vc /= b;
  out.base_peak = b;
  return out;
}

WaveformRecord zero_pad_to(const WaveformRecord& record, int target_cycles) {
  validate(record);
  if (record.n_cycles > target_cycles)
    throw std::invalid_argument("zero_pad_to: record '" + record.id + "' has " +
                                std::to_string(record.n_cycles) +
                                " cycles, more than the target");
  WaveformRecord out = record;
  out.padded_from_cycles = record.n_cycles;
  if (record.n_cycles == target_cycles) return out;
  const Index target = static_cast<Index>(record.samples_per_cycle) * target_cycles;
  for (int p = 0; p < 3; ++p) {
    VectorXd padded = VectorXd::Zero(target);
    padded.head(record.samples()) = record.channel(p);
    out.channel(p) = std::move(padded);
  }
  out.n_cycles = target_cycles;
  return out;
}

Dataset filter_min_length(const Dataset& dataset, int min_cycles) {
  Dataset out;
  out.split = dataset.split;
  for (const WaveformRecord& r : dataset.records)
    if (r.n_cycles >= min_cycles) out.records.push_back(r);
  return out;
}

VectorXd flatten(const WaveformRecord& record, int expected_cycles) {
  validate(record);
  if (record.n_cycles != expected_cycles)
    throw std::invalid_argument("flatten: record '" + record.id +
                                "' is not preprocessed to " +
                                std::to_string(expected_cycles) + " cycles");
  const Index n = record.samples();
  VectorXd out(3 * n);
  out.segment(0, n) = record.va;
  out.segment(n, n) = record.vb;
  out.segment(2 * n, n) = record.vc;
  return out;
}

WaveformRecord unflatten(const VectorXd& v, const WaveformRecord& like) {
  const Index n = like.samples();
  if (v.size() != 3 * n)
    throw std::invalid_argument("unflatten: vector length mismatch");
  WaveformRecord out = like;
  out.va = v.segment(0, n);
  out.vb = v.segment(n, n);
  out.vc = v.segment(2 * n, n);
  return out;
}

MatrixXd channel_matrix(const WaveformRecord& record) {
  MatrixXd m(3, record.samples());
  m.row(0) = record.va.transpose();
  m.row(1) = record.vb.transpose();
  m.row(2) = record.vc.transpose();
  return m;
}

WaveformRecord from_channel_matrix(const MatrixXd& m, const WaveformRecord& like) {
  if (m.rows() != 3 || m.cols() != like.samples())
    throw std::invalid_argument("from_channel_matrix: shape mismatch");
  WaveformRecord out = like;
  out.va = m.row(0).transpose();
  out.vb = m.row(1).transpose();
  out.vc = m.row(2).transpose();
  return out;
}

Dataset split_dataset(Dataset dataset, std::array<double, 3> ratios,
                      std::uint64_t seed) {
  const double sum = ratios[0] + ratios[1] + ratios[2];
  if (std::abs(sum - 1.0) > 1e-9)
    throw std::invalid_argument("split_dataset: ratios must sum to 1");
  if (ratios[0] < 0 || ratios[1] < 0 || ratios[2] < 0)
    throw std::invalid_argument("split_dataset: negative ratio");
  const Index n = dataset.size();
  if (n < 3)
    throw std::invalid_argument("split_dataset: need at least 3 records");

  std::vector<Index> order(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
  SplitMix64 rng(seed);
  rng.shuffle(order);

  const auto n_val = static_cast<Index>(std::floor(ratios[1] * n));
  const auto n_test = static_cast<Index>(std::floor(ratios[2] * n));
  const Index n_train = n - n_val - n_test;  // floor allocation, remainder here

  DatasetSplit split;
  for (Index i = 0; i < n; ++i) {
    const std::string& id = dataset.records[static_cast<std::size_t>(order[i])].id;
    if (i < n_train)
      split.train_ids.push_back(id);
    else if (i < n_train + n_val)
      split.val_ids.push_back(id);
    else
      split.test_ids.push_back(id);
  }
  dataset.split = std::move(split);
  return dataset;
}

Dataset preprocess(const Dataset& dataset, int min_cycles, int target_cycles) {
  Dataset out = filter_min_length(dataset, min_cycles);
  for (WaveformRecord& r : out.records) {
    if (!r.base_peak) r = per_unit_scale(r);
    if (!r.padded_from_cycles || r.n_cycles < target_cycles)
      r = zero_pad_to(r, target_cycles);
  }
  return out;
}

}  // namespace pqc
