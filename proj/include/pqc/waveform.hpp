#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pqc/types.hpp"

namespace pqc {

/// The six event categories handled by the pipeline.
enum class EventLabel { Normal, Sag, Swell, Interruption, Transient, Harmonics };

inline constexpr std::array<EventLabel, 6> kAllLabels = {
    EventLabel::Normal,       EventLabel::Sag,       EventLabel::Swell,
    EventLabel::Interruption, EventLabel::Transient, EventLabel::Harmonics};

std::string to_string(EventLabel label);
std::optional<EventLabel> label_from_string(const std::string& s);

/// One three-phase voltage capture. Channel samples are volts before per-unit
/// scaling and per-unit afterwards; each channel holds
/// samples_per_cycle * n_cycles finite values.
struct WaveformRecord {
  std::string id;
  int samples_per_cycle = 256;
  int n_cycles = 0;
  VectorXd va, vb, vc;
  std::optional<EventLabel> label;
  std::optional<double> base_peak;
  std::optional<int> padded_from_cycles;

  Index samples() const {
    return static_cast<Index>(samples_per_cycle) * n_cycles;
  }
  const VectorXd& channel(int p) const { return p == 0 ? va : (p == 1 ? vb : vc); }
  VectorXd& channel(int p) { return p == 0 ? va : (p == 1 ? vb : vc); }
};

/// Throws std::invalid_argument on length mismatch or non-finite samples.
void validate(const WaveformRecord& record);

struct DatasetSplit {
  std::vector<std::string> train_ids, val_ids, test_ids;
};

struct Dataset {
  std::vector<WaveformRecord> records;
  std::optional<DatasetSplit> split;

  Index size() const { return static_cast<Index>(records.size()); }
};

/// Divides every channel by `base`. When absent, the base is the median over
/// cycles of the per-cycle peak |v| on phase A, which stays on the healthy
/// cycles as long as fewer than half the cycles carry the event.
WaveformRecord per_unit_scale(const WaveformRecord& record,
                              std::optional<double> base = std::nullopt);

/// Median over cycles of max |va| within each cycle.
double median_cycle_peak(const WaveformRecord& record);

/// Appends zeros to each channel until the record is `target_cycles` long and
/// stores the pre-padding cycle count. Longer records are rejected.
WaveformRecord zero_pad_to(const WaveformRecord& record, int target_cycles = 16);

/// Keeps records with n_cycles >= min_cycles, preserving order.
Dataset filter_min_length(const Dataset& dataset, int min_cycles = 8);

/// Channel-major [va | vb | vc] vector; requires a preprocessed record.
VectorXd flatten(const WaveformRecord& record, int expected_cycles = 16);

/// Inverse of flatten; copies metadata from `like`.
WaveformRecord unflatten(const VectorXd& v, const WaveformRecord& like);

/// 3 x L matrix view of the channels (row per phase), the autoencoder input.
MatrixXd channel_matrix(const WaveformRecord& record);
WaveformRecord from_channel_matrix(const MatrixXd& m, const WaveformRecord& like);

/// Seeded shuffle then contiguous cut. Sizes are the floor allocation with the
/// remainder assigned to train; ratios must sum to 1 within 1e-9.
Dataset split_dataset(Dataset dataset,
                      std::array<double, 3> ratios = {0.70, 0.15, 0.15},
                      std::uint64_t seed = 0);

/// filter -> per-unit -> pad, skipping steps a record already went through
/// (base_peak or padded_from_cycles set), so the pipeline is idempotent.
Dataset preprocess(const Dataset& dataset, int min_cycles = 8,
                   int target_cycles = 16);

}  // namespace pqc
