#pragma once

#include <map>
#include <optional>

#include "pqc/rng.hpp"
#include "pqc/waveform.hpp"

namespace pqc {

/// Decaying sinusoid added on top of the fundamental from t0 onwards.
struct TransientParams {
  double t0_s = 0.0;
  double freq_hz = 600.0;  // in [300, 1500]
  double tau_s = 0.01;
  double beta = 1.0;       // peak magnitude, p.u.
};

struct EventParams {
  EventLabel label = EventLabel::Normal;
  double amplitude = 1.0;  // fundamental peak, p.u.
  double alpha = 1.0;      // multiplier inside [start_cycle, end_cycle)
  double start_cycle = 0.0;
  double end_cycle = 0.0;
  std::array<bool, 3> phases_affected = {false, false, false};
  std::optional<TransientParams> transient;
  std::map<int, double> harmonics;  // order in {3,5,7} -> magnitude p.u.
};

/// Throws std::invalid_argument when params violate the per-class bounds
/// (sag alpha in [0.1,0.9), swell in (1.1,1.8], interruption < 0.1, interval
/// inside the record, transient frequency in [300,1500] Hz).
void validate(const EventParams& params, int n_cycles);

struct GenConfig {
  std::uint64_t seed = 0;
  double f0 = 60.0;
  int samples_per_cycle = 256;
  int n_cycles = 16;           // long-record length; short records use 8
  double noise_std = 0.01;     // p.u., Gaussian per sample
  double short_fraction = 0.25;
  std::map<EventLabel, int> class_mix;
};

/// Deterministic waveform for the given parameters; `rng` supplies only the
/// additive noise. Phase angles are 0, -120, +120 degrees.
WaveformRecord gen_record(const EventParams& params, const GenConfig& cfg,
                          SplitMix64& rng, int n_cycles = 0);

/// Uniform parameter draw within the class bounds for `label`.
EventParams sample_event_params(EventLabel label, int n_cycles, SplitMix64& rng);

/// Seeded dataset: records ordered by class (enum order) then ordinal, each
/// generated from its own substream so the output is a pure function of cfg.
Dataset gen_dataset(const GenConfig& cfg);

}  // namespace pqc
