#include "pqc/synth.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace pqc {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr std::array<double, 3> kPhaseOffset = {0.0, -kTwoPi / 3.0,
                                                kTwoPi / 3.0};

bool has_interval(EventLabel label) {
  return label == EventLabel::Sag || label == EventLabel::Swell ||
         label == EventLabel::Interruption;
}
}  // namespace

void validate(const EventParams& params, int n_cycles) {
  if (has_interval(params.label)) {
    if (!(params.start_cycle >= 0.0 && params.start_cycle < params.end_cycle &&
          params.end_cycle <= n_cycles))
      throw std::invalid_argument("event interval outside the record");
    bool any = params.phases_affected[0] || params.phases_affected[1] ||
               params.phases_affected[2];
    if (!any) throw std::invalid_argument("event affects no phase");
  }
  switch (params.label) {
    case EventLabel::Sag:
      if (!(params.alpha >= 0.1 && params.alpha < 0.9))
        throw std::invalid_argument("sag alpha outside [0.1, 0.9)");
      break;
    case EventLabel::Swell:
      if (!(params.alpha > 1.1 && params.alpha <= 1.8))
        throw std::invalid_argument("swell alpha outside (1.1, 1.8]");
      break;
    case EventLabel::Interruption:
      if (!(params.alpha >= 0.0 && params.alpha < 0.1))
        throw std::invalid_argument("interruption alpha not below 0.1");
      break;
    default:
      break;
  }
  if (params.transient) {
    const TransientParams& t = *params.transient;
    if (t.freq_hz < 300.0 || t.freq_hz > 1500.0)
      throw std::invalid_argument("transient frequency outside [300, 1500] Hz");
    if (t.tau_s <= 0.0) throw std::invalid_argument("transient tau not positive");
  }
}

WaveformRecord gen_record(const EventParams& params, const GenConfig& cfg,
                          SplitMix64& rng, int n_cycles) {
  if (n_cycles <= 0) n_cycles = cfg.n_cycles;
  validate(params, n_cycles);

  WaveformRecord rec;
  rec.samples_per_cycle = cfg.samples_per_cycle;
  rec.n_cycles = n_cycles;
  rec.label = params.label;
  const Index n = rec.samples();
  const double spc = cfg.samples_per_cycle;

  for (int p = 0; p < 3; ++p) {
    VectorXd v(n);
    for (Index i = 0; i < n; ++i) {
      const double cycle_pos = static_cast<double>(i) / spc;
      const double t = cycle_pos / cfg.f0;
      const double theta = kTwoPi * cycle_pos + kPhaseOffset[p];
      const bool in_event = params.phases_affected[p] &&
                            cycle_pos >= params.start_cycle &&
                            cycle_pos < params.end_cycle;
      double s = params.amplitude * (in_event ? params.alpha : 1.0) *
                 std::sin(theta);
      if (params.transient && params.phases_affected[p]) {
        const TransientParams& tr = *params.transient;
        if (t >= tr.t0_s) {
          const double dt = t - tr.t0_s;
          s += tr.beta * std::exp(-dt / tr.tau_s) *
               std::sin(kTwoPi * tr.freq_hz * dt);
        }
      }
      for (const auto& [order, mag] : params.harmonics)
        s += mag * std::sin(order * theta);
      v[i] = s;
    }
    rec.channel(p) = std::move(v);
  }
  // Noise appended phase-major so the clean waveform above is rng-independent.
  if (cfg.noise_std > 0.0)
    for (int p = 0; p < 3; ++p)
      for (Index i = 0; i < n; ++i)
        rec.channel(p)[i] += cfg.noise_std * rng.normal();
  return rec;
}

namespace {

std::array<bool, 3> random_phase_subset(SplitMix64& rng) {
  const int count = 1 + static_cast<int>(rng.below(3));
  std::array<int, 3> idx = {0, 1, 2};
  rng.shuffle(idx);
  std::array<bool, 3> out = {false, false, false};
  for (int i = 0; i < count; ++i) out[static_cast<std::size_t>(idx[i])] = true;
  return out;
}

void draw_interval(EventParams& p, int n_cycles, SplitMix64& rng) {
  const double max_dur = std::min(8.0, n_cycles / 2.0);
  const double dur = rng.uniform(1.0, max_dur);
  p.start_cycle = rng.uniform(0.25, n_cycles - dur - 0.25);
  p.end_cycle = p.start_cycle + dur;
}

}  // namespace

EventParams sample_event_params(EventLabel label, int n_cycles,
                                SplitMix64& rng) {
  EventParams p;
  p.label = label;
  p.amplitude = rng.uniform(0.95, 1.05);
  switch (label) {
    case EventLabel::Normal:
      break;
    case EventLabel::Sag:
      p.alpha = rng.uniform(0.1, 0.9);
      draw_interval(p, n_cycles, rng);
      p.phases_affected = random_phase_subset(rng);
      break;
    case EventLabel::Swell:
      p.alpha = rng.uniform(1.1 + 1e-9, 1.8);
      draw_interval(p, n_cycles, rng);
      p.phases_affected = random_phase_subset(rng);
      break;
    case EventLabel::Interruption:
      p.alpha = rng.uniform(0.0, 0.1);
      draw_interval(p, n_cycles, rng);
      p.phases_affected = {true, true, true};
      break;
    case EventLabel::Transient: {
      TransientParams t;
      t.t0_s = rng.uniform(1.0, n_cycles - 2.0) / 60.0;
      t.freq_hz = rng.uniform(300.0, 1500.0);
      t.tau_s = rng.uniform(0.3, 1.5) / 60.0;
      t.beta = rng.uniform(0.5, 1.5);
      p.transient = t;
      p.phases_affected = random_phase_subset(rng);
      break;
    }
    case EventLabel::Harmonics:
      p.harmonics[3] = rng.uniform(0.08, 0.20);
      p.harmonics[5] = rng.uniform(0.05, 0.15);
      p.harmonics[7] = rng.uniform(0.03, 0.10);
      break;
  }
  return p;
}

Dataset gen_dataset(const GenConfig& cfg) {
  int total = 0;
  for (const auto& [label, count] : cfg.class_mix) {
    if (count < 0) throw std::invalid_argument("gen_dataset: negative count");
    total += count;
  }
  if (total < 1) throw std::invalid_argument("gen_dataset: empty class mix");

  Dataset out;
  out.records.reserve(static_cast<std::size_t>(total));
  std::uint64_t ordinal = 0;
  for (EventLabel label : kAllLabels) {
    const auto it = cfg.class_mix.find(label);
    if (it == cfg.class_mix.end()) continue;
    for (int i = 0; i < it->second; ++i, ++ordinal) {
      SplitMix64 rng(substream_seed(cfg.seed, ordinal));
      const int n_cycles = rng.uniform() < cfg.short_fraction ? 8 : cfg.n_cycles;
      const EventParams params = sample_event_params(label, n_cycles, rng);
      WaveformRecord rec = gen_record(params, cfg, rng, n_cycles);
      char buf[16];
      std::snprintf(buf, sizeof buf, "%03d", i);
      rec.id = to_string(label) + "_" + buf;
      out.records.push_back(std::move(rec));
    }
  }
  return out;
}

}  // namespace pqc
