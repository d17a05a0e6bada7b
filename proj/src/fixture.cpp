#include "ictal/fixture.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "ictal/fir.hpp"
#include "ictal/noise.hpp"
#include "ictal/rng.hpp"

namespace ictal {

namespace {

constexpr Index kFixtureFilterTaps = 129;
constexpr Index kBurstLength = 80;
constexpr double kBurstToneHz = 10.0;

// Hann-windowed tone burst written in place at `start`.
void add_burst(Vectord& samples, Index start, double phase, double amplitude,
               double sampling_rate_hz) {
  constexpr double pi = std::numbers::pi;
  for (Index k = 0; k < kBurstLength; ++k) {
    const double window =
        0.5 * (1.0 - std::cos(2.0 * pi * static_cast<double>(k) /
                              static_cast<double>(kBurstLength - 1)));
    const double t = static_cast<double>(start + k) / sampling_rate_hz;
    samples[start + k] +=
        amplitude * window * std::sin(2.0 * pi * kBurstToneHz * t + phase);
  }
}

}  // namespace

LabeledDataset make_synthetic_fixture(std::uint64_t seed) {
  FilterSpec band;
  band.low_hz = 20.0;
  band.high_hz = 60.0;
  band.num_taps = kFixtureFilterTaps;
  band.sampling_rate_hz = kBonnSamplingRateHz;
  const Vectord taps = design_bandpass<double>(band);

  LabeledDataset data;
  data.problem.name = "fixture";
  data.problem.included_sets = {{'N'}, {'P'}};
  data.problem.label_of_set = {{'N', 0}, {'P', 1}};
  data.problem.num_classes = 2;
  data.problem.seizure_class = 1;  // the burst class plays the positive role

  const Index half = kFixtureSamples / 2;
  for (int s = 0; s < kFixtureSignals; ++s) {
    const int label = s < kFixtureSignals / 2 ? 0 : 1;
    Rng rng(seed ^ Rng::mix(static_cast<std::uint64_t>(s)));

    Vectord draw(kFixtureSamples);
    for (Index k = 0; k < kFixtureSamples; ++k) {
      draw[k] = rng.gaussian();
    }
    Vectord samples = apply_filter(taps, draw);

    if (label == 1) {
      const double noise_power = signal_power(samples);
      // One burst per half of the window, position and phase randomized.
      Vectord bursts = Vectord::Zero(kFixtureSamples);
      for (int b = 0; b < 2; ++b) {
        const Index lo = b == 0 ? 0 : half;
        const Index hi = (b == 0 ? half : kFixtureSamples) - kBurstLength;
        const Index start =
            lo + static_cast<Index>(rng.below(
                     static_cast<std::uint64_t>(hi - lo + 1)));
        const double phase = rng.uniform(0.0, 2.0 * std::numbers::pi);
        add_burst(bursts, start, phase, 1.0, kBonnSamplingRateHz);
      }
      const double burst_power = signal_power(bursts);
      samples += std::sqrt(noise_power / burst_power) * bursts;
    }

    EegSignal signal;
    signal.samples = std::move(samples);
    signal.set_label = label == 0 ? 'N' : 'P';
    signal.source_id = "synthetic_" + std::to_string(s);
    signal.sampling_rate_hz = kBonnSamplingRateHz;
    data.signals.push_back(std::move(signal));
    data.labels.push_back(label);
  }
  return data;
}

}  // namespace ictal
