#pragma once

#include <cstdint>

#include "ictal/dataio.hpp"

namespace ictal {

inline constexpr int kFixtureSignals = 200;
inline constexpr Index kFixtureSamples = 256;
inline constexpr std::uint64_t kFixtureDefaultSeed = 1;

// Synthetic two-class dataset that trains in seconds and needs no external
// data. Signals are 256 samples at the usual 173.6 Hz rate. Class 0 is
// Gaussian noise band-limited to 20-60 Hz (129-tap FIR); class 1 adds two
// Hann-windowed 10 Hz sinusoidal bursts of 80 samples, one in each half of
// the window, scaled so the burst power over the full window equals the
// noise power. 100 signals per class; class 1 is the positive class for
// sensitivity. Fully determined by the seed.
LabeledDataset make_synthetic_fixture(std::uint64_t seed =
                                          kFixtureDefaultSeed);

}  // namespace ictal
