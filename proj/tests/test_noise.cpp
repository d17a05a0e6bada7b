#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <limits>
#include <set>

#include "ictal/errors.hpp"
#include "ictal/fir.hpp"
#include "ictal/noise.hpp"
#include "ictal/rng.hpp"
#include "support/fft.hpp"

using namespace ictal;

namespace {

double measured_snr_db(const Vectord& clean, const Vectord& scaled_noise) {
  return 10.0 *
         std::log10(signal_power(clean) / signal_power(scaled_noise));
}

std::vector<double> to_std(const Vectord& x) {
  return {x.data(), x.data() + x.size()};
}

Vectord random_signal(Index n, std::uint64_t seed) {
  Rng rng(seed);
  Vectord x(n);
  for (Index k = 0; k < n; ++k) {
    x[k] = rng.gaussian() * 40.0 + 5.0;
  }
  return x;
}

}  // namespace

TEST_CASE("design_bandpass taps are exactly symmetric") {
  FilterSpec spec{20.0, 60.0, 1001, 173.6};
  const Vectord taps = design_bandpass<double>(spec);
  REQUIRE(taps.size() == 1001);
  bool symmetric = true;
  for (Index i = 0; i < taps.size(); ++i) {
    symmetric = symmetric && taps[i] == taps[taps.size() - 1 - i];
  }
  CHECK(symmetric);
}

TEST_CASE("design_bandpass 20-60 Hz magnitude response") {
  FilterSpec spec{20.0, 60.0, 1001, 173.6};
  const Vectord taps = design_bandpass<double>(spec);
  CHECK(filter_magnitude_at(taps, 40.0, 173.6) ==
        doctest::Approx(1.0).epsilon(0.01));
  CHECK(filter_magnitude_at(taps, 5.0, 173.6) <= 0.01);
  CHECK(filter_magnitude_at(taps, 80.0, 173.6) <= 0.01);
}

TEST_CASE("design_bandpass 1-3 Hz magnitude response") {
  FilterSpec spec{1.0, 3.0, 1001, 173.6};
  const Vectord taps = design_bandpass<double>(spec);
  const double mag = filter_magnitude_at(taps, 2.0, 173.6);
  CHECK(mag >= 0.95);
  CHECK(mag <= 1.05);
}

TEST_CASE("FilterSpec invariants") {
  CHECK_THROWS_AS(design_bandpass<double>({60.0, 20.0, 1001, 173.6}),
                  std::invalid_argument);
  CHECK_THROWS_AS(design_bandpass<double>({20.0, 90.0, 1001, 173.6}),
                  std::invalid_argument);
  CHECK_THROWS_AS(design_bandpass<double>({20.0, 60.0, 1000, 173.6}),
                  std::invalid_argument);
  CHECK_THROWS_AS(design_bandpass<double>({0.0, 60.0, 1001, 173.6}),
                  std::invalid_argument);
}

TEST_CASE("apply_filter basics") {
  SUBCASE("single unit tap is the identity") {
    Vectord taps(1);
    taps[0] = 1.0;
    const Vectord x = random_signal(64, 5);
    CHECK(apply_filter(taps, x) == x);
  }
  SUBCASE("zero input stays zero") {
    const Vectord taps = design_bandpass<double>({20.0, 60.0, 101, 173.6});
    const Vectord y = apply_filter(taps, Vectord(Vectord::Zero(256)));
    CHECK(y.cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("empty taps are rejected") {
    CHECK_THROWS_AS(apply_filter(Vectord(), Vectord(Vectord::Zero(4))),
                    std::invalid_argument);
  }
}

TEST_CASE("apply_filter passes an in-band sinusoid at unit gain") {
  const Vectord taps = design_bandpass<double>({20.0, 60.0, 1001, 173.6});
  const Index n = 4096;
  Vectord x(n);
  for (Index k = 0; k < n; ++k) {
    x[k] = std::sin(2.0 * std::numbers::pi * 40.0 * k / 173.6);
  }
  const Vectord y = apply_filter(taps, x);
  // Compare RMS over the central half, away from the zero-padded edges.
  const auto rms = [n](const Vectord& v) {
    return std::sqrt(v.segment(n / 4, n / 2).squaredNorm() /
                     static_cast<double>(n / 2));
  };
  CHECK(rms(y) == doctest::Approx(rms(x)).epsilon(0.02));
}

TEST_CASE("zero-phase filtering maps symmetric input to symmetric output") {
  const Vectord taps = design_bandpass<double>({10.0, 50.0, 201, 173.6});
  const Index n = 501;
  Vectord x(n);
  Rng rng(11);
  for (Index k = 0; k <= n / 2; ++k) {
    x[k] = rng.gaussian();
    x[n - 1 - k] = x[k];
  }
  const Vectord y = apply_filter(taps, x);
  for (Index k = 0; k < n / 2; k += 7) {
    CHECK(y[k] == doctest::Approx(y[n - 1 - k]).epsilon(1e-12));
  }
}

TEST_CASE("synthesize_noise white moments") {
  Rng rng(123);
  const Vectord x = synthesize_noise(NoiseKind::kWhite, 4096, 173.6, rng);
  const double mean = x.mean();
  const double var = (x.array() - mean).square().sum() / 4096.0;
  CHECK(mean >= -0.1);
  CHECK(mean <= 0.1);
  CHECK(var >= 0.9);
  CHECK(var <= 1.1);
}

TEST_CASE("synthesize_noise spectral confinement") {
  SUBCASE("muscle band 20-60 Hz") {
    Rng rng(7);
    const Vectord x = synthesize_noise(NoiseKind::kMuscle, 4096, 173.6, rng);
    const double fraction =
        testfft::band_power_fraction(to_std(x), 173.6, 18.0, 62.0);
    CHECK(fraction >= 0.95);
  }
  SUBCASE("eye blink band 1-3 Hz") {
    Rng rng(7);
    const Vectord x =
        synthesize_noise(NoiseKind::kEyeBlink, 4096, 173.6, rng);
    const double fraction =
        testfft::band_power_fraction(to_std(x), 173.6, 0.5, 3.5);
    CHECK(fraction >= 0.90);
  }
}

TEST_CASE("synthesize_noise is deterministic per seed and rejects short "
          "filtered requests") {
  Rng a(42);
  Rng b(42);
  CHECK(synthesize_noise(NoiseKind::kMuscle, 2048, 173.6, a) ==
        synthesize_noise(NoiseKind::kMuscle, 2048, 173.6, b));
  Rng c(42);
  CHECK_THROWS_AS(synthesize_noise(NoiseKind::kEyeBlink, 512, 173.6, c),
                  std::invalid_argument);
  CHECK_THROWS_AS(synthesize_noise(NoiseKind::kWhite, 0, 173.6, c),
                  std::invalid_argument);
}

TEST_CASE("signal_power") {
  Vectord ones(4);
  ones << 1, 1, 1, 1;
  CHECK(signal_power(ones) == 1.0);
  Vectord mixed(4);
  mixed << 2, 0, -2, 0;
  CHECK(signal_power(mixed) == 2.0);
  CHECK(signal_power(Vectord::Zero(8)) == 0.0);
  CHECK_THROWS_AS(signal_power(Vectord()), std::invalid_argument);
}

TEST_CASE("mix_at_snr closed-form scales") {
  SUBCASE("equal powers at 0 dB give alpha 1") {
    Vectord clean(2);
    clean << 1, -1;
    Vectord noise(2);
    noise << -1, 1;
    const MixResult mixed = mix_at_snr(clean, noise, 0.0);
    CHECK(mixed.noise_scale == doctest::Approx(1.0).epsilon(1e-15));
  }
  SUBCASE("power ratio 4:1 at 20 dB gives alpha 0.2") {
    Vectord clean(2);
    clean << 2, -2;  // power 4
    Vectord noise(2);
    noise << 1, -1;  // power 1
    const MixResult mixed = mix_at_snr(clean, noise, 20.0);
    CHECK(mixed.noise_scale == doctest::Approx(0.2).epsilon(1e-15));
  }
  SUBCASE("zero-power inputs are degenerate") {
    Vectord clean(2);
    clean << 1, 1;
    CHECK_THROWS_AS(mix_at_snr(clean, Vectord::Zero(2), 0.0), DataError);
    CHECK_THROWS_AS(mix_at_snr(Vectord::Zero(2), clean, 0.0), DataError);
  }
  SUBCASE("length mismatch") {
    Vectord clean(2);
    clean << 1, 1;
    CHECK_THROWS_AS(mix_at_snr(clean, Vectord::Ones(3), 0.0), ShapeError);
  }
}

TEST_CASE("mix_at_snr hits the target SNR to 1e-6 dB") {
  Rng rng(1);
  for (int trial = 0; trial < 50; ++trial) {
    const Vectord clean =
        random_signal(2048, static_cast<std::uint64_t>(1000 + trial));
    const NoiseKind kind = static_cast<NoiseKind>(trial % 3);
    Rng noise_rng(derive_seed(5, static_cast<std::uint64_t>(trial)));
    const Vectord noise = synthesize_noise(kind, 2048, 173.6, noise_rng);
    const double target = rng.uniform(-20.0, 20.0);
    const MixResult mixed = mix_at_snr(clean, noise, target);
    const Vectord scaled = mixed.noise_scale * noise;
    CHECK(std::abs(measured_snr_db(clean, scaled) - target) <= 1e-6);
    // Linearity: the added component is alpha * noise.
    const Vectord residual = mixed.noisy - clean;
    CHECK((residual - scaled).cwiseAbs().maxCoeff() <=
          1e-9 * scaled.cwiseAbs().maxCoeff() + 1e-12);
  }
}

TEST_CASE("corrupt_dataset") {
  LabeledDataset data;
  data.problem = ClassProblem::named("A-E");
  for (int s = 0; s < 6; ++s) {
    EegSignal signal;
    signal.samples = random_signal(1024, static_cast<std::uint64_t>(50 + s));
    signal.set_label = s % 2 == 0 ? 'A' : 'E';
    signal.source_id = "s" + std::to_string(s);
    data.signals.push_back(std::move(signal));
    data.labels.push_back(s % 2);
  }

  NoiseSpec spec{NoiseKind::kWhite, 0.0, 99};

  SUBCASE("per-signal SNR is exact and labels are unchanged") {
    const LabeledDataset noisy = corrupt_dataset(data, spec);
    REQUIRE(noisy.size() == data.size());
    CHECK(noisy.labels == data.labels);
    for (std::size_t i = 0; i < data.size(); ++i) {
      const Vectord residual =
          noisy.signals[i].samples - data.signals[i].samples;
      CHECK(std::abs(measured_snr_db(data.signals[i].samples, residual)) <=
            1e-6);
    }
  }
  SUBCASE("identical specs give bit-identical outputs") {
    const LabeledDataset a = corrupt_dataset(data, spec);
    const LabeledDataset b = corrupt_dataset(data, spec);
    for (std::size_t i = 0; i < a.size(); ++i) {
      CHECK(a.signals[i].samples == b.signals[i].samples);
    }
  }
  SUBCASE("realizations differ across signals") {
    const LabeledDataset noisy = corrupt_dataset(data, spec);
    std::set<double> first_samples;
    for (std::size_t i = 0; i < noisy.size(); ++i) {
      const double lead =
          noisy.signals[i].samples[0] - data.signals[i].samples[0];
      CHECK(first_samples.insert(lead).second);
    }
  }
  SUBCASE("500 signals get 500 distinct realizations") {
    LabeledDataset big;
    big.problem = data.problem;
    for (int s = 0; s < 500; ++s) {
      EegSignal signal;
      signal.samples =
          random_signal(64, static_cast<std::uint64_t>(7000 + s));
      signal.set_label = 'A';
      signal.source_id = "b" + std::to_string(s);
      big.signals.push_back(std::move(signal));
      big.labels.push_back(0);
    }
    const LabeledDataset noisy = corrupt_dataset(big, spec);
    std::set<std::pair<double, double>> leads;
    bool all_distinct = true;
    for (std::size_t i = 0; i < noisy.size(); ++i) {
      const Vectord residual =
          noisy.signals[i].samples - big.signals[i].samples;
      all_distinct =
          all_distinct && leads.insert({residual[0], residual[1]}).second;
    }
    CHECK(all_distinct);
  }
  SUBCASE("non-finite snr is rejected") {
    NoiseSpec bad{NoiseKind::kWhite,
                  std::numeric_limits<double>::infinity(), 1};
    CHECK_THROWS_AS(corrupt_dataset(data, bad), std::invalid_argument);
  }
}
