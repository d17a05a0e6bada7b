#include "ictal/noise.hpp"

#include <cmath>
#include <stdexcept>

#include "ictal/errors.hpp"

namespace ictal {

NoiseKind noise_kind_from_string(const std::string& text) {
  if (text == "muscle") {
    return NoiseKind::kMuscle;
  }
  if (text == "eyeblink") {
    return NoiseKind::kEyeBlink;
  }
  if (text == "white") {
    return NoiseKind::kWhite;
  }
  throw ConfigError("unknown noise kind: " + text +
                    " (expected muscle, eyeblink, or white)");
}

std::string to_string(NoiseKind kind) {
  switch (kind) {
    case NoiseKind::kMuscle:
      return "muscle";
    case NoiseKind::kEyeBlink:
      return "eyeblink";
    case NoiseKind::kWhite:
      return "white";
  }
  return "?";
}

void NoiseSpec::validate() const {
  if (!std::isfinite(snr_db)) {
    throw std::invalid_argument("noise: snr_db must be finite");
  }
}

FilterSpec artifact_filter(NoiseKind kind, double sampling_rate_hz) {
  FilterSpec spec;
  spec.num_taps = kArtifactFilterTaps;
  spec.sampling_rate_hz = sampling_rate_hz;
  switch (kind) {
    case NoiseKind::kMuscle:
      spec.low_hz = 20.0;
      spec.high_hz = 60.0;
      return spec;
    case NoiseKind::kEyeBlink:
      spec.low_hz = 1.0;
      spec.high_hz = 3.0;
      return spec;
    case NoiseKind::kWhite:
      break;
  }
  throw std::invalid_argument("artifact_filter: white noise is unfiltered");
}

Vectord synthesize_noise(NoiseKind kind, Index length,
                         double sampling_rate_hz, Rng& rng) {
  if (length < 1) {
    throw std::invalid_argument("synthesize_noise: length must be positive");
  }
  if (kind != NoiseKind::kWhite && length < kArtifactFilterTaps) {
    throw std::invalid_argument(
        "synthesize_noise: filtered kinds need length >= " +
        std::to_string(kArtifactFilterTaps));
  }
  Vectord draw(length);
  for (Index k = 0; k < length; ++k) {
    draw[k] = rng.gaussian();
  }
  if (kind == NoiseKind::kWhite) {
    return draw;
  }
  const Vectord taps =
      design_bandpass<double>(artifact_filter(kind, sampling_rate_hz));
  return apply_filter(taps, draw);
}

double signal_power(const Vectord& x) {
  if (x.size() == 0) {
    throw std::invalid_argument("signal_power: empty input");
  }
  return x.squaredNorm() / static_cast<double>(x.size());
}

MixResult mix_at_snr(const Vectord& clean, const Vectord& noise,
                     double snr_db) {
  if (clean.size() != noise.size()) {
    throw ShapeError("mix_at_snr: clean and noise lengths differ");
  }
  const double p_clean = signal_power(clean);
  const double p_noise = signal_power(noise);
  if (!(p_clean > 0.0) || !(p_noise > 0.0)) {
    throw DataError("mix_at_snr: degenerate input with zero power");
  }
  const double alpha =
      std::sqrt(p_clean / (p_noise * std::pow(10.0, snr_db / 10.0)));
  MixResult out;
  out.noise_scale = alpha;
  out.noisy = clean + alpha * noise;
  return out;
}

LabeledDataset corrupt_dataset(const LabeledDataset& data,
                               const NoiseSpec& spec) {
  spec.validate();
  LabeledDataset out = data;
  for (std::size_t i = 0; i < out.signals.size(); ++i) {
    auto& signal = out.signals[i];
    Rng rng(spec.seed ^ Rng::mix(static_cast<std::uint64_t>(i)));
    const Vectord noise = synthesize_noise(
        spec.kind, signal.samples.size(), signal.sampling_rate_hz, rng);
    signal.samples =
        mix_at_snr(signal.samples, noise, spec.snr_db).noisy;
  }
  return out;
}

}  // namespace ictal
