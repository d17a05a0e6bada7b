#pragma once

#include <cstdint>
#include <string>

#include "ictal/dataio.hpp"
#include "ictal/fir.hpp"
#include "ictal/rng.hpp"
#include "ictal/types.hpp"

namespace ictal {

// Artifact models: muscle activity is Gaussian noise band-passed to
// 20-60 Hz, eye blinks to 1-3 Hz, and white noise is unfiltered Gaussian.
enum class NoiseKind { kMuscle, kEyeBlink, kWhite };

NoiseKind noise_kind_from_string(const std::string& text);
std::string to_string(NoiseKind kind);

struct NoiseSpec {
  NoiseKind kind = NoiseKind::kWhite;
  double snr_db = 0.0;
  std::uint64_t seed = 0;

  void validate() const;  // snr_db must be finite
};

inline constexpr Index kArtifactFilterTaps = 1001;

// Band-pass specification for the filtered artifact kinds; throws
// std::invalid_argument for kWhite.
FilterSpec artifact_filter(NoiseKind kind, double sampling_rate_hz);

// Unit-scale noise realization. White draws are i.i.d. standard normal;
// filtered kinds require length >= kArtifactFilterTaps.
Vectord synthesize_noise(NoiseKind kind, Index length,
                         double sampling_rate_hz, Rng& rng);

// Mean of squared samples. Throws std::invalid_argument on empty input.
double signal_power(const Vectord& x);

struct MixResult {
  Vectord noisy;
  double noise_scale;  // alpha: noisy == clean + alpha * noise
};

// Scales the noise so the mixed signal hits the target SNR exactly:
// alpha = sqrt(P_clean / (P_noise * 10^(snr_db/10))). Throws DataError when
// either input has zero power.
MixResult mix_at_snr(const Vectord& clean, const Vectord& noise,
                     double snr_db);

// Corrupts every signal with an independent realization at the requested
// SNR; labels are unchanged. Per-signal seeds are
// spec.seed ^ Rng::mix(signal index).
LabeledDataset corrupt_dataset(const LabeledDataset& data,
                               const NoiseSpec& spec);

}  // namespace ictal
