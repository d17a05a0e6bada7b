#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "ictal/types.hpp"

namespace ictal {

struct FilterSpec {
  double low_hz = 0.0;
  double high_hz = 0.0;
  Index num_taps = 0;  // odd, so the impulse response is symmetric
  double sampling_rate_hz = 0.0;

  void validate() const {
    if (!(sampling_rate_hz > 0.0)) {
      throw std::invalid_argument("filter: sampling rate must be positive");
    }
    if (!(0.0 < low_hz && low_hz < high_hz &&
          high_hz < sampling_rate_hz / 2.0)) {
      throw std::invalid_argument(
          "filter: need 0 < low < high < sampling_rate/2");
    }
    if (num_taps < 1 || num_taps % 2 == 0) {
      throw std::invalid_argument("filter: num_taps must be a positive odd "
                                  "count");
    }
  }
};

// Windowed-sinc linear-phase band-pass FIR: the ideal band-pass impulse
// response multiplied by a Hamming window. Only the left half is computed
// and then mirrored, so taps satisfy h[i] == h[n-1-i] exactly.
template <typename Scalar = double>
Vector<Scalar> design_bandpass(const FilterSpec& spec) {
  spec.validate();
  const Index n = spec.num_taps;
  const Index center = (n - 1) / 2;
  const double f_lo = spec.low_hz / spec.sampling_rate_hz;
  const double f_hi = spec.high_hz / spec.sampling_rate_hz;
  constexpr double pi = std::numbers::pi;

  Vector<Scalar> taps(n);
  for (Index k = 0; k <= center; ++k) {
    const double m = static_cast<double>(k - center);
    double ideal;
    if (k == center) {
      ideal = 2.0 * (f_hi - f_lo);
    } else {
      ideal = (std::sin(2.0 * pi * f_hi * m) - std::sin(2.0 * pi * f_lo * m)) /
              (pi * m);
    }
    const double window =
        0.54 - 0.46 * std::cos(2.0 * pi * static_cast<double>(k) /
                               static_cast<double>(n - 1));
    taps[k] = static_cast<Scalar>(ideal * window);
    taps[n - 1 - k] = taps[k];
  }
  return taps;
}

// Zero-phase application of a symmetric FIR: one convolution pass with the
// group delay (num_taps-1)/2 compensated. Samples outside the input are
// treated as zero; output length equals input length.
template <typename Scalar>
Vector<Scalar> apply_filter(const Vector<Scalar>& taps,
                            const Vector<Scalar>& x) {
  if (taps.size() == 0) {
    throw std::invalid_argument("apply_filter: empty taps");
  }
  const Index n = x.size();
  const Index t = taps.size();
  const Index delay = (t - 1) / 2;
  Vector<Scalar> y(n);
  for (Index i = 0; i < n; ++i) {
    const Index center = i + delay;
    const Index k_lo = std::max<Index>(0, center - (n - 1));
    const Index k_hi = std::min<Index>(t - 1, center);
    Scalar acc = 0;
    for (Index k = k_lo; k <= k_hi; ++k) {
      acc += taps[k] * x[center - k];
    }
    y[i] = acc;
  }
  return y;
}

// Magnitude of the filter's frequency response at one frequency, evaluated
// directly from the taps.
template <typename Scalar>
double filter_magnitude_at(const Vector<Scalar>& taps, double freq_hz,
                           double sampling_rate_hz) {
  const double omega = 2.0 * std::numbers::pi * freq_hz / sampling_rate_hz;
  double re = 0.0;
  double im = 0.0;
  for (Index k = 0; k < taps.size(); ++k) {
    re += static_cast<double>(taps[k]) * std::cos(omega * static_cast<double>(k));
    im -= static_cast<double>(taps[k]) * std::sin(omega * static_cast<double>(k));
  }
  return std::sqrt(re * re + im * im);
}

}  // namespace ictal
