// Radix-2 FFT used only as a test oracle for spectral-power checks; the
// library itself never computes spectra.
#pragma once

#include <cassert>
#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

namespace testfft {

inline void fft_inplace(std::vector<std::complex<double>>& a) {
  const std::size_t n = a.size();
  assert(n > 0 && (n & (n - 1)) == 0);
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) {
      j ^= bit;
    }
    j ^= bit;
    if (i < j) {
      std::swap(a[i], a[j]);
    }
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double angle = -2.0 * std::numbers::pi / static_cast<double>(len);
    const std::complex<double> root(std::cos(angle), std::sin(angle));
    for (std::size_t i = 0; i < n; i += len) {
      std::complex<double> w(1.0, 0.0);
      for (std::size_t k = 0; k < len / 2; ++k) {
        const std::complex<double> even = a[i + k];
        const std::complex<double> odd = a[i + k + len / 2] * w;
        a[i + k] = even + odd;
        a[i + k + len / 2] = even - odd;
        w *= root;
      }
    }
  }
}

// Fraction of total spectral power that falls in [lo_hz, hi_hz], counting
// both the positive and the mirrored negative frequency bins.
inline double band_power_fraction(const std::vector<double>& x,
                                  double sampling_rate_hz, double lo_hz,
                                  double hi_hz) {
  const std::size_t n = x.size();
  std::vector<std::complex<double>> spectrum(n);
  for (std::size_t k = 0; k < n; ++k) {
    spectrum[k] = std::complex<double>(x[k], 0.0);
  }
  fft_inplace(spectrum);

  double total = 0.0;
  double band = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double power = std::norm(spectrum[k]);
    total += power;
    const std::size_t mirrored = k <= n / 2 ? k : n - k;
    const double freq = static_cast<double>(mirrored) * sampling_rate_hz /
                        static_cast<double>(n);
    if (freq >= lo_hz && freq <= hi_hz) {
      band += power;
    }
  }
  return total > 0.0 ? band / total : 0.0;
}

}  // namespace testfft
