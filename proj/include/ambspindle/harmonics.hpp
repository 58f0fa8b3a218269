#pragma once

// Discrete Fourier analysis of signals sampled uniformly over one revolution.

#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include <unsupported/Eigen/FFT>

namespace ambspindle {

/// Complex Fourier coefficients c_k of a periodic sequence, normalized so that
/// z_n = sum_k c_k exp(i 2 pi k n / N). Index N-k holds harmonic -k.
class HarmonicSpectrum {
 public:
  HarmonicSpectrum() = default;

  static HarmonicSpectrum of(std::span<const std::complex<double>> samples) {
    HarmonicSpectrum s;
    std::vector<std::complex<double>> in(samples.begin(), samples.end());
    Eigen::FFT<double> fft;
    fft.fwd(s.c_, in);
    const double n = static_cast<double>(in.size());
    for (auto& c : s.c_) c /= n;
    return s;
  }

  static HarmonicSpectrum of_real(std::span<const double> samples) {
    std::vector<std::complex<double>> z(samples.begin(), samples.end());
    return of(z);
  }

  std::size_t size() const { return c_.size(); }
  const std::vector<std::complex<double>>& coefficients() const { return c_; }

  std::complex<double> coefficient(long k) const {
    const long n = static_cast<long>(c_.size());
    return c_[static_cast<std::size_t>(((k % n) + n) % n)];
  }

  /// Highest harmonic index resolvable without folding onto its negative.
  std::size_t max_harmonic() const { return c_.empty() ? 0 : (c_.size() - 1) / 2; }

  /// Peak amplitude of harmonic k: |c_k| + |c_-k|. For a real signal this is
  /// the usual one-sided amplitude 2|c_k|; for F_x + j F_y it is the largest
  /// in-plane resultant that harmonic produces over a revolution.
  double amplitude(std::size_t k) const {
    if (k == 0) return std::abs(c_.at(0));
    const std::size_t n = c_.size();
    if (2 * k == n) return std::abs(c_[k]);
    return std::abs(c_.at(k)) + std::abs(c_.at(n - k));
  }

  double mean_square() const {
    double s = 0.0;
    for (const auto& c : c_) s += std::norm(c);
    return s;
  }

 private:
  std::vector<std::complex<double>> c_;
};

}  // namespace ambspindle
