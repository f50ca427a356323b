// SPDX-License-Identifier: Apache-2.0
//
// csispace - subspace statistics for MIMO Wi-Fi channel state information
// ------------------------------------------------------------------------

#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace csispace
{

enum class WindowFunction
{
  Hann,
  Rectangular
};

/// Magnitude short-time Fourier transform of a real series.
struct Spectrogram
{
  std::vector<double> times_s;     ///< centre of each analysis frame
  std::vector<double> frequencies; ///< one-sided bins 0 .. fs/2, Hz
  /// power[frame][bin] = |X_k|^2 (unnormalized, one-sided, no doubling).
  std::vector<std::vector<double>> power;
  /// 10 log10 of power, floored at -300 dB.
  std::vector<std::vector<double>> magnitude_db;
  std::size_t window_samples = 0;
  std::size_t hop_samples = 0;
  double window_s = 0.0;
  double overlap = 0.0;
  double sample_rate = 0.0;

  /// Sum over frames of the full two-sided spectrum energy divided by the
  /// window length; equals the windowed series energy by Parseval.
  double total_energy() const;
};

/// Nearest power of two to window_s * sample_rate (ties round up).
std::size_t stft_window_samples(double window_s, double sample_rate);

/// STFT with window length from stft_window_samples and
/// hop = max(1, round(window * (1 - overlap))). The series must hold at least
/// one full window.
Spectrogram spectrogram(std::span<const double> series, double sample_rate, double window_s,
                        double overlap, WindowFunction window = WindowFunction::Hann);

/// Energy of the series under the analysis windows of `spec` (Parseval reference).
double windowed_energy(std::span<const double> series, const Spectrogram& spec,
                       WindowFunction window);

/// Standard empirical CDF over a sorted copy of the samples.
class EmpiricalCdf
{
public:
  explicit EmpiricalCdf(std::span<const double> samples);

  const std::vector<double>& sorted() const { return m_sorted; }
  std::size_t size() const { return m_sorted.size(); }

  /// Fraction of samples <= x (right-continuous).
  double operator()(double x) const;

  /// Linearly interpolated sample quantile (Hyndman-Fan type 7), p in [0, 1].
  double quantile(double p) const;

  /// (x, F(x)) pairs on an evenly spaced probability grid of `points` levels.
  std::vector<std::pair<double, double>> quantile_grid(std::size_t points) const;

private:
  std::vector<double> m_sorted;
};

EmpiricalCdf empirical_cdf(std::span<const double> samples);

/// Interquartile range; needs at least four samples.
double dispersion(const EmpiricalCdf& cdf);

/// Energy of the mean-removed series above `fraction_of_nyquist` of the Nyquist
/// band, from a single periodogram.
double band_energy_above(std::span<const double> series, double fraction_of_nyquist = 0.5);

} // namespace csispace
