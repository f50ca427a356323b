// SPDX-License-Identifier: Apache-2.0
//
// csispace - subspace statistics for MIMO Wi-Fi channel state information
// ------------------------------------------------------------------------

#include "csispace/features.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <numeric>
#include <string>

#include "csispace/csi_core.hpp"
#include "fft.hpp"

namespace csispace
{

namespace
{
std::vector<double> window_coefficients(std::size_t n, WindowFunction fn)
{
  std::vector<double> w(n, 1.0);
  if (fn == WindowFunction::Hann && n > 1)
  {
    // periodic Hann
    for (std::size_t i = 0; i < n; ++i)
      w[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) /
                                  static_cast<double>(n));
  }
  return w;
}
} // namespace

std::size_t stft_window_samples(double window_s, double sample_rate)
{
  if (!(window_s > 0.0) || !(sample_rate > 0.0))
    throw ContractError("spectrogram: window and sample rate must be positive");
  const double target = window_s * sample_rate;
  if (target < 1.0)
    return 1;
  const double lg = std::log2(target);
  const double lo = std::exp2(std::floor(lg));
  const double hi = std::exp2(std::ceil(lg));
  return static_cast<std::size_t>(target - lo < hi - target ? lo : hi);
}

double Spectrogram::total_energy() const
{
  double e = 0.0;
  const std::size_t n = window_samples;
  for (const auto& frame : power)
  {
    for (std::size_t k = 0; k < frame.size(); ++k)
    {
      const bool edge = k == 0 || (n % 2 == 0 && k == n / 2);
      e += edge ? frame[k] : 2.0 * frame[k];
    }
  }
  return e / static_cast<double>(n);
}

Spectrogram spectrogram(std::span<const double> series, double sample_rate, double window_s,
                        double overlap, WindowFunction window)
{
  if (!(overlap >= 0.0 && overlap < 1.0))
    throw ContractError("spectrogram: overlap must lie in [0, 1)");
  const std::size_t n = stft_window_samples(window_s, sample_rate);
  if (series.size() < n)
    throw ContractError("spectrogram: series has " + std::to_string(series.size()) +
                        " samples, window needs " + std::to_string(n));

  Spectrogram out;
  out.window_samples = n;
  out.hop_samples = static_cast<std::size_t>(
      std::max<long long>(1, std::llround(static_cast<double>(n) * (1.0 - overlap))));
  out.window_s = window_s;
  out.overlap = overlap;
  out.sample_rate = sample_rate;

  const std::size_t bins = n / 2 + 1;
  for (std::size_t k = 0; k < bins; ++k)
    out.frequencies.push_back(static_cast<double>(k) * sample_rate / static_cast<double>(n));

  const auto w = window_coefficients(n, window);
  detail::FftPlan plan(n, detail::FftDirection::Forward);
  std::vector<std::complex<double>> buf(n);
  std::vector<std::complex<double>> spec(n);

  for (std::size_t start = 0; start + n <= series.size(); start += out.hop_samples)
  {
    for (std::size_t i = 0; i < n; ++i)
      buf[i] = {series[start + i] * w[i], 0.0};
    plan.execute(buf, spec);

    std::vector<double> p(bins);
    std::vector<double> db(bins);
    for (std::size_t k = 0; k < bins; ++k)
    {
      p[k] = std::norm(spec[k]);
      db[k] = p[k] > 0.0 ? std::max(-300.0, 10.0 * std::log10(p[k])) : -300.0;
    }
    out.power.push_back(std::move(p));
    out.magnitude_db.push_back(std::move(db));
    out.times_s.push_back((static_cast<double>(start) + 0.5 * static_cast<double>(n)) /
                          sample_rate);
  }
  return out;
}

double windowed_energy(std::span<const double> series, const Spectrogram& spec,
                       WindowFunction window)
{
  const auto w = window_coefficients(spec.window_samples, window);
  double e = 0.0;
  for (std::size_t f = 0; f < spec.power.size(); ++f)
  {
    const std::size_t start = f * spec.hop_samples;
    for (std::size_t i = 0; i < spec.window_samples; ++i)
    {
      const double v = series[start + i] * w[i];
      e += v * v;
    }
  }
  return e;
}

EmpiricalCdf::EmpiricalCdf(std::span<const double> samples)
  : m_sorted(samples.begin(), samples.end())
{
  if (m_sorted.empty())
    throw ContractError("empirical_cdf: no samples");
  for (double v : m_sorted)
    if (std::isnan(v))
      throw ContractError("empirical_cdf: NaN sample");
  std::sort(m_sorted.begin(), m_sorted.end());
}

double EmpiricalCdf::operator()(double x) const
{
  const auto it = std::upper_bound(m_sorted.begin(), m_sorted.end(), x);
  return static_cast<double>(it - m_sorted.begin()) / static_cast<double>(m_sorted.size());
}

double EmpiricalCdf::quantile(double p) const
{
  if (!(p >= 0.0 && p <= 1.0))
    throw ContractError("quantile: probability outside [0, 1]");
  const double h = p * static_cast<double>(m_sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, m_sorted.size() - 1);
  return m_sorted[lo] + (h - static_cast<double>(lo)) * (m_sorted[hi] - m_sorted[lo]);
}

std::vector<std::pair<double, double>> EmpiricalCdf::quantile_grid(std::size_t points) const
{
  std::vector<std::pair<double, double>> out;
  if (points < 2)
    points = 2;
  for (std::size_t i = 0; i < points; ++i)
  {
    const double p = static_cast<double>(i) / static_cast<double>(points - 1);
    out.emplace_back(quantile(p), p);
  }
  return out;
}

EmpiricalCdf empirical_cdf(std::span<const double> samples)
{
  return EmpiricalCdf(samples);
}

double dispersion(const EmpiricalCdf& cdf)
{
  if (cdf.size() < 4)
    throw ContractError("dispersion: at least four samples required");
  return cdf.quantile(0.75) - cdf.quantile(0.25);
}

double band_energy_above(std::span<const double> series, double fraction_of_nyquist)
{
  if (series.size() < 4)
    throw ContractError("band_energy_above: series too short");
  const std::size_t n = series.size();
  const double mean = std::accumulate(series.begin(), series.end(), 0.0) / static_cast<double>(n);
  std::vector<std::complex<double>> buf(n);
  std::vector<std::complex<double>> spec(n);
  for (std::size_t i = 0; i < n; ++i)
    buf[i] = {series[i] - mean, 0.0};
  detail::FftPlan plan(n, detail::FftDirection::Forward);
  plan.execute(buf, spec);

  // Bin k of n covers k/n of the sample rate; Nyquist is n/2.
  const double cutoff = fraction_of_nyquist * static_cast<double>(n) / 2.0;
  double e = 0.0;
  for (std::size_t k = 0; k < n; ++k)
  {
    const double folded = static_cast<double>(std::min(k, n - k));
    if (folded > cutoff)
      e += std::norm(spec[k]);
  }
  return e / static_cast<double>(n);
}

} // namespace csispace
