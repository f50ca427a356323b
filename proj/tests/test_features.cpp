// SPDX-License-Identifier: Apache-2.0
//
// csispace - subspace statistics for MIMO Wi-Fi channel state information
// ------------------------------------------------------------------------

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "csispace/csi_core.hpp"
#include "csispace/features.hpp"

using namespace csispace;

TEST_CASE("a pure tone peaks in its own bin")
{
  const double fs = 800.0;
  const double f0 = 93.0;
  std::vector<double> x(4096);
  for (std::size_t i = 0; i < x.size(); ++i)
    x[i] = std::sin(2.0 * std::numbers::pi * f0 * static_cast<double>(i) / fs);
  const auto s = spectrogram(x, fs, 1.28, 0.95);
  const double bin_width = fs / static_cast<double>(s.window_samples);
  for (const auto& frame : s.power)
  {
    const auto peak = static_cast<std::size_t>(std::max_element(frame.begin(), frame.end()) -
                                               frame.begin());
    CHECK(std::abs(s.frequencies[peak] - f0) <= bin_width);
  }
}

TEST_CASE("1.28 s at 800 Hz with 95% overlap is a 1024-sample window and 51-sample hop")
{
  CHECK(stft_window_samples(1.28, 800.0) == 1024);
  std::vector<double> x(2048, 0.0);
  const auto s = spectrogram(x, 800.0, 1.28, 0.95);
  CHECK(s.window_samples == 1024);
  CHECK(s.hop_samples == 51);
  CHECK(s.frequencies.size() == 513);
  CHECK(s.times_s.size() == (2048 - 1024) / 51 + 1);
  CHECK(s.frequencies.back() == doctest::Approx(400.0));
}

TEST_CASE("window length rounds to the nearest power of two")
{
  CHECK(stft_window_samples(1.0, 100.0) == 128);
  CHECK(stft_window_samples(1.0, 90.0) == 64);
  CHECK(stft_window_samples(1.0, 96.0) == 128);
  CHECK(stft_window_samples(0.001, 10.0) == 1);
  CHECK_THROWS_AS(stft_window_samples(0.0, 10.0), ContractError);
}

TEST_CASE("white noise has a flat average spectrum")
{
  std::mt19937_64 rng(1);
  std::normal_distribution<double> n(0.0, 1.0);
  const std::size_t win = 64;
  std::vector<double> x(win * 100);
  for (auto& v : x)
    v = n(rng);
  const auto s = spectrogram(x, 64.0, 1.0, 0.0);
  REQUIRE(s.power.size() == 100);
  std::vector<double> mean(s.frequencies.size(), 0.0);
  for (const auto& frame : s.power)
    for (std::size_t k = 0; k < frame.size(); ++k)
      mean[k] += frame[k] / 100.0;
  // E|X_k|^2 = sum of squared Hann weights for unit-variance white noise.
  const double expected = 3.0 * static_cast<double>(win) / 8.0;
  for (double m : mean)
    CHECK(std::abs(10.0 * std::log10(m / expected)) <= 3.0);
}

TEST_CASE("series shorter than one window is rejected")
{
  std::vector<double> x(100, 1.0);
  CHECK_THROWS_AS(spectrogram(x, 100.0, 2.0, 0.5), ContractError);
  CHECK_THROWS_AS(spectrogram(x, 100.0, 0.5, 1.0), ContractError);
}

TEST_CASE("Parseval holds for the rectangular window")
{
  std::mt19937_64 rng(2);
  std::normal_distribution<double> n(0.0, 1.0);
  std::vector<double> x(3000);
  for (auto& v : x)
    v = n(rng);
  const auto s = spectrogram(x, 100.0, 1.28, 0.5, WindowFunction::Rectangular);
  const double reference = windowed_energy(x, s, WindowFunction::Rectangular);
  CHECK(std::abs(s.total_energy() - reference) / reference < 0.01);
}

TEST_CASE("empirical CDF examples")
{
  const std::vector<double> one{4.0};
  const auto c1 = empirical_cdf(one);
  CHECK(c1(3.999) == 0.0);
  CHECK(c1(4.0) == 1.0);

  std::vector<double> grid(100);
  for (std::size_t i = 0; i < grid.size(); ++i)
    grid[i] = static_cast<double>(i + 1);
  const auto c = empirical_cdf(grid);
  CHECK(c(50.0) == doctest::Approx(0.5));
  CHECK(c.quantile(0.0) == 1.0);
  CHECK(c.quantile(1.0) == 100.0);

  CHECK_THROWS_AS(empirical_cdf(std::vector<double>{}), ContractError);
  CHECK_THROWS_AS(c.quantile(1.5), ContractError);
}

TEST_CASE("CDF is monotone and right-continuous")
{
  std::mt19937_64 rng(3);
  std::normal_distribution<double> n(0.0, 1.0);
  std::vector<double> x(500);
  for (auto& v : x)
    v = std::round(n(rng) * 4.0) / 4.0; // ties on purpose
  const EmpiricalCdf c(x);
  double previous = 0.0;
  for (double t = -5.0; t <= 5.0; t += 0.01)
  {
    CHECK(c(t) >= previous);
    previous = c(t);
  }
  for (double v : c.sorted())
  {
    CHECK(c(v) == c(v + 1e-12));
    CHECK(c(v) > c(v - 1e-9));
  }
  const auto q = c.quantile_grid(11);
  CHECK(q.size() == 11);
  for (std::size_t i = 1; i < q.size(); ++i)
    CHECK(q[i].first >= q[i - 1].first);
}

TEST_CASE("dispersion is the interquartile range")
{
  CHECK(dispersion(EmpiricalCdf(std::vector<double>(10, -1.5))) == 0.0);
  CHECK(dispersion(EmpiricalCdf(std::vector<double>{-3.0, -3.0, 3.0, 3.0})) == doctest::Approx(6.0));
  CHECK_THROWS_AS(dispersion(EmpiricalCdf(std::vector<double>{1.0, 2.0, 3.0})), ContractError);
}

TEST_CASE("band energy above half-Nyquist separates fast and slow tones")
{
  std::vector<double> slow(1000);
  std::vector<double> fast(1000);
  for (std::size_t i = 0; i < slow.size(); ++i)
  {
    slow[i] = std::sin(2.0 * std::numbers::pi * 0.05 * static_cast<double>(i));
    fast[i] = std::sin(2.0 * std::numbers::pi * 0.40 * static_cast<double>(i));
  }
  CHECK(band_energy_above(slow) < 1e-6 * band_energy_above(fast));
  // The whole tone lands above the cut: its mean-removed energy.
  CHECK(band_energy_above(fast) == doctest::Approx(500.0).epsilon(0.01));
}
