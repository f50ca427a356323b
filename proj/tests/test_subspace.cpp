// SPDX-License-Identifier: Apache-2.0
//
// csispace - subspace statistics for MIMO Wi-Fi channel state information
// ------------------------------------------------------------------------

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "csispace/eigen_basis.hpp"
#include "csispace/simulator.hpp"
#include "csispace/subspace_analysis.hpp"
#include "support.hpp"

using namespace csispace;

namespace
{
EigenBasis diagonal_basis(const std::vector<double>& values)
{
  EigenBasis b;
  b.eigenvalues = values;
  const auto d = static_cast<Eigen::Index>(values.size());
  b.vectors = CMatrix::Identity(d, d);
  return b;
}

EigenBasis planted(std::size_t d, std::vector<double> signal, double noise, std::mt19937_64& rng)
{
  std::vector<double> values(d, noise);
  std::copy(signal.begin(), signal.end(), values.begin());
  return eigendecompose(
      testing::hermitian_from(testing::random_unitary(static_cast<Eigen::Index>(d), rng), values));
}
} // namespace

TEST_CASE("reconstruction MSE end points")
{
  std::mt19937_64 rng(1);
  const auto b = eigendecompose(testing::random_psd(6, rng));
  CHECK(reconstruction_mse(b, 6) < 1e-28);
  double sum = 0.0;
  for (double v : b.eigenvalues)
    sum += v * v;
  CHECK(reconstruction_mse(b, 0) == doctest::Approx(sum / 36.0).epsilon(1e-12));
  CHECK_THROWS_AS(reconstruction_mse(b, 7), ContractError);
}

TEST_CASE("diag(4, 1) keeping one component has MSE 1/4")
{
  const auto b = eigendecompose(CMatrix(Eigen::Vector2cd(4.0, 1.0).asDiagonal()));
  // ||diag(0, 1)||_F^2 / 2^2
  CHECK(reconstruction_mse(b, 1) == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(reconstruction_mse_from_spectrum(b, 1) == doctest::Approx(0.25).epsilon(1e-14));
}

TEST_CASE("matrix and spectrum MSE paths agree")
{
  std::mt19937_64 rng(2);
  for (Eigen::Index d : {3, 9, 30})
  {
    const auto b = eigendecompose(testing::random_psd(d, rng));
    for (std::size_t i = 0; i <= b.dim(); ++i)
    {
      const double a = reconstruction_mse(b, i);
      const double c = reconstruction_mse_from_spectrum(b, i);
      CHECK(std::abs(a - c) <= 1e-10 * std::max(c, 1e-300));
    }
  }
}

TEST_CASE("planted rank-2 covariance at -12 dB has boundary near 2")
{
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 5; ++trial)
  {
    const auto b = planted(30, {1.0, 0.8}, 1e-4, rng);
    const auto p = find_boundary(b, -12.0);
    CHECK(p.boundary >= 1.5);
    CHECK(p.boundary <= 2.5);
    CHECK_FALSE(p.saturated);
  }
}

TEST_CASE("boundary is interpolated on the normalized MSE curve")
{
  // Normalized MSE: keep 0 -> 1, keep 1 -> 1/2, keep 2 -> 0.
  const auto b = diagonal_basis({1.0, 1.0});
  const auto p = find_boundary(b, -12.0);
  const double target = std::pow(10.0, -1.2);
  CHECK(p.boundary == doctest::Approx(1.0 + (0.5 - target) / 0.5).epsilon(1e-12));
  CHECK(p.mse_curve.size() == 3);
  CHECK(p.normalized_mse_db[1] == doctest::Approx(10.0 * std::log10(0.5)));
}

TEST_CASE("boundary search is monotone in the target and clamps to [1, d]")
{
  std::mt19937_64 rng(4);
  const auto b = eigendecompose(testing::random_psd(12, rng));
  double previous = 0.0;
  for (double t = -1.0; t >= -40.0; t -= 1.0)
  {
    const auto p = find_boundary(b, t);
    CHECK(p.boundary >= previous);
    CHECK(p.boundary >= 1.0);
    CHECK(p.boundary <= 12.0);
    for (std::size_t i = 1; i < p.mse_curve.size(); ++i)
      CHECK(p.mse_curve[i] <= p.mse_curve[i - 1]);
    CHECK(p.e_s >= 0.0);
    CHECK(p.e_s <= 1.0);
    previous = p.boundary;
  }
  CHECK_THROWS_AS(find_boundary(b, 0.0), ContractError);
  CHECK_THROWS_AS(find_boundary(b, 3.0), ContractError);
}

TEST_CASE("the MI study grid spans -24 to -3 dB")
{
  std::mt19937_64 rng(5);
  const auto b = planted(16, {1.0, 0.6, 0.35, 0.2, 0.1}, 1e-3, rng);
  std::vector<double> boundaries;
  for (double t = -3.0; t >= -24.0; t -= 3.0)
    boundaries.push_back(find_boundary(b, t).boundary);
  CHECK(boundaries.size() == 8);
  CHECK(std::is_sorted(boundaries.begin(), boundaries.end()));
  CHECK(find_boundary(b, -6.0).boundary > 1.0);
}

TEST_CASE("zero covariance does not divide by zero")
{
  const auto b = diagonal_basis({0.0, 0.0, 0.0});
  const auto p = find_boundary(b, -12.0);
  CHECK(p.boundary == 1.0);
  CHECK(p.e_s == 0.0);
}

TEST_CASE("fractional energy examples")
{
  const auto id = diagonal_basis({1.0, 1.0, 1.0, 1.0});
  CHECK(fractional_energy(id, 4.0) == 1.0);
  CHECK(fractional_energy(id, 1.0) == doctest::Approx(0.25));
  CHECK(fractional_energy(id, 2.5) == doctest::Approx(0.625));

  const double eps = 1e-3;
  const auto p = diagonal_basis({10.0, 5.0, eps, eps});
  CHECK(fractional_energy(p, 2.0) == doctest::Approx(15.0 / (15.0 + 2.0 * eps)).epsilon(1e-14));

  std::mt19937_64 rng(6);
  const auto r = eigendecompose(testing::random_psd(7, rng));
  double previous = 0.0;
  for (double x = 1.0; x <= 7.0; x += 0.25)
  {
    const double e = fractional_energy(r, x);
    CHECK(e >= previous);
    previous = e;
  }
  CHECK(previous == doctest::Approx(1.0));
  CHECK_THROWS_AS(fractional_energy(r, 0.5), ContractError);
  CHECK_THROWS_AS(fractional_energy(r, 7.5), ContractError);
}

TEST_CASE("reconstruct_at nulls the tail and weights the straddling component")
{
  const auto b = diagonal_basis({3.0, 2.0, 1.0});
  const CMatrix r = reconstruct_at(b, 1.5);
  CHECK(r(0, 0).real() == doctest::Approx(3.0));
  CHECK(r(1, 1).real() == doctest::Approx(1.0));
  CHECK(std::abs(r(2, 2)) < 1e-15);
  CHECK(testing::relative_frobenius(reconstruct_at(b, 3.0), b.reconstruct()) < 1e-15);
}

TEST_CASE("normalized MI end points")
{
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> a(10000);
  std::vector<double> b(10000);
  for (auto& v : a)
    v = u(rng);
  for (auto& v : b)
    v = u(rng);

  const auto same = normalized_mi(a, a, 16);
  CHECK(same.value == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_FALSE(same.degenerate);
  CHECK(normalized_mi(a, b, 16).value < 0.05);

  const std::vector<double> flat(200, 2.0);
  const auto deg = normalized_mi(flat, std::vector<double>(a.begin(), a.begin() + 200));
  CHECK(deg.degenerate);
  CHECK(deg.value == 0.0);

  CHECK_THROWS_AS(normalized_mi(std::vector<double>(50, 1.0), std::vector<double>(50, 1.0)),
                  ContractError);
  CHECK_THROWS_AS(normalized_mi(a, std::vector<double>(a.begin(), a.end() - 1)), ContractError);
}

TEST_CASE("MI of a tighter reconstruction is no lower on a slowly drifting stream")
{
  ChannelSimConfig cfg;
  cfg.shape = {2, 2, 16};
  cfg.ar_coefficient = 0.0;
  cfg.signal_eigenvalues = {1.0, 0.6, 0.35, 0.2, 0.1, 0.05};
  cfg.noise_power = 1e-3;
  cfg.volatility = 0.005;
  cfg.seed = 8;
  const auto stream = generate_stream(cfg, 3000);

  std::vector<double> truth;
  std::vector<double> loose;
  std::vector<double> tight;
  for (std::size_t end = 100; end <= stream.frames.size(); end += 50)
  {
    CMatrix r = CMatrix::Zero(16, 16);
    for (std::size_t k = end - 100; k < end; ++k)
    {
      const CMatrix h = unfold(stream.frames[k], Axis::Dy).matrix;
      r += h * h.adjoint() / 100.0;
    }
    const auto b = eigendecompose(CMatrix((r + r.adjoint()) * 0.5));
    append_entries(stream.truth[end - 1].covariance(), truth);
    append_entries(reconstruct_at(b, find_boundary(b, -3.0).boundary), loose);
    append_entries(reconstruct_at(b, find_boundary(b, -24.0).boundary), tight);
  }
  CHECK(normalized_mi(tight, truth).value >= normalized_mi(loose, truth).value);
}
