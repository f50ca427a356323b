// SPDX-License-Identifier: Apache-2.0
//
// csispace - subspace statistics for MIMO Wi-Fi channel state information
// ------------------------------------------------------------------------

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

#include "csispace/covariance.hpp"
#include "csispace/simulator.hpp"
#include "support.hpp"

using namespace csispace;

namespace
{
EstimatorConfig stochastic(double lambda, bool seed_with_first = true)
{
  EstimatorConfig c;
  c.variant = StochasticEstimator{lambda, seed_with_first};
  return c;
}

EstimatorConfig batch(std::size_t l)
{
  EstimatorConfig c;
  c.variant = BatchEstimator{l};
  return c;
}

void check_hermitian_psd(const CMatrix& r)
{
  CHECK((r - r.adjoint()).cwiseAbs().maxCoeff() <= 1e-12);
  Eigen::SelfAdjointEigenSolver<CMatrix> es(r);
  const double trace = r.trace().real();
  CHECK(es.eigenvalues().minCoeff() >= -1e-9 * trace);
}
} // namespace

TEST_CASE("forgetting factor 0 keeps only the instantaneous outer product")
{
  std::mt19937_64 rng(1);
  auto est = make_estimate(Axis::Dy, 30, stochastic(0.0));
  for (int k = 0; k < 3; ++k)
  {
    const auto f = testing::random_frame({3, 3, 30}, rng, k);
    est = update_stochastic(est, f);
    CHECK((est.matrix - outer_product(f, Axis::Dy)).cwiseAbs().maxCoeff() < 1e-12);
  }
  CHECK(est.sample_count == 3);
}

TEST_CASE("constant frame from a zero start follows the geometric sum")
{
  std::mt19937_64 rng(2);
  const auto f = testing::random_frame({2, 2, 6}, rng);
  const CMatrix hh = outer_product(f, Axis::Dy);
  for (double lambda : {0.5, 0.9, 0.99})
  {
    auto est = make_estimate(Axis::Dy, 6, stochastic(lambda, false));
    for (int k = 1; k <= 40; ++k)
    {
      est = update_stochastic(est, f);
      // sum_{j<k} (1 - lambda) lambda^j, accumulated term by term
      double weight = 0.0;
      for (int j = 0; j < k; ++j)
        weight += (1.0 - lambda) * std::pow(lambda, j);
      CHECK(testing::relative_frobenius(est.matrix, weight * hh) < 1e-12);
      CHECK(weight == doctest::Approx(1.0 - std::pow(lambda, k)).epsilon(1e-12));
    }
  }
}

TEST_CASE("first frame seeds the recursion by default")
{
  std::mt19937_64 rng(3);
  const auto f = testing::random_frame({1, 2, 5}, rng);
  auto est = update_stochastic(make_estimate(Axis::Dy, 5, stochastic(0.99)), f);
  CHECK(est.matrix == outer_product(f, Axis::Dy));
}

TEST_CASE("activity-tracking forgetting factor 0.99 is accepted")
{
  CHECK_NOTHROW(stochastic(0.99).validate());
  CHECK_THROWS_AS(stochastic(1.0).validate(), ContractError);
  CHECK_THROWS_AS(stochastic(-0.1).validate(), ContractError);
  CHECK_THROWS_AS(batch(0).validate(), ContractError);
}

TEST_CASE("batch window of one is the instantaneous outer product")
{
  std::mt19937_64 rng(4);
  const auto f = testing::random_frame({3, 3, 30}, rng);
  const std::vector<CsiFrame> w{f};
  const auto est = update_batch(make_estimate(Axis::Rx, 3, batch(1)), w);
  CHECK((est.matrix - outer_product(f, Axis::Rx)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("batch update checks window length, shape and variant")
{
  std::mt19937_64 rng(5);
  std::vector<CsiFrame> w{testing::random_frame({2, 2, 4}, rng), testing::random_frame({2, 2, 4}, rng)};
  CHECK_THROWS_AS(update_batch(make_estimate(Axis::Dy, 4, batch(3)), w), ContractError);
  w.push_back(testing::random_frame({2, 2, 5}, rng));
  CHECK_THROWS_AS(update_batch(make_estimate(Axis::Dy, 4, batch(3)), w), ContractError);
  CHECK_THROWS_AS(update_batch(make_estimate(Axis::Dy, 4, stochastic(0.9)), w), ContractError);
  CHECK_THROWS_AS(update_stochastic(make_estimate(Axis::Dy, 5, stochastic(0.9)), w[0]),
                  ContractError);
}

TEST_CASE("stationarity periods map to frame windows")
{
  const auto act = stationarity_to_window(0.025, 1000.0, 0.95);
  CHECK(act.window_len == 25);
  CHECK(act.hop >= 1);
  CHECK(act.hop <= 2);
  CHECK(act.update_rate_hz == doctest::Approx(1000.0 / static_cast<double>(act.hop)));

  const auto occ = stationarity_to_window(0.050, 500.0, 0.0);
  CHECK(occ.window_len == 25);
  CHECK(occ.hop == 25);
  CHECK(occ.update_rate_hz == doctest::Approx(20.0));

  const auto unit = stationarity_to_window(1.0, 1.0, 0.0);
  CHECK(unit.window_len == 1);
  CHECK(unit.hop == 1);

  CHECK_THROWS_AS(stationarity_to_window(0.0, 100.0, 0.0), ContractError);
  CHECK_THROWS_AS(stationarity_to_window(0.1, -1.0, 0.0), ContractError);
  CHECK_THROWS_AS(stationarity_to_window(0.001, 100.0, 0.0), ContractError);
  CHECK_THROWS_AS(stationarity_to_window(0.1, 100.0, 1.0), ContractError);
}

TEST_CASE("i.i.d. unit-variance frames average to the identity")
{
  std::mt19937_64 rng(6);
  const std::size_t l = 10000;
  std::vector<CsiFrame> w;
  w.reserve(l);
  for (std::size_t k = 0; k < l; ++k)
    w.push_back(testing::random_frame({1, 1, 4}, rng, static_cast<double>(k)));
  const auto est = update_batch(make_estimate(Axis::Dy, 4, batch(l)), w);
  const double diag_mean = est.matrix.diagonal().real().mean();
  CHECK(std::abs(diag_mean - 1.0) < 0.05);
  CHECK(est.sample_count == l);
}

TEST_CASE("estimates stay Hermitian and PSD on random streams")
{
  std::mt19937_64 rng(7);
  for (Axis axis : {Axis::Rx, Axis::Tx, Axis::Dy})
  {
    const Shape s{3, 2, 9};
    auto st = make_estimate(axis, s.extent(axis), stochastic(0.9));
    CovarianceTracker tracker(axis, batch(5), 2);
    for (int k = 0; k < 40; ++k)
    {
      auto f = testing::random_frame(s, rng, k);
      st = update_stochastic(st, f);
      check_hermitian_psd(st.matrix);
      if (auto b = tracker.push(f))
        check_hermitian_psd(b->matrix);
    }
  }
}

TEST_CASE("batch is permutation invariant, stochastic is order sensitive")
{
  std::mt19937_64 rng(8);
  std::vector<CsiFrame> w;
  for (int k = 0; k < 6; ++k)
    w.push_back(testing::random_frame({2, 2, 5}, rng, k));
  std::vector<CsiFrame> r(w.rbegin(), w.rend());

  const auto a = update_batch(make_estimate(Axis::Dy, 5, batch(6)), w);
  const auto b = update_batch(make_estimate(Axis::Dy, 5, batch(6)), r);
  CHECK(testing::relative_frobenius(a.matrix, b.matrix) < 1e-14);

  auto sa = make_estimate(Axis::Dy, 5, stochastic(0.7));
  auto sb = sa;
  for (std::size_t k = 0; k < w.size(); ++k)
  {
    sa = update_stochastic(sa, w[k]);
    sb = update_stochastic(sb, r[k]);
  }
  CHECK(testing::relative_frobenius(sa.matrix, sb.matrix) > 1e-3);
}

TEST_CASE("streaming tracker emits on the hop cadence")
{
  std::mt19937_64 rng(9);
  CovarianceTracker b(Axis::Dy, batch(4), 3);
  CovarianceTracker s(Axis::Dy, stochastic(0.9), 3);
  std::vector<int> b_emit;
  std::vector<int> s_emit;
  for (int k = 0; k < 13; ++k)
  {
    const auto f = testing::random_frame({1, 1, 3}, rng, k);
    if (b.push(f))
      b_emit.push_back(k);
    if (s.push(f))
      s_emit.push_back(k);
  }
  CHECK(b_emit == std::vector<int>{3, 6, 9, 12});
  CHECK(s_emit == std::vector<int>{0, 3, 6, 9, 12});
  CHECK(b.frames_seen() == 13);
}

TEST_CASE("both estimators converge to the planted covariance")
{
  ChannelSimConfig cfg;
  cfg.shape = {2, 2, 8};
  cfg.ar_coefficient = 0.0;
  cfg.signal_eigenvalues = {1.0, 0.4};
  cfg.noise_power = 1e-2;
  cfg.seed = 10;
  const std::size_t n = 3200; // effective window >= 100 d at d = 8 (1/(1-lambda) = 800)
  const auto stream = generate_stream(cfg, n);
  const CMatrix truth = stream.truth.front().covariance();

  const auto b = update_batch(make_estimate(Axis::Dy, 8, batch(n)), stream.frames);
  CHECK(testing::relative_frobenius(b.matrix, truth) < 0.05);

  auto s = make_estimate(Axis::Dy, 8, stochastic(1.0 - 1.0 / 800.0));
  for (const auto& f : stream.frames)
    s = update_stochastic(s, f);
  CHECK(testing::relative_frobenius(s.matrix, truth) < 0.05);
}
