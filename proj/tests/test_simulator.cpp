// SPDX-License-Identifier: Apache-2.0
//
// csispace - subspace statistics for MIMO Wi-Fi channel state information
// ------------------------------------------------------------------------

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include <Eigen/SVD>

#include "csispace/covariance.hpp"
#include "csispace/eigen_basis.hpp"
#include "csispace/features.hpp"
#include "csispace/pipeline.hpp"
#include "csispace/simulator.hpp"
#include "csispace/subspace_analysis.hpp"
#include "support.hpp"

using namespace csispace;

namespace
{
ChannelSimConfig small(double w, std::uint64_t seed = 1)
{
  ChannelSimConfig c;
  c.shape = {2, 2, 6};
  c.ar_coefficient = w;
  c.signal_eigenvalues = {1.0, 0.5};
  c.noise_power = 1e-2;
  c.seed = seed;
  return c;
}

// Lag-1 autocorrelation of the real part of one tensor entry.
double lag1(const std::vector<CsiFrame>& frames, std::size_t index)
{
  double mean = 0.0;
  for (const auto& f : frames)
    mean += f.data()[index].real();
  mean /= static_cast<double>(frames.size());
  double num = 0.0;
  double den = 0.0;
  for (std::size_t k = 0; k < frames.size(); ++k)
  {
    const double x = frames[k].data()[index].real() - mean;
    den += x * x;
    if (k + 1 < frames.size())
      num += x * (frames[k + 1].data()[index].real() - mean);
  }
  return num / den;
}

double largest_principal_angle(const CMatrix& a, const CMatrix& b)
{
  Eigen::JacobiSVD<CMatrix> svd(a.adjoint() * b);
  const double smallest = svd.singularValues().minCoeff();
  return std::acos(std::min(1.0, smallest));
}
} // namespace

TEST_CASE("W = 1 freezes the channel")
{
  const auto s = generate_stream(small(1.0), 50);
  for (std::size_t k = 1; k < s.frames.size(); ++k)
    CHECK(s.frames[k].data() == s.frames[0].data());
}

TEST_CASE("W = 0 gives uncorrelated frames")
{
  const std::size_t n = 10000;
  const auto s = generate_stream(small(0.0, 2), n);
  const double sigma = 1.0 / std::sqrt(static_cast<double>(n));
  for (std::size_t idx : {0u, 7u, 23u})
    CHECK(std::abs(lag1(s.frames, idx)) < 3.0 * sigma);
}

TEST_CASE("uniform W = rho gives lag-1 autocorrelation rho")
{
  const double rho = 0.9;
  const auto s = generate_stream(small(rho, 3), 10000);
  for (std::size_t idx : {0u, 11u, 23u})
    CHECK(std::abs(lag1(s.frames, idx) - rho) < 0.05 * rho);
}

TEST_CASE("per-entry AR matrix drives each Dy-unfolding entry")
{
  ChannelSimConfig c = small(0.0, 4);
  c.shape = {1, 1, 2};
  c.signal_eigenvalues = {1.0};
  c.noise_power = 0.5;
  Eigen::MatrixXd w(2, 1);
  w << 0.95, 0.95;
  c.ar_matrix = w;
  const auto s = generate_stream(c, 10000);
  CHECK(std::abs(lag1(s.frames, 0) - 0.95) < 0.05 * 0.95);

  Eigen::MatrixXd wrong(3, 3);
  wrong.setConstant(0.5);
  c.ar_matrix = wrong;
  CHECK_THROWS_AS(c.validate(), ContractError);
}

TEST_CASE("same seed gives bit-identical streams")
{
  auto c = small(0.9, 5);
  c.volatility = 0.03;
  const auto a = generate_stream(c, 200);
  const auto b = generate_stream(c, 200);
  CHECK(a.frames == b.frames);
  for (std::size_t k = 0; k < a.truth.size(); ++k)
    CHECK(a.truth[k].signal_basis == b.truth[k].signal_basis);
  c.seed = 6;
  CHECK_FALSE(generate_stream(c, 200).frames == a.frames);
}

TEST_CASE("zero-magnitude event leaves the stream unchanged")
{
  const auto c = small(0.5, 7);
  const auto plain = generate_stream(c, 300);
  const auto with = generate_stream(plant_event(c, {0.2, EventKind::ImpulseRotation, 0.0, 0.0}), 300);
  CHECK(plain.frames == with.frames);
  const auto sustained = generate_stream(
      plant_event(c, {0.1, EventKind::SustainedRotation, 0.0, 0.2}), 300);
  CHECK(plain.frames == sustained.frames);
}

TEST_CASE("event scheduling contract")
{
  const auto c = small(0.5);
  const auto one = plant_event(c, {1.0, EventKind::SustainedRotation, 0.01, 0.5});
  CHECK_THROWS_AS(plant_event(one, {1.2, EventKind::ImpulseRotation, 0.5, 0.0}), ContractError);
  CHECK_NOTHROW(plant_event(one, {1.6, EventKind::ImpulseRotation, 0.5, 0.0}));
  CHECK_THROWS_AS(plant_event(c, {-0.1, EventKind::ImpulseRotation, 0.5, 0.0}), ContractError);
  CHECK_THROWS_AS(plant_event(c, {0.1, EventKind::SustainedRotation, 0.5, 0.0}), ContractError);
  // 10 frames at 500 Hz end before t = 1 s.
  CHECK_THROWS_AS(generate_stream(one, 10), ContractError);
  CHECK_THROWS_AS(generate_stream(c, 0), ContractError);
  CHECK(parse_event_kind(to_string(EventKind::SustainedRotation)) == EventKind::SustainedRotation);
}

TEST_CASE("impulse rotates the planted basis by the scripted angle")
{
  auto c = small(0.5, 8);
  c.signal_eigenvalues = {1.0};
  c = plant_event(c, {0.1, EventKind::ImpulseRotation, 0.7, 0.0});
  const auto s = generate_stream(c, 100);
  const std::size_t at = 50; // 0.1 s at 500 Hz
  const CVector before = s.truth[at - 1].signal_basis.col(0);
  const CVector after = s.truth[at].signal_basis.col(0);
  CHECK(std::abs(before.dot(after)) == doctest::Approx(std::cos(0.7)).epsilon(1e-9));
  CHECK(s.truth[at - 2].signal_basis == s.truth[at - 1].signal_basis);
  CHECK(s.truth[at + 1].signal_basis == s.truth[at].signal_basis);
}

TEST_CASE("ground truth stays orthonormal and rank M_s plus noise")
{
  auto c = small(0.9, 9);
  c.volatility = 0.1;
  const auto s = generate_stream(c, 300);
  for (std::size_t k = 0; k < s.truth.size(); k += 50)
  {
    const auto& t = s.truth[k];
    CHECK((t.signal_basis.adjoint() * t.signal_basis - CMatrix::Identity(2, 2))
              .cwiseAbs()
              .maxCoeff() < 1e-12);
    const auto b = eigendecompose(t.covariance());
    CHECK(b.eigenvalues[0] == doctest::Approx(1.0 + c.noise_power));
    CHECK(b.eigenvalues[1] == doctest::Approx(0.5 + c.noise_power));
    for (std::size_t i = 2; i < b.dim(); ++i)
      CHECK(b.eigenvalues[i] == doctest::Approx(c.noise_power));
  }
}

TEST_CASE("long-run sample covariance converges to C + sigma^2 I")
{
  ChannelSimConfig c;
  c.shape = {3, 3, 30};
  c.ar_coefficient = 0.0;
  c.seed = 10;
  const std::size_t n = 10000;
  const auto s = generate_stream(c, n);
  CMatrix r = CMatrix::Zero(30, 30);
  for (const auto& f : s.frames)
  {
    const CMatrix h = unfold(f, Axis::Dy).matrix;
    r += h * h.adjoint();
  }
  r /= static_cast<double>(n);
  CHECK(testing::relative_frobenius(r, s.truth.front().covariance()) < 0.05);
}

TEST_CASE("leading subspace is recovered within 5 degrees at 40 dB")
{
  ChannelSimConfig c;
  c.shape = {3, 3, 30};
  c.ar_coefficient = 0.0;
  c.signal_eigenvalues = {1.0, 0.7};
  c.noise_power = 1e-4;
  c.seed = 11;
  const auto s = generate_stream(c, 1000);
  EstimatorConfig ec;
  ec.variant = BatchEstimator{1000};
  const auto est = update_batch(make_estimate(Axis::Dy, 30, ec), s.frames);
  const auto parts = split(eigendecompose(est), 2);
  const double angle = largest_principal_angle(parts.signal_vectors, s.truth.front().signal_basis);
  CHECK(angle * 180.0 / std::numbers::pi < 5.0);
}

TEST_CASE("planted rank 2 at 40 dB gives a boundary near 2")
{
  ChannelSimConfig c;
  c.ar_coefficient = 0.0;
  c.signal_eigenvalues = {1.0, 0.8};
  c.noise_power = 1e-4;
  c.seed = 12;
  const auto s = generate_stream(c, 500);
  EstimatorConfig ec;
  ec.variant = BatchEstimator{500};
  const auto b = eigendecompose(update_batch(make_estimate(Axis::Dy, 30, ec), s.frames));
  const double boundary = find_boundary(b, -12.0).boundary;
  CHECK(boundary >= 1.5);
  CHECK(boundary <= 2.5);
}

TEST_CASE("static channel tracks at exactly 0 dB after warm-up")
{
  auto c = small(1.0, 13);
  const auto s = generate_stream(c, 120);
  PipelineConfig p;
  p.estimator.kind = EstimatorKind::Batch;
  p.estimator.window_len = 10;
  p.estimator.hop = 1;
  p.variants = {TrackerVariant::Pairwise};
  p.components = {0, 1};
  const auto r = run_pipeline(p, s.frames, c.sample_rate_hz);
  REQUIRE_FALSE(r.features.empty());
  for (const auto& f : r.features)
  {
    CHECK(f.u_mag_db == 0.0);
    CHECK(f.u == cdouble(1.0, 0.0));
  }
}

TEST_CASE("sustained rotation raises spectrogram energy during the event")
{
  ChannelSimConfig c;
  c.shape = {2, 2, 8};
  c.sample_rate_hz = 500.0;
  c.ar_coefficient = 0.0;
  c.signal_eigenvalues = {1.0, 0.3};
  c.noise_power = 1e-3;
  c.seed = 14;
  const double start = 4.0;
  const double duration = 2.0;
  c = plant_event(c, {start, EventKind::SustainedRotation, 0.1, duration});
  const auto s = generate_stream(c, 5000);

  PipelineConfig p;
  p.estimator.kind = EstimatorKind::Batch;
  p.estimator.window_len = 25;
  p.estimator.hop = 5;
  p.variants = {TrackerVariant::Slope};
  p.components = {0};
  p.spectrogram.enabled = true;
  p.spectrogram.window_s = 0.64;
  p.spectrogram.overlap = 0.5;
  const auto r = run_pipeline(p, s.frames, c.sample_rate_hz);
  REQUIRE(r.spectrogram);
  const auto& spec = *r.spectrogram;
  // Tracker time starts after the first full estimator and slope windows.
  const double t0 = r.features.front().timestamp;
  const double half = spec.window_s / 2.0;
  double inside = 0.0;
  double outside = 0.0;
  std::size_t n_in = 0;
  std::size_t n_out = 0;
  for (std::size_t f = 0; f < spec.times_s.size(); ++f)
  {
    const double centre = t0 + spec.times_s[f];
    double e = 0.0;
    for (double v : spec.power[f])
      e += v;
    if (centre - half >= start && centre + half <= start + duration)
    {
      inside += e;
      ++n_in;
    }
    else if (centre + half < start || centre - half > start + duration + 0.2)
    {
      outside += e;
      ++n_out;
    }
  }
  REQUIRE(n_in > 0);
  REQUIRE(n_out > 0);
  const double in_mean = inside / static_cast<double>(n_in);
  const double out_mean = outside / static_cast<double>(n_out);
  MESSAGE("mean frame energy during event " << in_mean << ", outside " << out_mean);
  CHECK(in_mean > 4.0 * out_mean);
}

TEST_CASE("config JSON round trip and validation")
{
  auto c = small(0.8, 15);
  c.volatility = 0.02;
  c.domain = DomainTag::TimeCir;
  c = plant_event(c, {0.5, EventKind::ImpulseRotation, 0.4, 0.0});
  Eigen::MatrixXd w(6, 4);
  w.setConstant(0.3);
  w(2, 1) = 0.9;
  c.ar_matrix = w;
  const auto back = sim_config_from_json_text(to_json_text(c));
  CHECK(back.shape == c.shape);
  CHECK(back.ar_weights() == c.ar_weights());
  CHECK(back.signal_eigenvalues == c.signal_eigenvalues);
  CHECK(back.seed == c.seed);
  CHECK(back.domain == DomainTag::TimeCir);
  REQUIRE(back.events.size() == 1);
  CHECK(back.events[0].magnitude_rad == 0.4);
  CHECK(generate_stream(back, 300).frames == generate_stream(c, 300).frames);

  CHECK_THROWS_AS(sim_config_from_json_text("{\"ar_coefficient\": 1.5}"), ContractError);
  CHECK_THROWS_AS(sim_config_from_json_text("{\"signal_eigenvalues\": [1e-6]}"), ContractError);
  CHECK_THROWS_AS(sim_config_from_json_text("{\"signal_rank\": 3}"), ContractError);
  CHECK_THROWS_AS(sim_config_from_json_text("not json"), ContractError);
}
