// SPDX-License-Identifier: Apache-2.0
//
// csispace - subspace statistics for MIMO Wi-Fi channel state information
// ------------------------------------------------------------------------

#pragma once

#include <cstddef>
#include <deque>
#include <optional>
#include <span>
#include <variant>

#include "csispace/csi_core.hpp"

namespace csispace
{

/// Sliding-window average over `window_len` frames.
struct BatchEstimator
{
  std::size_t window_len = 25;
};

/// Exponentially weighted recursion R[k] = lambda R[k-1] + (1 - lambda) H H^H.
struct StochasticEstimator
{
  double lambda = 0.99;
  /// When true the first frame's outer product seeds the recursion; otherwise
  /// the recursion starts from the zero matrix.
  bool seed_with_first = true;
};

struct EstimatorConfig
{
  std::variant<BatchEstimator, StochasticEstimator> variant = StochasticEstimator{};
  /// Fraction of the stationarity window shared by consecutive emitted estimates.
  double overlap_fraction = 0.0;

  void validate() const;
  bool is_batch() const { return std::holds_alternative<BatchEstimator>(variant); }
};

/// One-sided correlation estimate along one axis. The matrix is Hermitian
/// (re-symmetrized after every update) and positive semi-definite.
struct CovarianceEstimate
{
  Axis axis = Axis::Dy;
  CMatrix matrix;
  std::size_t sample_count = 0;
  EstimatorConfig estimator;
  double timestamp = 0.0;
};

/// Zero-initialized estimate of dimension `dim`.
CovarianceEstimate make_estimate(Axis axis, std::size_t dim, EstimatorConfig estimator);

/// H_(m) H_(m)^H for the unfolding along `axis`.
CMatrix outer_product(const CsiFrame& frame, Axis axis);

/// Replaces `m` by (m + m^H) / 2.
void symmetrize(CMatrix& m);

CovarianceEstimate update_stochastic(const CovarianceEstimate& state, const CsiFrame& frame);

/// Mean of the window's outer products. The window length must equal the
/// configured L and all frames must share one shape.
CovarianceEstimate update_batch(const CovarianceEstimate& state, std::span<const CsiFrame> window);

struct WindowPlan
{
  std::size_t window_len;
  std::size_t hop;
  double update_rate_hz;
};

/// Converts a stationarity period into a frame window and hop:
/// L = round(period * rate), hop = max(1, round(L * (1 - overlap))).
WindowPlan stationarity_to_window(double period_s, double sample_rate_hz, double overlap);

/// Streaming estimator: consumes frames one at a time and emits a snapshot
/// every `hop` frames once enough history is available. Holds at most L frames.
class CovarianceTracker
{
public:
  CovarianceTracker(Axis axis, EstimatorConfig estimator, std::size_t hop = 1);

  std::optional<CovarianceEstimate> push(const CsiFrame& frame);

  std::size_t frames_seen() const { return m_frames_seen; }

private:
  Axis m_axis;
  EstimatorConfig m_config;
  std::size_t m_hop;
  std::size_t m_frames_seen = 0;
  std::size_t m_since_emit = 0;
  std::optional<CovarianceEstimate> m_state;
  std::deque<CsiFrame> m_window;
};

} // namespace csispace
