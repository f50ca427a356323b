// SPDX-License-Identifier: Apache-2.0
//
// csispace - subspace statistics for MIMO Wi-Fi channel state information
// ------------------------------------------------------------------------

#include "csispace/covariance.hpp"

#include <cmath>
#include <string>

namespace csispace
{

void EstimatorConfig::validate() const
{
  if (const auto* b = std::get_if<BatchEstimator>(&variant))
  {
    if (b->window_len < 1)
      throw ContractError("batch estimator: window length must be >= 1");
  }
  else
  {
    const auto& s = std::get<StochasticEstimator>(variant);
    if (!(s.lambda >= 0.0 && s.lambda < 1.0))
      throw ContractError("stochastic estimator: forgetting factor must lie in [0, 1)");
  }
  if (!(overlap_fraction >= 0.0 && overlap_fraction < 1.0))
    throw ContractError("estimator: overlap fraction must lie in [0, 1)");
}

CovarianceEstimate make_estimate(Axis axis, std::size_t dim, EstimatorConfig estimator)
{
  estimator.validate();
  if (dim == 0)
    throw ContractError("make_estimate: dimension must be >= 1");
  const auto d = static_cast<Eigen::Index>(dim);
  return CovarianceEstimate{axis, CMatrix::Zero(d, d), 0, estimator, 0.0};
}

CMatrix outer_product(const CsiFrame& frame, Axis axis)
{
  const CMatrix h = unfold(frame, axis).matrix;
  CMatrix r = h * h.adjoint();
  symmetrize(r);
  return r;
}

void symmetrize(CMatrix& m)
{
  const CMatrix herm = (m + m.adjoint()) * 0.5;
  m = herm;
}

namespace
{
void check_dimension(const CovarianceEstimate& state, const CsiFrame& frame)
{
  const auto d = static_cast<Eigen::Index>(frame.shape().extent(state.axis));
  if (state.matrix.rows() != d || state.matrix.cols() != d)
    throw ContractError("covariance update: frame extent along " + to_string(state.axis) + " is " +
                        std::to_string(d) + " but the estimate has dimension " +
                        std::to_string(state.matrix.rows()));
}
} // namespace

CovarianceEstimate update_stochastic(const CovarianceEstimate& state, const CsiFrame& frame)
{
  const auto* cfg = std::get_if<StochasticEstimator>(&state.estimator.variant);
  if (cfg == nullptr)
    throw ContractError("update_stochastic: estimate is configured for the batch variant");
  check_dimension(state, frame);

  CovarianceEstimate next = state;
  const CMatrix inst = outer_product(frame, state.axis);
  if (state.sample_count == 0 && cfg->seed_with_first)
    next.matrix = inst;
  else
    next.matrix = cfg->lambda * state.matrix + (1.0 - cfg->lambda) * inst;
  symmetrize(next.matrix);
  next.sample_count = state.sample_count + 1;
  next.timestamp = frame.timestamp();
  return next;
}

CovarianceEstimate update_batch(const CovarianceEstimate& state, std::span<const CsiFrame> window)
{
  const auto* cfg = std::get_if<BatchEstimator>(&state.estimator.variant);
  if (cfg == nullptr)
    throw ContractError("update_batch: estimate is configured for the stochastic variant");
  if (window.size() != cfg->window_len)
    throw ContractError("update_batch: window holds " + std::to_string(window.size()) +
                        " frames, expected " + std::to_string(cfg->window_len));

  const Shape& shape = window.front().shape();
  CMatrix sum = CMatrix::Zero(state.matrix.rows(), state.matrix.cols());
  for (const auto& frame : window)
  {
    if (!(frame.shape() == shape))
      throw ContractError("update_batch: frames in the window differ in shape");
    check_dimension(state, frame);
    const CMatrix h = unfold(frame, state.axis).matrix;
    sum.noalias() += h * h.adjoint();
  }

  CovarianceEstimate next = state;
  next.matrix = sum / static_cast<double>(window.size());
  symmetrize(next.matrix);
  next.sample_count = state.sample_count + window.size();
  next.timestamp = window.back().timestamp();
  return next;
}

WindowPlan stationarity_to_window(double period_s, double sample_rate_hz, double overlap)
{
  if (!(period_s > 0.0) || !(sample_rate_hz > 0.0))
    throw ContractError("stationarity_to_window: period and sample rate must be positive");
  if (!(overlap >= 0.0 && overlap < 1.0))
    throw ContractError("stationarity_to_window: overlap must lie in [0, 1)");
  const double frames = period_s * sample_rate_hz;
  if (frames < 1.0 - 1e-9)
    throw ContractError("stationarity_to_window: period shorter than one sample");

  const auto window = static_cast<std::size_t>(std::llround(frames));
  const auto hop = static_cast<std::size_t>(
      std::max<long long>(1, std::llround(static_cast<double>(window) * (1.0 - overlap))));
  return {window, hop, sample_rate_hz / static_cast<double>(hop)};
}

CovarianceTracker::CovarianceTracker(Axis axis, EstimatorConfig estimator, std::size_t hop)
  : m_axis(axis)
  , m_config(estimator)
  , m_hop(hop)
{
  m_config.validate();
  if (hop < 1)
    throw ContractError("CovarianceTracker: hop must be >= 1");
}

std::optional<CovarianceEstimate> CovarianceTracker::push(const CsiFrame& frame)
{
  if (!m_state)
    m_state = make_estimate(m_axis, frame.shape().extent(m_axis), m_config);
  ++m_frames_seen;

  if (const auto* b = std::get_if<BatchEstimator>(&m_config.variant))
  {
    if (!m_window.empty() && !(m_window.front().shape() == frame.shape()))
      throw ContractError("CovarianceTracker: frame shape changed mid-stream");
    m_window.push_back(frame);
    if (m_window.size() > b->window_len)
      m_window.pop_front();
    if (m_window.size() < b->window_len)
      return std::nullopt;

    const bool first = m_state->sample_count == 0;
    if (!first && ++m_since_emit < m_hop)
      return std::nullopt;
    m_since_emit = 0;

    std::vector<CsiFrame> window(m_window.begin(), m_window.end());
    auto fresh = make_estimate(m_axis, m_state->matrix.rows(), m_config);
    fresh.sample_count = m_state->sample_count;
    m_state = update_batch(fresh, window);
    return m_state;
  }

  const bool first = m_state->sample_count == 0;
  m_state = update_stochastic(*m_state, frame);
  if (!first && ++m_since_emit < m_hop)
    return std::nullopt;
  m_since_emit = 0;
  return m_state;
}

} // namespace csispace
