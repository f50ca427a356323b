// SPDX-License-Identifier: Apache-2.0
//
// csispace - subspace statistics for MIMO Wi-Fi channel state information
// ------------------------------------------------------------------------

#include "csispace/tracker.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace csispace
{

std::string to_string(TrackerVariant variant)
{
  return variant == TrackerVariant::Pairwise ? "pairwise" : "slope";
}

TrackerVariant parse_tracker_variant(const std::string& text)
{
  if (text == "pairwise")
    return TrackerVariant::Pairwise;
  if (text == "slope")
    return TrackerVariant::Slope;
  throw ContractError("unknown tracker variant '" + text + "' (expected pairwise or slope)");
}

void TrackerConfig::validate() const
{
  if (components.empty())
    throw ContractError("tracker: at least one component must be tracked");
  if (variant == TrackerVariant::Slope && slope_window < 2)
    throw ContractError("tracker: slope window must be >= 2");
  if (!(floor_db < 0.0))
    throw ContractError("tracker: magnitude floor must be negative");
}

cdouble inner(const CVector& a, const CVector& b)
{
  // Identical vectors give exactly one rather than a rounded sum of squares.
  if (a.size() == b.size() && (a.array() == b.array()).all())
    return {1.0, 0.0};
  return a.dot(b); // Eigen's dot conjugates the first argument
}

double magnitude_db(cdouble value, double floor_db)
{
  const double mag = std::abs(value);
  if (mag <= 0.0)
    return floor_db;
  return std::max(floor_db, 20.0 * std::log10(mag));
}

TrackerState::TrackerState(TrackerConfig config)
  : m_config(std::move(config))
{
  m_config.validate();
}

std::size_t TrackerState::capacity() const
{
  return m_config.variant == TrackerVariant::Pairwise ? 2 : m_config.slope_window;
}

std::vector<double> TrackerState::timestamps() const
{
  std::vector<double> out;
  for (const auto& e : m_bases)
    out.push_back(e.timestamp);
  return out;
}

void TrackerState::check_components(const EigenBasis& basis) const
{
  for (std::size_t c : m_config.components)
    if (c >= basis.dim())
      throw ContractError("tracker: component " + std::to_string(c) +
                          " out of range for dimension " + std::to_string(basis.dim()));
  if (!m_bases.empty() && m_bases.back().basis.dim() != basis.dim())
    throw ContractError("tracker: basis dimension changed mid-stream");
}

std::vector<UnitaritySample> TrackerState::update(const EigenBasis& basis, double timestamp)
{
  check_components(basis);
  if (!m_bases.empty() && timestamp < m_bases.back().timestamp)
    throw ContractError("tracker: timestamps must be non-decreasing");

  m_bases.push_back({timestamp, basis});
  while (m_bases.size() > capacity())
    m_bases.pop_front();
  if (m_bases.size() < capacity())
    return {};
  return m_config.variant == TrackerVariant::Pairwise ? pairwise_samples() : slope_samples();
}

namespace
{
bool near_crossing(const EigenBasis& basis, std::size_t i)
{
  const double top = basis.eigenvalues.front();
  if (top <= 0.0)
    return true;
  const double tol = 1e-3 * top;
  const auto& ev = basis.eigenvalues;
  if (i > 0 && std::abs(ev[i - 1] - ev[i]) < tol)
    return true;
  if (i + 1 < ev.size() && std::abs(ev[i] - ev[i + 1]) < tol)
    return true;
  return false;
}
} // namespace

std::vector<UnitaritySample> TrackerState::pairwise_samples() const
{
  const auto& prev = m_bases[m_bases.size() - 2];
  const auto& curr = m_bases.back();
  std::vector<UnitaritySample> out;
  for (std::size_t c : m_config.components)
  {
    const auto ci = static_cast<Eigen::Index>(c);
    UnitaritySample s;
    s.timestamp = curr.timestamp;
    s.axis = m_config.axis;
    s.component = c;
    s.variant = TrackerVariant::Pairwise;
    s.window = 2;
    s.value = inner(curr.basis.vectors.col(ci), prev.basis.vectors.col(ci));
    s.magnitude_db = magnitude_db(s.value, m_config.floor_db);
    s.crossing = near_crossing(curr.basis, c);
    out.push_back(s);
  }
  return out;
}

std::vector<UnitaritySample> TrackerState::slope_samples() const
{
  const std::size_t n = m_bases.size();
  std::vector<UnitaritySample> out;
  for (std::size_t c : m_config.components)
  {
    const auto ci = static_cast<Eigen::Index>(c);
    double num_db = 0.0;
    double den = 0.0;
    cdouble num_c{0.0, 0.0};
    bool crossing = false;
    for (std::size_t t = 0; t < n / 2; ++t)
    {
      const auto& older = m_bases[t];
      const auto& newer = m_bases[n - 1 - t];
      const double sep = static_cast<double>(n - 1 - 2 * t);
      const cdouble cross = inner(newer.basis.vectors.col(ci), older.basis.vectors.col(ci));
      num_db += sep * magnitude_db(cross, m_config.floor_db);
      num_c += sep * (cross - cdouble(1.0, 0.0));
      den += sep * sep;
      crossing = crossing || near_crossing(newer.basis, c);
    }

    UnitaritySample s;
    s.timestamp = m_bases.back().timestamp;
    s.axis = m_config.axis;
    s.component = c;
    s.variant = TrackerVariant::Slope;
    s.window = n;
    s.magnitude_db = std::max(m_config.floor_db, num_db / den);
    const cdouble fit = cdouble(1.0, 0.0) + num_c / den;
    const double phase = std::abs(fit) > 0.0 ? std::arg(fit) : 0.0;
    s.value = std::polar(std::pow(10.0, s.magnitude_db / 20.0), phase);
    s.crossing = crossing;
    out.push_back(s);
  }
  return out;
}

std::vector<UnitaritySample> pairwise(TrackerState& state, const EigenBasis& basis,
                                      double timestamp)
{
  if (state.config().variant != TrackerVariant::Pairwise)
    throw ContractError("pairwise: tracker state is configured for the slope variant");
  return state.update(basis, timestamp);
}

std::vector<UnitaritySample> slope(TrackerState& state, const EigenBasis& basis, double timestamp)
{
  if (state.config().variant != TrackerVariant::Slope)
    throw ContractError("slope: tracker state is configured for the pairwise variant");
  return state.update(basis, timestamp);
}

std::vector<double> rate_of_change(std::span<const UnitaritySample> series)
{
  if (series.size() < 2)
    throw ContractError("rate_of_change: at least two samples required");
  std::vector<double> out;
  out.reserve(series.size() - 1);
  for (std::size_t k = 1; k < series.size(); ++k)
  {
    const double dt = series[k].timestamp - series[k - 1].timestamp;
    if (!(dt > 0.0))
      throw ContractError("rate_of_change: timestamps must be strictly increasing (sample " +
                          std::to_string(k) + ")");
    out.push_back((series[k].magnitude_db - series[k - 1].magnitude_db) / dt);
  }
  return out;
}

} // namespace csispace
