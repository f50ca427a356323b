// SPDX-License-Identifier: Apache-2.0
//
// csispace - subspace statistics for MIMO Wi-Fi channel state information
// ------------------------------------------------------------------------

#pragma once

#include <cstddef>
#include <deque>
#include <span>
#include <vector>

#include "csispace/eigen_basis.hpp"

namespace csispace
{

enum class TrackerVariant
{
  Pairwise,
  Slope
};

std::string to_string(TrackerVariant variant);
TrackerVariant parse_tracker_variant(const std::string& text);

/// Differential unitarity of one subspace component at one update.
struct UnitaritySample
{
  double timestamp = 0.0;
  Axis axis = Axis::Dy;
  std::size_t component = 1;
  TrackerVariant variant = TrackerVariant::Pairwise;
  /// Buffer length used by the slope variant (2 for pairwise).
  std::size_t window = 2;
  /// Complex differential unitarity u_i^H[k] u_i[k-1] (pairwise), or the
  /// per-step value implied by the slope fit.
  cdouble value{1.0, 0.0};
  /// 20 log10 |value|, floored.
  double magnitude_db = 0.0;
  /// Tracked eigenvalue is within 1e-3 * delta_0 of a neighbour, so the index
  /// pairing across time may have swapped components.
  bool crossing = false;
};

struct TrackerConfig
{
  Axis axis = Axis::Dy;
  TrackerVariant variant = TrackerVariant::Pairwise;
  std::vector<std::size_t> components{1};
  /// Number of buffered bases for the slope variant (>= 2).
  std::size_t slope_window = 8;
  double floor_db = -80.0;

  void validate() const;
};

/// Ring buffer of recent eigenbases for one (stream, axis).
class TrackerState
{
public:
  explicit TrackerState(TrackerConfig config);

  const TrackerConfig& config() const { return m_config; }
  std::size_t buffered() const { return m_bases.size(); }
  std::size_t capacity() const;

  /// Pushes `basis` and returns one sample per tracked component, or nothing
  /// while the buffer is still filling (the first basis for pairwise, the
  /// first N - 1 for slope).
  std::vector<UnitaritySample> update(const EigenBasis& basis, double timestamp);

  /// The timestamps of the buffered bases, oldest first.
  std::vector<double> timestamps() const;

private:
  struct Entry
  {
    double timestamp;
    EigenBasis basis;
  };

  std::vector<UnitaritySample> pairwise_samples() const;
  std::vector<UnitaritySample> slope_samples() const;
  void check_components(const EigenBasis& basis) const;

  TrackerConfig m_config;
  std::deque<Entry> m_bases;
};

/// Pairwise differential unitarity: u_i^H[k] u_i[k-1] for each component.
/// `state` must be configured for the pairwise variant.
std::vector<UnitaritySample> pairwise(TrackerState& state, const EigenBasis& basis,
                                      double timestamp);

/// Slope differential unitarity over the buffered window of N bases.
///
/// Cross terms c_t = u_i^H[N-1-t] u_i[t] for t = 0 .. floor(N/2)-1 have
/// separations s_t = N-1-2t. The magnitude is the least-squares slope (through
/// the origin) of 20 log10 |c_t| against s_t, i.e. a dB-per-step rate that
/// collapses to the pairwise magnitude when N = 2. The phase comes from the
/// least-squares fit of the complex cross terms through c(0) = 1.
std::vector<UnitaritySample> slope(TrackerState& state, const EigenBasis& basis, double timestamp);

/// Hermitian inner product a^H b.
cdouble inner(const CVector& a, const CVector& b);

/// 20 log10 |value| clamped from below at `floor_db`.
double magnitude_db(cdouble value, double floor_db = -80.0);

/// First difference of magnitude_db over time, in dB/s. Timestamps must be
/// strictly increasing; needs at least two samples.
std::vector<double> rate_of_change(std::span<const UnitaritySample> series);

} // namespace csispace
