// SPDX-License-Identifier: Apache-2.0
//
// csispace - subspace statistics for MIMO Wi-Fi channel state information
// ------------------------------------------------------------------------

#pragma once

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace csispace
{

using cdouble = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

/// Measurement axis of a CSI tensor.
enum class Axis
{
  Rx,
  Tx,
  Dy
};

/// Which representation the third tensor axis currently holds.
enum class DomainTag
{
  FrequencyCsi, ///< subcarriers
  TimeCir       ///< delay taps
};

std::string to_string(Axis axis);
std::string to_string(DomainTag tag);
Axis parse_axis(const std::string& text);
DomainTag parse_domain(const std::string& text);

/// Thrown when a value violates a documented precondition.
class ContractError : public std::invalid_argument
{
public:
  using std::invalid_argument::invalid_argument;
};

struct Shape
{
  std::size_t n_rx = 1;
  std::size_t n_tx = 1;
  std::size_t n_sc = 1;

  std::size_t size() const { return n_rx * n_tx * n_sc; }
  std::size_t extent(Axis axis) const;
  bool operator==(const Shape&) const = default;
};

/// One timestamped Rx x Tx x Sc complex tensor, linear scale.
///
/// Storage is Rx-major, then Tx, then Sc (the last index varies fastest).
class CsiFrame
{
public:
  CsiFrame(double timestamp, Shape shape, std::vector<cdouble> data,
           DomainTag domain = DomainTag::FrequencyCsi);

  /// Zero-filled frame.
  CsiFrame(double timestamp, Shape shape, DomainTag domain = DomainTag::FrequencyCsi);

  double timestamp() const { return m_timestamp; }
  const Shape& shape() const { return m_shape; }
  DomainTag domain() const { return m_domain; }
  const std::vector<cdouble>& data() const { return m_data; }

  const cdouble& at(std::size_t rx, std::size_t tx, std::size_t sc) const
  {
    return m_data[index(rx, tx, sc)];
  }
  cdouble& at(std::size_t rx, std::size_t tx, std::size_t sc) { return m_data[index(rx, tx, sc)]; }

  std::size_t index(std::size_t rx, std::size_t tx, std::size_t sc) const
  {
    return (rx * m_shape.n_tx + tx) * m_shape.n_sc + sc;
  }

  /// Squared Frobenius norm of the tensor.
  double energy() const;

  bool operator==(const CsiFrame&) const = default;

private:
  void validate() const;

  double m_timestamp;
  Shape m_shape;
  std::vector<cdouble> m_data;
  DomainTag m_domain;
};

/// Mode unfolding of a frame along one axis.
///
/// Rows index the selected axis. Columns run over the two remaining axes in
/// lexicographic order with Rx outermost, then Tx, then Dy.
struct Unfolding
{
  Axis axis;
  CMatrix matrix;
};

/// Row/column of tensor element (rx, tx, sc) inside the unfolding along `axis`.
std::pair<std::size_t, std::size_t> unfolding_position(const Shape& shape, Axis axis,
                                                       std::size_t rx, std::size_t tx,
                                                       std::size_t sc);

Unfolding unfold(const CsiFrame& frame, Axis axis);

/// Inverse of unfold; `shape` must be the shape the unfolding came from.
CsiFrame fold(const Unfolding& unfolding, const Shape& shape, double timestamp = 0.0,
              DomainTag domain = DomainTag::FrequencyCsi);

/// Unitary DFT/IDFT along the third axis, per (rx, tx) pair.
///
/// FrequencyCsi -> TimeCir applies the inverse transform, TimeCir -> FrequencyCsi
/// the forward one; both are scaled by 1/sqrt(N). Requesting the tag the frame
/// already carries throws ContractError.
CsiFrame to_domain(const CsiFrame& frame, DomainTag target);

} // namespace csispace
