// SPDX-License-Identifier: Apache-2.0
//
// csispace - subspace statistics for MIMO Wi-Fi channel state information
// ------------------------------------------------------------------------

#include "csispace/csi_core.hpp"

#include <cmath>

#include "fft.hpp"

namespace csispace
{

std::string to_string(Axis axis)
{
  switch (axis)
  {
  case Axis::Rx:
    return "rx";
  case Axis::Tx:
    return "tx";
  case Axis::Dy:
    return "dy";
  }
  return "?";
}

std::string to_string(DomainTag tag)
{
  return tag == DomainTag::FrequencyCsi ? "csi" : "cir";
}

Axis parse_axis(const std::string& text)
{
  if (text == "rx" || text == "Rx")
    return Axis::Rx;
  if (text == "tx" || text == "Tx")
    return Axis::Tx;
  if (text == "dy" || text == "Dy")
    return Axis::Dy;
  throw ContractError("unknown axis '" + text + "' (expected rx, tx or dy)");
}

DomainTag parse_domain(const std::string& text)
{
  if (text == "csi" || text == "frequency")
    return DomainTag::FrequencyCsi;
  if (text == "cir" || text == "time")
    return DomainTag::TimeCir;
  throw ContractError("unknown domain '" + text + "' (expected csi or cir)");
}

std::size_t Shape::extent(Axis axis) const
{
  switch (axis)
  {
  case Axis::Rx:
    return n_rx;
  case Axis::Tx:
    return n_tx;
  case Axis::Dy:
    return n_sc;
  }
  return 0;
}

CsiFrame::CsiFrame(double timestamp, Shape shape, std::vector<cdouble> data, DomainTag domain)
  : m_timestamp(timestamp)
  , m_shape(shape)
  , m_data(std::move(data))
  , m_domain(domain)
{
  validate();
}

CsiFrame::CsiFrame(double timestamp, Shape shape, DomainTag domain)
  : m_timestamp(timestamp)
  , m_shape(shape)
  , m_data(shape.size())
  , m_domain(domain)
{
  validate();
}

void CsiFrame::validate() const
{
  if (m_shape.n_rx == 0 || m_shape.n_tx == 0 || m_shape.n_sc == 0)
    throw ContractError("CsiFrame: every dimension must be >= 1");
  if (m_data.size() != m_shape.size())
    throw ContractError("CsiFrame: data length does not match shape");
  if (!std::isfinite(m_timestamp))
    throw ContractError("CsiFrame: non-finite timestamp");
  for (const auto& v : m_data)
  {
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
      throw ContractError("CsiFrame: non-finite entry");
  }
}

double CsiFrame::energy() const
{
  double sum = 0.0;
  for (const auto& v : m_data)
    sum += std::norm(v);
  return sum;
}

std::pair<std::size_t, std::size_t> unfolding_position(const Shape& shape, Axis axis,
                                                       std::size_t rx, std::size_t tx,
                                                       std::size_t sc)
{
  switch (axis)
  {
  case Axis::Rx:
    return {rx, tx * shape.n_sc + sc};
  case Axis::Tx:
    return {tx, rx * shape.n_sc + sc};
  case Axis::Dy:
    return {sc, rx * shape.n_tx + tx};
  }
  return {0, 0};
}

Unfolding unfold(const CsiFrame& frame, Axis axis)
{
  const Shape& s = frame.shape();
  const auto rows = static_cast<Eigen::Index>(s.extent(axis));
  const auto cols = static_cast<Eigen::Index>(s.size() / s.extent(axis));
  Unfolding out{axis, CMatrix(rows, cols)};

  for (std::size_t rx = 0; rx < s.n_rx; ++rx)
    for (std::size_t tx = 0; tx < s.n_tx; ++tx)
      for (std::size_t sc = 0; sc < s.n_sc; ++sc)
      {
        const auto [r, c] = unfolding_position(s, axis, rx, tx, sc);
        out.matrix(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
            frame.at(rx, tx, sc);
      }
  return out;
}

CsiFrame fold(const Unfolding& unfolding, const Shape& shape, double timestamp, DomainTag domain)
{
  const auto rows = static_cast<Eigen::Index>(shape.extent(unfolding.axis));
  const auto cols = static_cast<Eigen::Index>(shape.size() / shape.extent(unfolding.axis));
  if (unfolding.matrix.rows() != rows || unfolding.matrix.cols() != cols)
    throw ContractError("fold: unfolding dimensions do not match shape");

  CsiFrame frame(timestamp, shape, domain);
  for (std::size_t rx = 0; rx < shape.n_rx; ++rx)
    for (std::size_t tx = 0; tx < shape.n_tx; ++tx)
      for (std::size_t sc = 0; sc < shape.n_sc; ++sc)
      {
        const auto [r, c] = unfolding_position(shape, unfolding.axis, rx, tx, sc);
        frame.at(rx, tx, sc) =
            unfolding.matrix(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
      }
  return frame;
}

CsiFrame to_domain(const CsiFrame& frame, DomainTag target)
{
  if (frame.domain() == target)
    throw ContractError("to_domain: frame is already in the " + to_string(target) + " domain");

  const Shape& s = frame.shape();
  const auto direction = target == DomainTag::FrequencyCsi ? detail::FftDirection::Forward
                                                           : detail::FftDirection::Inverse;
  detail::FftPlan plan(s.n_sc, direction);
  const double scale = 1.0 / std::sqrt(static_cast<double>(s.n_sc));

  std::vector<cdouble> out(frame.data().size());
  const cdouble* src = frame.data().data();
  for (std::size_t pair = 0; pair < s.n_rx * s.n_tx; ++pair)
  {
    std::span<const cdouble> in(src + pair * s.n_sc, s.n_sc);
    std::span<cdouble> dst(out.data() + pair * s.n_sc, s.n_sc);
    plan.execute(in, dst);
    for (auto& v : dst)
      v *= scale;
  }
  return CsiFrame(frame.timestamp(), s, std::move(out), target);
}

} // namespace csispace
