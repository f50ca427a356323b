// SPDX-License-Identifier: Apache-2.0
//
// csispace - subspace statistics for MIMO Wi-Fi channel state information
// ------------------------------------------------------------------------
//
// Shared random-matrix helpers for the test binaries.

#pragma once

#include <cmath>
#include <random>
#include <vector>

#include <Eigen/QR>

#include "csispace/csi_core.hpp"

namespace csispace::testing
{

inline CMatrix random_gaussian(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng)
{
  std::normal_distribution<double> n(0.0, std::sqrt(0.5));
  CMatrix m(rows, cols);
  for (Eigen::Index c = 0; c < cols; ++c)
    for (Eigen::Index r = 0; r < rows; ++r)
    {
      const double re = n(rng);
      const double im = n(rng);
      m(r, c) = {re, im};
    }
  return m;
}

inline CMatrix random_unitary(Eigen::Index d, std::mt19937_64& rng)
{
  Eigen::HouseholderQR<CMatrix> qr(random_gaussian(d, d, rng));
  return qr.householderQ() * CMatrix::Identity(d, d);
}

/// Q diag(values) Q^H, re-symmetrized.
inline CMatrix hermitian_from(const CMatrix& q, const std::vector<double>& values)
{
  Eigen::VectorXd v(static_cast<Eigen::Index>(values.size()));
  for (std::size_t i = 0; i < values.size(); ++i)
    v(static_cast<Eigen::Index>(i)) = values[i];
  CMatrix m = q * v.asDiagonal() * q.adjoint();
  return (m + m.adjoint()) * 0.5;
}

/// G G^H for a square complex Gaussian G.
inline CMatrix random_psd(Eigen::Index d, std::mt19937_64& rng)
{
  const CMatrix g = random_gaussian(d, d, rng);
  CMatrix m = g * g.adjoint();
  return (m + m.adjoint()) * 0.5;
}

inline CsiFrame random_frame(const Shape& shape, std::mt19937_64& rng, double t = 0.0,
                             DomainTag tag = DomainTag::FrequencyCsi)
{
  std::normal_distribution<double> n(0.0, std::sqrt(0.5));
  std::vector<cdouble> data(shape.size());
  for (auto& v : data)
  {
    const double re = n(rng);
    const double im = n(rng);
    v = {re, im};
  }
  return CsiFrame(t, shape, std::move(data), tag);
}

inline double relative_frobenius(const CMatrix& a, const CMatrix& reference)
{
  return (a - reference).norm() / reference.norm();
}

} // namespace csispace::testing
