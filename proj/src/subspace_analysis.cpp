// SPDX-License-Identifier: Apache-2.0
//
// csispace - subspace statistics for MIMO Wi-Fi channel state information
// ------------------------------------------------------------------------

#include "csispace/subspace_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace csispace
{

namespace
{
void check_keep(const EigenBasis& basis, std::size_t keep)
{
  if (keep > basis.dim())
    throw ContractError("reconstruction_mse: keep=" + std::to_string(keep) + " exceeds d=" +
                        std::to_string(basis.dim()));
}

CMatrix reconstruct_with(const EigenBasis& basis, const Eigen::VectorXd& values)
{
  return basis.vectors * values.asDiagonal() * basis.vectors.adjoint();
}

Eigen::VectorXd spectrum(const EigenBasis& basis)
{
  Eigen::VectorXd v(static_cast<Eigen::Index>(basis.dim()));
  for (std::size_t i = 0; i < basis.dim(); ++i)
    v(static_cast<Eigen::Index>(i)) = basis.eigenvalues[i];
  return v;
}

double to_db(double ratio)
{
  return ratio > 0.0 ? 10.0 * std::log10(ratio) : -std::numeric_limits<double>::infinity();
}
} // namespace

double reconstruction_mse(const EigenBasis& basis, std::size_t keep)
{
  check_keep(basis, keep);
  const Eigen::VectorXd full = spectrum(basis);
  Eigen::VectorXd truncated = full;
  for (Eigen::Index j = static_cast<Eigen::Index>(keep); j < truncated.size(); ++j)
    truncated(j) = 0.0;

  // R - R' = U (delta - delta') U^H; forming the difference in the eigen-domain
  // avoids cancellation between two large reconstructions.
  const CMatrix err = reconstruct_with(basis, full - truncated);
  const double d = static_cast<double>(basis.dim());
  return err.squaredNorm() / (d * d);
}

double reconstruction_mse_from_spectrum(const EigenBasis& basis, std::size_t keep)
{
  check_keep(basis, keep);
  double sum = 0.0;
  for (std::size_t j = keep; j < basis.dim(); ++j)
    sum += basis.eigenvalues[j] * basis.eigenvalues[j];
  const double d = static_cast<double>(basis.dim());
  return sum / (d * d);
}

SubspacePartition find_boundary(const EigenBasis& basis, double target_db)
{
  if (!(target_db < 0.0))
    throw ContractError("find_boundary: target must be a negative dB level");

  const std::size_t d = basis.dim();
  SubspacePartition out;
  out.target_mse_db = target_db;
  out.mse_curve.resize(d + 1);
  out.normalized_mse_db.resize(d + 1);

  // Suffix sums keep the curve exactly non-increasing.
  const double dd = static_cast<double>(d) * static_cast<double>(d);
  double tail = 0.0;
  out.mse_curve[d] = 0.0;
  for (std::size_t j = d; j-- > 0;)
  {
    tail += basis.eigenvalues[j] * basis.eigenvalues[j];
    out.mse_curve[j] = tail / dd;
  }

  const double total = out.mse_curve[0];
  std::vector<double> normalized(d + 1, 0.0);
  for (std::size_t i = 0; i <= d; ++i)
  {
    normalized[i] = total > 0.0 ? out.mse_curve[i] / total : 0.0;
    out.normalized_mse_db[i] = to_db(normalized[i]);
  }

  const double target = std::pow(10.0, target_db / 10.0);
  std::size_t first = d + 1;
  for (std::size_t i = 0; i <= d; ++i)
    if (normalized[i] <= target)
    {
      first = i;
      break;
    }

  double boundary;
  if (first > d)
  {
    out.saturated = true;
    boundary = static_cast<double>(d);
  }
  else if (first == 0)
  {
    boundary = 0.0;
  }
  else
  {
    const double hi = normalized[first - 1];
    const double lo = normalized[first];
    boundary = static_cast<double>(first - 1) + (hi - target) / (hi - lo);
  }
  out.boundary = std::clamp(boundary, 1.0, static_cast<double>(d));
  out.e_s = fractional_energy(basis, out.boundary);
  return out;
}

double fractional_energy(const EigenBasis& basis, double boundary)
{
  const double d = static_cast<double>(basis.dim());
  if (!(boundary >= 1.0 && boundary <= d))
    throw ContractError("fractional_energy: boundary outside [1, d]");
  const double total = basis.trace();
  if (total <= 0.0)
    return 0.0;

  const auto whole = static_cast<std::size_t>(std::floor(boundary));
  const double frac = boundary - static_cast<double>(whole);
  double signal = 0.0;
  for (std::size_t j = 0; j < whole; ++j)
    signal += basis.eigenvalues[j];
  if (whole < basis.dim())
    signal += frac * basis.eigenvalues[whole];
  return std::clamp(signal / total, 0.0, 1.0);
}

CMatrix reconstruct_at(const EigenBasis& basis, double boundary)
{
  const double d = static_cast<double>(basis.dim());
  if (!(boundary >= 0.0 && boundary <= d))
    throw ContractError("reconstruct_at: boundary outside [0, d]");
  Eigen::VectorXd values = spectrum(basis);
  const auto whole = static_cast<Eigen::Index>(std::floor(boundary));
  const double frac = boundary - static_cast<double>(whole);
  for (Eigen::Index j = whole; j < values.size(); ++j)
    values(j) = j == whole ? values(j) * frac : 0.0;
  return reconstruct_with(basis, values);
}

MutualInformation normalized_mi(std::span<const double> a, std::span<const double> b,
                                std::size_t bins)
{
  if (a.size() != b.size())
    throw ContractError("normalized_mi: series lengths differ");
  if (a.size() < 100)
    throw ContractError("normalized_mi: at least 100 paired samples required");
  if (bins < 2)
    throw ContractError("normalized_mi: at least two bins required");

  const auto [amin, amax] = std::minmax_element(a.begin(), a.end());
  const auto [bmin, bmax] = std::minmax_element(b.begin(), b.end());
  if (*amin == *amax || *bmin == *bmax)
    return {0.0, true};

  const double lo = std::min(*amin, *bmin);
  const double hi = std::max(*amax, *bmax);
  const double width = (hi - lo) / static_cast<double>(bins);
  auto bin_of = [&](double x) {
    auto k = static_cast<std::size_t>((x - lo) / width);
    return std::min(k, bins - 1);
  };

  std::vector<double> joint(bins * bins, 0.0);
  std::vector<double> pa(bins, 0.0);
  std::vector<double> pb(bins, 0.0);
  const double w = 1.0 / static_cast<double>(a.size());
  for (std::size_t n = 0; n < a.size(); ++n)
  {
    const std::size_t i = bin_of(a[n]);
    const std::size_t j = bin_of(b[n]);
    joint[i * bins + j] += w;
    pa[i] += w;
    pb[j] += w;
  }

  auto entropy = [](const std::vector<double>& p) {
    double h = 0.0;
    for (double v : p)
      if (v > 0.0)
        h -= v * std::log(v);
    return h;
  };
  const double ha = entropy(pa);
  const double hb = entropy(pb);
  if (ha <= 0.0 || hb <= 0.0)
    return {0.0, true};

  double mi = 0.0;
  for (std::size_t i = 0; i < bins; ++i)
    for (std::size_t j = 0; j < bins; ++j)
    {
      const double p = joint[i * bins + j];
      if (p > 0.0)
        mi += p * std::log(p / (pa[i] * pb[j]));
    }
  return {std::clamp(mi / std::sqrt(ha * hb), 0.0, 1.0), false};
}

void append_entries(const CMatrix& m, std::vector<double>& out)
{
  out.reserve(out.size() + static_cast<std::size_t>(2 * m.size()));
  for (Eigen::Index c = 0; c < m.cols(); ++c)
    for (Eigen::Index r = 0; r < m.rows(); ++r)
    {
      out.push_back(m(r, c).real());
      out.push_back(m(r, c).imag());
    }
}

} // namespace csispace
