// SPDX-License-Identifier: Apache-2.0
//
// csispace - subspace statistics for MIMO Wi-Fi channel state information
// ------------------------------------------------------------------------

#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "csispace/eigen_basis.hpp"

namespace csispace
{

/// (1/d^2) ||R - R'_i||_F^2 where R'_i keeps the leading `keep` eigenpairs,
/// computed by building both matrices and subtracting.
double reconstruction_mse(const EigenBasis& basis, std::size_t keep);

/// Same quantity from the spectrum alone: (1/d^2) sum_{j >= keep} delta_j^2.
double reconstruction_mse_from_spectrum(const EigenBasis& basis, std::size_t keep);

/// Signal/noise partition found by the MSE search.
struct SubspacePartition
{
  /// Fractional boundary in [1, d].
  double boundary = 1.0;
  double target_mse_db = 0.0;
  /// Fractional signal energy at the boundary.
  double e_s = 1.0;
  /// Absolute reconstruction MSE for keep = 0..d (d + 1 entries, non-increasing).
  std::vector<double> mse_curve;
  /// mse_curve normalized by mse_curve[0], in dB.
  std::vector<double> normalized_mse_db;
  /// Set when even the full reconstruction misses the target.
  bool saturated = false;
};

/// MSE-guided search for the signal/noise boundary.
///
/// The MSE is normalized by the full-signal MSE (keep = 0) so `target_db` is a
/// scale-free distortion level and must be negative. The boundary is the
/// fractional keep count where the piecewise-linear normalized MSE curve meets
/// the target, clamped to [1, d].
SubspacePartition find_boundary(const EigenBasis& basis, double target_db);

/// Trace of the leading floor(boundary) eigenvalues plus the fractional part of
/// the next one, over the total trace.
double fractional_energy(const EigenBasis& basis, double boundary);

/// U diag(delta') U^H with eigenvalues beyond `boundary` nulled and the
/// straddling one weighted by the fractional part.
CMatrix reconstruct_at(const EigenBasis& basis, double boundary);

struct MutualInformation
{
  double value = 0.0;
  /// Set when either input is constant; value is then 0.
  bool degenerate = false;
};

/// Histogram mutual information of paired samples normalized by
/// sqrt(H(a) H(b)). Both series share `bins` equal-width bins spanning their
/// pooled min/max. Requires equal lengths of at least 100.
MutualInformation normalized_mi(std::span<const double> a, std::span<const double> b,
                                std::size_t bins = 16);

/// Real and imaginary parts of every entry of `m`, pooled into `out`.
void append_entries(const CMatrix& m, std::vector<double>& out);

} // namespace csispace
