// SPDX-License-Identifier: Apache-2.0
//
// csispace - subspace statistics for MIMO Wi-Fi channel state information
// ------------------------------------------------------------------------

#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

#include "csispace/covariance.hpp"

namespace csispace
{

/// Eigenpairs of a Hermitian PSD matrix.
///
/// Eigenvalues are descending. Column i of `vectors` pairs with eigenvalue i and
/// its largest-magnitude entry is real and non-negative. The leading i columns
/// span the i-th subspace of the filtration V_0 < V_1 < ... < V.
struct EigenBasis
{
  std::vector<double> eigenvalues;
  CMatrix vectors;

  std::size_t dim() const { return eigenvalues.size(); }
  double trace() const;
  /// U diag(delta) U^H.
  CMatrix reconstruct() const;
};

class EigenConvergenceError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

struct EigenOptions
{
  /// Eigenvalues closer than this (relative to the largest |eigenvalue|) are
  /// treated as one degenerate cluster.
  double degeneracy_tol = 1e-10;
  /// Negative eigenvalues down to -clamp_tol * trace are clamped to zero.
  double clamp_tol = 1e-9;
};

/// Deterministic Hermitian eigendecomposition.
///
/// Throws ContractError on non-finite or non-Hermitian input or on an
/// eigenvalue more negative than the clamp tolerance, and
/// EigenConvergenceError when the solver does not converge.
EigenBasis eigendecompose(const CMatrix& hermitian, const EigenOptions& options = {});
EigenBasis eigendecompose(const CovarianceEstimate& cov, const EigenOptions& options = {});

/// Rotates each column so its largest-magnitude entry (first one on ties) is
/// real and non-negative. Idempotent.
void canonicalize_phase(CMatrix& vectors);

struct SubspaceSplit
{
  std::size_t signal_dim;
  std::size_t noise_dim;
  CMatrix signal_vectors;
  CMatrix noise_vectors;
  std::vector<double> signal_values;
  std::vector<double> noise_values;
};

/// Partitions the basis into the leading `signal_dim` columns and the rest.
SubspaceSplit split(const EigenBasis& basis, std::size_t signal_dim);

} // namespace csispace
