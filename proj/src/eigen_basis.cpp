// SPDX-License-Identifier: Apache-2.0
//
// csispace - subspace statistics for MIMO Wi-Fi channel state information
// ------------------------------------------------------------------------

#include "csispace/eigen_basis.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include <Eigen/Eigenvalues>

namespace csispace
{

double EigenBasis::trace() const
{
  return std::accumulate(eigenvalues.begin(), eigenvalues.end(), 0.0);
}

CMatrix EigenBasis::reconstruct() const
{
  Eigen::VectorXd d(static_cast<Eigen::Index>(eigenvalues.size()));
  for (std::size_t i = 0; i < eigenvalues.size(); ++i)
    d(static_cast<Eigen::Index>(i)) = eigenvalues[i];
  return vectors * d.asDiagonal() * vectors.adjoint();
}

namespace
{

// Index of the largest-magnitude entry; the first one wins near-ties so the
// choice is stable under rounding noise.
Eigen::Index dominant_index(const CVector& v)
{
  double best = 0.0;
  for (Eigen::Index i = 0; i < v.size(); ++i)
    best = std::max(best, std::abs(v(i)));
  for (Eigen::Index i = 0; i < v.size(); ++i)
    if (std::abs(v(i)) >= best * (1.0 - 1e-12))
      return i;
  return 0;
}

// Deterministic orthonormal basis for the span of `cluster`: repeatedly take the
// projection of the standard basis vector with the largest residual.
CMatrix canonical_cluster_basis(const CMatrix& cluster)
{
  const Eigen::Index d = cluster.rows();
  const Eigen::Index m = cluster.cols();
  CMatrix residual = cluster * cluster.adjoint();
  CMatrix out(d, m);

  for (Eigen::Index k = 0; k < m; ++k)
  {
    Eigen::VectorXd norms = residual.colwise().norm().transpose();
    const double best = norms.maxCoeff();
    Eigen::Index pick = 0;
    for (Eigen::Index j = 0; j < d; ++j)
      if (norms(j) >= best * (1.0 - 1e-9))
      {
        pick = j;
        break;
      }
    CVector q = residual.col(pick) / norms(pick);
    out.col(k) = q;
    residual -= q * (q.adjoint() * residual);
  }
  return out;
}

} // namespace

void canonicalize_phase(CMatrix& vectors)
{
  for (Eigen::Index c = 0; c < vectors.cols(); ++c)
  {
    CVector col = vectors.col(c);
    const Eigen::Index i = dominant_index(col);
    const double mag = std::abs(col(i));
    if (mag == 0.0)
      continue;
    const cdouble rot = std::conj(col(i)) / mag;
    col *= rot;
    col(i) = cdouble(std::abs(col(i)), 0.0);
    vectors.col(c) = col;
  }
}

EigenBasis eigendecompose(const CMatrix& hermitian, const EigenOptions& options)
{
  if (hermitian.rows() != hermitian.cols() || hermitian.rows() == 0)
    throw ContractError("eigendecompose: matrix must be square and non-empty");
  if (!hermitian.allFinite())
    throw ContractError("eigendecompose: non-finite entries");

  const double scale = std::max(1.0, hermitian.cwiseAbs().maxCoeff());
  if ((hermitian - hermitian.adjoint()).cwiseAbs().maxCoeff() > 1e-9 * scale)
    throw ContractError("eigendecompose: matrix is not Hermitian");

  const CMatrix a = (hermitian + hermitian.adjoint()) * 0.5;
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(a);
  if (solver.info() != Eigen::Success)
    throw EigenConvergenceError("eigendecompose: eigen solver did not converge");

  const Eigen::Index d = a.rows();
  const Eigen::VectorXd& values = solver.eigenvalues();
  const CMatrix& vecs = solver.eigenvectors();

  // Descending order; the solver returns ascending values.
  std::vector<Eigen::Index> order(static_cast<std::size_t>(d));
  for (Eigen::Index i = 0; i < d; ++i)
    order[static_cast<std::size_t>(i)] = d - 1 - i;

  EigenBasis basis;
  basis.eigenvalues.resize(static_cast<std::size_t>(d));
  basis.vectors.resize(d, d);
  for (Eigen::Index i = 0; i < d; ++i)
  {
    basis.eigenvalues[static_cast<std::size_t>(i)] = values(order[static_cast<std::size_t>(i)]);
    basis.vectors.col(i) = vecs.col(order[static_cast<std::size_t>(i)]);
  }

  const double spread =
      std::max(std::abs(basis.eigenvalues.front()), std::abs(basis.eigenvalues.back()));
  const double tie_tol = options.degeneracy_tol * spread;

  Eigen::Index start = 0;
  while (start < d)
  {
    Eigen::Index end = start + 1;
    while (end < d &&
           basis.eigenvalues[static_cast<std::size_t>(end - 1)] -
                   basis.eigenvalues[static_cast<std::size_t>(end)] <=
               tie_tol)
      ++end;

    const Eigen::Index m = end - start;
    if (m > 1)
    {
      CMatrix block = canonical_cluster_basis(basis.vectors.middleCols(start, m));
      canonicalize_phase(block);
      std::vector<Eigen::Index> idx(static_cast<std::size_t>(m));
      std::iota(idx.begin(), idx.end(), 0);
      std::stable_sort(idx.begin(), idx.end(), [&](Eigen::Index x, Eigen::Index y) {
        return dominant_index(block.col(x)) < dominant_index(block.col(y));
      });
      for (Eigen::Index k = 0; k < m; ++k)
        basis.vectors.col(start + k) = block.col(idx[static_cast<std::size_t>(k)]);
    }
    start = end;
  }

  canonicalize_phase(basis.vectors);

  const double trace = std::max(0.0, a.trace().real());
  for (auto& v : basis.eigenvalues)
  {
    if (v < 0.0)
    {
      if (v < -options.clamp_tol * trace)
        throw ContractError("eigendecompose: matrix is not positive semi-definite (eigenvalue " +
                            std::to_string(v) + ")");
      v = 0.0;
    }
  }
  return basis;
}

EigenBasis eigendecompose(const CovarianceEstimate& cov, const EigenOptions& options)
{
  return eigendecompose(cov.matrix, options);
}

SubspaceSplit split(const EigenBasis& basis, std::size_t signal_dim)
{
  const std::size_t d = basis.dim();
  if (signal_dim < 1 || signal_dim > d)
    throw ContractError("split: signal dimension " + std::to_string(signal_dim) +
                        " outside [1, " + std::to_string(d) + "]");
  const auto ms = static_cast<Eigen::Index>(signal_dim);
  const auto mn = static_cast<Eigen::Index>(d - signal_dim);

  SubspaceSplit out;
  out.signal_dim = signal_dim;
  out.noise_dim = d - signal_dim;
  out.signal_vectors = basis.vectors.leftCols(ms);
  out.noise_vectors = basis.vectors.rightCols(mn);
  out.signal_values.assign(basis.eigenvalues.begin(),
                           basis.eigenvalues.begin() + static_cast<std::ptrdiff_t>(signal_dim));
  out.noise_values.assign(basis.eigenvalues.begin() + static_cast<std::ptrdiff_t>(signal_dim),
                          basis.eigenvalues.end());
  return out;
}

} // namespace csispace
