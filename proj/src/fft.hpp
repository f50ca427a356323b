// SPDX-License-Identifier: Apache-2.0
//
// csispace - subspace statistics for MIMO Wi-Fi channel state information
// ------------------------------------------------------------------------

#pragma once

#include <complex>
#include <cstddef>
#include <span>

namespace csispace::detail
{

enum class FftDirection
{
  Forward,
  Inverse
};

/// Owned FFTW plan for a fixed length and direction. Unnormalized.
///
/// Plan creation is serialized internally (the FFTW planner is not
/// reentrant); execute() is safe to call concurrently on distinct plans.
class FftPlan
{
public:
  FftPlan(std::size_t n, FftDirection direction);
  ~FftPlan();

  FftPlan(const FftPlan&) = delete;
  FftPlan& operator=(const FftPlan&) = delete;

  std::size_t size() const { return m_n; }

  void execute(std::span<const std::complex<double>> in, std::span<std::complex<double>> out);

private:
  std::size_t m_n;
  void* m_plan;
  std::complex<double>* m_in;
  std::complex<double>* m_out;
};

} // namespace csispace::detail
