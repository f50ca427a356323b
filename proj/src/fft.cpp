// SPDX-License-Identifier: Apache-2.0
//
// csispace - subspace statistics for MIMO Wi-Fi channel state information
// ------------------------------------------------------------------------

#include "fft.hpp"

#include <algorithm>
#include <mutex>
#include <stdexcept>

#include <fftw3.h>

namespace csispace::detail
{

namespace
{
std::mutex& planner_mutex()
{
  static std::mutex m;
  return m;
}
} // namespace

FftPlan::FftPlan(std::size_t n, FftDirection direction)
  : m_n(n)
{
  if (n == 0)
    throw std::invalid_argument("FftPlan: zero length");

  std::lock_guard lock(planner_mutex());
  m_in = reinterpret_cast<std::complex<double>*>(fftw_malloc(sizeof(fftw_complex) * n));
  m_out = reinterpret_cast<std::complex<double>*>(fftw_malloc(sizeof(fftw_complex) * n));
  // FFTW_ESTIMATE keeps plans (and therefore results) reproducible run to run.
  m_plan = fftw_plan_dft_1d(static_cast<int>(n), reinterpret_cast<fftw_complex*>(m_in),
                            reinterpret_cast<fftw_complex*>(m_out),
                            direction == FftDirection::Forward ? FFTW_FORWARD : FFTW_BACKWARD,
                            FFTW_ESTIMATE);
  if (m_plan == nullptr)
  {
    fftw_free(m_in);
    fftw_free(m_out);
    throw std::runtime_error("FftPlan: planner failed");
  }
}

FftPlan::~FftPlan()
{
  std::lock_guard lock(planner_mutex());
  fftw_destroy_plan(static_cast<fftw_plan>(m_plan));
  fftw_free(m_in);
  fftw_free(m_out);
}

void FftPlan::execute(std::span<const std::complex<double>> in, std::span<std::complex<double>> out)
{
  if (in.size() != m_n || out.size() != m_n)
    throw std::invalid_argument("FftPlan: buffer length mismatch");
  std::copy(in.begin(), in.end(), m_in);
  fftw_execute(static_cast<fftw_plan>(m_plan));
  std::copy(m_out, m_out + m_n, out.begin());
}

} // namespace csispace::detail
