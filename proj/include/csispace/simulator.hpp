// SPDX-License-Identifier: Apache-2.0
//
// csispace - subspace statistics for MIMO Wi-Fi channel state information
// ------------------------------------------------------------------------

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "csispace/csi_core.hpp"

namespace csispace
{

enum class EventKind
{
  ImpulseRotation,  ///< one abrupt rotation of the planted basis
  SustainedRotation ///< a rotation of `magnitude_rad` every step for `duration_s`
};

std::string to_string(EventKind kind);
EventKind parse_event_kind(const std::string& text);

struct PlantedEvent
{
  double time_s = 0.0;
  EventKind kind = EventKind::ImpulseRotation;
  double magnitude_rad = 0.0;
  double duration_s = 0.0; ///< ignored for impulses
};

/// Synthetic human-modulated channel.
///
/// A latent complex process X evolves entrywise on the Dy unfolding as
/// X[k+1] = W o X[k] + sqrt(1 - W) o Xi with Xi ~ CN(0, innovation_variance),
/// and is rescaled to unit stationary variance. Frames are
/// H_(Dy) = U diag(sqrt(lambda / c)) U^H X_s + sqrt(sigma^2 / c) X_n with two
/// independent latents and c = n_rx * n_tx columns, so E{H_(Dy) H_(Dy)^H} is the
/// planted C + sigma^2 I. The planted basis U rotates by `volatility` radians
/// per step towards a random direction in its orthogonal complement.
struct ChannelSimConfig
{
  Shape shape{3, 3, 30};
  double sample_rate_hz = 500.0;
  /// Uniform AR coefficient; used when ar_matrix is empty.
  double ar_coefficient = 0.999;
  /// Per-entry AR coefficients, n_sc x (n_rx * n_tx), entries in [0, 1].
  std::optional<Eigen::MatrixXd> ar_matrix;
  double innovation_variance = 1.0;
  /// Planted signal eigenvalues of C, one per signal dimension.
  std::vector<double> signal_eigenvalues{1.0, 0.5};
  double noise_power = 1e-4;
  double volatility = 0.0;
  std::uint64_t seed = 1;
  DomainTag domain = DomainTag::FrequencyCsi;
  std::vector<PlantedEvent> events;

  std::size_t signal_rank() const { return signal_eigenvalues.size(); }
  Eigen::MatrixXd ar_weights() const;
  void validate() const;
};

std::string to_json_text(const ChannelSimConfig& config);
ChannelSimConfig sim_config_from_json_text(const std::string& text);

/// Exact per-step ground truth.
struct GroundTruth
{
  double timestamp = 0.0;
  CMatrix signal_basis; ///< n_sc x M_s, orthonormal
  std::vector<double> signal_eigenvalues;
  double noise_power = 0.0;

  std::size_t signal_rank() const { return signal_eigenvalues.size(); }
  /// C[k] + sigma^2 I.
  CMatrix covariance() const;
};

struct StepOutput
{
  CsiFrame frame;
  GroundTruth truth;
  CsiFrame signal; ///< latent S[k]
  CsiFrame noise;  ///< latent N[k]
};

class ChannelSimulator
{
public:
  explicit ChannelSimulator(ChannelSimConfig config);

  /// Emits the frame for the current step and advances the state.
  StepOutput step();

  std::size_t steps_taken() const { return m_step; }
  const ChannelSimConfig& config() const { return m_config; }

private:
  CMatrix draw_normal(Eigen::Index rows, Eigen::Index cols, double variance, std::mt19937_64& rng);
  void rotate(double angle, std::mt19937_64& rng);
  double scheduled_rotation(std::size_t step) const;
  void advance();

  ChannelSimConfig m_config;
  Eigen::MatrixXd m_w;
  Eigen::MatrixXd m_w_bar;
  Eigen::MatrixXd m_unit_scale;
  std::mt19937_64 m_rng;
  std::mt19937_64 m_motion_rng; ///< volatility rotations
  std::mt19937_64 m_event_rng;
  CMatrix m_basis;
  CMatrix m_latent_signal;
  CMatrix m_latent_noise;
  std::size_t m_step = 0;
};

struct SimStream
{
  std::vector<CsiFrame> frames;
  std::vector<GroundTruth> truth;
};

/// Throws ContractError when n_frames is zero or an event starts past the end.
void check_stream_length(const ChannelSimConfig& config, std::size_t n_frames);

/// n_frames consecutive steps; bit-identical for identical config and seed.
SimStream generate_stream(const ChannelSimConfig& config, std::size_t n_frames);

/// Copy of `config` with `event` scheduled. Throws ContractError when the event
/// overlaps an existing one or starts before t = 0.
ChannelSimConfig plant_event(const ChannelSimConfig& config, const PlantedEvent& event);

} // namespace csispace
