// SPDX-License-Identifier: Apache-2.0
//
// csispace - subspace statistics for MIMO Wi-Fi channel state information
// ------------------------------------------------------------------------

#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "csispace/classify.hpp"
#include "csispace/covariance.hpp"
#include "csispace/csi_core.hpp"
#include "csispace/features.hpp"
#include "csispace/simulator.hpp"
#include "csispace/tracker.hpp"

namespace csispace
{

inline constexpr const char* pipeline_schema = "csispace-pipeline/1";
inline constexpr const char* features_schema = "csispace-features/1";

enum class EstimatorKind
{
  Batch,
  Stochastic
};

struct EstimatorSettings
{
  EstimatorKind kind = EstimatorKind::Stochastic;
  double lambda = 0.99;
  /// Stationarity period; with the input sample rate it fixes the batch window
  /// length and the emission hop of either estimator.
  double stationarity_s = 0.025;
  double overlap = 0.95;
  /// Explicit overrides of the derived window length and hop.
  std::optional<std::size_t> window_len;
  std::optional<std::size_t> hop;
};

struct SpectrogramSettings
{
  bool enabled = false;
  double window_s = 1.28;
  double overlap = 0.95;
  WindowFunction window = WindowFunction::Hann;
};

struct OutputSelection
{
  bool features = true;
  bool boundary = true;
  bool spectrogram = false;
  bool cdf = false;
};

struct PipelineConfig
{
  Axis axis = Axis::Dy;
  EstimatorSettings estimator;
  std::vector<double> boundary_targets_db{-12.0};
  std::vector<TrackerVariant> variants{TrackerVariant::Slope};
  std::vector<std::size_t> components{1};
  std::size_t slope_window = 8;
  double floor_db = -80.0;
  SpectrogramSettings spectrogram;
  OutputSelection outputs;

  void validate() const;
  /// Window plan for an input sampled at `sample_rate_hz`.
  WindowPlan window_plan(double sample_rate_hz) const;
  EstimatorConfig estimator_config(double sample_rate_hz) const;
};

std::string to_json_text(const PipelineConfig& config);
PipelineConfig pipeline_config_from_json_text(const std::string& text);

struct FeatureRecord
{
  double timestamp = 0.0;
  Axis axis = Axis::Dy;
  TrackerVariant variant = TrackerVariant::Slope;
  std::size_t component = 0;
  double boundary = 0.0; ///< at the first boundary target
  double e_s = 0.0;
  cdouble u{1.0, 0.0};
  double u_mag_db = 0.0;
  std::optional<double> rate_db_per_s; ///< empty for the first sample of a series
  bool crossing = false;
};

struct BoundaryRecord
{
  double timestamp = 0.0;
  Axis axis = Axis::Dy;
  double target_db = 0.0;
  double boundary = 0.0;
  double e_s = 0.0;
  bool saturated = false;
};

struct PipelineResult
{
  std::vector<FeatureRecord> features;
  std::vector<BoundaryRecord> boundaries;
  /// Spectrogram of the |u| dB series of the first variant and component.
  std::optional<Spectrogram> spectrogram;
  WindowPlan plan{};
  Shape shape{};
  double sample_rate_hz = 0.0;
  DomainTag domain = DomainTag::FrequencyCsi;
  std::size_t frames = 0;
  std::size_t estimates = 0;

  /// |u| dB series for one variant and component, in time order.
  std::vector<double> magnitude_series(TrackerVariant variant, std::size_t component) const;
};

/// Pull-style frame source; returns nothing at end of stream.
using FrameSource = std::function<std::optional<CsiFrame>()>;

/// Runs estimator, eigendecomposition, boundary search and trackers over a
/// stream. Frames are consumed one at a time; at most one estimator window is
/// held in memory.
PipelineResult run_pipeline(const PipelineConfig& config, const FrameSource& source,
                            double sample_rate_hz);

PipelineResult run_pipeline(const PipelineConfig& config, const std::vector<CsiFrame>& frames,
                            double sample_rate_hz);

std::string features_csv(const PipelineResult& result);
std::string boundary_csv(const PipelineResult& result);
std::string spectrogram_csv(const Spectrogram& spec);
/// Empirical CDF of |u| dB per variant and component on a 101-point grid.
std::string cdf_csv(const PipelineResult& result);
std::string metadata_json(const PipelineConfig& config, const PipelineResult& result);

/// Simulator-scripted activity corpus: impulse, sustained and quiescent
/// streams whose Dy slope |u| dB series become the classifier inputs.
struct CorpusSpec
{
  std::size_t per_class = 30;
  double duration_s = 4.0;
  ChannelSimConfig base;
  PipelineConfig pipeline;
  double impulse_rad = 0.6;
  double sustained_rad_per_step = 0.02;
  double sustained_duration_s = 1.0;
  std::uint64_t seed = 1;
};

/// Defaults sized for desk-scale runs: 2x2x8 channel at 200 Hz, batch L = 10.
CorpusSpec default_corpus_spec();

std::vector<LabeledSeries> make_event_corpus(const CorpusSpec& spec);

} // namespace csispace
