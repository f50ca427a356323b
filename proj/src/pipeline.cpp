// SPDX-License-Identifier: Apache-2.0
//
// csispace - subspace statistics for MIMO Wi-Fi channel state information
// ------------------------------------------------------------------------

#include "csispace/pipeline.hpp"

#include <cmath>
#include <map>
#include <random>

#include <fmt/format.h>
#include <json.hpp>

#include "csispace/eigen_basis.hpp"
#include "csispace/subspace_analysis.hpp"

namespace csispace
{

using nlohmann::json;

void PipelineConfig::validate() const
{
  if (estimator.kind == EstimatorKind::Stochastic &&
      !(estimator.lambda > 0.0 && estimator.lambda < 1.0))
    throw ContractError("pipeline: forgetting factor must lie in (0, 1)");
  if (!(estimator.stationarity_s > 0.0))
    throw ContractError("pipeline: stationarity period must be positive");
  if (!(estimator.overlap >= 0.0 && estimator.overlap < 1.0))
    throw ContractError("pipeline: estimator overlap must lie in [0, 1)");
  if (estimator.window_len && *estimator.window_len < 1)
    throw ContractError("pipeline: window length must be >= 1");
  if (estimator.hop && *estimator.hop < 1)
    throw ContractError("pipeline: hop must be >= 1");
  if (boundary_targets_db.empty())
    throw ContractError("pipeline: at least one boundary target required");
  for (double t : boundary_targets_db)
    if (!(t < 0.0))
      throw ContractError(fmt::format("pipeline: boundary target {} dB must be negative", t));
  if (variants.empty())
    throw ContractError("pipeline: at least one tracker variant required");
  TrackerConfig probe{axis, TrackerVariant::Slope, components, slope_window, floor_db};
  probe.validate();
  if (spectrogram.enabled && !(spectrogram.window_s > 0.0 && spectrogram.overlap >= 0.0 &&
                               spectrogram.overlap < 1.0))
    throw ContractError("pipeline: spectrogram needs a positive window and overlap in [0, 1)");
}

WindowPlan PipelineConfig::window_plan(double sample_rate_hz) const
{
  WindowPlan plan = stationarity_to_window(estimator.stationarity_s, sample_rate_hz, estimator.overlap);
  if (estimator.window_len)
    plan.window_len = *estimator.window_len;
  if (estimator.hop)
    plan.hop = *estimator.hop;
  plan.update_rate_hz = sample_rate_hz / static_cast<double>(plan.hop);
  return plan;
}

EstimatorConfig PipelineConfig::estimator_config(double sample_rate_hz) const
{
  const WindowPlan plan = window_plan(sample_rate_hz);
  EstimatorConfig cfg;
  if (estimator.kind == EstimatorKind::Batch)
    cfg.variant = BatchEstimator{plan.window_len};
  else
    cfg.variant = StochasticEstimator{estimator.lambda, true};
  cfg.overlap_fraction = estimator.overlap;
  cfg.validate();
  return cfg;
}

namespace
{
std::string window_name(WindowFunction w)
{
  return w == WindowFunction::Hann ? "hann" : "rectangular";
}

WindowFunction parse_window(const std::string& s)
{
  if (s == "hann")
    return WindowFunction::Hann;
  if (s == "rectangular")
    return WindowFunction::Rectangular;
  throw ContractError("unknown window function '" + s + "'");
}

json config_to_json(const PipelineConfig& c)
{
  json j;
  j["schema"] = pipeline_schema;
  j["axis"] = to_string(c.axis);
  json e;
  e["kind"] = c.estimator.kind == EstimatorKind::Batch ? "batch" : "stochastic";
  e["lambda"] = c.estimator.lambda;
  e["stationarity_s"] = c.estimator.stationarity_s;
  e["overlap"] = c.estimator.overlap;
  if (c.estimator.window_len)
    e["window_len"] = *c.estimator.window_len;
  if (c.estimator.hop)
    e["hop"] = *c.estimator.hop;
  j["estimator"] = e;
  j["boundary_targets_db"] = c.boundary_targets_db;
  json variants = json::array();
  for (auto v : c.variants)
    variants.push_back(to_string(v));
  j["tracker"] = {{"variants", variants},
                  {"components", c.components},
                  {"slope_window", c.slope_window},
                  {"floor_db", c.floor_db}};
  j["spectrogram"] = {{"enabled", c.spectrogram.enabled},
                      {"window_s", c.spectrogram.window_s},
                      {"overlap", c.spectrogram.overlap},
                      {"window", window_name(c.spectrogram.window)}};
  j["outputs"] = {{"features", c.outputs.features},
                  {"boundary", c.outputs.boundary},
                  {"spectrogram", c.outputs.spectrogram},
                  {"cdf", c.outputs.cdf}};
  return j;
}
} // namespace

std::string to_json_text(const PipelineConfig& config)
{
  return config_to_json(config).dump(2);
}

PipelineConfig pipeline_config_from_json_text(const std::string& text)
{
  PipelineConfig c;
  try
  {
    const json j = json::parse(text);
    if (j.contains("schema") && j["schema"] != pipeline_schema)
      throw ContractError("pipeline config: unsupported schema " + j["schema"].dump());
    if (j.contains("axis"))
      c.axis = parse_axis(j["axis"].get<std::string>());
    if (j.contains("estimator"))
    {
      const auto& e = j["estimator"];
      const std::string kind = e.value("kind", std::string("stochastic"));
      if (kind == "batch")
        c.estimator.kind = EstimatorKind::Batch;
      else if (kind == "stochastic")
        c.estimator.kind = EstimatorKind::Stochastic;
      else
        throw ContractError("pipeline config: unknown estimator kind '" + kind + "'");
      c.estimator.lambda = e.value("lambda", c.estimator.lambda);
      c.estimator.stationarity_s = e.value("stationarity_s", c.estimator.stationarity_s);
      c.estimator.overlap = e.value("overlap", c.estimator.overlap);
      if (e.contains("window_len"))
        c.estimator.window_len = e["window_len"].get<std::size_t>();
      if (e.contains("hop"))
        c.estimator.hop = e["hop"].get<std::size_t>();
    }
    c.boundary_targets_db = j.value("boundary_targets_db", c.boundary_targets_db);
    if (j.contains("tracker"))
    {
      const auto& t = j["tracker"];
      if (t.contains("variants"))
      {
        c.variants.clear();
        for (const auto& v : t["variants"])
          c.variants.push_back(parse_tracker_variant(v.get<std::string>()));
      }
      c.components = t.value("components", c.components);
      c.slope_window = t.value("slope_window", c.slope_window);
      c.floor_db = t.value("floor_db", c.floor_db);
    }
    if (j.contains("spectrogram"))
    {
      const auto& s = j["spectrogram"];
      c.spectrogram.enabled = s.value("enabled", c.spectrogram.enabled);
      c.spectrogram.window_s = s.value("window_s", c.spectrogram.window_s);
      c.spectrogram.overlap = s.value("overlap", c.spectrogram.overlap);
      if (s.contains("window"))
        c.spectrogram.window = parse_window(s["window"].get<std::string>());
    }
    if (j.contains("outputs"))
    {
      const auto& o = j["outputs"];
      c.outputs.features = o.value("features", c.outputs.features);
      c.outputs.boundary = o.value("boundary", c.outputs.boundary);
      c.outputs.spectrogram = o.value("spectrogram", c.outputs.spectrogram);
      c.outputs.cdf = o.value("cdf", c.outputs.cdf);
    }
  }
  catch (const json::exception& e)
  {
    throw ContractError(std::string("pipeline config: ") + e.what());
  }
  c.validate();
  return c;
}

std::vector<double> PipelineResult::magnitude_series(TrackerVariant variant,
                                                     std::size_t component) const
{
  std::vector<double> out;
  for (const auto& f : features)
    if (f.variant == variant && f.component == component)
      out.push_back(f.u_mag_db);
  return out;
}

PipelineResult run_pipeline(const PipelineConfig& config, const FrameSource& source,
                            double sample_rate_hz)
{
  config.validate();
  if (!(sample_rate_hz > 0.0))
    throw ContractError("pipeline: input sample rate must be positive");

  PipelineResult out;
  out.plan = config.window_plan(sample_rate_hz);
  out.sample_rate_hz = sample_rate_hz;
  CovarianceTracker estimator(config.axis, config.estimator_config(sample_rate_hz), out.plan.hop);

  std::vector<TrackerState> trackers;
  for (auto v : config.variants)
    trackers.emplace_back(
        TrackerConfig{config.axis, v, config.components, config.slope_window, config.floor_db});
  std::map<std::pair<int, std::size_t>, std::pair<double, double>> last; // (variant, comp) -> (t, dB)

  while (auto frame = source())
  {
    if (out.frames == 0)
    {
      out.shape = frame->shape();
      out.domain = frame->domain();
    }
    ++out.frames;
    const auto estimate = estimator.push(*frame);
    if (!estimate)
      continue;
    ++out.estimates;

    EigenBasis basis;
    try
    {
      basis = eigendecompose(*estimate);
    }
    catch (const std::exception& e)
    {
      throw ContractError(fmt::format("pipeline: estimate at t = {} s: {}", estimate->timestamp,
                                      e.what()));
    }
    const double t = estimate->timestamp;

    double head_boundary = 0.0;
    double head_es = 0.0;
    for (std::size_t i = 0; i < config.boundary_targets_db.size(); ++i)
    {
      const auto part = find_boundary(basis, config.boundary_targets_db[i]);
      if (i == 0)
      {
        head_boundary = part.boundary;
        head_es = part.e_s;
      }
      out.boundaries.push_back(
          {t, config.axis, config.boundary_targets_db[i], part.boundary, part.e_s, part.saturated});
    }

    for (auto& tracker : trackers)
    {
      for (const auto& s : tracker.update(basis, t))
      {
        FeatureRecord r;
        r.timestamp = s.timestamp;
        r.axis = s.axis;
        r.variant = s.variant;
        r.component = s.component;
        r.boundary = head_boundary;
        r.e_s = head_es;
        r.u = s.value;
        r.u_mag_db = s.magnitude_db;
        r.crossing = s.crossing;
        const auto key = std::make_pair(static_cast<int>(s.variant), s.component);
        if (auto it = last.find(key); it != last.end() && s.timestamp > it->second.first)
          r.rate_db_per_s = (s.magnitude_db - it->second.second) / (s.timestamp - it->second.first);
        last[key] = {s.timestamp, s.magnitude_db};
        out.features.push_back(r);
      }
    }
  }
  if (out.frames == 0)
    throw ContractError("pipeline: input stream is empty");

  if (config.spectrogram.enabled)
  {
    const auto series = out.magnitude_series(config.variants.front(), config.components.front());
    const std::size_t need =
        stft_window_samples(config.spectrogram.window_s, out.plan.update_rate_hz);
    if (series.size() < need)
      throw ContractError(fmt::format(
          "pipeline: spectrogram needs {} tracker samples but the stream produced {}", need,
          series.size()));
    out.spectrogram = spectrogram(series, out.plan.update_rate_hz, config.spectrogram.window_s,
                                  config.spectrogram.overlap, config.spectrogram.window);
  }
  return out;
}

PipelineResult run_pipeline(const PipelineConfig& config, const std::vector<CsiFrame>& frames,
                            double sample_rate_hz)
{
  std::size_t next = 0;
  FrameSource source = [&]() -> std::optional<CsiFrame> {
    if (next >= frames.size())
      return std::nullopt;
    return frames[next++];
  };
  return run_pipeline(config, source, sample_rate_hz);
}

std::string features_csv(const PipelineResult& result)
{
  std::string out = "timestamp,axis,variant,component,boundary,e_s,u_re,u_im,u_mag_db,"
                    "rate_db_per_s,crossing\n";
  for (const auto& r : result.features)
  {
    out += fmt::format("{:.9f},{},{},{},{:.9g},{:.9g},{:.12g},{:.12g},{:.9g},", r.timestamp,
                       to_string(r.axis), to_string(r.variant), r.component, r.boundary, r.e_s,
                       r.u.real(), r.u.imag(), r.u_mag_db);
    if (r.rate_db_per_s)
      out += fmt::format("{:.9g}", *r.rate_db_per_s);
    out += fmt::format(",{}\n", r.crossing ? 1 : 0);
  }
  return out;
}

std::string boundary_csv(const PipelineResult& result)
{
  std::string out = "timestamp,axis,target_db,boundary,e_s,saturated\n";
  for (const auto& r : result.boundaries)
    out += fmt::format("{:.9f},{},{:g},{:.9g},{:.9g},{}\n", r.timestamp, to_string(r.axis),
                       r.target_db, r.boundary, r.e_s, r.saturated ? 1 : 0);
  return out;
}

std::string spectrogram_csv(const Spectrogram& spec)
{
  std::string out = "time_s,frequency_hz,power_db\n";
  for (std::size_t f = 0; f < spec.times_s.size(); ++f)
    for (std::size_t k = 0; k < spec.frequencies.size(); ++k)
      out += fmt::format("{:.9g},{:.9g},{:.6f}\n", spec.times_s[f], spec.frequencies[k],
                         spec.magnitude_db[f][k]);
  return out;
}

std::string cdf_csv(const PipelineResult& result)
{
  std::string out = "variant,component,u_mag_db,probability\n";
  std::map<std::pair<int, std::size_t>, std::vector<double>> groups;
  for (const auto& r : result.features)
    groups[{static_cast<int>(r.variant), r.component}].push_back(r.u_mag_db);
  for (const auto& [key, values] : groups)
  {
    const EmpiricalCdf cdf(values);
    for (const auto& [x, p] : cdf.quantile_grid(101))
      out += fmt::format("{},{},{:.9g},{:.2f}\n", to_string(static_cast<TrackerVariant>(key.first)),
                         key.second, x, p);
  }
  return out;
}

std::string metadata_json(const PipelineConfig& config, const PipelineResult& result)
{
  json j;
  j["schema"] = features_schema;
  j["config"] = config_to_json(config);
  j["input"] = {{"n_rx", result.shape.n_rx},
                {"n_tx", result.shape.n_tx},
                {"n_sc", result.shape.n_sc},
                {"sample_rate_hz", result.sample_rate_hz},
                {"domain", to_string(result.domain)},
                {"frames", result.frames}};
  j["resolved"] = {{"window_len", result.plan.window_len},
                   {"hop", result.plan.hop},
                   {"update_rate_hz", result.plan.update_rate_hz},
                   {"estimates", result.estimates},
                   {"feature_rows", result.features.size()}};
  return j.dump(2) + "\n";
}

CorpusSpec default_corpus_spec()
{
  CorpusSpec spec;
  spec.base.shape = Shape{2, 2, 8};
  spec.base.sample_rate_hz = 200.0;
  spec.base.ar_coefficient = 0.9;
  spec.base.signal_eigenvalues = {1.0};
  spec.base.noise_power = 1e-3;
  spec.pipeline.estimator.kind = EstimatorKind::Batch;
  spec.pipeline.estimator.window_len = 10;
  spec.pipeline.estimator.hop = 2;
  spec.pipeline.variants = {TrackerVariant::Slope};
  spec.pipeline.components = {0};
  spec.pipeline.slope_window = 8;
  spec.pipeline.outputs.boundary = false;
  return spec;
}

std::vector<LabeledSeries> make_event_corpus(const CorpusSpec& spec)
{
  if (spec.per_class < 1)
    throw ContractError("corpus: at least one series per class");
  const double rate = spec.base.sample_rate_hz;
  const auto n_frames = static_cast<std::size_t>(std::llround(spec.duration_s * rate));
  std::mt19937_64 rng(spec.seed);
  const double margin = std::max(0.2 * spec.duration_s, spec.sustained_duration_s * 0.5);
  std::uniform_real_distribution<double> when(margin, spec.duration_s - margin -
                                                          spec.sustained_duration_s * 0.5);

  std::vector<LabeledSeries> out;
  const char* labels[] = {"impulse", "sustained", "quiescent"};
  for (std::size_t i = 0; i < spec.per_class; ++i)
  {
    for (std::size_t c = 0; c < 3; ++c)
    {
      ChannelSimConfig cfg = spec.base;
      cfg.seed = rng();
      const double t0 = when(rng);
      if (c == 0)
        cfg = plant_event(cfg, {t0, EventKind::ImpulseRotation, spec.impulse_rad, 0.0});
      else if (c == 1)
        cfg = plant_event(cfg, {t0, EventKind::SustainedRotation, spec.sustained_rad_per_step,
                                spec.sustained_duration_s});
      const auto stream = generate_stream(cfg, n_frames);
      const auto result = run_pipeline(spec.pipeline, stream.frames, rate);
      LabeledSeries s;
      s.label = labels[c];
      s.series = result.magnitude_series(spec.pipeline.variants.front(),
                                         spec.pipeline.components.front());
      s.sample_rate = result.plan.update_rate_hz;
      out.push_back(std::move(s));
    }
  }
  return out;
}

} // namespace csispace
