// SPDX-License-Identifier: Apache-2.0
//
// csispace - subspace statistics for MIMO Wi-Fi channel state information
// ------------------------------------------------------------------------
//
// Command-line front end: simulate, track, boundary, spectrogram, classify,
// corpus and convert-domain. Exit codes: 0 ok, 1 usage, 2 data error.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "csispace/classify.hpp"
#include "csispace/csi_core.hpp"
#include "csispace/pipeline.hpp"
#include "csispace/record_io.hpp"
#include "csispace/simulator.hpp"

using namespace csispace;

namespace
{

constexpr int exit_ok = 0;
constexpr int exit_usage = 1;
constexpr int exit_data = 2;

// Raised for bad flag combinations found after parsing.
struct UsageError : std::runtime_error
{
  using std::runtime_error::runtime_error;
};

const char* features_help = R"(
Feature CSV (schema csispace-features/1), one row per tracker sample:
  timestamp      s, time of the newest estimate in the tracker window
  axis           rx | tx | dy, unfolding axis
  variant        pairwise | slope
  component      0-based eigenvector index (0 = largest eigenvalue)
  boundary       fractional signal/noise boundary at the first MSE target
  e_s            fractional signal energy at that boundary, in [0, 1]
  u_re, u_im     differential unitarity, complex
  u_mag_db       20 log10 |u|, dB, floored at --floor-db
  rate_db_per_s  dB/s change of u_mag_db since the previous row of the same
                 variant and component; empty on the first row
  crossing       1 when the tracked eigenvalue is within 1e-3 of a neighbour
When writing to a file, a JSON sidecar (<output>.meta.json) records the
config and resolved window, and the config's "outputs" block adds
<output>.boundary.csv, <output>.cdf.csv and <output>.spectrogram.csv.)";

const char* boundary_help = R"(
Boundary CSV, one row per estimate and MSE target:
  timestamp  s
  axis       rx | tx | dy
  target_db  normalized reconstruction MSE target, dB
  boundary   fractional boundary in [1, d]
  e_s        fractional signal energy at the boundary
  saturated  1 when the full reconstruction misses the target)";

const char* spectrogram_help = R"(
Spectrogram CSV of the u_mag_db series of the first variant and component:
  time_s        s from the first tracker sample to the analysis frame centre
  frequency_hz  one-sided bin frequency, Hz
  power_db      10 log10 |X_k|^2, floored at -300)";

const char* cdf_help = R"(
CDF CSV, 101 probability levels per variant and component:
  variant, component, u_mag_db (dB quantile), probability)";

const char* confusion_help = R"(
Confusion CSV: header "truth,<labels...>", one row per true label with the
fraction of its series assigned to each predicted label (rows sum to 1).)";

// Pipeline flags shared by track, boundary and spectrogram.
struct PipelineFlags
{
  std::string config_path;
  std::string axis;
  std::string estimator;
  std::optional<double> lambda;
  std::optional<double> stationarity_s;
  std::optional<double> overlap;
  std::optional<std::size_t> window_len;
  std::optional<std::size_t> hop;
  std::vector<double> targets;
  std::vector<std::string> variants;
  std::vector<std::size_t> components;
  std::optional<std::size_t> slope_window;
  std::optional<double> floor_db;
  std::optional<double> spec_window_s;
  std::optional<double> spec_overlap;
  std::string spec_window;
};

void add_pipeline_flags(CLI::App* app, PipelineFlags& f)
{
  app->add_option("--config", f.config_path, "Pipeline config JSON; flags override its fields")
      ->check(CLI::ExistingFile);
  app->add_option("--axis", f.axis, "Unfolding axis: rx, tx or dy (default dy)");
  app->add_option("--estimator", f.estimator, "Covariance estimator: batch or stochastic")
      ->check(CLI::IsMember({"batch", "stochastic"}));
  app->add_option("--lambda", f.lambda, "Forgetting factor of the stochastic estimator");
  app->add_option("--stationarity", f.stationarity_s, "Stationarity period, s (default 0.025)");
  app->add_option("--overlap", f.overlap, "Estimator window overlap in [0, 1) (default 0.95)");
  app->add_option("--window-len", f.window_len, "Batch window length, frames (overrides --stationarity)");
  app->add_option("--hop", f.hop, "Frames between emitted estimates (overrides --overlap)");
  app->add_option("--target", f.targets, "Boundary MSE target, dB; repeatable (default -12)");
  app->add_option("--variant", f.variants, "Tracker variant: pairwise or slope; repeatable")
      ->check(CLI::IsMember({"pairwise", "slope"}));
  app->add_option("--component", f.components, "0-based eigenvector to track; repeatable (default 1)");
  app->add_option("--slope-window", f.slope_window, "Bases in the slope fit (default 8)");
  app->add_option("--floor-db", f.floor_db, "Floor of u_mag_db, dB (default -80)");
}

void add_spectrogram_flags(CLI::App* app, PipelineFlags& f)
{
  app->add_option("--spec-window", f.spec_window_s, "STFT window, s (default 1.28)");
  app->add_option("--spec-overlap", f.spec_overlap, "STFT overlap in [0, 1) (default 0.95)");
  app->add_option("--taper", f.spec_window, "STFT taper: hann or rectangular")
      ->check(CLI::IsMember({"hann", "rectangular"}));
}

std::string read_text(const std::filesystem::path& path)
{
  std::ifstream in(path);
  if (!in)
    throw std::runtime_error("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

PipelineConfig resolve_pipeline(const PipelineFlags& f)
{
  PipelineConfig c;
  if (!f.config_path.empty())
    c = pipeline_config_from_json_text(read_text(f.config_path));
  if (!f.axis.empty())
    c.axis = parse_axis(f.axis);
  if (!f.estimator.empty())
    c.estimator.kind = f.estimator == "batch" ? EstimatorKind::Batch : EstimatorKind::Stochastic;
  if (f.lambda)
    c.estimator.lambda = *f.lambda;
  if (f.stationarity_s)
    c.estimator.stationarity_s = *f.stationarity_s;
  if (f.overlap)
    c.estimator.overlap = *f.overlap;
  if (f.window_len)
    c.estimator.window_len = *f.window_len;
  if (f.hop)
    c.estimator.hop = *f.hop;
  if (!f.targets.empty())
    c.boundary_targets_db = f.targets;
  if (!f.variants.empty())
  {
    c.variants.clear();
    for (const auto& v : f.variants)
      c.variants.push_back(parse_tracker_variant(v));
  }
  if (!f.components.empty())
    c.components = f.components;
  if (f.slope_window)
    c.slope_window = *f.slope_window;
  if (f.floor_db)
    c.floor_db = *f.floor_db;
  if (f.spec_window_s)
    c.spectrogram.window_s = *f.spec_window_s;
  if (f.spec_overlap)
    c.spectrogram.overlap = *f.spec_overlap;
  if (!f.spec_window.empty())
    c.spectrogram.window =
        f.spec_window == "hann" ? WindowFunction::Hann : WindowFunction::Rectangular;
  c.validate();
  return c;
}

// Runs the pipeline over a record file or stdin ("-"), one frame at a time.
PipelineResult run_on_input(const PipelineConfig& config, const std::string& input)
{
  std::optional<RecordReader> reader;
  if (input == "-")
    reader.emplace(std::cin, "<stdin>");
  else
    reader.emplace(std::filesystem::path(input));
  const double rate = reader->header().sample_rate;
  return run_pipeline(config, [&] { return reader->next(); }, rate);
}

void write_text(const std::string& output, const std::string& text)
{
  if (output == "-")
  {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::ofstream out(output, std::ios::binary | std::ios::trunc);
  if (!out)
    throw std::runtime_error("cannot write " + output);
  out << text;
  if (!out)
    throw std::runtime_error("write failed: " + output);
}

// ---- simulate ------------------------------------------------------------

struct SimulateFlags
{
  std::string config_path;
  std::string output = "-";
  std::size_t frames = 1000;
  std::optional<std::size_t> n_rx;
  std::optional<std::size_t> n_tx;
  std::optional<std::size_t> n_sc;
  std::optional<double> rate;
  std::optional<double> ar;
  std::vector<double> eigenvalues;
  std::optional<double> noise;
  std::optional<double> volatility;
  std::optional<std::uint64_t> seed;
  std::string domain;
  std::vector<std::string> events;
};

// "kind@time:magnitude[:duration]"
PlantedEvent parse_event(const std::string& text)
{
  const auto at = text.find('@');
  if (at == std::string::npos)
    throw UsageError("event '" + text + "': expected kind@time:magnitude[:duration]");
  PlantedEvent e;
  e.kind = parse_event_kind(text.substr(0, at));
  std::vector<double> parts;
  std::stringstream rest(text.substr(at + 1));
  std::string item;
  while (std::getline(rest, item, ':'))
  {
    try
    {
      parts.push_back(std::stod(item));
    }
    catch (const std::exception&)
    {
      throw UsageError("event '" + text + "': '" + item + "' is not a number");
    }
  }
  const std::size_t want = e.kind == EventKind::ImpulseRotation ? 2 : 3;
  if (parts.size() != want)
    throw UsageError(fmt::format("event '{}': {} expects {} numbers", text,
                                 to_string(e.kind), want));
  e.time_s = parts[0];
  e.magnitude_rad = parts[1];
  if (want == 3)
    e.duration_s = parts[2];
  return e;
}

int run_simulate(const SimulateFlags& f)
{
  ChannelSimConfig c;
  if (!f.config_path.empty())
    c = sim_config_from_json_text(read_text(f.config_path));
  if (f.n_rx)
    c.shape.n_rx = *f.n_rx;
  if (f.n_tx)
    c.shape.n_tx = *f.n_tx;
  if (f.n_sc)
    c.shape.n_sc = *f.n_sc;
  if (f.rate)
    c.sample_rate_hz = *f.rate;
  if (f.ar)
  {
    c.ar_coefficient = *f.ar;
    c.ar_matrix.reset();
  }
  if (!f.eigenvalues.empty())
    c.signal_eigenvalues = f.eigenvalues;
  if (f.noise)
    c.noise_power = *f.noise;
  if (f.volatility)
    c.volatility = *f.volatility;
  if (f.seed)
    c.seed = *f.seed;
  if (!f.domain.empty())
    c.domain = parse_domain(f.domain);
  for (const auto& text : f.events)
    c = plant_event(c, parse_event(text));
  c.validate();
  check_stream_length(c, f.frames);

  ChannelSimulator sim(c);
  const RecordHeader header{c.shape, c.sample_rate_hz, c.domain};
  std::optional<RecordWriter> writer;
  if (f.output == "-")
    writer.emplace(std::cout, header);
  else
    writer.emplace(std::filesystem::path(f.output), header);
  for (std::size_t k = 0; k < f.frames; ++k)
    writer->write(sim.step().frame);
  writer->close();
  return exit_ok;
}

// ---- track / boundary / spectrogram -------------------------------------

struct TrackFlags
{
  std::string input;
  std::string output = "-";
  std::string metadata;
  std::string cdf;
  PipelineFlags pipeline;
};

// Sidecars selected in the config's "outputs" block land next to a file
// output as <output>.boundary.csv, .cdf.csv and .spectrogram.csv.
int run_track(const TrackFlags& f)
{
  PipelineConfig config = resolve_pipeline(f.pipeline);
  const bool sidecars = f.output != "-";
  if (sidecars && config.outputs.spectrogram)
    config.spectrogram.enabled = true;
  const auto result = run_on_input(config, f.input);
  if (config.outputs.features)
    write_text(f.output, features_csv(result));
  std::string meta = f.metadata;
  if (meta.empty() && sidecars)
    meta = f.output + ".meta.json";
  if (!meta.empty())
    write_text(meta, metadata_json(config, result));
  if (!f.cdf.empty())
    write_text(f.cdf, cdf_csv(result));
  if (sidecars)
  {
    if (config.outputs.boundary)
      write_text(f.output + ".boundary.csv", boundary_csv(result));
    if (config.outputs.cdf && f.cdf.empty())
      write_text(f.output + ".cdf.csv", cdf_csv(result));
    if (config.outputs.spectrogram)
      write_text(f.output + ".spectrogram.csv", spectrogram_csv(*result.spectrogram));
  }
  return exit_ok;
}

int run_boundary(const TrackFlags& f)
{
  const PipelineConfig config = resolve_pipeline(f.pipeline);
  const auto result = run_on_input(config, f.input);
  write_text(f.output, boundary_csv(result));
  if (!f.metadata.empty())
    write_text(f.metadata, metadata_json(config, result));
  return exit_ok;
}

int run_spectrogram(const TrackFlags& f)
{
  PipelineConfig config = resolve_pipeline(f.pipeline);
  config.spectrogram.enabled = true;
  config.outputs.spectrogram = true;
  const auto result = run_on_input(config, f.input);
  write_text(f.output, spectrogram_csv(*result.spectrogram));
  if (!f.metadata.empty())
    write_text(f.metadata, metadata_json(config, result));
  return exit_ok;
}

// ---- convert-domain -------------------------------------------------------

int run_convert(const std::string& input, const std::string& output, const std::string& to)
{
  const DomainTag target = parse_domain(to);
  std::optional<RecordReader> reader;
  if (input == "-")
    reader.emplace(std::cin, "<stdin>");
  else
    reader.emplace(std::filesystem::path(input));
  RecordHeader header = reader->header();
  header.domain = target;
  std::optional<RecordWriter> writer;
  if (output == "-")
    writer.emplace(std::cout, header);
  else
    writer.emplace(std::filesystem::path(output), header);
  while (auto frame = reader->next())
    writer->write(to_domain(*frame, target));
  writer->close();
  return exit_ok;
}

// ---- corpus / classify ----------------------------------------------------

struct CorpusFlags
{
  std::string dir;
  std::size_t per_class = 30;
  double duration_s = 4.0;
  double impulse_rad = 0.6;
  double sustained_rad = 0.02;
  double sustained_s = 1.0;
  std::uint64_t seed = 1;
};

int run_corpus(const CorpusFlags& f)
{
  CorpusSpec spec = default_corpus_spec();
  spec.per_class = f.per_class;
  spec.duration_s = f.duration_s;
  spec.impulse_rad = f.impulse_rad;
  spec.sustained_rad_per_step = f.sustained_rad;
  spec.sustained_duration_s = f.sustained_s;
  spec.seed = f.seed;
  write_corpus(f.dir, make_event_corpus(spec));
  return exit_ok;
}

struct ClassifyFlags
{
  std::string dir;
  std::string output = "-";
  std::string predictions;
  std::size_t k = 3;
  double band = 0.1;
};

int run_classify(const ClassifyFlags& f)
{
  const DtwConfig cfg{f.band, f.k};
  cfg.validate();
  const auto corpus = read_corpus(f.dir);
  const auto predicted = leave_one_out(corpus, cfg);
  std::vector<std::string> truth;
  for (const auto& s : corpus)
    truth.push_back(s.label);
  const auto cm = confusion_matrix(predicted, truth);
  write_text(f.output, cm.to_csv());
  if (!f.predictions.empty())
  {
    std::string text = "index,truth,predicted\n";
    for (std::size_t i = 0; i < truth.size(); ++i)
      text += fmt::format("{},{},{}\n", i, truth[i], predicted[i]);
    write_text(f.predictions, text);
  }
  std::cerr << fmt::format("leave-one-out accuracy {:.4f} over {} series\n", cm.accuracy(),
                           corpus.size());
  return exit_ok;
}

} // namespace

int main(int argc, char** argv)
{
  CLI::App app{"csispace: subspace statistics for MIMO CSI streams"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "csispace 0.1.0");

  SimulateFlags sim;
  auto* simulate = app.add_subcommand("simulate", "Write a synthetic CSIS1 record stream");
  simulate->add_option("--config", sim.config_path, "Simulator config JSON (schema csispace-sim/1)")
      ->check(CLI::ExistingFile);
  simulate->add_option("-o,--output", sim.output, "Record file, or - for stdout")
      ->capture_default_str();
  simulate->add_option("-n,--frames", sim.frames, "Number of frames")->capture_default_str();
  simulate->add_option("--n-rx", sim.n_rx, "Receive antennas");
  simulate->add_option("--n-tx", sim.n_tx, "Transmit antennas");
  simulate->add_option("--n-sc", sim.n_sc, "Subcarriers");
  simulate->add_option("--rate", sim.rate, "Sample rate, Hz");
  simulate->add_option("--ar", sim.ar, "Uniform AR coefficient in [0, 1]");
  simulate->add_option("--eigenvalues", sim.eigenvalues, "Planted signal eigenvalues")
      ->delimiter(',');
  simulate->add_option("--noise", sim.noise, "Noise power sigma^2");
  simulate->add_option("--volatility", sim.volatility, "Basis rotation per step, rad");
  simulate->add_option("--seed", sim.seed, "RNG seed");
  simulate->add_option("--domain", sim.domain, "Domain tag of the frames: csi or cir");
  simulate->add_option("--event", sim.events,
                       "Planted event kind@time:magnitude[:duration], e.g. impulse@1.0:0.8 or "
                       "sustained@2.0:0.02:0.5; repeatable");

  TrackFlags track_flags;
  auto* track = app.add_subcommand("track", "Record stream to differential-unitarity features");
  track->add_option("input", track_flags.input, "Record file, or - for stdin")->required();
  track->add_option("-o,--output", track_flags.output, "Feature CSV, or - for stdout")
      ->capture_default_str();
  track->add_option("--metadata", track_flags.metadata,
                    "Metadata JSON path (default <output>.meta.json when writing a file)");
  track->add_option("--cdf", track_flags.cdf, "Also write the |u| dB CDF CSV here");
  add_pipeline_flags(track, track_flags.pipeline);
  track->footer(std::string(features_help) + "\n" + cdf_help);

  TrackFlags boundary_flags;
  auto* boundary = app.add_subcommand("boundary", "Record stream to boundary and E_s series");
  boundary->add_option("input", boundary_flags.input, "Record file, or - for stdin")->required();
  boundary->add_option("-o,--output", boundary_flags.output, "Boundary CSV, or - for stdout")
      ->capture_default_str();
  boundary->add_option("--metadata", boundary_flags.metadata, "Metadata JSON path");
  add_pipeline_flags(boundary, boundary_flags.pipeline);
  boundary->footer(boundary_help);

  TrackFlags spec_flags;
  auto* spec = app.add_subcommand("spectrogram", "STFT of the tracked |u| dB series");
  spec->add_option("input", spec_flags.input, "Record file, or - for stdin")->required();
  spec->add_option("-o,--output", spec_flags.output, "Spectrogram CSV, or - for stdout")
      ->capture_default_str();
  spec->add_option("--metadata", spec_flags.metadata, "Metadata JSON path");
  add_pipeline_flags(spec, spec_flags.pipeline);
  add_spectrogram_flags(spec, spec_flags.pipeline);
  spec->footer(spectrogram_help);

  std::string conv_in;
  std::string conv_out = "-";
  std::string conv_to;
  auto* convert = app.add_subcommand("convert-domain", "Unitary DFT between CSI and CIR records");
  convert->add_option("input", conv_in, "Record file, or - for stdin")->required();
  convert->add_option("-o,--output", conv_out, "Record file, or - for stdout")
      ->capture_default_str();
  convert->add_option("--to", conv_to, "Target domain: csi or cir")->required();

  CorpusFlags corpus_flags;
  auto* corpus = app.add_subcommand("corpus", "Generate the 3-class simulator event corpus");
  corpus->add_option("dir", corpus_flags.dir, "Output directory")->required();
  corpus->add_option("--per-class", corpus_flags.per_class, "Series per class")
      ->capture_default_str();
  corpus->add_option("--duration", corpus_flags.duration_s, "Stream duration, s")
      ->capture_default_str();
  corpus->add_option("--impulse", corpus_flags.impulse_rad, "Impulse rotation, rad")
      ->capture_default_str();
  corpus->add_option("--sustained", corpus_flags.sustained_rad, "Sustained rotation, rad/step")
      ->capture_default_str();
  corpus->add_option("--sustained-duration", corpus_flags.sustained_s,
                     "Sustained event length, s")
      ->capture_default_str();
  corpus->add_option("--seed", corpus_flags.seed, "RNG seed")->capture_default_str();
  corpus->footer("\nEach series is written as NNNN_<label>.series: '# label:' and\n"
                 "'# sample_rate:' header lines, then one |u| dB value per line.");

  ClassifyFlags cls;
  auto* classify = app.add_subcommand("classify", "Leave-one-out DTW kNN over a corpus");
  classify->add_option("dir", cls.dir, "Corpus directory of .series files")->required();
  classify->add_option("-o,--output", cls.output, "Confusion CSV, or - for stdout")
      ->capture_default_str();
  classify->add_option("--predictions", cls.predictions, "Per-series predictions CSV");
  classify->add_option("-k", cls.k, "Neighbours (odd)")->capture_default_str();
  classify->add_option("--band", cls.band, "Sakoe-Chiba radius, fraction of the longer series")
      ->capture_default_str();
  classify->footer(confusion_help);

  try
  {
    app.parse(argc, argv);
  }
  catch (const CLI::Success& e)
  {
    return app.exit(e);
  }
  catch (const CLI::ParseError& e)
  {
    app.exit(e);
    return exit_usage;
  }

  try
  {
    if (*simulate)
      return run_simulate(sim);
    if (*track)
      return run_track(track_flags);
    if (*boundary)
      return run_boundary(boundary_flags);
    if (*spec)
      return run_spectrogram(spec_flags);
    if (*convert)
      return run_convert(conv_in, conv_out, conv_to);
    if (*corpus)
      return run_corpus(corpus_flags);
    if (*classify)
      return run_classify(cls);
  }
  catch (const UsageError& e)
  {
    std::cerr << "csispace: " << e.what() << "\n";
    return exit_usage;
  }
  catch (const std::exception& e)
  {
    std::cerr << "csispace: " << e.what() << "\n";
    return exit_data;
  }
  return exit_usage;
}
