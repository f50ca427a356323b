// SPDX-License-Identifier: Apache-2.0
//
// csispace - subspace statistics for MIMO Wi-Fi channel state information
// ------------------------------------------------------------------------

#include "csispace/simulator.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/QR>
#include <json.hpp>

namespace csispace
{

std::string to_string(EventKind kind)
{
  return kind == EventKind::ImpulseRotation ? "impulse-rotation" : "sustained-rotation";
}

EventKind parse_event_kind(const std::string& text)
{
  if (text == "impulse-rotation" || text == "impulse")
    return EventKind::ImpulseRotation;
  if (text == "sustained-rotation" || text == "sustained")
    return EventKind::SustainedRotation;
  throw ContractError("unknown event kind '" + text + "'");
}

namespace
{

struct StepRange
{
  std::size_t begin;
  std::size_t end; // exclusive
};

StepRange event_steps(const PlantedEvent& e, double rate)
{
  const auto begin = static_cast<std::size_t>(std::llround(e.time_s * rate));
  std::size_t len = 1;
  if (e.kind == EventKind::SustainedRotation)
    len = static_cast<std::size_t>(std::max<long long>(1, std::llround(e.duration_s * rate)));
  return {begin, begin + len};
}

// Modified Gram-Schmidt in column order, so column directions move as little as
// possible while rounding drift is removed.
void orthonormalize(CMatrix& u)
{
  for (Eigen::Index c = 0; c < u.cols(); ++c)
  {
    for (Eigen::Index p = 0; p < c; ++p)
      u.col(c) -= u.col(p) * u.col(p).dot(u.col(c));
    u.col(c).normalize();
  }
}

} // namespace

Eigen::MatrixXd ChannelSimConfig::ar_weights() const
{
  const auto rows = static_cast<Eigen::Index>(shape.n_sc);
  const auto cols = static_cast<Eigen::Index>(shape.n_rx * shape.n_tx);
  if (ar_matrix)
    return *ar_matrix;
  return Eigen::MatrixXd::Constant(rows, cols, ar_coefficient);
}

void ChannelSimConfig::validate() const
{
  if (shape.n_rx == 0 || shape.n_tx == 0 || shape.n_sc == 0)
    throw ContractError("simulator: every dimension must be >= 1");
  if (!(sample_rate_hz > 0.0))
    throw ContractError("simulator: sample rate must be positive");
  const Eigen::MatrixXd w = ar_weights();
  if (w.rows() != static_cast<Eigen::Index>(shape.n_sc) ||
      w.cols() != static_cast<Eigen::Index>(shape.n_rx * shape.n_tx))
    throw ContractError("simulator: AR matrix must be n_sc x (n_rx * n_tx)");
  if (!w.allFinite() || w.minCoeff() < 0.0 || w.maxCoeff() > 1.0)
    throw ContractError("simulator: AR coefficients must lie in [0, 1]");
  if (!(innovation_variance > 0.0))
    throw ContractError("simulator: innovation variance must be positive");
  if (signal_eigenvalues.empty() || signal_eigenvalues.size() > shape.n_sc)
    throw ContractError("simulator: signal rank must lie in [1, n_sc]");
  if (!(noise_power >= 0.0))
    throw ContractError("simulator: noise power must be non-negative");
  for (double v : signal_eigenvalues)
    if (!(v > noise_power))
      throw ContractError("simulator: planted eigenvalues must exceed the noise power");
  if (!(volatility >= 0.0))
    throw ContractError("simulator: volatility must be non-negative");
  for (const auto& e : events)
  {
    if (!(e.time_s >= 0.0) || !(e.magnitude_rad >= 0.0))
      throw ContractError("simulator: event time and magnitude must be non-negative");
    if (e.kind == EventKind::SustainedRotation && !(e.duration_s > 0.0))
      throw ContractError("simulator: sustained events need a positive duration");
  }
}

CMatrix GroundTruth::covariance() const
{
  const Eigen::Index d = signal_basis.rows();
  Eigen::VectorXd lam(static_cast<Eigen::Index>(signal_eigenvalues.size()));
  for (std::size_t i = 0; i < signal_eigenvalues.size(); ++i)
    lam(static_cast<Eigen::Index>(i)) = signal_eigenvalues[i];
  CMatrix c = signal_basis * lam.asDiagonal() * signal_basis.adjoint();
  c += noise_power * CMatrix::Identity(d, d);
  return (c + c.adjoint()) * 0.5;
}

ChannelSimulator::ChannelSimulator(ChannelSimConfig config)
  : m_config(std::move(config))
{
  m_config.validate();
  m_w = m_config.ar_weights();
  m_w_bar = (1.0 - m_w.array()).sqrt().matrix();
  // Stationary variance of each latent entry is innovation_variance / (1 + w).
  m_unit_scale = ((1.0 + m_w.array()) / m_config.innovation_variance).sqrt().matrix();

  m_rng.seed(m_config.seed);
  std::seed_seq event_seed{static_cast<std::uint32_t>(m_config.seed),
                           static_cast<std::uint32_t>(m_config.seed >> 32), 0x45564e54u};
  m_event_rng.seed(event_seed);
  // Basis motion draws from its own stream so that streams sharing a seed see
  // the same latent noise whatever the volatility.
  std::seed_seq motion_seed{static_cast<std::uint32_t>(m_config.seed),
                            static_cast<std::uint32_t>(m_config.seed >> 32), 0x4d4f5456u};
  m_motion_rng.seed(motion_seed);

  const auto d = static_cast<Eigen::Index>(m_config.shape.n_sc);
  const auto ms = static_cast<Eigen::Index>(m_config.signal_rank());
  const CMatrix g = draw_normal(d, ms, 1.0, m_rng);
  Eigen::HouseholderQR<CMatrix> qr(g);
  m_basis = qr.householderQ() * CMatrix::Identity(d, ms);
  orthonormalize(m_basis);

  const auto cols = m_w.cols();
  const Eigen::ArrayXXd stationary = m_config.innovation_variance / (1.0 + m_w.array());
  m_latent_signal = draw_normal(d, cols, 1.0, m_rng).array() * stationary.sqrt();
  m_latent_noise = draw_normal(d, cols, 1.0, m_rng).array() * stationary.sqrt();
}

CMatrix ChannelSimulator::draw_normal(Eigen::Index rows, Eigen::Index cols, double variance,
                                      std::mt19937_64& rng)
{
  std::normal_distribution<double> n(0.0, std::sqrt(variance / 2.0));
  CMatrix out(rows, cols);
  for (Eigen::Index c = 0; c < cols; ++c)
    for (Eigen::Index r = 0; r < rows; ++r)
    {
      const double re = n(rng);
      const double im = n(rng);
      out(r, c) = {re, im};
    }
  return out;
}

void ChannelSimulator::rotate(double angle, std::mt19937_64& rng)
{
  if (angle == 0.0)
    return;
  const Eigen::Index d = m_basis.rows();
  const Eigen::Index ms = m_basis.cols();
  if (ms >= d)
    return; // no orthogonal complement to rotate into

  CMatrix g = draw_normal(d, ms, 1.0, rng);
  g -= m_basis * (m_basis.adjoint() * g);
  Eigen::HouseholderQR<CMatrix> qr(g);
  CMatrix v = qr.householderQ() * CMatrix::Identity(d, ms);
  v -= m_basis * (m_basis.adjoint() * v);
  orthonormalize(v);

  m_basis = m_basis * std::cos(angle) + v * std::sin(angle);
  orthonormalize(m_basis);
}

double ChannelSimulator::scheduled_rotation(std::size_t step) const
{
  double angle = 0.0;
  for (const auto& e : m_config.events)
  {
    const auto range = event_steps(e, m_config.sample_rate_hz);
    if (step >= range.begin && step < range.end)
      angle += e.magnitude_rad;
  }
  return angle;
}

void ChannelSimulator::advance()
{
  const auto d = m_latent_signal.rows();
  const auto cols = m_latent_signal.cols();
  const double var = m_config.innovation_variance;

  const CMatrix xi_s = draw_normal(d, cols, var, m_rng);
  const CMatrix xi_n = draw_normal(d, cols, var, m_rng);
  m_latent_signal = (m_latent_signal.array() * m_w.array() + xi_s.array() * m_w_bar.array()).matrix();
  m_latent_noise = (m_latent_noise.array() * m_w.array() + xi_n.array() * m_w_bar.array()).matrix();

  ++m_step;
  rotate(m_config.volatility, m_motion_rng);
  rotate(scheduled_rotation(m_step), m_event_rng);
}

StepOutput ChannelSimulator::step()
{
  const Shape& shape = m_config.shape;
  const auto cols = static_cast<double>(shape.n_rx * shape.n_tx);
  const double t = static_cast<double>(m_step) / m_config.sample_rate_hz;

  Eigen::VectorXd amp(static_cast<Eigen::Index>(m_config.signal_rank()));
  for (std::size_t i = 0; i < m_config.signal_rank(); ++i)
    amp(static_cast<Eigen::Index>(i)) = std::sqrt(m_config.signal_eigenvalues[i] / cols);

  const CMatrix xs = (m_latent_signal.array() * m_unit_scale.array()).matrix();
  const CMatrix xn = (m_latent_noise.array() * m_unit_scale.array()).matrix();
  const CMatrix s = m_basis * (amp.asDiagonal() * (m_basis.adjoint() * xs));
  const CMatrix n = std::sqrt(m_config.noise_power / cols) * xn;

  const DomainTag tag = m_config.domain;
  StepOutput out{fold(Unfolding{Axis::Dy, s + n}, shape, t, tag),
                 GroundTruth{t, m_basis, m_config.signal_eigenvalues, m_config.noise_power},
                 fold(Unfolding{Axis::Dy, s}, shape, t, tag),
                 fold(Unfolding{Axis::Dy, n}, shape, t, tag)};
  advance();
  return out;
}

void check_stream_length(const ChannelSimConfig& config, std::size_t n_frames)
{
  if (n_frames < 1)
    throw ContractError("generate_stream: at least one frame required");
  for (const auto& e : config.events)
    if (event_steps(e, config.sample_rate_hz).begin >= n_frames)
      throw ContractError("generate_stream: event at t=" + std::to_string(e.time_s) +
                          " s lies beyond the end of the stream");
}

SimStream generate_stream(const ChannelSimConfig& config, std::size_t n_frames)
{
  check_stream_length(config, n_frames);

  ChannelSimulator sim(config);
  SimStream out;
  out.frames.reserve(n_frames);
  out.truth.reserve(n_frames);
  for (std::size_t k = 0; k < n_frames; ++k)
  {
    StepOutput s = sim.step();
    out.frames.push_back(std::move(s.frame));
    out.truth.push_back(std::move(s.truth));
  }
  return out;
}

ChannelSimConfig plant_event(const ChannelSimConfig& config, const PlantedEvent& event)
{
  if (!(event.time_s >= 0.0))
    throw ContractError("plant_event: event time must be non-negative");
  const auto mine = event_steps(event, config.sample_rate_hz);
  for (const auto& other : config.events)
  {
    const auto theirs = event_steps(other, config.sample_rate_hz);
    if (mine.begin < theirs.end && theirs.begin < mine.end)
      throw ContractError("plant_event: event overlaps an existing event");
  }
  ChannelSimConfig out = config;
  out.events.push_back(event);
  out.validate();
  return out;
}

// ---------------------------------------------------------------------------
// JSON schema "csispace-sim/1"

using nlohmann::json;

std::string to_json_text(const ChannelSimConfig& c)
{
  json j;
  j["schema"] = "csispace-sim/1";
  j["n_rx"] = c.shape.n_rx;
  j["n_tx"] = c.shape.n_tx;
  j["n_sc"] = c.shape.n_sc;
  j["sample_rate_hz"] = c.sample_rate_hz;
  if (c.ar_matrix)
  {
    json rows = json::array();
    for (Eigen::Index r = 0; r < c.ar_matrix->rows(); ++r)
    {
      json row = json::array();
      for (Eigen::Index col = 0; col < c.ar_matrix->cols(); ++col)
        row.push_back((*c.ar_matrix)(r, col));
      rows.push_back(row);
    }
    j["ar_matrix"] = rows;
  }
  else
  {
    j["ar_coefficient"] = c.ar_coefficient;
  }
  j["innovation_variance"] = c.innovation_variance;
  j["signal_rank"] = c.signal_rank();
  j["signal_eigenvalues"] = c.signal_eigenvalues;
  j["noise_power"] = c.noise_power;
  j["volatility"] = c.volatility;
  j["seed"] = c.seed;
  j["domain"] = to_string(c.domain);
  json events = json::array();
  for (const auto& e : c.events)
    events.push_back({{"time_s", e.time_s},
                      {"kind", to_string(e.kind)},
                      {"magnitude_rad", e.magnitude_rad},
                      {"duration_s", e.duration_s}});
  j["events"] = events;
  return j.dump(2);
}

ChannelSimConfig sim_config_from_json_text(const std::string& text)
{
  json j;
  try
  {
    j = json::parse(text);
  }
  catch (const json::parse_error& e)
  {
    throw ContractError(std::string("simulator config: ") + e.what());
  }

  ChannelSimConfig c;
  try
  {
    if (j.contains("schema") && j["schema"] != "csispace-sim/1")
      throw ContractError("simulator config: unsupported schema " + j["schema"].dump());
    c.shape.n_rx = j.value("n_rx", c.shape.n_rx);
    c.shape.n_tx = j.value("n_tx", c.shape.n_tx);
    c.shape.n_sc = j.value("n_sc", c.shape.n_sc);
    c.sample_rate_hz = j.value("sample_rate_hz", c.sample_rate_hz);
    c.ar_coefficient = j.value("ar_coefficient", c.ar_coefficient);
    if (j.contains("ar_matrix"))
    {
      const auto& rows = j["ar_matrix"];
      Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()),
                        rows.empty() ? 0 : static_cast<Eigen::Index>(rows[0].size()));
      for (std::size_t r = 0; r < rows.size(); ++r)
      {
        if (rows[r].size() != static_cast<std::size_t>(m.cols()))
          throw ContractError("simulator config: ragged ar_matrix");
        for (std::size_t col = 0; col < rows[r].size(); ++col)
          m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(col)) = rows[r][col].get<double>();
      }
      c.ar_matrix = m;
    }
    c.innovation_variance = j.value("innovation_variance", c.innovation_variance);
    c.signal_eigenvalues = j.value("signal_eigenvalues", c.signal_eigenvalues);
    if (j.contains("signal_rank") && j["signal_rank"].get<std::size_t>() != c.signal_rank())
      throw ContractError("simulator config: signal_rank does not match signal_eigenvalues");
    c.noise_power = j.value("noise_power", c.noise_power);
    c.volatility = j.value("volatility", c.volatility);
    c.seed = j.value("seed", c.seed);
    if (j.contains("domain"))
      c.domain = parse_domain(j["domain"].get<std::string>());
    if (j.contains("events"))
      for (const auto& e : j["events"])
      {
        PlantedEvent ev;
        ev.time_s = e.at("time_s").get<double>();
        ev.kind = parse_event_kind(e.at("kind").get<std::string>());
        ev.magnitude_rad = e.at("magnitude_rad").get<double>();
        ev.duration_s = e.value("duration_s", 0.0);
        c = plant_event(c, ev);
      }
  }
  catch (const json::exception& e)
  {
    throw ContractError(std::string("simulator config: ") + e.what());
  }
  c.validate();
  return c;
}

} // namespace csispace
