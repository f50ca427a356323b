// SPDX-License-Identifier: Apache-2.0
//
// csispace - subspace statistics for MIMO Wi-Fi channel state information
// ------------------------------------------------------------------------

#include "csispace/record_io.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <cstring>

#include <fmt/format.h>

namespace csispace
{

namespace
{
constexpr std::array<char, 5> magic{'C', 'S', 'I', 'S', '1'};

template <typename U>
void put_le(std::vector<char>& buf, U value)
{
  for (std::size_t i = 0; i < sizeof(U); ++i)
    buf.push_back(static_cast<char>((value >> (8 * i)) & 0xff));
}

template <typename U>
U get_le(const char* p)
{
  U v = 0;
  for (std::size_t i = 0; i < sizeof(U); ++i)
    v |= static_cast<U>(static_cast<unsigned char>(p[i])) << (8 * i);
  return v;
}

std::uint8_t domain_byte(DomainTag tag)
{
  return tag == DomainTag::FrequencyCsi ? 0 : 1;
}
} // namespace

RecordWriter::RecordWriter(const std::filesystem::path& path, const RecordHeader& header)
  : m_file(path, std::ios::binary | std::ios::trunc), m_out(&m_file), m_header(header)
{
  if (!m_file)
    throw RecordError(RecordErrorKind::Io, "cannot open " + path.string() + " for writing");
  write_header();
}

RecordWriter::RecordWriter(std::ostream& out, const RecordHeader& header)
  : m_out(&out), m_header(header)
{
  write_header();
}

void RecordWriter::write_header()
{
  const RecordHeader& header = m_header;
  const Shape& s = header.shape;
  for (std::size_t d : {s.n_rx, s.n_tx, s.n_sc})
    if (d == 0 || d > 0xffff)
      throw RecordError(RecordErrorKind::DimMismatch,
                        fmt::format("record header: dimension {} outside [1, 65535]", d));
  std::vector<char> buf(magic.begin(), magic.end());
  put_le<std::uint16_t>(buf, static_cast<std::uint16_t>(s.n_rx));
  put_le<std::uint16_t>(buf, static_cast<std::uint16_t>(s.n_tx));
  put_le<std::uint16_t>(buf, static_cast<std::uint16_t>(s.n_sc));
  put_le<std::uint64_t>(buf, std::bit_cast<std::uint64_t>(header.sample_rate));
  buf.push_back(static_cast<char>(domain_byte(header.domain)));
  m_out->write(buf.data(), static_cast<std::streamsize>(buf.size()));
}

void RecordWriter::write(const CsiFrame& frame)
{
  if (!(frame.shape() == m_header.shape))
    throw RecordError(RecordErrorKind::DimMismatch,
                      fmt::format("record {}: frame shape {}x{}x{} differs from header {}x{}x{}",
                                  m_count, frame.shape().n_rx, frame.shape().n_tx,
                                  frame.shape().n_sc, m_header.shape.n_rx, m_header.shape.n_tx,
                                  m_header.shape.n_sc));
  if (frame.domain() != m_header.domain)
    throw RecordError(RecordErrorKind::DimMismatch,
                      fmt::format("record {}: frame domain differs from header", m_count));
  if (m_last_timestamp && frame.timestamp() < *m_last_timestamp)
    throw RecordError(RecordErrorKind::NonMonotoneTimestamp,
                      fmt::format("record {}: timestamp {} precedes {}", m_count,
                                  frame.timestamp(), *m_last_timestamp));
  m_buffer.clear();
  put_le<std::uint64_t>(m_buffer, std::bit_cast<std::uint64_t>(frame.timestamp()));
  for (const cdouble& v : frame.data())
  {
    put_le<std::uint32_t>(m_buffer, std::bit_cast<std::uint32_t>(static_cast<float>(v.real())));
    put_le<std::uint32_t>(m_buffer, std::bit_cast<std::uint32_t>(static_cast<float>(v.imag())));
  }
  m_out->write(m_buffer.data(), static_cast<std::streamsize>(m_buffer.size()));
  if (!*m_out)
    throw RecordError(RecordErrorKind::Io, fmt::format("record {}: write failed", m_count));
  m_last_timestamp = frame.timestamp();
  ++m_count;
}

void RecordWriter::close()
{
  m_out->flush();
  if (m_file.is_open())
    m_file.close();
}

RecordReader::RecordReader(const std::filesystem::path& path)
  : m_file(path, std::ios::binary), m_in(&m_file)
{
  if (!m_file)
    throw RecordError(RecordErrorKind::Io, "cannot open " + path.string());
  read_header(path.string());
}

RecordReader::RecordReader(std::istream& in, const std::string& name)
  : m_in(&in)
{
  read_header(name);
}

void RecordReader::read_header(const std::string& name)
{
  std::array<char, record_header_bytes> buf{};
  m_in->read(buf.data(), static_cast<std::streamsize>(buf.size()));
  const auto got = static_cast<std::size_t>(m_in->gcount());
  if (got < magic.size() || std::memcmp(buf.data(), magic.data(), magic.size()) != 0)
    throw RecordError(RecordErrorKind::BadMagic, name + ": not a CSIS1 record file");
  if (got < buf.size())
    throw RecordError(RecordErrorKind::TruncatedHeader, name + ": truncated header");

  const char* p = buf.data() + magic.size();
  m_header.shape.n_rx = get_le<std::uint16_t>(p);
  m_header.shape.n_tx = get_le<std::uint16_t>(p + 2);
  m_header.shape.n_sc = get_le<std::uint16_t>(p + 4);
  m_header.sample_rate = std::bit_cast<double>(get_le<std::uint64_t>(p + 6));
  const auto tag = static_cast<unsigned char>(p[14]);
  if (m_header.shape.size() == 0)
    throw RecordError(RecordErrorKind::DimMismatch, name + ": zero dimension in header");
  if (tag > 1)
    throw RecordError(RecordErrorKind::DimMismatch,
                      fmt::format("{}: unknown domain byte {}", name, tag));
  m_header.domain = tag == 0 ? DomainTag::FrequencyCsi : DomainTag::TimeCir;
  m_buffer.resize(m_header.record_bytes());
}

std::optional<CsiFrame> RecordReader::next()
{
  m_in->read(m_buffer.data(), static_cast<std::streamsize>(m_buffer.size()));
  const auto got = static_cast<std::size_t>(m_in->gcount());
  if (got == 0)
    return std::nullopt;
  if (got < m_buffer.size())
    throw RecordError(RecordErrorKind::TruncatedRecord,
                      fmt::format("record {} truncated: {} of {} bytes", m_count, got,
                                  m_buffer.size()));

  const double t = std::bit_cast<double>(get_le<std::uint64_t>(m_buffer.data()));
  if (m_last_timestamp && !(t >= *m_last_timestamp))
    throw RecordError(RecordErrorKind::NonMonotoneTimestamp,
                      fmt::format("record {}: timestamp {} precedes {}", m_count, t,
                                  *m_last_timestamp));
  std::vector<cdouble> values(m_header.shape.size());
  const char* p = m_buffer.data() + 8;
  for (auto& v : values)
  {
    const float re = std::bit_cast<float>(get_le<std::uint32_t>(p));
    const float im = std::bit_cast<float>(get_le<std::uint32_t>(p + 4));
    v = {re, im};
    p += 8;
  }
  m_last_timestamp = t;
  const std::size_t index = m_count++;
  try
  {
    return CsiFrame(t, m_header.shape, std::move(values), m_header.domain);
  }
  catch (const ContractError& e)
  {
    throw RecordError(RecordErrorKind::Io, fmt::format("record {}: {}", index, e.what()));
  }
}

std::vector<CsiFrame> read_stream(const std::filesystem::path& path, std::optional<Shape> expected)
{
  RecordReader reader(path);
  if (expected && !(*expected == reader.header().shape))
    throw RecordError(RecordErrorKind::DimMismatch,
                      fmt::format("{}: header shape {}x{}x{} differs from expected {}x{}x{}",
                                  path.string(), reader.header().shape.n_rx,
                                  reader.header().shape.n_tx, reader.header().shape.n_sc,
                                  expected->n_rx, expected->n_tx, expected->n_sc));
  std::vector<CsiFrame> out;
  while (auto f = reader.next())
    out.push_back(std::move(*f));
  return out;
}

void write_stream(const std::filesystem::path& path, const RecordHeader& header,
                  const std::vector<CsiFrame>& frames)
{
  RecordWriter writer(path, header);
  for (const auto& f : frames)
    writer.write(f);
  writer.close();
}

} // namespace csispace
