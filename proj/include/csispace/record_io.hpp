// SPDX-License-Identifier: Apache-2.0
//
// csispace - subspace statistics for MIMO Wi-Fi channel state information
// ------------------------------------------------------------------------

#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "csispace/csi_core.hpp"

namespace csispace
{

// Binary stream layout, little-endian throughout:
//   header : "CSIS1" | u16 n_rx | u16 n_tx | u16 n_sc | f64 sample_rate | u8 domain
//   record : f64 timestamp | n_rx*n_tx*n_sc x (f32 re, f32 im), Rx-major then Tx then Sc
// Domain byte: 0 = frequency-domain CSI, 1 = time-domain CIR.

enum class RecordErrorKind
{
  BadMagic,
  TruncatedHeader,
  TruncatedRecord,
  DimMismatch,
  NonMonotoneTimestamp,
  Io
};

class RecordError : public std::runtime_error
{
public:
  RecordError(RecordErrorKind kind, const std::string& what)
    : std::runtime_error(what), m_kind(kind)
  {
  }
  RecordErrorKind kind() const { return m_kind; }

private:
  RecordErrorKind m_kind;
};

struct RecordHeader
{
  Shape shape;
  double sample_rate = 0.0;
  DomainTag domain = DomainTag::FrequencyCsi;

  std::size_t record_bytes() const { return 8 + 8 * shape.size(); }
};

inline constexpr std::size_t record_header_bytes = 5 + 3 * 2 + 8 + 1;

class RecordWriter
{
public:
  RecordWriter(const std::filesystem::path& path, const RecordHeader& header);
  /// Writes to a caller-owned stream (e.g. std::cout).
  RecordWriter(std::ostream& out, const RecordHeader& header);
  /// Values are narrowed to 32-bit floats. Shape and domain must match the
  /// header and timestamps must be non-decreasing.
  void write(const CsiFrame& frame);
  void close();
  std::size_t records_written() const { return m_count; }

private:
  void write_header();

  std::ofstream m_file;
  std::ostream* m_out;
  RecordHeader m_header;
  std::size_t m_count = 0;
  std::optional<double> m_last_timestamp;
  std::vector<char> m_buffer;
};

class RecordReader
{
public:
  explicit RecordReader(const std::filesystem::path& path);
  /// Reads from a caller-owned stream (e.g. std::cin).
  explicit RecordReader(std::istream& in, const std::string& name = "<stream>");
  const RecordHeader& header() const { return m_header; }
  /// Next frame, or nothing at a clean end of file.
  std::optional<CsiFrame> next();
  std::size_t records_read() const { return m_count; }

private:
  void read_header(const std::string& name);

  std::ifstream m_file;
  std::istream* m_in;
  RecordHeader m_header;
  std::size_t m_count = 0;
  std::optional<double> m_last_timestamp;
  std::vector<char> m_buffer;
};

/// Reads a whole stream. When `expected` is set a header with a different shape
/// raises RecordErrorKind::DimMismatch.
std::vector<CsiFrame> read_stream(const std::filesystem::path& path,
                                  std::optional<Shape> expected = std::nullopt);

void write_stream(const std::filesystem::path& path, const RecordHeader& header,
                  const std::vector<CsiFrame>& frames);

} // namespace csispace
