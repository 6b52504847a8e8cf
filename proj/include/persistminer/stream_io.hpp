#pragma once

#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace persistminer {

enum class Op : char { Insert = '+', Delete = '-' };

inline char op_char(Op op) { return static_cast<char>(op); }

/// One timestamped insertion or deletion of a typed edge.
struct EdgeUpdate {
  Op op = Op::Insert;
  std::string src;
  std::string rel;
  std::string dst;
  double t = 0.0;  // seconds
  std::optional<std::string> src_label;
  std::optional<std::string> dst_label;

  bool operator==(const EdgeUpdate&) const = default;
};

using Stream = std::vector<EdgeUpdate>;

struct StreamMeta {
  double start_time = 0.0;
  double end_time = 0.0;
  std::uint64_t count = 0;
};

/// Parses one CSV record `t,op,src,rel,dst[,src_label,dst_label]`.
/// Throws StreamError naming `line_no` and the offending field.
EdgeUpdate parse_update(std::string_view line, std::size_t line_no);

/// Renders an update as one CSV record (no trailing newline). Timestamps use
/// the shortest representation that parses back to the same double.
std::string format_update(const EdgeUpdate& u);

/// Lazy, single-pass reader over a line-oriented edge stream.
///
/// Blank lines and lines beginning with `#` are skipped. Timestamps must be
/// non-decreasing; a decrease raises StreamError("out-of-order stream ...").
class StreamReader {
 public:
  explicit StreamReader(std::istream& in) : in_(&in) {}

  /// Next update in file order, or nullopt at end of input.
  std::optional<EdgeUpdate> next();

  const StreamMeta& meta() const noexcept { return meta_; }
  std::size_t line_number() const noexcept { return line_no_; }

 private:
  std::istream* in_;
  std::string buf_;
  std::size_t line_no_ = 0;
  StreamMeta meta_;
};

/// Reads a whole stream. `path` of "-" reads standard input.
Stream read_stream(const std::string& path);
Stream read_stream(std::istream& in);

void write_stream(std::ostream& out, const Stream& stream);
void write_stream(const std::string& path, const Stream& stream);

/// Metadata of an in-memory stream; count == 0 for an empty stream.
StreamMeta stream_meta(const Stream& stream);

/// Uniform synthetic stream: `n` insertions, exponential inter-arrival gaps
/// of mean 1/rate starting at t = 0, endpoints drawn uniformly as distinct
/// pairs over `node_count` nodes named n0..n{node_count-1}.
Stream generate_synthetic(std::uint64_t n, double rate, std::uint32_t node_count,
                          std::uint64_t seed);

struct TripStreamOptions {
  std::uint64_t trips = 100000;
  double rate = 0.0125;          // trip departures per second
  std::uint32_t node_count = 600;
  double popularity_skew = 1.0;  // Zipf exponent over stations
  double mean_duration = 900.0;  // seconds en route
  std::uint64_t seed = 0;
};

/// Bike-share style stream: each trip inserts an edge on departure and
/// deletes it on arrival. Station popularity is Zipf distributed so that
/// some routes are frequent and most pairs are never used.
Stream generate_trip_stream(const TripStreamOptions& opts);

}  // namespace persistminer
