#include "persistminer/stream_io.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <random>

#include "persistminer/error.hpp"

namespace persistminer {
namespace {

constexpr std::array<const char*, 7> kFieldNames = {
    "t", "op", "src", "rel", "dst", "src_label", "dst_label"};

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    std::size_t pos = line.find(',', start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

[[noreturn]] void malformed(std::size_t line_no, std::size_t field,
                            const std::string& why) {
  throw StreamError(line_no, "line " + std::to_string(line_no) + ", field '" +
                                 kFieldNames[field] + "': " + why);
}

std::string format_double(double v) {
  std::array<char, 64> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), ptr);
}

std::string_view strip_cr(std::string_view s) {
  if (!s.empty() && s.back() == '\r') s.remove_suffix(1);
  return s;
}

}  // namespace

EdgeUpdate parse_update(std::string_view line, std::size_t line_no) {
  auto fields = split_fields(strip_cr(line));
  if (fields.size() != 5 && fields.size() != 7) {
    throw StreamError(line_no, "line " + std::to_string(line_no) +
                                   ": expected 5 or 7 fields, got " +
                                   std::to_string(fields.size()));
  }

  EdgeUpdate u;
  auto ts = fields[0];
  while (!ts.empty() && ts.front() == ' ') ts.remove_prefix(1);
  while (!ts.empty() && ts.back() == ' ') ts.remove_suffix(1);
  auto [ptr, ec] = std::from_chars(ts.data(), ts.data() + ts.size(), u.t);
  if (ts.empty() || ec != std::errc() || ptr != ts.data() + ts.size())
    malformed(line_no, 0, "not a number: '" + std::string(fields[0]) + "'");
  if (!std::isfinite(u.t) || u.t < 0.0)
    malformed(line_no, 0, "timestamp must be finite and non-negative");

  if (fields[1] == "+") {
    u.op = Op::Insert;
  } else if (fields[1] == "-") {
    u.op = Op::Delete;
  } else {
    malformed(line_no, 1, "expected '+' or '-', got '" + std::string(fields[1]) + "'");
  }

  if (fields[2].empty()) malformed(line_no, 2, "empty node id");
  if (fields[4].empty()) malformed(line_no, 4, "empty node id");
  u.src = fields[2];
  u.rel = fields[3];
  u.dst = fields[4];
  if (fields.size() == 7) {
    u.src_label = std::string(fields[5]);
    u.dst_label = std::string(fields[6]);
  }
  return u;
}

std::string format_update(const EdgeUpdate& u) {
  std::string out = format_double(u.t);
  out += ',';
  out += op_char(u.op);
  out += ',';
  out += u.src;
  out += ',';
  out += u.rel;
  out += ',';
  out += u.dst;
  if (u.src_label || u.dst_label) {
    out += ',';
    out += u.src_label.value_or("");
    out += ',';
    out += u.dst_label.value_or("");
  }
  return out;
}

std::optional<EdgeUpdate> StreamReader::next() {
  while (std::getline(*in_, buf_)) {
    ++line_no_;
    std::string_view line = strip_cr(buf_);
    if (line.empty() || line.front() == '#') continue;

    EdgeUpdate u = parse_update(line, line_no_);
    if (meta_.count == 0) {
      meta_.start_time = u.t;
    } else if (u.t < meta_.end_time) {
      throw StreamError(line_no_, "out-of-order stream at line " +
                                      std::to_string(line_no_) + ": timestamp " +
                                      format_double(u.t) + " follows " +
                                      format_double(meta_.end_time));
    }
    meta_.end_time = u.t;
    ++meta_.count;
    return u;
  }
  return std::nullopt;
}

Stream read_stream(std::istream& in) {
  Stream out;
  StreamReader reader(in);
  while (auto u = reader.next()) out.push_back(std::move(*u));
  return out;
}

Stream read_stream(const std::string& path) {
  if (path == "-") return read_stream(std::cin);
  std::ifstream in(path);
  if (!in) throw Error("cannot open input file: " + path);
  return read_stream(in);
}

void write_stream(std::ostream& out, const Stream& stream) {
  for (const auto& u : stream) out << format_update(u) << '\n';
}

void write_stream(const std::string& path, const Stream& stream) {
  if (path == "-") {
    write_stream(std::cout, stream);
    return;
  }
  std::ofstream out(path);
  if (!out) throw Error("cannot open output file: " + path);
  write_stream(out, stream);
  if (!out) throw Error("failed writing " + path);
}

StreamMeta stream_meta(const Stream& stream) {
  StreamMeta meta;
  if (stream.empty()) return meta;
  meta.start_time = stream.front().t;
  meta.end_time = stream.back().t;
  meta.count = stream.size();
  return meta;
}

Stream generate_synthetic(std::uint64_t n, double rate, std::uint32_t node_count,
                          std::uint64_t seed) {
  if (n < 1) throw ConfigError("generate_synthetic: n must be >= 1");
  if (!(rate > 0.0)) throw ConfigError("generate_synthetic: rate must be > 0");
  if (node_count < 2) throw ConfigError("generate_synthetic: node_count must be >= 2");

  std::mt19937_64 rng(seed);
  std::exponential_distribution<double> gap(rate);
  std::uniform_int_distribution<std::uint32_t> node(0, node_count - 1);
  std::uniform_int_distribution<std::uint32_t> other(0, node_count - 2);

  Stream out;
  out.reserve(n);
  double t = 0.0;
  for (std::uint64_t i = 0; i < n; ++i) {
    if (i > 0) t += gap(rng);
    std::uint32_t a = node(rng);
    std::uint32_t b = other(rng);
    if (b >= a) ++b;
    EdgeUpdate u;
    u.op = Op::Insert;
    u.src = "n" + std::to_string(a);
    u.dst = "n" + std::to_string(b);
    u.t = t;
    out.push_back(std::move(u));
  }
  return out;
}

Stream generate_trip_stream(const TripStreamOptions& opts) {
  if (opts.trips < 1) throw ConfigError("generate_trip_stream: trips must be >= 1");
  if (!(opts.rate > 0.0)) throw ConfigError("generate_trip_stream: rate must be > 0");
  if (opts.node_count < 2)
    throw ConfigError("generate_trip_stream: node_count must be >= 2");
  if (!(opts.mean_duration > 0.0))
    throw ConfigError("generate_trip_stream: mean_duration must be > 0");

  std::mt19937_64 rng(opts.seed);
  std::exponential_distribution<double> gap(opts.rate);
  std::exponential_distribution<double> duration(1.0 / opts.mean_duration);

  std::vector<double> weights(opts.node_count);
  for (std::uint32_t i = 0; i < opts.node_count; ++i)
    weights[i] = 1.0 / std::pow(static_cast<double>(i + 1), opts.popularity_skew);
  std::discrete_distribution<std::uint32_t> station(weights.begin(), weights.end());

  Stream out;
  out.reserve(2 * opts.trips);
  double t = 0.0;
  for (std::uint64_t i = 0; i < opts.trips; ++i) {
    if (i > 0) t += gap(rng);
    std::uint32_t a = station(rng);
    std::uint32_t b = station(rng);
    while (b == a) b = station(rng);

    EdgeUpdate dep;
    dep.op = Op::Insert;
    dep.src = "s" + std::to_string(a);
    dep.dst = "s" + std::to_string(b);
    dep.t = t;
    EdgeUpdate arr = dep;
    arr.op = Op::Delete;
    arr.t = t + duration(rng);
    out.push_back(std::move(dep));
    out.push_back(std::move(arr));
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const EdgeUpdate& x, const EdgeUpdate& y) { return x.t < y.t; });
  return out;
}

}  // namespace persistminer
