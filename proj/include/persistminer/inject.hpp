#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "persistminer/stream_io.hpp"

namespace persistminer {

/// Synthetic subtly-persistent activity: a handful of trips, each repeated a
/// few dozen times at near-uniform spacing across almost the whole stream.
struct InjectionSpec {
  std::uint32_t trip_count = 50;
  std::uint32_t occ_min = 5;
  std::uint32_t occ_max = 100;
  double jitter = 1200.0;  // seconds, each occurrence moves by U[-jitter, jitter]
  double margin = 600.0;   // start/end drawn within this distance of the stream bounds
  /// Each occurrence inserts the edge and deletes it this many seconds later
  /// (clipped to the stream end). Zero or less injects insertions only.
  double trip_duration = 900.0;
  /// Forces the occurrence count of every trip (testing aid).
  std::optional<std::uint32_t> fixed_occurrences;
  std::uint32_t max_attempts = 100000;  // per trip, when searching for an unused pair
  std::uint64_t seed = 0;

  void validate(double span) const;
};

struct InjectedTrip {
  std::string src;
  std::string dst;
  std::vector<double> occurrences;  // departure times, sorted
};

struct InjectionResult {
  Stream stream;               // host + injected, time-sorted
  std::vector<int> labels;     // 1 for injected updates, aligned with `stream`
  std::vector<InjectedTrip> trips;

  std::uint64_t injected_count() const;
};

/// Draws an occurrence count in [lo, hi] with probability proportional to 1/n.
std::uint32_t draw_inverse_weighted(std::uint32_t lo, std::uint32_t hi, std::mt19937_64& rng);

InjectionResult inject(const Stream& host, const InjectionSpec& spec);

/// `line_index,label` rows, one per update of the augmented stream.
void write_labels(const std::string& path, const std::vector<int>& labels);
std::vector<int> read_labels(const std::string& path);

}  // namespace persistminer
