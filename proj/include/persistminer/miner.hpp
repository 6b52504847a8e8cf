#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "persistminer/persistence.hpp"
#include "persistminer/snippets.hpp"
#include "persistminer/stream_io.hpp"

namespace persistminer {

enum class Variant { Offline, Streaming };

Variant parse_variant(std::string_view name);
std::string_view variant_name(Variant v);

struct MinerConfig {
  double delta_max = 0.0;  // seconds; irrelevant when k_max == 1
  std::size_t k_max = 1;
  View view = View::Id;
  PersistenceParams params;
  Variant variant = Variant::Offline;

  void validate() const;
};

struct SnippetSummary {
  std::uint64_t occ_count = 0;
  double frequency = 0.0;
  double persistence = 0.0;
  double t_first = 0.0;
  double t_last = 0.0;
};

/// Transparent hashing so lookups by string_view avoid a copy.
struct KeyHash {
  using is_transparent = void;
  std::size_t operator()(std::string_view s) const noexcept {
    return std::hash<std::string_view>{}(s);
  }
};

template <class V>
using KeyMap = std::unordered_map<std::string, V, KeyHash, std::equal_to<>>;

struct MiningResult {
  double start_time = 0.0;
  double end_time = 0.0;
  std::uint64_t update_count = 0;
  KeyMap<SnippetSummary> snippets;

  /// (key, summary) pairs by persistence descending, ties by key ascending.
  std::vector<std::pair<std::string, SnippetSummary>> ranked() const;
};

/// Occurrence-logging miner: keeps every occurrence timestamp and computes
/// persistence over [START, END] once the stream is exhausted.
class OfflineMiner {
 public:
  explicit OfflineMiner(MinerConfig config);

  /// Throws StreamError if `u` is older than the previous update.
  void push(const EdgeUpdate& u);
  MiningResult finish() const;

  const Window& window() const noexcept { return window_; }
  std::uint64_t occurrence_count() const noexcept { return occurrences_; }

 private:
  MinerConfig config_;
  Window window_;
  KeyMap<std::vector<double>> logs_;
  std::uint64_t updates_ = 0;
  std::uint64_t occurrences_ = 0;
  double start_ = 0.0;
  double last_ = 0.0;
};

/// Per-occurrence notification from the streaming miner.
struct OccurrenceEvent {
  double t = 0.0;
  std::string_view key;
  double frequency = 0.0;
  double persistence = 0.0;
  const SnippetRecord* record = nullptr;
};

using OccurrenceSink = std::function<void(const OccurrenceEvent&)>;

/// Incremental miner with constant state per snippet.
class StreamingMiner {
 public:
  explicit StreamingMiner(MinerConfig config);

  /// Processes one update, calling `sink` (if set) once per occurrence.
  void push(const EdgeUpdate& u, const OccurrenceSink& sink = {});

  /// P(key; [START, t]); nullopt for unseen keys. Throws OrderingError when t
  /// precedes the snippet's last occurrence.
  std::optional<double> query(std::string_view key, double t) const;

  const SnippetRecord* record(std::string_view key) const;

  /// Persistence of every snippet measured over [START, t_end].
  MiningResult snapshot(double t_end) const;
  MiningResult snapshot() const { return snapshot(last_); }

  double start_time() const noexcept { return start_; }
  double last_time() const noexcept { return last_; }
  std::uint64_t update_count() const noexcept { return updates_; }
  std::size_t snippet_count() const noexcept { return records_.size(); }
  const Window& window() const noexcept { return window_; }

 private:
  MinerConfig config_;
  Window window_;
  KeyMap<SnippetRecord> records_;
  std::uint64_t updates_ = 0;
  double start_ = 0.0;
  double last_ = 0.0;
};

MiningResult mine_offline(const Stream& stream, MinerConfig config);

void mine_streaming(const Stream& stream, MinerConfig config, const OccurrenceSink& sink);

}  // namespace persistminer
