#include "persistminer/miner.hpp"

#include <algorithm>
#include <cmath>

#include "persistminer/error.hpp"

namespace persistminer {
namespace {

void check_order(std::uint64_t seen, double last, const EdgeUpdate& u) {
  if (seen > 0 && u.t < last) {
    throw StreamError(seen + 1, "out-of-order stream: timestamp " + std::to_string(u.t) +
                                    " follows " + std::to_string(last));
  }
}

}  // namespace

Variant parse_variant(std::string_view name) {
  if (name == "offline") return Variant::Offline;
  if (name == "streaming") return Variant::Streaming;
  throw ConfigError("unknown variant '" + std::string(name) +
                    "' (expected offline|streaming)");
}

std::string_view variant_name(Variant v) {
  return v == Variant::Offline ? "offline" : "streaming";
}

void MinerConfig::validate() const {
  if (k_max < 1) throw ConfigError("k_max must be >= 1");
  if (k_max > 1 && !(delta_max > 0.0))
    throw ConfigError("delta_max must be > 0 when k_max > 1");
  if (!std::isfinite(delta_max)) throw ConfigError("delta_max must be finite");
  params.validate();
}

std::vector<std::pair<std::string, SnippetSummary>> MiningResult::ranked() const {
  std::vector<std::pair<std::string, SnippetSummary>> rows(snippets.begin(), snippets.end());
  std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
    if (a.second.persistence != b.second.persistence)
      return a.second.persistence > b.second.persistence;
    return a.first < b.first;
  });
  return rows;
}

OfflineMiner::OfflineMiner(MinerConfig config)
    : config_(config), window_(config.delta_max) {
  config_.validate();
}

void OfflineMiner::push(const EdgeUpdate& u) {
  check_order(updates_, last_, u);
  if (updates_ == 0) start_ = u.t;
  last_ = u.t;
  ++updates_;
  for_each_new_snippet(window_, u, config_.view, config_.k_max, [&](std::string_view key) {
    ++occurrences_;
    auto it = logs_.find(key);
    if (it == logs_.end()) it = logs_.emplace(std::string(key), std::vector<double>{}).first;
    it->second.push_back(u.t);
  });
}

MiningResult OfflineMiner::finish() const {
  MiningResult result;
  result.start_time = start_;
  result.end_time = last_;
  result.update_count = updates_;
  result.snippets.reserve(logs_.size());
  for (const auto& [key, log] : logs_) {
    SnippetSummary s;
    s.occ_count = log.size();
    s.frequency = frequency(log.size());
    s.persistence = persistence(log, start_, last_, config_.params);
    s.t_first = log.front();
    s.t_last = log.back();
    result.snippets.emplace(key, s);
  }
  return result;
}

StreamingMiner::StreamingMiner(MinerConfig config)
    : config_(config), window_(config.delta_max) {
  config_.validate();
}

void StreamingMiner::push(const EdgeUpdate& u, const OccurrenceSink& sink) {
  check_order(updates_, last_, u);
  if (updates_ == 0) start_ = u.t;
  last_ = u.t;
  ++updates_;
  for_each_new_snippet(window_, u, config_.view, config_.k_max, [&](std::string_view key) {
    auto it = records_.find(key);
    if (it == records_.end()) it = records_.emplace(std::string(key), SnippetRecord{}).first;
    SnippetRecord& rec = it->second;
    const double p = record_occurrence(rec, u.t, start_, config_.params);
    if (sink) sink(OccurrenceEvent{u.t, it->first, frequency(rec.occ_count), p, &rec});
  });
}

const SnippetRecord* StreamingMiner::record(std::string_view key) const {
  auto it = records_.find(key);
  return it == records_.end() ? nullptr : &it->second;
}

std::optional<double> StreamingMiner::query(std::string_view key, double t) const {
  const SnippetRecord* rec = record(key);
  if (!rec) return std::nullopt;
  return query_persistence(*rec, t, start_, config_.params);
}

MiningResult StreamingMiner::snapshot(double t_end) const {
  MiningResult result;
  result.start_time = start_;
  result.end_time = t_end;
  result.update_count = updates_;
  result.snippets.reserve(records_.size());
  for (const auto& [key, rec] : records_) {
    SnippetSummary s;
    s.occ_count = rec.occ_count;
    s.frequency = frequency(rec.occ_count);
    s.persistence = query_persistence(rec, t_end, start_, config_.params);
    s.t_first = rec.t_first;
    s.t_last = rec.t_last;
    result.snippets.emplace(key, s);
  }
  return result;
}

MiningResult mine_offline(const Stream& stream, MinerConfig config) {
  config.variant = Variant::Offline;
  OfflineMiner miner(config);
  for (const auto& u : stream) miner.push(u);
  return miner.finish();
}

void mine_streaming(const Stream& stream, MinerConfig config, const OccurrenceSink& sink) {
  config.variant = Variant::Streaming;
  StreamingMiner miner(config);
  for (const auto& u : stream) miner.push(u, sink);
}

}  // namespace persistminer
