#include "persistminer/anomaly.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "persistminer/error.hpp"

namespace persistminer {

void RunningStats::add(double x) {
  if (low_.empty() || x <= low_.top()) {
    low_.push(x);
  } else {
    high_.push(x);
  }
  if (low_.size() > high_.size() + 1) {
    high_.push(low_.top());
    low_.pop();
  } else if (high_.size() > low_.size()) {
    low_.push(high_.top());
    high_.pop();
  }

  ++n_;
  const double delta = x - mean_;
  mean_ += delta / static_cast<double>(n_);
  m2_ += delta * (x - mean_);
}

double RunningStats::median() const {
  if (n_ == 0) return 0.0;
  if (low_.size() > high_.size()) return low_.top();
  return 0.5 * (low_.top() + high_.top());
}

double RunningStats::stddev() const {
  if (n_ == 0) return 0.0;
  return std::sqrt(std::max(m2_, 0.0) / static_cast<double>(n_));
}

int anomaly_level(double score, double median, double sigma) {
  if (!(sigma > 0.0)) return 0;
  if (score >= median + 3.0 * sigma) return 3;
  if (score >= median + 2.0 * sigma) return 2;
  if (score >= median + sigma) return 1;
  return 0;
}

AnomalyVerdict AnomalyDetector::rank(double score) {
  stats_.add(score);
  AnomalyVerdict v;
  v.score = score;
  if (stats_.count() >= kLevelWarmup)
    v.level = anomaly_level(score, stats_.median(), stats_.stddev());
  return v;
}

AnomalyVerdict AnomalyDetector::score(const AnomalyPoint& point) {
  auto it = point_of_.find(point.key);
  if (it != point_of_.end()) {
    forest_.erase(it->second);
  } else {
    it = point_of_.emplace(std::string(point.key), PointId{}).first;
  }
  const PointId id = next_id_++;
  it->second = id;
  return rank(forest_.insert_and_score(id, Point2{point.f, point.p}));
}

KeyMap<double> freq_baseline(const MiningResult& result) {
  KeyMap<double> scores;
  std::uint64_t total = 0;
  for (const auto& [key, s] : result.snippets) total += s.occ_count;
  if (total == 0) return scores;
  scores.reserve(result.snippets.size());
  for (const auto& [key, s] : result.snippets)
    scores.emplace(key, static_cast<double>(s.occ_count) / static_cast<double>(total));
  return scores;
}

long ds_period(double t, double t_start, double t_end, std::uint32_t periods) {
  if (t < t_start || t > t_end || periods == 0) return -1;
  if (!(t_end > t_start)) return 0;
  const double width = (t_end - t_start) / periods;
  long idx = static_cast<long>(std::floor((t - t_start) / width));
  return std::clamp<long>(idx, 0, static_cast<long>(periods) - 1);
}

std::uint64_t ds_baseline(std::span<const double> occurrences, double t_start, double t_end,
                          std::uint32_t periods) {
  std::vector<bool> hit(periods, false);
  std::uint64_t count = 0;
  for (double t : occurrences) {
    const long p = ds_period(t, t_start, t_end, periods);
    if (p < 0 || hit[p]) continue;
    hit[p] = true;
    ++count;
  }
  return count;
}

DsTracker::DsTracker(double t_start, double t_end, std::uint32_t periods)
    : t_start_(t_start), t_end_(t_end), periods_(periods) {
  if (periods_ == 0) throw ConfigError("DS heuristic: periods must be >= 1");
  if (t_end_ < t_start_) throw OrderingError("DS heuristic: stream end precedes start");
}

std::uint64_t DsTracker::record(std::string_view key, double t) {
  auto it = entries_.find(key);
  if (it == entries_.end()) {
    it = entries_.emplace(std::string(key), Entry{}).first;
    it->second.hit.assign(periods_, false);
  }
  Entry& e = it->second;
  const long p = ds_period(t, t_start_, t_end_, periods_);
  if (p >= 0 && !e.hit[p]) {
    e.hit[p] = true;
    ++e.count;
  }
  return e.count;
}

double roc_auc(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size())
    throw ConfigError("roc_auc: scores and labels differ in length");
  const std::size_t n = scores.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  // Mann-Whitney U with average ranks for ties.
  double positive_rank_sum = 0.0;
  std::uint64_t positives = 0;
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j < n && scores[order[j]] == scores[order[i]]) ++j;
    const double avg_rank = 0.5 * static_cast<double>(i + 1 + j);
    for (std::size_t k = i; k < j; ++k) {
      if (labels[order[k]] != 0) {
        positive_rank_sum += avg_rank;
        ++positives;
      }
    }
    i = j;
  }
  const std::uint64_t negatives = n - positives;
  if (positives == 0 || negatives == 0) return 0.5;
  const double p = static_cast<double>(positives);
  const double u = positive_rank_sum - p * (p + 1.0) / 2.0;
  return u / (p * static_cast<double>(negatives));
}

double f1_at_k(std::span<const double> scores, std::span<const int> labels, std::size_t k) {
  if (scores.size() != labels.size())
    throw ConfigError("f1_at_k: scores and labels differ in length");
  const std::size_t n = scores.size();
  k = std::min(k, n);
  std::uint64_t positives = 0;
  for (int l : labels) positives += l != 0;
  if (k == 0 || positives == 0) return 0.0;

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  std::uint64_t tp = 0;
  for (std::size_t i = 0; i < k; ++i) tp += labels[order[i]] != 0;
  if (tp == 0) return 0.0;
  const double precision = static_cast<double>(tp) / static_cast<double>(k);
  const double recall = static_cast<double>(tp) / static_cast<double>(positives);
  return 2.0 * precision * recall / (precision + recall);
}

}  // namespace persistminer
