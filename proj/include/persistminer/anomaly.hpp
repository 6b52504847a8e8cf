#pragma once

#include <cstdint>
#include <functional>
#include <queue>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "persistminer/miner.hpp"
#include "persistminer/rcf.hpp"

namespace persistminer {

/// A snippet occurrence placed on the frequency/persistence plane.
struct AnomalyPoint {
  std::string_view key;
  double t = 0.0;
  double f = 0.0;
  double p = 0.0;
};

struct AnomalyVerdict {
  double score = 0.0;
  int level = 0;  // 0..3
};

/// Exact running median (two heaps) and population standard deviation
/// (Welford) over every value seen.
class RunningStats {
 public:
  void add(double x);
  std::uint64_t count() const noexcept { return n_; }
  double median() const;
  double mean() const noexcept { return mean_; }
  double stddev() const;

 private:
  std::priority_queue<double> low_;
  std::priority_queue<double, std::vector<double>, std::greater<>> high_;
  std::uint64_t n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

/// 1, 2 or 3 when `score` is at least that many standard deviations above
/// the median (capped at 3), else 0. A zero deviation yields 0.
int anomaly_level(double score, double median, double sigma);

/// Number of scores required before levels other than 0 are emitted.
inline constexpr std::uint64_t kLevelWarmup = 30;

/// Scores points with a random cut forest, keeping at most one point per
/// snippet: a snippet's earlier point is removed before its new one is
/// scored.
class AnomalyDetector {
 public:
  explicit AnomalyDetector(ForestConfig config) : forest_(config) {}

  AnomalyVerdict score(const AnomalyPoint& point);

  /// Turns an externally computed score into a verdict using (and updating)
  /// the running statistics. Used by the frequency baseline.
  AnomalyVerdict rank(double score);

  const RunningStats& stats() const noexcept { return stats_; }
  const RandomCutForest& forest() const noexcept { return forest_; }
  /// Number of snippets that currently have a live point id.
  std::size_t tracked_keys() const noexcept { return point_of_.size(); }

 private:
  RandomCutForest forest_;
  KeyMap<PointId> point_of_;
  PointId next_id_ = 0;
  RunningStats stats_;
};

/// |O_x| / sum_y |O_y| for every mined snippet.
KeyMap<double> freq_baseline(const MiningResult& result);

/// Periods (out of `periods` equal slices of [t_start, t_end], last one
/// closed) that contain at least one occurrence.
std::uint64_t ds_baseline(std::span<const double> occurrences, double t_start, double t_end,
                          std::uint32_t periods = 60);

/// Index of the period containing `t`, or -1 if t is outside [t_start, t_end].
long ds_period(double t, double t_start, double t_end, std::uint32_t periods);

/// Streaming DS heuristic: per-snippet set of periods hit so far over a
/// known stream span.
class DsTracker {
 public:
  DsTracker(double t_start, double t_end, std::uint32_t periods = 60);

  /// Records an occurrence and returns the snippet's current period count.
  std::uint64_t record(std::string_view key, double t);

 private:
  double t_start_;
  double t_end_;
  std::uint32_t periods_;
  struct Entry {
    std::vector<bool> hit;
    std::uint64_t count = 0;
  };
  KeyMap<Entry> entries_;
};

/// Area under the ROC curve (ties get half credit). Returns 0.5 when either
/// class is empty.
double roc_auc(std::span<const double> scores, std::span<const int> labels);

/// F1 of predicting the `k` highest-scoring items positive (ties broken by
/// position).
double f1_at_k(std::span<const double> scores, std::span<const int> labels, std::size_t k);

}  // namespace persistminer
