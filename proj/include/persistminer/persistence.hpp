#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace persistminer {

/// Exponents weighting width, frequency and spread. All must be in (0, inf).
struct PersistenceParams {
  double alpha = 1.0;
  double beta = 1.0;
  double gamma = 1.0;

  void validate() const;
};

/// Width, frequency and spread terms before exponentiation.
struct Components {
  double width = 0.0;
  double frequency = 0.0;
  double spread = 1.0;

  double combine(const PersistenceParams& params) const;
};

/// Fraction of the measurement interval covered by the occurrence interval,
/// (t_l - t_f + 1) / (t_e - t_s + 1). Requires t_s <= t_f <= t_l <= t_e,
/// otherwise throws OrderingError.
double width(double t_first, double t_last, double t_start, double t_end);

/// log10(occ_count + 1).
double frequency(std::uint64_t occ_count);

/// Shannon entropy (bits) of the gaps normalized by their sum. Zero gaps
/// contribute nothing; an all-zero or empty gap sequence has entropy 0.
double gap_entropy(std::span<const double> gaps);

/// 1 for fewer than two gaps, else H / log2(gap_count) + 1, in [1, 2].
double spread(std::span<const double> gaps);

/// Spread term from a known entropy and gap count. The entropy is clamped
/// into [0, log2(gap_count)].
double spread_from_entropy(double entropy, std::uint64_t gap_count);

/// Gaps between consecutive unique timestamps of a sorted occurrence list.
std::vector<double> unique_gaps(std::span<const double> occurrences);

/// Batch persistence of a non-decreasing occurrence list over [t_start, t_end].
/// Empty list gives 0. Throws IntervalError for occurrences outside the
/// interval and OrderingError for an unsorted list.
double persistence(std::span<const double> occurrences, double t_start, double t_end,
                   const PersistenceParams& params);
Components persistence_components(std::span<const double> occurrences, double t_start,
                                  double t_end);

/// Entropy of the gap distribution after appending `gap` to a set of gaps
/// with entropy `entropy` and total `total` (total > 0, gap > 0).
double extend_gap_entropy(double entropy, double total, double gap);

/// Constant-size per-snippet state for streaming persistence.
struct SnippetRecord {
  std::uint64_t occ_count = 0;
  std::uint64_t gap_count = 0;
  double t_first = 0.0;
  double t_last = 0.0;
  double entropy = 0.0;     // bits, over normalized unique-occurrence gaps
  double normalizer = 0.0;  // t_last - t_first, the sum of all gaps
  double last_persistence = 0.0;

  Components components(double t_start, double t_now) const;
};

/// Folds an occurrence at `t` into `rec` and returns P(x; [t_start, t]).
/// A repeat of rec.t_last only bumps occ_count. Throws OrderingError when
/// t < rec.t_last or t < t_start.
double record_occurrence(SnippetRecord& rec, double t, double t_start,
                         const PersistenceParams& params);

/// Persistence at time `t >= rec.t_last` without a new occurrence: only the
/// width denominator changes.
double query_persistence(const SnippetRecord& rec, double t, double t_start,
                         const PersistenceParams& params);

}  // namespace persistminer
