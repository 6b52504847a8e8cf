#include "persistminer/persistence.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "persistminer/error.hpp"

namespace persistminer {
namespace {

void check_exponent(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v))
    throw ConfigError(std::string("persistence exponent ") + name +
                      " must be a positive finite number");
}

}  // namespace

void PersistenceParams::validate() const {
  check_exponent(alpha, "alpha");
  check_exponent(beta, "beta");
  check_exponent(gamma, "gamma");
}

double Components::combine(const PersistenceParams& params) const {
  return std::pow(width, params.alpha) * std::pow(frequency, params.beta) *
         std::pow(spread, params.gamma);
}

double width(double t_first, double t_last, double t_start, double t_end) {
  if (!(t_start <= t_first && t_first <= t_last && t_last <= t_end)) {
    throw OrderingError("width: need t_start <= t_first <= t_last <= t_end, got " +
                        std::to_string(t_start) + ", " + std::to_string(t_first) + ", " +
                        std::to_string(t_last) + ", " + std::to_string(t_end));
  }
  return (t_last - t_first + 1.0) / (t_end - t_start + 1.0);
}

double frequency(std::uint64_t occ_count) {
  return std::log10(static_cast<double>(occ_count) + 1.0);
}

double gap_entropy(std::span<const double> gaps) {
  double total = 0.0;
  for (double g : gaps) total += g;
  if (!(total > 0.0)) return 0.0;
  double h = 0.0;
  for (double g : gaps) {
    if (g <= 0.0) continue;
    const double p = g / total;
    h -= p * std::log2(p);
  }
  return std::max(h, 0.0);
}

double spread_from_entropy(double entropy, std::uint64_t gap_count) {
  if (gap_count <= 1) return 1.0;
  const double max_entropy = std::log2(static_cast<double>(gap_count));
  return std::clamp(entropy, 0.0, max_entropy) / max_entropy + 1.0;
}

double spread(std::span<const double> gaps) {
  return spread_from_entropy(gap_entropy(gaps), gaps.size());
}

std::vector<double> unique_gaps(std::span<const double> occurrences) {
  std::vector<double> gaps;
  if (occurrences.empty()) return gaps;
  double prev = occurrences.front();
  for (std::size_t i = 1; i < occurrences.size(); ++i) {
    if (occurrences[i] != prev) {
      gaps.push_back(occurrences[i] - prev);
      prev = occurrences[i];
    }
  }
  return gaps;
}

Components persistence_components(std::span<const double> occurrences, double t_start,
                                  double t_end) {
  if (t_start > t_end) {
    throw OrderingError("persistence: interval start " + std::to_string(t_start) +
                        " exceeds end " + std::to_string(t_end));
  }
  Components c;
  if (occurrences.empty()) return c;
  if (!std::is_sorted(occurrences.begin(), occurrences.end()))
    throw OrderingError("persistence: occurrences must be non-decreasing");
  const double t_first = occurrences.front();
  const double t_last = occurrences.back();
  if (t_first < t_start || t_last > t_end) {
    throw IntervalError("persistence: occurrences span [" + std::to_string(t_first) + ", " +
                        std::to_string(t_last) + "] outside interval [" +
                        std::to_string(t_start) + ", " + std::to_string(t_end) + "]");
  }
  c.width = width(t_first, t_last, t_start, t_end);
  c.frequency = frequency(occurrences.size());
  c.spread = spread(unique_gaps(occurrences));
  return c;
}

double persistence(std::span<const double> occurrences, double t_start, double t_end,
                   const PersistenceParams& params) {
  Components c = persistence_components(occurrences, t_start, t_end);
  if (occurrences.empty()) return 0.0;
  return c.combine(params);
}

// Closed-form entropy update for one new gap. Expanding
//   H' = H + (Z/Z')log Z' - log Z - (g/Z')log(g/Z') + (1/Z - 1/Z')(log Z - H)Z
// and collecting terms gives the grouping form used here, which avoids
// cancelling the two large log Z terms against each other.
double extend_gap_entropy(double entropy, double total, double gap) {
  const double new_total = total + gap;
  const double keep = total / new_total;
  const double fresh = gap / new_total;
  double h = keep * entropy + keep * std::log2(new_total / total) - fresh * std::log2(fresh);
  // H >= 0 always; rounding may leave a residue just below zero.
  return h < 0.0 && h > -1e-12 ? 0.0 : h;
}

Components SnippetRecord::components(double t_start, double t_now) const {
  Components c;
  if (occ_count == 0) return c;
  c.width = width(t_first, t_last, t_start, t_now);
  c.frequency = frequency(occ_count);
  c.spread = spread_from_entropy(entropy, gap_count);
  return c;
}

double record_occurrence(SnippetRecord& rec, double t, double t_start,
                         const PersistenceParams& params) {
  if (t < t_start) {
    throw OrderingError("record_occurrence: occurrence " + std::to_string(t) +
                        " precedes stream start " + std::to_string(t_start));
  }
  if (rec.occ_count == 0) {
    rec.occ_count = 1;
    rec.gap_count = 0;
    rec.t_first = rec.t_last = t;
    rec.entropy = 0.0;
    rec.normalizer = 0.0;
  } else {
    if (t < rec.t_last) {
      throw OrderingError("record_occurrence: occurrence " + std::to_string(t) +
                          " precedes last occurrence " + std::to_string(rec.t_last));
    }
    if (t > rec.t_last) {
      const double gap = t - rec.t_last;
      if (rec.gap_count == 0) {
        rec.entropy = 0.0;
      } else {
        rec.entropy = extend_gap_entropy(rec.entropy, rec.normalizer, gap);
      }
      ++rec.gap_count;
      rec.t_last = t;
      rec.normalizer = rec.t_last - rec.t_first;
    }
    ++rec.occ_count;
  }
  rec.last_persistence = rec.components(t_start, t).combine(params);
  return rec.last_persistence;
}

double query_persistence(const SnippetRecord& rec, double t, double t_start,
                         const PersistenceParams& params) {
  if (rec.occ_count == 0) return 0.0;
  if (t < rec.t_last) {
    throw OrderingError("query_persistence: query time " + std::to_string(t) +
                        " precedes last occurrence " + std::to_string(rec.t_last));
  }
  return rec.components(t_start, t).combine(params);
}

}  // namespace persistminer
