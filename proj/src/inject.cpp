#include "persistminer/inject.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <unordered_map>
#include <unordered_set>

#include "persistminer/error.hpp"

namespace persistminer {
namespace {

std::string pair_key(const std::string& a, const std::string& b) {
  const bool swap = b < a;
  const std::string& x = swap ? b : a;
  const std::string& y = swap ? a : b;
  std::string k;
  k.reserve(x.size() + y.size() + 1);
  k += x;
  k += '\x1f';
  k += y;
  return k;
}

}  // namespace

void InjectionSpec::validate(double span) const {
  if (trip_count < 1) throw ConfigError("inject: trip_count must be >= 1");
  if (occ_min < 2) throw ConfigError("inject: occ_min must be >= 2");
  if (occ_max < occ_min) throw ConfigError("inject: occ_max must be >= occ_min");
  if (fixed_occurrences && *fixed_occurrences < 2)
    throw ConfigError("inject: fixed occurrence count must be >= 2");
  if (jitter < 0.0 || margin < 0.0) throw ConfigError("inject: jitter and margin must be >= 0");
  if (!(span > 2.0 * margin))
    throw ConfigError("inject: host stream span must exceed twice the margin");
  const std::uint32_t most = fixed_occurrences.value_or(occ_max);
  if (jitter > 0.0 && !(jitter < span / most))
    throw ConfigError("inject: jitter must be smaller than span / occ_max");
}

std::uint64_t InjectionResult::injected_count() const {
  return static_cast<std::uint64_t>(std::count(labels.begin(), labels.end(), 1));
}

std::uint32_t draw_inverse_weighted(std::uint32_t lo, std::uint32_t hi, std::mt19937_64& rng) {
  std::vector<double> weights;
  weights.reserve(hi - lo + 1);
  for (std::uint32_t n = lo; n <= hi; ++n) weights.push_back(1.0 / n);
  std::discrete_distribution<std::uint32_t> pick(weights.begin(), weights.end());
  return lo + pick(rng);
}

InjectionResult inject(const Stream& host, const InjectionSpec& spec) {
  if (host.empty()) throw ConfigError("inject: host stream is empty");
  const double t_start = host.front().t;
  const double t_end = host.back().t;
  spec.validate(t_end - t_start);

  // Node universe in first-appearance order, with labels when present.
  std::vector<std::string> nodes;
  std::unordered_map<std::string, std::optional<std::string>> label_of;
  std::unordered_set<std::string> used;
  auto note_node = [&](const std::string& id, const std::optional<std::string>& label) {
    auto [it, fresh] = label_of.emplace(id, label);
    if (fresh) nodes.push_back(id);
  };
  for (const auto& u : host) {
    note_node(u.src, u.src_label);
    note_node(u.dst, u.dst_label);
    used.insert(pair_key(u.src, u.dst));
  }
  if (nodes.size() < 2) throw ExhaustionError("inject: host stream has fewer than two nodes");

  std::mt19937_64 rng(spec.seed);
  std::uniform_int_distribution<std::size_t> pick_node(0, nodes.size() - 1);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  InjectionResult result;
  Stream injected;
  for (std::uint32_t trip = 0; trip < spec.trip_count; ++trip) {
    std::size_t a = 0, b = 0;
    bool found = false;
    for (std::uint32_t attempt = 0; attempt < spec.max_attempts; ++attempt) {
      a = pick_node(rng);
      b = pick_node(rng);
      if (a == b) continue;
      if (used.insert(pair_key(nodes[a], nodes[b])).second) {
        found = true;
        break;
      }
    }
    if (!found) {
      throw ExhaustionError("inject: no unused endpoint pair found after " +
                            std::to_string(spec.max_attempts) + " attempts");
    }

    const double first = t_start + spec.margin * unit(rng);
    const double last = t_end - spec.margin * unit(rng);
    const std::uint32_t n =
        spec.fixed_occurrences.value_or(draw_inverse_weighted(spec.occ_min, spec.occ_max, rng));

    InjectedTrip record{nodes[a], nodes[b], {}};
    record.occurrences.reserve(n);
    const double spacing = (last - first) / static_cast<double>(n - 1);
    for (std::uint32_t i = 0; i < n; ++i) {
      double t = first + spacing * i;
      if (spec.jitter > 0.0) t += spec.jitter * (2.0 * unit(rng) - 1.0);
      record.occurrences.push_back(std::clamp(t, t_start, t_end));
    }
    std::sort(record.occurrences.begin(), record.occurrences.end());

    for (double t : record.occurrences) {
      EdgeUpdate dep;
      dep.op = Op::Insert;
      dep.src = nodes[a];
      dep.dst = nodes[b];
      dep.t = t;
      dep.src_label = label_of[nodes[a]];
      dep.dst_label = label_of[nodes[b]];
      if (spec.trip_duration > 0.0) {
        EdgeUpdate arr = dep;
        arr.op = Op::Delete;
        arr.t = std::min(t + spec.trip_duration, t_end);
        injected.push_back(std::move(dep));
        injected.push_back(std::move(arr));
      } else {
        injected.push_back(std::move(dep));
      }
    }
    result.trips.push_back(std::move(record));
  }

  // Merge: host first on timestamp ties, then injected in generation order.
  const std::size_t total = host.size() + injected.size();
  std::vector<std::size_t> order(total);
  std::iota(order.begin(), order.end(), 0);
  auto time_of = [&](std::size_t i) {
    return i < host.size() ? host[i].t : injected[i - host.size()].t;
  };
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return time_of(x) < time_of(y); });

  result.stream.reserve(total);
  result.labels.reserve(total);
  for (std::size_t i : order) {
    if (i < host.size()) {
      result.stream.push_back(host[i]);
      result.labels.push_back(0);
    } else {
      result.stream.push_back(std::move(injected[i - host.size()]));
      result.labels.push_back(1);
    }
  }
  return result;
}

void write_labels(const std::string& path, const std::vector<int>& labels) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open label file: " + path);
  for (std::size_t i = 0; i < labels.size(); ++i) out << i << ',' << labels[i] << '\n';
  if (!out) throw Error("failed writing " + path);
}

std::vector<int> read_labels(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open label file: " + path);
  std::vector<int> labels;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos)
      throw StreamError(line_no, "label file line " + std::to_string(line_no) +
                                     ": expected line_index,label");
    std::size_t index = 0;
    int label = 0;
    try {
      index = std::stoull(line.substr(0, comma));
      label = std::stoi(line.substr(comma + 1));
    } catch (const std::exception&) {
      throw StreamError(line_no, "label file line " + std::to_string(line_no) +
                                     ": not a number");
    }
    if (index != labels.size())
      throw StreamError(line_no, "label file line " + std::to_string(line_no) +
                                     ": expected index " + std::to_string(labels.size()));
    if (label != 0 && label != 1)
      throw StreamError(line_no, "label file line " + std::to_string(line_no) +
                                     ": label must be 0 or 1");
    labels.push_back(label);
  }
  return labels;
}

}  // namespace persistminer
