#pragma once

#include <cstdint>
#include <functional>
#include <string_view>
#include <vector>

#include "persistminer/anomaly.hpp"
#include "persistminer/miner.hpp"

namespace persistminer {

enum class DetectorKind {
  Persistence,  // forest over <frequency, persistence>
  Freq,         // share of all occurrences so far
  Ds,           // forest over <frequency, DS period count>
};

DetectorKind parse_detector(std::string_view name);
std::string_view detector_name(DetectorKind kind);

struct DetectConfig {
  MinerConfig miner{.delta_max = 0.0,
                    .k_max = 1,
                    .view = View::Id,
                    .params = {1.0, 0.2, 10.0},
                    .variant = Variant::Streaming};
  ForestConfig forest;
  DetectorKind detector = DetectorKind::Persistence;
  std::uint32_t periods = 60;
};

struct ScoredOccurrence {
  double t = 0.0;
  std::string_view key;
  AnomalyVerdict verdict;
  std::size_t update_index = 0;
};

using ScoreSink = std::function<void(const ScoredOccurrence&)>;

/// Streams `stream` through the miner and the chosen detector. Returns one
/// score per update: the highest score among the occurrences the update
/// triggered. `sink` sees every scored occurrence in stream order.
std::vector<double> run_detection(const Stream& stream, const DetectConfig& config,
                                  const ScoreSink& sink = {});

}  // namespace persistminer
