#include "persistminer/detect.hpp"

#include <algorithm>
#include <limits>
#include <string>

#include "persistminer/error.hpp"

namespace persistminer {

DetectorKind parse_detector(std::string_view name) {
  if (name == "persistence" || name == "penminer") return DetectorKind::Persistence;
  if (name == "freq") return DetectorKind::Freq;
  if (name == "ds") return DetectorKind::Ds;
  throw ConfigError("unknown detector '" + std::string(name) +
                    "' (expected persistence|freq|ds)");
}

std::string_view detector_name(DetectorKind kind) {
  switch (kind) {
    case DetectorKind::Persistence:
      return "persistence";
    case DetectorKind::Freq:
      return "freq";
    case DetectorKind::Ds:
      return "ds";
  }
  return "persistence";
}

std::vector<double> run_detection(const Stream& stream, const DetectConfig& config,
                                  const ScoreSink& sink) {
  std::vector<double> update_scores(stream.size(), 0.0);
  if (stream.empty()) return update_scores;

  MinerConfig miner_config = config.miner;
  miner_config.variant = Variant::Streaming;
  StreamingMiner miner(miner_config);
  AnomalyDetector detector(config.forest);
  DsTracker ds(stream.front().t, stream.back().t, config.periods);
  std::uint64_t total_occurrences = 0;

  for (std::size_t i = 0; i < stream.size(); ++i) {
    double best = -std::numeric_limits<double>::infinity();
    miner.push(stream[i], [&](const OccurrenceEvent& ev) {
      ++total_occurrences;
      AnomalyVerdict v;
      switch (config.detector) {
        case DetectorKind::Persistence:
          v = detector.score(AnomalyPoint{ev.key, ev.t, ev.frequency, ev.persistence});
          break;
        case DetectorKind::Freq:
          v = detector.rank(static_cast<double>(ev.record->occ_count) /
                            static_cast<double>(total_occurrences));
          break;
        case DetectorKind::Ds: {
          const double count = static_cast<double>(ds.record(ev.key, ev.t));
          v = detector.score(AnomalyPoint{ev.key, ev.t, ev.frequency, count});
          break;
        }
      }
      best = std::max(best, v.score);
      if (sink) sink(ScoredOccurrence{ev.t, ev.key, v, i});
    });
    update_scores[i] = best;
  }
  return update_scores;
}

}  // namespace persistminer
