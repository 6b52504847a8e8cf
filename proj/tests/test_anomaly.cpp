#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "oracle/brute_force.hpp"
#include "persistminer/anomaly.hpp"
#include "persistminer/error.hpp"
#include "persistminer/rcf.hpp"
#include "support/generators.hpp"

using namespace persistminer;

TEST(RandomCutTree, InvariantsUnderInsertErase) {
  gen::Rng rng(1);
  RandomCutTree tree(7);
  std::vector<PointId> live;
  for (PointId id = 0; id < 400; ++id) {
    Point2 p{std::floor(gen::uniform(rng, 0, 8)), std::floor(gen::uniform(rng, 0, 8))};
    tree.insert(id, p);
    live.push_back(id);
    if (gen::index(rng, 0, 2) == 0) {
      const std::size_t i = gen::index(rng, 0, live.size() - 1);
      EXPECT_TRUE(tree.erase(live[i]));
      live.erase(live.begin() + static_cast<long>(i));
    }
    ASSERT_TRUE(tree.check_invariants()) << "after id " << id;
    ASSERT_EQ(tree.size(), live.size());
  }
  EXPECT_FALSE(tree.erase(100000));
  for (PointId id : live) EXPECT_TRUE(tree.erase(id));
  EXPECT_TRUE(tree.empty());
}

TEST(RandomCutTree, SingleLeafScoresZero) {
  RandomCutTree tree(3);
  tree.insert(0, {1, 2});
  EXPECT_EQ(tree.codisp(0), 0.0);
  tree.insert(1, {1, 2});
  EXPECT_EQ(tree.codisp(1), 0.0);
}

TEST(RandomCutTree, CodispMatchesDisplacementOracle) {
  gen::Rng rng(2);
  for (int trial = 0; trial < 60; ++trial) {
    RandomCutTree tree(trial);
    const std::size_t n = gen::index(rng, 2, 32);
    for (PointId id = 0; id < n; ++id) {
      // Small grid so duplicates appear.
      tree.insert(id, {std::floor(gen::uniform(rng, 0, 5)), std::floor(gen::uniform(rng, 0, 5))});
    }
    for (PointId id = 0; id < n; ++id)
      EXPECT_NEAR(tree.codisp(id), oracle::displacement_codisp(tree, id), 1e-12)
          << "trial " << trial << " id " << id;
  }
}

TEST(Forest, FirstPointScoresZero) {
  AnomalyDetector det(ForestConfig{});
  auto v = det.score({"k", 0, 0.3, 0.3});
  EXPECT_EQ(v.score, 0.0);
  EXPECT_EQ(v.level, 0);
}

TEST(Forest, DuplicateClusterScoresLow) {
  ForestConfig cfg;
  cfg.seed = 4;
  RandomCutForest forest(cfg);
  gen::Rng rng(4);
  for (PointId id = 0; id < 31; ++id)
    forest.insert_and_score(id, {gen::uniform(rng, 0, 10), gen::uniform(rng, 0, 10)});
  double last = 0;
  for (PointId id = 31; id < 62; ++id) last = forest.insert_and_score(id, {5.0, 5.0});
  // Averaged displacement of a member of a 31-strong duplicate cluster.
  EXPECT_LT(last, 1.0);
  for (const auto& tree : forest.trees())
    EXPECT_NEAR(tree.codisp(61), oracle::displacement_codisp(tree, 61), 1e-12);
}

TEST(Forest, OutlierScoresAboveCluster) {
  ForestConfig cfg;
  cfg.seed = 9;
  RandomCutForest forest(cfg);
  gen::Rng rng(9);
  std::vector<double> cluster;
  for (PointId id = 0; id < 100; ++id)
    forest.insert_and_score(id, {gen::uniform(rng, 0, 1), gen::uniform(rng, 0, 1)});
  const double outlier = forest.insert_and_score(100, {50.0, 50.0});
  for (PointId id = 0; id < 100; ++id) {
    double mean = 0;
    for (const auto& tree : forest.trees()) mean += tree.codisp(id);
    EXPECT_LT(mean / static_cast<double>(forest.trees().size()), outlier) << id;
  }
}

TEST(Forest, CapacityIsRespected) {
  ForestConfig cfg;
  cfg.tree_count = 3;
  cfg.max_leaves = 16;
  RandomCutForest forest(cfg);
  for (PointId id = 0; id < 200; ++id) forest.insert_and_score(id, {double(id % 7), double(id % 5)});
  for (const auto& tree : forest.trees()) {
    EXPECT_EQ(tree.size(), 16u);
    EXPECT_TRUE(tree.check_invariants());
  }
}

TEST(Forest, ConfigValidation) {
  ForestConfig cfg;
  cfg.tree_count = 0;
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg.tree_count = 1;
  cfg.max_leaves = 1;
  EXPECT_THROW(cfg.validate(), ConfigError);
}

TEST(Detector, DeterministicPerSeed) {
  auto run = [](std::uint64_t seed) {
    ForestConfig cfg;
    cfg.seed = seed;
    AnomalyDetector det(cfg);
    gen::Rng rng(5);
    std::vector<double> out;
    const std::string keys[] = {"a", "b", "c", "d"};
    for (int i = 0; i < 500; ++i)
      out.push_back(det.score({keys[gen::index(rng, 0, 3)], double(i), gen::uniform(rng, 0, 2),
                               gen::uniform(rng, 0, 2)})
                        .score);
    return out;
  };
  EXPECT_EQ(run(1), run(1));
  EXPECT_NE(run(1), run(2));
}

TEST(Detector, OnePointPerKey) {
  ForestConfig cfg;
  cfg.max_leaves = 1000;
  AnomalyDetector det(cfg);
  gen::Rng rng(6);
  for (int i = 0; i < 300; ++i) {
    const std::string key = "k" + std::to_string(gen::index(rng, 0, 19));
    det.score({key, double(i), gen::uniform(rng, 0, 1), gen::uniform(rng, 0, 1)});
    for (const auto& tree : det.forest().trees()) ASSERT_EQ(tree.size(), det.tracked_keys());
  }
  EXPECT_LE(det.tracked_keys(), 20u);
}

TEST(Levels, MonotoneInScore) {
  for (double sigma : {0.1, 1.0, 3.5}) {
    int prev = 0;
    for (double s = -5; s < 20; s += 0.01) {
      const int level = anomaly_level(s, 1.0, sigma);
      EXPECT_GE(level, prev);
      prev = level;
    }
    EXPECT_EQ(prev, 3);
  }
  EXPECT_EQ(anomaly_level(1.0, 0.0, 1.0), 1);
  EXPECT_EQ(anomaly_level(2.0, 0.0, 1.0), 2);
  EXPECT_EQ(anomaly_level(3.0, 0.0, 1.0), 3);
  EXPECT_EQ(anomaly_level(0.99, 0.0, 1.0), 0);
  EXPECT_EQ(anomaly_level(100.0, 0.0, 0.0), 0);
}

TEST(Levels, WarmupSuppressesEarlyLevels) {
  AnomalyDetector det(ForestConfig{});
  for (std::uint64_t i = 0; i + 1 < kLevelWarmup; ++i) EXPECT_EQ(det.rank(i % 2 ? 1e6 : 0).level, 0);
  EXPECT_GT(det.rank(1e9).level, 0);
}

TEST(RunningStats, MatchesSortedMedianAndPopulationSigma) {
  gen::Rng rng(7);
  RunningStats st;
  std::vector<double> xs;
  for (int i = 0; i < 501; ++i) {
    xs.push_back(gen::uniform(rng, -3, 9));
    st.add(xs.back());
    std::vector<double> sorted = xs;
    std::sort(sorted.begin(), sorted.end());
    const std::size_t n = sorted.size();
    const double med = n % 2 ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
    ASSERT_DOUBLE_EQ(st.median(), med);
  }
  double mean = 0;
  for (double x : xs) mean += x;
  mean /= xs.size();
  double var = 0;
  for (double x : xs) var += (x - mean) * (x - mean);
  EXPECT_NEAR(st.stddev(), std::sqrt(var / xs.size()), 1e-9);
}

TEST(FreqBaseline, Examples) {
  MiningResult one;
  one.snippets["a"].occ_count = 4;
  EXPECT_DOUBLE_EQ(freq_baseline(one).at("a"), 1.0);

  MiningResult two;
  two.snippets["a"].occ_count = 3;
  two.snippets["b"].occ_count = 1;
  auto s = freq_baseline(two);
  EXPECT_DOUBLE_EQ(s.at("a"), 0.75);
  EXPECT_DOUBLE_EQ(s.at("b"), 0.25);

  EXPECT_TRUE(freq_baseline(MiningResult{}).empty());

  gen::Rng rng(8);
  MiningResult many;
  for (int i = 0; i < 50; ++i) many.snippets["k" + std::to_string(i)].occ_count = gen::index(rng, 1, 99);
  double sum = 0;
  for (auto& [k, v] : freq_baseline(many)) sum += v;
  EXPECT_NEAR(sum, 1.0, 1e-12);
}

TEST(DsBaseline, Examples) {
  std::vector<double> mids;
  for (int i = 0; i < 60; ++i) mids.push_back(i + 0.5);
  EXPECT_EQ(ds_baseline(mids, 0, 60), 60u);
  EXPECT_EQ(ds_baseline(std::vector<double>{0.1, 0.2, 0.7}, 0, 60), 1u);
  // Last period is closed.
  EXPECT_EQ(ds_baseline(std::vector<double>{60.0}, 0, 60), 1u);
  EXPECT_EQ(ds_period(60.0, 0, 60, 60), 59);
  EXPECT_EQ(ds_period(59.999, 0, 60, 60), 59);
  EXPECT_EQ(ds_period(1.0, 0, 60, 60), 1);
}

TEST(DsBaseline, SaturatesUnderDenseFilling) {
  // Unlike persistence, DS does not grow without bound as a period fills.
  for (std::size_t n : {10u, 1000u, 100000u}) {
    std::vector<double> occ;
    for (std::size_t i = 0; i < n; ++i) occ.push_back(0.9 * static_cast<double>(i) / n);
    EXPECT_EQ(ds_baseline(occ, 0, 60), 1u);
  }
}

TEST(DsBaseline, ShiftChangesScore) {
  const std::vector<double> occ{10.2, 10.8};
  std::vector<double> shifted;
  for (double t : occ) shifted.push_back(t + 0.5);
  EXPECT_EQ(ds_baseline(occ, 0, 60), 1u);
  EXPECT_EQ(ds_baseline(shifted, 0, 60), 2u);
}

TEST(DsBaseline, ShrinkingIntervalNeedNotIncrease) {
  // Two occurrences already in separate periods stay in separate periods
  // after the interval shrinks to [t_f, t_l]: the score stays at 2.
  const std::vector<double> occ{10.0, 40.0};
  EXPECT_EQ(ds_baseline(occ, 0, 60), 2u);
  EXPECT_EQ(ds_baseline(occ, 5, 50), 2u);
  EXPECT_EQ(ds_baseline(occ, 10, 40), 2u);
}

TEST(DsTracker, CountsDistinctPeriods) {
  DsTracker tr(0, 60, 60);
  EXPECT_EQ(tr.record("a", 0.5), 1u);
  EXPECT_EQ(tr.record("a", 0.7), 1u);
  EXPECT_EQ(tr.record("a", 3.1), 2u);
  EXPECT_EQ(tr.record("b", 3.1), 1u);
  EXPECT_THROW(DsTracker(0, 1, 0), ConfigError);
}

TEST(Metrics, AucExamples) {
  std::vector<double> s{0.1, 0.4, 0.35, 0.8};
  std::vector<int> l{0, 0, 1, 1};
  EXPECT_DOUBLE_EQ(roc_auc(s, l), 0.75);
  std::vector<double> perfect{1, 2, 3, 4};
  EXPECT_DOUBLE_EQ(roc_auc(perfect, l), 1.0);
  std::vector<double> tied{1, 1, 1, 1};
  EXPECT_DOUBLE_EQ(roc_auc(tied, l), 0.5);
  std::vector<int> none{0, 0, 0, 0};
  EXPECT_DOUBLE_EQ(roc_auc(s, none), 0.5);
}

TEST(Metrics, AucMatchesPairCount) {
  gen::Rng rng(10);
  std::vector<double> s;
  std::vector<int> l;
  for (int i = 0; i < 300; ++i) {
    s.push_back(std::floor(gen::uniform(rng, 0, 20)));
    l.push_back(gen::index(rng, 0, 3) == 0);
  }
  double wins = 0, pairs = 0;
  for (std::size_t i = 0; i < s.size(); ++i)
    for (std::size_t j = 0; j < s.size(); ++j)
      if (l[i] == 1 && l[j] == 0) {
        pairs += 1;
        wins += s[i] > s[j] ? 1.0 : s[i] == s[j] ? 0.5 : 0.0;
      }
  EXPECT_NEAR(roc_auc(s, l), wins / pairs, 1e-12);
}

TEST(Metrics, F1AtK) {
  std::vector<double> s{0.9, 0.8, 0.1, 0.7};
  std::vector<int> l{1, 0, 0, 1};
  // Top-2: {0, 1}; tp = 1, precision 0.5, recall 0.5.
  EXPECT_DOUBLE_EQ(f1_at_k(s, l, 2), 0.5);
  // Top-3: {0, 1, 3}; tp = 2, precision 2/3, recall 1.
  EXPECT_DOUBLE_EQ(f1_at_k(s, l, 3), 0.8);
  EXPECT_DOUBLE_EQ(f1_at_k(s, l, 0), 0.0);
  EXPECT_THROW(f1_at_k(s, std::vector<int>{1}, 1), ConfigError);
}
