#pragma once

#include <array>
#include <cstdint>
#include <random>
#include <unordered_map>
#include <vector>

namespace persistminer {

using Point2 = std::array<double, 2>;
using PointId = std::uint64_t;

/// Robust random cut tree over 2-D points.
///
/// Identical points share one leaf with a multiplicity count. Every stored
/// point is addressed by a caller-chosen PointId; several ids may map to the
/// same leaf.
class RandomCutTree {
 public:
  explicit RandomCutTree(std::uint64_t seed) : rng_(seed) {}

  void insert(PointId id, const Point2& p);
  /// Removes `id`; returns false when it is not stored.
  bool erase(PointId id);
  bool contains(PointId id) const { return leaf_of_.count(id) != 0; }

  /// Collusive displacement of the leaf holding `id`:
  /// max over the leaf's ancestors' children C of |sibling(C)| / |C|.
  /// 0 when the tree has a single leaf.
  double codisp(PointId id) const;

  /// Uniformly random stored id; the tree must not be empty.
  PointId random_id();

  std::size_t size() const noexcept { return ids_.size(); }
  bool empty() const noexcept { return ids_.empty(); }

  /// Depth of the leaf holding `id` (root leaf has depth 0).
  std::size_t depth(PointId id) const;

  /// Ids stored under each ancestor-side subtree on the path from the
  /// leaf of `id` up to (excluding) the root, innermost first. Exposed for
  /// structural tests.
  std::vector<std::vector<PointId>> nested_subtrees(PointId id) const;
  const std::vector<PointId>& ids() const noexcept { return ids_; }

  /// Checks parent links, counts and bounding boxes; for tests.
  bool check_invariants() const;

 private:
  struct Node {
    int parent = -1;
    int left = -1;   // -1 for leaves
    int right = -1;
    int dim = 0;
    double cut = 0.0;
    std::uint32_t count = 0;
    Point2 lo{};
    Point2 hi{};
    std::vector<PointId> members;  // leaves only
    bool is_leaf() const { return left < 0; }
  };

  int alloc();
  void release(int n);
  void refresh_up(int n);
  void collect(int n, std::vector<PointId>& out) const;

  std::vector<Node> nodes_;
  std::vector<int> free_;
  int root_ = -1;
  std::unordered_map<PointId, int> leaf_of_;
  std::vector<PointId> ids_;
  std::unordered_map<PointId, std::size_t> id_pos_;
  std::mt19937_64 rng_;
};

struct ForestConfig {
  std::size_t tree_count = 10;
  std::size_t max_leaves = 256;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Streaming forest of bounded-size trees. Each tree independently evicts a
/// uniformly random point before an insertion that would exceed capacity.
class RandomCutForest {
 public:
  explicit RandomCutForest(ForestConfig config);

  /// Inserts `p` under `id` into every tree and returns the mean collusive
  /// displacement across trees.
  double insert_and_score(PointId id, const Point2& p);
  void erase(PointId id);

  const ForestConfig& config() const noexcept { return config_; }
  const std::vector<RandomCutTree>& trees() const noexcept { return trees_; }

 private:
  ForestConfig config_;
  std::vector<RandomCutTree> trees_;
};

}  // namespace persistminer
