#include "persistminer/rcf.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "persistminer/error.hpp"

namespace persistminer {

int RandomCutTree::alloc() {
  if (!free_.empty()) {
    int n = free_.back();
    free_.pop_back();
    nodes_[n] = Node{};
    return n;
  }
  nodes_.emplace_back();
  return static_cast<int>(nodes_.size()) - 1;
}

void RandomCutTree::release(int n) {
  nodes_[n].members.clear();
  free_.push_back(n);
}

void RandomCutTree::refresh_up(int n) {
  while (n >= 0) {
    Node& node = nodes_[n];
    const Node& l = nodes_[node.left];
    const Node& r = nodes_[node.right];
    node.count = l.count + r.count;
    for (int d = 0; d < 2; ++d) {
      node.lo[d] = std::min(l.lo[d], r.lo[d]);
      node.hi[d] = std::max(l.hi[d], r.hi[d]);
    }
    n = node.parent;
  }
}

void RandomCutTree::insert(PointId id, const Point2& p) {
  if (leaf_of_.count(id)) throw std::logic_error("RandomCutTree: duplicate point id");

  id_pos_[id] = ids_.size();
  ids_.push_back(id);

  if (root_ < 0) {
    int leaf = alloc();
    nodes_[leaf].lo = nodes_[leaf].hi = p;
    nodes_[leaf].count = 1;
    nodes_[leaf].members.push_back(id);
    root_ = leaf;
    leaf_of_[id] = leaf;
    return;
  }

  // An identical point already stored only gains multiplicity.
  int n = root_;
  while (!nodes_[n].is_leaf()) {
    const Node& node = nodes_[n];
    n = p[node.dim] <= node.cut ? node.left : node.right;
  }
  if (nodes_[n].lo == p) {
    nodes_[n].members.push_back(id);
    leaf_of_[id] = n;
    for (int a = n; a >= 0; a = nodes_[a].parent) ++nodes_[a].count;
    return;
  }

  n = root_;
  while (true) {
    Point2 lo, hi;
    double span[2];
    for (int d = 0; d < 2; ++d) {
      lo[d] = std::min(nodes_[n].lo[d], p[d]);
      hi[d] = std::max(nodes_[n].hi[d], p[d]);
      span[d] = hi[d] - lo[d];
    }
    std::uniform_real_distribution<double> draw(0.0, span[0] + span[1]);
    const double r = draw(rng_);
    const int dim = r < span[0] ? 0 : 1;
    double cut = dim == 0 ? lo[0] + r : lo[1] + (r - span[0]);

    const double node_lo = nodes_[n].lo[dim];
    const double node_hi = nodes_[n].hi[dim];
    bool new_left;
    if (cut < node_lo) {
      new_left = true;
      cut = std::max(cut, p[dim]);
    } else if (cut >= node_hi) {
      new_left = false;
      if (!(cut < p[dim])) cut = node_hi;
    } else {
      const Node& node = nodes_[n];
      n = p[node.dim] <= node.cut ? node.left : node.right;
      continue;
    }

    const int leaf = alloc();
    const int branch = alloc();
    Node& lf = nodes_[leaf];
    lf.lo = lf.hi = p;
    lf.count = 1;
    lf.members.push_back(id);
    lf.parent = branch;

    const int parent = nodes_[n].parent;
    Node& br = nodes_[branch];
    br.parent = parent;
    br.dim = dim;
    br.cut = cut;
    br.left = new_left ? leaf : n;
    br.right = new_left ? n : leaf;
    nodes_[n].parent = branch;
    if (parent < 0) {
      root_ = branch;
    } else if (nodes_[parent].left == n) {
      nodes_[parent].left = branch;
    } else {
      nodes_[parent].right = branch;
    }
    leaf_of_[id] = leaf;
    refresh_up(branch);
    return;
  }
}

bool RandomCutTree::erase(PointId id) {
  auto it = leaf_of_.find(id);
  if (it == leaf_of_.end()) return false;
  const int leaf = it->second;
  leaf_of_.erase(it);

  const std::size_t pos = id_pos_[id];
  id_pos_.erase(id);
  if (pos + 1 != ids_.size()) {
    ids_[pos] = ids_.back();
    id_pos_[ids_[pos]] = pos;
  }
  ids_.pop_back();

  auto& members = nodes_[leaf].members;
  members.erase(std::find(members.begin(), members.end(), id));

  if (nodes_[leaf].count > 1) {
    for (int a = leaf; a >= 0; a = nodes_[a].parent) --nodes_[a].count;
    return true;
  }

  const int parent = nodes_[leaf].parent;
  release(leaf);
  if (parent < 0) {
    root_ = -1;
    return true;
  }
  const int sibling = nodes_[parent].left == leaf ? nodes_[parent].right : nodes_[parent].left;
  const int grand = nodes_[parent].parent;
  nodes_[sibling].parent = grand;
  if (grand < 0) {
    root_ = sibling;
  } else if (nodes_[grand].left == parent) {
    nodes_[grand].left = sibling;
  } else {
    nodes_[grand].right = sibling;
  }
  release(parent);
  refresh_up(grand);
  return true;
}

double RandomCutTree::codisp(PointId id) const {
  auto it = leaf_of_.find(id);
  if (it == leaf_of_.end()) throw std::out_of_range("RandomCutTree::codisp: unknown id");
  int n = it->second;
  double best = 0.0;
  while (nodes_[n].parent >= 0) {
    const Node& parent = nodes_[nodes_[n].parent];
    const int sibling = parent.left == n ? parent.right : parent.left;
    best = std::max(best, static_cast<double>(nodes_[sibling].count) / nodes_[n].count);
    n = nodes_[n].parent;
  }
  return best;
}

PointId RandomCutTree::random_id() {
  if (ids_.empty()) throw std::logic_error("RandomCutTree::random_id on empty tree");
  std::uniform_int_distribution<std::size_t> pick(0, ids_.size() - 1);
  return ids_[pick(rng_)];
}

std::size_t RandomCutTree::depth(PointId id) const {
  std::size_t d = 0;
  for (int n = leaf_of_.at(id); nodes_[n].parent >= 0; n = nodes_[n].parent) ++d;
  return d;
}

void RandomCutTree::collect(int n, std::vector<PointId>& out) const {
  const Node& node = nodes_[n];
  if (node.is_leaf()) {
    out.insert(out.end(), node.members.begin(), node.members.end());
    return;
  }
  collect(node.left, out);
  collect(node.right, out);
}

std::vector<std::vector<PointId>> RandomCutTree::nested_subtrees(PointId id) const {
  std::vector<std::vector<PointId>> out;
  for (int n = leaf_of_.at(id); nodes_[n].parent >= 0; n = nodes_[n].parent) {
    out.emplace_back();
    collect(n, out.back());
  }
  return out;
}

bool RandomCutTree::check_invariants() const {
  if (root_ < 0) return ids_.empty() && leaf_of_.empty();
  if (nodes_[root_].parent != -1) return false;
  std::size_t seen = 0;
  std::vector<int> stack{root_};
  while (!stack.empty()) {
    const int n = stack.back();
    stack.pop_back();
    const Node& node = nodes_[n];
    if (node.is_leaf()) {
      if (node.count != node.members.size() || node.count == 0) return false;
      if (node.lo != node.hi) return false;
      for (PointId id : node.members) {
        auto it = leaf_of_.find(id);
        if (it == leaf_of_.end() || it->second != n) return false;
      }
      seen += node.count;
      continue;
    }
    const Node& l = nodes_[node.left];
    const Node& r = nodes_[node.right];
    if (l.parent != n || r.parent != n) return false;
    if (node.count != l.count + r.count) return false;
    for (int d = 0; d < 2; ++d) {
      if (node.lo[d] != std::min(l.lo[d], r.lo[d])) return false;
      if (node.hi[d] != std::max(l.hi[d], r.hi[d])) return false;
    }
    if (!(l.hi[node.dim] <= node.cut && r.lo[node.dim] > node.cut)) return false;
    stack.push_back(node.left);
    stack.push_back(node.right);
  }
  return seen == ids_.size() && seen == leaf_of_.size();
}

void ForestConfig::validate() const {
  if (tree_count < 1) throw ConfigError("forest: tree_count must be >= 1");
  if (max_leaves < 2) throw ConfigError("forest: max_leaves must be >= 2");
}

RandomCutForest::RandomCutForest(ForestConfig config) : config_(config) {
  config_.validate();
  std::seed_seq seq{config_.seed, static_cast<std::uint64_t>(0x9e3779b97f4a7c15ULL)};
  std::vector<std::uint64_t> seeds(config_.tree_count);
  seq.generate(seeds.begin(), seeds.end());
  trees_.reserve(config_.tree_count);
  for (auto s : seeds) trees_.emplace_back(s);
}

double RandomCutForest::insert_and_score(PointId id, const Point2& p) {
  double total = 0.0;
  for (auto& tree : trees_) {
    if (tree.size() >= config_.max_leaves) tree.erase(tree.random_id());
    tree.insert(id, p);
    total += tree.codisp(id);
  }
  return total / static_cast<double>(trees_.size());
}

void RandomCutForest::erase(PointId id) {
  for (auto& tree : trees_) tree.erase(id);
}

}  // namespace persistminer
