#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "boolfn.hpp"
#include "dyadic.hpp"
#include "restriction.hpp"

namespace topdown {

class ExactTarget;

enum class TreeMode {
  Binary,  // queries 1[x_i = +1] on {±1}^n
  Real,    // queries 1[x_i >= theta] on R^n
};

struct Query {
  int coord = 0;
  double theta = std::numeric_limits<double>::quiet_NaN();

  static Query binary(int coord) { return {coord}; }
  static Query threshold(int coord, double theta) { return {coord, theta}; }
  bool has_threshold() const { return !std::isnan(theta); }
  friend bool operator==(const Query& a, const Query& b) {
    return a.coord == b.coord && (a.theta == b.theta || (std::isnan(a.theta) && std::isnan(b.theta)));
  }
};

/// Decision tree with unlabeled leaves.
///
/// Nodes live in a flat vector (root at index 0). The "lo" child answers
/// false and the "hi" child answers true, and depth-first preorder visits lo
/// before hi. A leaf id is the position of the leaf in that preorder; ids
/// are what callers and the tie-break rules use, node indices are internal.
class PartialTree {
 public:
  struct Node {
    Query query;  // coord == 0 for leaves
    int lo = -1;
    int hi = -1;
    int parent = -1;
    int depth = 0;
    bool is_leaf() const { return query.coord == 0; }
  };

  explicit PartialTree(TreeMode mode = TreeMode::Binary);
  /// Bulk construction from a node array (root at 0, children linked by
  /// index, parent/depth recomputed). Validates query legality.
  static PartialTree from_nodes(TreeMode mode, std::vector<Node> nodes);

  TreeMode mode() const { return mode_; }
  /// Number of leaves.
  int size() const { return static_cast<int>(leaves_.size()); }
  int depth() const;
  int node_count() const { return static_cast<int>(nodes_.size()); }
  const Node& node(int index) const { return nodes_.at(static_cast<std::size_t>(index)); }
  const std::vector<Node>& nodes() const { return nodes_; }

  /// Leaf node indices in preorder; position k holds leaf id k.
  const std::vector<int>& leaf_nodes() const { return leaves_; }
  int leaf_node(int leaf_id) const;
  int leaf_id_of_node(int node_index) const;
  int leaf_depth(int leaf_id) const { return node(leaf_node(leaf_id)).depth; }

  /// Persistent split: returns the extension, leaves *this unchanged.
  [[nodiscard]] PartialTree split(int leaf_id, const Query& q) const;
  /// In-place variant for builders; returns the (lo, hi) node indices.
  std::pair<int, int> split_node(int node_index, const Query& q);
  /// Throws DomainError if splitting this leaf with q would be illegal.
  void check_split(int node_index, const Query& q) const;

  /// Root-to-node queries with the answers taken.
  std::vector<std::pair<Query, bool>> path_to(int node_index) const;
  /// Binary mode: the restriction selecting the node's subcube.
  Restriction restriction_of(int node_index) const;
  /// Largest coordinate queried anywhere.
  int max_coord() const;

 private:
  void reindex_leaves(std::size_t from);

  TreeMode mode_;
  std::vector<Node> nodes_;
  std::vector<int> leaves_;
  std::vector<int> leaf_pos_;  // node index -> leaf id, -1 for internal nodes
};

struct PathStep {
  Query query;
  bool answer;
};

struct TreePath {
  std::vector<PathStep> steps;
  int leaf_node = -1;
  int leaf_id = -1;
  bool label = false;
};

/// A PartialTree plus a {0,1} label per leaf.
class DecisionTree {
 public:
  DecisionTree() = default;
  /// Labels indexed by leaf id.
  DecisionTree(PartialTree shape, std::vector<bool> leaf_labels);
  static DecisionTree constant(bool label, TreeMode mode = TreeMode::Binary);

  const PartialTree& shape() const { return shape_; }
  TreeMode mode() const { return shape_.mode(); }
  int size() const { return shape_.size(); }
  bool label(int leaf_id) const { return labels_.at(static_cast<std::size_t>(leaf_id)); }
  const std::vector<bool>& labels() const { return labels_; }

  bool evaluate(std::span<const Sign> x) const;
  bool evaluate(std::span<const double> x) const;
  TreePath path_of(std::span<const Sign> x) const;
  TreePath path_of(std::span<const double> x) const;

  /// Truth table of a binary tree on arity n.
  BoolFunc to_function(int n) const;

 private:
  template <typename Answer>
  TreePath walk(Answer&& answer) const;

  PartialTree shape_;
  std::vector<bool> labels_;
};

/// f-completion: every leaf labeled round(E[f_leaf]) with round(1/2) = 1.
DecisionTree complete(const PartialTree& t, const BoolFunc& f);
DecisionTree complete(const PartialTree& t, const ExactTarget& f);

/// Exact Pr[g(x) != f(x)] under the uniform distribution, summed per leaf.
Dyadic distance(const DecisionTree& g, const BoolFunc& f);
Dyadic distance(const DecisionTree& g, const ExactTarget& f);

/// Nested {"q":i,"theta":t,"lo":..,"hi":..} / {"label":0|1}.
std::string tree_json(const DecisionTree& t);
DecisionTree parse_tree_json(const std::string& text);
DecisionTree load_tree(const std::string& path);

}  // namespace topdown
