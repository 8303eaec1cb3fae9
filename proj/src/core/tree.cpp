#include "tree.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "errors.hpp"
#include "target.hpp"

namespace topdown {

PartialTree::PartialTree(TreeMode mode) : mode_(mode) {
  nodes_.push_back(Node{});
  leaves_.push_back(0);
  leaf_pos_.push_back(0);
}

PartialTree PartialTree::from_nodes(TreeMode mode, std::vector<Node> nodes) {
  if (nodes.empty()) throw DomainError("tree needs a root node");
  PartialTree t(mode);
  t.nodes_ = std::move(nodes);
  t.leaves_.clear();
  const auto count = static_cast<int>(t.nodes_.size());
  std::vector<char> seen(t.nodes_.size(), 0);
  std::vector<int> stack{0};
  t.nodes_[0].parent = -1;
  t.nodes_[0].depth = 0;
  while (!stack.empty()) {
    const int cur = stack.back();
    stack.pop_back();
    if (seen[cur]) throw DomainError("tree node array is not a tree");
    seen[cur] = 1;
    Node& nd = t.nodes_[cur];
    if (nd.is_leaf()) {
      t.leaves_.push_back(cur);
      continue;
    }
    if (nd.lo <= 0 || nd.hi <= 0 || nd.lo >= count || nd.hi >= count)
      throw DomainError("tree node has invalid children");
    for (int c : {nd.lo, nd.hi}) {
      t.nodes_[c].parent = cur;
      t.nodes_[c].depth = nd.depth + 1;
    }
    const Query q = nd.query;
    nd.query = Query{};
    t.check_split(cur, q);
    t.nodes_[cur].query = q;
    stack.push_back(t.nodes_[cur].hi);
    stack.push_back(t.nodes_[cur].lo);
  }
  if (std::find(seen.begin(), seen.end(), 0) != seen.end())
    throw DomainError("tree node array has unreachable nodes");
  t.leaf_pos_.assign(t.nodes_.size(), -1);
  t.reindex_leaves(0);
  return t;
}

void PartialTree::reindex_leaves(std::size_t from) {
  for (std::size_t k = from; k < leaves_.size(); ++k) leaf_pos_[leaves_[k]] = static_cast<int>(k);
}

int PartialTree::depth() const {
  int d = 0;
  for (int leaf : leaves_) d = std::max(d, nodes_[leaf].depth);
  return d;
}

int PartialTree::leaf_node(int leaf_id) const {
  if (leaf_id < 0 || leaf_id >= size())
    throw DomainError("leaf id " + std::to_string(leaf_id) + " out of range (size " +
                      std::to_string(size()) + ")");
  return leaves_[static_cast<std::size_t>(leaf_id)];
}

int PartialTree::leaf_id_of_node(int node_index) const {
  const int pos = node_index >= 0 && node_index < node_count() ? leaf_pos_[node_index] : -1;
  if (pos < 0) throw DomainError("node " + std::to_string(node_index) + " is not a leaf");
  return pos;
}

void PartialTree::check_split(int node_index, const Query& q) const {
  const Node& nd = node(node_index);
  if (!nd.is_leaf()) throw DomainError("node " + std::to_string(node_index) + " is not a leaf");
  if (q.coord < 1) throw DomainError("query coordinate must be >= 1");
  if (mode_ == TreeMode::Binary) {
    if (q.has_threshold()) throw DomainError("binary-feature trees take threshold-free queries");
    for (int cur = nd.parent; cur >= 0; cur = nodes_[cur].parent)
      if (nodes_[cur].query.coord == q.coord)
        throw DomainError("coordinate " + std::to_string(q.coord) + " already queried on this path");
  } else if (!std::isfinite(q.theta)) {
    throw DomainError("real-valued trees need a finite threshold");
  }
}

std::pair<int, int> PartialTree::split_node(int node_index, const Query& q) {
  check_split(node_index, q);
  const int depth = nodes_[node_index].depth + 1;
  const int lo = node_count();
  const int hi = lo + 1;
  nodes_.push_back(Node{Query{}, -1, -1, node_index, depth});
  nodes_.push_back(Node{Query{}, -1, -1, node_index, depth});
  Node& nd = nodes_[node_index];
  nd.query = q;
  nd.lo = lo;
  nd.hi = hi;
  const auto pos = static_cast<std::size_t>(leaf_pos_[node_index]);
  leaves_[pos] = lo;
  leaves_.insert(leaves_.begin() + static_cast<std::ptrdiff_t>(pos) + 1, hi);
  leaf_pos_[node_index] = -1;
  leaf_pos_.resize(nodes_.size(), -1);
  reindex_leaves(pos);
  return {lo, hi};
}

PartialTree PartialTree::split(int leaf_id, const Query& q) const {
  PartialTree t = *this;
  t.split_node(leaf_node(leaf_id), q);
  return t;
}

std::vector<std::pair<Query, bool>> PartialTree::path_to(int node_index) const {
  std::vector<std::pair<Query, bool>> out;
  for (int cur = node_index; nodes_.at(cur).parent >= 0; cur = nodes_[cur].parent) {
    const Node& p = nodes_[nodes_[cur].parent];
    out.emplace_back(p.query, p.hi == cur);
  }
  std::reverse(out.begin(), out.end());
  return out;
}

Restriction PartialTree::restriction_of(int node_index) const {
  if (mode_ != TreeMode::Binary) throw DomainError("restrictions are defined for binary trees only");
  Restriction r;
  for (const auto& [q, ans] : path_to(node_index)) r.fix(q.coord, ans ? 1 : -1);
  return r;
}

int PartialTree::max_coord() const {
  int m = 0;
  for (const auto& nd : nodes_) m = std::max(m, nd.query.coord);
  return m;
}

// ---------------------------------------------------------------------------

DecisionTree::DecisionTree(PartialTree shape, std::vector<bool> leaf_labels)
    : shape_(std::move(shape)), labels_(std::move(leaf_labels)) {
  if (static_cast<int>(labels_.size()) != shape_.size())
    throw DomainError("label count does not match leaf count");
}

DecisionTree DecisionTree::constant(bool label, TreeMode mode) {
  return DecisionTree(PartialTree(mode), {label});
}

template <typename Answer>
TreePath DecisionTree::walk(Answer&& answer) const {
  TreePath p;
  int cur = 0;
  while (!shape_.node(cur).is_leaf()) {
    const auto& nd = shape_.node(cur);
    const bool a = answer(nd.query);
    p.steps.push_back({nd.query, a});
    cur = a ? nd.hi : nd.lo;
  }
  p.leaf_node = cur;
  p.leaf_id = shape_.leaf_id_of_node(cur);
  p.label = labels_[static_cast<std::size_t>(p.leaf_id)];
  return p;
}

TreePath DecisionTree::path_of(std::span<const Sign> x) const {
  return walk([&](const Query& q) {
    if (q.coord > static_cast<int>(x.size())) throw DomainError("input shorter than queried coordinate");
    return x[q.coord - 1] > 0;
  });
}

TreePath DecisionTree::path_of(std::span<const double> x) const {
  return walk([&](const Query& q) {
    if (q.coord > static_cast<int>(x.size())) throw DomainError("input shorter than queried coordinate");
    return q.has_threshold() ? x[q.coord - 1] >= q.theta : x[q.coord - 1] > 0;
  });
}

bool DecisionTree::evaluate(std::span<const Sign> x) const {
  int cur = 0;
  while (!shape_.node(cur).is_leaf()) {
    const auto& nd = shape_.node(cur);
    cur = x[nd.query.coord - 1] > 0 ? nd.hi : nd.lo;
  }
  return labels_[static_cast<std::size_t>(shape_.leaf_id_of_node(cur))];
}

bool DecisionTree::evaluate(std::span<const double> x) const { return path_of(x).label; }

BoolFunc DecisionTree::to_function(int n) const {
  if (shape_.max_coord() > n) throw DomainError("tree queries coordinates beyond the arity");
  return BoolFunc::from_predicate(n, [this](std::span<const Sign> x) { return evaluate(x); });
}

// ---------------------------------------------------------------------------

DecisionTree complete(const PartialTree& t, const ExactTarget& f) {
  if (t.max_coord() > f.arity()) throw DomainError("tree queries coordinates beyond the arity");
  std::vector<bool> labels;
  labels.reserve(static_cast<std::size_t>(t.size()));
  for (int leaf : t.leaf_nodes()) labels.push_back(round_label(f.expectation(t.restriction_of(leaf))));
  return DecisionTree(t, std::move(labels));
}

DecisionTree complete(const PartialTree& t, const BoolFunc& f) { return complete(t, TableTarget(f)); }

Dyadic distance(const DecisionTree& g, const ExactTarget& f) {
  const PartialTree& t = g.shape();
  if (t.max_coord() > f.arity()) throw DomainError("tree queries coordinates beyond the arity");
  Dyadic total;
  for (int id = 0; id < t.size(); ++id) {
    const int leaf = t.leaf_node(id);
    const Dyadic e = f.expectation(t.restriction_of(leaf));
    const Dyadic err = g.label(id) ? Dyadic::one() - e : e;
    total += err.scaled(t.node(leaf).depth);
  }
  return total;
}

Dyadic distance(const DecisionTree& g, const BoolFunc& f) { return distance(g, TableTarget(f)); }

// ---------------------------------------------------------------------------

namespace {

nlohmann::ordered_json node_json(const DecisionTree& t, int node_index) {
  const auto& nd = t.shape().node(node_index);
  nlohmann::ordered_json j;
  if (nd.is_leaf()) {
    j["label"] = t.label(t.shape().leaf_id_of_node(node_index)) ? 1 : 0;
    return j;
  }
  j["q"] = nd.query.coord;
  if (nd.query.has_threshold()) j["theta"] = nd.query.theta;
  j["lo"] = node_json(t, nd.lo);
  j["hi"] = node_json(t, nd.hi);
  return j;
}

bool has_theta(const nlohmann::json& j) {
  if (!j.is_object()) return false;
  if (j.contains("theta")) return true;
  return (j.contains("lo") && has_theta(j["lo"])) || (j.contains("hi") && has_theta(j["hi"]));
}

void build_from_json(const nlohmann::json& j, int node_index, PartialTree& t,
                     std::vector<std::pair<int, bool>>& labels) {
  if (!j.is_object()) throw FormatError("tree node must be an object");
  if (j.contains("label")) {
    const int v = j["label"].get<int>();
    if (v != 0 && v != 1) throw FormatError("leaf label must be 0 or 1");
    labels.emplace_back(node_index, v == 1);
    return;
  }
  if (!j.contains("q") || !j.contains("lo") || !j.contains("hi"))
    throw FormatError("internal tree node needs \"q\", \"lo\" and \"hi\"");
  Query q;
  q.coord = j["q"].get<int>();
  if (t.mode() == TreeMode::Real) {
    if (!j.contains("theta")) throw FormatError("real-valued tree mixes threshold and binary queries");
    q.theta = j["theta"].get<double>();
  }
  std::pair<int, int> kids;
  try {
    kids = t.split_node(node_index, q);
  } catch (const DomainError& e) {
    throw FormatError(std::string("invalid tree: ") + e.what());
  }
  build_from_json(j["lo"], kids.first, t, labels);
  build_from_json(j["hi"], kids.second, t, labels);
}

}  // namespace

std::string tree_json(const DecisionTree& t) { return node_json(t, 0).dump(); }

DecisionTree parse_tree_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("tree file is not valid JSON: ") + e.what());
  }
  PartialTree t(has_theta(j) ? TreeMode::Real : TreeMode::Binary);
  std::vector<std::pair<int, bool>> labels;
  build_from_json(j, 0, t, labels);
  std::vector<bool> by_id(static_cast<std::size_t>(t.size()));
  for (const auto& [node, lab] : labels) by_id[static_cast<std::size_t>(t.leaf_id_of_node(node))] = lab;
  return DecisionTree(std::move(t), std::move(by_id));
}

DecisionTree load_tree(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open tree file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_tree_json(ss.str());
}

}  // namespace topdown
