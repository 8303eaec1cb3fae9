#include "oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "errors.hpp"

namespace topdown {

OptTable::OptTable(const BoolFunc& f, int max_size) : f_(&f), n_(f.arity()), max_size_(max_size) {
  if (n_ > kMaxArity)
    throw RefusedError("exact search is capped at n = " + std::to_string(kMaxArity) + " (got n = " +
                       std::to_string(n_) + "); use a sampling-based estimate instead");
  if (max_size < 1) throw DomainError("size budget must be at least 1");
  pow3_.resize(static_cast<std::size_t>(n_) + 1);
  pow3_[0] = 1;
  for (int i = 1; i <= n_; ++i) pow3_[i] = pow3_[i - 1] * 3;
  memo_.resize(pow3_[n_]);
  solve(0, n_);
}

int OptTable::budget_cap(int free_count) const {
  return free_count >= 30 ? max_size_ : std::min(max_size_, 1 << free_count);
}

// Key digit for x_i (base 3, position i-1): 0 free, 1 fixed to -1, 2 fixed to +1.
const OptTable::Entry& OptTable::solve(std::uint32_t key, int free_count) {
  Entry& e = memo_[key];
  if (e.ready) return e;
  const int cap = budget_cap(free_count);
  const std::uint32_t size = 1u << free_count;

  if (free_count == 0) {
    std::uint32_t index = 0;
    for (int i = 0; i < n_; ++i)
      if ((key / pow3_[i]) % 3 == 2) index |= 1u << i;
    e.ones = f_->at(index) ? 1 : 0;
  } else {
    int first = 0;
    while ((key / pow3_[first]) % 3 != 0) ++first;
    e.ones = solve(key + pow3_[first], free_count - 1).ones + solve(key + 2 * pow3_[first], free_count - 1).ones;
  }

  e.err.assign(static_cast<std::size_t>(cap), std::min(e.ones, size - e.ones));
  e.coord.assign(static_cast<std::size_t>(cap), 0);
  e.lo_budget.assign(static_cast<std::size_t>(cap), 0);
  for (int i = 0; i < n_ && cap > 1; ++i) {
    if ((key / pow3_[i]) % 3 != 0) continue;
    const Entry& lo = solve(key + pow3_[i], free_count - 1);
    const Entry& hi = solve(key + 2 * pow3_[i], free_count - 1);
    const int lo_cap = static_cast<int>(lo.err.size());
    const int hi_cap = static_cast<int>(hi.err.size());
    for (int b = 2; b <= cap; ++b) {
      std::uint32_t best = std::numeric_limits<std::uint32_t>::max();
      int best_b1 = 0;
      // most balanced split first: b1 = b/2, then moving outward
      for (int off = 0; off < b; ++off) {
        for (int sgn : {-1, +1}) {
          if (off == 0 && sgn > 0) continue;
          const int b1 = b / 2 + sgn * off;
          const int b2 = b - b1;
          if (b1 < 1 || b2 < 1) continue;
          const std::uint32_t v = lo.err[static_cast<std::size_t>(std::min(b1, lo_cap) - 1)] +
                                  hi.err[static_cast<std::size_t>(std::min(b2, hi_cap) - 1)];
          if (v < best) {
            best = v;
            best_b1 = b1;
          }
        }
      }
      auto idx = static_cast<std::size_t>(b - 1);
      if (best < e.err[idx]) {
        e.err[idx] = best;
        e.coord[idx] = static_cast<std::int8_t>(i + 1);
        e.lo_budget[idx] = static_cast<std::uint16_t>(best_b1);
      }
    }
  }
  e.ready = true;
  return e;
}

Dyadic OptTable::error(int s) const {
  s = std::clamp(s, 1, max_size_);
  const Entry& root = memo_[0];
  const auto idx = static_cast<std::size_t>(std::min(s, static_cast<int>(root.err.size())) - 1);
  return Dyadic::ratio(root.err[idx], n_);
}

void OptTable::build(std::uint32_t key, int free_count, int budget, std::vector<PartialTree::Node>& nodes,
                     std::vector<bool>& labels, std::vector<std::pair<int, bool>>& leaf_labels) const {
  const Entry& e = memo_[key];
  budget = std::min(budget, static_cast<int>(e.err.size()));
  const auto idx = static_cast<std::size_t>(budget - 1);
  const int self = static_cast<int>(nodes.size()) - 1;
  const int c = e.coord[idx];
  if (c == 0) {
    const std::uint32_t size = 1u << free_count;
    leaf_labels.emplace_back(self, 2 * e.ones >= size);
    return;
  }
  nodes[self].query = Query::binary(c);
  const int b1 = e.lo_budget[idx];
  nodes.emplace_back();
  nodes[self].lo = static_cast<int>(nodes.size()) - 1;
  build(key + pow3_[c - 1], free_count - 1, b1, nodes, labels, leaf_labels);
  nodes.emplace_back();
  nodes[self].hi = static_cast<int>(nodes.size()) - 1;
  build(key + 2 * pow3_[c - 1], free_count - 1, budget - b1, nodes, labels, leaf_labels);
}

DecisionTree OptTable::witness(int s) const {
  s = std::clamp(s, 1, max_size_);
  std::vector<PartialTree::Node> nodes(1);
  std::vector<bool> labels;
  std::vector<std::pair<int, bool>> leaf_labels;
  build(0, n_, s, nodes, labels, leaf_labels);
  PartialTree shape = PartialTree::from_nodes(TreeMode::Binary, std::move(nodes));
  labels.assign(static_cast<std::size_t>(shape.size()), false);
  for (const auto& [node, label] : leaf_labels) labels[static_cast<std::size_t>(shape.leaf_id_of_node(node))] = label;
  return DecisionTree(std::move(shape), std::move(labels));
}

OptResult opt(const BoolFunc& f, int s) {
  OptTable table(f, s);
  return OptResult{table.error(s), table.witness(s)};
}

JzReport verify_jz(const BoolFunc& f, const DecisionTree& g) {
  if (g.size() < 2) throw RefusedError("robust OSSS check needs a tree of size >= 2 (log2 1 = 0)");
  if (g.shape().max_coord() > f.arity()) throw DomainError("tree queries a coordinate beyond the function's arity");
  JzReport rep;
  for (int i = 1; i <= f.arity(); ++i) rep.max_influence = max(rep.max_influence, influence(f, {}, i));
  rep.bias = bias(f);
  rep.distance = distance(g, f);
  rep.lhs = rep.max_influence.to_double();
  rep.rhs = (rep.bias - rep.distance).to_double() / std::log2(static_cast<double>(g.size()));
  rep.pass = rep.lhs >= rep.rhs - 1e-12;
  return rep;
}

LabelingReport optimal_labeling_check(const PartialTree& t, const BoolFunc& f) {
  if (t.size() > 8) throw DomainError("labeling enumeration is limited to trees with at most 8 leaves");
  LabelingReport rep;
  const DecisionTree completion = complete(t, f);
  rep.completion_error = distance(completion, f);
  const auto leaves = static_cast<std::size_t>(t.size());
  bool first = true;
  for (std::uint32_t mask = 0; mask < (1u << leaves); ++mask) {
    std::vector<bool> labels(leaves);
    for (std::size_t k = 0; k < leaves; ++k) labels[k] = (mask >> k) & 1u;
    const Dyadic err = distance(DecisionTree(t, std::move(labels)), f);
    if (first || err < rep.min_error) rep.min_error = err;
    first = false;
    ++rep.labelings;
  }
  rep.pass = rep.completion_error == rep.min_error;
  return rep;
}

namespace {

using NodeList = std::vector<PartialTree::Node>;

// Subtrees as node lists rooted at index 0 with children indexed locally.
std::vector<NodeList> shapes(std::uint32_t avail, int n, int leaves) {
  if (leaves == 1) return {NodeList(1)};
  std::vector<NodeList> out;
  for (int c = 1; c <= n; ++c) {
    if (!((avail >> (c - 1)) & 1u)) continue;
    const std::uint32_t rest = avail & ~(1u << (c - 1));
    for (int k1 = 1; k1 < leaves; ++k1) {
      const auto los = shapes(rest, n, k1);
      if (los.empty()) continue;
      const auto his = shapes(rest, n, leaves - k1);
      for (const auto& lo : los)
        for (const auto& hi : his) {
          NodeList t(1);
          t[0].query = Query::binary(c);
          auto append = [&t](const NodeList& sub) {
            const int base = static_cast<int>(t.size());
            for (auto nd : sub) {
              if (!nd.is_leaf()) {
                nd.lo += base;
                nd.hi += base;
              }
              t.push_back(nd);
            }
            return base;
          };
          t[0].lo = append(lo);
          t[0].hi = append(hi);
          out.push_back(std::move(t));
        }
    }
  }
  return out;
}

}  // namespace

std::vector<PartialTree> enumerate_trees(int n, int max_leaves) {
  if (n < 1 || n > 16) throw DomainError("tree enumeration needs 1 <= n <= 16");
  std::vector<PartialTree> out;
  const std::uint32_t all = (1u << n) - 1;
  for (int k = 1; k <= max_leaves; ++k)
    for (auto& nodes : shapes(all, n, k)) out.push_back(PartialTree::from_nodes(TreeMode::Binary, std::move(nodes)));
  return out;
}

PartialTree random_partial_tree(int n, int leaves, Rng& rng) {
  PartialTree t;
  while (t.size() < leaves) {
    std::vector<std::pair<int, std::vector<int>>> open;
    for (int node : t.leaf_nodes()) {
      const Restriction r = t.restriction_of(node);
      std::vector<int> free;
      for (int i = 1; i <= n; ++i)
        if (!r.is_fixed(i)) free.push_back(i);
      if (!free.empty()) open.emplace_back(node, std::move(free));
    }
    if (open.empty()) break;
    const auto& [node, free] = open[uniform_below(rng, open.size())];
    t.split_node(node, Query::binary(free[uniform_below(rng, free.size())]));
  }
  return t;
}

DecisionTree random_labeled_tree(int n, int leaves, Rng& rng) {
  PartialTree t = random_partial_tree(n, leaves, rng);
  std::vector<bool> labels(static_cast<std::size_t>(t.size()));
  for (std::size_t k = 0; k < labels.size(); ++k) labels[k] = rng() & 1u;
  return DecisionTree(std::move(t), std::move(labels));
}

namespace {

NodeList monotone_subtree(std::vector<int> avail, int leaves, Rng& rng) {
  NodeList t(1);
  if (leaves == 1 || avail.empty()) {
    t[0].query.coord = (rng() & 1u) ? -1 : -2;  // placeholder leaf: -1 labels 1, -2 labels 0
    return t;
  }
  const std::size_t pick = uniform_below(rng, avail.size());
  const int c = avail[pick];
  avail.erase(avail.begin() + static_cast<std::ptrdiff_t>(pick));
  const int kind = static_cast<int>(uniform_below(rng, leaves >= 3 ? 3 : 2));
  NodeList lo, hi;
  auto constant = [](bool v) {
    NodeList l(1);
    l[0].query.coord = v ? -1 : -2;
    return l;
  };
  if (kind == 0) {
    hi = constant(true);
    lo = monotone_subtree(avail, leaves - 1, rng);
  } else if (kind == 1) {
    lo = constant(false);
    hi = monotone_subtree(avail, leaves - 1, rng);
  } else {
    const int k1 = 1 + static_cast<int>(uniform_below(rng, static_cast<std::uint64_t>(leaves - 1)));
    lo = monotone_subtree(avail, k1, rng);
    hi = monotone_subtree(avail, leaves - k1, rng);
  }
  t[0].query = Query::binary(c);
  auto append = [&t](const NodeList& sub) {
    const int base = static_cast<int>(t.size());
    for (auto nd : sub) {
      if (nd.query.coord > 0) {
        nd.lo += base;
        nd.hi += base;
      }
      t.push_back(nd);
    }
    return base;
  };
  t[0].lo = append(lo);
  t[0].hi = append(hi);
  return t;
}

}  // namespace

DecisionTree random_monotone_tree(int n, int leaves, Rng& rng) {
  if (n < 1 || n > BoolFunc::kMaxArity || leaves < 1) throw DomainError("random monotone tree needs 1 <= n <= 24 and leaves >= 1");
  std::vector<int> coords(static_cast<std::size_t>(n));
  std::iota(coords.begin(), coords.end(), 1);
  for (int attempt = 0; attempt < 10000; ++attempt) {
    NodeList nodes = monotone_subtree(coords, leaves, rng);
    std::vector<bool> flip(static_cast<std::size_t>(n) + 1);
    for (int i = 1; i <= n; ++i) flip[i] = rng() & 1u;
    std::vector<std::pair<int, bool>> leaf_labels;
    for (int v = 0; v < static_cast<int>(nodes.size()); ++v) {
      auto& nd = nodes[v];
      if (nd.query.coord < 0) {
        leaf_labels.emplace_back(v, nd.query.coord == -1);
        nd.query = Query{};
      } else if (flip[nd.query.coord]) {
        std::swap(nd.lo, nd.hi);
      }
    }
    PartialTree shape = PartialTree::from_nodes(TreeMode::Binary, std::move(nodes));
    if (shape.size() != leaves) continue;
    std::vector<bool> labels(static_cast<std::size_t>(shape.size()));
    for (const auto& [node, label] : leaf_labels) labels[static_cast<std::size_t>(shape.leaf_id_of_node(node))] = label;
    DecisionTree t(std::move(shape), std::move(labels));
    if (is_monotone(t.to_function(n))) return t;
  }
  throw DomainError("could not generate a monotone tree with the requested size");
}

}  // namespace topdown
