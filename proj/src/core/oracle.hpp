#pragma once

#include <cstdint>
#include <vector>

#include "boolfn.hpp"
#include "dyadic.hpp"
#include "rng.hpp"
#include "tree.hpp"

namespace topdown {

/// Exact minimum error of trees with at most s leaves, for every s up to a
/// cap, by memoized search over subcubes.
///
/// opt(rho, s) = min(bias(f_rho),
///                   min over free i, s1+s2=s of ½opt(rho x_i=-1, s1) + ½opt(rho x_i=+1, s2)).
/// Entries are stored as misclassified-point counts. The witness prefers a
/// constant leaf, then the smallest coordinate, then the most balanced size
/// split.
class OptTable {
 public:
  static constexpr int kMaxArity = 12;

  /// Throws RefusedError above kMaxArity, DomainError for max_size < 1.
  OptTable(const BoolFunc& f, int max_size);

  int arity() const { return n_; }
  int max_size() const { return max_size_; }
  /// opt_s as an exact dyadic; s is clamped to [1, max_size].
  Dyadic error(int s) const;
  /// One optimal tree with at most s leaves.
  DecisionTree witness(int s) const;

 private:
  struct Entry {
    bool ready = false;
    std::uint32_t ones = 0;
    std::vector<std::uint32_t> err;  // err[b-1]: best count with <= b leaves
    std::vector<std::int8_t> coord;  // 0 = constant leaf
    std::vector<std::uint16_t> lo_budget;
  };

  const Entry& solve(std::uint32_t key, int free_count);
  int budget_cap(int free_count) const;
  void build(std::uint32_t key, int free_count, int budget, std::vector<PartialTree::Node>& nodes,
             std::vector<bool>& labels, std::vector<std::pair<int, bool>>& leaf_labels) const;

  const BoolFunc* f_;
  int n_;
  int max_size_;
  std::vector<std::uint32_t> pow3_;
  std::vector<Entry> memo_;
};

struct OptResult {
  Dyadic error;
  DecisionTree witness;
};

OptResult opt(const BoolFunc& f, int s);

struct JzReport {
  double lhs = 0.0;  // max_i Inf_i(f)
  double rhs = 0.0;  // (bias(f) - dist(f, g)) / log2 size(g)
  Dyadic max_influence;
  Dyadic bias;
  Dyadic distance;
  bool pass = false;
};

/// Checks max_i Inf_i(f) >= (bias(f) - dist(f,g)) / log2 size(g). Throws
/// RefusedError for trees of size 1.
JzReport verify_jz(const BoolFunc& f, const DecisionTree& g);

struct LabelingReport {
  Dyadic completion_error;
  Dyadic min_error;
  std::uint64_t labelings = 0;
  bool pass = false;
};

/// Enumerates every labeling of t (at most 8 leaves) and checks that the
/// f-completion attains the minimum error.
LabelingReport optimal_labeling_check(const PartialTree& t, const BoolFunc& f);

/// All legal binary-feature partial trees on n coordinates with 1..max_leaves
/// leaves.
std::vector<PartialTree> enumerate_trees(int n, int max_leaves);

/// Random legal binary tree: repeatedly splits a uniformly chosen leaf that
/// still has a free coordinate on a uniformly chosen free coordinate.
PartialTree random_partial_tree(int n, int leaves, Rng& rng);
DecisionTree random_labeled_tree(int n, int leaves, Rng& rng);

/// Random decision tree with exactly `leaves` leaves computing a unate
/// function. Internal nodes are OR-like (x_i true -> 1), AND-like (x_i
/// false -> 0) or general (two random subtrees, kept only if the result
/// stays monotone); each coordinate's direction is then flipped with
/// probability 1/2.
DecisionTree random_monotone_tree(int n, int leaves, Rng& rng);

}  // namespace topdown
