#pragma once

#include <optional>
#include <string>
#include <vector>

#include "boolfn.hpp"
#include "dyadic.hpp"
#include "impurity.hpp"
#include "target.hpp"
#include "tree.hpp"

namespace topdown {

/// Gains within this distance are ties; a gain at or below it is "zero".
inline constexpr double kGainTolerance = 1e-12;

/// Reference point for the per-split lower bound: the grower is compared
/// against a size-s tree of error opt_s, with slack eps.
struct Monitor {
  int s = 2;
  double eps = 0.1;
  Dyadic opt_s;
};

struct GrowthConfig {
  /// Splitting criterion; empty selects the influence variant (split the
  /// leaf maximizing 2^-depth * max_i Inf_i(f_leaf) on its most influential
  /// variable).
  std::optional<ImpuritySpec> impurity;
  /// Maximum number of leaves.
  int budget = 1;
  /// Halt once the best gain is zero instead of spending the budget.
  bool stop_on_zero_gain = false;
};

struct TraceRecord {
  int iter = 0;      // 1-based split count; the tree after this split has iter+1 leaves
  int leaf_id = -1;  // preorder position of the split leaf before the split
  int depth = 0;
  Query query;
  Restriction path;  // binary trees: subcube of the split leaf
  double gain = 0.0;  // purity gain, or score in influence mode
  double g_impurity = 0.0;  // potential after the split (NaN when not tracked)
  std::optional<Dyadic> u_f;
  double distance = 0.0;  // error of the completion after the split
  std::optional<Dyadic> exact_distance;  // binary trees under the uniform distribution
  /// Real-valued growth: Pr_D[x_i >= theta] for the chosen split.
  std::optional<double> upper_mass;
  bool is_median = false;
};

struct GrowthTrace {
  std::string criterion;  // impurity name or "influence"
  double initial_g_impurity = 0.0;
  std::optional<Dyadic> initial_u_f;
  double initial_distance = 0.0;
  std::optional<Dyadic> initial_exact_distance;
  std::vector<TraceRecord> records;
  int threshold_bits = 0;  // quantile-grid width for real-valued growth, 0 otherwise

  /// Distance of the f-completion after `splits` splits.
  double distance_at(std::size_t splits) const {
    return splits == 0 ? initial_distance : records.at(splits - 1).distance;
  }
  /// Throws DomainError when the trace carries no exact distances.
  Dyadic exact_distance_at(std::size_t splits) const;
  std::size_t final_size() const { return records.size() + 1; }
  double g_impurity_at(std::size_t splits) const {
    return splits == 0 ? initial_g_impurity : records.at(splits - 1).g_impurity;
  }
  /// Columns iter, leaf_id, coord, theta, gain, g_impurity, u_f, distance;
  /// row 0 describes the empty tree.
  std::string to_csv() const;
};

struct GrowthResult {
  PartialTree tree;
  DecisionTree completion;
  GrowthTrace trace;
};

/// Top-down growth: starting from a single leaf, repeatedly split the
/// (leaf, variable) pair of largest purity gain until the tree has
/// `cfg.budget` leaves or no legal split remains.
///
/// Ties (gains within kGainTolerance) go to the smallest leaf id, then the
/// smallest coordinate. Influence-mode scores are exact and tie-break the
/// same way.
GrowthResult grow(const ExactTarget& f, const GrowthConfig& cfg);
GrowthResult grow(const BoolFunc& f, const GrowthConfig& cfg);

/// sum over leaves of 2^-depth * G(E[f_leaf]).
double g_impurity(const PartialTree& t, const ExactTarget& f, const ImpuritySpec& spec);
double g_impurity(const PartialTree& t, const BoolFunc& f, const ImpuritySpec& spec);

/// sum over leaves of 2^-depth * Inf(f_leaf).
Dyadic influence_potential(const PartialTree& t, const ExactTarget& f);

/// w_parent G(p_parent) - w_lo G(p_lo) - w_hi G(p_hi). Every grower uses this
/// one expression so gains agree bit-for-bit across representations.
double split_gain(const ImpuritySpec& spec, double w_parent, double p_parent, double w_lo,
                  double p_lo, double w_hi, double p_hi);

/// Purity gain of splitting leaf `leaf_id` of t on `q`; throws like
/// PartialTree::split when the split is illegal.
double purity_gain(const PartialTree& t, const ExactTarget& f, const ImpuritySpec& spec, int leaf_id,
                   const Query& q);
double purity_gain(const PartialTree& t, const BoolFunc& f, const ImpuritySpec& spec, int leaf_id,
                   const Query& q);

struct IterationCheck {
  int iter = 0;
  double gain = 0.0;
  bool recorded_values_match = true;  // replayed gain/potential/distance equal the trace
  bool telescoping = true;            // potential drops by exactly the gain
  bool distance_non_increasing = true;
  bool claim2 = true;                 // distance <= G-impurity
  bool claim3 = true;                 // gain >= 2^-depth (kappa/32) Inf_i(f_leaf)^2
  double claim3_bound = 0.0;
  double claim3_tight_bound = 0.0;    // same with kappa/2
  bool score_lb_applies = false;      // distance before the split > opt_s + eps
  bool score_lb = true;
  double score_lb_bound = 0.0;        // kappa eps^2 / (32 j (log2 s)^2)
  double score_lb_tight_bound = 0.0;  // kappa eps^2 / (2 j (log2 s)^2)
  bool pass() const {
    return recorded_values_match && telescoping && distance_non_increasing && claim2 && claim3 &&
           score_lb;
  }
};

struct SplitInequalityReport {
  bool claim1 = true;  // initial potential == G(E[f]) <= 1
  bool initial_claim2 = true;
  std::vector<IterationCheck> iterations;
  std::size_t score_lb_checked = 0;
  std::size_t score_lb_failed = 0;
  bool pass() const;
};

/// Replays an impurity-mode trace on f from scratch and checks, at every
/// iteration, the potential identities and the per-split lower bounds that
/// drive the agnostic guarantee. Throws RefusedError for non-monotone f, a
/// monitor with s < 2, or an influence-mode trace.
SplitInequalityReport verify_split_inequalities(const GrowthTrace& trace, const BoolFunc& f,
                                                const ImpuritySpec& spec, const Monitor& monitor);

struct ArgmaxReport {
  std::vector<int> gain_argmax;         // coordinates tied for the largest purity gain
  std::vector<int> correlation_argmax;  // coordinates tied for the largest |E[f x_i]|
  std::vector<int> influence_argmax;
  int gain_pick = 0;
  int correlation_pick = 0;
  int influence_pick = 0;
  bool agree = false;
};

/// Compares the purity-gain and |correlation| argmax variables at one leaf.
/// Throws RefusedError when f is not monotone or f_leaf is constant.
ArgmaxReport argmax_agreement(const BoolFunc& f, const PartialTree& t, int leaf_id,
                              const ImpuritySpec& spec);

struct CommonLeafReport {
  std::size_t common_leaves = 0;
  std::size_t disagreements = 0;
  std::vector<std::string> details;
};

/// Leaves split by both traces (same subcube) must be split on the same
/// variable.
CommonLeafReport compare_split_variables(const GrowthTrace& a, const GrowthTrace& b);

}  // namespace topdown
