#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "boolfn.hpp"
#include "dyadic.hpp"
#include "grower.hpp"
#include "impurity.hpp"
#include "target.hpp"
#include "tree.hpp"

namespace topdown {

/// Read-once DNF parameters: m = floor(l/w) disjoint width-w terms over x.
/// Tribes' keeps the first m' terms; Rest = Tribes and not Tribes'.
struct TribesParams {
  int l = 0;
  int w = 0;
  int m = 0;
  int m_prime = 0;
  Dyadic p_full;   // 1 - (1 - 2^-w)^m
  Dyadic p_prime;  // 1 - (1 - 2^-w)^m'
  Dyadic p_rest() const { return p_full - p_prime; }
};

/// f(x, y) = 1 if Tribes'(x); Maj_k(y) if Rest(x); 0 otherwise.
///
/// Coordinates 1..l are x (term j owns (j-1)w+1..jw, leftovers are
/// irrelevant) and l+1..l+k are y. All conditional quantities are computed
/// from per-term survival products and binomial tails, so arities far beyond
/// truth-table range are served exactly.
class HardInstance final : public ExactTarget {
 public:
  /// Throws DomainError unless k is odd and positive and l >= 2.
  HardInstance(TribesParams params, int k);

  const TribesParams& params() const { return p_; }
  int k() const { return k_; }
  int l() const { return p_.l; }
  bool is_x(int coord) const { return coord >= 1 && coord <= p_.l; }
  bool is_y(int coord) const { return coord > p_.l && coord <= p_.l + k_; }

  int arity() const override { return p_.l + k_; }
  Dyadic expectation(const Restriction& r) const override;
  Dyadic influence(const Restriction& r, int coord) const override;
  bool value(std::span<const Sign> x) const override;
  LeafStats leaf_stats(const Restriction& r) const override;

  /// Pr[Tribes' = 1 | r], Pr[Rest = 1 | r], Pr[Maj_k = 1 | r].
  Dyadic prob_tribes_prime(const Restriction& r) const;
  Dyadic prob_rest(const Restriction& r) const;
  Dyadic prob_majority(const Restriction& r) const;

  bool tribes(std::span<const Sign> x) const;
  bool tribes_prime(std::span<const Sign> x) const;
  bool majority(std::span<const Sign> x) const;

  /// c1/sqrt(k) >= log2(l)/l.
  bool satisfies_shape(double c1) const;

  /// Truth table; throws DomainError above 24 coordinates.
  BoolFunc to_function() const;
  /// Complete depth-l tree over x labeled by Tribes(x).
  DecisionTree tribes_tree() const;

 private:
  void check(const Restriction& r) const;
  std::vector<Dyadic> term_probs(const Restriction& r) const;
  Dyadic tail(int free_count, int need) const;

  TribesParams p_;
  int k_;
  std::vector<std::vector<BigInt>> binom_;  // Pascal rows 0..k
};

/// w minimizes |p_full - 1/2| over [1, l], m' minimizes |p_prime - 0.499|
/// over [1, m-1]; ties go to the smaller value.
TribesParams choose_tribes(int l);
HardInstance choose_params(int l, int k);

struct LowerBoundConfig {
  int budget = 64;
  std::uint64_t samples = 100000;
  std::uint64_t seed = 1;
  /// xi counts paths whose first x-query comes before this many y-queries.
  int y_depth = 1;
  double threshold = 0.35;
  double confidence = 0.99;
  int threads = 1;
};

struct LowerBoundRow {
  int size = 1;
  Dyadic error;             // exact distance of the f-completion
  double error_mc = 0.0;    // Monte Carlo cross-check
  double error_mc_ci = 0.0;
  double xi_fraction = 0.0;
  double xi_ci = 0.0;
};

struct LowerBoundReport {
  std::string impurity;
  std::vector<LowerBoundRow> rows;
  GrowthTrace trace;
  Dyadic tribes_distance;      // dist(f, Tribes) over the complete x-tree
  Dyadic min_error;
  bool stays_above = false;      // every size's error lower bound > threshold
  std::uint64_t x_queries = 0;
  std::uint64_t y_queries = 0;
  std::string to_csv() const;
};

LowerBoundReport lower_bound_experiment(const HardInstance& h, const ImpuritySpec& spec,
                                        const LowerBoundConfig& cfg);

}  // namespace topdown
