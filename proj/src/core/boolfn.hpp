#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "dyadic.hpp"
#include "restriction.hpp"

namespace topdown {

/// Truth table of f: {±1}^n -> {0,1}.
///
/// Input x is stored at index sum_{i : x_i = +1} 2^(i-1) (coordinates are
/// 1-indexed), one bit per input.
class BoolFunc {
 public:
  static constexpr int kMaxArity = 24;

  /// Constant-0 function of arity n; throws DomainError unless 1 <= n <= 24.
  explicit BoolFunc(int n);

  static BoolFunc constant(int n, bool value);
  static BoolFunc from_predicate(int n, const std::function<bool(std::span<const Sign>)>& pred);
  static BoolFunc from_index_predicate(int n, const std::function<bool(std::uint32_t)>& pred);
  /// Dictator 1[x_i = +1].
  static BoolFunc dictator(int n, int coord);
  static BoolFunc conjunction(int n, std::span<const int> signed_literals);
  static BoolFunc majority(int n);
  static BoolFunc parity(int n);

  int arity() const { return n_; }
  std::uint32_t table_size() const { return 1u << n_; }

  bool at(std::uint32_t index) const { return (words_[index >> 6] >> (index & 63)) & 1u; }
  void set(std::uint32_t index, bool v);
  bool eval(std::span<const Sign> x) const { return at(index_of(x)); }

  std::uint64_t count_ones() const;
  /// Same arity; fixed coordinates become irrelevant inputs.
  BoolFunc restricted(const Restriction& r) const;
  BoolFunc complemented() const;

  const std::vector<std::uint64_t>& words() const { return words_; }

  static std::uint32_t index_of(std::span<const Sign> x);
  static std::vector<Sign> point_of(std::uint32_t index, int n);

  friend bool operator==(const BoolFunc&, const BoolFunc&) = default;

 private:
  int n_;
  std::vector<std::uint64_t> words_;
};

/// Per-subcube statistics in one pass over the subcube. Index i-1 of the
/// per-coordinate vectors refers to x_i; entries for fixed coordinates are
/// zero and `free_coord[i-1]` is false.
struct SubcubeProfile {
  int free_count = 0;
  std::uint64_t ones = 0;
  std::vector<bool> free_coord;
  std::vector<std::uint64_t> ones_plus;    // ones with x_i = +1
  std::vector<std::uint64_t> flip_pairs;   // x with x_i = -1 and f(x) != f(x^i)

  Dyadic mean() const { return Dyadic::ratio(ones, free_count); }
  Dyadic mean_given(int coord, Sign b) const;
  Dyadic influence(int coord) const;
  Dyadic correlation(int coord) const;
  Dyadic total_influence() const;
};

SubcubeProfile profile(const BoolFunc& f, const Restriction& r);

/// E[f_r] under the uniform distribution on the free coordinates.
Dyadic expectation(const BoolFunc& f, const Restriction& r = {});
/// Pr[f_r(x) != f_r(x^i)]; coordinate must be free under r.
Dyadic influence(const BoolFunc& f, const Restriction& r, int coord);
/// E[f_r(x) x_i]; coordinate must be free under r.
Dyadic correlation(const BoolFunc& f, const Restriction& r, int coord);
/// min(E[f_r], 1 - E[f_r]).
Dyadic bias(const BoolFunc& f, const Restriction& r = {});
Dyadic total_influence(const BoolFunc& f, const Restriction& r = {});

/// round(p) = 1 iff p >= 1/2.
inline bool round_label(const Dyadic& p) { return p >= Dyadic::half(); }

enum class Orientation { NonDecreasing, NonIncreasing, Both, Neither };
std::string to_string(Orientation o);

std::vector<Orientation> monotone_orientation(const BoolFunc& f);
/// Unate in every coordinate (no coordinate reports Neither).
bool is_monotone(const BoolFunc& f);

enum class MonotoneStrategy { Dnf, UpwardClosure };

struct MonotoneGenOptions {
  MonotoneStrategy strategy = MonotoneStrategy::Dnf;
  /// Dnf: maximum term width as a fraction of n. UpwardClosure: probability
  /// that a point seeds the up-set.
  double density = 0.5;
  /// Flip each coordinate's direction with probability 1/2, producing unate
  /// rather than only non-decreasing functions.
  bool random_orientation = true;
};

BoolFunc random_monotone(int n, std::uint64_t seed, const MonotoneGenOptions& opts = {});
/// Uniformly random table with Pr[f(x)=1] = density per point.
BoolFunc random_function(int n, std::uint64_t seed, double density = 0.5);

/// {"kind":"table","n":N,"hex":"..."} (bit at index k is bit k%8 of byte
/// k/8) or {"kind":"dnf","n":N,"terms":[[signed literals]]}.
BoolFunc parse_function_spec(const std::string& json_text);
BoolFunc load_function_spec(const std::string& path);
/// Always emits the table form.
std::string function_spec_json(const BoolFunc& f);
std::string to_hex(const BoolFunc& f);
BoolFunc from_hex(int n, const std::string& hex);
BoolFunc from_dnf(int n, const std::vector<std::vector<int>>& terms);

}  // namespace topdown
