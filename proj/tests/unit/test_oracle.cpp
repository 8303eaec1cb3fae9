#include <doctest.h>

#include <cmath>

#include "errors.hpp"
#include "grower.hpp"
#include "helpers.hpp"
#include "oracle.hpp"

using namespace topdown;
using testing::and2;
using testing::dy;

namespace {

/// Independent brute force: best completion over every legal tree shape.
Dyadic brute_opt(const BoolFunc& f, int s, const std::vector<PartialTree>& trees) {
  Dyadic best = Dyadic::one();
  for (const auto& t : trees)
    if (t.size() <= s) best = min(best, distance(complete(t, f), f));
  return best;
}

}  // namespace

TEST_CASE("opt examples") {
  CHECK(opt(and2(), 1).error == dy(1, 2));
  CHECK(opt(and2(), 2).error == dy(1, 2));
  CHECK(opt(and2(), 3).error == Dyadic::zero());
  CHECK(opt(and2(), 3).witness.to_function(2) == and2());
  CHECK(opt(and2(), 1).witness.size() == 1);
  CHECK_THROWS_AS(OptTable(BoolFunc(13), 2), RefusedError);
  CHECK_THROWS_AS(OptTable(and2(), 0), DomainError);
}

TEST_CASE("opt matches brute force over every tree shape") {
  for (int n = 1; n <= 3; ++n) {
    const auto trees = enumerate_trees(n, 5);
    for (std::uint64_t code = 0; code < (1ULL << (1u << n)); ++code) {
      const auto f = testing::from_code(n, code);
      const OptTable table(f, 5);
      for (int s = 1; s <= 5; ++s) REQUIRE(table.error(s) == brute_opt(f, s, trees));
    }
  }
  Rng rng(41);
  const auto trees4 = enumerate_trees(4, 4);
  for (int trial = 0; trial < 20; ++trial) {
    const auto f = random_function(4, rng(), uniform01(rng));
    const OptTable table(f, 4);
    for (int s = 1; s <= 4; ++s) CHECK(table.error(s) == brute_opt(f, s, trees4));
  }
}

TEST_CASE("opt is non-increasing, reaches zero, and witnesses attain it") {
  Rng rng(43);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 2 + static_cast<int>(uniform_below(rng, 6));
    const auto f = random_function(n, rng(), uniform01(rng));
    const OptTable table(f, 1 << n);
    for (int s = 1; s <= (1 << n); ++s) {
      if (s > 1) CHECK(table.error(s) <= table.error(s - 1));
      if (s <= 12) {
        const auto w = table.witness(s);
        CHECK(w.size() <= s);
        CHECK(distance(w, f) == table.error(s));
      }
    }
    CHECK(table.error(1 << n) == Dyadic::zero());
    CHECK(table.error(1) == bias(f));
  }
}

TEST_CASE("opt witness tie-break prefers a constant leaf then the smallest coordinate") {
  CHECK(opt(BoolFunc::constant(3, true), 4).witness.size() == 1);
  const auto w = opt(BoolFunc::dictator(3, 2), 2).witness;
  CHECK(w.size() == 2);
  CHECK(w.shape().node(0).query.coord == 2);
  // a larger budget admits an exact tree rooted at the smaller coordinate
  const auto w4 = opt(BoolFunc::dictator(3, 2), 4).witness;
  CHECK(w4.shape().node(0).query.coord == 1);
  CHECK(distance(w4, BoolFunc::dictator(3, 2)) == Dyadic::zero());
  const auto x = opt(and2(), 3).witness;
  CHECK(x.shape().node(0).query.coord == 1);
}

TEST_CASE("the grower never beats the oracle") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto f = random_function(6, seed, 0.4);
    const OptTable table(f, 64);
    for (const auto& name : builtin_impurity_names()) {
      GrowthConfig c;
      c.impurity = builtin_impurity(name);
      c.budget = 64;
      const auto r = grow(f, c);
      for (std::size_t k = 0; k < r.trace.final_size(); ++k)
        CHECK(r.trace.exact_distance_at(k) >= table.error(static_cast<int>(k) + 1));
    }
  }
}

TEST_CASE("agnostic guarantee shape on small monotone functions") {
  for (int n = 2; n <= 6; ++n)
    for (std::uint64_t seed = 0; seed < 8; ++seed) {
      const auto f = random_monotone(n, substream(13, "agnostic-small", seed * 8 + n));
      const int full = 1 << n;
      const OptTable table(f, full);
      for (const auto& name : builtin_impurity_names()) {
        GrowthConfig c;
        c.impurity = builtin_impurity(name);
        c.budget = full;
        const auto r = grow(f, c);
        for (int s = 2; s <= full; ++s) {
          long long b = 1;
          const int L = static_cast<int>(std::ceil(std::log2(s)));
          for (int i = 0; i < L && b < full; ++i) b *= s;
          const auto idx = static_cast<std::size_t>(std::min<long long>(b, full) - 1);
          CHECK(r.trace.distance_at(std::min(idx, r.trace.records.size())) <= table.error(s).to_double() + 0.1);
        }
      }
    }
}

TEST_CASE("verify_jz examples") {
  const auto exact = opt(and2(), 3).witness;
  const auto rep = verify_jz(and2(), exact);
  CHECK(rep.pass);
  CHECK(rep.lhs == 0.5);
  CHECK(rep.rhs == doctest::Approx(0.25 / std::log2(3.0)));
  CHECK(rep.max_influence == dy(1, 1));

  Rng rng(47);
  for (int trial = 0; trial < 50; ++trial) {
    const auto f = random_function(4, rng(), uniform01(rng));
    const auto g = random_labeled_tree(4, 2 + static_cast<int>(uniform_below(rng, 6)), rng);
    const auto r = verify_jz(f, g);
    if (r.distance >= r.bias) CHECK(r.rhs <= 0.0);
    CHECK(r.pass);
  }
  CHECK_THROWS_AS(verify_jz(and2(), DecisionTree::constant(false)), RefusedError);
}

TEST_CASE("robust OSSS holds for every function on three variables and every tree of size <= 4") {
  std::size_t pairs = 0;
  std::vector<DecisionTree> trees;
  for (const auto& shape : enumerate_trees(3, 4)) {
    if (shape.size() < 2) continue;
    for (std::uint32_t lab = 0; lab < (1u << shape.size()); ++lab) {
      std::vector<bool> labels(static_cast<std::size_t>(shape.size()));
      for (int i = 0; i < shape.size(); ++i) labels[i] = (lab >> i) & 1u;
      trees.emplace_back(shape, labels);
    }
  }
  for (std::uint64_t code = 0; code < 256; ++code) {
    const auto f = testing::from_code(3, code);
    for (const auto& g : trees) {
      REQUIRE(verify_jz(f, g).pass);
      ++pairs;
    }
  }
  CHECK(pairs == 256 * trees.size());
}

TEST_CASE("enumerate_trees counts") {
  // n = 1: the leaf and the single split
  CHECK(enumerate_trees(1, 4).size() == 2);
  // n = 2: leaf, two root splits, each with two ways to split one child, and both children split
  std::size_t by_size[5] = {};
  for (const auto& t : enumerate_trees(2, 4)) ++by_size[t.size()];
  CHECK(by_size[1] == 1);
  CHECK(by_size[2] == 2);
  CHECK(by_size[3] == 4);
  CHECK(by_size[4] == 2);
}

TEST_CASE("optimal_labeling_check examples") {
  Rng rng(53);
  const auto zero = BoolFunc::constant(4, false);
  for (int i = 0; i < 5; ++i) {
    const auto rep = optimal_labeling_check(random_partial_tree(4, 1 + i, rng), zero);
    CHECK(rep.pass);
    CHECK(rep.min_error == Dyadic::zero());
  }
  const auto r = optimal_labeling_check(PartialTree().split(0, Query::binary(1)), and2());
  CHECK(r.pass);
  CHECK(r.min_error == dy(1, 2));
  const auto big = optimal_labeling_check(random_partial_tree(5, 5, rng), random_function(5, 99));
  CHECK(big.pass);
  CHECK(big.labelings == 32);
  CHECK_THROWS_AS(optimal_labeling_check(random_partial_tree(5, 9, rng), random_function(5, 1)), DomainError);
}

TEST_CASE("random trees") {
  Rng rng(59);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 6 + static_cast<int>(uniform_below(rng, 5));
    const int s = 1 + static_cast<int>(uniform_below(rng, 16));
    const auto t = random_partial_tree(n, s, rng);
    CHECK(t.size() == s);
    const auto m = random_monotone_tree(n, s, rng);
    CHECK(m.size() == s);
    CHECK(is_monotone(m.to_function(n)));
  }
  // a partial tree stops growing once every leaf is a full subcube
  CHECK(random_partial_tree(3, 12, rng).size() == 8);
}
