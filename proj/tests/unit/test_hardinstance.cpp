#include <doctest.h>

#include "errors.hpp"
#include "hardinstance.hpp"
#include "helpers.hpp"

using namespace topdown;
using testing::dy;

namespace {

BoolFunc tribes_table(const HardInstance& h) {
  return BoolFunc::from_predicate(h.l(), [&](std::span<const Sign> x) { return h.tribes(x); });
}

}  // namespace

TEST_CASE("parameter choice at l = 8") {
  const auto h = choose_params(8, 15);
  const auto& p = h.params();
  CHECK(p.w == 2);
  CHECK(p.m == 4);
  CHECK(p.m_prime == 2);
  CHECK(p.p_full == dy(175, 8));
  CHECK(p.p_full.to_double() == 0.68359375);
  CHECK(p.p_prime == dy(7, 4));
  CHECK(p.p_prime.to_double() == 0.4375);
  CHECK(p.p_rest().to_double() == 0.24609375);
  CHECK(h.arity() == 23);
}

TEST_CASE("acceptance probabilities match truth-table frequencies") {
  for (int l = 2; l <= 14; ++l) {
    const auto h = choose_params(l, 1);
    const auto& p = h.params();
    std::uint64_t full = 0, prime = 0;
    const std::uint32_t size = 1u << l;
    for (std::uint32_t k = 0; k < size; ++k) {
      auto x = BoolFunc::point_of(k, l);
      x.push_back(1);
      full += h.tribes(x) ? 1 : 0;
      prime += h.tribes_prime(x) ? 1 : 0;
    }
    CHECK(Dyadic::ratio(full, l) == p.p_full);
    CHECK(Dyadic::ratio(prime, l) == p.p_prime);
    CHECK(p.p_rest() >= Dyadic::zero());
    CHECK(p.m_prime < p.m);
  }
}

TEST_CASE("expectation and influence examples at l = 8, k = 3") {
  const auto h = choose_params(8, 3);
  CHECK(h.expectation({}) == dy(287, 9));
  CHECK(h.expectation({}).to_double() == 0.560546875);
  CHECK(h.influence({}, 9).to_double() == 0.123046875);
  const auto f = h.to_function();
  CHECK(expectation(f) == h.expectation({}));
  for (int i = 1; i <= 11; ++i) CHECK(influence(f, {}, i) == h.influence({}, i));

  // first term of Tribes' satisfied
  const auto forced = Restriction{}.with(1, 1).with(2, 1);
  CHECK(h.expectation(forced) == Dyadic::one());
  CHECK(h.influence(forced, 3) == Dyadic::zero());
  CHECK(h.influence(forced, 9) == Dyadic::zero());

  // all y fixed to -1: the majority term vanishes
  const auto ys = Restriction{}.with(9, -1).with(10, -1).with(11, -1);
  CHECK(h.expectation(ys) == h.prob_tribes_prime(ys));
  CHECK(h.prob_tribes_prime(ys) == h.params().p_prime);

  CHECK_THROWS_AS(h.influence(forced, 1), DomainError);
  CHECK_THROWS_AS(h.expectation(Restriction{}.with(12, 1)), DomainError);
}

TEST_CASE("structured quantities equal enumeration on random restrictions") {
  Rng rng(61);
  std::size_t checked = 0;
  const std::pair<int, int> shapes[] = {{4, 3}, {6, 5}, {8, 3}, {8, 5}, {9, 5}, {10, 3}, {5, 9}, {7, 7}};
  for (const auto& [l, k] : shapes) {
    const auto h = choose_params(l, k);
    const auto f = h.to_function();
    for (int trial = 0; trial < 125; ++trial) {
      const auto r = testing::random_restriction(l + k, rng);
      REQUIRE(h.expectation(r) == expectation(f, r));
      for (int i = 1; i <= l + k; ++i)
        if (!r.is_fixed(i)) REQUIRE(h.influence(r, i) == influence(f, r, i));
      const auto stats = h.leaf_stats(r);
      CHECK(stats.mean == expectation(f, r));
      for (std::size_t j = 0; j < stats.free_coords.size(); ++j) {
        CHECK(stats.mean_lo[j] == expectation(f, r.with(stats.free_coords[j], -1)));
        CHECK(stats.mean_hi[j] == expectation(f, r.with(stats.free_coords[j], 1)));
      }
      ++checked;
    }
  }
  CHECK(checked == 1000);
}

TEST_CASE("the hard instance is monotone") {
  for (const auto& [l, k] : {std::pair{4, 3}, std::pair{8, 3}, std::pair{8, 5}, std::pair{6, 7}}) {
    const auto f = choose_params(l, k).to_function();
    for (auto o : monotone_orientation(f)) CHECK(o != Orientation::Neither);
  }
}

TEST_CASE("distance to Tribes is half the Rest probability") {
  for (const auto& [l, k] : {std::pair{8, 3}, std::pair{8, 15}, std::pair{8, 63}, std::pair{6, 5}, std::pair{12, 31}}) {
    const auto h = choose_params(l, k);
    CHECK(distance(h.tribes_tree(), h) == h.params().p_rest() * Dyadic::half());
  }
  const auto h = choose_params(8, 3);
  CHECK(distance(h.tribes_tree(), h.to_function()) == h.params().p_rest() * Dyadic::half());
  CHECK(h.tribes_tree().to_function(h.l()) == tribes_table(h));
}

TEST_CASE("parameter validation") {
  CHECK_THROWS_AS(choose_params(8, 4), DomainError);
  CHECK_THROWS_AS(choose_params(1, 3), DomainError);
  CHECK_THROWS_AS(choose_params(8, 17).to_function(), DomainError);
  CHECK(choose_params(8, 3).satisfies_shape(10.0));
  CHECK_FALSE(choose_params(8, 3).satisfies_shape(0.01));
}

TEST_CASE("lower bound experiment at budget 1 reports the bias") {
  const auto h = choose_params(8, 15);
  LowerBoundConfig c;
  c.budget = 1;
  c.samples = 1000;
  const auto rep = lower_bound_experiment(h, builtin_impurity("gini"), c);
  REQUIRE(rep.rows.size() == 1);
  const auto e = h.expectation({});
  CHECK(rep.rows[0].error == min(e, Dyadic::one() - e));
}

TEST_CASE("lower bound experiment at l = 8, k = 15, budget 64") {
  const auto h = choose_params(8, 15);
  LowerBoundConfig c;
  c.budget = 64;
  c.samples = 20000;
  c.y_depth = 3;
  for (const auto& name : builtin_impurity_names()) {
    const auto rep = lower_bound_experiment(h, builtin_impurity(name), c);
    REQUIRE(rep.rows.size() == 64);
    CHECK(rep.tribes_distance == h.params().p_rest() * Dyadic::half());
    for (std::size_t i = 1; i < rep.rows.size(); ++i) CHECK(rep.rows[i].error <= rep.rows[i - 1].error);
    for (const auto& row : rep.rows) {
      CHECK(row.xi_fraction >= 0.0);
      CHECK(row.xi_fraction <= 1.0);
      CHECK(std::abs(row.error_mc - row.error.to_double()) <= 2 * row.error_mc_ci + 1e-12);
    }
    // At this scale Tribes' variables dominate the early splits, so the
    // greedy error drops well below 0.4 within the budget.
    CHECK(rep.min_error.to_double() < 0.4);
    CHECK(rep.x_queries > 0);
    CHECK(rep.x_queries + rep.y_queries == 63);
  }
}

TEST_CASE("lower bound experiment is deterministic across thread counts") {
  const auto h = choose_params(8, 9);
  LowerBoundConfig c;
  c.budget = 32;
  c.samples = 10000;
  c.threads = 1;
  const auto a = lower_bound_experiment(h, builtin_impurity("entropy"), c);
  c.threads = 4;
  const auto b = lower_bound_experiment(h, builtin_impurity("entropy"), c);
  CHECK(a.to_csv() == b.to_csv());
}
