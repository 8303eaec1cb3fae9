#include <doctest.h>

#include "errors.hpp"
#include "helpers.hpp"
#include "oracle.hpp"
#include "realvalued.hpp"
#include "tree.hpp"

using namespace topdown;
using testing::and2;
using testing::dy;
using testing::parity2;

namespace {

PartialTree root_x1() { return PartialTree().split(0, Query::binary(1)); }
PartialTree full2() { return root_x1().split(0, Query::binary(2)).split(2, Query::binary(2)); }

}  // namespace

TEST_CASE("complete examples") {
  const auto c0 = complete(PartialTree(), and2());
  CHECK(c0.size() == 1);
  CHECK(c0.label(0) == false);

  const auto c1 = complete(root_x1(), and2());
  CHECK(c1.label(0) == false);  // x1 = -1
  CHECK(c1.label(1) == true);   // x1 = +1, E = 1/2 rounds up

  const auto cp = complete(full2(), parity2());
  CHECK(distance(cp, parity2()) == Dyadic::zero());
  CHECK(cp.to_function(2) == parity2());
}

TEST_CASE("distance examples") {
  CHECK(distance(complete(root_x1(), and2()), and2()) == dy(1, 2));
  CHECK(distance(DecisionTree::constant(false), and2()) == dy(1, 2));
  CHECK(distance(complete(full2(), parity2()), parity2()) == Dyadic::zero());
}

TEST_CASE("split examples") {
  const PartialTree empty;
  const auto t = empty.split(0, Query::binary(1));
  CHECK(empty.size() == 1);
  CHECK(t.size() == 2);
  CHECK(t.depth() == 1);
  CHECK(t.split(0, Query::binary(2)).split(2, Query::binary(3)).size() == 4);
  CHECK_THROWS_AS((void)t.split(0, Query::binary(1)), DomainError);
  CHECK_THROWS_AS((void)t.split(5, Query::binary(2)), DomainError);
  CHECK_THROWS_AS((void)t.split(0, Query::binary(0)), DomainError);
}

TEST_CASE("leaf ids are preorder positions with lo first") {
  auto t = root_x1().split(1, Query::binary(2));
  // leaves: x1=-1 (id 0), x1=+1,x2=-1 (id 1), x1=+1,x2=+1 (id 2)
  CHECK(t.restriction_of(t.leaf_node(0)) == Restriction{}.with(1, -1));
  CHECK(t.restriction_of(t.leaf_node(1)) == Restriction{}.with(1, 1).with(2, -1));
  CHECK(t.restriction_of(t.leaf_node(2)) == Restriction{}.with(1, 1).with(2, 1));
  CHECK(t.leaf_depth(0) == 1);
  CHECK(t.leaf_depth(2) == 2);
}

TEST_CASE("path_of examples") {
  const auto d1 = complete(root_x1(), and2());
  const std::vector<Sign> x{1, -1};
  const auto p = d1.path_of(std::span<const Sign>(x));
  REQUIRE(p.steps.size() == 1);
  CHECK(p.steps[0].answer == true);
  CHECK(p.leaf_id == 1);
  CHECK(p.label == d1.evaluate(std::span<const Sign>(x)));

  const auto c0 = complete(PartialTree(), and2());
  CHECK(c0.path_of(std::span<const Sign>(x)).steps.empty());

  const auto cp = complete(full2(), parity2());
  for (std::uint32_t k = 0; k < 4; ++k) {
    const auto y = BoolFunc::point_of(k, 2);
    CHECK(cp.path_of(std::span<const Sign>(y)).steps.size() == 2);
  }
}

TEST_CASE("real-valued trees") {
  PartialTree t(TreeMode::Real);
  t = t.split(0, Query::threshold(1, 0.5)).split(1, Query::threshold(1, 0.75));
  const DecisionTree d(t, {false, true, false});
  const std::vector<double> a{0.2}, b{0.6}, c{0.75};
  CHECK(d.evaluate(std::span<const double>(a)) == false);
  CHECK(d.evaluate(std::span<const double>(b)) == true);
  CHECK(d.evaluate(std::span<const double>(c)) == false);
  CHECK_THROWS_AS((void)PartialTree(TreeMode::Real).split(0, Query::binary(1)), DomainError);
}

TEST_CASE("tree json round trip") {
  Rng rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    const auto d = random_labeled_tree(6, 1 + static_cast<int>(uniform_below(rng, 20)), rng);
    const auto back = parse_tree_json(tree_json(d));
    CHECK(tree_json(back) == tree_json(d));
    CHECK(back.to_function(6) == d.to_function(6));
  }
  for (int trial = 0; trial < 20; ++trial) {
    const auto d = random_balanced_tree(3, 10, 6, rng);
    CHECK(tree_json(parse_tree_json(tree_json(d))) == tree_json(d));
  }
  CHECK_THROWS_AS(parse_tree_json(R"({"q":1,"lo":{"label":0}})"), FormatError);
  CHECK_THROWS_AS(parse_tree_json(R"({"q":1,"lo":{"label":0},"hi":{"q":1,"lo":{"label":0},"hi":{"label":1}}})"),
                  FormatError);
  CHECK_THROWS_AS(parse_tree_json(R"({"label":2})"), FormatError);
}

TEST_CASE("splits cannot increase error") {
  Rng rng(17);
  for (int trial = 0; trial < 300; ++trial) {
    const int n = 2 + static_cast<int>(uniform_below(rng, 6));
    const auto f = random_function(n, rng(), uniform01(rng));
    const auto t = random_partial_tree(n, 1 + static_cast<int>(uniform_below(rng, 10)), rng);
    const auto before = distance(complete(t, f), f);
    const int leaf = static_cast<int>(uniform_below(rng, static_cast<std::uint64_t>(t.size())));
    const auto r = t.restriction_of(t.leaf_node(leaf));
    for (int i = 1; i <= n; ++i) {
      if (r.is_fixed(i)) continue;
      const auto after = distance(complete(t.split(leaf, Query::binary(i)), f), f);
      CHECK(after <= before);
    }
  }
}

TEST_CASE("completion error is the reach-weighted sum of leaf biases") {
  Rng rng(23);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 2 + static_cast<int>(uniform_below(rng, 7));
    const auto f = random_function(n, rng(), uniform01(rng));
    const auto t = random_partial_tree(n, 1 + static_cast<int>(uniform_below(rng, 12)), rng);
    Dyadic sum;
    for (int id = 0; id < t.size(); ++id)
      sum += bias(f, t.restriction_of(t.leaf_node(id))).scaled(t.leaf_depth(id));
    CHECK(distance(complete(t, f), f) == sum);
  }
}

TEST_CASE("the completion is an optimal labeling") {
  Rng rng(29);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 3 + static_cast<int>(uniform_below(rng, 4));
    const auto f = random_function(n, rng(), uniform01(rng));
    const auto t = random_partial_tree(n, 1 + static_cast<int>(uniform_below(rng, 8)), rng);
    const auto rep = optimal_labeling_check(t, f);
    CHECK(rep.pass);
    CHECK(rep.labelings == (1ULL << t.size()));
    CHECK(rep.completion_error == rep.min_error);
  }
}
