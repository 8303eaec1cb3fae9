#include <doctest.h>

#include <cmath>

#include "errors.hpp"
#include "helpers.hpp"
#include "realvalued.hpp"

using namespace topdown;
using testing::and2;

namespace {

std::vector<Sign> signs(std::initializer_list<int> v) {
  std::vector<Sign> out;
  for (int s : v) out.push_back(static_cast<Sign>(s));
  return out;
}

DecisionTree single_split(double theta, bool lo = false, bool hi = true) {
  return DecisionTree(PartialTree(TreeMode::Real).split(0, Query::threshold(1, theta)), {lo, hi});
}

GrowthConfig gini(int budget, bool stop = false) {
  GrowthConfig c;
  c.impurity = builtin_impurity("gini");
  c.budget = budget;
  c.stop_on_zero_gain = stop;
  return c;
}

}  // namespace

TEST_CASE("encode examples") {
  CHECK(encode(0.3, 3) == signs({-1, 1, -1}));
  CHECK(encode(0.0, 3) == signs({-1, -1, -1}));
  CHECK(encode(0.999, 3) == signs({1, 1, 1}));
  CHECK(encode(1.0, 3) == signs({1, 1, 1}));
  CHECK(encode(0.5, 1) == signs({1}));
  CHECK_THROWS_AS(encode(1.5, 3), DomainError);
  CHECK_THROWS_AS(encode(-0.1, 3), DomainError);
  CHECK_THROWS_AS(encode(0.5, 0), DomainError);
  const std::vector<double> x{0.3, 0.0};
  CHECK(encode_point(x, 3) == signs({-1, 1, -1, -1, -1, -1}));
}

TEST_CASE("threshold rounding examples") {
  const auto r = [](double theta, int w) { return round_thresholds(single_split(theta), w).shape().node(0).query.theta; };
  CHECK(r(0.37, 3) == 0.375);
  CHECK(r(0.5, 3) == 0.5);
  CHECK(r(0.0625, 3) == 0.0);
  CHECK(r(0.1875, 3) == 0.25);
  CHECK_THROWS_AS(round_thresholds(single_split(1.2), 3), DomainError);
}

TEST_CASE("encoding is consistent with rounded thresholds") {
  Rng rng(71);
  for (int trial = 0; trial < 2000; ++trial) {
    const int w = 1 + static_cast<int>(uniform_below(rng, 10));
    const double x = uniform01(rng);
    const auto bits = encode(x, w);
    std::uint64_t code = 0;
    for (auto b : bits) code = (code << 1) | (b > 0 ? 1u : 0u);
    CHECK(static_cast<double>(code) == std::floor(x * std::ldexp(1.0, w)));
    const std::uint64_t c = 1 + uniform_below(rng, (1ULL << w) - 1);
    const double theta = std::ldexp(static_cast<double>(c), -w);
    CHECK((x >= theta) == (code >= c));
  }
}

TEST_CASE("cdf examples") {
  const auto u = Cdf::uniform01();
  CHECK(u(0.3) == 0.3);
  CHECK(u(-1.0) == 0.0);
  CHECK(u(2.0) == 1.0);
  const auto t = Cdf::table({{0, 0}, {0.5, 0.25}, {1, 1}});
  CHECK(t(0.5) == 0.25);
  CHECK(t(0.75) == doctest::Approx(0.625));
  CHECK(t.quantile(0.25) == doctest::Approx(0.5));
  CHECK_THROWS_AS(Cdf::table({{0, 0}, {1, 0.5}}), DomainError);
  const auto e = Cdf::empirical({1, 2, 3});
  CHECK(e(2.0) == doctest::Approx(2.0 / 3));
  CHECK(e(0.5) == 0.0);
  CHECK(e(3.0) == 1.0);
}

TEST_CASE("encoded trees agree with their real-valued source") {
  Rng rng(73);
  for (int t = 0; t < 5; ++t) {
    const auto tree = round_thresholds(random_balanced_tree(3, 16, 8, rng), 5);
    // thresholds at 1 would need a 6th bit; the generator draws from (0,1)
    const auto enc = encoded_tree(tree, 3, 5);
    for (int i = 0; i < 10000; ++i) {
      std::vector<double> x{uniform01(rng), uniform01(rng), uniform01(rng)};
      REQUIRE(enc.evaluate(std::span<const Sign>(encode_point(x, 5))) == tree.evaluate(std::span<const double>(x)));
    }
  }
}

TEST_CASE("cdf transform of continuous samples is uniform") {
  const auto d = ProductDistribution({Cdf::table({{0, 0}, {0.2, 0.5}, {3, 1}})});
  Rng rng(79);
  std::vector<double> u;
  for (int i = 0; i < 100000; ++i) u.push_back(cdf_transform(d, d.sample(rng))[0]);
  // 99% critical value sqrt(-ln(0.005)/2)/sqrt(N)
  CHECK(ks_uniform_statistic(u) < 1.63 / std::sqrt(100000.0));
}

TEST_CASE("estimate_dist examples") {
  const auto d = ProductDistribution::uniform(1);
  const auto a = single_split(0.5);
  const auto same = estimate_dist(a, a, d, 10000, 1);
  CHECK(same.estimate == 0.0);
  const auto flip = estimate_dist(a, single_split(0.5, true, false), d, 10000, 1);
  CHECK(flip.estimate == 1.0);
  const auto shifted = estimate_dist(a, single_split(0.6), d, 100000, 2);
  CHECK(std::abs(shifted.estimate - 0.1) <= shifted.half_width());
}

TEST_CASE("real-valued growth on the binary cube matches Boolean growth") {
  Rng rng(83);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 2 + static_cast<int>(uniform_below(rng, 5));
    const auto f = random_function(n, rng(), uniform01(rng));
    const auto b = grow(f, gini(8));
    const auto r = grow_real(binary_sample(f), gini(8), ThresholdPolicy::midpoints());
    REQUIRE(b.trace.records.size() == r.trace.records.size());
    for (std::size_t k = 0; k < b.trace.records.size(); ++k) {
      CHECK(b.trace.records[k].query.coord == r.trace.records[k].query.coord);
      CHECK(r.trace.records[k].query.theta == 0.5);
      CHECK(b.trace.records[k].distance == doctest::Approx(r.trace.records[k].distance).epsilon(1e-12));
    }
  }
}

TEST_CASE("grid growth finds a step") {
  const auto d = ProductDistribution::uniform(2);
  const auto s = sample_labeled([](std::span<const double> x) { return x[0] >= 0.7; }, d, 20000, 5);
  const auto r = grow_real(s, gini(2), ThresholdPolicy::grid(4), d);
  REQUIRE(r.trace.records.size() == 1);
  const auto q = r.trace.records[0].query;
  CHECK(q.coord == 1);
  CHECK((q.theta == 0.6875 || q.theta == 0.75));
  CHECK(r.trace.threshold_bits == 4);
}

TEST_CASE("stop on zero gain with constant labels") {
  const auto d = ProductDistribution::uniform(3);
  const auto s = sample_labeled([](std::span<const double>) { return true; }, d, 500, 7);
  const auto r = grow_real(s, gini(16, true), ThresholdPolicy::midpoints());
  CHECK(r.trace.final_size() == 1);
  CHECK(r.trace.initial_distance == 0.0);
}

TEST_CASE("growth distance is non-increasing on sampled data") {
  const auto d = ProductDistribution::uniform(4);
  const auto s =
      sample_labeled([](std::span<const double> x) { return x[0] + x[1] * x[2] > 0.8; }, d, 3000, 11);
  for (const auto& policy : {ThresholdPolicy::midpoints(), ThresholdPolicy::grid(6)}) {
    const auto r = grow_real(s, gini(24), policy);
    for (std::size_t k = 1; k < r.trace.final_size(); ++k) CHECK(r.trace.distance_at(k) <= r.trace.distance_at(k - 1) + 1e-12);
  }
}

TEST_CASE("dataset and distribution parsing") {
  const auto s = parse_dataset_csv("a,b,label\n0.1,2,1\n0.5,3,0\n0.9,1,1\n");
  CHECK(s.n == 2);
  CHECK(s.size() == 3);
  CHECK(s.names == std::vector<std::string>{"a", "b"});
  CHECK(s.column(2) == std::vector<double>{2, 3, 1});
  CHECK(s.y == std::vector<std::uint8_t>{1, 0, 1});
  const auto back = parse_dataset_csv(dataset_csv(s));
  CHECK(back.x == s.x);
  CHECK(back.y == s.y);
  CHECK_THROWS_AS(parse_dataset_csv("a,label\n0.1,2\n"), FormatError);
  CHECK_THROWS_AS(parse_dataset_csv("a,label\n0.1\n"), FormatError);

  const auto d = parse_distribution(R"(["uniform01", {"cdf_table": [[0,0],[1,1]]}, {"empirical": "b"}])", &s);
  CHECK(d.dimension() == 3);
  CHECK(d.coord(3)(2.0) == doctest::Approx(2.0 / 3));
  CHECK_THROWS_AS(parse_distribution(R"([{"empirical": "zz"}])", &s), FormatError);
  CHECK_THROWS(parse_distribution("[{\"bogus\": 1}]"));

  CHECK(ThresholdPolicy::parse("midpoints").kind == ThresholdPolicy::Kind::Midpoints);
  CHECK(ThresholdPolicy::parse("grid:6").w == 6);
  CHECK_THROWS(ThresholdPolicy::parse("grid:x"));
  CHECK_THROWS(ThresholdPolicy::parse("quartiles"));

  const auto bs = binary_sample(and2());
  CHECK(bs.size() == 4);
  CHECK(bs.y == std::vector<std::uint8_t>{0, 0, 0, 1});
}
