#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "errors.hpp"
#include "impurity.hpp"

using namespace topdown;

TEST_CASE("builtin values and constants") {
  const auto gini = builtin_impurity("gini");
  const auto ent = builtin_impurity("entropy");
  const auto km = builtin_impurity("km");
  CHECK(gini(0.5) == 1.0);
  CHECK(gini.kappa() == 2.0);
  CHECK(ent.kappa() == doctest::Approx(1.0 / std::log(2.0)).epsilon(1e-15));
  CHECK(ent.kappa() == doctest::Approx(1.4427).epsilon(1e-4));
  CHECK(km.kappa() == 1.0);
  CHECK(gini(0.25) == 0.75);
  CHECK(ent(0.0) == 0.0);
  CHECK(ent(1.0) == 0.0);
  CHECK(ent(0.5) == 1.0);
  CHECK(km(0.5) == 1.0);
  CHECK(builtin_impurity("kearns-mansour")(0.3) == km(0.3));
  CHECK_THROWS_AS(builtin_impurity("nope"), DomainError);
  CHECK_THROWS_AS(gini(1.5), DomainError);
  CHECK_THROWS_AS(gini(-0.1), DomainError);
}

TEST_CASE("builtins are strongly concave at their constants") {
  for (const auto& name : builtin_impurity_names()) {
    const auto rep = verify_strong_concavity(builtin_impurity(name), 100, 1e-12);
    CHECK_MESSAGE(rep.pass, name);
    CHECK(rep.min_slack >= -1e-12);
    CHECK(rep.pairs_checked > 0);
    CHECK(verify_impurity_shape(builtin_impurity(name), 100).pass);
  }
}

TEST_CASE("gini slack is identically zero") {
  const auto g = builtin_impurity("gini");
  double worst = 0.0;
  for (int i = 0; i <= 100; ++i)
    for (int j = i; j <= 100; ++j) {
      const double a = i / 100.0, b = j / 100.0;
      const double slack = g((a + b) / 2) - (g(a) + g(b)) / 2 - (g.kappa() / 2) * (b - a) * (b - a);
      worst = std::max(worst, std::abs(slack));
    }
  CHECK(worst <= 1e-12);
  // endpoint pair: 1 - 0 - 1 = 0
  CHECK(g(0.5) - (g(0.0) + g(1.0)) / 2 - 1.0 == 0.0);
}

TEST_CASE("entropy with an inflated constant fails") {
  const auto rep = verify_strong_concavity(builtin_impurity("entropy").with_kappa(3.0), 100);
  CHECK_FALSE(rep.pass);
  CHECK(rep.min_slack < 0.0);
}

TEST_CASE("symmetry and normalization") {
  for (const auto& name : builtin_impurity_names()) {
    const auto g = builtin_impurity(name);
    CHECK(g(0.0) == 0.0);
    CHECK(g(1.0) == 0.0);
    CHECK(g(0.5) == 1.0);
    for (int i = 0; i <= 100; ++i) CHECK(std::abs(g(i / 100.0) - g(1 - i / 100.0)) <= 1e-12);
  }
}

TEST_CASE("tabulated impurity") {
  std::vector<std::pair<double, double>> pts;
  for (int i = 0; i <= 20; ++i) {
    const double p = i / 20.0;
    pts.emplace_back(p, 4 * p * (1 - p));
  }
  const auto t = tabulated_impurity("gini-table", pts, 2.0);
  CHECK(t(0.5) == doctest::Approx(1.0));
  CHECK(t(0.525) == doctest::Approx((t(0.5) + t(0.55)) / 2));
  CHECK_FALSE(t.verification_grid().empty());
  CHECK(verify_strong_concavity(t, 100).pass);
  CHECK_THROWS_AS(tabulated_impurity("too-strong", pts, 5.0), DomainError);
  std::vector<std::pair<double, double>> bad{{0, 0}, {0.5, 0.9}, {1, 0}};
  CHECK_THROWS_AS(tabulated_impurity("bad", bad, 0.1), DomainError);

  const auto path = std::filesystem::temp_directory_path() / "topdown_impurity_table.json";
  {
    std::ofstream out(path);
    out << R"({"name":"tri","kappa":0.5,"points":[[0,0],[0.25,0.75],[0.5,1],[0.75,0.75],[1,0]]})";
  }
  const auto loaded = resolve_impurity(path.string());
  CHECK(loaded.name() == "tri");
  CHECK(loaded(0.25) == 0.75);
  std::filesystem::remove(path);
  CHECK_THROWS(resolve_impurity("/nonexistent/table.json"));
}
