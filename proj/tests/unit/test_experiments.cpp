#include <doctest.h>

#include <cstdlib>
#include <cstring>
#include <filesystem>

#include <topdown/topdown.h>

#include "errors.hpp"
#include "experiments.hpp"
#include "helpers.hpp"

using namespace topdown;
using nlohmann::json;

namespace {

json and2_config(int size) {
  return {{"kind", "opt"}, {"function", json::parse(function_spec_json(testing::and2()))}, {"size", size}};
}

}  // namespace

TEST_CASE("opt experiment on AND2") {
  const auto b = run(ExperimentConfig::from_json(and2_config(3)));
  CHECK(b.all_pass());
  CHECK(b.summary["results"]["error"] == "0/1");
  CHECK(b.files.count("witness.json") == 1);
  const auto b1 = run(ExperimentConfig::from_json(and2_config(1)));
  CHECK(b1.summary["results"]["error"] == "1/4");
}

TEST_CASE("small agnostic sweep passes") {
  const json j{{"kind", "agnostic-sweep"}, {"n", 5}, {"trials", 10}, {"sizes", {2, 4}}};
  const auto b = run(ExperimentConfig::from_json(j));
  for (const auto& c : b.checks) CHECK_MESSAGE(c.pass, c.name << ": " << c.detail);
  CHECK(b.all_pass());
  CHECK(b.summary["all_pass"] == true);
}

TEST_CASE("bundles are deterministic for a fixed seed") {
  for (const json& j : {json{{"kind", "grow"}, {"random", {{"n", 6}}}, {"budget", 10}},
                        json{{"kind", "realizable"}, {"n", 6}, {"trials", 5}, {"threads", 3}},
                        json{{"kind", "round-check"}, {"trials", 5}, {"samples", 2000}}}) {
    const auto cfg = ExperimentConfig::from_json(j);
    const auto a = run(cfg);
    const auto b = run(cfg);
    CHECK(a.summary.dump() == b.summary.dump());
    CHECK(a.files == b.files);
    CHECK(a.plotdata == b.plotdata);
  }
  const json t1{{"kind", "realizable"}, {"n", 6}, {"trials", 5}, {"threads", 1}};
  const json t4{{"kind", "realizable"}, {"n", 6}, {"trials", 5}, {"threads", 4}};
  CHECK(run(ExperimentConfig::from_json(t1)).summary.dump() == run(ExperimentConfig::from_json(t4)).summary.dump());
}

TEST_CASE("injected failure") {
  auto j = and2_config(3);
  j["inject_failure"] = true;
  const auto b = run(ExperimentConfig::from_json(j));
  CHECK_FALSE(b.all_pass());
  CHECK(b.checks.back().name == "injected");
}

TEST_CASE("config validation") {
  CHECK_THROWS_AS(ExperimentConfig::from_json(json{{"kind", "opt"}, {"bogus", 1}}), FormatError);
  CHECK_THROWS_AS(ExperimentConfig::from_json(json{{"kind", "teleport"}}), FormatError);
  CHECK_THROWS_AS(ExperimentConfig::from_json(json{{"kind", "opt"}, {"function", "/nonexistent/f.json"}}), FormatError);
  CHECK_THROWS_AS(ExperimentConfig::from_json(json{{"kind", "grow"}, {"impurity", "/nonexistent/g.json"}}), FormatError);
  CHECK_THROWS_AS(ExperimentConfig::from_json(json{{"kind", "opt"}, {"seed", -3}}), FormatError);
  const auto c = ExperimentConfig::from_json(json{{"kind", "hard"}, {"impurity", "entropy"}});
  CHECK(c.params["impurities"] == json::array({"entropy"}));
}

TEST_CASE("bundle writing") {
  const auto dir = std::filesystem::temp_directory_path() / "topdown_bundle_test";
  std::filesystem::remove_all(dir);
  const auto b = run(ExperimentConfig::from_json(json{{"kind", "grow"}, {"random", {{"n", 5}}}, {"budget", 6}}));
  write_bundle(b, dir.string());
  CHECK(std::filesystem::exists(dir / "summary.json"));
  CHECK(std::filesystem::exists(dir / "trace.csv"));
  CHECK(std::filesystem::exists(dir / "plotdata" / "error_vs_size.csv"));
  std::filesystem::remove_all(dir);
}

TEST_CASE("C API smoke test") {
  td_function* f = nullptr;
  REQUIRE(td_function_from_spec(function_spec_json(testing::and2()).c_str(), &f) == TD_OK);
  int n = 0;
  CHECK(td_function_arity(f, &n) == TD_OK);
  CHECK(n == 2);

  char* frac = nullptr;
  td_tree* w = nullptr;
  CHECK(td_opt(f, 3, &frac, &w) == TD_OK);
  CHECK(std::strcmp(frac, "0/1") == 0);
  td_string_free(frac);
  td_tree_free(w);

  td_growth* g = nullptr;
  CHECK(td_grow(f, nullptr, 4, 0, &g) == TD_OK);
  td_growth_free(g);

  CHECK(td_function_arity(nullptr, &n) == TD_ERR_NULL);
  td_function* bad = nullptr;
  CHECK(td_function_from_spec("{not json", &bad) == TD_ERR_FORMAT);
  CHECK(bad == nullptr);
  CHECK(std::strlen(td_last_error()) > 0);
  td_function_free(f);

  char* summary = nullptr;
  CHECK(td_run_experiment(R"({"kind":"opt","random":{"n":3},"size":2,"inject_failure":true})", &summary) ==
        TD_ERR_CHECK_FAILED);
  CHECK(summary != nullptr);
  td_string_free(summary);
}
