// Acceptance run: one PASS/FAIL line per criterion.
//
//   acceptance [--only N[,N...]] [--threads T]
//
// Exit status is 0 when every selected criterion passes, 1 otherwise.

#include <chrono>
#include <cstdio>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <thread>

#include <CLI11.hpp>

#include "boolfn.hpp"
#include "experiments.hpp"
#include "grower.hpp"
#include "hardinstance.hpp"
#include "impurity.hpp"
#include "realvalued.hpp"

using namespace topdown;
using nlohmann::json;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

int g_threads = 1;

ResultBundle run_kind(json j) {
  j["threads"] = g_threads;
  return run(ExperimentConfig::from_json(j));
}

/// Passes when every named check in the bundle passes.
Outcome from_checks(const ResultBundle& b, std::initializer_list<const char*> names, std::string extra = {}) {
  Outcome o;
  std::ostringstream d;
  for (const char* nm : names) {
    bool found = false;
    for (const auto& c : b.checks)
      if (c.name == nm) {
        found = true;
        o.pass = o.pass && c.pass;
        d << nm << '=' << (c.pass ? "ok" : "FAIL");
        if (!c.detail.empty()) d << " (" << c.detail << ')';
        d << "; ";
      }
    if (!found) {
      o.pass = false;
      d << nm << "=missing; ";
    }
  }
  d << extra;
  o.detail = d.str();
  return o;
}

bool inf_corr(const BoolFunc& f) {
  for (int i = 1; i <= f.arity(); ++i)
    if (influence(f, {}, i) != Dyadic::from_int(2) * abs(correlation(f, {}, i))) return false;
  return true;
}

Outcome criterion1() {
  std::size_t unate = 0, mismatches = 0;
  for (int n = 1; n <= 4; ++n)
    for (std::uint64_t code = 0; code < (1ULL << (1u << n)); ++code) {
      BoolFunc f(n);
      for (std::uint32_t k = 0; k < f.table_size(); ++k) f.set(k, (code >> k) & 1u);
      if (!is_monotone(f)) continue;
      ++unate;
      if (!inf_corr(f)) ++mismatches;
    }
  std::size_t random = 0;
  for (int n : {6, 8})
    for (std::uint64_t t = 0; t < 1000; ++t) {
      const auto f = random_monotone(n, substream(1, "influence-correlation", t * 16 + n));
      ++random;
      if (!is_monotone(f) || !inf_corr(f)) ++mismatches;
    }
  return {mismatches == 0 && unate == 4 + 14 + 104 + 2170,
          std::to_string(unate) + " unate + " + std::to_string(random) + " random functions, " +
              std::to_string(mismatches) + " mismatches"};
}

Outcome criterion2() {
  Outcome o;
  std::ostringstream d;
  for (const auto& nm : builtin_impurity_names()) {
    const auto g = builtin_impurity(nm);
    const auto rep = verify_strong_concavity(g, 100, 1e-12);
    o.pass = o.pass && rep.pass && rep.min_slack >= -1e-12;
    d << nm << " kappa=" << g.kappa() << " min_slack=" << rep.min_slack << "; ";
  }
  const auto g = builtin_impurity("gini");
  double worst = 0.0;
  for (int i = 0; i <= 100; ++i)
    for (int j = i; j <= 100; ++j) {
      const double a = i / 100.0, b = j / 100.0;
      worst = std::max(worst, std::abs(g((a + b) / 2) - (g(a) + g(b)) / 2 - (g.kappa() / 2) * (b - a) * (b - a)));
    }
  o.pass = o.pass && worst <= 1e-12 && g.kappa() == 2.0 && builtin_impurity("km").kappa() == 1.0 &&
           std::abs(builtin_impurity("entropy").kappa() - 1.0 / std::log(2.0)) <= 1e-15;
  d << "gini max |slack|=" << worst;
  o.detail = d.str();
  return o;
}

Outcome criterion3() {
  return from_checks(run_kind({{"kind", "jz-sweep"}, {"seed", 1}}), {"jz_exhaustive", "jz_random"});
}

ResultBundle& agnostic_bundle() {
  static ResultBundle b = run_kind({{"kind", "agnostic-sweep"}, {"seed", 1}, {"n", 8}, {"trials", 200}});
  return b;
}

std::string agnostic_counts(const ResultBundle& b, bool lb) {
  std::ostringstream d;
  for (const auto& [nm, v] : b.summary["results"]["impurities"].items()) {
    if (lb)
      d << nm << ": " << v["iterations_checked"] << " iterations, " << v["score_lb_checked"] << " score-lb; ";
    else
      d << nm << ": max excess " << v["max_excess_over_opt_plus_eps"] << "; ";
  }
  return d.str();
}

Outcome criterion4() {
  const auto& b = agnostic_bundle();
  return from_checks(b, {"split_inequalities", "score_lower_bound"}, agnostic_counts(b, true));
}

Outcome criterion5() {
  const auto& b = agnostic_bundle();
  return from_checks(b, {"agnostic_guarantee", "never_beats_oracle", "distance_non_increasing"},
                     agnostic_counts(b, false));
}

Outcome criterion6() {
  const auto b = run_kind({{"kind", "realizable"}, {"seed", 1}, {"n", 10}, {"trials", 100}, {"max_leaves", 16},
                           {"eps", 0.05}});
  return from_checks(b, {"reaches_eps", "argmax_agreement"}, "max reach " + b.summary["results"]["max_reach"].dump());
}

Outcome criterion7() {
  Outcome o;
  std::ostringstream d;
  const auto h = choose_params(8, 15);
  const auto& p = h.params();
  o.pass = p.p_full.to_double() == 0.68359375 && p.p_prime.to_double() == 0.4375 &&
           p.p_rest().to_double() == 0.24609375;
  d << "p_full=" << p.p_full.to_string() << " p_prime=" << p.p_prime.to_string()
    << " p_rest=" << p.p_rest().to_string() << "; ";

  // closed form vs the full truth table at l + k = 23
  const auto table = h.to_function();
  const bool e23 = expectation(table) == h.expectation({});
  std::uint64_t full = 0, prime = 0;
  for (std::uint32_t k = 0; k < (1u << 8); ++k) {
    auto x = BoolFunc::point_of(k, 8);
    x.resize(23, Sign(1));
    full += h.tribes(x);
    prime += h.tribes_prime(x);
  }
  const bool freq = Dyadic::ratio(full, 8) == p.p_full && Dyadic::ratio(prime, 8) == p.p_prime;
  const auto half_rest = p.p_rest() * Dyadic::half();
  const bool dist = distance(h.tribes_tree(), h) == half_rest && distance(h.tribes_tree(), table) == half_rest;
  o.pass = o.pass && e23 && freq && dist;
  d << "l+k=23 enumeration " << (e23 && freq ? "ok" : "MISMATCH") << ", dist(f,Tribes)=" << half_rest.to_string()
    << (dist ? " ok" : " MISMATCH") << "; ";

  // exhaustive at l + k <= 14
  std::size_t shapes = 0, bad = 0;
  for (int l = 2; l <= 13; ++l)
    for (int k = 1; l + k <= 14; k += 2) {
      const auto hk = choose_params(l, k);
      const auto f = hk.to_function();
      ++shapes;
      if (expectation(f) != hk.expectation({}) || distance(hk.tribes_tree(), f) != hk.params().p_rest() * Dyadic::half())
        ++bad;
    }

  // 1000 random restrictions at l + k <= 14
  Rng rng(substream(1, "hard-restrictions", 0));
  std::vector<std::pair<HardInstance, BoolFunc>> instances;
  for (const auto& [l, k] : {std::pair{8, 5}, std::pair{8, 3}, std::pair{10, 3}, std::pair{6, 7}, std::pair{4, 9}}) {
    const auto hh = choose_params(l, k);
    instances.emplace_back(hh, hh.to_function());
  }
  std::size_t restrictions = 0, mismatches = 0;
  for (int t = 0; t < 1000; ++t) {
    const auto& [hh, f] = instances[static_cast<std::size_t>(t) % instances.size()];
    const int l = hh.l(), k = hh.k();
    Restriction r;
    for (int i = 1; i <= l + k; ++i)
      if (rng() & 1u) r.fix(i, (rng() & 1u) ? Sign(1) : Sign(-1));
    ++restrictions;
    bool ok = hh.expectation(r) == expectation(f, r);
    for (int i = 1; i <= l + k && ok; ++i)
      if (!r.is_fixed(i)) ok = hh.influence(r, i) == influence(f, r, i);
    if (!ok) ++mismatches;
  }
  o.pass = o.pass && bad == 0 && mismatches == 0;
  d << shapes << " shapes exhaustive (" << bad << " mismatches); " << restrictions << " restrictions ("
    << mismatches << " mismatches)";
  o.detail = d.str();
  return o;
}

Outcome criterion8() {
  const auto b = run_kind({{"kind", "hard"},
                           {"seed", 1},
                           {"l", 8},
                           {"k", 63},
                           {"budget", 256},
                           {"impurities", builtin_impurity_names()},
                           {"samples", 100000},
                           {"confidence", 0.99},
                           {"threshold", 0.35},
                           {"check_separation", true}});
  std::ostringstream d;
  const auto& r = b.summary["results"];
  d << "reference dist=" << r["tribes_distance"].get<std::string>() << "; reported targets "
    << r["asymptotic_targets"].dump();
  return from_checks(b, {"tribes_distance_identity", "separation_gini", "separation_entropy", "separation_km"},
                     d.str());
}

Outcome criterion9() {
  const auto b = run_kind({{"kind", "round-check"}, {"seed", 1}, {"trials", 100}, {"leaves", 64}, {"max_depth", 12},
                           {"eps", 0.1}});
  return from_checks(b, {"rounding_distance", "encoded_tree_agreement"},
                     "w=" + b.summary["results"].value("w", json()).dump());
}

Outcome criterion10() {
  std::size_t functions = 0, runs = 0, mismatched = 0;
  for (std::uint64_t t = 0; t < 10; ++t) {
    const auto f = random_monotone(8, substream(1, "binary-consistency", t));
    ++functions;
    const auto sample = binary_sample(f);
    for (const auto& nm : builtin_impurity_names()) {
      GrowthConfig c;
      c.impurity = builtin_impurity(nm);
      c.budget = 256;
      const auto a = grow(f, c);
      const auto b = grow_real(sample, c, ThresholdPolicy::midpoints());
      ++runs;
      bool same = a.trace.records.size() == b.trace.records.size();
      for (std::size_t k = 0; same && k < a.trace.records.size(); ++k)
        same = a.trace.records[k].leaf_id == b.trace.records[k].leaf_id &&
               a.trace.records[k].query.coord == b.trace.records[k].query.coord;
      if (!same) ++mismatched;
    }
  }
  return {mismatched == 0, std::to_string(functions) + " functions x " + std::to_string(runs / functions) +
                               " impurities, " + std::to_string(mismatched) + " trace mismatches"};
}

struct Criterion {
  int id;
  const char* title;
  double limit_seconds;
  std::function<Outcome()> fn;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance criteria"};
  std::vector<int> only;
  g_threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  app.add_option("--only", only, "criteria to run")->delimiter(',');
  app.add_option("--threads", g_threads, "worker threads")->check(CLI::PositiveNumber);
  CLI11_PARSE(app, argc, argv);
  const std::set<int> selected(only.begin(), only.end());

  const Criterion all[] = {
      {1, "influence equals 2|correlation|", 10, criterion1},
      {2, "strong concavity constants", 1, criterion2},
      {3, "robust OSSS", 60, criterion3},
      {4, "per-split inequalities", 300, criterion4},
      {5, "agnostic guarantee shape", 300, criterion5},
      {6, "realizable growth and argmax agreement", 600, criterion6},
      {7, "hard-instance identities", 300, criterion7},
      {8, "lower-bound separation", 600, criterion8},
      {9, "encoder and rounding", 300, criterion9},
      {10, "binary consistency of grow_real", 60, criterion10},
  };

  bool ok = true;
  for (const auto& c : all) {
    if (!selected.empty() && !selected.count(c.id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = secs <= c.limit_seconds;
    const bool pass = o.pass && in_time;
    ok = ok && pass;
    std::printf("%s criterion %d: %s [%.2fs, limit %.0fs%s] %s\n", pass ? "PASS" : "FAIL", c.id, c.title, secs,
                c.limit_seconds, in_time ? "" : ", over time", o.detail.c_str());
    std::fflush(stdout);
  }
  return ok ? 0 : 1;
}
