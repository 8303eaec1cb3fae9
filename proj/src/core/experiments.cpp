#include "experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "boolfn.hpp"
#include "errors.hpp"
#include "grower.hpp"
#include "hardinstance.hpp"
#include "impurity.hpp"
#include "oracle.hpp"
#include "realvalued.hpp"
#include "rng.hpp"
#include "tree.hpp"

#ifndef TOPDOWN_VERSION
#define TOPDOWN_VERSION "0.0.0"
#endif

namespace topdown {

using ojson = nlohmann::ordered_json;

const char* version_string() { return TOPDOWN_VERSION; }

namespace {

// ---------------------------------------------------------------------------
// Config defaults

ojson defaults_for(const std::string& kind) {
  if (kind == "grow")
    return {{"function", nullptr}, {"random", nullptr},  {"impurity", "gini"},
            {"budget", 16},        {"stop_on_zero_gain", false}, {"monitor", nullptr}};
  if (kind == "opt") return {{"function", nullptr}, {"random", nullptr}, {"size", 2}};
  if (kind == "jz-sweep")
    return {{"exhaustive_n", 3}, {"exhaustive_max_leaves", 4}, {"random_pairs", 10000},
            {"min_n", 2},        {"max_n", 6},                 {"max_leaves", 16}};
  if (kind == "agnostic-sweep")
    return {{"n", 8},       {"trials", 200}, {"sizes", {2, 4, 8}}, {"eps", 0.1},
            {"budget", nullptr}, {"impurities", builtin_impurity_names()}, {"generator", "dnf"}, {"density", 0.5}};
  if (kind == "hard")
    return {{"l", 8},         {"k", 15},          {"impurities", {"gini"}}, {"budget", 64},
            {"samples", 100000}, {"y_depth", 1},  {"threshold", 0.35},      {"confidence", 0.99},
            {"check_separation", false}};
  if (kind == "realizable")
    return {{"n", 10}, {"trials", 100}, {"max_leaves", 16}, {"eps", 0.05}, {"budget", nullptr},
            {"impurities", builtin_impurity_names()}};
  if (kind == "grow-real")
    return {{"data", nullptr},     {"function", nullptr},  {"random", nullptr}, {"distribution", nullptr},
            {"impurity", "gini"},  {"budget", 16},         {"thresholds", "midpoints"},
            {"stop_on_zero_gain", false}, {"compare_binary", true}};
  if (kind == "round-check")
    return {{"trials", 100},  {"n", 8},         {"leaves", 64},       {"max_depth", 12}, {"eps", 0.1},
            {"w", nullptr},   {"samples", 10000}, {"confidence", 0.99},
            {"encode_check", {{"trees", 5}, {"leaves", 16}, {"n", 3}, {"w", 5}, {"max_depth", 8}, {"inputs", 10000}}}};
  if (kind == "verify-impurity")
    return {{"impurities", builtin_impurity_names()}, {"resolution", 100}, {"tolerance", 1e-12}, {"kappa", nullptr}};
  throw FormatError("unknown experiment kind '" + kind + "'");
}

void require_file(const ojson& v, const std::string& key) {
  if (!v.is_string()) return;
  const auto path = v.get<std::string>();
  if (!std::filesystem::exists(path)) throw FormatError(key + ": file not found: " + path);
}

bool is_builtin_impurity(const std::string& name) {
  const auto names = builtin_impurity_names();
  return std::find(names.begin(), names.end(), name) != names.end() || name == "kearns-mansour" ||
         name == "influence";
}

void require_impurity(const ojson& v, const std::string& key) {
  auto one = [&](const ojson& e) {
    if (!e.is_string()) throw FormatError(key + ": expected an impurity name or file path");
    if (!is_builtin_impurity(e.get<std::string>())) require_file(e, key);
  };
  if (v.is_array())
    for (const auto& e : v) one(e);
  else
    one(v);
}

// ---------------------------------------------------------------------------
// Helpers

template <typename T>
T param(const ExperimentConfig& cfg, const char* key) {
  const auto& v = cfg.params.at(key);
  try {
    return v.get<T>();
  } catch (const nlohmann::json::exception&) {
    throw FormatError(std::string("parameter '") + key + "' has the wrong type");
  }
}

int positive_int(const ExperimentConfig& cfg, const char* key, int lo = 1) {
  const int v = param<int>(cfg, key);
  if (v < lo) throw FormatError(std::string("parameter '") + key + "' must be >= " + std::to_string(lo));
  return v;
}

void add_check(ResultBundle& b, std::string name, bool pass, std::string detail = {}) {
  b.checks.push_back({std::move(name), pass, std::move(detail)});
}

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// Runs body(i) for i in [0, count) on `threads` workers; results must be
/// stored by index so the merge order does not depend on scheduling.
void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& body) {
  const auto workers = static_cast<std::size_t>(std::clamp(threads, 1, 256));
  if (workers == 1 || count < 2) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < std::min(workers, count); ++w)
    pool.emplace_back([&] {
      for (;;) {
        const auto i = next.fetch_add(1);
        if (i >= count) return;
        try {
          body(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
          next = count;
        }
      }
    });
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

BoolFunc function_from_params(const ExperimentConfig& cfg) {
  const auto& fn = cfg.params.at("function");
  if (fn.is_string()) return load_function_spec(fn.get<std::string>());
  if (fn.is_object()) return parse_function_spec(fn.dump());
  const auto& rnd = cfg.params.at("random");
  if (rnd.is_object()) {
    const int n = rnd.value("n", 8);
    const auto seed = rnd.value("seed", cfg.seed);
    if (rnd.value("monotone", true)) {
      MonotoneGenOptions o;
      o.density = rnd.value("density", 0.5);
      return random_monotone(n, substream(seed, "function"), o);
    }
    return random_function(n, substream(seed, "function"), rnd.value("density", 0.5));
  }
  throw FormatError("no function given (set 'function' to a spec file or object, or 'random')");
}

std::optional<ImpuritySpec> impurity_or_influence(const std::string& name) {
  if (name == "influence") return std::nullopt;
  return resolve_impurity(name);
}

std::vector<std::string> impurity_list(const ExperimentConfig& cfg) {
  const auto& v = cfg.params.at("impurities");
  if (v.is_string()) return {v.get<std::string>()};
  auto out = v.get<std::vector<std::string>>();
  if (out.empty()) throw FormatError("'impurities' must not be empty");
  return out;
}

int ceil_log2(long long v) {
  int r = 0;
  while ((1LL << r) < v) ++r;
  return r;
}

bool non_increasing(const GrowthTrace& t) {
  for (std::size_t k = 1; k < t.final_size(); ++k)
    if (t.distance_at(k) > t.distance_at(k - 1)) return false;
  return true;
}

std::string error_vs_size_csv(const std::vector<const GrowthTrace*>& traces) {
  std::ostringstream out;
  out << "size,distance,series\n";
  for (const auto* t : traces)
    for (std::size_t k = 0; k < t->final_size(); ++k)
      out << k + 1 << ',' << fmt_double(t->distance_at(k)) << ',' << t->criterion << '\n';
  return out.str();
}

// ---------------------------------------------------------------------------
// grow

void run_grow(const ExperimentConfig& cfg, ResultBundle& b) {
  const BoolFunc f = function_from_params(cfg);
  const auto crit = param<std::string>(cfg, "impurity");
  GrowthConfig gc;
  gc.impurity = impurity_or_influence(crit);
  gc.budget = positive_int(cfg, "budget");
  gc.stop_on_zero_gain = param<bool>(cfg, "stop_on_zero_gain");
  const auto res = grow(f, gc);
  const auto& tr = res.trace;

  auto& r = b.summary["results"];
  r["arity"] = f.arity();
  r["criterion"] = tr.criterion;
  r["budget"] = gc.budget;
  r["final_size"] = tr.final_size();
  r["distance"] = tr.exact_distance_at(tr.records.size()).to_string();
  r["distance_value"] = tr.distance_at(tr.records.size());
  b.files["trace.csv"] = tr.to_csv();
  b.files["tree.json"] = tree_json(res.completion);
  add_check(b, "distance_non_increasing", non_increasing(tr));

  b.plotdata["error_vs_size.csv"] = error_vs_size_csv({&tr});
  if (gc.impurity) {
    std::ostringstream pot;
    pot << "iter,g_impurity,series\n";
    for (std::size_t k = 0; k < tr.final_size(); ++k)
      pot << k << ',' << fmt_double(tr.g_impurity_at(k)) << ',' << tr.criterion << '\n';
    b.plotdata["potential.csv"] = pot.str();
  } else {
    std::ostringstream pot;
    pot << "iter,u_f,series\n";
    if (tr.initial_u_f) pot << "0," << fmt_double(tr.initial_u_f->to_double()) << ",influence\n";
    for (const auto& rec : tr.records)
      if (rec.u_f) pot << rec.iter << ',' << fmt_double(rec.u_f->to_double()) << ",influence\n";
    b.plotdata["potential.csv"] = pot.str();
  }

  const auto& mon = cfg.params.at("monitor");
  if (mon.is_object()) {
    if (!gc.impurity) throw FormatError("a monitor needs an impurity criterion");
    const int s = mon.value("s", 2);
    const double eps = mon.value("eps", 0.1);
    const OptTable table(f, s);
    const Monitor m{s, eps, table.error(s)};
    const auto rep = verify_split_inequalities(tr, f, *gc.impurity, m);
    r["opt_s"] = m.opt_s.to_string();
    r["monitor"] = {{"s", s}, {"eps", eps}};
    r["score_lb_checked"] = rep.score_lb_checked;
    r["score_lb_failed"] = rep.score_lb_failed;
    std::size_t bad = 0;
    for (const auto& it : rep.iterations) bad += it.pass() ? 0 : 1;
    add_check(b, "split_inequalities", rep.pass(),
              std::to_string(bad) + " failing iterations of " + std::to_string(rep.iterations.size()));
    const bool within = tr.distance_at(tr.records.size()) <= m.opt_s.to_double() + eps;
    r["within_opt_plus_eps"] = within;
    std::ostringstream gb;
    gb << "iter,gain,bound,tight_bound,applies\n";
    for (const auto& it : rep.iterations)
      gb << it.iter << ',' << fmt_double(it.gain) << ',' << fmt_double(it.score_lb_bound) << ','
         << fmt_double(it.score_lb_tight_bound) << ',' << (it.score_lb_applies ? 1 : 0) << '\n';
    b.plotdata["gain_vs_bound.csv"] = gb.str();
  }
}

// ---------------------------------------------------------------------------
// opt

void run_opt(const ExperimentConfig& cfg, ResultBundle& b) {
  const BoolFunc f = function_from_params(cfg);
  const int s = positive_int(cfg, "size");
  const auto res = opt(f, s);
  auto& r = b.summary["results"];
  r["arity"] = f.arity();
  r["size"] = s;
  r["error"] = res.error.to_string();
  r["error_value"] = res.error.to_double();
  r["witness_size"] = res.witness.size();
  b.files["witness.json"] = tree_json(res.witness);
  const auto d = distance(res.witness, f);
  add_check(b, "witness_error", d == res.error && res.witness.size() <= s,
            "witness distance " + d.to_string() + ", size " + std::to_string(res.witness.size()));
}

// ---------------------------------------------------------------------------
// jz-sweep

void run_jz(const ExperimentConfig& cfg, ResultBundle& b) {
  const int en = positive_int(cfg, "exhaustive_n", 0);
  const int eleaves = positive_int(cfg, "exhaustive_max_leaves", 0);
  const int pairs = positive_int(cfg, "random_pairs", 0);
  const int min_n = positive_int(cfg, "min_n");
  const int max_n = positive_int(cfg, "max_n");
  const int max_leaves = positive_int(cfg, "max_leaves", 2);
  if (min_n > max_n || max_n > 16) throw FormatError("jz-sweep needs 1 <= min_n <= max_n <= 16");
  if (en > 4) throw FormatError("exhaustive_n above 4 is not enumerable");

  std::uint64_t ex_pairs = 0, ex_violations = 0;
  std::vector<std::string> examples;
  double min_margin = std::numeric_limits<double>::infinity();
  if (en >= 1 && eleaves >= 2) {
    std::vector<DecisionTree> trees;
    for (const auto& shape : enumerate_trees(en, eleaves)) {
      if (shape.size() < 2) continue;
      for (std::uint32_t lab = 0; lab < (1u << shape.size()); ++lab) {
        std::vector<bool> labels(static_cast<std::size_t>(shape.size()));
        for (int i = 0; i < shape.size(); ++i) labels[i] = (lab >> i) & 1u;
        trees.emplace_back(shape, labels);
      }
    }
    const std::uint64_t funcs = 1ULL << (1u << en);
    std::vector<std::uint64_t> viol(funcs), count(funcs);
    std::vector<double> margin(funcs, std::numeric_limits<double>::infinity());
    parallel_for(funcs, cfg.threads, [&](std::size_t code) {
      BoolFunc f(en);
      for (std::uint32_t k = 0; k < f.table_size(); ++k) f.set(k, (code >> k) & 1u);
      for (const auto& g : trees) {
        const auto rep = verify_jz(f, g);
        ++count[code];
        margin[code] = std::min(margin[code], rep.lhs - rep.rhs);
        if (!rep.pass) ++viol[code];
      }
    });
    for (std::uint64_t c = 0; c < funcs; ++c) {
      ex_pairs += count[c];
      ex_violations += viol[c];
      min_margin = std::min(min_margin, margin[c]);
      if (viol[c] && examples.size() < 5) examples.push_back("exhaustive f=" + std::to_string(c));
    }
  }

  std::vector<std::uint8_t> rviol(static_cast<std::size_t>(pairs));
  std::vector<double> rmargin(static_cast<std::size_t>(pairs));
  parallel_for(static_cast<std::size_t>(pairs), cfg.threads, [&](std::size_t i) {
    Rng rng(substream(cfg.seed, "jz", i));
    const int n = min_n + static_cast<int>(uniform_below(rng, static_cast<std::uint64_t>(max_n - min_n + 1)));
    const int cap = std::min(max_leaves, 1 << n);
    if (cap < 2) return;
    const int size = 2 + static_cast<int>(uniform_below(rng, static_cast<std::uint64_t>(cap - 1)));
    const BoolFunc f = random_function(n, rng(), uniform01(rng));
    const DecisionTree g = random_labeled_tree(n, size, rng);
    const auto rep = verify_jz(f, g);
    rviol[i] = rep.pass ? 0 : 1;
    rmargin[i] = rep.lhs - rep.rhs;
  });
  std::uint64_t r_violations = 0;
  for (int i = 0; i < pairs; ++i) {
    r_violations += rviol[i];
    min_margin = std::min(min_margin, rmargin[i]);
    if (rviol[i] && examples.size() < 10) examples.push_back("random pair " + std::to_string(i));
  }

  auto& r = b.summary["results"];
  r["exhaustive_pairs"] = ex_pairs;
  r["exhaustive_violations"] = ex_violations;
  r["random_pairs"] = pairs;
  r["random_violations"] = r_violations;
  r["min_margin"] = std::isfinite(min_margin) ? ojson(min_margin) : ojson(nullptr);
  r["violation_examples"] = examples;
  add_check(b, "jz_exhaustive", ex_violations == 0, std::to_string(ex_pairs) + " pairs");
  add_check(b, "jz_random", r_violations == 0, std::to_string(pairs) + " pairs");
}

// ---------------------------------------------------------------------------
// agnostic-sweep

struct AgnosticImpurityOutcome {
  std::size_t iterations = 0;
  std::size_t iteration_failures = 0;
  std::size_t lb_checked = 0;
  std::size_t lb_failed = 0;
  std::size_t guarantee_failures = 0;
  std::size_t oracle_beaten = 0;
  bool non_increasing = true;
  double max_excess = -1.0;  // max of distance - opt_s - eps
  std::vector<double> err_at_s;
  double final_distance = 0.0;
  std::string first_failure;
};

struct AgnosticTrial {
  std::vector<Dyadic> opt_s;
  std::vector<int> budgets;
  std::vector<AgnosticImpurityOutcome> per_impurity;
};

void run_agnostic(const ExperimentConfig& cfg, ResultBundle& b) {
  const int n = positive_int(cfg, "n");
  if (n > OptTable::kMaxArity) throw FormatError("agnostic-sweep needs n <= 12 for the exact oracle");
  const int trials = positive_int(cfg, "trials", 0);
  const auto sizes = param<std::vector<int>>(cfg, "sizes");
  const double eps = param<double>(cfg, "eps");
  const int full = cfg.params.at("budget").is_null() ? (1 << n) : std::min(positive_int(cfg, "budget"), 1 << n);
  const auto names = impurity_list(cfg);
  std::vector<ImpuritySpec> specs;
  for (const auto& nm : names) specs.push_back(resolve_impurity(nm));
  for (int s : sizes)
    if (s < 2 || s > full) throw FormatError("sizes must lie in [2, budget]");
  MonotoneGenOptions gen;
  const auto strategy = param<std::string>(cfg, "generator");
  if (strategy == "dnf")
    gen.strategy = MonotoneStrategy::Dnf;
  else if (strategy == "upward")
    gen.strategy = MonotoneStrategy::UpwardClosure;
  else
    throw FormatError("generator must be 'dnf' or 'upward'");
  gen.density = param<double>(cfg, "density");

  std::vector<AgnosticTrial> out(static_cast<std::size_t>(trials));
  parallel_for(out.size(), cfg.threads, [&](std::size_t t) {
    const BoolFunc f = random_monotone(n, substream(cfg.seed, "agnostic", t), gen);
    const OptTable table(f, full);
    auto& tr = out[t];
    for (int s : sizes) {
      tr.opt_s.push_back(table.error(s));
      const int L = ceil_log2(s);
      long long bud = 1;
      for (int i = 0; i < L && bud < full; ++i) bud *= s;
      tr.budgets.push_back(static_cast<int>(std::min<long long>(bud, full)));
    }
    for (const auto& spec : specs) {
      GrowthConfig gc;
      gc.impurity = spec;
      gc.budget = full;
      const auto res = grow(f, gc);
      const auto& trace = res.trace;
      AgnosticImpurityOutcome o;
      o.non_increasing = non_increasing(trace);
      o.final_distance = trace.distance_at(trace.records.size());
      for (std::size_t k = 0; k < trace.final_size(); ++k)
        if (trace.exact_distance_at(k) < table.error(static_cast<int>(k) + 1)) {
          ++o.oracle_beaten;
          if (o.first_failure.empty()) o.first_failure = "beats oracle at size " + std::to_string(k + 1);
        }
      for (std::size_t si = 0; si < sizes.size(); ++si) {
        const int s = sizes[si];
        const Monitor m{s, eps, tr.opt_s[si]};
        const auto rep = verify_split_inequalities(trace, f, spec, m);
        o.iterations += rep.iterations.size();
        for (const auto& it : rep.iterations)
          if (!it.pass()) {
            ++o.iteration_failures;
            if (o.first_failure.empty())
              o.first_failure = "s=" + std::to_string(s) + " iteration " + std::to_string(it.iter);
          }
        if (!rep.claim1 || !rep.initial_claim2) {
          ++o.iteration_failures;
          if (o.first_failure.empty()) o.first_failure = "initial potential check";
        }
        o.lb_checked += rep.score_lb_checked;
        o.lb_failed += rep.score_lb_failed;
        const double bound = tr.opt_s[si].to_double() + eps;
        const std::size_t at_s = std::min<std::size_t>(static_cast<std::size_t>(tr.budgets[si]) - 1, trace.records.size());
        const double d_s = trace.distance_at(at_s);
        o.err_at_s.push_back(d_s);
        for (double d : {d_s, o.final_distance}) {
          o.max_excess = std::max(o.max_excess, d - bound);
          if (d > bound) {
            ++o.guarantee_failures;
            if (o.first_failure.empty()) o.first_failure = "s=" + std::to_string(s) + " distance above opt_s + eps";
          }
        }
      }
      tr.per_impurity.push_back(std::move(o));
    }
  });

  std::ostringstream rows;
  rows << "trial,s,budget,opt_s";
  for (const auto& nm : names) rows << ",err_" << nm;
  rows << '\n';
  for (int t = 0; t < trials; ++t)
    for (std::size_t si = 0; si < sizes.size(); ++si) {
      rows << t << ',' << sizes[si] << ',' << out[t].budgets[si] << ',' << fmt_double(out[t].opt_s[si].to_double());
      for (const auto& o : out[t].per_impurity) rows << ',' << fmt_double(o.err_at_s[si]);
      rows << '\n';
    }
  b.files["agnostic.csv"] = rows.str();
  b.plotdata["agnostic.csv"] = rows.str();

  auto& r = b.summary["results"];
  r["n"] = n;
  r["trials"] = trials;
  r["budget"] = full;
  r["sizes"] = sizes;
  r["eps"] = eps;
  bool ineq = true, lb = true, guar = true, beat = true, noninc = true;
  for (std::size_t i = 0; i < names.size(); ++i) {
    AgnosticImpurityOutcome tot;
    std::string first;
    for (int t = 0; t < trials; ++t) {
      const auto& o = out[t].per_impurity[i];
      tot.iterations += o.iterations;
      tot.iteration_failures += o.iteration_failures;
      tot.lb_checked += o.lb_checked;
      tot.lb_failed += o.lb_failed;
      tot.guarantee_failures += o.guarantee_failures;
      tot.oracle_beaten += o.oracle_beaten;
      tot.non_increasing = tot.non_increasing && o.non_increasing;
      tot.max_excess = t == 0 ? o.max_excess : std::max(tot.max_excess, o.max_excess);
      if (first.empty() && !o.first_failure.empty()) first = "trial " + std::to_string(t) + ": " + o.first_failure;
    }
    r["impurities"][names[i]] = {{"iterations_checked", tot.iterations},
                                 {"iteration_failures", tot.iteration_failures},
                                 {"score_lb_checked", tot.lb_checked},
                                 {"score_lb_failed", tot.lb_failed},
                                 {"guarantee_failures", tot.guarantee_failures},
                                 {"oracle_beaten", tot.oracle_beaten},
                                 {"distance_non_increasing", tot.non_increasing},
                                 {"max_excess_over_opt_plus_eps", tot.max_excess},
                                 {"first_failure", first}};
    ineq = ineq && tot.iteration_failures == 0;
    lb = lb && tot.lb_failed == 0;
    guar = guar && tot.guarantee_failures == 0;
    beat = beat && tot.oracle_beaten == 0;
    noninc = noninc && tot.non_increasing;
  }
  add_check(b, "split_inequalities", ineq);
  add_check(b, "score_lower_bound", lb);
  add_check(b, "agnostic_guarantee", guar);
  add_check(b, "never_beats_oracle", beat);
  add_check(b, "distance_non_increasing", noninc);
}

// ---------------------------------------------------------------------------
// hard

void run_hard(const ExperimentConfig& cfg, ResultBundle& b) {
  const int l = positive_int(cfg, "l", 2);
  const int k = positive_int(cfg, "k");
  if (k % 2 == 0) throw FormatError("k must be odd");
  const auto h = choose_params(l, k);
  LowerBoundConfig lc;
  lc.budget = positive_int(cfg, "budget");
  lc.samples = static_cast<std::uint64_t>(positive_int(cfg, "samples"));
  lc.seed = cfg.seed;
  lc.y_depth = positive_int(cfg, "y_depth", 0);
  lc.threshold = param<double>(cfg, "threshold");
  lc.confidence = param<double>(cfg, "confidence");
  lc.threads = cfg.threads;
  const bool check_sep = param<bool>(cfg, "check_separation");

  const auto& p = h.params();
  auto& r = b.summary["results"];
  r["l"] = l;
  r["k"] = k;
  r["w"] = p.w;
  r["m"] = p.m;
  r["m_prime"] = p.m_prime;
  r["p_full"] = p.p_full.to_string();
  r["p_prime"] = p.p_prime.to_string();
  r["p_rest"] = p.p_rest().to_string();
  r["budget"] = lc.budget;
  r["y_depth"] = lc.y_depth;
  r["threshold"] = lc.threshold;
  r["asymptotic_targets"] = {{"heuristic_error", 0.49}, {"reference_error", 0.01}};

  std::ostringstream plot;
  plot << "size,error_estimate,ci,series\n";
  bool identity_checked = false;
  for (const auto& nm : impurity_list(cfg)) {
    const auto spec = resolve_impurity(nm);
    const auto rep = lower_bound_experiment(h, spec, lc);
    if (!identity_checked) {
      r["tribes_distance"] = rep.tribes_distance.to_string();
      r["tribes_distance_value"] = rep.tribes_distance.to_double();
      add_check(b, "tribes_distance_identity", rep.tribes_distance == p.p_rest() * Dyadic::half(),
                "dist(f, Tribes) = " + rep.tribes_distance.to_string());
      identity_checked = true;
    }
    b.files["hard_" + nm + ".csv"] = rep.to_csv();
    b.files["trace_" + nm + ".csv"] = rep.trace.to_csv();
    for (const auto& row : rep.rows)
      plot << row.size << ',' << fmt_double(row.error.to_double()) << ",0," << nm << '\n';
    const auto& last = rep.rows.back();
    r["impurities"][nm] = {{"min_error", rep.min_error.to_string()},
                           {"min_error_value", rep.min_error.to_double()},
                           {"final_size", last.size},
                           {"final_error", last.error.to_double()},
                           {"final_error_mc", last.error_mc},
                           {"final_error_mc_ci", last.error_mc_ci},
                           {"final_xi_fraction", last.xi_fraction},
                           {"final_xi_ci", last.xi_ci},
                           {"x_queries", rep.x_queries},
                           {"y_queries", rep.y_queries},
                           {"stays_above_threshold", rep.stays_above}};
    if (check_sep)
      add_check(b, "separation_" + nm, rep.stays_above && rep.tribes_distance < Dyadic::half(),
                "min error " + fmt_double(rep.min_error.to_double()) + " vs threshold " + fmt_double(lc.threshold));
  }
  b.plotdata["hard_error.csv"] = plot.str();
}

// ---------------------------------------------------------------------------
// realizable

struct RealizableTrial {
  int leaves = 0;
  std::vector<long long> reach;  // per criterion (impurities then influence); -1 if not reached
  std::size_t common = 0;
  std::size_t disagreements = 0;
  std::string first;
};

void run_realizable(const ExperimentConfig& cfg, ResultBundle& b) {
  const int n = positive_int(cfg, "n");
  if (n > BoolFunc::kMaxArity) throw FormatError("realizable needs n <= 24");
  const int trials = positive_int(cfg, "trials", 0);
  const int max_leaves = positive_int(cfg, "max_leaves", 2);
  const double eps = param<double>(cfg, "eps");
  const long long cap = std::min<long long>(1LL << 16, 1LL << n);
  const int budget = static_cast<int>(cfg.params.at("budget").is_null() ? cap : std::min<long long>(positive_int(cfg, "budget"), cap));
  const auto names = impurity_list(cfg);
  std::vector<ImpuritySpec> specs;
  for (const auto& nm : names) specs.push_back(resolve_impurity(nm));

  std::vector<RealizableTrial> out(static_cast<std::size_t>(trials));
  parallel_for(out.size(), cfg.threads, [&](std::size_t t) {
    Rng rng(substream(cfg.seed, "realizable", t));
    auto& o = out[t];
    o.leaves = 2 + static_cast<int>(uniform_below(rng, static_cast<std::uint64_t>(max_leaves - 1)));
    const auto target = random_monotone_tree(n, o.leaves, rng);
    const BoolFunc f = target.to_function(n);
    auto reach_of = [&](const GrowthTrace& tr) -> long long {
      for (std::size_t k = 0; k < tr.final_size(); ++k)
        if (tr.distance_at(k) <= eps) return static_cast<long long>(k) + 1;
      return -1;
    };
    GrowthConfig ic;
    ic.budget = budget;
    const auto inf = grow(f, ic);
    for (const auto& spec : specs) {
      GrowthConfig gc;
      gc.impurity = spec;
      gc.budget = budget;
      const auto res = grow(f, gc);
      o.reach.push_back(reach_of(res.trace));
      const auto cmp = compare_split_variables(res.trace, inf.trace);
      o.common += cmp.common_leaves;
      o.disagreements += cmp.disagreements;
      if (o.first.empty() && !cmp.details.empty()) o.first = spec.name() + ": " + cmp.details.front();
    }
    o.reach.push_back(reach_of(inf.trace));
  });

  std::ostringstream rows;
  rows << "trial,leaves";
  for (const auto& nm : names) rows << ",reach_" << nm;
  rows << ",reach_influence,common_leaves,disagreements\n";
  bool reached = true;
  std::size_t common = 0, dis = 0;
  std::string first;
  std::vector<long long> max_reach(names.size() + 1, 0);
  for (int t = 0; t < trials; ++t) {
    const auto& o = out[t];
    rows << t << ',' << o.leaves;
    for (std::size_t i = 0; i < o.reach.size(); ++i) {
      rows << ',' << o.reach[i];
      if (i < names.size() && o.reach[i] < 0) {
        reached = false;
        if (first.empty()) first = "trial " + std::to_string(t) + " " + names[i] + " did not reach eps";
      }
      max_reach[i] = o.reach[i] < 0 || max_reach[i] < 0 ? -1 : std::max(max_reach[i], o.reach[i]);
    }
    rows << ',' << o.common << ',' << o.disagreements << '\n';
    common += o.common;
    dis += o.disagreements;
    if (first.empty() && !o.first.empty()) first = "trial " + std::to_string(t) + " " + o.first;
  }
  b.files["realizable.csv"] = rows.str();
  b.plotdata["realizable.csv"] = rows.str();
  auto& r = b.summary["results"];
  r["n"] = n;
  r["trials"] = trials;
  r["budget"] = budget;
  r["eps"] = eps;
  for (std::size_t i = 0; i < names.size(); ++i) r["max_reach"][names[i]] = max_reach[i];
  r["max_reach"]["influence"] = max_reach.back();
  r["common_leaves"] = common;
  r["disagreements"] = dis;
  r["first_failure"] = first;
  add_check(b, "reaches_eps", reached);
  add_check(b, "argmax_agreement", dis == 0, std::to_string(common) + " common leaves");
}

// ---------------------------------------------------------------------------
// grow-real

void run_grow_real(const ExperimentConfig& cfg, ResultBundle& b) {
  std::optional<BoolFunc> f;
  RealSample sample;
  if (cfg.params.at("data").is_string()) {
    sample = load_dataset_csv(param<std::string>(cfg, "data"));
  } else {
    f = function_from_params(cfg);
    sample = binary_sample(*f);
  }
  std::optional<ProductDistribution> dist;
  if (cfg.params.at("distribution").is_string())
    dist = load_distribution(param<std::string>(cfg, "distribution"), &sample);
  const auto policy = ThresholdPolicy::parse(param<std::string>(cfg, "thresholds"));
  GrowthConfig gc;
  gc.impurity = resolve_impurity(param<std::string>(cfg, "impurity"));
  gc.budget = positive_int(cfg, "budget");
  gc.stop_on_zero_gain = param<bool>(cfg, "stop_on_zero_gain");
  const auto res = grow_real(sample, gc, policy, dist);
  const auto& tr = res.trace;

  std::ostringstream splits;
  splits << "iter,leaf_id,coord,theta,upper_mass,is_median\n";
  for (const auto& rec : tr.records)
    splits << rec.iter << ',' << rec.leaf_id << ',' << rec.query.coord << ',' << fmt_double(rec.query.theta) << ','
           << (rec.upper_mass ? fmt_double(*rec.upper_mass) : "") << ',' << (rec.is_median ? 1 : 0) << '\n';
  b.files["trace.csv"] = tr.to_csv();
  b.files["splits.csv"] = splits.str();
  b.files["tree.json"] = tree_json(res.completion);
  b.plotdata["error_vs_size.csv"] = error_vs_size_csv({&tr});

  std::size_t medians = 0;
  for (const auto& rec : tr.records) medians += rec.is_median ? 1 : 0;
  auto& r = b.summary["results"];
  r["points"] = sample.size();
  r["dimension"] = sample.n;
  r["provenance"] = sample.provenance;
  r["thresholds"] = param<std::string>(cfg, "thresholds");
  r["threshold_bits"] = tr.threshold_bits;
  r["final_size"] = tr.final_size();
  r["training_error"] = tr.distance_at(tr.records.size());
  r["median_splits"] = medians;
  add_check(b, "distance_non_increasing", non_increasing(tr));

  if (f && param<bool>(cfg, "compare_binary") && policy.kind == ThresholdPolicy::Kind::Midpoints) {
    const auto bin = grow(*f, gc);
    bool same = bin.trace.records.size() == tr.records.size();
    std::size_t first_diff = 0;
    for (std::size_t i = 0; same && i < tr.records.size(); ++i)
      if (bin.trace.records[i].query.coord != tr.records[i].query.coord ||
          bin.trace.records[i].leaf_id != tr.records[i].leaf_id) {
        same = false;
        first_diff = i + 1;
      }
    r["binary_consistency"] = same;
    add_check(b, "binary_consistency", same,
              same ? std::to_string(tr.records.size()) + " splits" : "first difference at iteration " + std::to_string(first_diff));
  }
}

// ---------------------------------------------------------------------------
// round-check

void run_round(const ExperimentConfig& cfg, ResultBundle& b) {
  const int trials = positive_int(cfg, "trials", 0);
  const int n = positive_int(cfg, "n");
  const int leaves = positive_int(cfg, "leaves");
  const int max_depth = positive_int(cfg, "max_depth");
  const double eps = param<double>(cfg, "eps");
  const auto samples = static_cast<std::uint64_t>(positive_int(cfg, "samples"));
  const double conf = param<double>(cfg, "confidence");
  const int w = cfg.params.at("w").is_null()
                    ? static_cast<int>(std::ceil(std::log2(leaves * max_depth / eps))) + 2
                    : positive_int(cfg, "w");
  const auto d = ProductDistribution::uniform(n);

  std::vector<Interval> est(static_cast<std::size_t>(trials));
  parallel_for(est.size(), cfg.threads, [&](std::size_t t) {
    Rng rng(substream(cfg.seed, "round-tree", t));
    const auto tree = random_balanced_tree(n, leaves, max_depth, rng);
    const auto rounded = round_thresholds(tree, w);
    est[t] = estimate_dist(tree, rounded, d, samples, substream(cfg.seed, "round-mc", t), conf);
  });
  std::ostringstream rows;
  rows << "trial,estimate,lower,upper,half_width\n";
  std::size_t fails = 0;
  double worst = 0.0;
  for (int t = 0; t < trials; ++t) {
    const auto& e = est[t];
    rows << t << ',' << fmt_double(e.estimate) << ',' << fmt_double(e.lower) << ',' << fmt_double(e.upper) << ','
         << fmt_double(e.half_width()) << '\n';
    if (e.estimate > eps / 2 + e.half_width()) ++fails;
    worst = std::max(worst, e.estimate);
  }
  b.files["round.csv"] = rows.str();
  b.plotdata["round.csv"] = rows.str();

  const auto& ec = cfg.params.at("encode_check");
  const int etrees = ec.value("trees", 5);
  const int eleaves = ec.value("leaves", 16);
  const int en = ec.value("n", 3);
  const int ew = ec.value("w", 5);
  const int edepth = ec.value("max_depth", 8);
  const int inputs = ec.value("inputs", 10000);
  std::vector<std::uint64_t> edis(static_cast<std::size_t>(std::max(etrees, 0)));
  parallel_for(edis.size(), cfg.threads, [&](std::size_t t) {
    Rng rng(substream(cfg.seed, "encode-tree", t));
    const auto rounded = round_thresholds(random_balanced_tree(en, eleaves, edepth, rng), ew);
    const auto s = encoded_tree(rounded, en, ew);
    const auto ed = ProductDistribution::uniform(en);
    Rng xr(substream(cfg.seed, "encode-inputs", t));
    for (int i = 0; i < inputs; ++i) {
      const auto x = ed.sample(xr);
      const auto bits = encode_point(x, ew);
      if (rounded.evaluate(std::span<const double>(x)) != s.evaluate(std::span<const Sign>(bits))) ++edis[t];
    }
  });
  std::uint64_t edisagree = 0;
  for (auto v : edis) edisagree += v;

  auto& r = b.summary["results"];
  r["trials"] = trials;
  r["n"] = n;
  r["leaves"] = leaves;
  r["max_depth"] = max_depth;
  r["eps"] = eps;
  r["w"] = w;
  r["samples"] = samples;
  r["max_estimate"] = worst;
  r["failures"] = fails;
  r["encode_check"] = {{"trees", etrees}, {"inputs_per_tree", inputs}, {"w", ew}, {"disagreements", edisagree}};
  add_check(b, "rounding_distance", fails == 0,
            std::to_string(fails) + " of " + std::to_string(trials) + " trials above eps/2 + CI");
  add_check(b, "encoded_tree_agreement", edisagree == 0, std::to_string(edisagree) + " disagreements");
}

// ---------------------------------------------------------------------------
// verify-impurity

void run_verify_impurity(const ExperimentConfig& cfg, ResultBundle& b) {
  const int res = positive_int(cfg, "resolution", 2);
  const double tol = param<double>(cfg, "tolerance");
  auto& r = b.summary["results"];
  for (const auto& nm : impurity_list(cfg)) {
    auto spec = resolve_impurity(nm);
    if (!cfg.params.at("kappa").is_null()) spec = spec.with_kappa(param<double>(cfg, "kappa"));
    const auto conc = verify_strong_concavity(spec, res, tol);
    const auto shape = verify_impurity_shape(spec, res, tol);
    r["impurities"][nm] = {{"kappa", spec.kappa()},
                           {"min_slack", conc.min_slack},
                           {"worst_a", conc.worst_a},
                           {"worst_b", conc.worst_b},
                           {"pairs_checked", conc.pairs_checked},
                           {"grid_only", !spec.verification_grid().empty()},
                           {"shape_ok", shape.pass},
                           {"max_asymmetry", shape.max_asymmetry}};
    add_check(b, "concavity_" + nm, conc.pass, "min slack " + fmt_double(conc.min_slack));
    add_check(b, "shape_" + nm, shape.pass, shape.problem);
  }
}

}  // namespace

// ---------------------------------------------------------------------------

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw FormatError("config must be a JSON object");
  if (!j.contains("kind") || !j["kind"].is_string()) throw FormatError("config needs a string 'kind'");
  ExperimentConfig c;
  c.kind = j["kind"].get<std::string>();
  c.params = defaults_for(c.kind);
  try {
    for (const auto& [key, v] : j.items()) {
      if (key == "kind") continue;
      if (key == "seed") {
        if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0))
          throw FormatError("seed must be a non-negative integer");
        c.seed = v.get<std::uint64_t>();
      } else if (key == "out") {
        c.out = v.get<std::string>();
      } else if (key == "threads") {
        c.threads = v.get<int>();
        if (c.threads < 1) throw FormatError("threads must be >= 1");
      } else if (key == "inject_failure") {
        c.inject_failure = v.get<bool>();
      } else if (key == "impurity" && !c.params.contains("impurity") && c.params.contains("impurities")) {
        c.params["impurities"] = v.is_array() ? ojson(v) : ojson::array({ojson(v)});
      } else if (key == "size" && c.kind == "agnostic-sweep") {
        c.params["sizes"] = ojson::array({ojson(v)});
      } else if (!c.params.contains(key)) {
        throw FormatError("unknown key '" + key + "' for experiment '" + c.kind + "'");
      } else if (key == "encode_check" && v.is_object()) {
        for (const auto& [k2, v2] : v.items()) {
          if (!c.params["encode_check"].contains(k2)) throw FormatError("unknown key 'encode_check." + k2 + "'");
          c.params["encode_check"][k2] = v2;
        }
      } else {
        c.params[key] = v;
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("config: ") + e.what());
  }
  for (const char* key : {"function", "data", "distribution"})
    if (c.params.contains(key)) require_file(c.params[key], key);
  if (c.params.contains("impurity")) require_impurity(c.params["impurity"], "impurity");
  if (c.params.contains("impurities")) require_impurity(c.params["impurities"], "impurities");
  return c;
}

nlohmann::ordered_json ExperimentConfig::to_json() const {
  ojson j;
  j["kind"] = kind;
  j["seed"] = seed;
  j["threads"] = threads;
  if (!out.empty()) j["out"] = out;
  if (inject_failure) j["inject_failure"] = true;
  for (const auto& [k, v] : params.items()) j[k] = v;
  return j;
}

bool ResultBundle::all_pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckOutcome& c) { return c.pass; });
}

ResultBundle run(const ExperimentConfig& cfg) {
  ResultBundle b;
  b.summary["tool"] = "topdown";
  b.summary["version"] = version_string();
  b.summary["kind"] = cfg.kind;
  b.summary["seed"] = cfg.seed;
  ojson echo = cfg.to_json();
  echo.erase("threads");
  echo.erase("out");
  b.summary["config"] = echo;
  b.summary["results"] = ojson::object();

  if (cfg.kind == "grow") run_grow(cfg, b);
  else if (cfg.kind == "opt") run_opt(cfg, b);
  else if (cfg.kind == "jz-sweep") run_jz(cfg, b);
  else if (cfg.kind == "agnostic-sweep") run_agnostic(cfg, b);
  else if (cfg.kind == "hard") run_hard(cfg, b);
  else if (cfg.kind == "realizable") run_realizable(cfg, b);
  else if (cfg.kind == "grow-real") run_grow_real(cfg, b);
  else if (cfg.kind == "round-check") run_round(cfg, b);
  else if (cfg.kind == "verify-impurity") run_verify_impurity(cfg, b);
  else throw FormatError("unknown experiment kind '" + cfg.kind + "'");

  if (cfg.inject_failure) add_check(b, "injected", false, "failure requested by config");
  ojson checks = ojson::array();
  for (const auto& c : b.checks) checks.push_back({{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
  b.summary["checks"] = checks;
  b.summary["all_pass"] = b.all_pass();
  return b;
}

namespace {

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

}  // namespace

void emit_plotdata(const ResultBundle& b, const std::string& dir) {
  for (const auto& [name, text] : b.plotdata) write_text(std::filesystem::path(dir) / "plotdata" / name, text);
}

void write_bundle(const ResultBundle& b, const std::string& dir) {
  const std::filesystem::path root(dir);
  write_text(root / "summary.json", b.summary.dump(2) + "\n");
  for (const auto& [name, text] : b.files) write_text(root / name, text);
  emit_plotdata(b, dir);
}

}  // namespace topdown
