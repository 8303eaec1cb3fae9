// topdown command-line frontend. Talks to the library only through the C API.
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "topdown/topdown.h"

using json = nlohmann::ordered_json;

namespace {

enum Exit { kOk = 0, kCheckFailed = 1, kUsage = 2, kIo = 3, kInternal = 4 };

int exit_code(td_status s) {
  switch (s) {
    case TD_OK: return kOk;
    case TD_ERR_CHECK_FAILED: return kCheckFailed;
    case TD_ERR_DOMAIN:
    case TD_ERR_FORMAT:
    case TD_ERR_REFUSED:
    case TD_ERR_NULL: return kUsage;
    case TD_ERR_IO: return kIo;
    default: return kInternal;
  }
}

struct CString {
  char* p = nullptr;
  ~CString() { td_string_free(p); }
  std::string str() const { return p ? p : ""; }
};

struct Binder {
  std::vector<std::function<void(json&)>> apply;

  template <typename T>
  void opt(CLI::App* sub, const std::string& flag, const std::string& key, const std::string& desc) {
    auto v = std::make_shared<T>();
    auto* o = sub->add_option(flag, *v, desc);
    apply.push_back([v, o, key](json& j) {
      if (o->count()) j[key] = *v;
    });
  }
  void flag(CLI::App* sub, const std::string& flag, const std::string& key, const std::string& desc) {
    auto v = std::make_shared<bool>(false);
    auto* o = sub->add_flag(flag, *v, desc);
    apply.push_back([v, o, key](json& j) {
      if (o->count()) j[key] = *v;
    });
  }
};

struct Global {
  std::optional<std::uint64_t> seed;
  std::string out;
  std::optional<int> threads;
  std::string config;
  bool print_json = false;
  bool inject_failure = false;
};

json load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read config file " + path);
  return json::parse(in);
}

void report_checks(const json& summary) {
  for (const auto& c : summary.value("checks", json::array()))
    if (!c.value("pass", false))
      std::cerr << "check failed: " << c.value("name", "?")
                << (c.value("detail", "").empty() ? "" : " (" + c.value("detail", "") + ")") << '\n';
}

std::string result_file(td_result* r, const std::string& name) {
  CString s;
  if (td_result_file(r, name.c_str(), &s.p) != TD_OK) return {};
  return s.str();
}

void print_hard(td_result* r, const json& summary, std::ostream& os) {
  const auto& res = summary.at("results");
  const auto& imps = res.at("impurities");
  const bool many = imps.size() > 1;
  os << "size,error_estimate,error_ci,xi_fraction" << (many ? ",impurity" : "") << '\n';
  for (const auto& [name, v] : imps.items()) {
    std::istringstream csv(result_file(r, "hard_" + name + ".csv"));
    std::string line;
    std::getline(csv, line);  // header
    while (std::getline(csv, line)) {
      std::vector<std::string> cols;
      std::stringstream ls(line);
      for (std::string c; std::getline(ls, c, ',');) cols.push_back(c);
      if (cols.size() < 4) continue;
      os << cols[0] << ',' << cols[1] << ',' << cols[2] << ',' << cols[3] << (many ? "," + name : "") << '\n';
    }
  }
  os << "# p_full=" << res.value("p_full", "") << " p_prime=" << res.value("p_prime", "")
     << " p_rest=" << res.value("p_rest", "") << " dist_tribes=" << res.value("tribes_distance", "") << '\n';
}

int execute(const std::string& kind, json cfg, const Global& g, const std::string& witness_path) {
  cfg["kind"] = kind;
  if (g.seed) cfg["seed"] = *g.seed;
  if (g.threads) cfg["threads"] = *g.threads;
  if (g.inject_failure) cfg["inject_failure"] = true;
  if (!g.out.empty()) cfg["out"] = g.out;

  td_result* raw = nullptr;
  if (const auto s = td_experiment_run(cfg.dump().c_str(), &raw); s != TD_OK) {
    std::cerr << "error: " << td_last_error() << '\n';
    return exit_code(s);
  }
  std::unique_ptr<td_result, decltype(&td_result_free)> r(raw, td_result_free);

  CString summary_text;
  if (td_result_summary(r.get(), &summary_text.p) != TD_OK) {
    std::cerr << "error: " << td_last_error() << '\n';
    return kInternal;
  }
  const auto summary = json::parse(summary_text.str());

  if (!g.out.empty()) {
    if (const auto s = td_result_write(r.get(), g.out.c_str()); s != TD_OK) {
      std::cerr << "error: " << td_last_error() << '\n';
      return exit_code(s);
    }
  }

  if (g.print_json) {
    std::cout << summary_text.str();
  } else if (kind == "opt") {
    std::cout << summary.at("results").value("error", "") << '\n';
    std::string path = witness_path;
    if (path.empty()) path = g.out.empty() ? "witness.json" : g.out + "/witness.json";
    if (g.out.empty() || path != g.out + "/witness.json") {
      std::ofstream w(path);
      w << result_file(r.get(), "witness.json");
      if (!w) {
        std::cerr << "error: cannot write " << path << '\n';
        return kIo;
      }
    }
  } else if (kind == "hard") {
    print_hard(r.get(), summary, std::cout);
  } else if (kind == "grow" || kind == "grow-real") {
    std::cout << result_file(r.get(), "trace.csv");
  } else {
    std::cout << summary_text.str();
  }

  int all = 0;
  td_result_all_pass(r.get(), &all);
  if (!all) {
    report_checks(summary);
    return kCheckFailed;
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact top-down decision tree induction toolkit"};
  app.set_version_flag("--version", std::string(td_version()));
  app.require_subcommand(1);

  Global g;
  app.add_option("--seed", g.seed, "Master seed (default 1)");
  app.add_option("--out", g.out, "Output directory for the result bundle");
  app.add_option("--threads", g.threads, "Worker threads")->check(CLI::PositiveNumber);
  app.add_option("--config", g.config, "JSON config file; flags override its keys")->check(CLI::ExistingFile);
  app.add_flag("--json", g.print_json, "Print the summary JSON instead of the default output");
  app.add_flag("--inject-failure", g.inject_failure, "Add a failing check (exit-code testing)");

  std::map<std::string, Binder> binders;
  std::string witness;

  auto* grow = app.add_subcommand("grow", "Grow a tree on a Boolean function");
  {
    auto& b = binders["grow"];
    b.opt<std::string>(grow, "--fn", "function", "Function spec file");
    b.opt<std::string>(grow, "--impurity", "impurity", "gini | entropy | km | influence | table file");
    b.opt<int>(grow, "--budget", "budget", "Maximum number of leaves");
    b.flag(grow, "--stop-on-zero-gain", "stop_on_zero_gain", "Stop when no split has positive gain");
    auto mon_s = std::make_shared<int>(0);
    auto mon_eps = std::make_shared<double>(0.1);
    auto* o_s = grow->add_option("--monitor-s", *mon_s, "Check per-split bounds against opt_s");
    auto* o_e = grow->add_option("--monitor-eps", *mon_eps, "Slack for the per-split bound");
    b.apply.push_back([=](json& j) {
      if (o_s->count() || o_e->count()) j["monitor"] = {{"s", o_s->count() ? *mon_s : 2}, {"eps", *mon_eps}};
    });
  }
  auto* opt = app.add_subcommand("opt", "Exact minimum error of size-s trees");
  {
    auto& b = binders["opt"];
    b.opt<std::string>(opt, "--fn", "function", "Function spec file");
    b.opt<int>(opt, "--size", "size", "Maximum number of leaves");
    opt->add_option("--witness", witness, "Where to write the witness tree (default witness.json)");
  }
  auto* jz = app.add_subcommand("jz-sweep", "Check the robust OSSS inequality");
  {
    auto& b = binders["jz-sweep"];
    b.opt<int>(jz, "--pairs", "random_pairs", "Random (f, g) pairs");
    b.opt<int>(jz, "--max-n", "max_n", "Largest arity for random pairs");
    b.opt<int>(jz, "--exhaustive-n", "exhaustive_n", "Arity of the exhaustive part (0 disables)");
  }
  auto* ag = app.add_subcommand("agnostic-sweep", "Per-split bounds and the agnostic guarantee");
  {
    auto& b = binders["agnostic-sweep"];
    b.opt<int>(ag, "--n", "n", "Arity");
    b.opt<int>(ag, "--trials", "trials", "Random monotone functions");
    b.opt<std::vector<int>>(ag, "--sizes", "sizes", "Reference sizes s");
    b.opt<double>(ag, "--eps", "eps", "Slack");
    b.opt<int>(ag, "--budget", "budget", "Growth budget (default 2^n)");
    b.opt<std::vector<std::string>>(ag, "--impurity", "impurities", "Impurities (repeatable)");
  }
  auto* hard = app.add_subcommand("hard", "Lower-bound experiment on the Tribes/Majority instance");
  {
    auto& b = binders["hard"];
    b.opt<int>(hard, "--l", "l", "Number of x-variables");
    b.opt<int>(hard, "--k", "k", "Number of y-variables (odd)");
    b.opt<std::vector<std::string>>(hard, "--impurity", "impurities", "Impurities (repeatable)");
    b.opt<int>(hard, "--budget", "budget", "Maximum number of leaves");
    b.opt<int>(hard, "--samples", "samples", "Monte Carlo samples");
    b.opt<int>(hard, "--y-depth", "y_depth", "y-queries allowed before the first x-query");
    b.opt<double>(hard, "--threshold", "threshold", "Error threshold for the separation check");
    b.flag(hard, "--check-separation", "check_separation", "Fail unless the error stays above the threshold");
    // --seed is also accepted after the subcommand.
    hard->add_option("--seed", g.seed, "Master seed");
  }
  auto* real = app.add_subcommand("realizable", "Growth on random monotone decision trees");
  {
    auto& b = binders["realizable"];
    b.opt<int>(real, "--n", "n", "Arity");
    b.opt<int>(real, "--trials", "trials", "Random target trees");
    b.opt<int>(real, "--max-leaves", "max_leaves", "Largest target size");
    b.opt<double>(real, "--eps", "eps", "Target distance");
    b.opt<int>(real, "--budget", "budget", "Growth budget");
    b.opt<std::vector<std::string>>(real, "--impurity", "impurities", "Impurities (repeatable)");
  }
  auto* gr = app.add_subcommand("grow-real", "Grow a threshold tree on real-valued data");
  {
    auto& b = binders["grow-real"];
    b.opt<std::string>(gr, "--data", "data", "CSV dataset with a header and a 0/1 label column");
    b.opt<std::string>(gr, "--fn", "function", "Boolean function spec (grown on its {0,1} cube)");
    b.opt<std::string>(gr, "--distribution", "distribution", "Per-coordinate distribution file");
    b.opt<std::string>(gr, "--impurity", "impurity", "gini | entropy | km | table file");
    b.opt<int>(gr, "--budget", "budget", "Maximum number of leaves");
    b.opt<std::string>(gr, "--thresholds", "thresholds", "midpoints | grid:W");
    b.flag(gr, "--stop-on-zero-gain", "stop_on_zero_gain", "Stop when no split has positive gain");
  }
  auto* rc = app.add_subcommand("round-check", "Threshold rounding and encoded-tree checks");
  {
    auto& b = binders["round-check"];
    b.opt<int>(rc, "--trials", "trials", "Random balanced trees");
    b.opt<int>(rc, "--leaves", "leaves", "Leaves per tree");
    b.opt<int>(rc, "--max-depth", "max_depth", "Depth cap");
    b.opt<double>(rc, "--eps", "eps", "Target accuracy");
    b.opt<int>(rc, "--w", "w", "Bit width (default from leaves, depth and eps)");
    b.opt<int>(rc, "--samples", "samples", "Monte Carlo samples per tree");
  }
  auto* vi = app.add_subcommand("verify-impurity", "Strong concavity and shape checks");
  {
    auto& b = binders["verify-impurity"];
    b.opt<std::vector<std::string>>(vi, "--impurity", "impurities", "Impurities (repeatable)");
    b.opt<int>(vi, "--resolution", "resolution", "Grid resolution");
    b.opt<double>(vi, "--kappa", "kappa", "Override the claimed constant");
  }
  auto* run = app.add_subcommand("run", "Run the experiment described by --config");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc2 = app.exit(e);
    return rc2 == 0 ? kOk : kUsage;
  }

  json cfg = json::object();
  try {
    if (!g.config.empty()) cfg = load_config(g.config);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  }
  if (!cfg.is_object()) {
    std::cerr << "error: config must be a JSON object\n";
    return kUsage;
  }

  std::string kind;
  if (run->parsed()) {
    if (!cfg.contains("kind")) {
      std::cerr << "error: 'run' needs --config with a \"kind\"\n";
      return kUsage;
    }
    kind = cfg["kind"].get<std::string>();
  } else {
    for (auto* sub : app.get_subcommands()) kind = sub->get_name();
    if (cfg.contains("kind") && cfg["kind"] != kind) {
      std::cerr << "error: config kind " << cfg["kind"] << " does not match subcommand " << kind << '\n';
      return kUsage;
    }
    for (auto& apply : binders[kind].apply) apply(cfg);
  }
  if (g.out.empty() && cfg.contains("out") && cfg["out"].is_string()) g.out = cfg["out"].get<std::string>();
  return execute(kind, cfg, g, witness);
}
