#include "topdown/topdown.h"

#include <cstring>
#include <filesystem>
#include <new>
#include <string>

#include <json.hpp>

#include "boolfn.hpp"
#include "errors.hpp"
#include "experiments.hpp"
#include "grower.hpp"
#include "impurity.hpp"
#include "oracle.hpp"
#include "tree.hpp"

struct td_function {
  topdown::BoolFunc f;
};
struct td_tree {
  topdown::DecisionTree t;
};
struct td_impurity {
  topdown::ImpuritySpec spec;
};
struct td_growth {
  topdown::GrowthResult r;
};
struct td_result {
  topdown::ResultBundle b;
  std::vector<std::string> names;
};

namespace {

thread_local std::string g_last_error;

td_status fail(td_status s, const std::string& msg) {
  g_last_error = msg;
  return s;
}

template <typename Fn>
td_status guarded(Fn&& fn) {
  try {
    return fn();
  } catch (const topdown::DomainError& e) {
    return fail(TD_ERR_DOMAIN, e.what());
  } catch (const topdown::FormatError& e) {
    return fail(TD_ERR_FORMAT, e.what());
  } catch (const topdown::RefusedError& e) {
    return fail(TD_ERR_REFUSED, e.what());
  } catch (const nlohmann::json::exception& e) {
    return fail(TD_ERR_FORMAT, e.what());
  } catch (const std::filesystem::filesystem_error& e) {
    return fail(TD_ERR_IO, e.what());
  } catch (const std::ios_base::failure& e) {
    return fail(TD_ERR_IO, e.what());
  } catch (const std::bad_alloc&) {
    return fail(TD_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(TD_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(TD_ERR_INTERNAL, "unknown error");
  }
}

char* dup(const std::string& s) {
  auto* p = static_cast<char*>(std::malloc(s.size() + 1));
  if (!p) throw std::bad_alloc();
  std::memcpy(p, s.c_str(), s.size() + 1);
  return p;
}

void put_dyadic(const topdown::Dyadic& d, char** frac, double* value) {
  if (frac) *frac = dup(d.to_string());
  if (value) *value = d.to_double();
}

#define TD_REQUIRE(p) \
  if (!(p)) return fail(TD_ERR_NULL, #p " is NULL")

}  // namespace

extern "C" {

const char* td_version(void) { return topdown::version_string(); }
const char* td_last_error(void) { return g_last_error.c_str(); }
void td_string_free(char* s) { std::free(s); }

const char* td_status_name(td_status s) {
  switch (s) {
    case TD_OK: return "ok";
    case TD_ERR_DOMAIN: return "domain error";
    case TD_ERR_FORMAT: return "format error";
    case TD_ERR_REFUSED: return "refused";
    case TD_ERR_IO: return "i/o error";
    case TD_ERR_CHECK_FAILED: return "check failed";
    case TD_ERR_INTERNAL: return "internal error";
    case TD_ERR_NULL: return "null argument";
  }
  return "unknown status";
}

// --- functions ---------------------------------------------------------------

td_status td_function_from_spec(const char* spec_json, td_function** out) {
  TD_REQUIRE(spec_json);
  TD_REQUIRE(out);
  return guarded([&] {
    *out = new td_function{topdown::parse_function_spec(spec_json)};
    return TD_OK;
  });
}

td_status td_function_load(const char* path, td_function** out) {
  TD_REQUIRE(path);
  TD_REQUIRE(out);
  if (!std::filesystem::exists(path)) return fail(TD_ERR_IO, std::string("file not found: ") + path);
  return guarded([&] {
    *out = new td_function{topdown::load_function_spec(path)};
    return TD_OK;
  });
}

td_status td_function_random_monotone(int n, uint64_t seed, td_function** out) {
  TD_REQUIRE(out);
  return guarded([&] {
    *out = new td_function{topdown::random_monotone(n, seed)};
    return TD_OK;
  });
}

td_status td_function_to_spec(const td_function* f, char** out_json) {
  TD_REQUIRE(f);
  TD_REQUIRE(out_json);
  return guarded([&] {
    *out_json = dup(topdown::function_spec_json(f->f));
    return TD_OK;
  });
}

td_status td_function_arity(const td_function* f, int* out) {
  TD_REQUIRE(f);
  TD_REQUIRE(out);
  *out = f->f.arity();
  return TD_OK;
}

td_status td_function_eval(const td_function* f, const int8_t* x, int* out) {
  TD_REQUIRE(f);
  TD_REQUIRE(x);
  TD_REQUIRE(out);
  for (int i = 0; i < f->f.arity(); ++i)
    if (x[i] != 1 && x[i] != -1) return fail(TD_ERR_DOMAIN, "point coordinates must be -1 or +1");
  *out = f->f.eval(std::span<const topdown::Sign>(x, static_cast<std::size_t>(f->f.arity()))) ? 1 : 0;
  return TD_OK;
}

td_status td_function_expectation(const td_function* f, char** out_fraction, double* out_value) {
  TD_REQUIRE(f);
  return guarded([&] {
    put_dyadic(topdown::expectation(f->f), out_fraction, out_value);
    return TD_OK;
  });
}

td_status td_function_influence(const td_function* f, int coord, char** out_fraction, double* out_value) {
  TD_REQUIRE(f);
  return guarded([&] {
    put_dyadic(topdown::influence(f->f, {}, coord), out_fraction, out_value);
    return TD_OK;
  });
}

td_status td_function_is_monotone(const td_function* f, int* out) {
  TD_REQUIRE(f);
  TD_REQUIRE(out);
  *out = topdown::is_monotone(f->f) ? 1 : 0;
  return TD_OK;
}

void td_function_free(td_function* f) { delete f; }

// --- trees -------------------------------------------------------------------

td_status td_tree_parse(const char* json, td_tree** out) {
  TD_REQUIRE(json);
  TD_REQUIRE(out);
  return guarded([&] {
    *out = new td_tree{topdown::parse_tree_json(json)};
    return TD_OK;
  });
}

td_status td_tree_load(const char* path, td_tree** out) {
  TD_REQUIRE(path);
  TD_REQUIRE(out);
  if (!std::filesystem::exists(path)) return fail(TD_ERR_IO, std::string("file not found: ") + path);
  return guarded([&] {
    *out = new td_tree{topdown::load_tree(path)};
    return TD_OK;
  });
}

td_status td_tree_to_json(const td_tree* t, char** out_json) {
  TD_REQUIRE(t);
  TD_REQUIRE(out_json);
  return guarded([&] {
    *out_json = dup(topdown::tree_json(t->t));
    return TD_OK;
  });
}

td_status td_tree_size(const td_tree* t, int* out) {
  TD_REQUIRE(t);
  TD_REQUIRE(out);
  *out = t->t.size();
  return TD_OK;
}

td_status td_tree_depth(const td_tree* t, int* out) {
  TD_REQUIRE(t);
  TD_REQUIRE(out);
  *out = t->t.shape().depth();
  return TD_OK;
}

td_status td_tree_distance(const td_tree* t, const td_function* f, char** out_fraction, double* out_value) {
  TD_REQUIRE(t);
  TD_REQUIRE(f);
  return guarded([&] {
    put_dyadic(topdown::distance(t->t, f->f), out_fraction, out_value);
    return TD_OK;
  });
}

void td_tree_free(td_tree* t) { delete t; }

// --- impurities --------------------------------------------------------------

td_status td_impurity_resolve(const char* name_or_path, td_impurity** out) {
  TD_REQUIRE(name_or_path);
  TD_REQUIRE(out);
  return guarded([&] {
    *out = new td_impurity{topdown::resolve_impurity(name_or_path)};
    return TD_OK;
  });
}

td_status td_impurity_eval(const td_impurity* g, double p, double* out) {
  TD_REQUIRE(g);
  TD_REQUIRE(out);
  return guarded([&] {
    *out = g->spec(p);
    return TD_OK;
  });
}

td_status td_impurity_kappa(const td_impurity* g, double* out) {
  TD_REQUIRE(g);
  TD_REQUIRE(out);
  *out = g->spec.kappa();
  return TD_OK;
}

void td_impurity_free(td_impurity* g) { delete g; }

// --- growth ------------------------------------------------------------------

td_status td_grow(const td_function* f, const td_impurity* impurity, int budget, int stop_on_zero_gain,
                  td_growth** out) {
  TD_REQUIRE(f);
  TD_REQUIRE(out);
  if (budget < 1) return fail(TD_ERR_DOMAIN, "budget must be >= 1");
  return guarded([&] {
    topdown::GrowthConfig cfg;
    if (impurity) cfg.impurity = impurity->spec;
    cfg.budget = budget;
    cfg.stop_on_zero_gain = stop_on_zero_gain != 0;
    *out = new td_growth{topdown::grow(f->f, cfg)};
    return TD_OK;
  });
}

td_status td_growth_size(const td_growth* g, int* out) {
  TD_REQUIRE(g);
  TD_REQUIRE(out);
  *out = g->r.tree.size();
  return TD_OK;
}

td_status td_growth_distance(const td_growth* g, char** out_fraction, double* out_value) {
  TD_REQUIRE(g);
  return guarded([&] {
    put_dyadic(g->r.trace.exact_distance_at(g->r.trace.records.size()), out_fraction, out_value);
    return TD_OK;
  });
}

td_status td_growth_tree(const td_growth* g, td_tree** out) {
  TD_REQUIRE(g);
  TD_REQUIRE(out);
  return guarded([&] {
    *out = new td_tree{g->r.completion};
    return TD_OK;
  });
}

td_status td_growth_trace_csv(const td_growth* g, char** out_csv) {
  TD_REQUIRE(g);
  TD_REQUIRE(out_csv);
  return guarded([&] {
    *out_csv = dup(g->r.trace.to_csv());
    return TD_OK;
  });
}

void td_growth_free(td_growth* g) { delete g; }

td_status td_opt(const td_function* f, int size, char** out_fraction, td_tree** out_witness) {
  TD_REQUIRE(f);
  return guarded([&] {
    auto r = topdown::opt(f->f, size);
    if (out_fraction) *out_fraction = dup(r.error.to_string());
    if (out_witness) *out_witness = new td_tree{std::move(r.witness)};
    return TD_OK;
  });
}

// --- experiments -------------------------------------------------------------

td_status td_experiment_run(const char* config_json, td_result** out) {
  TD_REQUIRE(config_json);
  TD_REQUIRE(out);
  return guarded([&] {
    const auto cfg = topdown::ExperimentConfig::from_json(nlohmann::json::parse(config_json));
    auto* r = new td_result{topdown::run(cfg), {}};
    for (const auto& [name, text] : r->b.files) r->names.push_back(name);
    for (const auto& [name, text] : r->b.plotdata) r->names.push_back("plotdata/" + name);
    *out = r;
    return TD_OK;
  });
}

td_status td_result_summary(const td_result* r, char** out_json) {
  TD_REQUIRE(r);
  TD_REQUIRE(out_json);
  return guarded([&] {
    *out_json = dup(r->b.summary.dump(2) + "\n");
    return TD_OK;
  });
}

td_status td_result_all_pass(const td_result* r, int* out) {
  TD_REQUIRE(r);
  TD_REQUIRE(out);
  *out = r->b.all_pass() ? 1 : 0;
  return TD_OK;
}

td_status td_result_file_count(const td_result* r, int* out) {
  TD_REQUIRE(r);
  TD_REQUIRE(out);
  *out = static_cast<int>(r->names.size());
  return TD_OK;
}

td_status td_result_file_name(const td_result* r, int index, char** out_name) {
  TD_REQUIRE(r);
  TD_REQUIRE(out_name);
  if (index < 0 || index >= static_cast<int>(r->names.size())) return fail(TD_ERR_DOMAIN, "file index out of range");
  return guarded([&] {
    *out_name = dup(r->names[static_cast<std::size_t>(index)]);
    return TD_OK;
  });
}

td_status td_result_file(const td_result* r, const char* name, char** out_contents) {
  TD_REQUIRE(r);
  TD_REQUIRE(name);
  TD_REQUIRE(out_contents);
  return guarded([&] {
    std::string key = name;
    const std::string prefix = "plotdata/";
    const auto& table = key.rfind(prefix, 0) == 0 ? r->b.plotdata : r->b.files;
    if (key.rfind(prefix, 0) == 0) key.erase(0, prefix.size());
    const auto it = table.find(key);
    if (it == table.end()) return fail(TD_ERR_DOMAIN, std::string("no file named ") + name);
    *out_contents = dup(it->second);
    return TD_OK;
  });
}

td_status td_result_write(const td_result* r, const char* dir) {
  TD_REQUIRE(r);
  TD_REQUIRE(dir);
  try {
    topdown::write_bundle(r->b, dir);
    return TD_OK;
  } catch (const std::exception& e) {
    return fail(TD_ERR_IO, e.what());
  }
}

void td_result_free(td_result* r) { delete r; }

td_status td_run_experiment(const char* config_json, char** out_summary_json) {
  TD_REQUIRE(config_json);
  std::string dir;
  const auto parsed = guarded([&] {
    const auto j = nlohmann::json::parse(config_json);
    if (j.is_object() && j.contains("out") && j["out"].is_string()) dir = j["out"].get<std::string>();
    return TD_OK;
  });
  if (parsed != TD_OK) return parsed;
  td_result* r = nullptr;
  if (const auto s = td_experiment_run(config_json, &r); s != TD_OK) return s;
  td_status status = dir.empty() ? TD_OK : td_result_write(r, dir.c_str());
  if (status == TD_OK && out_summary_json) status = td_result_summary(r, out_summary_json);
  if (status == TD_OK && !r->b.all_pass()) status = fail(TD_ERR_CHECK_FAILED, "one or more checks failed");
  td_result_free(r);
  return status;
}

}  // extern "C"
