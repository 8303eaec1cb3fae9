/* topdown: exact top-down decision tree induction toolkit, C interface.
 *
 * Every call returns a td_status. On failure the message is available from
 * td_last_error() on the same thread until the next failing call. Strings
 * returned through char** out-parameters are owned by the caller and must be
 * released with td_string_free(). Handles are released with their matching
 * *_free function; passing NULL to a *_free function is a no-op.
 *
 * Fractions are exact dyadic rationals printed as "num/den" in lowest terms.
 */
#ifndef TOPDOWN_TOPDOWN_H
#define TOPDOWN_TOPDOWN_H

#include <stdint.h>

#if defined(_WIN32)
#  if defined(TOPDOWN_BUILDING)
#    define TD_API __declspec(dllexport)
#  else
#    define TD_API __declspec(dllimport)
#  endif
#else
#  define TD_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum td_status {
  TD_OK = 0,
  TD_ERR_DOMAIN = 1,       /* precondition violated (bad coordinate, size, ...) */
  TD_ERR_FORMAT = 2,       /* malformed spec, tree, dataset or config */
  TD_ERR_REFUSED = 3,      /* request outside the checked regime */
  TD_ERR_IO = 4,           /* file could not be read or written */
  TD_ERR_CHECK_FAILED = 5, /* experiment ran but an invariant check failed */
  TD_ERR_INTERNAL = 6,
  TD_ERR_NULL = 7          /* required pointer argument was NULL */
} td_status;

typedef struct td_function td_function;
typedef struct td_tree td_tree;
typedef struct td_impurity td_impurity;
typedef struct td_growth td_growth;
typedef struct td_result td_result;

TD_API const char* td_version(void);
TD_API const char* td_last_error(void);
TD_API const char* td_status_name(td_status s);
TD_API void td_string_free(char* s);

/* Boolean functions on {-1,+1}^n. Input x_i = +1 contributes 2^(i-1) to the
 * truth-table index; points are passed as n int8 values in {-1,+1}. */
TD_API td_status td_function_from_spec(const char* spec_json, td_function** out);
TD_API td_status td_function_load(const char* path, td_function** out);
TD_API td_status td_function_random_monotone(int n, uint64_t seed, td_function** out);
TD_API td_status td_function_to_spec(const td_function* f, char** out_json);
TD_API td_status td_function_arity(const td_function* f, int* out);
TD_API td_status td_function_eval(const td_function* f, const int8_t* x, int* out);
TD_API td_status td_function_expectation(const td_function* f, char** out_fraction, double* out_value);
TD_API td_status td_function_influence(const td_function* f, int coord, char** out_fraction, double* out_value);
TD_API td_status td_function_is_monotone(const td_function* f, int* out);
TD_API void td_function_free(td_function* f);

/* Decision trees in the nested JSON form. */
TD_API td_status td_tree_parse(const char* json, td_tree** out);
TD_API td_status td_tree_load(const char* path, td_tree** out);
TD_API td_status td_tree_to_json(const td_tree* t, char** out_json);
TD_API td_status td_tree_size(const td_tree* t, int* out);
TD_API td_status td_tree_depth(const td_tree* t, int* out);
TD_API td_status td_tree_distance(const td_tree* t, const td_function* f, char** out_fraction, double* out_value);
TD_API void td_tree_free(td_tree* t);

/* Impurity functions: "gini", "entropy", "km" or a tabulated file path. */
TD_API td_status td_impurity_resolve(const char* name_or_path, td_impurity** out);
TD_API td_status td_impurity_eval(const td_impurity* g, double p, double* out);
TD_API td_status td_impurity_kappa(const td_impurity* g, double* out);
TD_API void td_impurity_free(td_impurity* g);

/* Top-down growth. impurity == NULL selects the influence criterion. */
TD_API td_status td_grow(const td_function* f, const td_impurity* impurity, int budget, int stop_on_zero_gain,
                         td_growth** out);
TD_API td_status td_growth_size(const td_growth* g, int* out);
TD_API td_status td_growth_distance(const td_growth* g, char** out_fraction, double* out_value);
TD_API td_status td_growth_tree(const td_growth* g, td_tree** out);
TD_API td_status td_growth_trace_csv(const td_growth* g, char** out_csv);
TD_API void td_growth_free(td_growth* g);

/* Minimum error over trees with at most `size` leaves (n <= 12). Either
 * out-parameter may be NULL. */
TD_API td_status td_opt(const td_function* f, int size, char** out_fraction, td_tree** out_witness);

/* Experiments. config_json is an object with "kind" plus kind-specific keys.
 * td_experiment_run returns TD_OK even when checks fail; inspect
 * td_result_all_pass. */
TD_API td_status td_experiment_run(const char* config_json, td_result** out);
TD_API td_status td_result_summary(const td_result* r, char** out_json);
TD_API td_status td_result_all_pass(const td_result* r, int* out);
TD_API td_status td_result_file_count(const td_result* r, int* out);
TD_API td_status td_result_file_name(const td_result* r, int index, char** out_name);
TD_API td_status td_result_file(const td_result* r, const char* name, char** out_contents);
/* Writes summary.json, every file and plotdata/ under dir. */
TD_API td_status td_result_write(const td_result* r, const char* dir);
TD_API void td_result_free(td_result* r);

/* Runs, writes the bundle when the config names an "out" directory, and
 * returns TD_ERR_CHECK_FAILED when any check fails (the summary is still
 * returned). out_summary_json may be NULL. */
TD_API td_status td_run_experiment(const char* config_json, char** out_summary_json);

#ifdef __cplusplus
}
#endif

#endif /* TOPDOWN_TOPDOWN_H */
