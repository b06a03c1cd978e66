/* attrikit shared-library C API.
 *
 * All functions returning attrikit_status report failure details through
 * attrikit_last_error(). Objects are opaque handles owned by the caller and
 * released with the matching *_free function. Strings returned through
 * char** out parameters are heap-allocated; release them with
 * attrikit_string_free.
 */
#ifndef ATTRIKIT_H
#define ATTRIKIT_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum attrikit_status {
  ATTRIKIT_OK = 0,
  ATTRIKIT_ERROR_INTERNAL = 1,
  ATTRIKIT_ERROR_VALIDATION = 2,
  ATTRIKIT_ERROR_CAPACITY = 3,
  ATTRIKIT_ERROR_UNDEFINED_METRIC = 4
} attrikit_status;

typedef struct attrikit_model attrikit_model;       /* ReLU network */
typedef struct attrikit_function attrikit_function; /* evaluable scalar function */
typedef struct attrikit_dataset attrikit_dataset;   /* rows in [0,1]^d */
typedef struct attrikit_family attrikit_family;     /* measure family (attribution method) */

const char* attrikit_version(void);
/* Message for the most recent failure on this thread. */
const char* attrikit_last_error(void);
/* Worker threads for parallel sections; n <= 0 restores automatic selection
 * (ATTRIKIT_THREADS environment variable, then hardware concurrency).
 * Results never depend on the worker count. */
void attrikit_set_threads(int n);

void attrikit_string_free(char* s);

/* ---- models (attrikit-relu/1 documents) ---- */
attrikit_status attrikit_model_load_json(const char* text, attrikit_model** out);
attrikit_status attrikit_model_load_file(const char* path, attrikit_model** out);
attrikit_status attrikit_model_to_json(const attrikit_model* model, char** out_text);
int attrikit_model_input_dim(const attrikit_model* model);
attrikit_status attrikit_model_forward(const attrikit_model* model, const double* x, size_t dim,
                                       double* out_value);
void attrikit_model_free(attrikit_model* model);

/* ---- functions ---- */
/* Expression over variables x1..xdim with operators + - * / ^ and functions
 * sin, cos, exp, relu. */
attrikit_status attrikit_function_parse(const char* expression, int dim,
                                        attrikit_function** out);
/* "attrikit-function/1" document: {"format", "dim", "expr"}. */
attrikit_status attrikit_function_load_json(const char* text, attrikit_function** out);
attrikit_status attrikit_function_from_model(const attrikit_model* model,
                                             attrikit_function** out);
int attrikit_function_dim(const attrikit_function* fn);
attrikit_status attrikit_function_eval(const attrikit_function* fn, const double* x, size_t dim,
                                       double* out_value);
void attrikit_function_free(attrikit_function* fn);

/* ---- datasets (CSV with a header row, d numeric columns in [0,1]) ---- */
attrikit_status attrikit_dataset_load_csv(const char* text, attrikit_dataset** out);
attrikit_status attrikit_dataset_load_csv_file(const char* path, attrikit_dataset** out);
long long attrikit_dataset_rows(const attrikit_dataset* data);
int attrikit_dataset_columns(const attrikit_dataset* data);
void attrikit_dataset_free(attrikit_dataset* data);

/* ---- measure families ---- */
/* Presets: pdp (alias pdp-uniform), dirac-product, global-linear,
 * local-linear, conditional, marginal-product, pdp-data. Data-backed
 * presets need a dataset; bandwidth <= 0 selects the default (0.05). */
attrikit_status attrikit_family_preset(const char* name, int dim, const attrikit_dataset* data,
                                       double bandwidth, attrikit_family** out);
/* "attrikit-measure/1" document (preset name or custom descriptors). */
attrikit_status attrikit_family_load_json(const char* text, int dim,
                                          const attrikit_dataset* data, double bandwidth,
                                          attrikit_family** out);
void attrikit_family_free(attrikit_family* family);

/* ---- attribution ---- */
typedef struct attrikit_attr_options {
  const char* method;     /* "auto" | "exact" | "grid" | "mc"; NULL = auto */
  int grid_res;           /* <= 0 selects 1024 */
  long long mc_samples;   /* <= 0 selects 100000 */
  uint64_t seed;
} attrikit_attr_options;

/* Writes an "attrikit-report/1" JSON document. The model variant enables
 * the exact region-enumeration backend. */
attrikit_status attrikit_attribute_model(const attrikit_model* model,
                                         const attrikit_family* family, const double* x,
                                         size_t dim, const attrikit_attr_options* options,
                                         char** out_report_json);
attrikit_status attrikit_attribute_function(const attrikit_function* fn,
                                            const attrikit_family* family, const double* x,
                                            size_t dim, const attrikit_attr_options* options,
                                            char** out_report_json);

/* ---- linear-region geometry ---- */
/* "attrikit-regions/1" dump: pattern bits, halfspaces, vertices, volume,
 * affine coefficients per region. */
attrikit_status attrikit_regions_json(const attrikit_model* model, char** out_json);

/* ---- evaluation metrics ---- */
/* metric: "recall" | "precision". centers is d rows of d coordinates
 * (row j = center of mass for feature j). */
attrikit_status attrikit_metric_linear(const char* metric, const double* weights, size_t dim,
                                       double alpha, double beta, const double* centers,
                                       char** out_json);
/* metric: "rrecall" | "rprecision". */
attrikit_status attrikit_metric_relu(const char* metric, const attrikit_model* model,
                                     double alpha, double beta, const double* centers,
                                     char** out_json);
/* kind: "recall" | "precision"; writes 1 or 0 to out_contains. */
attrikit_status attrikit_solution_set_contains(const char* kind, const double* weights,
                                               size_t dim, double alpha, double beta, int j,
                                               const double* m, int* out_contains);
attrikit_status attrikit_relu_solution_set_contains(const attrikit_model* model,
                                                    const char* kind, double alpha, double beta,
                                                    int j, const double* m, int* out_contains);

/* ---- axiom checks ---- */
/* method: "ig" | "gxi" | "pdp-uniform"; suite: "reference" | "remainder" |
 * "all". Writes an "attrikit-axioms/1" document with one report per axiom. */
attrikit_status attrikit_axioms_check(const char* method, const char* suite, char** out_json);

/* ---- convergence table ---- */
/* CSV rows (p, phi_1..phi_d, sup_error) of the atomic-attribution sums on
 * piecewise-constant surrogates at each p, against a grid reference at
 * reference_grid_res (<= 0 selects 1024). */
attrikit_status attrikit_converge_csv(const attrikit_function* fn,
                                      const attrikit_family* family, const double* x, size_t dim,
                                      const int* p_list, size_t p_count, int reference_grid_res,
                                      char** out_csv);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* ATTRIKIT_H */
