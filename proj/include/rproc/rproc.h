/* C interface to the reinforced-process toolkit.
 *
 * Every function that can fail returns an rproc_status. On failure a message
 * is available from rproc_last_error() on the calling thread. Strings handed
 * out through char** parameters are heap allocated and must be released with
 * rproc_string_free().
 */
#ifndef RPROC_RPROC_H
#define RPROC_RPROC_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define RPROC_API __declspec(dllexport)
#elif defined(__GNUC__)
#define RPROC_API __attribute__((visibility("default")))
#else
#define RPROC_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum rproc_status {
  RPROC_OK = 0,
  RPROC_INVALID_ARGUMENT = 1,
  RPROC_NOT_POSITIVE_DEFINITE = 2,
  RPROC_NUMERICAL = 3,
  RPROC_IO = 4,
  RPROC_PARSE = 5,
  RPROC_OUT_OF_RANGE = 6,
  RPROC_CHECK_FAILED = 7, /* a verification or report found a failure */
  RPROC_INTERNAL = 99
} rproc_status;

typedef enum rproc_format { RPROC_FORMAT_CSV = 0, RPROC_FORMAT_JSON = 1 } rproc_format;

typedef struct rproc_graph rproc_graph;

RPROC_API const char* rproc_version(void);
RPROC_API const char* rproc_status_name(rproc_status status);
/* Message of the last failure on this thread; empty when none. */
RPROC_API const char* rproc_last_error(void);
RPROC_API void rproc_string_free(char* s);

/* Graphs: {"vertices": [...], "edges": [[u, v, w], ...]}. */
RPROC_API rproc_status rproc_graph_parse(const char* json, rproc_graph** out);
RPROC_API rproc_status rproc_graph_load(const char* path, rproc_graph** out);
RPROC_API void rproc_graph_free(rproc_graph* graph);
RPROC_API size_t rproc_graph_num_vertices(const rproc_graph* graph);
RPROC_API size_t rproc_graph_num_edges(const rproc_graph* graph);
RPROC_API size_t rproc_graph_max_degree(const rproc_graph* graph);
RPROC_API rproc_status rproc_graph_to_json(const rproc_graph* graph, char** out);
/* The 2^r subdivision in the same schema; sub-edges inherit their weight. */
RPROC_API rproc_status rproc_subdivide(const rproc_graph* graph, unsigned r,
                                       char** out_json);

/* beta ~ nu^W with W the graph weights. CSV: header of vertex ids, one row
 * per sample. */
typedef struct rproc_beta_options {
  uint64_t seed;
  size_t samples;
  rproc_format format;
} rproc_beta_options;
RPROC_API void rproc_beta_options_init(rproc_beta_options* options);
RPROC_API rproc_status rproc_sample_beta(const rproc_graph* graph,
                                         const rproc_beta_options* options,
                                         char** out);

typedef enum rproc_model {
  RPROC_MODEL_VRJP = 0, /* vertex-reinforced jump process, weights W */
  RPROC_MODEL_ERRW = 1, /* edge-reinforced walk, initial weights = edge weights */
  RPROC_MODEL_MJP = 2   /* Markov jump process, conductances W, pi = 1 */
} rproc_model;

typedef enum rproc_vrjp_route {
  RPROC_VRJP_DIRECT = 0, /* competing clocks with rates W_ij L_j */
  RPROC_VRJP_MIXTURE = 1 /* beta ~ nu^W, then the conditional Markov chain */
} rproc_vrjp_route;

typedef struct rproc_simulate_options {
  rproc_model model;
  rproc_vrjp_route route;
  int exchangeable_time; /* VRJP direct: report waits in the D(t) scale */
  const char* start;     /* vertex id; NULL or "" means the first vertex */
  size_t steps;
  uint64_t seed;
  rproc_format format;
} rproc_simulate_options;
RPROC_API void rproc_simulate_options_init(rproc_simulate_options* options);
/* CSV columns step, vertex, wait; the wait is empty where undefined. */
RPROC_API rproc_status rproc_simulate(const rproc_graph* graph,
                                      const rproc_simulate_options* options,
                                      char** out);

/* Restriction of a path (CSV as produced by rproc_simulate) to the vertex
 * subset J, with self-loops removed. `subset` is a comma-separated list of
 * vertex ids. */
RPROC_API rproc_status rproc_restrict_path(const rproc_graph* graph,
                                           const char* path_csv,
                                           const char* subset,
                                           rproc_format format, char** out);
/* Effective weights W^J(beta_I), beta_I from the wired field on I + {rho},
 * for `samples` seeded draws; JSON output with the wired weights. */
RPROC_API rproc_status rproc_restrict_weights(const rproc_graph* graph,
                                              const char* subset,
                                              const char* rho, size_t samples,
                                              uint64_t seed, char** out_json);

typedef struct rproc_flow_options {
  unsigned r;
  unsigned l;
  const double* alphas;
  size_t num_alphas;
  const char* dist; /* "gamma:a=<shape>" or "const:w=<value>" */
  size_t samples;
  uint64_t seed;
  rproc_format format;
} rproc_flow_options;
RPROC_API void rproc_flow_options_init(rproc_flow_options* options);
/* Monte Carlo moments along the flow on one base edge against the bounds.
 * Returns RPROC_CHECK_FAILED (with output) when some bound is exceeded by
 * more than 4 standard errors. */
RPROC_API rproc_status rproc_flow(const rproc_flow_options* options, char** out);

typedef struct rproc_bounds_options {
  double alpha;
  double moment;   /* E[W^alpha] at level r */
  double mean_log; /* E[log W] at level r */
  unsigned r;
  unsigned l;
  double c3;           /* <= 0: no recurrence check */
  unsigned max_degree; /* enters only through c3 */
  rproc_format format;
} rproc_bounds_options;
RPROC_API void rproc_bounds_options_init(rproc_bounds_options* options);
RPROC_API rproc_status rproc_bounds(const rproc_bounds_options* options, char** out);

/* Suites: restriction-mjp, mixture-vrjp, errw-gamma, flow-oracle,
 * ig-appendix, bounds. RPROC_CHECK_FAILED (with output) when a check fails,
 * RPROC_INVALID_ARGUMENT for an unknown suite. */
RPROC_API rproc_status rproc_verify(const char* suite, uint64_t seed,
                                    double scale, char** out_json);

/* Markdown table from a flow CSV. RPROC_CHECK_FAILED (with output) when a
 * row exceeds a bound. */
RPROC_API rproc_status rproc_report(const char* flow_csv, char** out_markdown,
                                    size_t* violations);

/* Numeric primitives. */
RPROC_API double rproc_c_alpha(double alpha);
RPROC_API double rproc_frac_moment(double w, double alpha);
RPROC_API double rproc_log_moment(double w);
RPROC_API double rproc_exp_integral_e1(double x);
/* n x n row-major W, beta on the complement of J (ascending), J of size nj;
 * writes the nj x nj result row-major. */
RPROC_API rproc_status rproc_effective_weights(const double* w, size_t n,
                                               const double* beta_i,
                                               const size_t* j, size_t nj,
                                               double* out);

#ifdef __cplusplus
}
#endif

#endif /* RPROC_RPROC_H */
