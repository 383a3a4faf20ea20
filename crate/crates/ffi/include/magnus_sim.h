#ifndef MAGNUS_SIM_H
#define MAGNUS_SIM_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result code of every fallible call.
typedef enum MsStatus {
  MS_STATUS_OK = 0,
  MS_STATUS_NULL_POINTER = 1,
  MS_STATUS_INVALID_UTF8 = 2,
  MS_STATUS_INVALID_ARGUMENT = 3,
  MS_STATUS_NOT_CONVERGED = 4,
  MS_STATUS_NUMERICAL = 5,
  MS_STATUS_IO = 6,
  MS_STATUS_BUFFER_TOO_SMALL = 7,
  MS_STATUS_PANIC = 8,
} MsStatus;

// Exit status of a study, matching the command-line runner.
typedef enum MsStudyStatus {
  MS_STUDY_STATUS_PASS = 0,
  MS_STUDY_STATUS_FAIL = 1,
  MS_STUDY_STATUS_INCONCLUSIVE = 3,
} MsStudyStatus;

// A time-dependent Hamiltonian.
typedef struct MsHamiltonian MsHamiltonian;

// The finished output of one study.
typedef struct MsStudy MsStudy;

// Inputs of a long-time cost estimate.
typedef struct MsCostQuery {
  double alpha;
  double t_total;
  double epsilon;
  double c_h;
  double order_exponent;
  double deriv_sup;
  size_t n_a;
} MsCostQuery;

// Step count, quadrature size and query totals of a cost estimate.
typedef struct MsResourceEstimate {
  double n_steps_exact;
  double n_steps;
  double step;
  double per_step_delta;
  double quad_points;
  double block_uses_per_step;
  double ham_t_queries;
  double comp_queries;
  double gate_count;
  double budget;
  double failure_prob_bound;
} MsResourceEstimate;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Library version as a static NUL-terminated string.
const char *ms_version(void);

// Copies the last failure message of this thread; empty when none occurred.
//
// # Safety
// `buf` must be valid for `capacity` bytes; `needed` may be null.
enum MsStatus ms_last_error_message(char *buf, size_t capacity, size_t *needed);

// `H(t) = σz + cos(t) σx`.
//
// # Safety
// `out` must be valid for a write.
enum MsStatus ms_hamiltonian_pauli_cosine(struct MsHamiltonian **out);

// A seeded random smooth Hamiltonian on `n_qubits` qubits with `‖H(t)‖ ≤ alpha`.
//
// # Safety
// `out` must be valid for a write.
enum MsStatus ms_hamiltonian_random_smooth(size_t n_qubits,
                                           double alpha,
                                           uint64_t seed,
                                           struct MsHamiltonian **out);

// # Safety
// `h` must be a live handle; `dim` must be valid for a write.
enum MsStatus ms_hamiltonian_dim(const struct MsHamiltonian *h, size_t *dim);

// Samples `H(t)` into row-major arrays of at least `dim²` entries.
//
// # Safety
// `h` must be a live handle; `re` and `im` must be valid for `len` writes.
enum MsStatus ms_hamiltonian_sample(const struct MsHamiltonian *h,
                                    double t,
                                    double *re,
                                    double *im,
                                    size_t len);

// # Safety
// `h` must be null or a handle not yet freed.
void ms_hamiltonian_free(struct MsHamiltonian *h);

// Second-order Magnus propagator over `[0, t_total]` with `n_steps` steps and
// `n_quad` Riemann points per step, written row-major.
//
// # Safety
// `h` must be a live handle; `re` and `im` must be valid for `len` writes.
enum MsStatus ms_evolve_magnus2(const struct MsHamiltonian *h,
                                double t_total,
                                size_t n_steps,
                                size_t n_quad,
                                double *re,
                                double *im,
                                size_t len);

// Long-time cost estimate.
//
// # Safety
// `query` must be readable and `out` writable.
enum MsStatus ms_plan_resources(const struct MsCostQuery *query, struct MsResourceEstimate *out);

// Runs the named study. `config_json` uses the runner's config format and
// may be null for the defaults. Nothing is written to disk.
//
// # Safety
// String arguments must be NUL-terminated; `out` must be valid for a write.
enum MsStatus ms_study_run(const char *study, const char *config_json, struct MsStudy **out);

// # Safety
// `study` must be a live handle; the outputs must be valid for writes.
enum MsStatus ms_study_status(const struct MsStudy *study,
                              enum MsStudyStatus *status,
                              size_t *n_rows);

// The study's CSV table, comment header included.
//
// # Safety
// `study` must be a live handle; `buf` must be valid for `capacity` bytes.
enum MsStatus ms_study_csv(const struct MsStudy *study, char *buf, size_t capacity, size_t *needed);

// One `STATUS name: detail` line per assertion of the study.
//
// # Safety
// `study` must be a live handle; `buf` must be valid for `capacity` bytes.
enum MsStatus ms_study_checks(const struct MsStudy *study,
                              char *buf,
                              size_t capacity,
                              size_t *needed);

// # Safety
// `study` must be null or a handle not yet freed.
void ms_study_free(struct MsStudy *study);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* MAGNUS_SIM_H */
