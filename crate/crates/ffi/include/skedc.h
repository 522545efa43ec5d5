#ifndef SKEDC_H
#define SKEDC_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Outcome of a solve.
typedef enum SkedcSolveStatus {
  SKEDC_SOLVE_STATUS_OPTIMAL = 0,
  SKEDC_SOLVE_STATUS_FEASIBLE = 1,
  SKEDC_SOLVE_STATUS_INFEASIBLE = 2,
  SKEDC_SOLVE_STATUS_TIME_LIMIT = 3,
} SkedcSolveStatus;

// Result code of every fallible call.
typedef enum SkedcStatus {
  SKEDC_STATUS_OK = 0,
  SKEDC_STATUS_NULL_ARGUMENT = 1,
  SKEDC_STATUS_INVALID_UTF8 = 2,
  SKEDC_STATUS_PARSE_ERROR = 3,
  SKEDC_STATUS_INVALID_PROBLEM = 4,
  SKEDC_STATUS_UNREPRESENTABLE = 5,
  SKEDC_STATUS_NO_SCHEDULE = 6,
  SKEDC_STATUS_PANIC = 7,
} SkedcStatus;

// A parsed instance with its scenario constraints.
typedef struct SkedcProblem SkedcProblem;

// Result of `skedc_problem_solve`.
typedef struct SkedcReport SkedcReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread, or NULL. Valid until the
// next call into this library from the same thread.
const char *skedc_last_error_message(void);

// Library version, a static string.
const char *skedc_version(void);

// Parses `.fjs` text and optional `.sched` text (may be NULL) into `*out`.
enum SkedcStatus skedc_problem_parse(const char *fjs, const char *sched, struct SkedcProblem **out);

void skedc_problem_free(struct SkedcProblem *problem);

// Validates the problem and writes the violation count to `*count`.
// Returns `InvalidProblem` if any were found; the last error lists them.
enum SkedcStatus skedc_problem_validate(const struct SkedcProblem *problem, size_t *count);

// LP-format text of the model.
enum SkedcStatus skedc_problem_build_lp(const struct SkedcProblem *problem, char **out);

// JSON dump of the model.
enum SkedcStatus skedc_problem_build_json(const struct SkedcProblem *problem, char **out);

// Solves by branch-and-bound. A negative `time_limit_secs` means no limit;
// `workers` 0 is treated as 1.
enum SkedcStatus skedc_problem_solve(const struct SkedcProblem *problem,
                                     double time_limit_secs,
                                     uint32_t workers,
                                     struct SkedcReport **out);

void skedc_report_free(struct SkedcReport *report);

// Solve status; `report` must not be NULL.
enum SkedcSolveStatus skedc_report_status(const struct SkedcReport *report);

// Makespan as `num/den`; `NoSchedule` if the search found none.
enum SkedcStatus skedc_report_makespan(const struct SkedcReport *report,
                                       int64_t *num,
                                       int64_t *den);

// Proven lower bound as `num/den`.
enum SkedcStatus skedc_report_lower_bound(const struct SkedcReport *report,
                                          int64_t *num,
                                          int64_t *den);

// Search nodes explored; `report` must not be NULL.
uint64_t skedc_report_nodes(const struct SkedcReport *report);

// Schedule JSON of the best schedule.
enum SkedcStatus skedc_report_schedule_json(const struct SkedcReport *report, char **out);

// Names of the constraints proving infeasibility, space separated; empty
// when none were recorded.
enum SkedcStatus skedc_report_witness(const struct SkedcReport *report, char **out);

void skedc_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SKEDC_H */
