#ifndef VBREP_H
#define VBREP_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

// Status codes returned by every fallible function.
typedef enum VbrepStatus {
  VBREP_STATUS_OK = 0,
  VBREP_STATUS_NULL_ARGUMENT = 1,
  VBREP_STATUS_INVALID_UTF8 = 2,
  VBREP_STATUS_PARSE = 3,
  VBREP_STATUS_UNKNOWN_FIXTURE = 4,
  VBREP_STATUS_UNKNOWN_TASK = 5,
  VBREP_STATUS_INVALID = 6,
  VBREP_STATUS_PANIC = 7,
} VbrepStatus;

// A parsed problem file.
typedef struct VbrepProblem VbrepProblem;

// The outcome of running a problem's tasks.
typedef struct VbrepReport VbrepReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failure on this thread, or null. Valid until the
// next failing call on the same thread.
const char *vbrep_last_error(void);

// Library version as a static string.
const char *vbrep_version(void);

// Parses a problem file. On a parse error `line` and `column` (either
// may be null) receive the 1-based location.
//
// # Safety
// `source` must be a NUL-terminated string; `out` must be writable.
enum VbrepStatus vbrep_problem_parse(const char *source,
                                     struct VbrepProblem **out,
                                     uintptr_t *line,
                                     uintptr_t *column);

// Loads a builtin fixture by name.
//
// # Safety
// `name` must be a NUL-terminated string; `out` must be writable.
enum VbrepStatus vbrep_problem_fixture(const char *name, struct VbrepProblem **out);

// Number of tasks, or 0 for a null handle.
//
// # Safety
// `problem` must be null or a live handle.
uintptr_t vbrep_problem_task_count(const struct VbrepProblem *problem);

// # Safety
// `problem` must be null or a handle not yet freed.
void vbrep_problem_free(struct VbrepProblem *problem);

// Runs every task, or only the one named `task` when it is non-null.
//
// # Safety
// `problem` must be a live handle, `task` null or NUL-terminated, `out`
// writable.
enum VbrepStatus vbrep_run(const struct VbrepProblem *problem,
                           uint64_t seed,
                           const char *task,
                           struct VbrepReport **out);

// True when every task matched its expectation.
//
// # Safety
// `report` must be null or a live handle.
bool vbrep_report_passed(const struct VbrepReport *report);

// CLI-style exit code: 0 all pass, 1 some failure, 2 for a null handle.
//
// # Safety
// `report` must be null or a live handle.
int32_t vbrep_report_exit_code(const struct VbrepReport *report);

// # Safety
// `report` must be null or a live handle.
uintptr_t vbrep_report_task_count(const struct VbrepReport *report);

// JSON-lines report. Free with [`vbrep_string_free`].
//
// # Safety
// `report` must be null or a live handle.
char *vbrep_report_json(const struct VbrepReport *report);

// Human-readable report. Free with [`vbrep_string_free`].
//
// # Safety
// `report` must be null or a live handle.
char *vbrep_report_human(const struct VbrepReport *report);

// # Safety
// `report` must be null or a handle not yet freed.
void vbrep_report_free(struct VbrepReport *report);

// # Safety
// `s` must be null or a string returned by this library, not yet freed.
void vbrep_string_free(char *s);

// Runs a randomized suite. `violations` receives the number of
// instances on which the two computations disagreed.
//
// # Safety
// `name` must be NUL-terminated; the out-pointers null or writable.
enum VbrepStatus vbrep_run_suite(const char *name,
                                 uint64_t seed,
                                 uintptr_t count,
                                 uintptr_t *instances,
                                 uintptr_t *violations);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* VBREP_H */
