/* qclab: constrained quantum-channel capacity laboratory.
 *
 * C interface to the shared library. All structured data crosses the
 * boundary as JSON text; returned strings are owned by the caller and must
 * be released with qcl_string_free().
 */
#ifndef QCLAB_H_
#define QCLAB_H_

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum qcl_status {
  QCL_OK = 0,
  QCL_ASSERTION_FAILED = 1, /* a declared scenario/selftest check failed */
  QCL_PARSE_ERROR = 2,      /* malformed input file or JSON */
  QCL_VALIDATION_ERROR = 3, /* well-formed input violating an invariant */
  QCL_RUNTIME_ERROR = 4,    /* anything else */
  QCL_INVALID_HANDLE = 5
} qcl_status;

/* Opaque session handle; owns error state. Sessions are independent and may
 * be used from different threads (one thread per session). */
typedef struct qcl_session qcl_session;

qcl_session* qcl_session_new(void);
void qcl_session_free(qcl_session* s);

/* Message for the most recent failing call on this session. */
const char* qcl_last_error(const qcl_session* s);

/* Library version string. */
const char* qcl_version(void);

/* Run a scenario file: executes tasks, writes report files plus summary.json
 * under out_dir, and stores the machine-readable summary in *summary_json
 * when non-NULL. jobs <= 1 runs tasks sequentially. seed/restarts <= 0 and
 * tol <= 0 mean "no override". */
qcl_status qcl_run_scenario_file(qcl_session* s, const char* path,
                                 const char* out_dir, int jobs,
                                 const char* seed_decimal, int restarts,
                                 int max_iters, double tol,
                                 char** summary_json);

/* Same, but the scenario document is passed as a JSON string. */
qcl_status qcl_run_scenario_string(qcl_session* s, const char* scenario_json,
                                   const char* out_dir, int jobs,
                                   const char* seed_decimal, int restarts,
                                   int max_iters, double tol,
                                   char** summary_json);

/* Run the bundled self test. level is "quick" or "full"; a JSON report is
 * stored in *report_json when non-NULL. */
qcl_status qcl_selftest(qcl_session* s, const char* level, int jobs,
                        int verbose, char** report_json);

/* Evaluate one operation: request is {"op": "...", "args": {...}} with the
 * same argument conventions as scenario tasks. */
qcl_status qcl_eval(qcl_session* s, const char* request_json,
                    char** result_json);

/* Names of the operations reachable from scenario tasks, as a JSON array. */
qcl_status qcl_task_names(qcl_session* s, char** names_json);

void qcl_string_free(char* str);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* QCLAB_H_ */
