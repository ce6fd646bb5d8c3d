/* C API for the stagesim core: opaque handles and integer status codes.
 * Every function returns STAGESIM_OK (0) on success; on failure the code
 * categorizes the error and stagesim_last_error() carries the message for
 * the calling thread. */
#ifndef STAGESIM_C_H
#define STAGESIM_C_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum stagesim_status {
  STAGESIM_OK = 0,
  STAGESIM_ERR_VERIFY = 1,
  STAGESIM_ERR_CONFIG = 2,
  STAGESIM_ERR_CONSTRUCTION = 3,
  STAGESIM_ERR_PREFIX_CONFLICT = 10,
  STAGESIM_ERR_CAPACITY_EXCEEDED = 11,
  STAGESIM_ERR_NON_MONOTONE_TARGET = 12,
  STAGESIM_ERR_NOT_PREFIX_FREE_LIMIT = 13,
  STAGESIM_ERR_Q_TOO_SMALL = 14,
  STAGESIM_ERR_NO_EXPONENT = 15,
  STAGESIM_ERR_MONOTONICITY_BREAK = 16,
  STAGESIM_ERR_CONE_NOT_EMPTY = 17,
  STAGESIM_ERR_TARGET_OUT_OF_RANGE = 18,
  STAGESIM_ERR_NON_MONOTONE_OUTER = 19,
  STAGESIM_ERR_HORIZON_EXCEEDED = 20,
  STAGESIM_ERR_INVALID_ARGUMENT = 21,
  STAGESIM_ERR_IO = 22
} stagesim_status;

typedef struct stagesim_scenario stagesim_scenario;
typedef struct stagesim_machine stagesim_machine;

/* Message of the most recent failure on this thread; never NULL. */
const char* stagesim_last_error(void);

/* ---- scenarios ---------------------------------------------------- */

stagesim_status stagesim_scenario_load(const char* config_path,
                                       stagesim_scenario** out);
stagesim_status stagesim_scenario_load_string(const char* config_json,
                                              stagesim_scenario** out);
stagesim_status stagesim_scenario_load_demo(const char* demo_name,
                                            stagesim_scenario** out);
void stagesim_scenario_free(stagesim_scenario* scenario);

stagesim_status stagesim_scenario_set_horizon(stagesim_scenario* scenario,
                                              int horizon);
/* Runs the construction directives. */
stagesim_status stagesim_scenario_build(stagesim_scenario* scenario);
/* Writes machine tables (and trace CSVs when with_traces != 0). */
stagesim_status stagesim_scenario_write(stagesim_scenario* scenario,
                                        const char* out_dir, int with_traces);
/* Runs the invariant suites. Returns STAGESIM_OK when everything holds,
 * STAGESIM_ERR_VERIFY when violations were found; violations_out (may be
 * NULL) receives the violation count. The report text is written to
 * report_path when it is non-NULL. */
stagesim_status stagesim_scenario_verify(stagesim_scenario* scenario,
                                         const char* report_path,
                                         int* violations_out);
/* Copies the last verify report into buf (NUL-terminated, truncated to
 * buf_len). Returns the untruncated length. */
size_t stagesim_scenario_report_text(const stagesim_scenario* scenario,
                                     char* buf, size_t buf_len);

/* ---- demos --------------------------------------------------------- */

int stagesim_demo_count(void);
const char* stagesim_demo_name(int index); /* NULL when out of range */

/* ---- machine tables ------------------------------------------------ */

/* Loads a machine table CSV; rejects tables violating monotonicity. */
stagesim_status stagesim_machine_load_csv(const char* csv_path,
                                          const char* machine_id,
                                          stagesim_machine** out);
/* Borrows a machine from a built scenario (owned by the scenario). */
stagesim_status stagesim_scenario_machine(stagesim_scenario* scenario,
                                          const char* machine_id,
                                          const stagesim_machine** out);
void stagesim_machine_free(stagesim_machine* machine);

int stagesim_machine_horizon(const stagesim_machine* machine);
size_t stagesim_machine_entry_count(const stagesim_machine* machine);
/* Exact stage measure of a class; class_name is "TOTAL" or
 * "ENDS_IN_ZEROS". The dyadic is rendered as text into buf. */
stagesim_status stagesim_machine_stage_measure(const stagesim_machine* machine,
                                               const char* class_name,
                                               int stage, char* buf,
                                               size_t buf_len);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* STAGESIM_C_H */
