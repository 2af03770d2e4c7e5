/* tanglesim C API: scenario-driven simulation of a DAG-based UTXO ledger
 * with cooperative consensus. Opaque handles + status codes; every function
 * is safe to call from C. Error details for the calling thread are available
 * via tgs_last_error().
 */
#ifndef TANGLESIM_H
#define TANGLESIM_H

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum tgs_status {
    TGS_OK = 0,
    TGS_ERR_BADARG = 1,   /* null pointer / malformed argument */
    TGS_ERR_CONFIG = 2,   /* scenario fails to parse or validate */
    TGS_ERR_IO = 3,       /* file cannot be read or written */
    TGS_ERR_RUNTIME = 4,  /* simulation or analysis failure */
    TGS_ERR_UNKNOWN = 5   /* unknown fixture or enum value */
} tgs_status;

typedef struct tgs_scenario tgs_scenario;
typedef struct tgs_run tgs_run;

const char* tgs_version(void);
const char* tgs_status_name(tgs_status status);

/* Thread-local message describing the most recent failure. */
const char* tgs_last_error(void);

/* Scenario lifecycle. */
tgs_status tgs_scenario_parse_file(const char* path, tgs_scenario** out);
tgs_status tgs_scenario_parse_text(const char* json_text, tgs_scenario** out);
tgs_status tgs_scenario_set_seed(tgs_scenario* scenario, uint64_t seed);
/* Semantic validation; on TGS_ERR_CONFIG the violation list (one per line)
 * is in tgs_last_error(). */
tgs_status tgs_scenario_validate(const tgs_scenario* scenario);
void tgs_scenario_free(tgs_scenario* scenario);

/* Simulation. */
tgs_status tgs_simulate(const tgs_scenario* scenario, tgs_run** out);
/* Writes trace.log, metrics.csv and summary.json into the directory
 * (created if missing). theta is "2/3"-style; NULL means 2/3. */
tgs_status tgs_run_write(const tgs_run* run, const char* out_dir, const char* theta);
/* Borrowed pointer, valid until the run handle is freed. */
const char* tgs_run_summary_json(tgs_run* run);
void tgs_run_free(tgs_run* run);

/* Post-hoc analysis of a trace directory written by tgs_run_write.
 * On success *json_out is a malloc'd string; free with tgs_string_free. */
tgs_status tgs_analyze(const char* trace_dir, const char* theta, char** json_out);

/* Bundled fixtures (tgs_inspect(NULL, ...) lists the names). */
tgs_status tgs_inspect(const char* fixture_name, char** text_out);

void tgs_string_free(char* s);

#ifdef __cplusplus
}
#endif

#endif /* TANGLESIM_H */
