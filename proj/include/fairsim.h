/* fairsim: fairness-aware re-ranking simulator.
 *
 * C interface to the simulation engine. All functions returning
 * fairsim_status yield FAIRSIM_OK on success; on failure the return code
 * classifies the error and fairsim_last_error() carries a message for the
 * calling thread. Handles are opaque and owned by the caller via the
 * matching _free function.
 */
#ifndef FAIRSIM_H
#define FAIRSIM_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum fairsim_status {
    FAIRSIM_OK = 0,
    FAIRSIM_ERR_INVALID_ARGUMENT = 1, /* null handle or out pointer */
    FAIRSIM_ERR_CONFIG = 2,           /* bad config file, key or value */
    FAIRSIM_ERR_DATA = 3,             /* unreadable or inconsistent dataset */
    FAIRSIM_ERR_IO = 4,               /* filesystem failure */
    FAIRSIM_ERR_INTERNAL = 5
} fairsim_status;

typedef struct fairsim_config fairsim_config;
typedef struct fairsim_result fairsim_result;

const char* fairsim_version(void);

/* Message for the most recent failure on this thread; empty string if none. */
const char* fairsim_last_error(void);

/* --- Configuration ------------------------------------------------------ */

fairsim_status fairsim_config_open(const char* path, fairsim_config** out_config);

/* Overrides one value, e.g. fairsim_config_set(cfg, "run.seed", "7"). */
fairsim_status fairsim_config_set(fairsim_config* config, const char* key, const char* value);

void fairsim_config_free(fairsim_config* config);

/* --- Experiments --------------------------------------------------------- */

/* Streams the configured mechanism cell plus the no-agent baseline. */
fairsim_status fairsim_run(const fairsim_config* config, fairsim_result** out_result);

/* Streams every allocation x choice combination plus the baseline. */
fairsim_status fairsim_sweep(const fairsim_config* config, fairsim_result** out_result);

/* Scores a delivered-lists file offline against the config's data and
 * agents. Pass as_baseline nonzero when the file holds baseline lists. */
fairsim_status fairsim_evaluate(const fairsim_config* config, const char* lists_path,
                                int as_baseline, fairsim_result** out_result);

/* Writes ratings.csv, features.csv and candidates.csv for the config's
 * [synthetic] section into out_dir. */
fairsim_status fairsim_synthesize(const fairsim_config* config, const char* out_dir);

/* --- Results ------------------------------------------------------------- */

/* Summary table as CSV text, owned by the result handle. */
const char* fairsim_result_summary(const fairsim_result* result);

size_t fairsim_result_cell_count(const fairsim_result* result);
size_t fairsim_result_warning_count(const fairsim_result* result);

/* Writes summary.csv plus per-cell delivered/records files into out_dir. */
fairsim_status fairsim_result_write(const fairsim_result* result, const char* out_dir);

void fairsim_result_free(fairsim_result* result);

#ifdef __cplusplus
}
#endif

#endif /* FAIRSIM_H */
