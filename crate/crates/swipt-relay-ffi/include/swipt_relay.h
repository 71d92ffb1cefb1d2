/* C interface to the swipt-relay UAV relay simulator. Generated by cbindgen; do not edit. */

#ifndef SWIPT_RELAY_H
#define SWIPT_RELAY_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes of every fallible entry point.
 */
typedef enum SwiptRelayStatus {
  SWIPT_RELAY_STATUS_OK = 0,
  /**
   * A required pointer argument was NULL.
   */
  SWIPT_RELAY_STATUS_NULL_ARGUMENT = 1,
  /**
   * A string argument was not valid UTF-8.
   */
  SWIPT_RELAY_STATUS_INVALID_UTF8 = 2,
  /**
   * Arguments were syntactically valid but rejected (unknown key, bad
   * value, unknown scenario or figure number).
   */
  SWIPT_RELAY_STATUS_INVALID_ARGUMENT = 3,
  /**
   * The simulation or optimization itself failed.
   */
  SWIPT_RELAY_STATUS_RUNTIME_ERROR = 4,
} SwiptRelayStatus;

/**
 * Opaque configuration handle (create, tweak, run, free).
 */
typedef struct SwiptRelayConfig SwiptRelayConfig;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Version of the underlying simulator crate as a static string.
 */
const char *swipt_relay_version(void);

/**
 * Copy of the calling thread's most recent error message, or NULL when no
 * error has occurred. Free with [`swipt_relay_string_free`].
 */
char *swipt_relay_last_error_message(void);

/**
 * Release a string returned by this library.
 *
 * # Safety
 * `s` must be NULL or a pointer previously returned by one of the
 * string-producing functions here, not yet freed.
 */
void swipt_relay_string_free(char *s);

/**
 * Fresh configuration handle holding the shipped defaults. Never NULL.
 */
struct SwiptRelayConfig *swipt_relay_config_new(void);

/**
 * Load defaults merged with the flat `key = value` file at `path`.
 *
 * # Safety
 * `path` must point to a NUL-terminated string and `out` must be a valid
 * pointer; on success `*out` owns the new handle.
 */
enum SwiptRelayStatus swipt_relay_config_load(const char *path, struct SwiptRelayConfig **out);

/**
 * Release a configuration handle.
 *
 * # Safety
 * `config` must be NULL or a handle from this library, not yet freed.
 */
void swipt_relay_config_free(struct SwiptRelayConfig *config);

/**
 * Set one configuration key (dotted schema name) from its textual value.
 *
 * # Safety
 * `config` must be a live handle; `key` and `value` must be NUL-terminated
 * strings.
 */
enum SwiptRelayStatus swipt_relay_config_set(struct SwiptRelayConfig *config,
                                             const char *key,
                                             const char *value);

/**
 * Read one configuration key as a newly allocated string.
 *
 * # Safety
 * `config` must be a live handle, `key` a NUL-terminated string, `out` a
 * valid pointer.
 */
enum SwiptRelayStatus swipt_relay_config_get(const struct SwiptRelayConfig *config,
                                             const char *key,
                                             char **out);

/**
 * Run one relay cycle and return the full report as a JSON string.
 *
 * `scenario` is the ASCII code of 'A' or 'B'.
 *
 * # Safety
 * `config` must be a live handle and `out_json` a valid pointer; on
 * success `*out_json` owns the string.
 */
enum SwiptRelayStatus swipt_relay_run_cycle_json(const struct SwiptRelayConfig *config,
                                                 uint8_t scenario,
                                                 char **out_json);

/**
 * Largest user count a feasible cycle can serve under the configured
 * scenario parameters.
 *
 * # Safety
 * `config` must be a live handle and `out_count` a valid pointer.
 */
enum SwiptRelayStatus swipt_relay_max_users(const struct SwiptRelayConfig *config,
                                            uint8_t scenario,
                                            uint64_t *out_count);

/**
 * Build the harvesting program, run the three solvers and the first-order
 * audit, and return everything as a JSON string.
 *
 * # Safety
 * `config` must be a live handle and `out_json` a valid pointer.
 */
enum SwiptRelayStatus swipt_relay_optimize_json(const struct SwiptRelayConfig *config,
                                                bool threshold_from_cycle,
                                                uint32_t grid_resolution,
                                                char **out_json);

/**
 * Reproduce one of the trend experiments (figures 2 through 8) and return
 * its table as CSV text.
 *
 * # Safety
 * `config` must be a live handle and `out_csv` a valid pointer.
 */
enum SwiptRelayStatus swipt_relay_figure_csv(const struct SwiptRelayConfig *config,
                                             uint32_t figure,
                                             char **out_csv);

/**
 * Propulsion power of the configured airframe at forward speed `speed`,
 * standard model variant. Hover power is `speed = 0`.
 *
 * # Safety
 * `config` must be a live handle and `out_watts` a valid pointer.
 */
enum SwiptRelayStatus swipt_relay_propulsion_power(const struct SwiptRelayConfig *config,
                                                   double speed,
                                                   double *out_watts);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SWIPT_RELAY_H */
