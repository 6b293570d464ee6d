#ifndef MOTIONAL_QEC_H
#define MOTIONAL_QEC_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status code of every call.
 */
typedef enum MqecStatus {
  MQEC_STATUS_OK = 0,
  MQEC_STATUS_NULL_POINTER = 1,
  MQEC_STATUS_INVALID_UTF8 = 2,
  MQEC_STATUS_CONFIG = 3,
  MQEC_STATUS_INVALID_PARAMETER = 4,
  MQEC_STATUS_UNSUPPORTED = 5,
  MQEC_STATUS_NUMERICAL = 6,
  MQEC_STATUS_OUT_OF_RANGE = 7,
  MQEC_STATUS_BUFFER_TOO_SMALL = 8,
  MQEC_STATUS_PANIC = 9,
} MqecStatus;

/**
 * Motional axis selector.
 */
typedef enum MqecAxis {
  MQEC_AXIS_X = 0,
  MQEC_AXIS_Y = 1,
} MqecAxis;

/**
 * Configuration preset.
 */
typedef struct MqecPreset MqecPreset;

/**
 * Prepared protocol: code, decay model, detector and restoration.
 */
typedef struct MqecProtocol MqecProtocol;

/**
 * Aggregated trajectory ensemble.
 */
typedef struct MqecRun MqecRun;

/**
 * Per-cycle failure estimate.
 */
typedef struct MqecFailure {
  double gamma_tau;
  double probability;
  double std_error;
  double double_jump_exact;
} MqecFailure;

/**
 * Exact cycle with one injected jump.
 */
typedef struct MqecForcedJump {
  double mean_fidelity;
  double min_fidelity;
  double flagged_probability;
} MqecForcedJump;

/**
 * Per-cycle ensemble statistics.
 */
typedef struct MqecCycle {
  size_t cycle;
  double mean_fidelity;
  double std_error;
  double failed_fraction;
  double x_flag_fraction;
  double y_flag_fraction;
} MqecCycle;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static nul-terminated string.
 */
const char *mqec_version(void);

/**
 * Message of the last failed call on this thread, or null. Valid until the
 * next call on the same thread.
 */
const char *mqec_last_error(void);

/**
 * Loads a built-in preset by name or a JSON file by path.
 *
 * # Safety
 * `name` must be a nul-terminated string; `out` must be writable.
 */
enum MqecStatus mqec_preset_load(const char *name, struct MqecPreset **out);

/**
 * Parses a preset from JSON text.
 *
 * # Safety
 * `json` must be a nul-terminated string; `out` must be writable.
 */
enum MqecStatus mqec_preset_from_json(const char *json, struct MqecPreset **out);

/**
 * Applies one `key=value` override, e.g. `protocol.gamma=50`. The preset is
 * unchanged on failure.
 *
 * # Safety
 * `preset` must come from this library; `assignment` must be nul-terminated.
 */
enum MqecStatus mqec_preset_set(struct MqecPreset *preset, const char *assignment);

/**
 * Serializes the preset as JSON into `buf`.
 *
 * # Safety
 * `preset` must come from this library; `buf` must hold `len` bytes or be
 * null; `needed` may be null.
 */
enum MqecStatus mqec_preset_to_json(const struct MqecPreset *preset,
                                    char *buf,
                                    size_t len,
                                    size_t *needed);

/**
 * Runs the invariant suite. `failed` receives the number of failed checks.
 *
 * # Safety
 * `preset` must come from this library; `failed` must be writable.
 */
enum MqecStatus mqec_verify(const struct MqecPreset *preset, size_t *failed);

/**
 * # Safety
 * `preset` must come from this library or be null.
 */
void mqec_preset_free(struct MqecPreset *preset);

/**
 * Builds the protocol for a preset.
 *
 * # Safety
 * `preset` must come from this library; `out` must be writable.
 */
enum MqecStatus mqec_protocol_new(const struct MqecPreset *preset, struct MqecProtocol **out);

/**
 * Runs the seeded trajectory ensemble.
 *
 * # Safety
 * `protocol` must come from this library; `out` must be writable.
 */
enum MqecStatus mqec_protocol_run(const struct MqecProtocol *protocol, struct MqecRun **out);

/**
 * Estimates the per-cycle failure probability from `trajectories` samples.
 *
 * # Safety
 * `protocol` must come from this library; `out` must be writable.
 */
enum MqecStatus mqec_protocol_cycle_failure(const struct MqecProtocol *protocol,
                                            size_t trajectories,
                                            uint64_t seed,
                                            struct MqecFailure *out);

/**
 * One cycle from `c₊|ψ₊⟩ + c₋|ψ₋⟩` with a jump forced on `axis` at
 * `t_jump` seconds, then detection and restoration.
 *
 * # Safety
 * `protocol` must come from this library; `out` must be writable.
 */
enum MqecStatus mqec_protocol_forced_jump(const struct MqecProtocol *protocol,
                                          double c_plus_re,
                                          double c_plus_im,
                                          double c_minus_re,
                                          double c_minus_im,
                                          enum MqecAxis axis,
                                          double t_jump,
                                          struct MqecForcedJump *out);

/**
 * # Safety
 * `protocol` must come from this library or be null.
 */
void mqec_protocol_free(struct MqecProtocol *protocol);

/**
 * Number of cycles in the run.
 *
 * # Safety
 * `run` must come from this library; `out` must be writable.
 */
enum MqecStatus mqec_run_cycle_count(const struct MqecRun *run, size_t *out);

/**
 * Statistics of cycle `index` (0-based).
 *
 * # Safety
 * `run` must come from this library; `out` must be writable.
 */
enum MqecStatus mqec_run_cycle(const struct MqecRun *run, size_t index, struct MqecCycle *out);

/**
 * Geometric per-cycle failure estimate of the ensemble and its standard
 * error.
 *
 * # Safety
 * `run` must come from this library; `probability` and `std_error` must be
 * writable.
 */
enum MqecStatus mqec_run_failure(const struct MqecRun *run, double *probability, double *std_error);

/**
 * Serializes the run summary as JSON into `buf`.
 *
 * # Safety
 * `run` must come from this library; `buf` must hold `len` bytes or be
 * null; `needed` may be null.
 */
enum MqecStatus mqec_run_to_json(const struct MqecRun *run, char *buf, size_t len, size_t *needed);

/**
 * # Safety
 * `run` must come from this library or be null.
 */
void mqec_run_free(struct MqecRun *run);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* MOTIONAL_QEC_H */
