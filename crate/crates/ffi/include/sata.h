#ifndef SATA_H
#define SATA_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum SataStatus {
  SATA_STATUS_OK = 0,
  SATA_STATUS_NULL_POINTER = 1,
  SATA_STATUS_INVALID_UTF8 = 2,
  SATA_STATUS_PARSE_ERROR = 3,
  SATA_STATUS_INVALID_INSTANCE = 4,
  SATA_STATUS_INVALID_ARGUMENT = 5,
  SATA_STATUS_BUFFER_TOO_SMALL = 6,
  SATA_STATUS_CAP_EXCEEDED = 7,
  SATA_STATUS_SOLVER_ERROR = 8,
  SATA_STATUS_PANIC = 9,
} SataStatus;

/**
 * Opaque instance handle.
 */
typedef struct SataInstance SataInstance;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copies the last error message of this thread into `buf` as a
 * NUL-terminated string, truncating if needed. Returns the message length
 * without the terminator.
 *
 * # Safety
 * `buf` must be null or point to `len` writable bytes.
 */
size_t sata_last_error(char *buf, size_t len);

/**
 * Parses a JSON instance. On success `*out_handle` owns a new handle.
 *
 * # Safety
 * `json` must be a NUL-terminated string and `out_handle` a valid pointer.
 */
enum SataStatus sata_instance_from_json(const char *json, struct SataInstance **out_handle);

/**
 * Releases a handle. Null is ignored.
 *
 * # Safety
 * `handle` must come from [`sata_instance_from_json`] and not be used
 * afterwards.
 */
void sata_instance_free(struct SataInstance *handle);

/**
 * # Safety
 * `handle` must be a live handle and `count` a valid pointer.
 */
enum SataStatus sata_instance_robot_count(const struct SataInstance *handle, size_t *count);

/**
 * # Safety
 * `handle` must be a live handle and `count` a valid pointer.
 */
enum SataStatus sata_instance_target_count(const struct SataInstance *handle, size_t *count);

/**
 * Number of primitives of one-based robot `robot`.
 *
 * # Safety
 * `handle` must be a live handle and `count` a valid pointer.
 */
enum SataStatus sata_instance_primitive_count(const struct SataInstance *handle,
                                              uint32_t robot,
                                              size_t *count);

/**
 * Distributed greedy for the winner-takes-all objective, robots in
 * ascending id order. Writes the one-based assignment, its value, and the
 * communication rounds used.
 *
 * # Safety
 * `handle` must be a live handle, `chosen` must point to `len` writable
 * entries, and `value` and `rounds` must be valid pointers.
 */
enum SataStatus sata_greedy_wta(const struct SataInstance *handle,
                                uint32_t *chosen,
                                size_t len,
                                double *value,
                                size_t *rounds);

/**
 * Local algorithm with horizon `h`. Writes the rounded one-based
 * assignment, the fractional solution's minimum coverage `w`, the rounded
 * assignment's bottleneck value, and the rounds used. Values are `+inf`
 * when the instance has no targets.
 *
 * # Safety
 * `handle` must be a live handle, `chosen` must point to `len` writable
 * entries, and the remaining outputs must be valid pointers.
 */
enum SataStatus sata_solve_local(const struct SataInstance *handle,
                                 size_t h,
                                 double epsilon,
                                 uint32_t *chosen,
                                 size_t len,
                                 double *fractional_w,
                                 double *rounded_value,
                                 size_t *rounds);

/**
 * Exact winner-takes-all optimum by enumeration.
 *
 * # Safety
 * As for [`sata_greedy_wta`].
 */
enum SataStatus sata_oracle_wta(const struct SataInstance *handle,
                                uint32_t *chosen,
                                size_t len,
                                double *value);

/**
 * Exact bottleneck optimum by enumeration (`+inf` without targets).
 *
 * # Safety
 * As for [`sata_greedy_wta`].
 */
enum SataStatus sata_oracle_bottleneck(const struct SataInstance *handle,
                                       uint32_t *chosen,
                                       size_t len,
                                       double *value);

/**
 * Bottleneck value of a one-based assignment (`+inf` without targets).
 *
 * # Safety
 * `chosen` must point to `len` readable entries and `value` must be valid.
 */
enum SataStatus sata_eval_bottleneck(const struct SataInstance *handle,
                                     const uint32_t *chosen,
                                     size_t len,
                                     double *value);

/**
 * Winner-takes-all value of a one-based assignment, with owners induced
 * by the best covering robot.
 *
 * # Safety
 * `chosen` must point to `len` readable entries and `value` must be valid.
 */
enum SataStatus sata_eval_wta(const struct SataInstance *handle,
                              const uint32_t *chosen,
                              size_t len,
                              double *value);

/**
 * Library version as a static NUL-terminated string.
 */
const char *sata_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SATA_H */
