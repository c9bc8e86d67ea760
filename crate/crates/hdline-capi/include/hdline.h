/* C interface to the hdline half-duplex line network library. */

#ifndef HDLINE_H
#define HDLINE_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status code of a C ABI call. `Ok` is zero; the nonzero codes mirror the
 * library's error variants one-to-one, followed by two codes for problems
 * that can only arise at the language boundary.
 */
typedef enum HdlStatus {
  HDL_STATUS_OK = 0,
  HDL_STATUS_EMPTY_NETWORK = 1,
  HDL_STATUS_NO_RELAY = 2,
  HDL_STATUS_ZERO_CAPACITY = 3,
  HDL_STATUS_UNSUPPORTED_CAPACITY = 4,
  HDL_STATUS_INVALID_GAIN = 5,
  HDL_STATUS_RESOLUTION_TOO_COARSE = 6,
  HDL_STATUS_LIMIT_EXCEEDED = 7,
  HDL_STATUS_INVALID_SCHEDULE = 8,
  HDL_STATUS_INDEX_OUT_OF_RANGE = 9,
  HDL_STATUS_NEGATIVE_VALUE = 10,
  HDL_STATUS_PARSE = 11,
  HDL_STATUS_WITNESS_NOT_APPLICABLE = 12,
  HDL_STATUS_GRAPH = 13,
  HDL_STATUS_FORMULA = 14,
  HDL_STATUS_INTERNAL = 15,
  /**
   * A required pointer argument was NULL.
   */
  HDL_STATUS_NULL_ARGUMENT = 16,
  /**
   * A string argument was not valid UTF-8.
   */
  HDL_STATUS_INVALID_UTF8 = 17,
} HdlStatus;

/**
 * Opaque handle to a line network.
 */
typedef struct HdlNetwork HdlNetwork;

/**
 * Opaque handle to a built schedule together with its color structure.
 */
typedef struct HdlSchedule HdlSchedule;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Returns the most recent error message of the calling thread, or NULL if
 * the last call succeeded. The caller owns the returned string and must
 * release it with `hdl_string_free`.
 */
char *hdl_last_error_message(void);

/**
 * Releases a string returned by this library. NULL is ignored.
 *
 * # Safety
 *
 * `s` must be NULL or a pointer obtained from this library that has not
 * been freed already.
 */
void hdl_string_free(char *s);

/**
 * Parses a comma-separated list of link capacities such as
 * `"2,2,3,1"`, `"9/2,7,3/5"`, or `"1,inf,2"` into a network handle.
 *
 * # Safety
 *
 * `links` must point to a NUL-terminated string and `out` must be a valid
 * location to store the handle.
 */
enum HdlStatus hdl_network_parse(const char *links, struct HdlNetwork **out);

/**
 * Builds a network from an array of positive integer link capacities.
 *
 * # Safety
 *
 * `capacities` must point to `len` readable values and `out` must be a
 * valid location to store the handle.
 */
enum HdlStatus hdl_network_from_integers(const uint64_t *capacities,
                                         uintptr_t len,
                                         struct HdlNetwork **out);

/**
 * Number of relays in the network (one less than the number of links).
 *
 * # Safety
 *
 * `net` must be a live handle from `hdl_network_parse` or
 * `hdl_network_from_integers`.
 */
uintptr_t hdl_network_relay_count(const struct HdlNetwork *net);

/**
 * Releases a network handle. NULL is ignored.
 *
 * # Safety
 *
 * `net` must be NULL or a live handle that has not been freed already.
 */
void hdl_network_free(struct HdlNetwork *net);

/**
 * Computes the end-to-end capacity of the network under the half-duplex
 * constraint and writes it through `out` as an exact rational string.
 *
 * # Safety
 *
 * `net` must be a live network handle and `out` a valid location to store
 * the string.
 */
enum HdlStatus hdl_capacity(const struct HdlNetwork *net, char **out);

/**
 * Builds a simple capacity-achieving schedule for the network.
 *
 * # Safety
 *
 * `net` must be a live network handle and `out` a valid location to store
 * the handle.
 */
enum HdlStatus hdl_schedule_build(const struct HdlNetwork *net, struct HdlSchedule **out);

/**
 * Writes the rate of the schedule through `out` as an exact rational
 * string. The rate equals the network capacity by construction.
 *
 * # Safety
 *
 * `sched` must be a live schedule handle and `out` a valid location to
 * store the string.
 */
enum HdlStatus hdl_schedule_rate(const struct HdlSchedule *sched, char **out);

/**
 * Number of distinct states in the schedule. Always at most the number of
 * relays plus one.
 *
 * # Safety
 *
 * `sched` must be a live schedule handle.
 */
uintptr_t hdl_schedule_len(const struct HdlSchedule *sched);

/**
 * Serializes the schedule as JSON: each entry carries the relay state
 * bitstring, the exact time fraction, and the color interval it was
 * grouped from.
 *
 * # Safety
 *
 * `sched` must be a live schedule handle and `out` a valid location to
 * store the string.
 */
enum HdlStatus hdl_schedule_json(const struct HdlSchedule *sched, char **out);

/**
 * Releases a schedule handle. NULL is ignored.
 *
 * # Safety
 *
 * `sched` must be NULL or a live handle that has not been freed already.
 */
void hdl_schedule_free(struct HdlSchedule *sched);

/**
 * Builds a schedule for the network, checks it against every fundamental
 * cut, and writes the certificate through `out` as JSON with fields
 * `rate`, `bound`, `optimal`, and `bottleneck`.
 *
 * # Safety
 *
 * `net` must be a live network handle and `out` a valid location to store
 * the string.
 */
enum HdlStatus hdl_certify_json(const struct HdlNetwork *net, char **out);

/**
 * Parses a capacity string such as `"3/4"` or `"inf"` and writes its
 * canonical form back through `out`; a cheap way for bindings to validate
 * and normalize rational inputs.
 *
 * # Safety
 *
 * `value` must point to a NUL-terminated string and `out` must be a valid
 * location to store the string.
 */
enum HdlStatus hdl_rational_normalize(const char *value, char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* HDLINE_H */
