#ifndef TUBULAR_H
#define TUBULAR_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes returned by every fallible call.
 */
typedef enum TubularStatus {
  TUBULAR_STATUS_OK = 0,
  /**
   * A domain error: invalid weights, vertex, triple or mutation.
   */
  TUBULAR_STATUS_INVALID = 1,
  /**
   * A null pointer or malformed UTF-8/JSON input.
   */
  TUBULAR_STATUS_BAD_INPUT = 2,
} TubularStatus;

/**
 * Opaque tilting configuration handle.
 */
typedef struct TubularConfig TubularConfig;

/**
 * Opaque Farey triple handle.
 */
typedef struct TubularTriple TubularTriple;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copies the message of the most recent error on this thread into `buf`
 * (NUL-terminated, truncated to `cap`); returns the full message length.
 *
 * # Safety
 * `buf` must point to `cap` writable bytes, or be null (then only the
 * length is reported).
 */
uintptr_t tubular_last_error(char *buf, uintptr_t cap);

/**
 * Library version as a static string; do not free.
 */
const char *tubular_version(void);

/**
 * Frees a string returned by this library.
 *
 * # Safety
 * `s` must be a pointer previously returned through an out-parameter of
 * this library, or null.
 */
void tubular_string_free(char *s);

/**
 * Parses a triple like `"0/1,1/1,1/0"`.
 *
 * # Safety
 * `text` must be a NUL-terminated string and `out` a valid pointer.
 */
enum TubularStatus tubular_triple_parse(const char *text, struct TubularTriple **out);

/**
 * Mutates a triple at the element written in `at` (e.g. `"1/1"`).
 *
 * # Safety
 * `triple` must be a live handle, `at` a NUL-terminated string, `out` a
 * valid pointer.
 */
enum TubularStatus tubular_triple_mutate(const struct TubularTriple *triple,
                                         const char *at,
                                         struct TubularTriple **out);

/**
 * Formats a triple as `"a/b,c/d,e/f"` in ascending order.
 *
 * # Safety
 * `triple` must be a live handle and `out` a valid pointer.
 */
enum TubularStatus tubular_triple_format(const struct TubularTriple *triple, char **out);

/**
 * # Safety
 * `triple` must be a handle from this library, or null.
 */
void tubular_triple_free(struct TubularTriple *triple);

/**
 * Builds the canonical configuration of a weight sequence.
 *
 * # Safety
 * `weights` must point to `len` values and `out` must be valid.
 */
enum TubularStatus tubular_config_canonical(const uint32_t *weights,
                                            uintptr_t len,
                                            struct TubularConfig **out);

/**
 * Builds the base realization of `{0, 1, ∞}` for a tubular weight
 * sequence.
 *
 * # Safety
 * `weights` must point to `len` values and `out` must be valid.
 */
enum TubularStatus tubular_config_realize_base(const uint32_t *weights,
                                               uintptr_t len,
                                               struct TubularConfig **out);

/**
 * Parses a configuration from its JSON form.
 *
 * # Safety
 * `json` must be a NUL-terminated string and `out` a valid pointer.
 */
enum TubularStatus tubular_config_from_json(const char *json, struct TubularConfig **out);

/**
 * Serializes a configuration to JSON.
 *
 * # Safety
 * `config` must be a live handle and `out` a valid pointer.
 */
enum TubularStatus tubular_config_to_json(const struct TubularConfig *config, char **out);

/**
 * Renders a configuration as DOT.
 *
 * # Safety
 * `config` must be a live handle and `out` a valid pointer.
 */
enum TubularStatus tubular_config_to_dot(const struct TubularConfig *config, char **out);

/**
 * Number of vertices of a configuration, or 0 for null.
 *
 * # Safety
 * `config` must be a live handle or null.
 */
uintptr_t tubular_config_len(const struct TubularConfig *config);

/**
 * Mutates a configuration at a zero-based vertex.
 *
 * # Safety
 * `config` must be a live handle and `out` a valid pointer.
 */
enum TubularStatus tubular_config_mutate(const struct TubularConfig *config,
                                         uintptr_t vertex,
                                         struct TubularConfig **out);

/**
 * Writes the sorted distinct slopes as a string like `"0/1,1/1,1/0"`.
 *
 * # Safety
 * `config` must be a live handle and `out` a valid pointer.
 */
enum TubularStatus tubular_config_slope_set(const struct TubularConfig *config, char **out);

/**
 * Returns 1 when the rank function is additive over the quiver with
 * relations, 0 when it is not, and -1 for a null handle.
 *
 * # Safety
 * `config` must be a live handle or null.
 */
int32_t tubular_config_rank_additive(const struct TubularConfig *config);

/**
 * # Safety
 * `config` must be a handle from this library, or null.
 */
void tubular_config_free(struct TubularConfig *config);

/**
 * Runs the full growth certificate for a tubular weight sequence and
 * returns it as JSON lines (one record per tree node plus a summary).
 *
 * # Safety
 * `weights` must point to `len` values and `out` must be valid.
 */
enum TubularStatus tubular_growth_certificate(const uint32_t *weights,
                                              uintptr_t len,
                                              uint32_t depth,
                                              char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* TUBULAR_H */
