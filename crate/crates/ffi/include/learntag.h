#ifndef LEARNTAG_H
#define LEARNTAG_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum LtStatus {
  LT_STATUS_OK = 0,
  LT_STATUS_NULL_POINTER = 1,
  LT_STATUS_INVALID_ARGUMENT = 2,
  LT_STATUS_IO = 3,
  LT_STATUS_PARSE = 4,
  LT_STATUS_DATA = 5,
  LT_STATUS_PANIC = 6,
} LtStatus;

/**
 * Opaque ranked match list.
 */
typedef struct LtMatches LtMatches;

/**
 * Opaque tag store.
 */
typedef struct LtStore LtStore;

/**
 * Pipeline settings. Start from [`lt_config_default`].
 */
typedef struct LtConfig {
  /**
   * Minimum rating (1..=10) for a learner to join a resource's subset.
   */
  uint8_t delta0;
  double support;
  size_t nmf_features;
  size_t nmf_max_iters;
  double nmf_tol;
  size_t k_max;
  double gamma;
  uint64_t seed;
  size_t min_subset;
} LtConfig;

/**
 * A learner to match against stored tags.
 */
typedef struct LtProfile {
  uint8_t current_skill;
  uint8_t target_skill;
  uint8_t strategy;
  uint8_t presentation;
  uint32_t learning_time;
} LtProfile;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Default settings.
 */
struct LtConfig lt_config_default(void);

/**
 * Runs the whole pipeline over a ratings file.
 *
 * `profiles_path` may be null, in which case profiles are synthesized with
 * `synth_seed`. `config` may be null for the defaults. When non-null,
 * `out_strategy` and `out_presentation` receive the five quantified values
 * of parameters 1..=5.
 *
 * # Safety
 * Path arguments must be null or NUL-terminated strings. `out_store` must be
 * valid for a write; the value arrays, when given, must hold five doubles.
 */
enum LtStatus lt_run_files(const char *ratings_path,
                           const char *profiles_path,
                           uint64_t synth_seed,
                           const struct LtConfig *config,
                           struct LtStore **out_store,
                           double *out_strategy,
                           double *out_presentation);

/**
 * # Safety
 * `path` must be a NUL-terminated string and `out_store` valid for a write.
 */
enum LtStatus lt_store_load(const char *path, struct LtStore **out_store);

/**
 * # Safety
 * `store` must come from this library; `path` must be a NUL-terminated string.
 */
enum LtStatus lt_store_save(const struct LtStore *store, const char *path);

/**
 * Number of resources in the store; 0 for a null handle.
 *
 * # Safety
 * `store` must be null or come from this library.
 */
size_t lt_store_len(const struct LtStore *store);

/**
 * One line per tagged resource, `<id>\t<tags>`. Free with [`lt_string_free`].
 *
 * # Safety
 * `store` must come from this library and `out` be valid for a write.
 */
enum LtStatus lt_store_report(const struct LtStore *store, char **out);

/**
 * Rendered tag cloud of one resource. Free with [`lt_string_free`].
 *
 * # Safety
 * `store` must come from this library, `resource_id` must be a
 * NUL-terminated string and `out` valid for a write.
 */
enum LtStatus lt_store_render(const struct LtStore *store, const char *resource_id, char **out);

/**
 * # Safety
 * `store` must be null or come from this library and not be freed twice.
 */
void lt_store_free(struct LtStore *store);

/**
 * Ranks the stored resources for `profile`, best first.
 *
 * # Safety
 * `store` must come from this library, `profile` must point to a valid
 * profile, both value arrays must hold five doubles and `out` must be valid
 * for a write.
 */
enum LtStatus lt_match(const struct LtStore *store,
                       const struct LtProfile *profile,
                       const double *strategy_values,
                       const double *presentation_values,
                       size_t top_n,
                       struct LtMatches **out);

/**
 * # Safety
 * `matches` must be null or come from [`lt_match`].
 */
size_t lt_matches_len(const struct LtMatches *matches);

/**
 * Resource id at `index`, owned by the list; null when out of range.
 *
 * # Safety
 * `matches` must be null or come from [`lt_match`].
 */
const char *lt_matches_resource(const struct LtMatches *matches, size_t index);

/**
 * Score in `[0, 1]` at `index`; NaN when out of range.
 *
 * # Safety
 * `matches` must be null or come from [`lt_match`].
 */
double lt_matches_score(const struct LtMatches *matches, size_t index);

/**
 * # Safety
 * `matches` must be null or come from [`lt_match`] and not be freed twice.
 */
void lt_matches_free(struct LtMatches *matches);

/**
 * # Safety
 * `s` must be null or a string returned by this library, freed once.
 */
void lt_string_free(char *s);

/**
 * Message of the last failed call on this thread, or null. Valid until the
 * next failing call on the same thread.
 */
const char *lt_last_error_message(void);

const char *lt_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* LEARNTAG_H */
