#ifndef EXPERTQUEST_H
#define EXPERTQUEST_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stddef.h>
#include <stdint.h>

// Result codes shared by every fallible function.
typedef enum EqStatus {
  EQ_STATUS_OK = 0,
  EQ_STATUS_NULL_POINTER = 1,
  EQ_STATUS_INVALID_UTF8 = 2,
  EQ_STATUS_INVALID_ARGUMENT = 3,
  EQ_STATUS_NOT_FOUND = 4,
  EQ_STATUS_SOURCE_FAILURE = 5,
  EQ_STATUS_RATE_LIMITED = 6,
  EQ_STATUS_IO = 7,
  EQ_STATUS_PANIC = 8,
} EqStatus;

// Search engine over a fixture corpus and the built-in language list.
typedef struct EqEngine EqEngine;

// Hashed term-frequency vector.
typedef struct EqFeatureVector EqFeatureVector;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failed call on this thread, or NULL. The pointer stays
// valid until the next library call on the same thread.
const char *eq_last_error(void);

// Library version as a static NUL-terminated string.
const char *eq_version(void);

// Default number of hash buckets; passing 0 as a size selects it.
size_t eq_default_vector_size(void);

// Vectorize UTF-8 `text` into `size` buckets (0 for the default).
//
// # Safety
// `text` must be a NUL-terminated string and `out` a writable pointer.
enum EqStatus eq_vectorize(const char *text, size_t size, struct EqFeatureVector **out);

// Number of buckets in `vector`, or 0 when it is NULL.
//
// # Safety
// `vector` must be NULL or a live handle from [`eq_vectorize`].
size_t eq_feature_vector_len(const struct EqFeatureVector *vector);

// Pointer to the bucket counts, valid while `vector` is alive. NULL when `vector` is NULL.
//
// # Safety
// `vector` must be NULL or a live handle from [`eq_vectorize`].
const uint32_t *eq_feature_vector_counts(const struct EqFeatureVector *vector);

// # Safety
// `vector` must be NULL or a handle from [`eq_vectorize`] not yet freed.
void eq_feature_vector_free(struct EqFeatureVector *vector);

// Cosine similarity of two vectors of the same size, in [0, 1].
//
// # Safety
// `a` and `b` must be live vector handles and `out` a writable pointer.
enum EqStatus eq_cosine(const struct EqFeatureVector *a,
                        const struct EqFeatureVector *b,
                        double *out);

// Similarity of two texts through the full pipeline.
//
// # Safety
// `a` and `b` must be NUL-terminated strings and `out` a writable pointer.
enum EqStatus eq_similarity(const char *a, const char *b, size_t size, double *out);

// Bucket index of a single (already stemmed) word: CRC-32 modulo `size`.
//
// # Safety
// `word` must be a NUL-terminated string and `out` a writable pointer.
enum EqStatus eq_hash_index(const char *word, size_t size, size_t *out);

// Porter stem of a lowercase word. Free the result with [`eq_string_free`].
//
// # Safety
// `word` must be a NUL-terminated string and `out` a writable pointer.
enum EqStatus eq_stem(const char *word, char **out);

// Open a fixture corpus directory. `vector_size` 0 selects the default.
//
// # Safety
// `dir` must be a NUL-terminated string and `out` a writable pointer.
enum EqStatus eq_engine_open_fixture(const char *dir, size_t vector_size, struct EqEngine **out);

// Ranked candidates for `language` as a JSON array. Free the result with
// [`eq_string_free`].
//
// # Safety
// `engine` must be a live handle, `language` a NUL-terminated string and
// `out_json` a writable pointer.
enum EqStatus eq_engine_search_json(const struct EqEngine *engine,
                                    const char *language,
                                    size_t search_count,
                                    size_t timeline_count,
                                    char **out_json);

// # Safety
// `engine` must be NULL or a handle from [`eq_engine_open_fixture`] not yet freed.
void eq_engine_free(struct EqEngine *engine);

// # Safety
// `s` must be NULL or a string returned by this library and not yet freed.
void eq_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* EXPERTQUEST_H */
