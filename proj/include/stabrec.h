/*
 * stabrec — incremental low-rank recommendation models with stability
 * evaluation.
 *
 * C interface of the shared library. All functions return a status code;
 * out-parameters are written only on STABREC_OK. Objects returned through
 * handle out-parameters are owned by the caller and released with the
 * matching *_free function. stabrec_last_error() describes the most recent
 * failure on the calling thread.
 */
#ifndef STABREC_H
#define STABREC_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define STABREC_API __declspec(dllexport)
#elif defined(__GNUC__)
#define STABREC_API __attribute__((visibility("default")))
#else
#define STABREC_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum stabrec_status {
    STABREC_OK = 0,
    STABREC_ERR_USAGE = 1,   /* invalid arguments or configuration */
    STABREC_ERR_DATA = 2,    /* unreadable, malformed or empty data */
    STABREC_ERR_NUMERIC = 3  /* factorization failure */
} stabrec_status;

typedef struct stabrec_matrix stabrec_matrix; /* sparse binary interaction matrix */
typedef struct stabrec_model stabrec_model;   /* low-rank factor state */

STABREC_API const char* stabrec_version(void);
STABREC_API const char* stabrec_last_error(void);

/* ---- interaction matrices -------------------------------------------- */

/* Builds an n_rows x n_cols binary matrix from nnz (row, col) pairs.
 * Duplicate cells collapse to a single entry. */
STABREC_API stabrec_status stabrec_matrix_create(int32_t n_rows, int32_t n_cols,
                                                 const int32_t* rows,
                                                 const int32_t* cols, int64_t nnz,
                                                 stabrec_matrix** out);
/* Reads/writes the binary CSR file format used by split directories. */
STABREC_API stabrec_status stabrec_matrix_read(const char* path, stabrec_matrix** out);
STABREC_API stabrec_status stabrec_matrix_write(const stabrec_matrix* m,
                                                const char* path);
STABREC_API void stabrec_matrix_free(stabrec_matrix* m);

STABREC_API int32_t stabrec_matrix_rows(const stabrec_matrix* m);
STABREC_API int32_t stabrec_matrix_cols(const stabrec_matrix* m);
STABREC_API int64_t stabrec_matrix_nnz(const stabrec_matrix* m);

/* ---- models ----------------------------------------------------------- */

/* Rank-r PureSVD factorization of the zero-filled interaction matrix. */
STABREC_API stabrec_status stabrec_train_puresvd(const stabrec_matrix* interactions,
                                                 int32_t rank, uint64_t seed,
                                                 stabrec_model** out);
/* One projector-splitting step over the new-data matrix; the input model is
 * left untouched. */
STABREC_API stabrec_status stabrec_psi_step(const stabrec_model* m,
                                            const stabrec_matrix* delta,
                                            stabrec_model** out);

STABREC_API stabrec_status stabrec_model_save(const stabrec_model* m, const char* path);
STABREC_API stabrec_status stabrec_model_load(const char* path, stabrec_model** out);
STABREC_API void stabrec_model_free(stabrec_model* m);

STABREC_API int32_t stabrec_model_rank(const stabrec_model* m);
STABREC_API int64_t stabrec_model_step(const stabrec_model* m);
STABREC_API int32_t stabrec_model_users(const stabrec_model* m);
STABREC_API int32_t stabrec_model_items(const stabrec_model* m);

/* ---- recommendation --------------------------------------------------- */

/* Projection scoring over the user's known items, then the top-n unseen
 * items. out_items must hold top_n entries; *out_len receives the count
 * actually written (shorter for small catalogs). */
STABREC_API stabrec_status stabrec_recommend(const stabrec_model* m,
                                             const int32_t* history_items,
                                             int64_t history_len, int32_t top_n,
                                             int32_t* out_items, int32_t* out_len);

/* ---- metrics ----------------------------------------------------------- */

/* Weighted Jaccard index of two ranked lists under cutoff n. */
STABREC_API stabrec_status stabrec_wji(const int32_t* items_a, int32_t len_a,
                                       const int32_t* items_b, int32_t len_b,
                                       int32_t n, double* out);

/* ---- experiment pipeline ----------------------------------------------- */

typedef struct stabrec_prepare_opts {
    const char* input_path;
    const char* schema;      /* e.g. "delim=::;header=0;cols=0,1,2,3" */
    double min_rating;
    int64_t min_user_items;
    int64_t holdback_seconds;
    int32_t n_steps;
    const char* out_dir;
} stabrec_prepare_opts;

STABREC_API stabrec_status stabrec_prepare(const stabrec_prepare_opts* opts);

typedef struct stabrec_run_opts {
    const char* split_dir;
    const char* models;      /* comma-separated subset of "puresvd,psi" */
    const char* ranks;       /* comma-separated, e.g. "10,25,50,100" */
    int32_t top_n;
    uint64_t seed;
    const char* out_dir;
} stabrec_run_opts;

STABREC_API stabrec_status stabrec_run(const stabrec_run_opts* opts);

/* Aggregates a finished run directory; format is "csv" or "json". Output
 * goes to out_path, or to stdout when out_path is NULL. */
STABREC_API stabrec_status stabrec_report(const char* runs_dir, const char* format,
                                          const char* out_path);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* STABREC_H */
