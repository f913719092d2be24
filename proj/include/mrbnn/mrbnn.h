/* Copyright 2026 The mrbnn Authors
 * SPDX-License-Identifier: Apache-2.0
 *
 * Stable C interface. Every call returns an mrbnn_status; on failure the
 * message is available from mrbnn_last_error() on the same thread until the
 * next failing call. Buffers handed out by the library are released with
 * mrbnn_buffer_free().
 */

#ifndef MRBNN_MRBNN_H
#define MRBNN_MRBNN_H

#include <stddef.h>
#include <stdint.h>

#if defined(MRBNN_BUILDING_LIBRARY)
#define MRBNN_API __attribute__((visibility("default")))
#else
#define MRBNN_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum mrbnn_status {
    MRBNN_OK = 0,
    MRBNN_ERR_INTERNAL = 1,
    MRBNN_ERR_USAGE = 2,    /* bad arguments or configuration */
    MRBNN_ERR_DATA = 3,     /* unreadable, truncated or corrupt input */
    MRBNN_ERR_PHYSICAL = 4  /* configuration violates a physical limit */
} mrbnn_status;

typedef struct mrbnn_context mrbnn_context;
typedef struct mrbnn_model mrbnn_model;

typedef struct mrbnn_buffer {
    char* data; /* NUL-terminated; may also contain embedded NULs */
    size_t size;
} mrbnn_buffer;

MRBNN_API const char* mrbnn_version(void);
MRBNN_API const char* mrbnn_last_error(void);
MRBNN_API void mrbnn_buffer_free(mrbnn_buffer* buffer);

/* Config path NULL or "" falls back to $MRBNN_CONFIG, then built-in defaults. */
MRBNN_API mrbnn_status mrbnn_context_create(const char* config_path, mrbnn_context** out);
MRBNN_API mrbnn_status mrbnn_context_from_json(const char* json_text, mrbnn_context** out);
MRBNN_API void mrbnn_context_destroy(mrbnn_context* ctx);
MRBNN_API mrbnn_status mrbnn_context_config_json(const mrbnn_context* ctx, mrbnn_buffer* out);

/* Commands. `primary` receives the main artifact, `summary` a JSON object.
 * Either output pointer may be NULL. */
MRBNN_API mrbnn_status mrbnn_device_report(const mrbnn_context* ctx, const char* ring_class, mrbnn_buffer* primary,
                                           mrbnn_buffer* summary);
/* fractions: comma-separated list or NULL/"" for 0,0.1,...,1; maps 0 uses the config. */
MRBNN_API mrbnn_status mrbnn_fpv_sweep(const mrbnn_context* ctx, const char* model_path, const char* fractions,
                                       size_t maps, mrbnn_buffer* primary, mrbnn_buffer* summary);
/* Exactly one of model_path / has_parameters. arch is "n_a,n_vdp,n_wg" or NULL. */
MRBNN_API mrbnn_status mrbnn_simulate(const mrbnn_context* ctx, const char* model_path, int has_parameters,
                                      uint64_t parameters, const char* arch, mrbnn_buffer* primary,
                                      mrbnn_buffer* summary);
MRBNN_API mrbnn_status mrbnn_dse(const mrbnn_context* ctx, mrbnn_buffer* primary, mrbnn_buffer* summary);
/* has_dataset_seed 0 uses the config's dataset seed. */
MRBNN_API mrbnn_status mrbnn_train_toy(const mrbnn_context* ctx, int has_dataset_seed, uint64_t dataset_seed,
                                       mrbnn_buffer* primary, mrbnn_buffer* summary);

/* Model files. */
MRBNN_API mrbnn_status mrbnn_model_load(const char* path, mrbnn_model** out);
MRBNN_API void mrbnn_model_destroy(mrbnn_model* model);
MRBNN_API mrbnn_status mrbnn_model_parameter_count(const mrbnn_model* model, uint64_t* out);
MRBNN_API mrbnn_status mrbnn_model_metadata(const mrbnn_model* model, mrbnn_buffer* out);

/* Device math. */
MRBNN_API mrbnn_status mrbnn_allpass_transmission(double r, double a, double phase_rad, double* out);
MRBNN_API mrbnn_status mrbnn_fwhm_from_q(double wavelength_nm, double q_factor, double* out);
MRBNN_API mrbnn_status mrbnn_crosstalk_phi(double lambda_i_nm, double lambda_j_nm, double q_factor, double* out);

#ifdef __cplusplus
}
#endif

#endif /* MRBNN_MRBNN_H */
