#ifndef RFDOP_RFDOP_H
#define RFDOP_RFDOP_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#if defined(RFDOP_BUILDING_LIBRARY)
#define RFDOP_API __declspec(dllexport)
#else
#define RFDOP_API __declspec(dllimport)
#endif
#else
#define RFDOP_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum rfdop_status {
    RFDOP_OK = 0,
    RFDOP_ERR_INVALID_ARGUMENT = 1,
    RFDOP_ERR_CONFIG = 2,
    RFDOP_ERR_DOMAIN = 3,
    RFDOP_ERR_RANGE = 4,
    RFDOP_ERR_NOT_FOUND = 5,
    RFDOP_ERR_IO = 6,
    RFDOP_ERR_CHECK_FAILED = 7,
    RFDOP_ERR_INTERNAL = 8
} rfdop_status;

typedef enum rfdop_command {
    RFDOP_CMD_BOUNDS = 0,
    RFDOP_CMD_VMIN = 1,
    RFDOP_CMD_FIGURE = 2,
    RFDOP_CMD_SIMULATE_MCRB = 3,
    RFDOP_CMD_SIMULATE_DETECT = 4,
    RFDOP_CMD_NOISE_FIGURE = 5
} rfdop_command;

typedef struct rfdop_config rfdop_config;
typedef struct rfdop_frame rfdop_frame;

/* Message and offending config key of the last failure on this thread. */
RFDOP_API const char* rfdop_last_error(void);
RFDOP_API const char* rfdop_last_error_field(void);
RFDOP_API const char* rfdop_status_name(rfdop_status status);
RFDOP_API const char* rfdop_version(void);

/* Experiment configuration. */
RFDOP_API rfdop_status rfdop_config_create(rfdop_config** out);
RFDOP_API void rfdop_config_destroy(rfdop_config* config);
RFDOP_API rfdop_status rfdop_config_set(rfdop_config* config, const char* key, const char* value);
RFDOP_API rfdop_status rfdop_config_load_file(rfdop_config* config, const char* path);
RFDOP_API rfdop_status rfdop_config_load_text(rfdop_config* config, const char* text);
RFDOP_API rfdop_status rfdop_config_validate(const rfdop_config* config);

/* Runs a command and returns its CSV text in *csv_out (free with
   rfdop_string_free). With check != 0 the acceptance windows are applied
   to simulation commands; a failed check still returns the CSV together
   with RFDOP_ERR_CHECK_FAILED. */
RFDOP_API rfdop_status rfdop_command_from_name(const char* name, rfdop_command* out);
RFDOP_API rfdop_status rfdop_run(const rfdop_config* config, rfdop_command command, int check, char** csv_out);
RFDOP_API void rfdop_string_free(char* text);

/* Reply durations in seconds for a catalog mode label. */
RFDOP_API rfdop_status rfdop_reply_timing(const char* mode_label, double* t_rn16, double* t_pause, double* t_epc);
/* Exact durations as num/den pairs: rn16, pause, epc. */
RFDOP_API rfdop_status rfdop_reply_timing_exact(const char* mode_label, int64_t num[3], int64_t den[3]);

/* Closed-form bounds. Ratios are P_S/N0 in dB-Hz. */
RFDOP_API rfdop_status rfdop_erf_inv(double y, double* out);
RFDOP_API rfdop_status rfdop_sigma_max_sq(double speed_mps, double carrier_hz, double p_err, double* out);
RFDOP_API rfdop_status rfdop_c_t_single(double t0_s, double* out);
RFDOP_API rfdop_status rfdop_c_t_dual(double t1_s, double t2_s, double t_pause_s, double* out);
RFDOP_API rfdop_status rfdop_mcrb_sigma_sq(double c_t_s3, double ps_n0_dbhz, double* out);
RFDOP_API rfdop_status rfdop_v_min(double carrier_hz, double p_err, double c_t_s3, double ps_n0_dbhz, double* out);
RFDOP_API rfdop_status rfdop_noise_density_from_sensitivity(double p_s_dbm, double ber, double blf_hz, int spread,
                                                            double* n0_dbm_hz, double* nf_db, double* ps_n0_dbhz);
RFDOP_API rfdop_status rfdop_p_err_from_sigma(double sigma_sq_hz2, double speed_mps, double carrier_hz, double* out);

/* Baseband reply for the configured mode, modulation, model and parts. */
RFDOP_API rfdop_status rfdop_frame_synthesize(const rfdop_config* config, double f_d_hz, double ps_n0_dbhz,
                                              uint64_t seed, rfdop_frame** out);
RFDOP_API void rfdop_frame_destroy(rfdop_frame* frame);
RFDOP_API size_t rfdop_frame_sample_count(const rfdop_frame* frame);
RFDOP_API double rfdop_frame_sample_rate(const rfdop_frame* frame);
/* Copies min(count, capacity) samples as interleaved I/Q into iq (2 * capacity doubles). */
RFDOP_API rfdop_status rfdop_frame_samples(const rfdop_frame* frame, double* iq, size_t capacity);
RFDOP_API rfdop_status rfdop_frame_write(const rfdop_frame* frame, const char* path);
RFDOP_API rfdop_status rfdop_frame_estimate(const rfdop_frame* frame, double search_halfwidth_hz, int zero_absorb,
                                            double* f_hat_hz);

#ifdef __cplusplus
}
#endif

#endif
