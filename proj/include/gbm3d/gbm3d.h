#ifndef GBM3D_H
#define GBM3D_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#if defined(GBM3D_BUILDING)
#define GBM3D_API __declspec(dllexport)
#else
#define GBM3D_API __declspec(dllimport)
#endif
#else
#define GBM3D_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum gbm3d_status {
  GBM3D_OK = 0,
  GBM3D_ERR_INVALID_ARGUMENT = 1,
  GBM3D_ERR_IO = 2,
  GBM3D_ERR_FORMAT = 3,
  GBM3D_ERR_INTERNAL = 4,
} gbm3d_status;

typedef enum gbm3d_match_method {
  GBM3D_MATCH_FFT = 0,
  GBM3D_MATCH_NAIVE = 1,
} gbm3d_match_method;

typedef struct gbm3d_image gbm3d_image;
typedef struct gbm3d_params gbm3d_params;

/* Message of the most recent failure on the calling thread; empty after success. */
GBM3D_API const char* gbm3d_last_error(void);
GBM3D_API const char* gbm3d_version(void);
GBM3D_API const char* gbm3d_status_string(gbm3d_status status);

/* Images. `values` may be NULL for a zero image; otherwise width*height samples, row-major. */
GBM3D_API gbm3d_status gbm3d_image_create(int width, int height, const double* values, gbm3d_image** out);
GBM3D_API void gbm3d_image_destroy(gbm3d_image* img);
GBM3D_API int gbm3d_image_width(const gbm3d_image* img);
GBM3D_API int gbm3d_image_height(const gbm3d_image* img);
GBM3D_API double gbm3d_image_peak(const gbm3d_image* img);
/* Borrowed pointer, valid until the image is destroyed. */
GBM3D_API const double* gbm3d_image_data(const gbm3d_image* img);
GBM3D_API gbm3d_status gbm3d_image_copy_data(const gbm3d_image* img, double* dst, size_t count);

/* PGM (P5) or RAWF64, detected from the file contents. */
GBM3D_API gbm3d_status gbm3d_image_read(const char* path, gbm3d_image** out);
GBM3D_API gbm3d_status gbm3d_image_write_pgm(const gbm3d_image* img, const char* path);
GBM3D_API gbm3d_status gbm3d_image_write_rawf64(const gbm3d_image* img, const char* path);
/* Format chosen from the extension: .pgm, or .raw/.f64/.rawf64. */
GBM3D_API gbm3d_status gbm3d_image_write(const gbm3d_image* img, const char* path);

/* Parameters. Keys: n1 n2 k window levels spins trials eps_tv tau_match. */
GBM3D_API gbm3d_status gbm3d_params_create(gbm3d_params** out);
GBM3D_API void gbm3d_params_destroy(gbm3d_params* params);
GBM3D_API gbm3d_status gbm3d_params_set(gbm3d_params* params, const char* key, double value);
GBM3D_API gbm3d_status gbm3d_params_get(const gbm3d_params* params, const char* key, double* value);
/* JSON object whose members override the current values. Unknown keys are rejected. */
GBM3D_API gbm3d_status gbm3d_params_load_json(gbm3d_params* params, const char* path);
GBM3D_API gbm3d_status gbm3d_params_parse_json(gbm3d_params* params, const char* text);

/* Metrics. */
GBM3D_API gbm3d_status gbm3d_sigma_for_snr(const gbm3d_image* img, double snr, double* sigma);
GBM3D_API gbm3d_status gbm3d_add_noise(const gbm3d_image* img, double sigma, uint64_t seed, gbm3d_image** out);
/* Peak 255; identical images give +inf. */
GBM3D_API gbm3d_status gbm3d_psnr(const gbm3d_image* reference, const gbm3d_image* test, double* db);

typedef struct gbm3d_denoise_options {
  int stage;   /* 1 or 2 */
  int threads; /* <= 0 selects the hardware concurrency */
  int patched; /* nonzero: 256+N patch decomposition */
} gbm3d_denoise_options;

GBM3D_API gbm3d_denoise_options gbm3d_denoise_options_default(void);

/* `params` may be NULL for defaults. `basic` may be NULL; it receives the stage-1 estimate. */
GBM3D_API gbm3d_status gbm3d_denoise(const gbm3d_image* noisy, double sigma, const gbm3d_params* params,
                                     const gbm3d_denoise_options* options, gbm3d_image** basic,
                                     gbm3d_image** final_estimate);

/* Builds the stage-1 match table of `img` (padded as the denoiser pads it) and reports the elapsed seconds. */
GBM3D_API gbm3d_status gbm3d_match_benchmark(const gbm3d_image* img, const gbm3d_params* params,
                                             gbm3d_match_method method, double* seconds);

#ifdef __cplusplus
}
#endif

#endif
