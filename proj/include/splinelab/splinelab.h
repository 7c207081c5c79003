#ifndef SPLINELAB_SPLINELAB_H
#define SPLINELAB_SPLINELAB_H

#include <stddef.h>

#if defined(SPLINELAB_BUILDING_LIBRARY)
#define SPLINELAB_API __attribute__((visibility("default")))
#else
#define SPLINELAB_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Status codes. Every function returning int returns one of these; on
   failure splinelab_last_error() describes the problem (per thread). */
enum {
  SPLINELAB_OK = 0,
  SPLINELAB_INVALID_ARGUMENT = 1,
  SPLINELAB_OUT_OF_DOMAIN = 2,
  SPLINELAB_DUPLICATE_KNOTS = 3,
  SPLINELAB_TOO_FEW_POINTS = 4,
  SPLINELAB_SINGULAR_SYSTEM = 5,
  SPLINELAB_IO = 6,
  SPLINELAB_CONFIG = 7,
  SPLINELAB_INTERNAL = 99
};

enum { SPLINELAB_KERNEL_FULL = 0, SPLINELAB_KERNEL_H0 = 1, SPLINELAB_KERNEL_H1 = 2 };

typedef struct splinelab_space splinelab_space;
typedef struct splinelab_fit splinelab_fit;
typedef struct splinelab_plan splinelab_plan;
typedef struct splinelab_result splinelab_result;

SPLINELAB_API const char* splinelab_version(void);
SPLINELAB_API const char* splinelab_last_error(void);
SPLINELAB_API void splinelab_string_free(char* s);

/* Kernel space H^m([0,1]). */
SPLINELAB_API int splinelab_space_create(int m, splinelab_space** out);
SPLINELAB_API void splinelab_space_destroy(splinelab_space* space);
SPLINELAB_API int splinelab_space_order(const splinelab_space* space);
SPLINELAB_API int splinelab_kernel_eval(const splinelab_space* space, double s, double t,
                                        double* k0, double* k1, double* k);
/* Row-major n x n Gram matrix of the chosen kernel part at the points. */
SPLINELAB_API int splinelab_gram(const splinelab_space* space, const double* points, size_t n,
                                 int which, double* out);

/* Penalized least-squares fit to (t_i, y_i). lambda = 0 interpolates. */
SPLINELAB_API int splinelab_fit_create(const splinelab_space* space, const double* t,
                                       const double* y, size_t n, double lambda,
                                       splinelab_fit** out);
SPLINELAB_API void splinelab_fit_destroy(splinelab_fit* fit);
SPLINELAB_API size_t splinelab_fit_size(const splinelab_fit* fit);
SPLINELAB_API int splinelab_fit_eval(const splinelab_fit* fit, double t, double* value);
/* poly receives m entries; knots and weights receive splinelab_fit_size() entries.
   Any output pointer may be NULL. */
SPLINELAB_API int splinelab_fit_coefficients(const splinelab_fit* fit, double* poly,
                                             double* knots, double* weights);
SPLINELAB_API int splinelab_fit_norms(const splinelab_fit* fit, double* h0, double* h1,
                                      double* full);
SPLINELAB_API int splinelab_fit_diagnostics(const splinelab_fit* fit, double* residual,
                                            double* condition_estimate, int* ill_conditioned);

/* Spectral report of U_n at the design as a JSON document. The operator norm
   is null when lambda = 0. Free the string with splinelab_string_free. */
SPLINELAB_API int splinelab_spectral_json(const splinelab_space* space, const double* t,
                                          size_t n, double lambda, double relative_cutoff,
                                          char** json);

/* Study plans. kind may be NULL to take the kind from the file. */
SPLINELAB_API int splinelab_plan_load(const char* path, const char* kind, splinelab_plan** out);
SPLINELAB_API void splinelab_plan_destroy(splinelab_plan* plan);
SPLINELAB_API const char* splinelab_plan_out_dir(const splinelab_plan* plan);

/* workers <= 0 uses every hardware thread. */
SPLINELAB_API int splinelab_study_run(const splinelab_plan* plan, int workers,
                                      splinelab_result** out);
SPLINELAB_API void splinelab_result_destroy(splinelab_result* result);
SPLINELAB_API int splinelab_result_csv(const splinelab_result* result, char** csv);
SPLINELAB_API int splinelab_result_json(const splinelab_result* result, char** json);
/* Writes <dir>/<study>.csv, .json and _manifest.json. */
SPLINELAB_API int splinelab_result_write(const splinelab_result* result,
                                         const splinelab_plan* plan, int workers,
                                         const char* dir);

#ifdef __cplusplus
}
#endif

#endif
