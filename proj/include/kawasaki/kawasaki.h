#ifndef KAWASAKI_H
#define KAWASAKI_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(__GNUC__)
#define KW_API __attribute__((visibility("default")))
#else
#define KW_API
#endif

typedef enum {
    KW_OK = 0,
    KW_INVALID_ARGUMENT = 1,  /* bad parameters, e.g. L < 2n+1 */
    KW_CONTRACT = 2,          /* internal consistency check failed */
    KW_TAXONOMY_CLOSURE = 3,  /* a limit target fell outside the valley taxonomy */
    KW_INTERNAL = 4
} kw_status;

/* Message of the last failure on the calling thread ("" if none). */
KW_API const char* kw_last_error(void);
KW_API const char* kw_version(void);
KW_API const char* kw_rng_version(void);
KW_API kw_status kw_check_parameters(int n, int L);

/* Owned text result (JSON or CSV). */
typedef struct kw_text kw_text;
KW_API const char* kw_text_data(const kw_text* t);
KW_API size_t kw_text_size(const kw_text* t);
KW_API void kw_text_free(kw_text* t);

/* JSON documents; doubles carry 17 significant digits. */
KW_API kw_status kw_rates_json(int n, int L, kw_text** out);
KW_API kw_status kw_meso_json(int n, int L, kw_text** out);
KW_API kw_status kw_elementary_json(int n, int L, kw_text** out);
KW_API kw_status kw_taxonomy_json(int n, int L, kw_text** out);
/* workers <= 0: KAWASAKI_WORKERS or the hardware concurrency. */
KW_API kw_status kw_validate_json(int n, int L, const double* betas, int nbetas, int excursions, uint64_t seed,
                                  int workers, uint64_t event_budget, kw_text** out);
KW_API kw_status kw_simulate_csv(int n, int L, double beta, int excursions, uint64_t seed, uint64_t event_budget,
                                 kw_text** out);

/* Ground-state kernel: escape parameter Z and the L^2 x L^2 jump law. */
typedef struct kw_kernel kw_kernel;
KW_API kw_status kw_kernel_create(int n, int L, kw_kernel** out);
KW_API void kw_kernel_free(kw_kernel* k);
KW_API int kw_kernel_dim(const kw_kernel* k);
KW_API double kw_kernel_z(const kw_kernel* k);
/* Sites are flat indices y * L + x. */
KW_API kw_status kw_kernel_q(const kw_kernel* k, int x, int y, double* out);
KW_API kw_status kw_kernel_r(const kw_kernel* k, int x, int y, double* out);

/* Excursion statistics between ground states at finite beta. */
typedef struct kw_report kw_report;
KW_API kw_status kw_report_create(int n, int L, double beta, int excursions, uint64_t seed, int workers,
                                  uint64_t event_budget, kw_report** out);
KW_API void kw_report_free(kw_report* r);
KW_API int kw_report_count(const kw_report* r);
KW_API int kw_report_truncated(const kw_report* r);
KW_API double kw_report_delta2_fraction(const kw_report* r);
KW_API double kw_report_outside_fraction(const kw_report* r);
/* Empirical law of the displacement, L^2 entries. */
KW_API kw_status kw_report_kernel(const kw_report* r, double* out, size_t len);
/* Time spent at ground states during each excursion. */
KW_API kw_status kw_report_durations(const kw_report* r, double* out, size_t len);

#ifdef __cplusplus
}
#endif

#endif
