/* C interface to the Curie-Weiss Potts toolkit. */
#ifndef CWPOTTS_H
#define CWPOTTS_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define CWP_API __declspec(dllexport)
#else
#define CWP_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum cwp_status {
    CWP_OK = 0,
    CWP_ERR_INVALID_ARGUMENT = 1,
    CWP_ERR_DOMAIN = 2,
    CWP_ERR_SHAPE = 3,
    CWP_ERR_CLASSIFICATION = 4,
    CWP_ERR_SIZE = 5,
    CWP_ERR_NON_CONVERGENCE = 6,
    CWP_ERR_DEGENERATE = 7,
    CWP_ERR_IO = 8,
    CWP_ERR_BUFFER_TOO_SMALL = 9,
    CWP_ERR_INTERNAL = 10
} cwp_status;

typedef struct cwp_spec {
    int p;
    int q;
    double beta;
    double h;
} cwp_spec;

typedef enum cwp_tag {
    CWP_REGULAR = 0,
    CWP_STRONGLY_CRITICAL = 1,
    CWP_WEAKLY_CRITICAL = 2,
    CWP_SPECIAL_TYPE_I = 3,
    CWP_SPECIAL_TYPE_II = 4
} cwp_tag;

typedef struct cwp_landmarks {
    double beta_c;
    double beta_tilde;
    double h_tilde;
    double s_pq;
    int special_type; /* 1 or 2 */
} cwp_landmarks;

typedef struct cwp_estimate {
    double estimate;
    double observed_statistic;
    double residual;
    double bracket_lo;
    double bracket_hi;
    int iterations;
    int converged;
    int boundary;
} cwp_estimate;

typedef enum cwp_axis { CWP_AXIS_H = 0, CWP_AXIS_BETA = 1 } cwp_axis;
typedef enum cwp_ci_method { CWP_CI_PLAIN = 0, CWP_CI_AUGMENTED = 1, CWP_CI_TWO_STEP = 2 } cwp_ci_method;

typedef struct cwp_interval {
    double lower;
    double upper;
    double level;
    int has_appended;
    double appended;
    int method;
    int has_p_value;
    double p_value;
} cwp_interval;

typedef enum cwp_law_kind {
    CWP_LAW_HHAT = 0,    /* limit of the rescaled h estimator */
    CWP_LAW_BHAT = 1,    /* limit of the rescaled beta estimator */
    CWP_LAW_NORM_P = 2,  /* limit of the rescaled p-norm statistic */
    CWP_LAW_T = 3,       /* law of T at a special point */
    CWP_LAW_SEXTIC = 4   /* exp(-32/15 x^6 - h_bar x) */
} cwp_law_kind;

typedef struct cwp_exact_law cwp_exact_law;
typedef struct cwp_law cwp_law;
typedef struct cwp_diagram cwp_diagram;

/* Message of the last failed call on this thread. */
CWP_API const char* cwp_last_error(void);
CWP_API const char* cwp_version(void);

CWP_API cwp_status cwp_f_deriv(const cwp_spec* spec, double s, int order, double* out);
/* q*q row-major */
CWP_API cwp_status cwp_sigma_matrix(const cwp_spec* spec, double s, double* out, size_t capacity);

CWP_API cwp_status cwp_landmarks_get(int p, int q, cwp_landmarks* out);
CWP_API cwp_status cwp_landmarks_json(int p, int q, char* buf, size_t capacity, size_t* needed);
CWP_API cwp_status cwp_classify(const cwp_spec* spec, cwp_tag* tag, cwp_spec* effective);
CWP_API cwp_status cwp_classify_json(const cwp_spec* spec, char* buf, size_t capacity, size_t* needed);

/* On return *count holds the number of samples written (or required). */
CWP_API cwp_status cwp_critical_curve(int p, int q, int n_samples, double* h, double* beta, double* s_low,
                                      double* s_high, size_t capacity, size_t* count);

CWP_API cwp_status cwp_diagram_create(int p, int q, double beta_lo, double beta_hi, double h_lo, double h_hi,
                                      int n_beta, int n_h, cwp_diagram** out);
CWP_API void cwp_diagram_free(cwp_diagram* d);
/* n_beta*n_h tags, index ih*n_beta+ib, at cell centers */
CWP_API cwp_status cwp_diagram_tags(const cwp_diagram* d, int* tags, size_t capacity);
CWP_API cwp_status cwp_diagram_cell(const cwp_diagram* d, int ib, int ih, double* beta, double* h);
/* landmarks and curve samples */
CWP_API cwp_status cwp_diagram_json(const cwp_diagram* d, char* buf, size_t capacity, size_t* needed);

CWP_API cwp_status cwp_exact_moments(const cwp_spec* spec, int N, double* log_partition, double* u1, double* up);
CWP_API cwp_status cwp_tail_prob(const cwp_spec* spec, int N, double eps, double* out);
CWP_API cwp_status cwp_exact_law_create(const cwp_spec* spec, int N, cwp_exact_law** out);
CWP_API cwp_status cwp_exact_law_load(const char* path, const cwp_spec* spec, cwp_exact_law** out);
CWP_API void cwp_exact_law_free(cwp_exact_law* law);
CWP_API size_t cwp_exact_law_size(const cwp_exact_law* law);
CWP_API cwp_status cwp_exact_law_save(const cwp_exact_law* law, const char* path);
/* N+1 values P(c_1 = k) */
CWP_API cwp_status cwp_exact_law_marginal_first(const cwp_exact_law* law, double* out, size_t capacity);
/* n*q proportions, row-major */
CWP_API cwp_status cwp_exact_sample(const cwp_exact_law* law, size_t n, uint64_t seed, double* out, size_t capacity);

CWP_API cwp_status cwp_gibbs_chain(const cwp_spec* spec, int N, int sweeps, int burn_in, int thin, uint64_t seed,
                                   double* out, size_t capacity, size_t* count);

/* Rescales n samples (n*q proportions) around the nearest maximizer at the classified point. */
CWP_API cwp_status cwp_rescale(const cwp_spec* spec, int N, const double* samples, size_t n, double* w_out,
                               double* t_out, size_t* basin_out, double* exponent);

CWP_API cwp_status cwp_law_create(const cwp_spec* spec, cwp_law_kind kind, double beta_bar, double h_bar,
                                  cwp_law** out);
/* Law of <W, direction> for the Gaussian (mixture) limit of sqrt(N)(Xbar - m) at a regular or critical point. */
CWP_API cwp_status cwp_law_projection(const cwp_spec* spec, const double* direction, size_t q, cwp_law** out);
CWP_API void cwp_law_free(cwp_law* law);
CWP_API cwp_status cwp_law_pdf(const cwp_law* law, double x, double* out);
CWP_API cwp_status cwp_law_cdf(const cwp_law* law, double x, double* out);
CWP_API cwp_status cwp_law_quantile(const cwp_law* law, double u, double* out);
CWP_API cwp_status cwp_law_moments(const cwp_law* law, double* mean, double* variance);
CWP_API cwp_status cwp_law_total_mass(const cwp_law* law, double* out);
CWP_API cwp_status cwp_law_sample(const cwp_law* law, size_t n, uint64_t seed, double* out);
/* points rows of (x, pdf, cdf) */
CWP_API cwp_status cwp_law_density_table(const cwp_law* law, int points, double* out, size_t capacity);
CWP_API cwp_status cwp_law_json(const cwp_law* law, char* buf, size_t capacity, size_t* needed);
CWP_API cwp_status cwp_ks_distance(const cwp_law* law, const double* samples, size_t n, double* out);

CWP_API cwp_status cwp_mle_h(const cwp_spec* spec, double observed_x1, int N, cwp_estimate* out);
CWP_API cwp_status cwp_mle_beta(const cwp_spec* spec, double observed_pnorm, int N, cwp_estimate* out);
/* spec carries the known parameter; data holds q proportions */
CWP_API cwp_status cwp_confidence_set(const cwp_spec* spec, cwp_axis axis, cwp_ci_method method, double estimate,
                                      const double* data, size_t q, int N, double alpha, cwp_interval* out);
/* Estimate plus confidence set as one JSON document. */
CWP_API cwp_status cwp_estimate_json(const cwp_spec* spec, cwp_axis axis, cwp_ci_method method, const double* data,
                                     size_t q, int N, double alpha, char* buf, size_t capacity, size_t* needed);

#ifdef __cplusplus
}
#endif

#endif
