/* C interface of the cubic-strata library.  All results come back as
 * heap-allocated NUL-terminated strings (JSON, CSV or SVG) owned by the
 * caller; release them with cs_string_free.  Complex parameters are passed
 * in the "a+bi" text form used everywhere else, e.g. "-3+1i".
 */
#ifndef CUBICSTRATA_H
#define CUBICSTRATA_H

#ifdef __cplusplus
extern "C" {
#endif

typedef enum cs_status {
  CS_OK = 0,
  CS_EINVAL = 1,      /* unparsable argument or precondition failure */
  CS_EUNRESOLVED = 2, /* classification or tracing could not be resolved */
  CS_EFAIL = 3        /* property failure or internal numeric error */
} cs_status;

/* Opaque handle holding the tolerance configuration and thread budget. */
typedef struct cs_ctx cs_ctx;

cs_ctx* cs_ctx_new(void);
void cs_ctx_free(cs_ctx* ctx);

/* Knobs by name: root_merge, zero_norm, axis, band, locate, rel, abs,
 * max_time, landing, match, quad_rel, d0, crossing, grid_rel, grid_abs,
 * grid_landing.  Unknown names give CS_EINVAL. */
cs_status cs_ctx_set_tolerance(cs_ctx* ctx, const char* name, double value);
cs_status cs_ctx_set_threads(cs_ctx* ctx, int threads);

/* Human-readable detail of the last non-CS_OK result on this handle. */
const char* cs_last_error(const cs_ctx* ctx);
const char* cs_status_message(cs_status status);

/* Stratum plus certificate as JSON.  CS_EUNRESOLVED still writes the
 * document (tag "U" with diagnostic). */
cs_status cs_classify_json(cs_ctx* ctx, const char* e1, const char* e0,
                           char** out_json);

cs_status cs_portrait_svg(cs_ctx* ctx, const char* e1, const char* e0,
                          char** out_svg);

/* Separatrix trajectory as CSV (t, re_z, im_z, chart); sep_index 1..4. */
cs_status cs_trace_csv(cs_ctx* ctx, const char* e1, const char* e0,
                       int sep_index, char** out_csv);

/* Grid over e0 in [x0,x1]x[y0,y1] at fixed e1; out_csv and out_svg may each
 * be NULL when not wanted (the sampling runs once either way). */
cs_status cs_slice(cs_ctx* ctx, const char* e1, double x0, double x1,
                   double y0, double y1, int nx, int ny, char** out_csv,
                   char** out_svg);

/* chart is "e1_unit" or "sphere". */
cs_status cs_delta_knot_csv(cs_ctx* ctx, const char* chart, int n,
                            char** out_csv);

cs_status cs_tau_json(cs_ctx* ctx, const char* e1, const char* e0,
                      char** out_json);

/* Straight parameter segment (e1a,e0a) -> (e1b,e0b) crossing one homoclinic
 * wall; the report carries the one-sided limits and the table row. */
cs_status cs_crossing_json(cs_ctx* ctx, const char* e1a, const char* e0a,
                           const char* e1b, const char* e0b, char** out_json);

/* Runs the whole property suite; CS_EFAIL when any check fails, the JSON
 * report is written either way. */
cs_status cs_verify_json(cs_ctx* ctx, unsigned long long seed,
                         char** out_json);

void cs_string_free(char* s);

#ifdef __cplusplus
}
#endif

#endif /* CUBICSTRATA_H */
