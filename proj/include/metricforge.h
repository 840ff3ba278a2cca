/* metricforge — treatment-policy incentive analysis.
 *
 * C interface to the core library: opaque handles, status codes, JSON/CSV
 * payloads. All strings returned through `char**` are heap-allocated and must
 * be released with mf_string_free().
 */
#ifndef METRICFORGE_H
#define METRICFORGE_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum mf_status {
  MF_OK = 0,
  MF_ERROR_INVALID = 1,     /* failed validation or bad arguments */
  MF_ERROR_IO = 2,          /* missing or unwritable files */
  MF_ERROR_PARSE = 3,       /* malformed JSON/CSV/dataset records */
  MF_ERROR_UNSUPPORTED = 4, /* operation not defined for the inputs */
  MF_ERROR_INTERNAL = 5
} mf_status;

/* Opaque handles. */
typedef struct mf_model mf_model; /* population, optionally with a feature table */
typedef struct mf_rows mf_rows;   /* loaded clinical rows */
typedef struct mf_fit mf_fit;     /* fitted outcome model */

const char* mf_version(void);

/* Thread-local description of the most recent failure. */
const char* mf_last_error(void);
const char* mf_last_error_code(void);

void mf_string_free(char* text);
void mf_model_free(mf_model* model);
void mf_rows_free(mf_rows* rows);
void mf_fit_free(mf_fit* fit);

/* -- Population models ---------------------------------------------------- */

/* Document schema: {"support": [{"x": int, "u"?: int}, ...], "probs": [...],
 * "mu0": [...], "mu1": [...], "n": int, "u_support"?: [...],
 * "features"?: {...}}. Unknown keys are ignored. */
mf_status mf_model_from_json(const char* json_text, mf_model** out);
mf_status mf_model_to_json(const mf_model* model, char** out);
mf_status mf_model_read(const char* path, mf_model** out);
mf_status mf_model_write(const mf_model* model, const char* path);
mf_status mf_model_size(const mf_model* model, size_t* out);

/* Single-x worst-case family for the marginal-error bound; 0 < beta < alpha. */
mf_status mf_tightness_model(double alpha, double beta, mf_model** out);

/* -- Rewards, responses, regret ------------------------------------------- */

/* Reward specs travel as JSON: {"kind": "ATO|ATT|TO|TT|WeightedTT",
 * "mu0_hat"?: {"estimates": [...], "source": "auxiliary-unbiased|agent-untreated"},
 * "g"?: [...]}. */
mf_status mf_expected_reward(const mf_model* model, const char* spec_json,
                             const double* treat_prob, size_t len, double* out);

/* Best response, welfare, class optimum and regret, as JSON. */
mf_status mf_regret_report(const mf_model* model, const char* spec_json, char** report_json);

/* Information-asymmetry report. source is "auxiliary" or "agent-untreated";
 * interior_eps (only used for the agent-untreated source) keeps policies
 * inside [eps, 1-eps] so the untreated pool stays populated. */
mf_status mf_asym_report(const mf_model* model, const char* source, double interior_eps,
                         char** report_json);

/* Feature-accumulation curve; format is "json" or "csv". Requires a model
 * with a feature table. */
mf_status mf_curve(const mf_model* model, const char* format, char** out);

/* Utility/regret/treat-rate rows for every reward function; format "json" or
 * "csv". demographics_csv is a comma-separated feature list for the
 * demographic-conditioning row (may be empty). */
mf_status mf_evaluate(const mf_model* model, const char* demographics_csv, const char* format,
                      char** out);

/* -- Multi-agent ranking --------------------------------------------------- */

/* agents_json: {"agents": [{"id": str, "probs": [...], "mu0": [...],
 * "mu1": [...], "n": int}, ...], "reference": [...], "use_reweighting": bool}.
 * reweight_override: -1 keeps the document's flag, 0/1 force it. Both outputs
 * are optional (pass NULL to skip). */
mf_status mf_rank(const char* agents_json, int reweight_override, char** report_json,
                  char** leaderboard_csv);

/* -- Clinical datasets ----------------------------------------------------- */

/* name is "horse-colic" or "ist"; impute is "median" or "drop". */
mf_status mf_load_dataset(const char* name, const char* path, const char* impute, mf_rows** out);
mf_status mf_rows_summary(const mf_rows* rows, char** summary_json);

/* Fits the dataset's outcome model (logistic for horse-colic, linear for ist)
 * with treatment interactions. */
mf_status mf_fit_rows(const mf_rows* rows, double ridge, int standardize_numeric, mf_fit** out);
mf_status mf_fit_to_json(const mf_fit* fit, char** out);

/* Empirical population over distinct observed feature vectors with synthetic
 * mean potential outcomes from the fit. */
mf_status mf_build_population(const mf_rows* rows, const mf_fit* fit, mf_model** out);

/* -- Property suite --------------------------------------------------------- */

/* Runs the seeded property checks; all_passed is 1 when every check holds. */
mf_status mf_check(uint64_t seed, char** summary_json, int* all_passed);

#ifdef __cplusplus
}
#endif

#endif /* METRICFORGE_H */
