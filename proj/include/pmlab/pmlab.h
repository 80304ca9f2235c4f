/* C interface of the pmlab library.
 *
 * Every function returns a pmlab_status. On failure the message is available
 * from pmlab_last_error() on the same thread until the next call. Strings
 * returned through char** arguments are owned by the caller and released with
 * pmlab_string_free.
 */
#ifndef PMLAB_PMLAB_H
#define PMLAB_PMLAB_H

#include <stddef.h>

#if defined(PMLAB_BUILDING_LIBRARY)
#define PMLAB_API __attribute__((visibility("default")))
#else
#define PMLAB_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum {
  PMLAB_OK = 0,
  PMLAB_ERR_DOMAIN = 1,     /* parameters outside the admissible set */
  PMLAB_ERR_SHAPE = 2,      /* mismatched grids or sizes */
  PMLAB_ERR_RESOLUTION = 3, /* grid too coarse for the requested eps */
  PMLAB_ERR_NUMERICAL = 4,  /* solver breakdown */
  PMLAB_ERR_IO = 5,
  PMLAB_ERR_USAGE = 6,      /* unknown keys, bad values, null arguments */
  PMLAB_ERR_INTERNAL = 7
} pmlab_status;

typedef struct pmlab_config pmlab_config;
typedef struct pmlab_sweep pmlab_sweep;

/* Called with one JSON record (sweeps) or one progress line (checks). */
typedef void (*pmlab_callback)(const char* text, void* user);

PMLAB_API const char* pmlab_version(void);
PMLAB_API const char* pmlab_last_error(void);
PMLAB_API const char* pmlab_status_name(pmlab_status s);
PMLAB_API void pmlab_string_free(char* s);

/* Configuration */
PMLAB_API size_t pmlab_config_key_count(void);
PMLAB_API const char* pmlab_config_key(size_t i);
PMLAB_API pmlab_status pmlab_config_new(pmlab_config** out);
PMLAB_API pmlab_status pmlab_config_load(const char* path, pmlab_config** out);
PMLAB_API pmlab_status pmlab_config_set(pmlab_config* cfg, const char* key, const char* value);
PMLAB_API pmlab_status pmlab_config_get(const pmlab_config* cfg, const char* key, char** value);
PMLAB_API pmlab_status pmlab_config_validate(const pmlab_config* cfg);
/* Output directory after the PMLAB_OUTPUT_DIR override. */
PMLAB_API pmlab_status pmlab_config_output_dir(const pmlab_config* cfg, char** dir);
PMLAB_API void pmlab_config_free(pmlab_config* cfg);

/* Single solve at one eps; writes minimizer_<eps>.csv when write != 0 and
 * returns the sweep record as JSON. `warm_path` may be NULL. */
PMLAB_API pmlab_status pmlab_minimize(const pmlab_config* cfg, double eps, const char* warm_path,
                                      int write, char** record_json);

/* Full sweep. With write != 0 the records and minimizers go to the output
 * directory as the sweep advances. `progress` may be NULL. */
PMLAB_API pmlab_status pmlab_sweep_run(const pmlab_config* cfg, int write,
                                       pmlab_callback progress, void* user, pmlab_sweep** out);
PMLAB_API size_t pmlab_sweep_size(const pmlab_sweep* sweep);
PMLAB_API pmlab_status pmlab_sweep_record_json(const pmlab_sweep* sweep, size_t i, char** json);
/* Writes the SVG plots for the sweep into `dir` (NULL: the output directory of `cfg`);
 * the paths come back as a JSON array. */
PMLAB_API pmlab_status pmlab_sweep_plot(const pmlab_sweep* sweep, const pmlab_config* cfg,
                                        const char* dir, char** paths_json);
PMLAB_API void pmlab_sweep_free(pmlab_sweep* sweep);

/* Plots from a directory holding records.json and minimizer files. */
PMLAB_API pmlab_status pmlab_plot_directory(const pmlab_config* cfg, const char* dir,
                                            char** paths_json);

/* Limit problem on (0, L) with forcing M x: mu0, mu0_star, bounds and, with
 * oracle != 0, the brute-force values on the L/512 grids. */
PMLAB_API pmlab_status pmlab_limit(double alpha, double beta, double L, double M, int oracle,
                                   char** json);

/* Blow-up fits at the configured centers (and at both ends) of a stored minimizer. */
PMLAB_API pmlab_status pmlab_blowup(const pmlab_config* cfg, const char* minimizer_path,
                                    double eps, char** json);

/* Varifold pairings of a stored minimizer with the configured test functions. */
PMLAB_API pmlab_status pmlab_varifold(const pmlab_config* cfg, const char* minimizer_path,
                                      char** json);

/* Runs a check suite; *passed is set to 1 or 0. `output_dir` may be NULL. */
PMLAB_API pmlab_status pmlab_check(const char* suite, const char* output_dir,
                                   pmlab_callback log, void* user, int* passed,
                                   char** report_json);

#ifdef __cplusplus
}
#endif

#endif
