/* C interface to the fermion-system laboratory: opaque handles, error codes.
 * The cfl command-line tool links exclusively against this surface. */
#ifndef CFL_H
#define CFL_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum cfl_status {
  CFL_OK = 0,
  CFL_ERR_CONFIG = 2,    /* malformed config file */
  CFL_ERR_PARAMS = 3,    /* parameter validation */
  CFL_ERR_NUMERICAL = 4, /* a numerical check failed its tolerance */
  CFL_ERR_INVALID = 5    /* bad handle / argument / buffer */
} cfl_status;

const char* cfl_version(void);

/* Last error message for the calling thread (empty string if none). */
const char* cfl_last_error(void);

/* ---- scenario runner ---------------------------------------------------- */

/* Runs a named scenario; config_path may be NULL for defaults. Returns one of
 * cfl_status; artifacts and a log land in out_dir. */
int cfl_run_scenario(const char* name, const char* config_path, const char* out_dir, uint64_t seed,
                     int plot_data);

/* Newline-separated "name: description" catalog; free with cfl_string_free. */
char* cfl_list_scenarios(void);
void cfl_string_free(char* s);

/* Runs the acceptance criteria; returns CFL_OK iff every criterion passed.
 * When out_dir is non-NULL a pass/fail table is written there. */
int cfl_verify_all(const char* out_dir);

/* ---- sampled systems ------------------------------------------------------ */

typedef struct cfl_system cfl_system;

cfl_system* cfl_system_sphere(int subdivisions);
cfl_system* cfl_system_lattice(double kappa);
cfl_system* cfl_system_torus_scalar(double cutoff, int grid_n);
void cfl_system_free(cfl_system* sys);

int cfl_system_size(const cfl_system* sys);
int cfl_system_hilbert_dim(const cfl_system* sys);

/* Operator entries row-major as interleaved re,im; len must be >= 2*dim*dim. */
cfl_status cfl_system_point(const cfl_system* sys, int index, double* out, size_t len);

/* Ascending eigenvalues; len must be >= dim. */
cfl_status cfl_system_eigenvalues(const cfl_system* sys, int index, double* out, size_t len);

/* relation_out: 0 timelike, 1 spacelike, 2 lightlike */
cfl_status cfl_causal_classify(const cfl_system* sys, int i, int j, int* relation_out);

cfl_status cfl_system_export_json(const cfl_system* sys, const char* path);

#ifdef __cplusplus
}
#endif

#endif /* CFL_H */
