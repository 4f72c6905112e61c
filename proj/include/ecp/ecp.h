/* Edge controller placement: deterministic-annealing solvers, exact search,
 * and phase analysis behind a plain C interface.
 *
 * Every fallible call returns ecp_status; on failure the out parameters are
 * untouched and ecp_last_error_message() describes what went wrong (per
 * thread, overwritten by the next failure). Handles are created by the
 * library and released with the matching _destroy function; destroy accepts
 * NULL. Plain getters on a NULL handle return 0.
 */
#ifndef ECP_H
#define ECP_H

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum ecp_status {
  ECP_OK = 0,
  ECP_ERROR_NULL_ARGUMENT = 1,
  ECP_ERROR_VALIDATION = 2,
  ECP_ERROR_IO = 3,
  ECP_ERROR_INFEASIBLE = 4,
  ECP_ERROR_DEGENERATE = 5,
  ECP_ERROR_RUNTIME = 6
} ecp_status;

typedef struct ecp_instance ecp_instance;
typedef struct ecp_config ecp_config;
typedef struct ecp_result ecp_result;
typedef struct ecp_placement ecp_placement;
typedef struct ecp_phase_result ecp_phase_result;

const char* ecp_last_error_message(void);

/* --- network instances ------------------------------------------------- */

/* positions: node_count x dimension, row-major. weights may be NULL for
 * uniform 1/node_count. candidates: node indices allowed to host a
 * controller. */
ecp_status ecp_instance_create(int dimension, double gamma, const double* positions,
                               const double* weights, int node_count, const int* candidates,
                               int candidate_count, ecp_instance** out);

/* Gaussian blobs around uniformly placed centers; every node is a
 * candidate and weights are uniform. */
ecp_status ecp_instance_generate(int clusters, int size, int dimension, uint64_t seed,
                                 double cluster_spread, double box_low, double box_high,
                                 double gamma, ecp_instance** out);

ecp_status ecp_instance_load(const char* path, ecp_instance** out);
ecp_status ecp_instance_save(const ecp_instance* instance, const char* path);
ecp_status ecp_instance_clone(const ecp_instance* instance, ecp_instance** out);
ecp_status ecp_instance_set_gamma(ecp_instance* instance, double gamma);
int ecp_instance_size(const ecp_instance* instance);
int ecp_instance_dimension(const ecp_instance* instance);
double ecp_instance_gamma(const ecp_instance* instance);
void ecp_instance_destroy(ecp_instance* instance);

/* --- annealing configuration ------------------------------------------- */

/* A fresh config selects every value automatically from instance
 * statistics. Setters accept values <= 0 (or < 0 for the merge tolerance)
 * to restore the automatic choice; invalid combinations are reported when
 * a solver run resolves the schedule. */
ecp_status ecp_config_create(ecp_config** out);
ecp_status ecp_config_set_temperature_range(ecp_config* config, double t_max, double t_min);
ecp_status ecp_config_set_cooling(ecp_config* config, double alpha);
ecp_status ecp_config_set_max_controllers(ecp_config* config, int k_max);
ecp_status ecp_config_set_convergence(ecp_config* config, double delta,
                                      int max_iters_per_temperature);
ecp_status ecp_config_set_perturbation(ecp_config* config, double scale);
ecp_status ecp_config_set_merge_tolerance(ecp_config* config, double tolerance);
void ecp_config_destroy(ecp_config* config);

/* --- solvers ------------------------------------------------------------ */

ecp_status ecp_solve_leaderless(const ecp_instance* instance, const ecp_config* config,
                                uint64_t seed, ecp_result** out);
ecp_status ecp_solve_leader_based(const ecp_instance* instance, const ecp_config* config,
                                  uint64_t seed, ecp_result** out);

int ecp_result_controller_count(const ecp_result* result);
ecp_status ecp_result_controllers(const ecp_result* result, int* buffer);
int ecp_result_assignment_length(const ecp_result* result);
ecp_status ecp_result_assignment(const ecp_result* result, int* buffer);
/* Writes -1 for a leaderless result. */
ecp_status ecp_result_leader(const ecp_result* result, int* out_leader);
ecp_status ecp_result_objective(const ecp_result* result, double* delay_cost, double* sync_cost,
                                double* total);
/* Final relaxed distortion before the placement was projected onto nodes. */
ecp_status ecp_result_soft_objective(const ecp_result* result, double* out);
long long ecp_result_trace_length(const ecp_result* result);
ecp_status ecp_result_trace_row(const ecp_result* result, long long row, long long* iteration,
                                double* temperature, double* distortion, double* entropy,
                                double* free_energy, int* effective_centroids);
ecp_status ecp_result_save_placement(const ecp_result* result, const char* path);
ecp_status ecp_result_save_trace(const ecp_result* result, const char* path);
void ecp_result_destroy(ecp_result* result);

/* --- stored placements --------------------------------------------------- */

/* instance may be NULL to skip cross-validation against an instance. */
ecp_status ecp_placement_load(const char* path, const ecp_instance* instance,
                              ecp_placement** out);
ecp_status ecp_placement_save(const ecp_placement* placement, const char* path);
int ecp_placement_controller_count(const ecp_placement* placement);
ecp_status ecp_placement_controllers(const ecp_placement* placement, int* buffer);
int ecp_placement_assignment_length(const ecp_placement* placement);
ecp_status ecp_placement_assignment(const ecp_placement* placement, int* buffer);
ecp_status ecp_placement_leader(const ecp_placement* placement, int* out_leader);
ecp_status ecp_placement_objective(const ecp_placement* placement, double* delay_cost,
                                   double* sync_cost, double* total);
void ecp_placement_destroy(ecp_placement* placement);

ecp_status ecp_evaluate_leaderless(const ecp_instance* instance, const ecp_placement* placement,
                                   double* delay_cost, double* sync_cost, double* total);
ecp_status ecp_evaluate_leader_based(const ecp_instance* instance, const ecp_placement* placement,
                                     double* delay_cost, double* sync_cost, double* total);

/* --- exact search -------------------------------------------------------- */

/* Exhaustive optimum over candidate subsets of size 1..max_controllers;
 * fails with ECP_ERROR_INFEASIBLE beyond 20 candidates. */
ecp_status ecp_oracle_leaderless(const ecp_instance* instance, int max_controllers,
                                 ecp_placement** out, long long* subsets_enumerated);
ecp_status ecp_oracle_leader_based(const ecp_instance* instance, int max_controllers,
                                   ecp_placement** out, long long* subsets_enumerated);

/* --- phase analysis ------------------------------------------------------ */

ecp_status ecp_phase_scan(const ecp_instance* instance, const ecp_config* config, int grid_points,
                          uint64_t seed, ecp_phase_result** out);
int ecp_phase_point_count(const ecp_phase_result* result);
ecp_status ecp_phase_point(const ecp_phase_result* result, int index, double* temperature,
                           double* det, int* effective_centroids);
int ecp_phase_critical_count(const ecp_phase_result* result);
ecp_status ecp_phase_critical(const ecp_phase_result* result, int index, double* temperature);
ecp_status ecp_phase_save_csv(const ecp_phase_result* result, const char* path);
void ecp_phase_destroy(ecp_phase_result* result);

#ifdef __cplusplus
}
#endif

#endif /* ECP_H */
