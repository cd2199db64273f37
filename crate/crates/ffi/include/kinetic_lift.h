#ifndef KINETIC_LIFT_H
#define KINETIC_LIFT_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum KlStatus {
  KL_STATUS_OK = 0,
  KL_STATUS_NULL_POINTER = 1,
  /**
   * Bad input: arguments, config, snapshot or grid mismatch.
   */
  KL_STATUS_ARGUMENT = 2,
  /**
   * Solver failure: non-convergence, non-finite values, singular systems.
   */
  KL_STATUS_NUMERICAL = 3,
  KL_STATUS_IO = 4,
  KL_STATUS_PANIC = 5,
} KlStatus;

/**
 * Opaque distribution field handle.
 */
typedef struct KlField KlField;

/**
 * Opaque scenario handle.
 */
typedef struct KlScenario KlScenario;

typedef struct KlLiftSummary {
  /**
   * `|f - f_c|_2` in stored units.
   */
  double error_lift;
  /**
   * `|f_eq - f_c|_2` for the local equilibrium of the same moments.
   */
  double error_equilibrium;
  size_t iterations;
  size_t gmres_iterations;
  double moment_drift;
} KlLiftSummary;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null. The pointer
 * stays valid until the next failing call on the same thread.
 */
const char *kl_last_error_message(void);

/**
 * Loads a scenario file.
 *
 * # Safety
 * `path` must be a NUL-terminated string; `out` must be writable.
 */
enum KlStatus kl_scenario_load(const char *path, struct KlScenario **out);

/**
 * Parses scenario text (`key = value` lines).
 *
 * # Safety
 * `text` must be a NUL-terminated string; `out` must be writable.
 */
enum KlStatus kl_scenario_parse(const char *text, struct KlScenario **out);

/**
 * # Safety
 * `scenario` must come from this library and not be used afterwards.
 */
void kl_scenario_free(struct KlScenario *scenario);

/**
 * Grid sizes of a scenario.
 *
 * # Safety
 * All pointers must be valid.
 */
enum KlStatus kl_scenario_dims(const struct KlScenario *scenario,
                               size_t *n_cells,
                               size_t *n_velocities);

/**
 * Overrides the grid size; `n_velocities = 0` keeps the current value.
 *
 * # Safety
 * `scenario` must be valid.
 */
enum KlStatus kl_scenario_set_grid(struct KlScenario *scenario,
                                   size_t n_cells,
                                   size_t n_velocities);

/**
 * Sets the CR extrapolation order and the solver (0 Picard, 1 Newton).
 *
 * # Safety
 * `scenario` must be valid.
 */
enum KlStatus kl_scenario_set_lifting(struct KlScenario *scenario, size_t order, int newton);

/**
 * Time step of the scenario's finite-volume scheme, in seconds.
 *
 * # Safety
 * All pointers must be valid.
 */
enum KlStatus kl_scenario_dt(const struct KlScenario *scenario, double *dt);

/**
 * Advances the ambient equilibrium `steps` steps.
 *
 * # Safety
 * `scenario` must be valid; `out` must be writable.
 */
enum KlStatus kl_reference_run(const struct KlScenario *scenario,
                               size_t steps,
                               struct KlField **out);

/**
 * # Safety
 * `field` must come from this library and not be used afterwards.
 */
void kl_field_free(struct KlField *field);

/**
 * # Safety
 * All pointers must be valid.
 */
enum KlStatus kl_field_dims(const struct KlField *field, size_t *n_cells, size_t *n_velocities);

/**
 * Copies the cell-major values (`N * Nv` doubles, stored units) into `buf`.
 *
 * # Safety
 * `buf` must hold `len` doubles.
 */
enum KlStatus kl_field_values(const struct KlField *field, double *buf, size_t len);

/**
 * Reads a `KLIFT1` snapshot.
 *
 * # Safety
 * `path` must be a NUL-terminated string; `out` must be writable.
 */
enum KlStatus kl_field_read(const char *path, struct KlField **out);

/**
 * Writes a `KLIFT1` snapshot.
 *
 * # Safety
 * `field` must be valid; `path` must be a NUL-terminated string.
 */
enum KlStatus kl_field_write(const struct KlField *field, const char *path);

/**
 * Density (1/m^3), velocity (m/s) and temperature (K) per cell; each
 * buffer holds `len = N` doubles.
 *
 * # Safety
 * Buffers must hold `len` doubles.
 */
enum KlStatus kl_restrict(const struct KlScenario *scenario,
                          const struct KlField *field,
                          double *n,
                          double *u,
                          double *t,
                          size_t len);

/**
 * Restricts `reference`, lifts the moments with the scenario's CR settings
 * and compares against the reference.
 *
 * # Safety
 * Handles must be valid; `lifted` and `summary` must be writable. `lifted`
 * may be null if the field is not wanted.
 */
enum KlStatus kl_lift(const struct KlScenario *scenario,
                      const struct KlField *reference,
                      struct KlField **lifted,
                      struct KlLiftSummary *summary);

/**
 * Spectral radius of the CR map Jacobian at `state` (the scenario's initial
 * field when null). `naive != 0` resets with `I - M^{-1} M^0`. With
 * `krylov_dim = 0` the dense spectrum is used, otherwise an Arnoldi estimate.
 *
 * # Safety
 * `scenario` must be valid, `state` valid or null, `radius` writable.
 */
enum KlStatus kl_jacobian_spectral_radius(const struct KlScenario *scenario,
                                          const struct KlField *state,
                                          int naive,
                                          size_t krylov_dim,
                                          double *radius);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* KINETIC_LIFT_H */
