#ifndef FTLE_H
#define FTLE_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum FtleStatus {
  FTLE_STATUS_OK = 0,
  FTLE_STATUS_NULL_POINTER = 1,
  FTLE_STATUS_INVALID_ARGUMENT = 2,
  FTLE_STATUS_MESH = 3,
  FTLE_STATUS_INVALID_FLOWMAP = 4,
  FTLE_STATUS_KERNEL = 5,
  FTLE_STATUS_FLOW = 6,
  FTLE_STATUS_FORMAT = 7,
  FTLE_STATUS_IO = 8,
  FTLE_STATUS_PANIC = 9,
} FtleStatus;

typedef enum FtleFlowKind {
  FTLE_FLOW_KIND_DOUBLE_GYRE = 0,
  FTLE_FLOW_KIND_ABC = 1,
  FTLE_FLOW_KIND_IDENTITY = 2,
  FTLE_FLOW_KIND_CONSTANT_DRIFT = 3,
} FtleFlowKind;

typedef enum FtleStrategyKind {
  FTLE_STRATEGY_KIND_SINGLE_PASS = 0,
  FTLE_STRATEGY_KIND_DATA_PARALLEL = 1,
} FtleStrategyKind;

typedef struct FtleField FtleField;

typedef struct FtleFlowmap FtleFlowmap;

typedef struct FtleMesh FtleMesh;

/**
 * `workers` and `chunk` are read for `DataParallel` only; zero selects the
 * logical CPU count and the default chunk respectively.
 */
typedef struct FtleStrategy {
  enum FtleStrategyKind kind;
  size_t workers;
  size_t chunk;
} FtleStrategy;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null after a
 * successful one. Owned by the library.
 */
const char *ftle_last_error(void);

/**
 * Row-major structured grid with the last axis varying fastest. The three
 * arrays hold `dim` entries each.
 *
 * # Safety
 * Array arguments must point to `dim` readable values; `out` must be writable.
 */
enum FtleStatus ftle_mesh_structured(uint32_t dim,
                                     const size_t *dims,
                                     const double *spacing,
                                     const double *origin,
                                     struct FtleMesh **out);

/**
 * Reads a neighbor-table file.
 *
 * # Safety
 * `file` must be a NUL-terminated string; `out` must be writable.
 */
enum FtleStatus ftle_mesh_read(const char *file, struct FtleMesh **out);

/**
 * # Safety
 * `mesh` must be a live handle or null.
 */
size_t ftle_mesh_npoints(const struct FtleMesh *mesh);

/**
 * # Safety
 * `mesh` must be a live handle or null.
 */
uint32_t ftle_mesh_dim(const struct FtleMesh *mesh);

/**
 * # Safety
 * `mesh` must come from this library and not be used afterwards.
 */
void ftle_mesh_free(struct FtleMesh *mesh);

/**
 * Advects every mesh point through an analytic flow with fixed-step RK4.
 *
 * `params` may be null to use the flow's defaults: double gyre takes
 * `A, eps, omega`, ABC takes `A, B, C`, constant drift takes one velocity
 * component per axis (required).
 *
 * # Safety
 * `mesh` must be live, `params` must hold `nparams` values, `out` writable.
 */
enum FtleStatus ftle_flowmap_generate(const struct FtleMesh *mesh,
                                      enum FtleFlowKind flow,
                                      const double *params,
                                      size_t nparams,
                                      double t0,
                                      double horizon,
                                      double dt,
                                      struct FtleFlowmap **out);

/**
 * Wraps caller-provided final positions, `npoints * dim` values with the
 * axis varying fastest.
 *
 * # Safety
 * `mesh` must be live, `values` must hold `len` values, `out` writable.
 */
enum FtleStatus ftle_flowmap_from_values(const struct FtleMesh *mesh,
                                         const double *values,
                                         size_t len,
                                         double t0,
                                         double horizon,
                                         struct FtleFlowmap **out);

/**
 * Reads a `.ftlm` file into a new flowmap and mesh.
 *
 * # Safety
 * `file` must be a NUL-terminated string; both outputs must be writable.
 */
enum FtleStatus ftle_flowmap_read(const char *file,
                                  struct FtleFlowmap **out_flowmap,
                                  struct FtleMesh **out_mesh);

/**
 * # Safety
 * Handles must be live; `file` must be a NUL-terminated string.
 */
enum FtleStatus ftle_flowmap_write(const char *file,
                                   const struct FtleFlowmap *flowmap,
                                   const struct FtleMesh *mesh);

/**
 * # Safety
 * `flowmap` must be a live handle or null.
 */
const double *ftle_flowmap_values(const struct FtleFlowmap *flowmap, size_t *len);

/**
 * # Safety
 * `flowmap` must come from this library and not be used afterwards.
 */
void ftle_flowmap_free(struct FtleFlowmap *flowmap);

/**
 * Computes the FTLE field. Degenerate points hold NaN and are counted in
 * [`ftle_field_degenerate_count`].
 *
 * # Safety
 * Handles must be live; `out` must be writable.
 */
enum FtleStatus ftle_compute(const struct FtleFlowmap *flowmap,
                             const struct FtleMesh *mesh,
                             struct FtleStrategy strategy,
                             struct FtleField **out);

/**
 * # Safety
 * `field` must be a live handle or null.
 */
size_t ftle_field_len(const struct FtleField *field);

/**
 * Borrowed pointer to `ftle_field_len` values, valid while `field` lives.
 *
 * # Safety
 * `field` must be a live handle or null.
 */
const double *ftle_field_values(const struct FtleField *field);

/**
 * # Safety
 * `field` must be a live handle or null.
 */
uint64_t ftle_field_degenerate_count(const struct FtleField *field);

/**
 * Writes an `.ftlf` FTLE field file.
 *
 * # Safety
 * `field` must be live; `file` must be a NUL-terminated string.
 */
enum FtleStatus ftle_field_write(const char *file, const struct FtleField *field);

/**
 * Writes `x,y[,z],ftle` rows in point order.
 *
 * # Safety
 * Handles must be live; `file` must be a NUL-terminated string.
 */
enum FtleStatus ftle_field_write_csv(const char *file,
                                     const struct FtleField *field,
                                     const struct FtleMesh *mesh);

/**
 * # Safety
 * `field` must come from this library and not be used afterwards.
 */
void ftle_field_free(struct FtleField *field);

/**
 * Largest eigenvalue of a symmetric `dim × dim` matrix given row-major.
 *
 * # Safety
 * `matrix` must hold `dim * dim` values; `out` must be writable.
 */
enum FtleStatus ftle_max_eigenvalue(uint32_t dim, const double *matrix, double *out);

/**
 * `ln(lambda_max) / (2 |horizon|)`; NaN below the degeneracy floor.
 *
 * # Safety
 * `out` must be writable.
 */
enum FtleStatus ftle_exponent(double lambda_max, double horizon, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FTLE_H */
