/* C interface to the launcher design and optimization library. */

#ifndef RLVOPT_H
#define RLVOPT_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Number of doubles in a genome array.
#define RLV_GENOME_LEN 11

// Largest admissible magnitude of the specific-impulse offset, s.
#define RLV_MAX_ISP_OFFSET 50.0

// Outcome of a call.
typedef enum RlvStatus {
  // The call succeeded.
  RLV_OK = 0,
  // A required pointer argument was null.
  RLV_NULL_POINTER = 1,
  // An argument was outside its admissible range.
  RLV_INVALID_ARGUMENT = 2,
  // The design point violates a constraint or does not converge.
  RLV_INFEASIBLE = 3,
  // The search finished without a single feasible design.
  RLV_SEARCH_FAILED = 4,
  // A file could not be read or parsed.
  RLV_IO = 5,
} RlvStatus;

// Stage propellant selector.
typedef enum RlvFuel {
  RLV_FUEL_LH2 = 0,
  RLV_FUEL_RP1 = 1,
  RLV_FUEL_LCH4 = 2,
} RlvFuel;

// Reference mission selector.
typedef enum RlvMission {
  RLV_MISSION_GTO = 0,
  RLV_MISSION_LEO = 1,
} RlvMission;

// Quantity minimized by `rlv_optimize`.
typedef enum RlvObjective {
  // Gross liftoff mass.
  RLV_OBJECTIVE_GLOW = 0,
  // Total structural mass of both stages.
  RLV_OBJECTIVE_STRUCTURAL_MASS = 1,
  // Structural mass expended per flight at the given reuse count.
  RLV_OBJECTIVE_EXPENDABLE_MASS = 2,
} RlvObjective;

// Evaluation environment: thermochemistry, calibration, atmosphere.
typedef struct RlvContext RlvContext;

// One assembled vehicle; read it through the `rlv_design_*` getters.
typedef struct RlvDesign RlvDesign;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Description of the most recent failure on this thread. The pointer
// stays valid until the next failing call on the same thread.
const char *rlv_last_error(void);

// Number of doubles expected in a genome array.
size_t rlv_genome_len(void);

// New evaluation context with the shipped calibration.
struct RlvContext *rlv_context_new(void);

// Replace the calibration of `ctx` with the contents of a file.
//
// # Safety
// `ctx` must come from `rlv_context_new` and `path` must be a valid
// NUL-terminated string.
enum RlvStatus rlv_context_load_calibration(struct RlvContext *ctx, const char *path);

// Shift every engine's specific impulse by `seconds` (|seconds| <= 50).
//
// # Safety
// `ctx` must come from `rlv_context_new`.
enum RlvStatus rlv_context_set_isp_offset(struct RlvContext *ctx, double seconds);

// Release a context. Null is ignored.
//
// # Safety
// `ctx` must come from `rlv_context_new` and not be used afterwards.
void rlv_context_free(struct RlvContext *ctx);

// Assemble the vehicle described by `genome` and hand back a design.
//
// # Safety
// `ctx` must come from `rlv_context_new`; `genome` must point at
// `genome_len` doubles; `out_design` must be a valid destination.
enum RlvStatus rlv_evaluate(const struct RlvContext *ctx,
                            enum RlvFuel fuel_stage1,
                            enum RlvFuel fuel_stage2,
                            enum RlvMission mission,
                            const double *genome,
                            size_t genome_len,
                            struct RlvDesign **out_design);

// Search the design space and hand back the best feasible design.
// `population` and `generations` of zero select the desk-scale defaults.
//
// # Safety
// `ctx` must come from `rlv_context_new`; `out_design` must be a valid
// destination.
enum RlvStatus rlv_optimize(const struct RlvContext *ctx,
                            enum RlvFuel fuel_stage1,
                            enum RlvFuel fuel_stage2,
                            enum RlvMission mission,
                            enum RlvObjective objective,
                            uint32_t n_reuses,
                            uint32_t population,
                            uint32_t generations,
                            uint64_t seed,
                            struct RlvDesign **out_design);

// Release a design. Null is ignored.
//
// # Safety
// `design` must come from this library and not be used afterwards.
void rlv_design_free(struct RlvDesign *design);

// Gross liftoff mass, kg. NaN when `design` is null.
//
// # Safety
// `design` must come from this library or be null.
double rlv_design_glow_kg(const struct RlvDesign *design);

// Structural mass of both stages, kg. NaN when `design` is null.
//
// # Safety
// `design` must come from this library or be null.
double rlv_design_structural_mass_kg(const struct RlvDesign *design);

// Structural mass expended per flight over `n_reuses` booster flights,
// kg. NaN when `design` is null.
//
// # Safety
// `design` must come from this library or be null.
double rlv_design_expendable_mass_kg(const struct RlvDesign *design, uint32_t n_reuses);

// Value of the objective the design was optimized for, kg.
// NaN when `design` is null.
//
// # Safety
// `design` must come from this library or be null.
double rlv_design_objective_kg(const struct RlvDesign *design);

// Engine count of a stage (1 = booster, 2 = upper). -1 on bad input.
//
// # Safety
// `design` must come from this library or be null.
int32_t rlv_design_engine_count(const struct RlvDesign *design, uint32_t stage);

// Genome of the design in search-space gene order.
//
// # Safety
// `design` must come from this library; `out_genome` must point at
// `genome_len` doubles.
enum RlvStatus rlv_design_genome(const struct RlvDesign *design,
                                 double *out_genome,
                                 size_t genome_len);

// Full design report as a JSON document. Free with `rlv_string_free`.
// Null when `design` is null.
//
// # Safety
// `design` must come from this library or be null.
char *rlv_design_report_json(const struct RlvDesign *design);

// Release a string returned by this library. Null is ignored.
//
// # Safety
// `text` must come from this library and not be used afterwards.
void rlv_string_free(char *text);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* RLVOPT_H */
