#ifndef BMCQ_H
#define BMCQ_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every fallible call.
 */
typedef enum BmcqStatus {
  BMCQ_STATUS_OK = 0,
  BMCQ_STATUS_NULL_ARGUMENT = 1,
  BMCQ_STATUS_INVALID_UTF8 = 2,
  BMCQ_STATUS_PARSE_ERROR = 3,
  BMCQ_STATUS_ASSEMBLY_ERROR = 4,
  BMCQ_STATUS_TRANSLATION_ERROR = 5,
  BMCQ_STATUS_UNROLL_ERROR = 6,
  BMCQ_STATUS_SOLVE_ERROR = 7,
  BMCQ_STATUS_INVALID_ARGUMENT = 8,
  BMCQ_STATUS_PANIC = 9,
} BmcqStatus;

/**
 * A parsed or generated transition system.
 */
typedef struct BmcqModel BmcqModel;

/**
 * An unrolled model: the QUBO plus what is needed to decode its solutions.
 */
typedef struct BmcqQubo BmcqQubo;

/**
 * Best assignment found by a solver.
 */
typedef struct BmcqSolution BmcqSolution;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version, a static string.
 */
const char *bmcq_version(void);

/**
 * Why the most recent call on this thread failed; empty after a success.
 * Valid until the next call into the library from the same thread.
 */
const char *bmcq_last_error(void);

/**
 * Releases a string returned by the library. Null is ignored.
 *
 * # Safety
 * `text` must come from this library and not have been freed.
 */
void bmcq_string_free(char *text);

/**
 * Parses BTOR2 text.
 *
 * # Safety
 * `text` must be a NUL-terminated string; `out` must be writable.
 */
enum BmcqStatus bmcq_model_parse(const char *text, struct BmcqModel **out);

/**
 * Assembles RISC-U source and translates it into a model.
 *
 * # Safety
 * `source` must be a NUL-terminated string; `out` must be writable.
 */
enum BmcqStatus bmcq_model_from_assembly(const char *source, struct BmcqModel **out);

/**
 * Prints the model as BTOR2.
 *
 * # Safety
 * `model` must be a live handle; `out` must be writable.
 */
enum BmcqStatus bmcq_model_to_btor2(const struct BmcqModel *model, char **out);

/**
 * # Safety
 * `model` must be null or a live handle.
 */
void bmcq_model_free(struct BmcqModel *model);

/**
 * Unrolls `model` for `bound` transitions. `pin_strength` must be positive.
 *
 * # Safety
 * `model` must be a live handle; `out` must be writable.
 */
enum BmcqStatus bmcq_qubo_unroll(const struct BmcqModel *model,
                                 size_t bound,
                                 int64_t pin_strength,
                                 struct BmcqQubo **out);

/**
 * Number of binary variables.
 *
 * # Safety
 * `qubo` must be a live handle; `out` must be writable.
 */
enum BmcqStatus bmcq_qubo_num_vars(const struct BmcqQubo *qubo, size_t *out);

/**
 * Writes the QUBO in the text format read by `bmcq solve`.
 *
 * # Safety
 * `qubo` must be a live handle; `out` must be writable.
 */
enum BmcqStatus bmcq_qubo_to_text(const struct BmcqQubo *qubo, char **out);

/**
 * Energy of `assignment`, one byte per variable (nonzero is 1).
 *
 * # Safety
 * `qubo` must be a live handle; `assignment` must point to `len` bytes.
 */
enum BmcqStatus bmcq_qubo_energy(const struct BmcqQubo *qubo,
                                 const uint8_t *assignment,
                                 size_t len,
                                 int64_t *out);

/**
 * # Safety
 * `qubo` must be null or a live handle.
 */
void bmcq_qubo_free(struct BmcqQubo *qubo);

/**
 * Exact minimum by enumeration. Fails when the QUBO has more free
 * variables than `var_limit`.
 *
 * # Safety
 * `qubo` must be a live handle; `out` must be writable.
 */
enum BmcqStatus bmcq_solve_exhaustive(const struct BmcqQubo *qubo,
                                      size_t var_limit,
                                      struct BmcqSolution **out);

/**
 * Simulated annealing; deterministic for a given seed.
 *
 * # Safety
 * `qubo` must be a live handle; `out` must be writable.
 */
enum BmcqStatus bmcq_solve_anneal(const struct BmcqQubo *qubo,
                                  uint64_t seed,
                                  uint32_t sweeps,
                                  uint32_t restarts,
                                  struct BmcqSolution **out);

/**
 * # Safety
 * `solution` must be a live handle; `out` must be writable.
 */
enum BmcqStatus bmcq_solution_energy(const struct BmcqSolution *solution, int64_t *out);

/**
 * Copies the assignment into `buffer`, which must hold exactly as many
 * bytes as the QUBO has variables.
 *
 * # Safety
 * `solution` must be a live handle; `buffer` must point to `len` writable bytes.
 */
enum BmcqStatus bmcq_solution_assignment(const struct BmcqSolution *solution,
                                         uint8_t *buffer,
                                         size_t len);

/**
 * Decodes the solution into an input witness, replays it in the simulator
 * and writes it in the witness text format. `bad` receives the first step at
 * which the replay hits a bad state, or -1.
 *
 * # Safety
 * Both handles must be live and `solution` must come from `qubo`;
 * `out` and `bad` must be writable.
 */
enum BmcqStatus bmcq_solution_witness(const struct BmcqSolution *solution,
                                      const struct BmcqQubo *qubo,
                                      int64_t *bad,
                                      char **out);

/**
 * # Safety
 * `solution` must be null or a live handle.
 */
void bmcq_solution_free(struct BmcqSolution *solution);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* BMCQ_H */
