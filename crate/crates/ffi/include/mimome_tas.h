#ifndef MIMOME_TAS_H
#define MIMOME_TAS_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/*
 Result code of every fallible call.
 */
typedef enum {
  MIMOME_STATUS_OK = 0,
  MIMOME_STATUS_NULL_POINTER = 1,
  MIMOME_STATUS_INVALID_ARGUMENT = 2,
  MIMOME_STATUS_DIMENSION = 3,
  MIMOME_STATUS_SELECTION = 4,
  MIMOME_STATUS_PROBLEM = 5,
  MIMOME_STATUS_FORMAT = 6,
  MIMOME_STATUS_NUMERICAL = 7,
  MIMOME_STATUS_BUDGET = 8,
  MIMOME_STATUS_IO = 9,
  MIMOME_STATUS_PANIC = 10,
} MimomeStatus;

/*
 Which objective the search maximizes.
 */
typedef enum {
  /*
   Legitimate capacity only.
   */
  MIMOME_SCENARIO_NCSIE = 0,
  /*
   Legitimate minus eavesdropper capacity.
   */
  MIMOME_SCENARIO_CSIE = 1,
} MimomeScenario;

/*
 Complex channel matrix, `rows` receive by `cols` transmit antennas.
 */
typedef struct MimomeChannel MimomeChannel;

/*
 Outcome of one antenna selection.
 */
typedef struct MimomeSelection MimomeSelection;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Static description of a status code. Never null.
 */
const char *mimome_status_message(MimomeStatus status);

/*
 Message of the last failed call on this thread, or "" after a success.
 The pointer stays valid until the next call into this library on the
 same thread.
 */
const char *mimome_last_error_message(void);

double mimome_db_to_linear(double db);

/*
 Build a channel from `2 * rows * cols` doubles: row-major entries, each
 as a (real, imaginary) pair.

 # Safety
 `values` must point to `2 * rows * cols` readable doubles and `out` must
 be writable.
 */
MimomeStatus mimome_channel_new(size_t rows,
                                size_t cols,
                                const double *values,
                                MimomeChannel **out);

/*
 I.i.d. unit-variance circularly symmetric Gaussian channel.

 # Safety
 `out` must be writable.
 */
MimomeStatus mimome_channel_generate_rayleigh(size_t rows,
                                              size_t cols,
                                              uint64_t seed,
                                              MimomeChannel **out);

/*
 Load a text or binary matrix file.

 # Safety
 `path` must be a NUL-terminated string and `out` must be writable.
 */
MimomeStatus mimome_channel_load(const char *path, MimomeChannel **out);

/*
 Store a matrix; `binary` selects the binary encoding.

 # Safety
 `channel` must be a live handle and `path` a NUL-terminated string.
 */
MimomeStatus mimome_channel_store(const MimomeChannel *channel, const char *path, bool binary);

/*
 Number of rows, or 0 for a null handle.

 # Safety
 `channel` must be null or a live handle.
 */
size_t mimome_channel_rows(const MimomeChannel *channel);

/*
 Number of columns, or 0 for a null handle.

 # Safety
 `channel` must be null or a live handle.
 */
size_t mimome_channel_cols(const MimomeChannel *channel);

/*
 Read one entry (0-based row and column).

 # Safety
 `channel` must be a live handle; `re` and `im` must be writable.
 */
MimomeStatus mimome_channel_get(const MimomeChannel *channel,
                                size_t row,
                                size_t col,
                                double *re,
                                double *im);

/*
 # Safety
 `channel` must be null or a handle not yet freed.
 */
void mimome_channel_free(MimomeChannel *channel);

/*
 `log2 det(I + rho H H^H)` of a whole channel.

 # Safety
 `channel` must be a live handle and `out` writable.
 */
MimomeStatus mimome_link_capacity(const MimomeChannel *channel, double rho, double *out);

/*
 Clamped secrecy capacity `[C_m - C_e]^+` of the subset `indices`.

 # Safety
 Handles must be live, `indices` must hold `len` values and `out` must be
 writable.
 */
MimomeStatus mimome_secrecy_capacity(const MimomeChannel *hm,
                                     const MimomeChannel *he,
                                     const size_t *indices,
                                     size_t len,
                                     double rho_m,
                                     double rho_e,
                                     double *out);

/*
 Branch-and-bound selection without eavesdropper knowledge.

 # Safety
 `hm` must be a live handle and `out` writable.
 */
MimomeStatus mimome_select_ncsie(const MimomeChannel *hm,
                                 size_t l,
                                 double rho_m,
                                 bool warm_start,
                                 MimomeSelection **out);

/*
 Branch-and-bound selection maximizing `C_m - C_e`.

 # Safety
 `hm` and `he` must be live handles and `out` writable.
 */
MimomeStatus mimome_select_csie(const MimomeChannel *hm,
                                const MimomeChannel *he,
                                size_t l,
                                double rho_m,
                                double rho_e,
                                bool warm_start,
                                MimomeSelection **out);

/*
 Exhaustive search. `he` may be null for [`MimomeScenario::Ncsie`].
 Fails with [`MimomeStatus::Budget`] when `C(Nt, L)` exceeds `cap`.

 # Safety
 Handles must be live (or `he` null) and `out` writable.
 */
MimomeStatus mimome_select_exhaustive(MimomeScenario scenario,
                                      const MimomeChannel *hm,
                                      const MimomeChannel *he,
                                      size_t l,
                                      double rho_m,
                                      double rho_e,
                                      uint64_t cap,
                                      MimomeSelection **out);

/*
 The `L` strongest columns of `hm`. `he` may be null; when given, the
 secrecy capacity of the choice is reported.

 # Safety
 Handles must be live (or `he` null) and `out` writable.
 */
MimomeStatus mimome_select_norm(const MimomeChannel *hm,
                                const MimomeChannel *he,
                                size_t l,
                                double rho_m,
                                double rho_e,
                                MimomeSelection **out);

/*
 Number of selected antennas, or 0 for a null handle.

 # Safety
 `selection` must be null or a live handle.
 */
size_t mimome_selection_len(const MimomeSelection *selection);

/*
 Copy the 1-based indices into `buf`, which must hold at least
 [`mimome_selection_len`] values.

 # Safety
 `selection` must be a live handle and `buf` must hold `capacity` values.
 */
MimomeStatus mimome_selection_indices(const MimomeSelection *selection,
                                      size_t *buf,
                                      size_t capacity);

/*
 Scenario objective in bits per channel use (NaN for a null handle).

 # Safety
 `selection` must be null or a live handle.
 */
double mimome_selection_objective(const MimomeSelection *selection);

/*
 Clamped secrecy capacity, or NaN when the eavesdropper link was unknown.

 # Safety
 `selection` must be null or a live handle.
 */
double mimome_selection_secrecy_capacity(const MimomeSelection *selection);

/*
 Search-tree nodes charged to the method (0 for a null handle).

 # Safety
 `selection` must be null or a live handle.
 */
uint64_t mimome_selection_visited_nodes(const MimomeSelection *selection);

/*
 # Safety
 `selection` must be null or a handle not yet freed.
 */
void mimome_selection_free(MimomeSelection *selection);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* MIMOME_TAS_H */
