#ifndef PLANAR_DIPOLES_H
#define PLANAR_DIPOLES_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum PdStatus {
  PD_STATUS_OK = 0,
  PD_STATUS_INVALID_ARGUMENT = 1,
  PD_STATUS_NULL_POINTER = 2,
  PD_STATUS_GUARD_REJECTED = 3,
  PD_STATUS_NOT_FOUND = 4,
  PD_STATUS_EIGENSOLVER = 5,
  PD_STATUS_NON_PHYSICAL = 6,
  PD_STATUS_BUFFER_TOO_SMALL = 7,
  PD_STATUS_PANIC = 8,
  PD_STATUS_INTERNAL = 9,
} PdStatus;

/**
 * Solved molecule pair.
 */
typedef struct PdPair PdPair;

/**
 * Solved single rotor.
 */
typedef struct PdRotor PdRotor;

typedef struct PdComplex {
  double re;
  double im;
} PdComplex;

/**
 * Matrix elements of cos θ and sin θ between the two lowest rotor states:
 * `c0 = <0|cos|0>`, `c1 = <1|cos|1>`, `cx = <0|cos|1>`, `cxc = <1|cos|0>`,
 * and likewise for sin.
 */
typedef struct PdDipoleFactors {
  struct PdComplex c0;
  struct PdComplex c1;
  struct PdComplex cx;
  struct PdComplex cxc;
  struct PdComplex s0;
  struct PdComplex s1;
  struct PdComplex sx;
  struct PdComplex sxc;
} PdDipoleFactors;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Solve the rotor at field coupling `omega_over_b` and tilt `theta_t_deg`
 * in a basis of `2 m_max + 1` states.
 *
 * # Safety
 * `out` must be valid for writing a pointer.
 */
enum PdStatus pd_rotor_solve(double omega_over_b,
                             double theta_t_deg,
                             size_t m_max,
                             struct PdRotor **out);

/**
 * # Safety
 * `rotor` must come from [`pd_rotor_solve`] and not be freed twice. Null is ignored.
 */
void pd_rotor_free(struct PdRotor *rotor);

/**
 * Number of rotor levels, `2 m_max + 1`.
 *
 * # Safety
 * `rotor` must be a live handle; `out` valid for writing.
 */
enum PdStatus pd_rotor_level_count(const struct PdRotor *rotor, size_t *out);

/**
 * Copy the ascending energies `ε_l/B` into `out[0..len]`. `written`
 * receives the number of levels even when `len` is too small.
 *
 * # Safety
 * `out` must be valid for `len` doubles; `written` may be null.
 */
enum PdStatus pd_rotor_energies(const struct PdRotor *rotor,
                                double *out,
                                size_t len,
                                size_t *written);

/**
 * `ε_j - ε_i` in units of B, for `i < j`.
 *
 * # Safety
 * `rotor` must be a live handle; `out` valid for writing.
 */
enum PdStatus pd_rotor_level_gap(const struct PdRotor *rotor, size_t i, size_t j, double *out);

/**
 * `PD_STATUS_OK` if the two lowest levels are separated from the third by
 * at least `tolerance · max(1, |ε_1|)`, otherwise `PD_STATUS_GUARD_REJECTED`.
 *
 * # Safety
 * `rotor` must be a live handle.
 */
enum PdStatus pd_rotor_guard(const struct PdRotor *rotor, double tolerance);

/**
 * Dipole factors of the two lowest states; fails with
 * `PD_STATUS_GUARD_REJECTED` when the truncation is invalid.
 *
 * # Safety
 * `rotor` must be a live handle; `out` valid for writing.
 */
enum PdStatus pd_rotor_factors(const struct PdRotor *rotor, struct PdDipoleFactors *out);

/**
 * Solve the coupled pair.
 *
 * # Safety
 * `out` must be valid for writing a pointer.
 */
enum PdStatus pd_pair_solve(double omega_over_b,
                            double theta_t_deg,
                            double coupling_over_b,
                            size_t m_max,
                            struct PdPair **out);

/**
 * # Safety
 * `pair` must come from [`pd_pair_solve`] and not be freed twice. Null is ignored.
 */
void pd_pair_free(struct PdPair *pair);

/**
 * The four energies `E_n/B`, ascending.
 *
 * # Safety
 * `out` must be valid for 4 doubles.
 */
enum PdStatus pd_pair_energies(const struct PdPair *pair, double *out);

/**
 * Coefficients `(d1, d2, d3, d4)` on |00>, |01>, |10>, |11> of the
 * `level`-th lowest state (0-based).
 *
 * # Safety
 * `out` must be valid for 4 `PdComplex`.
 */
enum PdStatus pd_pair_state(const struct PdPair *pair, size_t level, struct PdComplex *out);

/**
 * Whether two adjacent pair levels coincide (their states are then not unique).
 *
 * # Safety
 * `out` must be valid for writing.
 */
enum PdStatus pd_pair_is_degenerate(const struct PdPair *pair, bool *out);

/**
 * Concurrence of the Boltzmann mixture at `kt_over_b >= 0`.
 *
 * # Safety
 * `out` must be valid for writing.
 */
enum PdStatus pd_pair_thermal_concurrence(const struct PdPair *pair, double kt_over_b, double *out);

/**
 * `2 |d2 d3 - d1 d4|` for a normalized state.
 *
 * # Safety
 * `state` must be valid for 4 `PdComplex`.
 */
enum PdStatus pd_pure_concurrence(const struct PdComplex *state, double *out);

/**
 * Wootters concurrence of a two-qubit density matrix given row-major.
 *
 * # Safety
 * `rho` must be valid for 16 `PdComplex`.
 */
enum PdStatus pd_wootters_concurrence(const struct PdComplex *rho, double *out);

/**
 * Laboratory units (Debye, kV/cm, nm, cm⁻¹) to `ω/B` and `Ω/B`.
 *
 * # Safety
 * Both outputs must be valid for writing.
 */
enum PdStatus pd_convert_units(double dipole_moment_debye,
                               double field_kv_per_cm,
                               double separation_nm,
                               double rotational_constant_per_cm,
                               double *omega_over_b,
                               double *coupling_over_b);

/**
 * Message for the last failure on this thread, or null. Valid until the
 * next call into this library on the same thread.
 */
const char *pd_last_error_message(void);

/**
 * Library version, static storage.
 */
const char *pd_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PLANAR_DIPOLES_H */
