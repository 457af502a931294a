#ifndef DIAGAPPROX_H
#define DIAGAPPROX_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every `da_*` call.
 */
typedef enum DaStatus {
  DA_STATUS_OK = 0,
  DA_STATUS_NULL_POINTER = 1,
  DA_STATUS_INVALID_UTF8 = 2,
  DA_STATUS_PARSE = 3,
  DA_STATUS_INVALID_ARGUMENT = 4,
  DA_STATUS_CAP_VIOLATION = 5,
  DA_STATUS_DIAGONAL_RATIONAL = 6,
  DA_STATUS_OUT_OF_RANGE = 7,
  DA_STATUS_INTERNAL = 8,
  DA_STATUS_PANIC = 9,
} DaStatus;

/**
 * Opaque set of places `{inf, p_1, ..., p_r}`.
 */
typedef struct DaPlaces DaPlaces;

/**
 * Opaque psi function.
 */
typedef struct DaPsi DaPsi;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or an empty string. The
 * pointer stays valid until the next failing call on the same thread.
 */
const char *da_last_error(void);

/**
 * Releases a string returned through a `char **` out-parameter.
 *
 * # Safety
 * `s` is null or came from this library and has not been freed.
 */
void da_string_free(char *s);

/**
 * Builds the place set `{inf} ∪ primes`.
 *
 * # Safety
 * `primes` points to `len` readable values; `out` is writable.
 */
enum DaStatus da_places_new(const uint64_t *primes, size_t len, struct DaPlaces **out);

/**
 * # Safety
 * `p` is null or a live handle from [`da_places_new`].
 */
void da_places_free(struct DaPlaces *p);

/**
 * `psi(gamma) = c / (2 L(gamma))` with `0 <= c <= 1/2` given as a string.
 *
 * # Safety
 * `c` is a NUL-terminated string; `out` is writable.
 */
enum DaStatus da_psi_scaled_cap(const char *c, struct DaPsi **out);

/**
 * `psi(gamma) = min(c / L(gamma)^theta, 1 / (2 L(gamma)))`.
 *
 * # Safety
 * `c` is a NUL-terminated string; `out` is writable.
 */
enum DaStatus da_psi_power(const char *c, uint32_t theta, struct DaPsi **out);

/**
 * # Safety
 * `p` is null or a live handle from a `da_psi_*` constructor.
 */
void da_psi_free(struct DaPsi *p);

/**
 * Level `l(gamma)` and `L(gamma)` of an element of `P^-1 Z`.
 *
 * # Safety
 * Pointers are live and writable as their names say.
 */
enum DaStatus da_level(const struct DaPlaces *places,
                       const char *gamma,
                       char **level_out,
                       char **big_l_out);

/**
 * `#Z_N = N prod p_i^n_i + 1`, or `OutOfRange` if it does not fit in 64 bits.
 *
 * # Safety
 * `places` is a live handle; `out` is writable.
 */
enum DaStatus da_z_n_count(const struct DaPlaces *places, uint64_t n, uint64_t *out);

/**
 * Dirichlet approximant of `point` (comma-separated coordinates, infinite
 * place first) at level bound `n`: `gamma` with `0 < l(gamma) <= n` and
 * `d(gamma x, iota(beta)) <= M / n`.
 *
 * # Safety
 * Pointers are live and writable as their names say.
 */
enum DaStatus da_dirichlet(const struct DaPlaces *places,
                           const char *point,
                           uint64_t n,
                           char **beta_out,
                           char **gamma_out,
                           char **distance_out);

/**
 * Exact Haar measure of `A_gamma(psi)` with the bracket
 * `(upper / prod p_i, upper]`; `in_bounds` reports the strict bracket.
 *
 * # Safety
 * Pointers are live and writable as their names say.
 */
enum DaStatus da_measure(const struct DaPlaces *places,
                         const struct DaPsi *psi,
                         const char *gamma,
                         char **exact_out,
                         char **lower_out,
                         char **upper_out,
                         bool *in_bounds);

/**
 * Exact measure of `A_beta ∩ A_gamma`.
 *
 * # Safety
 * Pointers are live and writable as their names say.
 */
enum DaStatus da_overlap(const struct DaPlaces *places,
                         const struct DaPsi *psi,
                         const char *beta,
                         const char *gamma,
                         char **out);

/**
 * Monte Carlo estimate of the measure of the union of `A_gamma` over the
 * comma-separated `gammas`. `digits = 0` selects the p-adic precision
 * automatically.
 *
 * # Safety
 * Pointers are live and writable as their names say.
 */
enum DaStatus da_montecarlo(const struct DaPlaces *places,
                            const struct DaPsi *psi,
                            const char *gammas,
                            uint64_t samples,
                            uint32_t digits,
                            uint64_t seed,
                            double *estimate,
                            double *standard_error);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* DIAGAPPROX_H */
