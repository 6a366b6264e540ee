/* SPDX-License-Identifier: Apache-2.0
 *
 * Copyright 2026 the dcsimimo authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/* C interface to the dcsimimo joint-precoding simulation library.
 *
 * Conventions:
 *   - every fallible call returns a dcsi_status; DCSI_OK is 0;
 *   - on failure, dcsi_last_error() returns a thread-local message that
 *     stays valid until the next failing call on the same thread;
 *   - strings handed out through char** are heap-allocated by the library
 *     and must be released with dcsi_string_free();
 *   - handles are opaque and freed with their matching *_free function;
 *   - all functions are thread-safe as long as a handle is not used
 *     concurrently with its destruction.
 */

#ifndef DCSIMIMO_H
#define DCSIMIMO_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum dcsi_status {
  DCSI_OK = 0,
  DCSI_ERR_INVALID = 1,  /* contract violation (bad argument, bad config) */
  DCSI_ERR_PARSE = 2,    /* malformed text input (matrix string, JSON)    */
  DCSI_ERR_RESOURCE = 3, /* a configured cap was exceeded                 */
  DCSI_ERR_NUMERIC = 4,  /* numerical degeneracy (singular system, ...)   */
  DCSI_ERR_NOMEM = 5     /* allocation failure                            */
} dcsi_status;

/* Library semantic version, static storage. */
const char* dcsi_version(void);

/* Thread-local message for the most recent failure on this thread
 * (empty string if none). Do not free. */
const char* dcsi_last_error(void);

/* Release a string obtained from any char** out-parameter. NULL is a no-op. */
void dcsi_string_free(char* s);

/* ------------------------------------------------------------------ */
/* CSI quality-exponent matrices                                      */
/* ------------------------------------------------------------------ */

typedef struct dcsi_alpha dcsi_alpha;

/* Parse "1,0.5;0,0.7" (rows split by ';', entries by ',', "inf" accepted). */
dcsi_status dcsi_alpha_parse(const char* text, dcsi_alpha** out);

/* k x k row-major matrix of exponents >= 0 (+inf = perfect link). */
dcsi_status dcsi_alpha_create(size_t k, const double* row_major, dcsi_alpha** out);

void dcsi_alpha_free(dcsi_alpha* a);

dcsi_status dcsi_alpha_users(const dcsi_alpha* a, size_t* out);

/* Matrix as a JSON array of row arrays ("inf" marks perfect links) — the
 * form the rate-config "alpha" field expects. */
dcsi_status dcsi_alpha_json(const dcsi_alpha* a, char** json_out);

/* ------------------------------------------------------------------ */
/* Closed-form degrees of freedom                                     */
/* ------------------------------------------------------------------ */

/* JSON report {scheme, per_user, total[, passive]} for one scheme
 * (czf, rzf, bzf, apzf, apzf-heuristic, apzf-qpower:<b>, czf-hq, apzf-hq,
 * perfect-zf). passive may be NULL (default selection) or an array of
 * `users` transmitter indices forcing the per-stream passive choice of the
 * apzf variants. */
dcsi_status dcsi_dof_json(const dcsi_alpha* a, const char* scheme, const size_t* passive,
                          size_t passive_len, char** json_out);

/* ------------------------------------------------------------------ */
/* Feedback budget allocation                                         */
/* ------------------------------------------------------------------ */

/* JSON plan {scheme, gamma, n_active, alpha, dof, spend} for scheme
 * "czf" or "apzf". */
dcsi_status dcsi_alloc_json(const char* scheme, double gamma, char** json_out);

/* CSV sweep (header gamma,scheme,n_active,alpha,dof) over `count` budgets. */
dcsi_status dcsi_alloc_sweep_csv(const char* scheme, const double* gammas, size_t count,
                                 char** csv_out);

/* ------------------------------------------------------------------ */
/* Monte-Carlo rate curves                                            */
/* ------------------------------------------------------------------ */

typedef struct dcsi_curve dcsi_curve;

/* Run the experiment described by a JSON config:
 *   {"alpha": [[...]], "scheme": "czf", "model": "statistical",
 *    "snr_db": [...], "trials": 2000, "master_seed": 7, "threads": 1,
 *    "bits": [[...]], "beacon": [[re,im],...], "passive": [...],
 *    "power_bits": 3}
 * alpha is required; unlisted fields take defaults. Results are
 * bit-reproducible for a fixed config regardless of threads. */
dcsi_status dcsi_rate_run(const char* config_json, dcsi_curve** out);

void dcsi_curve_free(dcsi_curve* c);

/* CSV rows per grid point with a '#' provenance header. */
dcsi_status dcsi_curve_csv(const dcsi_curve* c, char** out);

/* Full curve as JSON (arrays + provenance). */
dcsi_status dcsi_curve_json(const dcsi_curve* c, char** out);

/* Least-squares rate-vs-log2(P) slopes over grid points inside
 * [lo_db, hi_db]: {"per_user": [...], "per_user_stderr": [...],
 * "sum": s, "sum_stderr": e}. */
dcsi_status dcsi_curve_slope_json(const dcsi_curve* c, double lo_db, double hi_db, char** out);

/* Canonical (sorted-key, defaults filled) form of a config plus its hash:
 * {"config": {...}, "hash": "<16 hex digits>"}. */
dcsi_status dcsi_config_canonical(const char* config_json, char** out);

/* ------------------------------------------------------------------ */
/* Quantizer distortion check                                         */
/* ------------------------------------------------------------------ */

/* Monte-Carlo distortion of a fresh 2^bits random codebook per trial in
 * dimension `users`, compared against the closed-form sandwich. JSON:
 * {k, bits, trials, master_seed, mean_sin2, mean_neglog2, sin2_lo, sin2_hi,
 *  log_lo, log_hi, bounds_apply, sin2_pass, log_pass}. */
dcsi_status dcsi_quantcheck_json(size_t users, int bits, size_t trials, uint64_t seed,
                                 unsigned threads, char** json_out);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* DCSIMIMO_H */
