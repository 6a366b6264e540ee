// SPDX-License-Identifier: Apache-2.0
//
// Copyright 2026 the dcsimimo authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Distributed zero-forcing precoders. Every transmitter runs the same
// deterministic rule on its own channel estimate and emits only its own
// antenna's coefficient; the over-the-air precoder mixes one row from each
// transmitter's locally computed matrix. Because no coefficient is ever
// exchanged, estimate disagreements between transmitters surface as residual
// interference -- reproducing that failure mode faithfully is the whole point,
// so none of the local rules may canonicalize phases or otherwise "repair"
// consistency (the phase carried by a projected estimate is the consistency
// mechanism).
//
// Conventions: receive model y_i = h_i^H x; zero-forcing always means
// Hermitian orthogonality h^H t = 0. Each beam is power-scaled so one stream
// spends P/K on average.

#pragma once

#include "dcsimimo/common.hpp"
#include "dcsimimo/csi.hpp"

namespace dcsi {

// coef(j, i): transmitter j's coefficient on user i's stream (row = antenna,
// column = stream). The expected Frobenius power of an assembled precoder
// stays within 5% of P (asserted in tests, not at runtime).
struct PrecoderMatrix {
  CMat coef;

  std::size_t users() const { return coef.rows(); }
};

// Conventional ZF, one transmitter's view: project the own-row estimate onto
// the orthogonal complement of the interfering-row estimates, normalize,
// scale by sqrt(P/K). Returns the full local beam for `stream`.
CVec czf_local(const TxCsi& csi, std::size_t stream, double p);

// Regularized ZF: sqrt(P/K) * normalized transmit Wiener direction
// est^H (est est^H + R)^-1 e_stream, where the Gram and R live in user
// coordinates and R = diag(P^-clipped(alpha_l)) damps each user's row in
// proportion to its estimation error power (perfect links contribute 0).
// Converges to czf_local as the regularizer vanishes.
CVec rzf_local(const TxCsi& csi, const CsiScalingMatrix& alpha, std::size_t stream, double p);

// Beacon ZF: identical to czf_local except the projected vector is a fixed,
// estimate-independent beacon (default e_1), so all transmitters agree on the
// projected direction up to their interfering-row estimates. Trades array
// gain for cross-transmitter consistency.
CVec bzf_local(const TxCsi& csi, std::size_t stream, double p, const CVec* beacon = nullptr);

enum class ApzfPower {
  dof_optimal,  // passive coefficient sqrt(P / (K log2 P)); requires P > 2
  heuristic,    // each side divides by sqrt(1 + rho) from its own estimate
  quantized     // best-informed transmitter shares quantized rho/(1+rho)
};

struct ApzfOptions {
  ApzfPower power = ApzfPower::dof_optimal;
  int power_bits = 3;         // quantized: uniform 2^b-level midpoint quantizer
  double shared_uhat = -1.0;  // quantized: the common reconstructed value
};

// Active-passive ZF, one transmitter's scalar coefficient for `stream`.
// The passive transmitter s[stream] emits a constant (channel-independent)
// coefficient; every active transmitter solves the reduced interference
// system from its own estimates so the assembled beam is orthogonal to all
// estimated interfering rows whenever the active transmitters agree on those
// estimates. The dof_optimal passive constant sqrt(P/(K log2 P)) keeps the
// worst-case active power inside the budget at the price of a vanishing
// power (not DoF) loss.
cxd apzf_local(const TxCsi& csi, std::size_t stream, const PassiveSet& s, double p,
               const ApzfOptions& opt = {});

// ||a||^2 of this transmitter's reduced zero-forcing solve for `stream`
// (the rho of the two-transmitter special case).
double apzf_rho(const TxCsi& csi, std::size_t stream, const PassiveSet& s);

// Midpoint quantizer on [0, 1) with 2^bits uniform cells; bits >= 1.
double quantize_unit_interval(double u, int bits);

// Active transmitter whose worst interfering-row exponent for `stream` is
// best (ties: lowest index) -- the one that computes and shares rho in the
// quantized-power handshake.
std::size_t apzf_best_informed(const CsiScalingMatrix& alpha, std::size_t stream,
                               const PassiveSet& s);

// Row j of the over-the-air precoder comes from transmitter j's local matrix
// (rows = antennas, columns = streams).
PrecoderMatrix assemble_distributed(const std::vector<CMat>& local);

enum class HqMode { czf, apzf };

// Hierarchical-quantization knowledge sharing: with nested descriptions, the
// coarsest estimate of a row is exactly reconstructible by every transmitter
// that holds a finer one, so joint precoding can run on common CSI.
//   czf:  every row is replaced by the coarsest estimate across all
//         transmitters (argmin_j clipped alpha, ties: lowest j).
//   apzf: coarsest across the active transmitters only (passive excluded);
//         requires a uniform passive set (use hq_common_rows_for_stream for
//         per-stream sets).
// Returned per-transmitter views keep their tx index but carry identical rows.
std::vector<TxCsi> apply_hq_common_csi(const std::vector<TxCsi>& tx_csis,
                                       const CsiScalingMatrix& alpha, HqMode mode,
                                       const PassiveSet* s = nullptr);

// Per-stream common CSI for active-passive sharing: row r comes from the
// transmitter with the lowest clipped exponent for r among j != s[stream].
CMat hq_common_rows_for_stream(const std::vector<TxCsi>& tx_csis, const CsiScalingMatrix& alpha,
                               std::size_t stream, const PassiveSet& s);

// Simulation-side default passive assignment. Two transmitters: for each
// stream the worse-informed transmitter on the interfering row stays passive
// (the reduced solve then runs on the best estimate). Three or more: the
// uniform rule of select_passive_set. hq = true always uses the uniform
// HQ-optimal rule.
PassiveSet default_passive_set(const CsiScalingMatrix& alpha, bool hq);

}  // namespace dcsi
