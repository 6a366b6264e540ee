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

// Closed-form degrees-of-freedom (high-power rate slope) calculators for the
// distributed-CSI precoding schemes. These are the analytical counterparts of
// the Monte-Carlo slopes measured by the rate simulator; tests cross-check
// the two against each other. All formulas consume clipped exponents
// min(alpha, 1) -- exponents above 1 buy no additional slope.

#pragma once

#include <string>

#include "dcsimimo/common.hpp"
#include "dcsimimo/csi.hpp"

namespace dcsi {

struct DofReport {
  std::string scheme;
  std::vector<double> per_user;
  double total = 0.0;
  PassiveSet passive;  // empty when the scheme has no passive transmitters

  std::size_t users() const { return per_user.size(); }
};

// Conventional broadcast channel (all transmitters share one estimate of
// quality alpha_i per user): user i earns min(alpha_i, 1).
DofReport dof_bc(const std::vector<double>& alpha_per_user);

// Conventional distributed ZF: every user is dragged down to the worst
// exponent in the entire matrix. K = 1 degenerates to a single
// interference-free stream (slope 1).
DofReport dof_czf(const CsiScalingMatrix& alpha);

// Beacon ZF: user k earns min over i != k of the worst exponent outside row
// i. For K >= 3 this collapses to the conventional-ZF value; for K = 2 it is
// min_j alpha_k^(j) per user.
DofReport dof_bzf(const CsiScalingMatrix& alpha);

// Active-passive ZF with passive set s (default: select_passive_set). Two
// transmitters: user i earns max_j alpha_i^(j) (per-stream passive choice);
// K >= 3: user k earns min over i != k of the worst exponent over rows != i
// and transmitters != s[i]. K = 1 degenerates to slope 1.
DofReport dof_apzf(const CsiScalingMatrix& alpha, const PassiveSet* s = nullptr);

// Conventional ZF on hierarchically shared CSI: the common estimate of row i
// has the worst per-row quality, so user i earns min_j alpha_i^(j).
DofReport dof_czf_hq(const CsiScalingMatrix& alpha);

// Active-passive ZF on hierarchically shared CSI: user k earns
// min over i != k of min over j != s[i] of alpha_k^(j). With the default
// uniform set this is min_{j != n} alpha_k^(j) with n chosen to maximize the
// sum.
DofReport dof_apzf_hq(const CsiScalingMatrix& alpha, const PassiveSet* s = nullptr);

// Uniform passive assignment n_i = n for all streams.
//   hq = false: n is the transmitter whose worst column entry is the global
//     worst (argmin_j min_l alpha_l^(j)) -- silencing the worst-informed
//     transmitter; ties to the lowest index.
//   hq = true: n maximizes sum_k min_{j != n} alpha_k^(j) (ties: lowest).
PassiveSet select_passive_set(const CsiScalingMatrix& alpha, bool hq);

// Dispatch by scheme identifier ("perfect-zf", "czf", "rzf", "bzf", "apzf",
// "apzf-heuristic", "apzf-qpower:<b>", "czf-hq", "apzf-hq"). Power-control
// variants share the apzf slope; rzf shares the czf slope; perfect CSI gives
// the full K.
DofReport dof_for_scheme(const CsiScalingMatrix& alpha, const std::string& scheme);

// {"scheme":..., "per_user":[...], "total":..., "passive":[...]} (passive
// omitted when empty)
std::string dof_report_to_json(const DofReport& r);

}  // namespace dcsi
