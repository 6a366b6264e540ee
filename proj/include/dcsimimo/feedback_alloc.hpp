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

#pragma once

#include <string>
#include <vector>

#include "dcsimimo/csi.hpp"

namespace dcsi {

// Result of spending a feedback budget across transmitter CSI links.
//
// The budget gamma is measured in units of (k - 1) * log2(P) bits per link
// at full quality, i.e. a link funded at exponent alpha costs alpha budget
// units.  A plan serves n_active streams and funds every required link at
// the same exponent per_link_alpha.
struct AllocationPlan {
  std::string scheme;            // "czf" or "apzf"
  double gamma = 0.0;            // offered budget
  std::size_t n_active = 1;      // streams served
  double per_link_alpha = 0.0;   // exponent bought on each funded link
  double dof = 0.0;              // sum-rate prelog the plan achieves
  double spend = 0.0;            // budget actually consumed
};

// Conventional zero forcing needs every one of the n^2 links at the common
// exponent, but only the n*(n-1) cross links bind the prelog, so the cost
// basis is n^2*(n-1).  Picks the smallest n whose flat region covers gamma,
// then buys alpha = min(1, gamma / (n^2*(n-1))).
AllocationPlan allocate_czf(double gamma);

// Active-passive zero forcing leaves one transmitter uninformed, so only
// n*(n-1)^2 link units are bought; same smallest-n policy with the flat
// region ending at n^3.
AllocationPlan allocate_apzf(double gamma);

// Dispatch by scheme name ("czf" or "apzf").
AllocationPlan allocate_for_scheme(const std::string& scheme, double gamma);

// One plan per budget point, in input order.
std::vector<AllocationPlan> allocation_sweep(const std::string& scheme,
                                             const std::vector<double>& gammas);

// Materialize the plan as an n x n quality-exponent matrix: every funded
// link gets per_link_alpha; for "apzf" the passive transmitter (column 0)
// is left uninformed when n >= 2.
CsiScalingMatrix expand_to_matrix(const AllocationPlan& plan);

std::string allocation_to_json(const AllocationPlan& plan);

// CSV with header "gamma,scheme,n_active,alpha,dof".
std::string sweep_to_csv(const std::vector<AllocationPlan>& plans);

}  // namespace dcsi
