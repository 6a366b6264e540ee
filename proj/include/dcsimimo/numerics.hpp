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

// Small-dimension complex linear algebra used by the precoding and
// quantization layers. Everything here is sized for K <= 16 antennas, so the
// implementations favor simplicity and auditable error policy over asymptotic
// cleverness: dense Gaussian elimination with partial pivoting, projections
// through the normal equations, no decompositions beyond LU.

#pragma once

#include "dcsimimo/common.hpp"

namespace dcsi {

// Euclidean norm and Hermitian inner product a^H b = sum conj(a_k) b_k.
// The whole library uses the receive convention y_i = h_i^H x, so
// "orthogonal" always means Hermitian-orthogonal. Rejects empty input.
double norm(const CVec& v);
cxd hdot(const CVec& a, const CVec& b);

// x minus its orthogonal projection onto span(basis). The Gram system is
// solved by partial-pivot elimination; a pivot-ratio condition estimate above
// tol::cond_limit rejects numerically dependent bases (numeric_error).
// An empty basis returns x unchanged. Requires basis.size() < x.size().
CVec proj_perp(const std::vector<CVec>& basis, const CVec& x);

// Solves the square system M x = b by Gaussian elimination with partial
// pivoting. A pivot below tol::pivot_floor * max|M_ij| raises numeric_error.
// Backward error is bounded by tol::solve_residual (asserted in tests).
CVec solve_small(const CMat& m, const CVec& b);

// Rotates x by a unit-modulus scalar so the reference entry becomes real and
// non-negative. The reference is x[0]; when |x[0]| < pivot_floor * ||x|| the
// largest-magnitude entry is used instead (ties: lowest index), which keeps
// the map deterministic on the measure-zero set where the first entry
// vanishes. The zero vector is rejected (invalid_argument). Norm-preserving.
CVec phase_align(const CVec& x);

// Real embedding of a phase-aligned complex vector:
//   [Re u_1 .. Re u_K, Im u_2 .. Im u_K] in R^(2K-1).
// The first imaginary part is dropped because alignment pins it to zero; the
// map is then an isometry on the aligned set.
std::vector<double> real_embedding(const CVec& u);

// sin^2 of the principal angle between the real embeddings of two aligned
// unit vectors: 1 - (u_R . v_R)^2, clamped into [0, 1]. This is the chordal
// quantization distortion measure; it is invariant to a sign flip of either
// argument. Inputs must be unit-norm (tol::unit_norm_loose) with real first
// coefficient.
double sin2_real_angle(const CVec& u, const CVec& v);

}  // namespace dcsi
