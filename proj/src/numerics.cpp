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

#include "dcsimimo/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace dcsi {

namespace {

// In-place LU solve of a copy of (m | b) with partial pivoting. Reports the
// smallest and largest pivot magnitudes so callers can apply their own
// singularity / conditioning policy.
CVec lu_solve(CMat m, CVec b, double max_abs_entry, double* pivot_min, double* pivot_max) {
  const std::size_t n = m.rows();
  double pmin = std::numeric_limits<double>::infinity();
  double pmax = 0.0;

  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot_row = col;
    double best = std::abs(m(col, col));
    for (std::size_t r = col + 1; r < n; ++r) {
      const double a = std::abs(m(r, col));
      if (a > best) {
        best = a;
        pivot_row = r;
      }
    }
    if (best < tol::pivot_floor * max_abs_entry || best == 0.0) {
      throw numeric_error("solve_small: matrix is numerically singular");
    }
    if (pivot_row != col) {
      for (std::size_t c = col; c < n; ++c) std::swap(m(col, c), m(pivot_row, c));
      std::swap(b[col], b[pivot_row]);
    }
    pmin = std::min(pmin, best);
    pmax = std::max(pmax, best);
    const cxd inv_pivot = 1.0 / m(col, col);
    for (std::size_t r = col + 1; r < n; ++r) {
      const cxd f = m(r, col) * inv_pivot;
      if (f == cxd(0.0, 0.0)) continue;
      m(r, col) = 0.0;
      for (std::size_t c = col + 1; c < n; ++c) m(r, c) -= f * m(col, c);
      b[r] -= f * b[col];
    }
  }

  CVec x(n);
  for (std::size_t ri = n; ri-- > 0;) {
    cxd acc = b[ri];
    for (std::size_t c = ri + 1; c < n; ++c) acc -= m(ri, c) * x[c];
    x[ri] = acc / m(ri, ri);
  }
  if (pivot_min) *pivot_min = pmin;
  if (pivot_max) *pivot_max = pmax;
  return x;
}

double max_abs(const CMat& m) {
  double v = 0.0;
  for (const cxd& e : m.data()) v = std::max(v, std::abs(e));
  return v;
}

}  // namespace

double norm(const CVec& v) {
  if (v.empty()) throw std::invalid_argument("norm: vector must be non-empty");
  double s = 0.0;
  for (const cxd& e : v) s += std::norm(e);
  return std::sqrt(s);
}

cxd hdot(const CVec& a, const CVec& b) {
  if (a.size() != b.size()) throw std::invalid_argument("hdot: length mismatch");
  cxd s(0.0, 0.0);
  for (std::size_t k = 0; k < a.size(); ++k) s += std::conj(a[k]) * b[k];
  return s;
}

CVec proj_perp(const std::vector<CVec>& basis, const CVec& x) {
  if (x.empty()) throw std::invalid_argument("proj_perp: empty vector");
  if (basis.empty()) return x;
  if (basis.size() >= x.size()) {
    throw std::invalid_argument("proj_perp: basis must have fewer vectors than dimensions");
  }
  for (const CVec& v : basis) {
    if (v.size() != x.size()) throw std::invalid_argument("proj_perp: basis length mismatch");
  }

  const std::size_t m = basis.size();
  CMat gram(m, m);
  CVec rhs(m);
  double gmax = 0.0;
  for (std::size_t a = 0; a < m; ++a) {
    for (std::size_t b = 0; b < m; ++b) {
      gram(a, b) = hdot(basis[a], basis[b]);
      gmax = std::max(gmax, std::abs(gram(a, b)));
    }
    rhs[a] = hdot(basis[a], x);
  }
  if (gmax == 0.0) throw numeric_error("proj_perp: basis contains only zero vectors");

  double pmin = 0.0, pmax = 0.0;
  const CVec y = lu_solve(gram, rhs, gmax, &pmin, &pmax);
  if (pmax / pmin > tol::cond_limit) {
    throw numeric_error("proj_perp: basis numerically dependent (condition estimate too large)");
  }

  CVec r = x;
  for (std::size_t a = 0; a < m; ++a) {
    for (std::size_t k = 0; k < r.size(); ++k) r[k] -= y[a] * basis[a][k];
  }
  return r;
}

CVec solve_small(const CMat& m, const CVec& b) {
  if (m.rows() != m.cols()) throw std::invalid_argument("solve_small: matrix must be square");
  if (b.size() != m.rows()) throw std::invalid_argument("solve_small: rhs length mismatch");
  const double ma = max_abs(m);
  if (ma == 0.0) throw numeric_error("solve_small: zero matrix");
  return lu_solve(m, b, ma, nullptr, nullptr);
}

CVec phase_align(const CVec& x) {
  const double n = norm(x);
  if (x.empty() || n == 0.0) throw std::invalid_argument("phase_align: zero vector");

  std::size_t ref = 0;
  if (std::abs(x[0]) < tol::pivot_floor * n) {
    for (std::size_t k = 1; k < x.size(); ++k) {
      if (std::abs(x[k]) > std::abs(x[ref])) ref = k;
    }
  }
  const cxd rot = std::conj(x[ref]) / std::abs(x[ref]);
  CVec out(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) out[k] = x[k] * rot;
  return out;
}

std::vector<double> real_embedding(const CVec& u) {
  if (u.empty()) throw std::invalid_argument("real_embedding: empty vector");
  std::vector<double> e;
  e.reserve(2 * u.size() - 1);
  for (const cxd& c : u) e.push_back(c.real());
  for (std::size_t k = 1; k < u.size(); ++k) e.push_back(u[k].imag());
  return e;
}

double sin2_real_angle(const CVec& u, const CVec& v) {
  if (u.size() != v.size() || u.empty()) {
    throw std::invalid_argument("sin2_real_angle: length mismatch");
  }
  if (std::abs(norm(u) - 1.0) > tol::unit_norm_loose ||
      std::abs(norm(v) - 1.0) > tol::unit_norm_loose) {
    throw std::invalid_argument("sin2_real_angle: inputs must be unit vectors");
  }
  if (std::abs(u[0].imag()) > tol::unit_norm_loose || std::abs(v[0].imag()) > tol::unit_norm_loose) {
    throw std::invalid_argument("sin2_real_angle: inputs must be phase-aligned");
  }
  double dot = u[0].real() * v[0].real();
  for (std::size_t k = 1; k < u.size(); ++k) {
    dot += u[k].real() * v[k].real() + u[k].imag() * v[k].imag();
  }
  return std::max(0.0, 1.0 - dot * dot);
}

}  // namespace dcsi
