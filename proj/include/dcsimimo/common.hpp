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

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace dcsi {

inline constexpr const char* kVersion = "0.1.0";

// Largest supported user/transmitter count. Everything in this library is
// dense O(K^3)-or-less linear algebra sized for small cooperation clusters.
inline constexpr std::size_t kMaxUsers = 16;

using cxd = std::complex<double>;
using CVec = std::vector<cxd>;

// passive-transmitter assignment for active-passive schemes: entry i is the
// transmitter index that stays passive while beamforming for user i
using PassiveSet = std::vector<std::size_t>;

// ---------------------------------------------------------------------------
// Central tolerance table. Every numerical guard in the library reads from
// here so that accuracy policy can be audited (and changed) in one place.
// ---------------------------------------------------------------------------
namespace tol {

// backward error accepted from the dense solver: ||Mx-b|| <= k*(||M||||x||+||b||)
inline constexpr double solve_residual = 1e-9;
// residual inner products accepted from orthogonal projections
inline constexpr double orthogonality = 1e-10;
// unit-norm checks on freshly constructed direction vectors
inline constexpr double unit_norm = 1e-12;
// unit-norm / alignment checks on caller-supplied vectors (MC data is noisier)
inline constexpr double unit_norm_loose = 1e-9;
// a pivot below pivot_floor * max|entry| marks a matrix numerically singular
inline constexpr double pivot_floor = 1e-14;
// Gram matrices with a pivot-ratio condition estimate above this are rejected
inline constexpr double cond_limit = 1e12;
// tolerance for closed-form identities (golden values, round trips)
inline constexpr double exact = 1e-12;

}  // namespace tol

// ---------------------------------------------------------------------------
// Error taxonomy. std::invalid_argument marks contract violations by the
// caller; the three classes below separate externally meaningful failure
// categories (they map 1:1 onto C API status codes and CLI exit codes).
// ---------------------------------------------------------------------------

// malformed textual input (matrix/grid/config syntax)
class parse_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// a resource guardrail was hit (e.g. codebook size cap)
class resource_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// a numerically degenerate computation (singular system, zero direction)
class numeric_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// CMat: minimal dense complex matrix, row-major storage with explicit
// dimensions. Deliberately small surface; all algorithms live in free
// functions of the modules that need them.
// ---------------------------------------------------------------------------
class CMat {
 public:
  CMat() = default;

  CMat(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {
    if (rows == 0 || cols == 0) throw std::invalid_argument("CMat: dimensions must be positive");
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  cxd& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const cxd& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  cxd& at(std::size_t r, std::size_t c) {
    check(r, c);
    return data_[r * cols_ + c];
  }
  const cxd& at(std::size_t r, std::size_t c) const {
    check(r, c);
    return data_[r * cols_ + c];
  }

  CVec row(std::size_t r) const {
    check(r, 0);
    return CVec(data_.begin() + static_cast<std::ptrdiff_t>(r * cols_),
                data_.begin() + static_cast<std::ptrdiff_t>((r + 1) * cols_));
  }

  void set_row(std::size_t r, const CVec& v) {
    check(r, 0);
    if (v.size() != cols_) throw std::invalid_argument("CMat::set_row: length mismatch");
    std::copy(v.begin(), v.end(), data_.begin() + static_cast<std::ptrdiff_t>(r * cols_));
  }

  const CVec& data() const { return data_; }

 private:
  void check(std::size_t r, std::size_t c) const {
    if (r >= rows_ || c >= cols_) throw std::out_of_range("CMat: index out of range");
  }

  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  CVec data_;
};

}  // namespace dcsi
