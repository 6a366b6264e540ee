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

#include <cstdint>
#include <initializer_list>
#include <random>

#include "dcsimimo/common.hpp"

namespace dcsi {

// Seed-splitting contract: (master_seed, stream_id) fully determines every
// random draw. Monte-Carlo trial t uses stream_id = t, so any trial can be
// regenerated in isolation and results are independent of thread count.
struct RngSeed {
  std::uint64_t master_seed = 0;
  std::uint64_t stream_id = 0;
};

// Builds a deterministic engine for (seed, derivation path). The path selects
// independent substreams within one trial (channel draw, per-link estimation
// noise, per-link codebooks, ...). mt19937_64 and seed_seq are fully specified
// by the standard, so identical inputs give identical sequences everywhere.
std::mt19937_64 make_engine(const RngSeed& seed, std::initializer_list<std::uint64_t> path = {});

// First element of every derivation path. Central registry so substreams for
// different purposes can never collide; remaining path elements are indices
// (receiver i, transmitter j, ...) as documented per use.
namespace stream_tag {
inline constexpr std::uint64_t channel = 0;        // channel matrix draw
inline constexpr std::uint64_t csi_noise = 1;      // + (i, j): estimation noise
inline constexpr std::uint64_t codebook = 2;       // + (i, j): per-link codebook
inline constexpr std::uint64_t hier_codebook = 3;  // + (i): shared hierarchical codebook
inline constexpr std::uint64_t quantcheck = 4;     // quantizer distortion MC
}  // namespace stream_tag

// uniform double in [0, 1) with 53 random bits
double uniform01(std::mt19937_64& eng);

// uniform integer in [0, n), unbiased via rejection (n >= 1). Hand-rolled
// because std::uniform_int_distribution is implementation-defined.
std::uint64_t uniform_below(std::mt19937_64& eng, std::uint64_t n);

// N(0,1) sampler via the Marsaglia polar method. std::normal_distribution is
// implementation-defined and would break cross-platform reproducibility.
class GaussianSampler {
 public:
  explicit GaussianSampler(std::mt19937_64 engine) : eng_(std::move(engine)) {}

  double operator()();

  // CN(0,1): independent real/imaginary parts with variance 1/2 each
  cxd complex_gaussian() {
    const double re = (*this)();
    const double im = (*this)();
    return cxd(re * kInvSqrt2, im * kInvSqrt2);
  }

 private:
  static constexpr double kInvSqrt2 = 0.7071067811865475244;

  std::mt19937_64 eng_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace dcsi
