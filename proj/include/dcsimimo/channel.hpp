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

#include "dcsimimo/common.hpp"
#include "dcsimimo/rng.hpp"

namespace dcsi {

// One draw of the K-user channel. Row i of `h` is user i's channel vector
// (receive model y_i = h_i^H x). `hnorm` carries the same rows normalized to
// unit norm and phase-aligned (real non-negative first coefficient); those
// normalized directions are what transmitters estimate and quantize.
// row_norms[i] restores the magnitude: h_i = row_norms[i] * (aligned row up
// to the removed phase).
struct ChannelRealization {
  CMat h;
  CMat hnorm;
  std::vector<double> row_norms;

  std::size_t users() const { return h.rows(); }
};

// iid CN(0,1) entries, deterministic in (seed.master_seed, seed.stream_id).
// 2 <= k <= kMaxUsers.
ChannelRealization sample_channel(std::size_t k, const RngSeed& seed);

}  // namespace dcsi
