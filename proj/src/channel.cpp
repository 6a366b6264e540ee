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

#include "dcsimimo/channel.hpp"

#include "dcsimimo/numerics.hpp"

namespace dcsi {

ChannelRealization sample_channel(std::size_t k, const RngSeed& seed) {
  if (k < 2 || k > kMaxUsers) {
    throw std::invalid_argument("sample_channel: k must be in [2, 16]");
  }
  GaussianSampler g(make_engine(seed, {stream_tag::channel}));

  ChannelRealization out;
  out.h = CMat(k, k);
  out.hnorm = CMat(k, k);
  out.row_norms.resize(k);
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) out.h(i, j) = g.complex_gaussian();
    CVec row = out.h.row(i);
    const double n = norm(row);
    out.row_norms[i] = n;
    for (cxd& e : row) e /= n;
    out.hnorm.set_row(i, phase_align(row));
  }
  return out;
}

}  // namespace dcsi
