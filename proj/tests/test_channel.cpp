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

#include <doctest.h>

#include <cmath>

#include "dcsimimo/channel.hpp"
#include "dcsimimo/numerics.hpp"

using namespace dcsi;

TEST_CASE("sample_channel is deterministic in (master_seed, stream)") {
  const ChannelRealization a = sample_channel(3, RngSeed{42, 7});
  const ChannelRealization b = sample_channel(3, RngSeed{42, 7});
  for (std::size_t i = 0; i < 9; ++i) CHECK(a.h.data()[i] == b.h.data()[i]);

  const ChannelRealization c = sample_channel(3, RngSeed{42, 8});
  double diff = 0.0;
  for (std::size_t i = 0; i < 9; ++i) diff += std::abs(a.h.data()[i] - c.h.data()[i]);
  CHECK(diff > 1e-6);

  const ChannelRealization d = sample_channel(3, RngSeed{43, 7});
  diff = 0.0;
  for (std::size_t i = 0; i < 9; ++i) diff += std::abs(a.h.data()[i] - d.h.data()[i]);
  CHECK(diff > 1e-6);
}

TEST_CASE("hnorm rows are unit, aligned, and carry the row magnitude") {
  const ChannelRealization ch = sample_channel(4, RngSeed{1, 0});
  REQUIRE(ch.users() == 4);
  REQUIRE(ch.row_norms.size() == 4);
  for (std::size_t i = 0; i < 4; ++i) {
    const CVec u = ch.hnorm.row(i);
    CHECK(norm(u) == doctest::Approx(1.0).epsilon(1e-12));
    // aligned: reference entry real non-negative (entry 0 generically nonzero)
    CHECK(u[0].imag() == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(u[0].real() >= 0.0);
    CHECK(ch.row_norms[i] == doctest::Approx(norm(ch.h.row(i))).epsilon(1e-12));
    // direction matches: |<u, h_i>| = ||h_i||
    CHECK(std::abs(hdot(u, ch.h.row(i))) ==
          doctest::Approx(ch.row_norms[i]).epsilon(1e-10));
  }
}

TEST_CASE("channel entries have CN(0,1) moments") {
  double sum_re = 0.0;
  double sum_abs2 = 0.0;
  std::size_t n = 0;
  for (std::uint64_t t = 0; t < 2000; ++t) {
    const ChannelRealization ch = sample_channel(2, RngSeed{5, t});
    for (const auto& v : ch.h.data()) {
      sum_re += v.real();
      sum_abs2 += std::norm(v);
      ++n;
    }
  }
  const double mean = sum_re / static_cast<double>(n);
  const double var = sum_abs2 / static_cast<double>(n);
  CHECK(std::abs(mean) < 0.05);        // stderr ~ 1/sqrt(2*8000) ~ 0.008
  CHECK(var == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("sample_channel validates the user count") {
  CHECK_THROWS_AS(sample_channel(0, RngSeed{}), std::invalid_argument);
  CHECK_THROWS_AS(sample_channel(1, RngSeed{}), std::invalid_argument);
  CHECK_THROWS_AS(sample_channel(kMaxUsers + 1, RngSeed{}), std::invalid_argument);
  CHECK_NOTHROW(sample_channel(kMaxUsers, RngSeed{}));
}
