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
#include <limits>

#include "dcsimimo/doftheory.hpp"
#include "dcsimimo/feedback_alloc.hpp"

#include <json.hpp>

using namespace dcsi;

TEST_CASE("czf allocation saturates at n^2(n-1) and activates past (n+1)n^2") {
  const double saturation[] = {0.0, 4.0, 18.0, 48.0, 100.0};
  const double activation[] = {2.0, 12.0, 36.0, 80.0, 150.0};
  for (std::size_t n = 1; n <= 5; ++n) {
    // at the saturation budget the n-stream plan buys full quality exactly
    const AllocationPlan sat = allocate_czf(saturation[n - 1]);
    CHECK(sat.n_active == n);
    CHECK(sat.per_link_alpha == 1.0);
    CHECK(sat.dof == static_cast<double>(n));

    // the flat region holds until the next stream activates
    const AllocationPlan edge = allocate_czf(activation[n - 1]);
    CHECK(edge.n_active == n);
    CHECK(edge.per_link_alpha == 1.0);
    const AllocationPlan past = allocate_czf(activation[n - 1] + 1e-9);
    CHECK(past.n_active == n + 1);
    CHECK(past.per_link_alpha < 1.0);
  }
}

TEST_CASE("apzf allocation saturates at n(n-1)^2 and activates past n^3") {
  for (std::size_t n = 1; n <= 5; ++n) {
    const double nd = static_cast<double>(n);
    const AllocationPlan sat = allocate_apzf(nd * (nd - 1.0) * (nd - 1.0));
    CHECK(sat.n_active == n);
    CHECK(sat.per_link_alpha == 1.0);
    CHECK(sat.dof == nd);
    const AllocationPlan edge = allocate_apzf(nd * nd * nd);
    CHECK(edge.n_active == n);
    const AllocationPlan past = allocate_apzf(nd * nd * nd + 1e-9);
    CHECK(past.n_active == n + 1);
  }
}

TEST_CASE("allocation plans spend within budget and grow continuously") {
  for (const char* scheme : {"czf", "apzf"}) {
    double prev_dof = 0.0;
    for (double gamma = 0.0; gamma <= 200.0; gamma += 0.125) {
      const AllocationPlan p = allocate_for_scheme(scheme, gamma);
      CHECK(p.scheme == scheme);
      CHECK(p.gamma == gamma);
      CHECK(p.per_link_alpha > 0.0);
      CHECK(p.per_link_alpha <= 1.0);
      CHECK(p.dof ==
            doctest::Approx(static_cast<double>(p.n_active) * p.per_link_alpha).epsilon(1e-15));
      CHECK(p.spend <= gamma + 1e-12);
      // prelog never decreases in the offered budget
      CHECK(p.dof >= prev_dof - 1e-12);
      prev_dof = p.dof;
    }
  }
}

TEST_CASE("activating one more stream is seamless in the prelog") {
  // just past the czf activation point (n+1)n^2 the new plan starts at
  // dof = n, exactly where the saturated n-stream plan left off
  for (std::size_t n = 1; n <= 6; ++n) {
    const double nd = static_cast<double>(n);
    const double act = (nd + 1.0) * nd * nd;
    const AllocationPlan before = allocate_czf(act);
    const AllocationPlan after = allocate_czf(act + 1e-9);
    CHECK(before.dof == doctest::Approx(nd).epsilon(1e-12));
    CHECK(after.dof == doctest::Approx(nd).epsilon(1e-6));
  }
}

TEST_CASE("allocation rejects bad budgets and schemes") {
  CHECK_THROWS_AS(allocate_czf(-1.0), std::invalid_argument);
  CHECK_THROWS_AS(allocate_czf(std::numeric_limits<double>::quiet_NaN()), std::invalid_argument);
  CHECK_THROWS_AS(allocate_czf(std::numeric_limits<double>::infinity()), std::invalid_argument);
  CHECK_THROWS_AS(allocate_for_scheme("bzf", 1.0), std::invalid_argument);
  const AllocationPlan zero = allocate_czf(0.0);
  CHECK(zero.n_active == 1);
  CHECK(zero.dof == 1.0);
  CHECK(zero.spend == 0.0);
}

TEST_CASE("expanded matrices reproduce the planned prelog") {
  for (double gamma : {0.0, 1.0, 3.0, 7.5, 20.0, 55.0, 149.0}) {
    const AllocationPlan c = allocate_czf(gamma);
    const CsiScalingMatrix mc = expand_to_matrix(c);
    REQUIRE(mc.users() == c.n_active);
    for (std::size_t i = 0; i < mc.users(); ++i) {
      for (std::size_t j = 0; j < mc.users(); ++j) CHECK(mc.raw(i, j) == c.per_link_alpha);
    }
    CHECK(dof_czf(mc).total == doctest::Approx(c.dof).epsilon(1e-12));

    const AllocationPlan a = allocate_apzf(gamma);
    const CsiScalingMatrix ma = expand_to_matrix(a);
    REQUIRE(ma.users() == a.n_active);
    if (a.n_active >= 2) {
      for (std::size_t i = 0; i < ma.users(); ++i) {
        CHECK(ma.raw(i, 0) == 0.0);  // passive transmitter stays uninformed
        for (std::size_t j = 1; j < ma.users(); ++j) CHECK(ma.raw(i, j) == a.per_link_alpha);
      }
      CHECK(dof_apzf(ma).total == doctest::Approx(a.dof).epsilon(1e-12));
    }
  }
}

TEST_CASE("allocation sweep keeps input order and serializes") {
  const std::vector<double> gammas = {10.0, 0.0, 5.0};
  const std::vector<AllocationPlan> plans = allocation_sweep("czf", gammas);
  REQUIRE(plans.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) CHECK(plans[i].gamma == gammas[i]);

  const std::string csv = sweep_to_csv(plans);
  CHECK(csv.rfind("gamma,scheme,n_active,alpha,dof\n", 0) == 0);
  std::size_t lines = 0;
  for (char c : csv) lines += c == '\n' ? 1 : 0;
  CHECK(lines == 4);  // header + one row per plan

  const nlohmann::json j = nlohmann::json::parse(allocation_to_json(plans[0]));
  CHECK(j.at("scheme") == "czf");
  CHECK(j.at("gamma").get<double>() == 10.0);
  CHECK(j.at("n_active").get<std::size_t>() == plans[0].n_active);
  CHECK(j.at("alpha").get<double>() == plans[0].per_link_alpha);
  CHECK(j.at("dof").get<double>() == plans[0].dof);
  CHECK(j.at("spend").get<double>() == plans[0].spend);
}
