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

#include "dcsimimo/feedback_alloc.hpp"

#include <cmath>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace dcsi {

namespace {

void check_gamma(double gamma) {
  if (std::isnan(gamma) || !std::isfinite(gamma) || gamma < 0.0) {
    throw std::invalid_argument("allocate: gamma must be finite and >= 0");
  }
}

AllocationPlan make_plan(const char* scheme, double gamma, std::size_t n, double basis) {
  AllocationPlan p;
  p.scheme = scheme;
  p.gamma = gamma;
  p.n_active = n;
  p.per_link_alpha = basis == 0.0 ? 1.0 : std::min(1.0, gamma / basis);
  p.dof = static_cast<double>(n) * p.per_link_alpha;
  p.spend = basis * p.per_link_alpha;
  return p;
}

std::string fmt_g17(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

}  // namespace

AllocationPlan allocate_czf(double gamma) {
  check_gamma(gamma);
  // smallest n whose flat region [n^2*(n-1), (n+1)*n^2] covers gamma; ties
  // keep the smaller stream count
  std::size_t n = 1;
  while (static_cast<double>((n + 1) * n * n) < gamma) ++n;
  const double basis = static_cast<double>(n * n * (n - 1));
  return make_plan("czf", gamma, n, basis);
}

AllocationPlan allocate_apzf(double gamma) {
  check_gamma(gamma);
  // flat region for n streams is [n*(n-1)^2, n^3]
  std::size_t n = 1;
  while (static_cast<double>(n * n * n) < gamma) ++n;
  const double basis = static_cast<double>(n * (n - 1) * (n - 1));
  return make_plan("apzf", gamma, n, basis);
}

AllocationPlan allocate_for_scheme(const std::string& scheme, double gamma) {
  if (scheme == "czf") return allocate_czf(gamma);
  if (scheme == "apzf") return allocate_apzf(gamma);
  throw std::invalid_argument("allocate_for_scheme: unknown scheme '" + scheme + "'");
}

std::vector<AllocationPlan> allocation_sweep(const std::string& scheme,
                                             const std::vector<double>& gammas) {
  std::vector<AllocationPlan> out;
  out.reserve(gammas.size());
  for (double g : gammas) out.push_back(allocate_for_scheme(scheme, g));
  return out;
}

CsiScalingMatrix expand_to_matrix(const AllocationPlan& plan) {
  if (plan.n_active == 0) throw std::invalid_argument("expand_to_matrix: n_active must be >= 1");
  if (plan.n_active > kMaxUsers) {
    throw std::invalid_argument("expand_to_matrix: n_active exceeds supported user count");
  }
  if (plan.scheme != "czf" && plan.scheme != "apzf") {
    throw std::invalid_argument("expand_to_matrix: unknown scheme '" + plan.scheme + "'");
  }
  const std::size_t n = plan.n_active;
  std::vector<double> a(n * n, plan.per_link_alpha);
  if (plan.scheme == "apzf" && n >= 2) {
    for (std::size_t l = 0; l < n; ++l) a[l * n + 0] = 0.0;
  }
  return CsiScalingMatrix(n, std::move(a));
}

std::string allocation_to_json(const AllocationPlan& plan) {
  nlohmann::json j;
  j["scheme"] = plan.scheme;
  j["gamma"] = plan.gamma;
  j["n_active"] = plan.n_active;
  j["alpha"] = plan.per_link_alpha;
  j["dof"] = plan.dof;
  j["spend"] = plan.spend;
  return j.dump();
}

std::string sweep_to_csv(const std::vector<AllocationPlan>& plans) {
  std::ostringstream os;
  os << "gamma,scheme,n_active,alpha,dof\n";
  for (const auto& p : plans) {
    os << fmt_g17(p.gamma) << ',' << p.scheme << ',' << p.n_active << ','
       << fmt_g17(p.per_link_alpha) << ',' << fmt_g17(p.dof) << '\n';
  }
  return os.str();
}

}  // namespace dcsi
