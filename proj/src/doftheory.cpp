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

#include "dcsimimo/doftheory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <json.hpp>

namespace dcsi {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double finish(DofReport& r) {
  r.total = std::accumulate(r.per_user.begin(), r.per_user.end(), 0.0);
  return r.total;
}

void require_multiuser(const CsiScalingMatrix& alpha, const char* who) {
  if (alpha.users() < 2) {
    throw std::invalid_argument(std::string(who) + ": needs at least 2 users");
  }
}

// min over rows l != skip_row and transmitters j != skip_tx (pass users() to
// skip nothing)
double min_outside(const CsiScalingMatrix& alpha, std::size_t skip_row, std::size_t skip_tx) {
  double m = kInf;
  for (std::size_t l = 0; l < alpha.users(); ++l) {
    if (l == skip_row) continue;
    for (std::size_t j = 0; j < alpha.users(); ++j) {
      if (j == skip_tx) continue;
      m = std::min(m, alpha.clipped(l, j));
    }
  }
  return m;
}

double row_min(const CsiScalingMatrix& alpha, std::size_t row, std::size_t skip_tx) {
  double m = kInf;
  for (std::size_t j = 0; j < alpha.users(); ++j) {
    if (j == skip_tx) continue;
    m = std::min(m, alpha.clipped(row, j));
  }
  return m;
}

void check_passive(const PassiveSet& s, std::size_t k, const char* who) {
  if (s.size() != k) throw std::invalid_argument(std::string(who) + ": passive set size mismatch");
  for (std::size_t n : s) {
    if (n >= k) throw std::invalid_argument(std::string(who) + ": passive index out of range");
  }
}

DofReport single_stream(const char* scheme) {
  DofReport r;
  r.scheme = scheme;
  r.per_user = {1.0};
  r.total = 1.0;
  return r;
}

}  // namespace

DofReport dof_bc(const std::vector<double>& alpha_per_user) {
  if (alpha_per_user.empty()) throw std::invalid_argument("dof_bc: needs at least one user");
  DofReport r;
  r.scheme = "bc";
  for (double a : alpha_per_user) {
    if (std::isnan(a) || a < 0) throw std::invalid_argument("dof_bc: alpha must be >= 0");
    r.per_user.push_back(std::min(a, 1.0));
  }
  finish(r);
  return r;
}

DofReport dof_czf(const CsiScalingMatrix& alpha) {
  if (alpha.users() == 1) return single_stream("czf");
  DofReport r;
  r.scheme = "czf";
  const double m = min_outside(alpha, alpha.users(), alpha.users());
  r.per_user.assign(alpha.users(), m);
  finish(r);
  return r;
}

DofReport dof_bzf(const CsiScalingMatrix& alpha) {
  require_multiuser(alpha, "dof_bzf");
  const std::size_t k = alpha.users();
  DofReport r;
  r.scheme = "bzf";
  for (std::size_t u = 0; u < k; ++u) {
    double best = kInf;
    for (std::size_t i = 0; i < k; ++i) {
      if (i != u) best = std::min(best, min_outside(alpha, i, k));
    }
    r.per_user.push_back(best);
  }
  finish(r);
  return r;
}

DofReport dof_apzf(const CsiScalingMatrix& alpha, const PassiveSet* s) {
  const std::size_t k = alpha.users();
  if (k == 1) return single_stream("apzf");
  DofReport r;
  r.scheme = "apzf";

  if (k == 2 && !s) {
    // per-stream passive choice: the transmitter with the better estimate of
    // the interfering row solves, so user i rides its best exponent
    for (std::size_t u = 0; u < 2; ++u) {
      r.per_user.push_back(std::max(alpha.clipped(u, 0), alpha.clipped(u, 1)));
    }
    r.passive.resize(2);
    for (std::size_t i = 0; i < 2; ++i) {
      const std::size_t o = 1 - i;
      r.passive[i] = alpha.clipped(o, 1) < alpha.clipped(o, 0) ? 1 : 0;
    }
    finish(r);
    return r;
  }

  const PassiveSet set = s ? *s : select_passive_set(alpha, false);
  check_passive(set, k, "dof_apzf");
  for (std::size_t u = 0; u < k; ++u) {
    double best = kInf;
    for (std::size_t i = 0; i < k; ++i) {
      if (i != u) best = std::min(best, min_outside(alpha, i, set[i]));
    }
    r.per_user.push_back(best);
  }
  r.passive = set;
  finish(r);
  return r;
}

DofReport dof_czf_hq(const CsiScalingMatrix& alpha) {
  require_multiuser(alpha, "dof_czf_hq");
  DofReport r;
  r.scheme = "czf-hq";
  for (std::size_t u = 0; u < alpha.users(); ++u) {
    r.per_user.push_back(row_min(alpha, u, alpha.users()));
  }
  finish(r);
  return r;
}

DofReport dof_apzf_hq(const CsiScalingMatrix& alpha, const PassiveSet* s) {
  require_multiuser(alpha, "dof_apzf_hq");
  const std::size_t k = alpha.users();
  const PassiveSet set = s ? *s : select_passive_set(alpha, true);
  check_passive(set, k, "dof_apzf_hq");

  DofReport r;
  r.scheme = "apzf-hq";
  for (std::size_t u = 0; u < k; ++u) {
    double best = kInf;
    for (std::size_t i = 0; i < k; ++i) {
      if (i != u) best = std::min(best, row_min(alpha, u, set[i]));
    }
    r.per_user.push_back(best);
  }
  r.passive = set;
  finish(r);
  return r;
}

PassiveSet select_passive_set(const CsiScalingMatrix& alpha, bool hq) {
  require_multiuser(alpha, "select_passive_set");
  const std::size_t k = alpha.users();
  std::size_t pick = 0;

  if (!hq) {
    // silence the transmitter that holds the globally worst estimate
    double worst = kInf;
    for (std::size_t j = 0; j < k; ++j) {
      double col = kInf;
      for (std::size_t l = 0; l < k; ++l) col = std::min(col, alpha.clipped(l, j));
      if (col < worst) {
        worst = col;
        pick = j;
      }
    }
  } else {
    // silence the transmitter whose exclusion leaves the best total of
    // per-row minima over the remaining transmitters
    double best_sum = -kInf;
    for (std::size_t n = 0; n < k; ++n) {
      double sum = 0.0;
      for (std::size_t u = 0; u < k; ++u) sum += row_min(alpha, u, n);
      if (sum > best_sum) {
        best_sum = sum;
        pick = n;
      }
    }
  }
  return PassiveSet(k, pick);
}

DofReport dof_for_scheme(const CsiScalingMatrix& alpha, const std::string& scheme) {
  if (scheme == "perfect-zf") {
    DofReport r;
    r.scheme = scheme;
    r.per_user.assign(alpha.users(), 1.0);
    finish(r);
    return r;
  }
  if (scheme == "czf" || scheme == "rzf") {
    DofReport r = dof_czf(alpha);
    r.scheme = scheme;
    return r;
  }
  if (scheme == "bzf") return dof_bzf(alpha);
  if (scheme == "apzf" || scheme == "apzf-heuristic" || scheme.rfind("apzf-qpower:", 0) == 0) {
    DofReport r = dof_apzf(alpha);
    r.scheme = scheme;
    return r;
  }
  if (scheme == "czf-hq") return dof_czf_hq(alpha);
  if (scheme == "apzf-hq") return dof_apzf_hq(alpha);
  throw std::invalid_argument("dof_for_scheme: unknown scheme '" + scheme + "'");
}

std::string dof_report_to_json(const DofReport& r) {
  nlohmann::json j;
  j["scheme"] = r.scheme;
  j["per_user"] = r.per_user;
  j["total"] = r.total;
  if (!r.passive.empty()) j["passive"] = r.passive;
  return j.dump();
}

}  // namespace dcsi
