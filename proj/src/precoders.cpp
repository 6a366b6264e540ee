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

#include "dcsimimo/precoders.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>

#include "dcsimimo/doftheory.hpp"
#include "dcsimimo/numerics.hpp"

namespace dcsi {

namespace {

void check_stream(const TxCsi& csi, std::size_t stream, double p) {
  if (csi.users() < 2) throw std::invalid_argument("precoder: needs at least 2 users");
  if (stream >= csi.users()) throw std::invalid_argument("precoder: stream out of range");
  if (p <= 0) throw std::invalid_argument("precoder: p must be positive");
}

std::vector<CVec> interfering_rows(const TxCsi& csi, std::size_t stream) {
  std::vector<CVec> rows;
  rows.reserve(csi.users() - 1);
  for (std::size_t l = 0; l < csi.users(); ++l) {
    if (l != stream) rows.push_back(csi.row(l));
  }
  return rows;
}

CVec scaled_direction(CVec u, double scale) {
  const double n = norm(u);
  if (n < tol::pivot_floor) {
    throw numeric_error("precoder: projected direction is numerically zero");
  }
  const double f = scale / n;
  for (cxd& e : u) e *= f;
  return u;
}

void check_passive_set(const PassiveSet& s, std::size_t k) {
  if (s.size() != k) throw std::invalid_argument("passive set: needs one entry per stream");
  for (std::size_t n : s) {
    if (n >= k) throw std::invalid_argument("passive set: transmitter index out of range");
  }
}

// Solves the reduced zero-forcing system for `stream` from this transmitter's
// estimates: coefficients a over the active antennas m != n such that
//   est_l^H (e_n + sum_m a_m e_m) = 0   for every l != stream.
// Returns a indexed by active antenna order (ascending, skipping n).
CVec reduced_zf_solve(const TxCsi& csi, std::size_t stream, std::size_t n) {
  const std::size_t k = csi.users();
  CMat a(k - 1, k - 1);
  CVec rhs(k - 1);
  std::size_t r = 0;
  for (std::size_t l = 0; l < k; ++l) {
    if (l == stream) continue;
    const CVec est = csi.row(l);
    std::size_t c = 0;
    for (std::size_t m = 0; m < k; ++m) {
      if (m == n) continue;
      a(r, c++) = std::conj(est[m]);
    }
    rhs[r] = -std::conj(est[n]);
    ++r;
  }
  return solve_small(a, rhs);
}

double norm2(const CVec& v) {
  double s = 0.0;
  for (const cxd& e : v) s += std::norm(e);
  return s;
}

}  // namespace

CVec czf_local(const TxCsi& csi, std::size_t stream, double p) {
  check_stream(csi, stream, p);
  const CVec u = proj_perp(interfering_rows(csi, stream), csi.row(stream));
  return scaled_direction(u, std::sqrt(p / static_cast<double>(csi.users())));
}

CVec rzf_local(const TxCsi& csi, const CsiScalingMatrix& alpha, std::size_t stream, double p) {
  check_stream(csi, stream, p);
  const std::size_t k = csi.users();
  if (alpha.users() != k) throw std::invalid_argument("rzf_local: alpha dimension mismatch");

  // Transmit Wiener direction est^H (est est^H + R)^-1 e_stream with the
  // cross-user Gram in user coordinates and R = diag of the per-user error
  // power P^-clipped(alpha_l); perfect rows contribute zero regularization.
  // Regularizing in user space keeps the antenna coordinates exchangeable, so
  // the assembled precoder meets the power budget in expectation even when
  // the rows have unequal accuracy.
  CMat m(k, k);
  for (std::size_t r = 0; r < k; ++r) {
    const CVec est_r = csi.row(r);
    for (std::size_t c = 0; c < k; ++c) m(r, c) = hdot(est_r, csi.row(c));
    m(r, r) += alpha.is_perfect(r, csi.tx) ? 0.0 : std::pow(p, -alpha.clipped(r, csi.tx));
  }
  CVec rhs(k, cxd(0.0, 0.0));
  rhs[stream] = 1.0;
  const CVec y = solve_small(m, rhs);
  CVec t(k, cxd(0.0, 0.0));
  for (std::size_t l = 0; l < k; ++l) {
    const CVec est = csi.row(l);
    for (std::size_t mcoord = 0; mcoord < k; ++mcoord) t[mcoord] += est[mcoord] * y[l];
  }
  return scaled_direction(t, std::sqrt(p / static_cast<double>(k)));
}

CVec bzf_local(const TxCsi& csi, std::size_t stream, double p, const CVec* beacon) {
  check_stream(csi, stream, p);
  const std::size_t k = csi.users();
  CVec c(k, cxd(0.0, 0.0));
  if (beacon) {
    if (beacon->size() != k) throw std::invalid_argument("bzf_local: beacon length mismatch");
    if (norm(*beacon) == 0.0) throw std::invalid_argument("bzf_local: beacon must be non-zero");
    c = *beacon;
  } else {
    c[0] = 1.0;
  }
  const CVec u = proj_perp(interfering_rows(csi, stream), c);
  return scaled_direction(u, std::sqrt(p / static_cast<double>(k)));
}

double apzf_rho(const TxCsi& csi, std::size_t stream, const PassiveSet& s) {
  check_stream(csi, stream, 1.0);
  check_passive_set(s, csi.users());
  return norm2(reduced_zf_solve(csi, stream, s[stream]));
}

double quantize_unit_interval(double u, int bits) {
  if (bits < 1 || bits > 62) throw std::invalid_argument("quantize_unit_interval: bits in [1, 62]");
  if (!(u >= 0.0) || u >= 1.0) throw std::invalid_argument("quantize_unit_interval: u in [0, 1)");
  const double cells = static_cast<double>(std::uint64_t{1} << bits);
  double idx = std::floor(u * cells);
  if (idx >= cells) idx = cells - 1.0;
  return (idx + 0.5) / cells;
}

std::size_t apzf_best_informed(const CsiScalingMatrix& alpha, std::size_t stream,
                               const PassiveSet& s) {
  const std::size_t k = alpha.users();
  if (stream >= k) throw std::invalid_argument("apzf_best_informed: stream out of range");
  check_passive_set(s, k);
  std::size_t best = k;
  double best_q = -1.0;
  for (std::size_t j = 0; j < k; ++j) {
    if (j == s[stream]) continue;
    double q = std::numeric_limits<double>::infinity();
    for (std::size_t l = 0; l < k; ++l) {
      if (l != stream) q = std::min(q, alpha.clipped(l, j));
    }
    if (q > best_q) {
      best_q = q;
      best = j;
    }
  }
  return best;
}

cxd apzf_local(const TxCsi& csi, std::size_t stream, const PassiveSet& s, double p,
               const ApzfOptions& opt) {
  check_stream(csi, stream, p);
  const std::size_t k = csi.users();
  check_passive_set(s, k);
  const std::size_t n = s[stream];

  double passive_scale = 0.0;
  switch (opt.power) {
    case ApzfPower::dof_optimal:
      // The log2 P split is only a valid power budget beyond P = 2.
      if (p <= 2.0) {
        throw std::invalid_argument("apzf_local: dof-optimal power split requires p > 2");
      }
      passive_scale = std::sqrt(p / (static_cast<double>(k) * std::log2(p)));
      break;
    case ApzfPower::heuristic:
      passive_scale = std::sqrt(p / static_cast<double>(k));
      break;
    case ApzfPower::quantized:
      if (opt.power_bits < 1) {
        throw std::invalid_argument("apzf_local: quantized power needs bits >= 1");
      }
      if (!(opt.shared_uhat >= 0.0) || opt.shared_uhat >= 1.0) {
        throw std::invalid_argument("apzf_local: quantized power needs the shared value");
      }
      passive_scale =
          std::sqrt(p / static_cast<double>(k)) * std::sqrt(1.0 - opt.shared_uhat);
      break;
  }

  if (csi.tx == n) {
    if (opt.power == ApzfPower::heuristic) {
      // the passive side backs off by its own estimate of the beam norm
      return passive_scale / std::sqrt(1.0 + apzf_rho(csi, stream, s));
    }
    return passive_scale;
  }

  const CVec a = reduced_zf_solve(csi, stream, n);
  std::size_t own = 0;
  for (std::size_t m = 0; m < k; ++m) {
    if (m == n) continue;
    if (m == csi.tx) break;
    ++own;
  }
  cxd coeff = a[own];
  if (opt.power == ApzfPower::heuristic) coeff /= std::sqrt(1.0 + norm2(a));
  return passive_scale * coeff;
}

PrecoderMatrix assemble_distributed(const std::vector<CMat>& local) {
  const std::size_t k = local.size();
  if (k < 2) throw std::invalid_argument("assemble_distributed: needs at least 2 transmitters");
  for (const CMat& t : local) {
    if (t.rows() != k || t.cols() != k) {
      throw std::invalid_argument("assemble_distributed: local precoders must be k x k");
    }
  }
  PrecoderMatrix out;
  out.coef = CMat(k, k);
  for (std::size_t j = 0; j < k; ++j) {
    for (std::size_t i = 0; i < k; ++i) out.coef(j, i) = local[j](j, i);
  }
  return out;
}

namespace {

// transmitter holding the coarsest (lowest clipped exponent) estimate of
// `row`, optionally excluding one transmitter; ties to the lowest index
std::size_t coarsest_tx(const CsiScalingMatrix& alpha, std::size_t row, std::size_t exclude) {
  std::size_t best = alpha.users();
  double best_a = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < alpha.users(); ++j) {
    if (j == exclude) continue;
    if (alpha.clipped(row, j) < best_a) {
      best_a = alpha.clipped(row, j);
      best = j;
    }
  }
  return best;
}

}  // namespace

std::vector<TxCsi> apply_hq_common_csi(const std::vector<TxCsi>& tx_csis,
                                       const CsiScalingMatrix& alpha, HqMode mode,
                                       const PassiveSet* s) {
  const std::size_t k = tx_csis.size();
  if (k < 2) throw std::invalid_argument("apply_hq_common_csi: needs at least 2 transmitters");
  if (alpha.users() != k) throw std::invalid_argument("apply_hq_common_csi: alpha mismatch");
  for (const TxCsi& c : tx_csis) {
    if (c.users() != k) throw std::invalid_argument("apply_hq_common_csi: csi dimension mismatch");
  }

  std::size_t exclude = k;  // no exclusion
  if (mode == HqMode::apzf) {
    if (!s) throw std::invalid_argument("apply_hq_common_csi: apzf mode needs a passive set");
    check_passive_set(*s, k);
    for (std::size_t n : *s) {
      if (n != (*s)[0]) {
        throw std::invalid_argument(
            "apply_hq_common_csi: apzf mode needs a uniform passive set "
            "(use hq_common_rows_for_stream per stream)");
      }
    }
    exclude = (*s)[0];
  }

  CMat common(k, k);
  for (std::size_t r = 0; r < k; ++r) {
    common.set_row(r, tx_csis[coarsest_tx(alpha, r, exclude)].row(r));
  }
  std::vector<TxCsi> out = tx_csis;
  for (TxCsi& c : out) c.rows = common;
  return out;
}

CMat hq_common_rows_for_stream(const std::vector<TxCsi>& tx_csis, const CsiScalingMatrix& alpha,
                               std::size_t stream, const PassiveSet& s) {
  const std::size_t k = tx_csis.size();
  if (alpha.users() != k) throw std::invalid_argument("hq_common_rows_for_stream: alpha mismatch");
  check_passive_set(s, k);
  if (stream >= k) throw std::invalid_argument("hq_common_rows_for_stream: stream out of range");
  CMat common(k, k);
  for (std::size_t r = 0; r < k; ++r) {
    common.set_row(r, tx_csis[coarsest_tx(alpha, r, s[stream])].row(r));
  }
  return common;
}

PassiveSet default_passive_set(const CsiScalingMatrix& alpha, bool hq) {
  const std::size_t k = alpha.users();
  if (hq || k != 2) return select_passive_set(alpha, hq);

  // Two transmitters: per stream, park the transmitter with the worse
  // estimate of the interfering row; the single active one then solves the
  // reduced system on the best available estimate.
  PassiveSet s(2);
  for (std::size_t i = 0; i < 2; ++i) {
    const std::size_t o = 1 - i;
    s[i] = alpha.clipped(o, 1) < alpha.clipped(o, 0) ? 1 : 0;
  }
  return s;
}

}  // namespace dcsi
