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

// Monte-Carlo rate engine. One trial = one channel draw plus the CSI
// randomness derived from it; a power sweep reuses the same trial randomness
// at every grid point (common random numbers), so curves differ only through
// the power dependence of estimates and precoders. Trials are independent and
// may run on several threads; per-trial results are buffered and reduced in
// trial order, which makes every statistic bit-identical for any thread
// count.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dcsimimo/channel.hpp"
#include "dcsimimo/csi.hpp"
#include "dcsimimo/precoders.hpp"

namespace dcsi {

// Full description of one experiment. `scheme` is one of:
//   perfect-zf               centralized ZF from the true directions
//   czf | rzf | bzf          distributed (regularized / beacon) ZF
//   apzf                     active-passive ZF, dof-optimal passive power
//   apzf-heuristic           active-passive ZF, rho-matched power
//   apzf-qpower:<b>          active-passive ZF, b-bit shared power value
//   czf-hq | apzf-hq         ZF on hierarchically shared common estimates
struct SimConfig {
  CsiScalingMatrix alpha;        // K x K link exponents
  std::optional<BitMatrix> bits; // explicit budgets for rvq / hier-rvq
  CsiModel model = CsiModel::statistical;
  std::string scheme = "czf";
  std::vector<double> snr_db;    // strictly increasing grid
  std::size_t trials = 2000;
  std::uint64_t master_seed = 0;
  unsigned threads = 1;          // 0 = hardware concurrency
  CVec beacon;                   // empty = first canonical basis vector
  PassiveSet passive;            // empty = default_passive_set
  int power_bits = 3;            // apzf-qpower fallback when the scheme
                                 // string carries no :<b> suffix

  std::size_t users() const { return alpha.users(); }

  SimConfig() : alpha(2) {}
  explicit SimConfig(CsiScalingMatrix a) : alpha(std::move(a)) {}
};

std::string sim_config_to_json(const SimConfig& cfg);
SimConfig sim_config_from_json(const std::string& text);

// FNV-1a 64 of the canonical (sorted-key) JSON dump, hex encoded; stamped
// into every curve so results carry their own provenance.
std::string sim_config_hash(const SimConfig& cfg);

// Monte-Carlo means on an SNR grid. Layout: outer index user, inner index
// grid point. stderr entries are standard errors of the mean; leakage is the
// mean received interference power before the unit noise floor.
struct RateCurve {
  std::vector<double> snr_db;
  std::vector<std::vector<double>> per_user_rate;
  std::vector<std::vector<double>> per_user_stderr;
  std::vector<std::vector<double>> per_user_leakage;
  std::vector<double> sum_rate;
  std::vector<double> sum_stderr;
  std::size_t mc_trials = 0;
  std::uint64_t master_seed = 0;
  std::string scheme;
  std::string model;
  std::string config_hash;

  std::size_t users() const { return per_user_rate.size(); }
  std::size_t points() const { return snr_db.size(); }
};

// Treating-interference-as-noise rates at unit noise power:
// log2(1 + |h_i^H t_i|^2 / (1 + sum_{l != i} |h_i^H t_l|^2)).
std::vector<double> instantaneous_rates(const ChannelRealization& ch, const PrecoderMatrix& t);

// sum_{l != i} |h_i^H t_l|^2 per user.
std::vector<double> instantaneous_leakage(const ChannelRealization& ch, const PrecoderMatrix& t);

// The precoder one trial's CSI produces under cfg.scheme at power p.
// Exposed so properties of the deterministic part (shared-CSI collapse,
// orthogonality, power budgets) can be probed without the Monte-Carlo loop.
PrecoderMatrix scheme_precoder(const SimConfig& cfg, const ChannelRealization& ch,
                               const std::vector<TxCsi>& csi, double p);

// Per-transmitter CSI for trial `trial` of the configured model (the
// perfect-zf scheme ignores it and reads the true directions).
std::vector<TxCsi> trial_csi(const SimConfig& cfg, const ChannelRealization& ch, double p,
                             std::size_t trial);

RateCurve ergodic_curve(const SimConfig& cfg);

// Least-squares slope of rate versus log2(P) over grid points with
// snr_lo_db <= snr <= snr_hi_db (at least two). stderr is the regression
// standard error (0 when the window holds exactly two points).
struct SlopeFit {
  std::vector<double> per_user;
  std::vector<double> per_user_stderr;
  double sum = 0.0;
  double sum_stderr = 0.0;
};

SlopeFit dof_slope(const RateCurve& curve, double snr_lo_db, double snr_hi_db);

// CSV columns: snr_db, rate_user_1..K, sum_rate, leakage_user_1..K,
// stderr_user_1..K, stderr_sum. A '#' comment header carries provenance.
std::string rate_curve_to_csv(const RateCurve& curve);

// JSON object with the curve arrays plus scheme/model/seed/hash provenance.
std::string rate_curve_to_json(const RateCurve& curve);

// Monte-Carlo check of the random-codebook distortion sandwich: `trials`
// independent (direction, codebook) draws, empirical E[min sin2] and
// E[-log2 min sin2] against rvq_distortion_bounds. The sandwich only holds
// for large codebooks, so bits == 0 is reported informationally
// (bounds_apply = false, pass flags forced true).
struct QuantCheckReport {
  std::size_t k = 0;
  int bits = 0;
  std::size_t trials = 0;
  std::uint64_t master_seed = 0;
  double mean_sin2 = 0.0;
  double mean_neglog2 = 0.0;
  double sin2_lo = 0.0;
  double sin2_hi = 0.0;
  double log_lo = 0.0;
  double log_hi = 0.0;
  bool bounds_apply = false;
  bool sin2_pass = false;  // within [0.95 lo, 1.05 hi]
  bool log_pass = false;   // within [log_lo - 0.2, log_hi + 0.2]
};

QuantCheckReport quantcheck(std::size_t k, int bits, std::size_t trials,
                            std::uint64_t master_seed, unsigned threads = 1);

std::string quantcheck_to_json(const QuantCheckReport& r);

}  // namespace dcsi
