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

// Distributed channel-state information: every transmitter owns its own
// estimate of the full multi-user channel. Estimate quality for the (user i,
// transmitter j) link is summarized by a scaling exponent alpha_i^(j): the
// estimation error power decays as P^-alpha when the transmit power P grows.
// Two concrete acquisition models are provided (statistical noise with
// power-scaled variance, and random vector quantization with per-link bit
// budgets), plus a hierarchical codebook whose coarse descriptions are
// prefixes of fine ones, so differently-informed transmitters can agree on a
// common estimate by truncation.

#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "dcsimimo/channel.hpp"
#include "dcsimimo/common.hpp"
#include "dcsimimo/rng.hpp"

namespace dcsi {

// Codebooks larger than 2^20 vectors are refused (resource_error): beyond the
// cap the exhaustive nearest-codeword scan stops being a sane desk experiment.
inline constexpr int kMaxCodebookBits = 20;

// ---------------------------------------------------------------------------
// CSI scaling exponents
// ---------------------------------------------------------------------------

// K x K matrix of per-link exponents: entry (i, j) describes how well
// transmitter j knows user i's channel direction. Entries are >= 0; +infinity
// is the perfect-CSI sentinel (exact knowledge at every power level).
//
// Exponents above 1 carry no additional rate at high power, so every consumer
// reads them through clipped(), the single place where min(alpha, 1) is
// applied. raw() exists for serialization and bit budgeting only.
class CsiScalingMatrix {
 public:
  explicit CsiScalingMatrix(std::size_t k);
  CsiScalingMatrix(std::size_t k, std::vector<double> row_major);

  // "1,0.5;0,0.7" -> rows separated by ';', entries by ','. "inf" accepted.
  static CsiScalingMatrix parse(const std::string& text);

  std::size_t users() const { return k_; }
  double raw(std::size_t rx, std::size_t tx) const;
  double clipped(std::size_t rx, std::size_t tx) const;
  bool is_perfect(std::size_t rx, std::size_t tx) const;

  const std::vector<double>& row_major() const { return a_; }

 private:
  std::size_t k_ = 0;
  std::vector<double> a_;
};

// Matrix as a JSON array of row arrays (numbers, "inf" for perfect links)
// and back; the config format of the simulation layer embeds this form.
std::string csi_scaling_to_json(const CsiScalingMatrix& alpha);
CsiScalingMatrix csi_scaling_from_json(const std::string& text);

// Per-link feedback bit budgets b_i^(j) >= 0, same layout as the scaling
// matrix.
struct BitMatrix {
  std::size_t k = 0;
  std::vector<int> bits;  // row-major, rows = users, cols = transmitters

  int at(std::size_t rx, std::size_t tx) const { return bits[rx * k + tx]; }
  static BitMatrix parse(const std::string& text);
};

// Bit budget that realizes exponent alpha at power p: round(alpha (K-1)
// log2 p). Raises resource_error beyond kMaxCodebookBits and
// invalid_argument for the perfect-CSI sentinel (nothing to quantize).
int bits_for_alpha(double alpha, std::size_t k, double p);

// ---------------------------------------------------------------------------
// Random vector quantization
// ---------------------------------------------------------------------------

// 2^bits isotropically drawn unit vectors, phase-aligned. `embed` caches the
// real embedding of every codeword (row-major, 2k-1 columns) so the
// nearest-codeword scan is a flat dot-product loop. (seed, link_rx, link_tx)
// is full provenance: it determines the draw bit-for-bit.
struct Codebook {
  std::size_t k = 0;
  int bits = 0;
  RngSeed seed;
  std::uint64_t link_rx = 0;
  std::uint64_t link_tx = 0;
  std::vector<CVec> vectors;
  std::vector<double> embed;

  std::size_t size() const { return vectors.size(); }
};

// link_rx / link_tx select the per-link substream (user row, transmitter).
Codebook make_codebook(std::size_t k, int bits, const RngSeed& seed, std::uint64_t link_rx = 0,
                       std::uint64_t link_tx = 0);

// JSON round trip with seed provenance; load re-validates norms/alignment and
// rebuilds the embedding cache.
std::string codebook_to_json(const Codebook& cb);
Codebook codebook_from_json(const std::string& text);

struct QuantResult {
  CVec vec;           // reconstructed estimate: sign * codeword
  std::size_t index;  // codeword index in the codebook
  int sign;           // +1 or -1, the extra half-space bit
  double sin2;        // chordal distortion against the input
};

// Large-codebook distortion sandwich for a 2^bits random codebook in
// dimension k, with c = Gamma(k - 1/2) / (Gamma(k) Gamma(1/2)):
//   (2k-1)/(2k+1) c^{-1/(k-1)} 2^{-B/(k-1)} <= E[min sin2]
//                                           <= Gamma(1/(k-1))/(k-1) c^{-1/(k-1)} 2^{-B/(k-1)}
//   (B + log2 c)/(k-1) <= E[-log2 min sin2] <= (B + log2 c + log2 e)/(k-1)
// Valid asymptotically in codebook size; k >= 2.
struct QuantBounds {
  double c = 0.0;
  double sin2_lo = 0.0;
  double sin2_hi = 0.0;
  double log_lo = 0.0;
  double log_hi = 0.0;
};

QuantBounds rvq_distortion_bounds(std::size_t k, int bits);

// Nearest codeword in chordal distance (max |u_R . c_R|) over the real
// embeddings. The sign bit picks the orientation with positive real inner
// product, i.e. the reconstruction closest to the input in Euclidean
// distance; feeding back that one extra bit is what keeps reconstructions at
// different transmitters consistent enough for joint precoding. Input must be
// unit-norm and phase-aligned.
QuantResult quantize_l2(const Codebook& cb, const CVec& aligned);

// ---------------------------------------------------------------------------
// Hierarchical (nested) quantization
// ---------------------------------------------------------------------------

// A 2^l_max-vector base codebook recursively halved at random into nested
// bins: level l has 2^l bins of 2^(l_max-l) vectors, each with one randomly
// chosen representative. position[v] is codeword v's leaf slot; the level-l
// bin of v is position[v] >> (l_max - l), so coarse bins are prefixes of fine
// ones by construction. rep[l][bin] is the codeword index representing a bin
// (level l_max: the codeword itself).
struct HierCodebook {
  Codebook base;
  int l_max = 0;
  std::vector<std::uint32_t> position;
  std::vector<std::vector<std::uint32_t>> rep;
};

HierCodebook make_hier_codebook(std::size_t k, int l_max, const RngSeed& seed,
                                std::uint64_t link_rx = 0);

std::string hier_codebook_to_json(const HierCodebook& hcb);
HierCodebook hier_codebook_from_json(const std::string& text);

struct HierQuantResult {
  CVec vec;               // sign * representative of the level-`level` bin
  std::size_t bin;        // bin index at the decoded level
  std::size_t base_index; // full-resolution codeword selected at l_max
  int sign;
  double sin2;            // distortion of the decoded representative
};

// Quantizes at full resolution, then decodes only `level` bits: the output is
// the representative of the level-`level` ancestor bin of the full-resolution
// selection. level ranges over [0, l_max]; level == l_max reproduces
// quantize_l2 on the base codebook exactly. Nesting invariant: the decode at
// a coarse level is a function of the bin at any finer level.
HierQuantResult hier_quantize(const HierCodebook& hcb, const CVec& aligned, int level);

// ---------------------------------------------------------------------------
// Statistical estimates and per-transmitter CSI assembly
// ---------------------------------------------------------------------------

// Gaussian estimation-noise model: adds iid CN(0, P^-min(alpha,1) / K) noise
// per entry to a unit-norm aligned direction, then renormalizes and re-aligns
// so the output is again a valid direction estimate. alpha = +inf returns the
// input unchanged; p must be at least 1 (below unit power the exponent grows
// the noise instead of shrinking it). The noise substream is
// (csi_noise, link_rx, link_tx), so the same link re-draws the same noise
// directions at every power level (common random numbers across a power
// sweep).
CVec statistical_estimate(const CVec& hnorm_row, double alpha, double p, const RngSeed& seed,
                          std::uint64_t link_rx = 0, std::uint64_t link_tx = 0);

// Everything transmitter j acts on: rows(i) = j's estimate of hnorm row i.
struct TxCsi {
  std::size_t tx = 0;
  CMat rows;

  CVec row(std::size_t i) const { return rows.row(i); }
  std::size_t users() const { return rows.rows(); }
};

enum class CsiModel { statistical, rvq, hier_rvq };

const char* to_string(CsiModel m);
std::optional<CsiModel> csi_model_from_string(const std::string& s);

// Builds the per-transmitter CSI for one channel draw.
//
//   statistical: independent statistical_estimate per link (i, j), noise
//     substream (csi_noise, i, j).
//   rvq: independent per-link codebook (substream (codebook, i, j)) with
//     bits[i][j] when given, else bits_for_alpha(raw alpha, k, p).
//   hier_rvq: one shared hierarchical codebook per user row (substream
//     (hier_codebook, i), l_max = max_j bits), transmitter j decodes its own
//     bit count -- coarse estimates are exact truncations of fine ones.
//
// The trial seed is (master_seed, trial index); derivation paths make every
// link's randomness independent and individually regenerable.
std::vector<TxCsi> build_tx_csi(const ChannelRealization& ch, const CsiScalingMatrix& alpha,
                                double p, CsiModel model, const BitMatrix* bits,
                                const RngSeed& seed);

}  // namespace dcsi
