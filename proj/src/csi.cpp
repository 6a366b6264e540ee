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

#include "dcsimimo/csi.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <numeric>

#include <json.hpp>

#include "dcsimimo/numerics.hpp"

namespace dcsi {

using nlohmann::json;

// ---------------------------------------------------------------------------
// CsiScalingMatrix
// ---------------------------------------------------------------------------

namespace {

void validate_alpha_entries(std::size_t k, const std::vector<double>& a) {
  if (k < 1 || k > kMaxUsers) {
    throw std::invalid_argument("CsiScalingMatrix: k must be in [1, 16]");
  }
  if (a.size() != k * k) throw std::invalid_argument("CsiScalingMatrix: needs k*k entries");
  for (double v : a) {
    if (std::isnan(v) || v < 0.0) {
      throw std::invalid_argument("CsiScalingMatrix: entries must be >= 0 (or +inf)");
    }
  }
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

double parse_entry(const std::string& raw) {
  std::string t;
  for (char c : raw) {
    if (!std::isspace(static_cast<unsigned char>(c))) t.push_back(c);
  }
  if (t == "inf" || t == "Inf" || t == "INF") return std::numeric_limits<double>::infinity();
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(t, &used);
  } catch (const std::exception&) {
    throw parse_error("matrix entry is not a number: '" + raw + "'");
  }
  if (used != t.size()) throw parse_error("matrix entry is not a number: '" + raw + "'");
  return v;
}

}  // namespace

CsiScalingMatrix::CsiScalingMatrix(std::size_t k) : k_(k), a_(k * k, 0.0) {
  validate_alpha_entries(k, a_);
}

CsiScalingMatrix::CsiScalingMatrix(std::size_t k, std::vector<double> row_major)
    : k_(k), a_(std::move(row_major)) {
  validate_alpha_entries(k_, a_);
}

CsiScalingMatrix CsiScalingMatrix::parse(const std::string& text) {
  const std::vector<std::string> rows = split(text, ';');
  const std::size_t k = rows.size();
  std::vector<double> entries;
  entries.reserve(k * k);
  for (const std::string& r : rows) {
    const std::vector<std::string> cells = split(r, ',');
    if (cells.size() != k) {
      throw parse_error("matrix must be square: got " + std::to_string(cells.size()) +
                        " entries in a row of a " + std::to_string(k) + "-row matrix");
    }
    for (const std::string& c : cells) entries.push_back(parse_entry(c));
  }
  return CsiScalingMatrix(k, std::move(entries));
}

std::string csi_scaling_to_json(const CsiScalingMatrix& alpha) {
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t i = 0; i < alpha.users(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (std::size_t j = 0; j < alpha.users(); ++j) {
      const double a = alpha.raw(i, j);
      if (std::isinf(a)) {
        row.push_back("inf");
      } else {
        row.push_back(a);
      }
    }
    rows.push_back(row);
  }
  return rows.dump();
}

CsiScalingMatrix csi_scaling_from_json(const std::string& text) {
  nlohmann::json rows;
  try {
    rows = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw parse_error(std::string("alpha: ") + e.what());
  }
  if (!rows.is_array() || rows.empty()) throw parse_error("alpha: expected a 2-d array");
  const std::size_t k = rows.size();
  std::vector<double> a;
  a.reserve(k * k);
  for (const auto& row : rows) {
    if (!row.is_array() || row.size() != k) throw parse_error("alpha: matrix must be square");
    for (const auto& cell : row) {
      if (cell.is_string()) {
        if (cell.get<std::string>() != "inf") {
          throw parse_error("alpha: entries are numbers or \"inf\"");
        }
        a.push_back(std::numeric_limits<double>::infinity());
      } else if (cell.is_number()) {
        a.push_back(cell.get<double>());
      } else {
        throw parse_error("alpha: entries are numbers or \"inf\"");
      }
    }
  }
  return CsiScalingMatrix(k, std::move(a));
}

double CsiScalingMatrix::raw(std::size_t rx, std::size_t tx) const {
  if (rx >= k_ || tx >= k_) throw std::out_of_range("CsiScalingMatrix: index out of range");
  return a_[rx * k_ + tx];
}

double CsiScalingMatrix::clipped(std::size_t rx, std::size_t tx) const {
  return std::min(raw(rx, tx), 1.0);
}

bool CsiScalingMatrix::is_perfect(std::size_t rx, std::size_t tx) const {
  return std::isinf(raw(rx, tx));
}

BitMatrix BitMatrix::parse(const std::string& text) {
  const std::vector<std::string> rows = split(text, ';');
  BitMatrix bm;
  bm.k = rows.size();
  if (bm.k < 1 || bm.k > kMaxUsers) throw parse_error("bit matrix: k must be in [1, 16]");
  for (const std::string& r : rows) {
    const std::vector<std::string> cells = split(r, ',');
    if (cells.size() != bm.k) throw parse_error("bit matrix must be square");
    for (const std::string& c : cells) {
      const double v = parse_entry(c);
      if (v < 0 || v != std::floor(v) || v > kMaxCodebookBits) {
        throw parse_error("bit matrix entries must be integers in [0, 20]");
      }
      bm.bits.push_back(static_cast<int>(v));
    }
  }
  return bm;
}

int bits_for_alpha(double alpha, std::size_t k, double p) {
  if (std::isinf(alpha)) {
    throw std::invalid_argument("bits_for_alpha: perfect-CSI link has no finite bit budget");
  }
  if (alpha < 0 || std::isnan(alpha)) throw std::invalid_argument("bits_for_alpha: alpha >= 0");
  if (k < 2) throw std::invalid_argument("bits_for_alpha: k >= 2");
  if (p <= 0) throw std::invalid_argument("bits_for_alpha: p > 0");
  const double raw = alpha * static_cast<double>(k - 1) * std::log2(p);
  const long b = std::lround(std::max(raw, 0.0));
  if (b > kMaxCodebookBits) {
    throw resource_error("bits_for_alpha: bit budget " + std::to_string(b) +
                         " exceeds the 2^20 codebook cap");
  }
  return static_cast<int>(b);
}

// ---------------------------------------------------------------------------
// Codebooks
// ---------------------------------------------------------------------------

namespace {

// One isotropic aligned direction: normalized iid complex Gaussian vector.
CVec random_direction(GaussianSampler& g, std::size_t k) {
  CVec v(k);
  double n2;
  do {
    n2 = 0.0;
    for (cxd& e : v) {
      e = g.complex_gaussian();
      n2 += std::norm(e);
    }
  } while (n2 == 0.0);
  const double inv = 1.0 / std::sqrt(n2);
  for (cxd& e : v) e *= inv;
  return phase_align(v);
}

void append_embedding(std::vector<double>& embed, const CVec& v) {
  const std::vector<double> e = real_embedding(v);
  embed.insert(embed.end(), e.begin(), e.end());
}

void check_codebook_args(std::size_t k, int bits) {
  if (k < 1 || k > kMaxUsers) throw std::invalid_argument("codebook: k must be in [1, 16]");
  if (bits < 0) throw std::invalid_argument("codebook: bits must be >= 0");
  if (bits > kMaxCodebookBits) {
    throw resource_error("codebook: " + std::to_string(bits) + " bits exceeds the 2^20 cap");
  }
}

}  // namespace

Codebook make_codebook(std::size_t k, int bits, const RngSeed& seed, std::uint64_t link_rx,
                       std::uint64_t link_tx) {
  check_codebook_args(k, bits);
  Codebook cb;
  cb.k = k;
  cb.bits = bits;
  cb.seed = seed;
  cb.link_rx = link_rx;
  cb.link_tx = link_tx;

  const std::size_t count = std::size_t{1} << bits;
  cb.vectors.reserve(count);
  cb.embed.reserve(count * (2 * k - 1));
  GaussianSampler g(make_engine(seed, {stream_tag::codebook, link_rx, link_tx}));
  for (std::size_t n = 0; n < count; ++n) {
    cb.vectors.push_back(random_direction(g, k));
    append_embedding(cb.embed, cb.vectors.back());
  }
  return cb;
}

QuantResult quantize_l2(const Codebook& cb, const CVec& aligned) {
  if (aligned.size() != cb.k) throw std::invalid_argument("quantize_l2: dimension mismatch");
  if (cb.vectors.empty()) throw std::invalid_argument("quantize_l2: empty codebook");
  if (std::abs(norm(aligned) - 1.0) > tol::unit_norm_loose ||
      std::abs(aligned[0].imag()) > tol::unit_norm_loose) {
    throw std::invalid_argument("quantize_l2: input must be a phase-aligned unit vector");
  }

  const std::vector<double> u = real_embedding(aligned);
  const std::size_t d = u.size();
  double best_dot = 0.0;
  double best_abs = -1.0;
  std::size_t best = 0;
  const double* row = cb.embed.data();
  for (std::size_t n = 0; n < cb.vectors.size(); ++n, row += d) {
    double dot = 0.0;
    for (std::size_t t = 0; t < d; ++t) dot += u[t] * row[t];
    const double a = std::abs(dot);
    if (a > best_abs) {
      best_abs = a;
      best_dot = dot;
      best = n;
    }
  }

  QuantResult out;
  out.index = best;
  out.sign = best_dot < 0.0 ? -1 : 1;
  out.sin2 = std::max(0.0, 1.0 - best_abs * best_abs);
  out.vec = cb.vectors[best];
  if (out.sign < 0) {
    for (cxd& e : out.vec) e = -e;
  }
  return out;
}

QuantBounds rvq_distortion_bounds(std::size_t k, int bits) {
  if (k < 2 || k > kMaxUsers) {
    throw std::invalid_argument("rvq_distortion_bounds: k must be in [2, 16]");
  }
  if (bits < 0) throw std::invalid_argument("rvq_distortion_bounds: bits must be >= 0");
  const double kd = static_cast<double>(k);
  const double km1 = kd - 1.0;
  QuantBounds b;
  b.c = std::tgamma(kd - 0.5) / (std::tgamma(kd) * std::tgamma(0.5));
  const double scale = std::pow(b.c, -1.0 / km1) * std::pow(2.0, -static_cast<double>(bits) / km1);
  b.sin2_lo = (2.0 * kd - 1.0) / (2.0 * kd + 1.0) * scale;
  b.sin2_hi = std::tgamma(1.0 / km1) / km1 * scale;
  b.log_lo = (static_cast<double>(bits) + std::log2(b.c)) / km1;
  b.log_hi = b.log_lo + std::log2(std::exp(1.0)) / km1;
  return b;
}

HierCodebook make_hier_codebook(std::size_t k, int l_max, const RngSeed& seed,
                                std::uint64_t link_rx) {
  check_codebook_args(k, l_max);
  HierCodebook hcb;
  hcb.l_max = l_max;

  // Base draw and tree structure use disjoint substreams of the per-row
  // stream so either can be regenerated on its own.
  hcb.base = Codebook{};
  {
    hcb.base.k = k;
    hcb.base.bits = l_max;
    hcb.base.seed = seed;
    hcb.base.link_rx = link_rx;
    hcb.base.link_tx = 0;
    const std::size_t count = std::size_t{1} << l_max;
    GaussianSampler g(make_engine(seed, {stream_tag::hier_codebook, link_rx, 0}));
    hcb.base.vectors.reserve(count);
    hcb.base.embed.reserve(count * (2 * k - 1));
    for (std::size_t n = 0; n < count; ++n) {
      hcb.base.vectors.push_back(random_direction(g, k));
      append_embedding(hcb.base.embed, hcb.base.vectors.back());
    }
  }

  const std::size_t count = hcb.base.size();
  std::mt19937_64 eng = make_engine(seed, {stream_tag::hier_codebook, link_rx, 1});

  // Random recursive halving == a uniform shuffle onto the leaves of a full
  // binary tree; the level-l bin is then the slot's l-bit prefix.
  hcb.position.resize(count);
  std::iota(hcb.position.begin(), hcb.position.end(), 0u);
  for (std::size_t i = count - 1; i > 0; --i) {
    const std::size_t j = static_cast<std::size_t>(uniform_below(eng, i + 1));
    std::swap(hcb.position[i], hcb.position[j]);
  }
  std::vector<std::uint32_t> at_slot(count);
  for (std::size_t v = 0; v < count; ++v) at_slot[hcb.position[v]] = static_cast<std::uint32_t>(v);

  hcb.rep.resize(static_cast<std::size_t>(l_max) + 1);
  for (int l = 0; l < l_max; ++l) {
    const std::size_t bins = std::size_t{1} << l;
    const std::size_t bin_size = count >> l;
    hcb.rep[static_cast<std::size_t>(l)].resize(bins);
    for (std::size_t b = 0; b < bins; ++b) {
      const std::size_t off = static_cast<std::size_t>(uniform_below(eng, bin_size));
      hcb.rep[static_cast<std::size_t>(l)][b] = at_slot[b * bin_size + off];
    }
  }
  // Leaf bins represent themselves.
  hcb.rep[static_cast<std::size_t>(l_max)] = at_slot;
  return hcb;
}

HierQuantResult hier_quantize(const HierCodebook& hcb, const CVec& aligned, int level) {
  if (level < 0 || level > hcb.l_max) {
    throw std::invalid_argument("hier_quantize: level must be in [0, l_max]");
  }
  const QuantResult full = quantize_l2(hcb.base, aligned);

  HierQuantResult out;
  out.base_index = full.index;
  out.sign = full.sign;
  out.bin = hcb.position[full.index] >> (hcb.l_max - level);
  const std::size_t rep_idx = hcb.rep[static_cast<std::size_t>(level)][out.bin];
  out.vec = hcb.base.vectors[rep_idx];
  if (out.sign < 0) {
    for (cxd& e : out.vec) e = -e;
  }
  out.sin2 = sin2_real_angle(aligned, hcb.base.vectors[rep_idx]);
  return out;
}

// ---------------------------------------------------------------------------
// Codebook serialization
// ---------------------------------------------------------------------------

namespace {

json vectors_to_json(const std::vector<CVec>& vectors) {
  json arr = json::array();
  for (const CVec& v : vectors) {
    json jv = json::array();
    for (const cxd& e : v) jv.push_back(json::array({e.real(), e.imag()}));
    arr.push_back(std::move(jv));
  }
  return arr;
}

std::vector<CVec> vectors_from_json(const json& arr, std::size_t k) {
  std::vector<CVec> out;
  out.reserve(arr.size());
  for (const json& jv : arr) {
    if (!jv.is_array() || jv.size() != k) throw parse_error("codebook: bad vector length");
    CVec v;
    v.reserve(k);
    for (const json& je : jv) {
      if (!je.is_array() || je.size() != 2) throw parse_error("codebook: bad complex entry");
      v.emplace_back(je[0].get<double>(), je[1].get<double>());
    }
    if (std::abs(norm(v) - 1.0) > tol::unit_norm_loose ||
        std::abs(v[0].imag()) > tol::unit_norm_loose || v[0].real() < -tol::unit_norm_loose) {
      throw parse_error("codebook: vector is not an aligned unit direction");
    }
    out.push_back(std::move(v));
  }
  return out;
}

json codebook_header(const Codebook& cb, const char* type) {
  json j;
  j["type"] = type;
  j["version"] = kVersion;
  j["k"] = cb.k;
  j["bits"] = cb.bits;
  j["seed"] = {{"master_seed", cb.seed.master_seed}, {"stream_id", cb.seed.stream_id}};
  j["link"] = {cb.link_rx, cb.link_tx};
  return j;
}

void codebook_from_header(const json& j, Codebook& cb) {
  cb.k = j.at("k").get<std::size_t>();
  cb.bits = j.at("bits").get<int>();
  check_codebook_args(cb.k, cb.bits);
  cb.seed.master_seed = j.at("seed").at("master_seed").get<std::uint64_t>();
  cb.seed.stream_id = j.at("seed").at("stream_id").get<std::uint64_t>();
  cb.link_rx = j.at("link").at(0).get<std::uint64_t>();
  cb.link_tx = j.at("link").at(1).get<std::uint64_t>();
  cb.vectors = vectors_from_json(j.at("vectors"), cb.k);
  if (cb.vectors.size() != (std::size_t{1} << cb.bits)) {
    throw parse_error("codebook: vector count does not match bits");
  }
  cb.embed.clear();
  cb.embed.reserve(cb.vectors.size() * (2 * cb.k - 1));
  for (const CVec& v : cb.vectors) append_embedding(cb.embed, v);
}

}  // namespace

std::string codebook_to_json(const Codebook& cb) {
  json j = codebook_header(cb, "codebook");
  j["vectors"] = vectors_to_json(cb.vectors);
  return j.dump();
}

Codebook codebook_from_json(const std::string& text) {
  try {
    const json j = json::parse(text);
    if (j.at("type").get<std::string>() != "codebook") throw parse_error("codebook: wrong type");
    Codebook cb;
    codebook_from_header(j, cb);
    return cb;
  } catch (const json::exception& e) {
    throw parse_error(std::string("codebook: malformed JSON: ") + e.what());
  }
}

std::string hier_codebook_to_json(const HierCodebook& hcb) {
  json j = codebook_header(hcb.base, "hier-codebook");
  j["l_max"] = hcb.l_max;
  j["vectors"] = vectors_to_json(hcb.base.vectors);
  j["position"] = hcb.position;
  j["rep"] = hcb.rep;
  return j.dump();
}

HierCodebook hier_codebook_from_json(const std::string& text) {
  try {
    const json j = json::parse(text);
    if (j.at("type").get<std::string>() != "hier-codebook") {
      throw parse_error("hier-codebook: wrong type");
    }
    HierCodebook hcb;
    codebook_from_header(j, hcb.base);
    hcb.l_max = j.at("l_max").get<int>();
    if (hcb.l_max != hcb.base.bits) throw parse_error("hier-codebook: l_max mismatch");
    hcb.position = j.at("position").get<std::vector<std::uint32_t>>();
    hcb.rep = j.at("rep").get<std::vector<std::vector<std::uint32_t>>>();

    // structural validation: position is a permutation, reps live in their bin
    const std::size_t count = hcb.base.size();
    if (hcb.position.size() != count) throw parse_error("hier-codebook: bad position size");
    std::vector<bool> seen(count, false);
    for (std::uint32_t p : hcb.position) {
      if (p >= count || seen[p]) throw parse_error("hier-codebook: position not a permutation");
      seen[p] = true;
    }
    if (hcb.rep.size() != static_cast<std::size_t>(hcb.l_max) + 1) {
      throw parse_error("hier-codebook: bad rep level count");
    }
    for (int l = 0; l <= hcb.l_max; ++l) {
      const std::size_t bins = std::size_t{1} << l;
      const auto& level = hcb.rep[static_cast<std::size_t>(l)];
      if (level.size() != bins) throw parse_error("hier-codebook: bad rep row size");
      for (std::size_t b = 0; b < bins; ++b) {
        const std::uint32_t v = level[b];
        if (v >= count || (hcb.position[v] >> (hcb.l_max - l)) != b) {
          throw parse_error("hier-codebook: representative outside its bin");
        }
      }
    }
    return hcb;
  } catch (const json::exception& e) {
    throw parse_error(std::string("hier-codebook: malformed JSON: ") + e.what());
  }
}

// ---------------------------------------------------------------------------
// Statistical estimates and per-transmitter CSI
// ---------------------------------------------------------------------------

CVec statistical_estimate(const CVec& hnorm_row, double alpha, double p, const RngSeed& seed,
                          std::uint64_t link_rx, std::uint64_t link_tx) {
  if (hnorm_row.empty()) throw std::invalid_argument("statistical_estimate: empty row");
  // below unit power the error exponent P^-alpha grows instead of shrinking:
  // reject rather than return estimates noisier than an uninformed guess.
  // p == 1 is the benign boundary (unit noise variance for every alpha).
  if (p < 1.0) throw std::invalid_argument("statistical_estimate: p must be at least 1");
  if (std::isnan(alpha) || alpha < 0) {
    throw std::invalid_argument("statistical_estimate: alpha must be >= 0");
  }
  if (std::abs(norm(hnorm_row) - 1.0) > tol::unit_norm_loose) {
    throw std::invalid_argument("statistical_estimate: input must be unit-norm");
  }
  if (std::isinf(alpha)) return hnorm_row;

  const std::size_t k = hnorm_row.size();
  const double sigma = std::sqrt(std::pow(p, -std::min(alpha, 1.0)) / static_cast<double>(k));
  GaussianSampler g(make_engine(seed, {stream_tag::csi_noise, link_rx, link_tx}));
  CVec est(k);
  for (std::size_t t = 0; t < k; ++t) est[t] = hnorm_row[t] + sigma * g.complex_gaussian();
  const double n = norm(est);
  if (n == 0.0) throw numeric_error("statistical_estimate: degenerate zero estimate");
  for (cxd& e : est) e /= n;
  return phase_align(est);
}

const char* to_string(CsiModel m) {
  switch (m) {
    case CsiModel::statistical:
      return "statistical";
    case CsiModel::rvq:
      return "rvq";
    case CsiModel::hier_rvq:
      return "hier-rvq";
  }
  return "?";
}

std::optional<CsiModel> csi_model_from_string(const std::string& s) {
  if (s == "statistical") return CsiModel::statistical;
  if (s == "rvq") return CsiModel::rvq;
  if (s == "hier-rvq") return CsiModel::hier_rvq;
  return std::nullopt;
}

std::vector<TxCsi> build_tx_csi(const ChannelRealization& ch, const CsiScalingMatrix& alpha,
                                double p, CsiModel model, const BitMatrix* bits,
                                const RngSeed& seed) {
  const std::size_t k = ch.users();
  if (alpha.users() != k) throw std::invalid_argument("build_tx_csi: alpha dimension mismatch");
  if (bits && bits->k != k) throw std::invalid_argument("build_tx_csi: bit matrix mismatch");
  if (p <= 0) throw std::invalid_argument("build_tx_csi: p must be positive");

  auto link_bits = [&](std::size_t i, std::size_t j) {
    return bits ? bits->at(i, j) : bits_for_alpha(alpha.raw(i, j), k, p);
  };

  std::vector<TxCsi> out(k);
  for (std::size_t j = 0; j < k; ++j) {
    out[j].tx = j;
    out[j].rows = CMat(k, k);
  }

  for (std::size_t i = 0; i < k; ++i) {
    const CVec truth = ch.hnorm.row(i);

    if (model == CsiModel::hier_rvq) {
      // One shared nested codebook per user row; transmitter j truncates to
      // its own budget.
      int l_max = 0;
      bool any_quantized = false;
      for (std::size_t j = 0; j < k; ++j) {
        if (alpha.is_perfect(i, j)) continue;
        any_quantized = true;
        l_max = std::max(l_max, link_bits(i, j));
      }
      HierCodebook hcb;
      if (any_quantized) hcb = make_hier_codebook(k, l_max, seed, i);
      for (std::size_t j = 0; j < k; ++j) {
        if (alpha.is_perfect(i, j)) {
          out[j].rows.set_row(i, truth);
        } else {
          out[j].rows.set_row(i, hier_quantize(hcb, truth, link_bits(i, j)).vec);
        }
      }
      continue;
    }

    for (std::size_t j = 0; j < k; ++j) {
      if (alpha.is_perfect(i, j)) {
        out[j].rows.set_row(i, truth);
      } else if (model == CsiModel::statistical) {
        out[j].rows.set_row(i, statistical_estimate(truth, alpha.raw(i, j), p, seed, i, j));
      } else {
        const Codebook cb = make_codebook(k, link_bits(i, j), seed, i, j);
        out[j].rows.set_row(i, quantize_l2(cb, truth).vec);
      }
    }
  }
  return out;
}

}  // namespace dcsi
