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

#include "dcsimimo/ratesim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iomanip>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "dcsimimo/numerics.hpp"
#include "dcsimimo/rng.hpp"

namespace dcsi {

namespace {

using nlohmann::json;

// trials per parallel batch; batches are buffered per trial and reduced in
// trial order so thread count never changes a digit
constexpr std::size_t kChunk = 1024;

struct SchemeSpec {
  enum class Kind { perfect_zf, czf, rzf, bzf, apzf, czf_hq, apzf_hq };
  Kind kind = Kind::czf;
  ApzfPower power = ApzfPower::dof_optimal;
  int power_bits = 3;
};

SchemeSpec parse_scheme(const std::string& s, int default_bits) {
  using Kind = SchemeSpec::Kind;
  SchemeSpec sp;
  sp.power_bits = default_bits;
  if (s == "perfect-zf") {
    sp.kind = Kind::perfect_zf;
  } else if (s == "czf") {
    sp.kind = Kind::czf;
  } else if (s == "rzf") {
    sp.kind = Kind::rzf;
  } else if (s == "bzf") {
    sp.kind = Kind::bzf;
  } else if (s == "apzf") {
    sp.kind = Kind::apzf;
    sp.power = ApzfPower::dof_optimal;
  } else if (s == "apzf-heuristic") {
    sp.kind = Kind::apzf;
    sp.power = ApzfPower::heuristic;
  } else if (s == "apzf-qpower" || s.rfind("apzf-qpower:", 0) == 0) {
    sp.kind = Kind::apzf;
    sp.power = ApzfPower::quantized;
    if (s.size() > 12) {
      std::size_t pos = 0;
      int b = 0;
      try {
        b = std::stoi(s.substr(12), &pos);
      } catch (const std::exception&) {
        throw std::invalid_argument("scheme: bad bit count in '" + s + "'");
      }
      if (pos != s.size() - 12) throw std::invalid_argument("scheme: bad bit count in '" + s + "'");
      sp.power_bits = b;
    }
    if (sp.power_bits < 1 || sp.power_bits > 62) {
      throw std::invalid_argument("scheme: power bits in [1, 62]");
    }
  } else if (s == "czf-hq") {
    sp.kind = Kind::czf_hq;
  } else if (s == "apzf-hq") {
    sp.kind = Kind::apzf_hq;
  } else {
    throw std::invalid_argument("scheme: unknown scheme '" + s + "'");
  }
  return sp;
}

double db_to_power(double db) { return std::pow(10.0, db / 10.0); }

std::string fmt_g17(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

void validate_config(const SimConfig& cfg) {
  const std::size_t k = cfg.users();
  if (k < 2 || k > kMaxUsers) {
    throw std::invalid_argument("SimConfig: users in [2, " + std::to_string(kMaxUsers) + "]");
  }
  if (cfg.trials < 1) throw std::invalid_argument("SimConfig: trials >= 1");
  if (cfg.snr_db.empty()) throw std::invalid_argument("SimConfig: snr grid must not be empty");
  for (std::size_t n = 0; n < cfg.snr_db.size(); ++n) {
    if (!std::isfinite(cfg.snr_db[n])) throw std::invalid_argument("SimConfig: snr must be finite");
    if (n > 0 && !(cfg.snr_db[n] > cfg.snr_db[n - 1])) {
      throw std::invalid_argument("SimConfig: snr grid must be strictly increasing");
    }
  }
  (void)parse_scheme(cfg.scheme, cfg.power_bits);
  if (!cfg.beacon.empty() && cfg.beacon.size() != k) {
    throw std::invalid_argument("SimConfig: beacon length must match users");
  }
  if (!cfg.passive.empty()) {
    if (cfg.passive.size() != k) {
      throw std::invalid_argument("SimConfig: passive set size must match users");
    }
    for (std::size_t n : cfg.passive) {
      if (n >= k) throw std::invalid_argument("SimConfig: passive index out of range");
    }
  }
  if (cfg.bits) {
    if (cfg.bits->k != k) throw std::invalid_argument("SimConfig: bit matrix size must match users");
    for (int b : cfg.bits->bits) {
      if (b < 0) throw std::invalid_argument("SimConfig: bit budgets must be >= 0");
      if (b > kMaxCodebookBits) {
        throw resource_error("SimConfig: bit budget beyond the codebook cap");
      }
    }
  }
  if (cfg.power_bits < 1 || cfg.power_bits > 62) {
    throw std::invalid_argument("SimConfig: power_bits in [1, 62]");
  }
}

std::vector<TxCsi> perfect_csi(const ChannelRealization& ch) {
  std::vector<TxCsi> out(ch.users());
  for (std::size_t j = 0; j < ch.users(); ++j) {
    out[j].tx = j;
    out[j].rows = ch.hnorm;
  }
  return out;
}

// |h_i^H t_l|^2 for every (user i, stream l) pair
std::vector<double> cross_gains(const ChannelRealization& ch, const PrecoderMatrix& t) {
  const std::size_t k = ch.users();
  if (t.coef.rows() != k || t.coef.cols() != k) {
    throw std::invalid_argument("rates: precoder dimensions must match the channel");
  }
  std::vector<double> g(k * k, 0.0);
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t l = 0; l < k; ++l) {
      cxd acc(0.0, 0.0);
      for (std::size_t a = 0; a < k; ++a) acc += std::conj(ch.h(i, a)) * t.coef(a, l);
      g[i * k + l] = std::norm(acc);
    }
  }
  return g;
}

struct Acc {
  double mean = 0.0;
  double m2 = 0.0;
  std::size_t n = 0;

  void add(double x) {
    ++n;
    const double d = x - mean;
    mean += d / static_cast<double>(n);
    m2 += d * (x - mean);
  }

  double stderr_mean() const {
    if (n < 2) return 0.0;
    return std::sqrt(m2 / (static_cast<double>(n - 1) * static_cast<double>(n)));
  }
};

unsigned resolve_threads(unsigned t) {
  if (t != 0) return t;
  const unsigned h = std::thread::hardware_concurrency();
  return h != 0 ? h : 1;
}

// one trial's rates/leakage at every grid point, laid out per point as
// [rate_1..K, leakage_1..K, sum]
void run_trial(const SimConfig& cfg, std::size_t trial, const std::vector<double>& powers,
               bool needs_csi, std::vector<double>& out) {
  const std::size_t k = cfg.users();
  const std::size_t width = 2 * k + 1;
  const RngSeed ts{cfg.master_seed, static_cast<std::uint64_t>(trial)};
  const ChannelRealization ch = sample_channel(k, ts);
  for (std::size_t n = 0; n < powers.size(); ++n) {
    std::vector<TxCsi> csi;
    if (needs_csi) csi = trial_csi(cfg, ch, powers[n], trial);
    const PrecoderMatrix t = scheme_precoder(cfg, ch, csi, powers[n]);
    const std::vector<double> rates = instantaneous_rates(ch, t);
    const std::vector<double> leak = instantaneous_leakage(ch, t);
    double* o = out.data() + n * width;
    double sum = 0.0;
    for (std::size_t u = 0; u < k; ++u) {
      o[u] = rates[u];
      o[k + u] = leak[u];
      sum += rates[u];
    }
    o[2 * k] = sum;
  }
}

std::uint64_t fnv1a64(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace

std::vector<double> instantaneous_rates(const ChannelRealization& ch, const PrecoderMatrix& t) {
  const std::size_t k = ch.users();
  const std::vector<double> g = cross_gains(ch, t);
  std::vector<double> rates(k, 0.0);
  for (std::size_t i = 0; i < k; ++i) {
    double interf = 0.0;
    for (std::size_t l = 0; l < k; ++l) {
      if (l != i) interf += g[i * k + l];
    }
    rates[i] = std::log2(1.0 + g[i * k + i] / (1.0 + interf));
  }
  return rates;
}

std::vector<double> instantaneous_leakage(const ChannelRealization& ch, const PrecoderMatrix& t) {
  const std::size_t k = ch.users();
  const std::vector<double> g = cross_gains(ch, t);
  std::vector<double> leak(k, 0.0);
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t l = 0; l < k; ++l) {
      if (l != i) leak[i] += g[i * k + l];
    }
  }
  return leak;
}

std::vector<TxCsi> trial_csi(const SimConfig& cfg, const ChannelRealization& ch, double p,
                             std::size_t trial) {
  const RngSeed ts{cfg.master_seed, static_cast<std::uint64_t>(trial)};
  return build_tx_csi(ch, cfg.alpha, p, cfg.model, cfg.bits ? &*cfg.bits : nullptr, ts);
}

PrecoderMatrix scheme_precoder(const SimConfig& cfg, const ChannelRealization& ch,
                               const std::vector<TxCsi>& csi, double p) {
  using Kind = SchemeSpec::Kind;
  const std::size_t k = cfg.users();
  if (ch.users() != k) throw std::invalid_argument("scheme_precoder: channel size mismatch");
  const SchemeSpec sp = parse_scheme(cfg.scheme, cfg.power_bits);

  std::vector<TxCsi> use;
  if (sp.kind == Kind::perfect_zf) {
    use = perfect_csi(ch);
  } else {
    if (csi.size() != k) throw std::invalid_argument("scheme_precoder: csi size mismatch");
    use = csi;
  }
  if (sp.kind == Kind::czf_hq) use = apply_hq_common_csi(use, cfg.alpha, HqMode::czf);

  PassiveSet s;
  if (sp.kind == Kind::apzf || sp.kind == Kind::apzf_hq) {
    s = cfg.passive.empty() ? default_passive_set(cfg.alpha, sp.kind == Kind::apzf_hq)
                            : cfg.passive;
  }

  std::vector<CMat> local(k, CMat(k, k));
  switch (sp.kind) {
    case Kind::perfect_zf:
    case Kind::czf:
    case Kind::czf_hq:
      for (std::size_t j = 0; j < k; ++j) {
        for (std::size_t i = 0; i < k; ++i) {
          const CVec beam = czf_local(use[j], i, p);
          for (std::size_t a = 0; a < k; ++a) local[j](a, i) = beam[a];
        }
      }
      break;
    case Kind::rzf:
      for (std::size_t j = 0; j < k; ++j) {
        for (std::size_t i = 0; i < k; ++i) {
          const CVec beam = rzf_local(use[j], cfg.alpha, i, p);
          for (std::size_t a = 0; a < k; ++a) local[j](a, i) = beam[a];
        }
      }
      break;
    case Kind::bzf: {
      const CVec* beacon = cfg.beacon.empty() ? nullptr : &cfg.beacon;
      for (std::size_t j = 0; j < k; ++j) {
        for (std::size_t i = 0; i < k; ++i) {
          const CVec beam = bzf_local(use[j], i, p, beacon);
          for (std::size_t a = 0; a < k; ++a) local[j](a, i) = beam[a];
        }
      }
      break;
    }
    case Kind::apzf: {
      ApzfOptions opt;
      opt.power = sp.power;
      opt.power_bits = sp.power_bits;
      std::vector<double> uhat(k, -1.0);
      if (sp.power == ApzfPower::quantized) {
        // the best-informed active transmitter shares its quantized power
        // statistic; every transmitter then scales from the same value
        for (std::size_t i = 0; i < k; ++i) {
          const std::size_t lead = apzf_best_informed(cfg.alpha, i, s);
          const double rho = apzf_rho(use[lead], i, s);
          uhat[i] = quantize_unit_interval(rho / (1.0 + rho), sp.power_bits);
        }
      }
      for (std::size_t j = 0; j < k; ++j) {
        for (std::size_t i = 0; i < k; ++i) {
          ApzfOptions o = opt;
          o.shared_uhat = uhat[i];
          local[j](j, i) = apzf_local(use[j], i, s, p, o);
        }
      }
      break;
    }
    case Kind::apzf_hq: {
      // active transmitters solve on the shared coarsest-active estimate; the
      // passive transmitter only needs its own rows for the power back-off
      ApzfOptions opt;
      opt.power = ApzfPower::heuristic;
      for (std::size_t i = 0; i < k; ++i) {
        const CMat common = hq_common_rows_for_stream(use, cfg.alpha, i, s);
        for (std::size_t j = 0; j < k; ++j) {
          if (j == s[i]) {
            local[j](j, i) = apzf_local(use[j], i, s, p, opt);
          } else {
            TxCsi shared;
            shared.tx = j;
            shared.rows = common;
            local[j](j, i) = apzf_local(shared, i, s, p, opt);
          }
        }
      }
      break;
    }
  }
  return assemble_distributed(local);
}

RateCurve ergodic_curve(const SimConfig& cfg) {
  validate_config(cfg);
  const std::size_t k = cfg.users();
  const std::size_t npts = cfg.snr_db.size();
  const std::size_t width = 2 * k + 1;
  const bool needs_csi = cfg.scheme != "perfect-zf";

  std::vector<double> powers(npts);
  for (std::size_t n = 0; n < npts; ++n) powers[n] = db_to_power(cfg.snr_db[n]);

  std::vector<std::vector<Acc>> rate_acc(k, std::vector<Acc>(npts));
  std::vector<std::vector<Acc>> leak_acc(k, std::vector<Acc>(npts));
  std::vector<Acc> sum_acc(npts);

  const unsigned want = resolve_threads(cfg.threads);
  std::vector<std::vector<double>> buf;
  for (std::size_t start = 0; start < cfg.trials; start += kChunk) {
    const std::size_t m = std::min(kChunk, cfg.trials - start);
    buf.assign(m, std::vector<double>(npts * width, 0.0));
    const unsigned tt = static_cast<unsigned>(std::min<std::size_t>(want, m));
    if (tt <= 1) {
      for (std::size_t r = 0; r < m; ++r) run_trial(cfg, start + r, powers, needs_csi, buf[r]);
    } else {
      std::vector<std::thread> pool;
      std::vector<std::exception_ptr> errs(tt);
      pool.reserve(tt);
      for (unsigned w = 0; w < tt; ++w) {
        pool.emplace_back([&, w] {
          try {
            for (std::size_t r = w; r < m; r += tt) {
              run_trial(cfg, start + r, powers, needs_csi, buf[r]);
            }
          } catch (...) {
            errs[w] = std::current_exception();
          }
        });
      }
      for (std::thread& th : pool) th.join();
      for (const std::exception_ptr& e : errs) {
        if (e) std::rethrow_exception(e);
      }
    }
    for (std::size_t r = 0; r < m; ++r) {
      const double* o = buf[r].data();
      for (std::size_t n = 0; n < npts; ++n) {
        for (std::size_t u = 0; u < k; ++u) {
          rate_acc[u][n].add(o[n * width + u]);
          leak_acc[u][n].add(o[n * width + k + u]);
        }
        sum_acc[n].add(o[n * width + 2 * k]);
      }
    }
  }

  RateCurve curve;
  curve.snr_db = cfg.snr_db;
  curve.per_user_rate.assign(k, std::vector<double>(npts, 0.0));
  curve.per_user_stderr.assign(k, std::vector<double>(npts, 0.0));
  curve.per_user_leakage.assign(k, std::vector<double>(npts, 0.0));
  curve.sum_rate.assign(npts, 0.0);
  curve.sum_stderr.assign(npts, 0.0);
  for (std::size_t n = 0; n < npts; ++n) {
    for (std::size_t u = 0; u < k; ++u) {
      curve.per_user_rate[u][n] = rate_acc[u][n].mean;
      curve.per_user_stderr[u][n] = rate_acc[u][n].stderr_mean();
      curve.per_user_leakage[u][n] = leak_acc[u][n].mean;
    }
    curve.sum_rate[n] = sum_acc[n].mean;
    curve.sum_stderr[n] = sum_acc[n].stderr_mean();
  }
  curve.mc_trials = cfg.trials;
  curve.master_seed = cfg.master_seed;
  curve.scheme = cfg.scheme;
  curve.model = to_string(cfg.model);
  curve.config_hash = sim_config_hash(cfg);
  return curve;
}

SlopeFit dof_slope(const RateCurve& curve, double snr_lo_db, double snr_hi_db) {
  if (!(snr_lo_db <= snr_hi_db)) throw std::invalid_argument("dof_slope: empty window");
  std::vector<std::size_t> idx;
  for (std::size_t n = 0; n < curve.points(); ++n) {
    if (curve.snr_db[n] >= snr_lo_db - 1e-9 && curve.snr_db[n] <= snr_hi_db + 1e-9) {
      idx.push_back(n);
    }
  }
  if (idx.size() < 2) {
    throw std::invalid_argument("dof_slope: window must contain at least two grid points");
  }

  const double to_log2p = std::log2(10.0) / 10.0;
  std::vector<double> x(idx.size());
  for (std::size_t m = 0; m < idx.size(); ++m) x[m] = curve.snr_db[idx[m]] * to_log2p;

  auto fit = [&](const std::vector<double>& series) {
    const std::size_t n = idx.size();
    double xb = 0.0;
    double yb = 0.0;
    for (std::size_t m = 0; m < n; ++m) {
      xb += x[m];
      yb += series[idx[m]];
    }
    xb /= static_cast<double>(n);
    yb /= static_cast<double>(n);
    double sxx = 0.0;
    double sxy = 0.0;
    for (std::size_t m = 0; m < n; ++m) {
      sxx += (x[m] - xb) * (x[m] - xb);
      sxy += (x[m] - xb) * (series[idx[m]] - yb);
    }
    const double slope = sxy / sxx;
    double se = 0.0;
    if (n > 2) {
      double ssr = 0.0;
      for (std::size_t m = 0; m < n; ++m) {
        const double fitv = yb + slope * (x[m] - xb);
        const double r = series[idx[m]] - fitv;
        ssr += r * r;
      }
      se = std::sqrt(ssr / static_cast<double>(n - 2) / sxx);
    }
    return std::pair<double, double>(slope, se);
  };

  SlopeFit out;
  for (std::size_t u = 0; u < curve.users(); ++u) {
    const auto [sl, se] = fit(curve.per_user_rate[u]);
    out.per_user.push_back(sl);
    out.per_user_stderr.push_back(se);
  }
  const auto [sl, se] = fit(curve.sum_rate);
  out.sum = sl;
  out.sum_stderr = se;
  return out;
}

std::string sim_config_to_json(const SimConfig& cfg) {
  json j;
  j["alpha"] = json::parse(csi_scaling_to_json(cfg.alpha));
  if (cfg.bits) {
    json rows = json::array();
    for (std::size_t i = 0; i < cfg.bits->k; ++i) {
      json row = json::array();
      for (std::size_t t = 0; t < cfg.bits->k; ++t) row.push_back(cfg.bits->at(i, t));
      rows.push_back(row);
    }
    j["bits"] = rows;
  }
  j["model"] = to_string(cfg.model);
  j["scheme"] = cfg.scheme;
  j["snr_db"] = cfg.snr_db;
  j["trials"] = cfg.trials;
  j["master_seed"] = cfg.master_seed;
  j["threads"] = cfg.threads;
  j["power_bits"] = cfg.power_bits;
  if (!cfg.beacon.empty()) {
    json b = json::array();
    for (const cxd& c : cfg.beacon) b.push_back(json::array({c.real(), c.imag()}));
    j["beacon"] = b;
  }
  if (!cfg.passive.empty()) j["passive"] = cfg.passive;
  return j.dump();
}

SimConfig sim_config_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw parse_error(std::string("config: ") + e.what());
  }
  try {
    if (!j.is_object()) throw parse_error("config: expected a JSON object");
    if (!j.contains("alpha")) throw parse_error("config: missing alpha");
    SimConfig cfg(csi_scaling_from_json(j.at("alpha").dump()));
    if (j.contains("bits")) {
      const json& rows = j.at("bits");
      if (!rows.is_array() || rows.size() != cfg.users()) {
        throw parse_error("config: bits must match alpha's shape");
      }
      BitMatrix bm;
      bm.k = cfg.users();
      for (const auto& row : rows) {
        if (!row.is_array() || row.size() != cfg.users()) {
          throw parse_error("config: bits must match alpha's shape");
        }
        for (const auto& cell : row) bm.bits.push_back(cell.get<int>());
      }
      cfg.bits = std::move(bm);
    }
    if (j.contains("model")) {
      const auto m = csi_model_from_string(j.at("model").get<std::string>());
      if (!m) throw parse_error("config: unknown model '" + j.at("model").get<std::string>() + "'");
      cfg.model = *m;
    }
    if (j.contains("scheme")) cfg.scheme = j.at("scheme").get<std::string>();
    if (j.contains("snr_db")) cfg.snr_db = j.at("snr_db").get<std::vector<double>>();
    if (j.contains("trials")) cfg.trials = j.at("trials").get<std::size_t>();
    if (j.contains("master_seed")) cfg.master_seed = j.at("master_seed").get<std::uint64_t>();
    if (j.contains("threads")) cfg.threads = j.at("threads").get<unsigned>();
    if (j.contains("power_bits")) cfg.power_bits = j.at("power_bits").get<int>();
    if (j.contains("beacon")) {
      for (const auto& cell : j.at("beacon")) {
        if (!cell.is_array() || cell.size() != 2) {
          throw parse_error("config: beacon entries are [re, im] pairs");
        }
        cfg.beacon.emplace_back(cell[0].get<double>(), cell[1].get<double>());
      }
    }
    if (j.contains("passive")) cfg.passive = j.at("passive").get<PassiveSet>();
    return cfg;
  } catch (const json::exception& e) {
    throw parse_error(std::string("config: ") + e.what());
  }
}

std::string sim_config_hash(const SimConfig& cfg) {
  const std::uint64_t h = fnv1a64(sim_config_to_json(cfg));
  char hex[17];
  std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(h));
  return std::string(hex);
}

std::string rate_curve_to_csv(const RateCurve& curve) {
  const std::size_t k = curve.users();
  std::ostringstream os;
  os << "# dcsimimo " << kVersion << " rate curve\n";
  os << "# scheme=" << curve.scheme << " model=" << curve.model << " trials=" << curve.mc_trials
     << " master_seed=" << curve.master_seed << " config_hash=" << curve.config_hash << "\n";
  os << "snr_db";
  for (std::size_t u = 1; u <= k; ++u) os << ",rate_user_" << u;
  os << ",sum_rate";
  for (std::size_t u = 1; u <= k; ++u) os << ",leakage_user_" << u;
  for (std::size_t u = 1; u <= k; ++u) os << ",stderr_user_" << u;
  os << ",stderr_sum\n";
  for (std::size_t n = 0; n < curve.points(); ++n) {
    os << fmt_g17(curve.snr_db[n]);
    for (std::size_t u = 0; u < k; ++u) os << ',' << fmt_g17(curve.per_user_rate[u][n]);
    os << ',' << fmt_g17(curve.sum_rate[n]);
    for (std::size_t u = 0; u < k; ++u) os << ',' << fmt_g17(curve.per_user_leakage[u][n]);
    for (std::size_t u = 0; u < k; ++u) os << ',' << fmt_g17(curve.per_user_stderr[u][n]);
    os << ',' << fmt_g17(curve.sum_stderr[n]) << '\n';
  }
  return os.str();
}

QuantCheckReport quantcheck(std::size_t k, int bits, std::size_t trials,
                            std::uint64_t master_seed, unsigned threads) {
  if (k < 2 || k > kMaxUsers) throw std::invalid_argument("quantcheck: k must be in [2, 16]");
  if (trials < 1) throw std::invalid_argument("quantcheck: trials >= 1");
  const QuantBounds bounds = rvq_distortion_bounds(k, bits);

  // one fresh (direction, codebook) pair per trial on disjoint substreams;
  // buffered per trial and reduced in order, same contract as ergodic_curve
  auto one_trial = [&](std::size_t t, double* out) {
    const RngSeed ts{master_seed, static_cast<std::uint64_t>(t)};
    GaussianSampler g(make_engine(ts, {stream_tag::quantcheck}));
    CVec dir(k);
    for (std::size_t e = 0; e < k; ++e) dir[e] = g.complex_gaussian();
    const double n = norm(dir);
    if (n == 0.0) throw numeric_error("quantcheck: degenerate direction draw");
    for (cxd& e : dir) e /= n;
    dir = phase_align(dir);
    const Codebook cb = make_codebook(k, bits, ts);
    const QuantResult q = quantize_l2(cb, dir);
    out[0] = q.sin2;
    out[1] = -std::log2(std::max(q.sin2, 1e-300));
  };

  Acc sin2_acc;
  Acc log_acc;
  const unsigned want = resolve_threads(threads);
  std::vector<std::vector<double>> buf;
  for (std::size_t start = 0; start < trials; start += kChunk) {
    const std::size_t m = std::min(kChunk, trials - start);
    buf.assign(m, std::vector<double>(2, 0.0));
    const unsigned tt = static_cast<unsigned>(std::min<std::size_t>(want, m));
    if (tt <= 1) {
      for (std::size_t r = 0; r < m; ++r) one_trial(start + r, buf[r].data());
    } else {
      std::vector<std::thread> pool;
      std::vector<std::exception_ptr> errs(tt);
      pool.reserve(tt);
      for (unsigned w = 0; w < tt; ++w) {
        pool.emplace_back([&, w] {
          try {
            for (std::size_t r = w; r < m; r += tt) one_trial(start + r, buf[r].data());
          } catch (...) {
            errs[w] = std::current_exception();
          }
        });
      }
      for (std::thread& th : pool) th.join();
      for (const std::exception_ptr& e : errs) {
        if (e) std::rethrow_exception(e);
      }
    }
    for (std::size_t r = 0; r < m; ++r) {
      sin2_acc.add(buf[r][0]);
      log_acc.add(buf[r][1]);
    }
  }

  QuantCheckReport rep;
  rep.k = k;
  rep.bits = bits;
  rep.trials = trials;
  rep.master_seed = master_seed;
  rep.mean_sin2 = sin2_acc.mean;
  rep.mean_neglog2 = log_acc.mean;
  rep.sin2_lo = bounds.sin2_lo;
  rep.sin2_hi = bounds.sin2_hi;
  rep.log_lo = bounds.log_lo;
  rep.log_hi = bounds.log_hi;
  rep.bounds_apply = bits > 0;
  if (rep.bounds_apply) {
    rep.sin2_pass = rep.mean_sin2 >= 0.95 * rep.sin2_lo && rep.mean_sin2 <= 1.05 * rep.sin2_hi;
    rep.log_pass = rep.mean_neglog2 >= rep.log_lo - 0.2 && rep.mean_neglog2 <= rep.log_hi + 0.2;
  } else {
    rep.sin2_pass = true;
    rep.log_pass = true;
  }
  return rep;
}

std::string quantcheck_to_json(const QuantCheckReport& r) {
  json j;
  j["k"] = r.k;
  j["bits"] = r.bits;
  j["trials"] = r.trials;
  j["master_seed"] = r.master_seed;
  j["mean_sin2"] = r.mean_sin2;
  j["mean_neglog2"] = r.mean_neglog2;
  j["sin2_lo"] = r.sin2_lo;
  j["sin2_hi"] = r.sin2_hi;
  j["log_lo"] = r.log_lo;
  j["log_hi"] = r.log_hi;
  j["bounds_apply"] = r.bounds_apply;
  j["sin2_pass"] = r.sin2_pass;
  j["log_pass"] = r.log_pass;
  return j.dump();
}

std::string rate_curve_to_json(const RateCurve& curve) {
  json j;
  j["snr_db"] = curve.snr_db;
  j["per_user_rate"] = curve.per_user_rate;
  j["per_user_stderr"] = curve.per_user_stderr;
  j["per_user_leakage"] = curve.per_user_leakage;
  j["sum_rate"] = curve.sum_rate;
  j["sum_stderr"] = curve.sum_stderr;
  j["mc_trials"] = curve.mc_trials;
  j["master_seed"] = curve.master_seed;
  j["scheme"] = curve.scheme;
  j["model"] = curve.model;
  j["config_hash"] = curve.config_hash;
  return j.dump();
}

}  // namespace dcsi
