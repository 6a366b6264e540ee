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

// Experiment driver. Talks to the simulation library exclusively through its
// C interface; all output files are written only after every computation has
// succeeded, so failed runs never leave partial results behind.
//
// Exit codes: 0 success, 2 usage or parse error, 3 resource cap exceeded,
// 4 numerical degeneracy.

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include <dcsimimo.h>

namespace {

using nlohmann::json;

// scoped ownership of strings handed out by the library
struct CStr {
  char* p = nullptr;
  ~CStr() { dcsi_string_free(p); }
  std::string str() const { return p ? std::string(p) : std::string(); }
};

struct AlphaHandle {
  dcsi_alpha* p = nullptr;
  ~AlphaHandle() { dcsi_alpha_free(p); }
};

struct CurveHandle {
  dcsi_curve* p = nullptr;
  ~CurveHandle() { dcsi_curve_free(p); }
};

int status_exit(dcsi_status st) {
  switch (st) {
    case DCSI_OK:
      return 0;
    case DCSI_ERR_INVALID:
    case DCSI_ERR_PARSE:
      return 2;
    case DCSI_ERR_RESOURCE:
    case DCSI_ERR_NOMEM:
      return 3;
    case DCSI_ERR_NUMERIC:
      return 4;
  }
  return 4;
}

int report_failure(dcsi_status st) {
  std::fprintf(stderr, "dcsi: error: %s\n", dcsi_last_error());
  return status_exit(st);
}

int usage_error(const std::string& msg) {
  std::fprintf(stderr, "dcsi: error: %s\n", msg.c_str());
  return 2;
}

// "start:step:stop" (inclusive stop within half a step)
std::vector<double> parse_grid(const std::string& text) {
  double a = 0.0;
  double s = 0.0;
  double b = 0.0;
  char tail = '\0';
  if (std::sscanf(text.c_str(), "%lf:%lf:%lf%c", &a, &s, &b, &tail) != 3) {
    throw std::invalid_argument("grid must be start:step:stop, got '" + text + "'");
  }
  if (!(s > 0.0)) throw std::invalid_argument("grid step must be positive");
  if (b < a) throw std::invalid_argument("grid stop must be >= start");
  std::vector<double> g;
  const std::size_t n = static_cast<std::size_t>(std::floor((b - a) / s + 0.5 * 1e-6)) + 1;
  for (std::size_t i = 0; i < n; ++i) {
    const double v = a + static_cast<double>(i) * s;
    if (v > b + 1e-9) break;
    g.push_back(v);
  }
  return g;
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : text) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> out;
  for (const std::string& tok : split(text, ',')) {
    std::size_t pos = 0;
    const int v = std::stoi(tok, &pos);
    if (pos != tok.size()) throw std::invalid_argument("bad integer '" + tok + "'");
    out.push_back(v);
  }
  return out;
}

// "6,3;3,6" -> [[6,3],[3,6]], validated square and non-negative
json bits_matrix_json(const std::string& text) {
  json rows = json::array();
  const std::vector<std::string> rtoks = split(text, ';');
  for (const std::string& r : rtoks) {
    json row = json::array();
    for (int v : parse_int_list(r)) {
      if (v < 0) throw std::invalid_argument("bit budgets must be >= 0");
      row.push_back(v);
    }
    rows.push_back(row);
  }
  for (const auto& row : rows) {
    if (row.size() != rows.size()) throw std::invalid_argument("bit matrix must be square");
  }
  return rows;
}

std::uint64_t default_seed() {
  const char* env = std::getenv("DCSI_SEED");
  if (!env || !*env) return 1;
  char* end = nullptr;
  const unsigned long long v = std::strtoull(env, &end, 10);
  if (!end || *end != '\0') {
    throw std::invalid_argument(std::string("DCSI_SEED is not an integer: '") + env + "'");
  }
  return static_cast<std::uint64_t>(v);
}

bool write_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) return false;
  f << content;
  f.flush();
  if (!f) {
    std::remove(path.c_str());
    return false;
  }
  return true;
}

std::string sanitize_scheme(std::string s) {
  for (char& c : s) {
    if (c == ':') c = '-';
  }
  return s;
}

std::string strip_csv_ext(const std::string& path) {
  if (path.size() > 4 && path.compare(path.size() - 4, 4, ".csv") == 0) {
    return path.substr(0, path.size() - 4);
  }
  return path;
}

std::string fmt_num(double v, int digits = 12) {
  std::ostringstream os;
  os << std::setprecision(digits) << v;
  return os.str();
}

// ---------------------------------------------------------------------------
// rate
// ---------------------------------------------------------------------------

struct RateOpts {
  std::size_t k = 0;
  std::string alpha;
  std::string bits;
  std::string model = "statistical";
  std::string schemes = "czf";
  std::string snr = "0:10:80";
  std::size_t trials = 2000;
  std::uint64_t seed = 1;
  unsigned threads = 1;
  int power_bits = 3;
  std::string config_path;
  std::string out;
};

// builds the config from flags, lets an explicit config file take precedence,
// runs one curve per scheme, then emits everything
int run_rate(const RateOpts& o) {
  json cfg;
  std::size_t k = o.k;

  json bits;
  if (!o.bits.empty()) {
    try {
      bits = bits_matrix_json(o.bits);
    } catch (const std::exception& e) {
      return usage_error(e.what());
    }
    if (k == 0) k = bits.size();
    if (k != bits.size()) return usage_error("--k does not match --bits");
  }

  if (!o.alpha.empty()) {
    AlphaHandle a;
    dcsi_status st = dcsi_alpha_parse(o.alpha.c_str(), &a.p);
    if (st != DCSI_OK) return report_failure(st);
    std::size_t users = 0;
    dcsi_alpha_users(a.p, &users);
    if (k == 0) k = users;
    if (k != users) return usage_error("--k does not match --alpha");
    CStr aj;
    st = dcsi_alpha_json(a.p, &aj.p);
    if (st != DCSI_OK) return report_failure(st);
    cfg["alpha"] = json::parse(aj.str());
  } else if (k > 0) {
    // bit-budget-only runs: the exponents of a fixed budget vanish at high
    // power, zero is their faithful stand-in
    json rows = json::array();
    for (std::size_t i = 0; i < k; ++i) rows.push_back(std::vector<double>(k, 0.0));
    cfg["alpha"] = rows;
  } else if (o.config_path.empty()) {
    return usage_error("rate needs --alpha, --bits with --k, or --config");
  }

  if (!bits.empty()) cfg["bits"] = bits;
  cfg["model"] = o.model;
  try {
    cfg["snr_db"] = parse_grid(o.snr);
  } catch (const std::exception& e) {
    return usage_error(e.what());
  }
  cfg["trials"] = o.trials;
  cfg["master_seed"] = o.seed;
  cfg["threads"] = o.threads;
  cfg["power_bits"] = o.power_bits;

  std::vector<std::string> schemes = split(o.schemes, ',');

  if (!o.config_path.empty()) {
    std::ifstream f(o.config_path, std::ios::binary);
    if (!f) return usage_error("cannot read config file '" + o.config_path + "'");
    std::stringstream ss;
    ss << f.rdbuf();
    json file;
    try {
      file = json::parse(ss.str());
    } catch (const json::exception& e) {
      return usage_error(std::string("config file: ") + e.what());
    }
    if (!file.is_object()) return usage_error("config file must hold a JSON object");
    for (const auto& item : file.items()) cfg[item.key()] = item.value();
    if (file.contains("scheme")) schemes = {file.at("scheme").get<std::string>()};
  }

  if (schemes.empty()) return usage_error("no schemes given");

  // run everything before touching the filesystem
  std::vector<std::string> csvs(schemes.size());
  std::vector<std::string> jsons(schemes.size());
  for (std::size_t i = 0; i < schemes.size(); ++i) {
    cfg["scheme"] = schemes[i];
    CurveHandle curve;
    dcsi_status st = dcsi_rate_run(cfg.dump().c_str(), &curve.p);
    if (st != DCSI_OK) return report_failure(st);
    CStr csv;
    CStr js;
    st = dcsi_curve_csv(curve.p, &csv.p);
    if (st != DCSI_OK) return report_failure(st);
    st = dcsi_curve_json(curve.p, &js.p);
    if (st != DCSI_OK) return report_failure(st);
    csvs[i] = csv.str();
    jsons[i] = js.str();
  }

  if (o.out.empty()) {
    for (const std::string& c : csvs) std::fputs(c.c_str(), stdout);
    return 0;
  }

  const std::string stem = strip_csv_ext(o.out);
  for (std::size_t i = 0; i < schemes.size(); ++i) {
    std::string base = schemes.size() == 1 ? stem : stem + "_" + sanitize_scheme(schemes[i]);
    if (!write_file(base + ".csv", csvs[i]) || !write_file(base + ".json", jsons[i])) {
      std::fprintf(stderr, "dcsi: error: cannot write '%s'\n", (base + ".csv").c_str());
      return 3;
    }
    std::printf("wrote %s.csv and %s.json\n", base.c_str(), base.c_str());
  }
  return 0;
}

// ---------------------------------------------------------------------------
// dof
// ---------------------------------------------------------------------------

struct DofOpts {
  std::string alpha;
  std::string schemes = "czf,apzf,czf-hq,apzf-hq";
  std::string passive;
  std::string out;
  bool as_json = false;
};

int run_dof(const DofOpts& o) {
  AlphaHandle a;
  dcsi_status st = dcsi_alpha_parse(o.alpha.c_str(), &a.p);
  if (st != DCSI_OK) return report_failure(st);

  std::vector<std::size_t> passive;
  if (!o.passive.empty()) {
    try {
      for (int v : parse_int_list(o.passive)) {
        if (v < 0) throw std::invalid_argument("passive indices must be >= 0");
        passive.push_back(static_cast<std::size_t>(v));
      }
    } catch (const std::exception& e) {
      return usage_error(e.what());
    }
  }

  json reports = json::array();
  for (const std::string& scheme : split(o.schemes, ',')) {
    CStr rep;
    st = dcsi_dof_json(a.p, scheme.c_str(), passive.empty() ? nullptr : passive.data(),
                       passive.size(), &rep.p);
    if (st != DCSI_OK) return report_failure(st);
    reports.push_back(json::parse(rep.str()));
  }

  std::ostringstream os;
  if (o.as_json) {
    os << reports.dump(2) << "\n";
  } else {
    os << "# dcsimimo " << dcsi_version() << " dof\n";
    os << std::left << std::setw(16) << "scheme" << std::setw(12) << "total"
       << "per_user\n";
    for (const auto& r : reports) {
      std::string per;
      for (const auto& v : r.at("per_user")) {
        if (!per.empty()) per += ", ";
        per += fmt_num(v.get<double>());
      }
      if (r.contains("passive")) {
        per += "   passive=";
        bool first = true;
        for (const auto& v : r.at("passive")) {
          if (!first) per += ",";
          per += std::to_string(v.get<std::size_t>());
          first = false;
        }
      }
      os << std::left << std::setw(16) << r.at("scheme").get<std::string>() << std::setw(12)
         << fmt_num(r.at("total").get<double>()) << per << "\n";
    }
  }

  if (o.out.empty()) {
    std::fputs(os.str().c_str(), stdout);
    return 0;
  }
  if (!write_file(o.out, os.str())) {
    std::fprintf(stderr, "dcsi: error: cannot write '%s'\n", o.out.c_str());
    return 3;
  }
  std::printf("wrote %s\n", o.out.c_str());
  return 0;
}

// ---------------------------------------------------------------------------
// alloc
// ---------------------------------------------------------------------------

struct AllocOpts {
  std::string scheme;
  std::string gamma;
  std::string out;
};

int run_alloc_many(const std::vector<std::string>& schemes, const std::string& gamma,
                   const std::string& out) {
  std::vector<double> grid;
  try {
    grid = parse_grid(gamma);
  } catch (const std::exception& e) {
    return usage_error(e.what());
  }

  std::string body;
  for (std::size_t i = 0; i < schemes.size(); ++i) {
    CStr csv;
    const dcsi_status st =
        dcsi_alloc_sweep_csv(schemes[i].c_str(), grid.data(), grid.size(), &csv.p);
    if (st != DCSI_OK) return report_failure(st);
    std::string part = csv.str();
    if (i > 0) {
      // drop the repeated header line when stacking sweeps
      const std::size_t nl = part.find('\n');
      part = nl == std::string::npos ? std::string() : part.substr(nl + 1);
    }
    body += part;
  }

  std::string head = std::string("# dcsimimo ") + dcsi_version() + " alloc gamma=" + gamma + "\n";
  const std::string content = head + body;
  if (out.empty()) {
    std::fputs(content.c_str(), stdout);
    return 0;
  }
  if (!write_file(out, content)) {
    std::fprintf(stderr, "dcsi: error: cannot write '%s'\n", out.c_str());
    return 3;
  }
  std::printf("wrote %s\n", out.c_str());
  return 0;
}

int run_alloc(const AllocOpts& o) { return run_alloc_many({o.scheme}, o.gamma, o.out); }

// ---------------------------------------------------------------------------
// quantcheck
// ---------------------------------------------------------------------------

struct QuantOpts {
  std::size_t k = 2;
  std::string bits = "4,8,12";
  std::size_t trials = 100000;
  std::uint64_t seed = 1;
  unsigned threads = 1;
  std::string out;
  bool as_json = false;
};

int run_quantcheck(const QuantOpts& o) {
  std::vector<int> bits;
  try {
    bits = parse_int_list(o.bits);
  } catch (const std::exception& e) {
    return usage_error(e.what());
  }

  json reports = json::array();
  for (int b : bits) {
    CStr rep;
    const dcsi_status st =
        dcsi_quantcheck_json(o.k, b, o.trials, o.seed, o.threads, &rep.p);
    if (st != DCSI_OK) return report_failure(st);
    reports.push_back(json::parse(rep.str()));
  }

  std::ostringstream os;
  if (o.as_json) {
    os << reports.dump(2) << "\n";
  } else {
    os << "# dcsimimo " << dcsi_version() << " quantcheck k=" << o.k << " trials=" << o.trials
       << " seed=" << o.seed << "\n";
    os << std::left << std::setw(6) << "bits" << std::setw(14) << "mean_sin2" << std::setw(14)
       << "sin2_lo" << std::setw(14) << "sin2_hi" << std::setw(14) << "mean_neglog2"
       << std::setw(12) << "log_lo" << std::setw(12) << "log_hi"
       << "verdict\n";
    for (const auto& r : reports) {
      const bool apply = r.at("bounds_apply").get<bool>();
      const bool pass = r.at("sin2_pass").get<bool>() && r.at("log_pass").get<bool>();
      os << std::left << std::setw(6) << r.at("bits").get<int>() << std::setw(14)
         << fmt_num(r.at("mean_sin2").get<double>(), 6) << std::setw(14)
         << fmt_num(r.at("sin2_lo").get<double>(), 6) << std::setw(14)
         << fmt_num(r.at("sin2_hi").get<double>(), 6) << std::setw(14)
         << fmt_num(r.at("mean_neglog2").get<double>(), 6) << std::setw(12)
         << fmt_num(r.at("log_lo").get<double>(), 6) << std::setw(12)
         << fmt_num(r.at("log_hi").get<double>(), 6)
         << (apply ? (pass ? "PASS" : "FAIL") : "INFO") << "\n";
    }
  }

  if (o.out.empty()) {
    std::fputs(os.str().c_str(), stdout);
    return 0;
  }
  if (!write_file(o.out, os.str())) {
    std::fprintf(stderr, "dcsi: error: cannot write '%s'\n", o.out.c_str());
    return 3;
  }
  std::printf("wrote %s\n", o.out.c_str());
  return 0;
}

// ---------------------------------------------------------------------------
// repro: bundled reference experiments
// ---------------------------------------------------------------------------

struct ReproOpts {
  std::string name;
  std::string out;
  std::size_t trials = 2000;
  std::uint64_t seed = 1;
  unsigned threads = 1;
};

std::string appd_matrix() {
  // 7 users, every link fully informed except transmitter 1's estimate of
  // user 1 (useless) and transmitter 6's estimate of user 5 (exponent 0.3)
  std::string rows;
  for (std::size_t i = 0; i < 7; ++i) {
    std::string row;
    for (std::size_t j = 0; j < 7; ++j) {
      std::string cell = "1";
      if (i == 0 && j == 0) cell = "0";
      if (i == 4 && j == 5) cell = "0.3";
      row += (j ? "," : "") + cell;
    }
    rows += (i ? ";" : "") + row;
  }
  return rows;
}

int run_repro(const ReproOpts& o) {
  if (o.name == "fig2") {
    RateOpts r;
    r.alpha = "1,0.5;0,0.7";
    r.model = "statistical";
    r.schemes = "perfect-zf,czf,bzf,apzf-heuristic";
    r.snr = "0:10:80";
    r.trials = o.trials;
    r.seed = o.seed;
    r.threads = o.threads;
    r.out = o.out;
    return run_rate(r);
  }
  if (o.name == "fig3") {
    RateOpts r;
    r.k = 2;
    r.bits = "6,3;3,6";
    r.model = "rvq";
    r.schemes = "perfect-zf,czf,bzf,apzf-heuristic";
    r.snr = "0:5:40";
    r.trials = o.trials;
    r.seed = o.seed;
    r.threads = o.threads;
    r.out = o.out;
    return run_rate(r);
  }
  if (o.name == "fig4") {
    return run_alloc_many({"czf", "apzf"}, "0:0.5:40", o.out);
  }
  if (o.name == "appD") {
    DofOpts d;
    d.alpha = appd_matrix();
    d.schemes = "czf,apzf,czf-hq,apzf-hq";
    d.out = o.out;
    return run_dof(d);
  }
  return usage_error("unknown experiment '" + o.name + "' (fig2, fig3, fig4, appD)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{std::string("dcsi ") + dcsi_version() +
               " - distributed-CSI joint precoding experiments"};
  app.require_subcommand(1);

  std::uint64_t seed = 1;
  try {
    seed = default_seed();
  } catch (const std::exception& e) {
    return usage_error(e.what());
  }

  RateOpts rate;
  rate.seed = seed;
  CLI::App* rate_cmd = app.add_subcommand("rate", "Monte-Carlo rate curves on an SNR grid");
  rate_cmd->add_option("--k", rate.k, "number of users/transmitters");
  rate_cmd->add_option("--alpha", rate.alpha, "quality exponents, rows ';', entries ','");
  rate_cmd->add_option("--bits", rate.bits, "feedback bit budgets, rows ';', entries ','");
  rate_cmd->add_option("--model", rate.model, "statistical | rvq | hier-rvq");
  rate_cmd->add_option("--schemes", rate.schemes, "comma list (perfect-zf, czf, rzf, bzf, apzf, "
                                                  "apzf-heuristic, apzf-qpower:<b>, czf-hq, apzf-hq)");
  rate_cmd->add_option("--snr", rate.snr, "SNR grid in dB, start:step:stop");
  rate_cmd->add_option("--trials", rate.trials, "Monte-Carlo channel draws");
  rate_cmd->add_option("--seed", rate.seed, "master seed (default: DCSI_SEED or 1)");
  rate_cmd->add_option("--threads", rate.threads, "worker threads (0 = auto)");
  rate_cmd->add_option("--power-bits", rate.power_bits, "default bits for apzf-qpower");
  rate_cmd->add_option("--config", rate.config_path,
                       "JSON config file; its values take precedence over flags");
  rate_cmd->add_option("--out", rate.out, "output stem; writes <stem>[_scheme].csv/.json");

  DofOpts dof;
  CLI::App* dof_cmd = app.add_subcommand("dof", "closed-form degrees of freedom per scheme");
  dof_cmd->add_option("--alpha", dof.alpha, "quality exponents, rows ';', entries ','")
      ->required();
  dof_cmd->add_option("--schemes", dof.schemes, "comma list of schemes");
  dof_cmd->add_option("--passive", dof.passive, "forced passive transmitter per stream (apzf)");
  dof_cmd->add_option("--out", dof.out, "output file (default stdout)");
  dof_cmd->add_flag("--json", dof.as_json, "emit JSON instead of a table");

  AllocOpts alloc;
  CLI::App* alloc_cmd = app.add_subcommand("alloc", "feedback budget allocation sweep");
  alloc_cmd->add_option("--scheme", alloc.scheme, "czf | apzf")->required();
  alloc_cmd->add_option("--gamma", alloc.gamma, "budget grid, start:step:stop")->required();
  alloc_cmd->add_option("--out", alloc.out, "output CSV (default stdout)");

  QuantOpts quant;
  quant.seed = seed;
  CLI::App* quant_cmd =
      app.add_subcommand("quantcheck", "random-codebook distortion against closed-form bounds");
  quant_cmd->add_option("--k", quant.k, "vector dimension (users)");
  quant_cmd->add_option("--bits", quant.bits, "comma list of codebook sizes in bits");
  quant_cmd->add_option("--trials", quant.trials, "Monte-Carlo trials per cell");
  quant_cmd->add_option("--seed", quant.seed, "master seed (default: DCSI_SEED or 1)");
  quant_cmd->add_option("--threads", quant.threads, "worker threads (0 = auto)");
  quant_cmd->add_option("--out", quant.out, "output file (default stdout)");
  quant_cmd->add_flag("--json", quant.as_json, "emit JSON instead of a table");

  ReproOpts repro;
  repro.seed = seed;
  CLI::App* repro_cmd =
      app.add_subcommand("repro", "bundled reference experiments: fig2 fig3 fig4 appD");
  repro_cmd->add_option("name", repro.name, "fig2 | fig3 | fig4 | appD")->required();
  repro_cmd->add_option("--trials", repro.trials, "Monte-Carlo channel draws");
  repro_cmd->add_option("--seed", repro.seed, "master seed (default: DCSI_SEED or 1)");
  repro_cmd->add_option("--threads", repro.threads, "worker threads (0 = auto)");
  repro_cmd->add_option("--out", repro.out, "output stem/file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  if (rate_cmd->parsed()) return run_rate(rate);
  if (dof_cmd->parsed()) return run_dof(dof);
  if (alloc_cmd->parsed()) return run_alloc(alloc);
  if (quant_cmd->parsed()) return run_quantcheck(quant);
  if (repro_cmd->parsed()) return run_repro(repro);
  return usage_error("no command given");
}
