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

#include "dcsimimo.h"

#include <cstdlib>
#include <cstring>
#include <new>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "dcsimimo/doftheory.hpp"
#include "dcsimimo/feedback_alloc.hpp"
#include "dcsimimo/ratesim.hpp"

namespace {

thread_local std::string g_last_error;

dcsi_status fail(dcsi_status st, const char* msg) {
  g_last_error = msg;
  return st;
}

// exception -> status code; the what() string lands in the thread-local slot
template <typename Fn>
dcsi_status guarded(Fn&& fn) {
  try {
    fn();
    return DCSI_OK;
  } catch (const dcsi::parse_error& e) {
    return fail(DCSI_ERR_PARSE, e.what());
  } catch (const dcsi::resource_error& e) {
    return fail(DCSI_ERR_RESOURCE, e.what());
  } catch (const dcsi::numeric_error& e) {
    return fail(DCSI_ERR_NUMERIC, e.what());
  } catch (const std::bad_alloc&) {
    return fail(DCSI_ERR_NOMEM, "out of memory");
  } catch (const std::exception& e) {
    return fail(DCSI_ERR_INVALID, e.what());
  } catch (...) {
    return fail(DCSI_ERR_INVALID, "unknown error");
  }
}

// copies into malloc storage so C callers free with dcsi_string_free
char* to_c_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

dcsi::PassiveSet passive_from(const size_t* passive, size_t len) {
  dcsi::PassiveSet s;
  s.reserve(len);
  for (size_t i = 0; i < len; ++i) s.push_back(passive[i]);
  return s;
}

}  // namespace

struct dcsi_alpha {
  dcsi::CsiScalingMatrix m;
};

struct dcsi_curve {
  dcsi::RateCurve c;
};

extern "C" {

const char* dcsi_version(void) { return dcsi::kVersion; }

const char* dcsi_last_error(void) { return g_last_error.c_str(); }

void dcsi_string_free(char* s) { std::free(s); }

dcsi_status dcsi_alpha_parse(const char* text, dcsi_alpha** out) {
  if (!text || !out) return fail(DCSI_ERR_INVALID, "null argument");
  *out = nullptr;
  return guarded([&] { *out = new dcsi_alpha{dcsi::CsiScalingMatrix::parse(text)}; });
}

dcsi_status dcsi_alpha_create(size_t k, const double* row_major, dcsi_alpha** out) {
  if (!row_major || !out) return fail(DCSI_ERR_INVALID, "null argument");
  *out = nullptr;
  return guarded([&] {
    std::vector<double> a(row_major, row_major + k * k);
    *out = new dcsi_alpha{dcsi::CsiScalingMatrix(k, std::move(a))};
  });
}

void dcsi_alpha_free(dcsi_alpha* a) { delete a; }

dcsi_status dcsi_alpha_users(const dcsi_alpha* a, size_t* out) {
  if (!a || !out) return fail(DCSI_ERR_INVALID, "null argument");
  *out = a->m.users();
  return DCSI_OK;
}

dcsi_status dcsi_alpha_json(const dcsi_alpha* a, char** json_out) {
  if (!a || !json_out) return fail(DCSI_ERR_INVALID, "null argument");
  *json_out = nullptr;
  return guarded([&] { *json_out = to_c_string(dcsi::csi_scaling_to_json(a->m)); });
}

dcsi_status dcsi_dof_json(const dcsi_alpha* a, const char* scheme, const size_t* passive,
                          size_t passive_len, char** json_out) {
  if (!a || !scheme || !json_out) return fail(DCSI_ERR_INVALID, "null argument");
  if (!passive && passive_len != 0) return fail(DCSI_ERR_INVALID, "null passive with nonzero length");
  *json_out = nullptr;
  return guarded([&] {
    dcsi::DofReport rep;
    if (passive && passive_len > 0) {
      const dcsi::PassiveSet s = passive_from(passive, passive_len);
      const std::string name(scheme);
      if (name == "apzf-hq") {
        rep = dcsi::dof_apzf_hq(a->m, &s);
      } else if (name == "apzf" || name == "apzf-heuristic" ||
                 name.rfind("apzf-qpower:", 0) == 0) {
        rep = dcsi::dof_apzf(a->m, &s);
        rep.scheme = name;
      } else {
        throw std::invalid_argument("dof: only apzf variants take a passive set");
      }
    } else {
      rep = dcsi::dof_for_scheme(a->m, scheme);
    }
    *json_out = to_c_string(dcsi::dof_report_to_json(rep));
  });
}

dcsi_status dcsi_alloc_json(const char* scheme, double gamma, char** json_out) {
  if (!scheme || !json_out) return fail(DCSI_ERR_INVALID, "null argument");
  *json_out = nullptr;
  return guarded([&] {
    *json_out = to_c_string(dcsi::allocation_to_json(dcsi::allocate_for_scheme(scheme, gamma)));
  });
}

dcsi_status dcsi_alloc_sweep_csv(const char* scheme, const double* gammas, size_t count,
                                 char** csv_out) {
  if (!scheme || !gammas || !csv_out) return fail(DCSI_ERR_INVALID, "null argument");
  *csv_out = nullptr;
  return guarded([&] {
    const std::vector<double> g(gammas, gammas + count);
    *csv_out = to_c_string(dcsi::sweep_to_csv(dcsi::allocation_sweep(scheme, g)));
  });
}

dcsi_status dcsi_rate_run(const char* config_json, dcsi_curve** out) {
  if (!config_json || !out) return fail(DCSI_ERR_INVALID, "null argument");
  *out = nullptr;
  return guarded([&] {
    const dcsi::SimConfig cfg = dcsi::sim_config_from_json(config_json);
    *out = new dcsi_curve{dcsi::ergodic_curve(cfg)};
  });
}

void dcsi_curve_free(dcsi_curve* c) { delete c; }

dcsi_status dcsi_curve_csv(const dcsi_curve* c, char** out) {
  if (!c || !out) return fail(DCSI_ERR_INVALID, "null argument");
  *out = nullptr;
  return guarded([&] { *out = to_c_string(dcsi::rate_curve_to_csv(c->c)); });
}

dcsi_status dcsi_curve_json(const dcsi_curve* c, char** out) {
  if (!c || !out) return fail(DCSI_ERR_INVALID, "null argument");
  *out = nullptr;
  return guarded([&] { *out = to_c_string(dcsi::rate_curve_to_json(c->c)); });
}

dcsi_status dcsi_curve_slope_json(const dcsi_curve* c, double lo_db, double hi_db, char** out) {
  if (!c || !out) return fail(DCSI_ERR_INVALID, "null argument");
  *out = nullptr;
  return guarded([&] {
    const dcsi::SlopeFit fit = dcsi::dof_slope(c->c, lo_db, hi_db);
    nlohmann::json j;
    j["per_user"] = fit.per_user;
    j["per_user_stderr"] = fit.per_user_stderr;
    j["sum"] = fit.sum;
    j["sum_stderr"] = fit.sum_stderr;
    *out = to_c_string(j.dump());
  });
}

dcsi_status dcsi_config_canonical(const char* config_json, char** out) {
  if (!config_json || !out) return fail(DCSI_ERR_INVALID, "null argument");
  *out = nullptr;
  return guarded([&] {
    const dcsi::SimConfig cfg = dcsi::sim_config_from_json(config_json);
    nlohmann::json j;
    j["config"] = nlohmann::json::parse(dcsi::sim_config_to_json(cfg));
    j["hash"] = dcsi::sim_config_hash(cfg);
    *out = to_c_string(j.dump());
  });
}

dcsi_status dcsi_quantcheck_json(size_t users, int bits, size_t trials, uint64_t seed,
                                 unsigned threads, char** json_out) {
  if (!json_out) return fail(DCSI_ERR_INVALID, "null argument");
  *json_out = nullptr;
  return guarded([&] {
    const dcsi::QuantCheckReport rep = dcsi::quantcheck(users, bits, trials, seed, threads);
    *json_out = to_c_string(dcsi::quantcheck_to_json(rep));
  });
}

}  // extern "C"
