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

// Exercises the shared library strictly through its C surface: no core
// headers, only dcsimimo.h plus header-only JSON for inspecting results.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstring>
#include <string>
#include <vector>

#include <dcsimimo.h>
#include <json.hpp>

using nlohmann::json;

namespace {

// Takes ownership of a char* out-parameter and frees it on scope exit.
struct owned_str {
  char* p = nullptr;
  ~owned_str() { dcsi_string_free(p); }
  std::string str() const { return p ? std::string(p) : std::string(); }
};

struct owned_alpha {
  dcsi_alpha* a = nullptr;
  ~owned_alpha() { dcsi_alpha_free(a); }
};

struct owned_curve {
  dcsi_curve* c = nullptr;
  ~owned_curve() { dcsi_curve_free(c); }
};

json dof_report(const dcsi_alpha* a, const char* scheme, const size_t* passive = nullptr,
                size_t passive_len = 0) {
  owned_str s;
  REQUIRE(dcsi_dof_json(a, scheme, passive, passive_len, &s.p) == DCSI_OK);
  return json::parse(s.str());
}

// The worked seven-user accuracy matrix: all exponents 1 except a dead
// (0,0) link and a weak 0.3 link at row 4, column 5.
owned_alpha seven_user() {
  std::vector<double> m(49, 1.0);
  m[0] = 0.0;
  m[4 * 7 + 5] = 0.3;
  owned_alpha a;
  REQUIRE(dcsi_alpha_create(7, m.data(), &a.a) == DCSI_OK);
  return a;
}

}  // namespace

TEST_CASE("version string is a semantic version") {
  const char* v = dcsi_version();
  REQUIRE(v != nullptr);
  int maj = -1, min = -1, pat = -1;
  CHECK(std::sscanf(v, "%d.%d.%d", &maj, &min, &pat) == 3);
  CHECK(maj >= 0);
}

TEST_CASE("string free accepts NULL") { dcsi_string_free(nullptr); }

TEST_CASE("alpha parse, users, and json round trip") {
  owned_alpha a;
  REQUIRE(dcsi_alpha_parse("1,0.5;0,0.7", &a.a) == DCSI_OK);
  size_t k = 0;
  REQUIRE(dcsi_alpha_users(a.a, &k) == DCSI_OK);
  CHECK(k == 2);

  owned_str js;
  REQUIRE(dcsi_alpha_json(a.a, &js.p) == DCSI_OK);
  const json j = json::parse(js.str());
  REQUIRE(j.is_array());
  REQUIRE(j.size() == 2);
  CHECK(j[0][0].get<double>() == 1.0);
  CHECK(j[0][1].get<double>() == 0.5);
  CHECK(j[1][0].get<double>() == 0.0);
  CHECK(j[1][1].get<double>() == 0.7);

  // the emitted matrix is accepted back as the rate-config alpha field
  const std::string cfg = std::string("{\"alpha\": ") + js.str() + "}";
  owned_str canon;
  CHECK(dcsi_config_canonical(cfg.c_str(), &canon.p) == DCSI_OK);
}

TEST_CASE("alpha create keeps perfect links through json") {
  const double inf = std::numeric_limits<double>::infinity();
  const std::vector<double> m = {inf, 0.5, 0.5, inf};
  owned_alpha a;
  REQUIRE(dcsi_alpha_create(2, m.data(), &a.a) == DCSI_OK);
  owned_str js;
  REQUIRE(dcsi_alpha_json(a.a, &js.p) == DCSI_OK);
  const json j = json::parse(js.str());
  CHECK(j[0][0].get<std::string>() == "inf");
  CHECK(j[0][1].get<double>() == 0.5);
}

TEST_CASE("alpha validation surfaces through status codes") {
  dcsi_alpha* a = nullptr;
  CHECK(dcsi_alpha_parse("1,0.5;0", &a) == DCSI_ERR_PARSE);
  CHECK(a == nullptr);
  CHECK(std::strlen(dcsi_last_error()) > 0);
  CHECK(dcsi_alpha_parse(nullptr, &a) == DCSI_ERR_INVALID);
  CHECK(dcsi_alpha_parse("1,0.5;0,0.7", nullptr) == DCSI_ERR_INVALID);
  const double neg[4] = {1.0, -0.25, 0.5, 1.0};
  CHECK(dcsi_alpha_create(2, neg, &a) == DCSI_ERR_INVALID);
  CHECK(dcsi_alpha_create(0, neg, &a) == DCSI_ERR_INVALID);
  size_t k = 0;
  CHECK(dcsi_alpha_users(nullptr, &k) == DCSI_ERR_INVALID);
}

TEST_CASE("dof report reproduces the worked seven-user values") {
  owned_alpha a = seven_user();
  CHECK(dof_report(a.a, "czf").at("total").get<double>() == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(dof_report(a.a, "apzf").at("total").get<double>() == doctest::Approx(2.1).epsilon(1e-12));
  CHECK(dof_report(a.a, "czf-hq").at("total").get<double>() ==
        doctest::Approx(5.3).epsilon(1e-12));
  const json hq = dof_report(a.a, "apzf-hq");
  CHECK(hq.at("total").get<double>() == doctest::Approx(6.3).epsilon(1e-12));
  REQUIRE(hq.at("per_user").size() == 7);
  REQUIRE(hq.at("passive").size() == 7);
  CHECK(hq.at("scheme").get<std::string>() == "apzf-hq");
}

TEST_CASE("dof passive override forwards to the apzf variants") {
  owned_alpha a = seven_user();
  const std::vector<size_t> s(7, 5);
  // forcing every stream passive at the weak transmitter costs the hq bound
  CHECK(dof_report(a.a, "apzf-hq", s.data(), s.size()).at("total").get<double>() ==
        doctest::Approx(6.0).epsilon(1e-12));
  // non-apzf schemes reject an explicit passive set
  char* out = nullptr;
  CHECK(dcsi_dof_json(a.a, "czf", s.data(), s.size(), &out) == DCSI_ERR_INVALID);
  CHECK(out == nullptr);
  // malformed: null data with nonzero length, out-of-range index, bad length
  CHECK(dcsi_dof_json(a.a, "apzf", nullptr, 7, &out) == DCSI_ERR_INVALID);
  std::vector<size_t> bad(7, 9);
  CHECK(dcsi_dof_json(a.a, "apzf", bad.data(), bad.size(), &out) == DCSI_ERR_INVALID);
  CHECK(dcsi_dof_json(a.a, "apzf", s.data(), 3, &out) == DCSI_ERR_INVALID);
  CHECK(dcsi_dof_json(a.a, "zf", nullptr, 0, &out) == DCSI_ERR_INVALID);
}

TEST_CASE("alloc json matches the closed-form plan") {
  owned_str s;
  REQUIRE(dcsi_alloc_json("czf", 18.0, &s.p) == DCSI_OK);
  const json j = json::parse(s.str());
  CHECK(j.at("scheme").get<std::string>() == "czf");
  CHECK(j.at("gamma").get<double>() == 18.0);
  CHECK(j.at("n_active").get<size_t>() == 3);
  CHECK(j.at("alpha").get<double>() == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(j.at("dof").get<double>() == doctest::Approx(3.0).epsilon(1e-15));
  CHECK(j.at("spend").get<double>() == doctest::Approx(18.0).epsilon(1e-15));

  char* out = nullptr;
  CHECK(dcsi_alloc_json("czf", -1.0, &out) == DCSI_ERR_INVALID);
  CHECK(dcsi_alloc_json("bzf", 8.0, &out) == DCSI_ERR_INVALID);
  CHECK(dcsi_alloc_json(nullptr, 8.0, &out) == DCSI_ERR_INVALID);
}

TEST_CASE("alloc sweep csv covers every requested budget") {
  const std::vector<double> gammas = {0.0, 4.0, 18.0, 48.0, 100.0};
  owned_str s;
  REQUIRE(dcsi_alloc_sweep_csv("czf", gammas.data(), gammas.size(), &s.p) == DCSI_OK);
  const std::string csv = s.str();
  CHECK(csv.rfind("gamma,scheme,n_active,alpha,dof", 0) == 0);
  size_t rows = 0;
  for (char ch : csv) rows += ch == '\n';
  CHECK(rows == gammas.size() + 1);

  char* out = nullptr;
  CHECK(dcsi_alloc_sweep_csv("czf", nullptr, 2, &out) == DCSI_ERR_INVALID);
  // an empty sweep is benign: header-only CSV
  owned_str empty;
  REQUIRE(dcsi_alloc_sweep_csv("czf", gammas.data(), 0, &empty.p) == DCSI_OK);
  CHECK(empty.str() == "gamma,scheme,n_active,alpha,dof\n");
}

TEST_CASE("rate run produces a consistent curve with provenance") {
  const char* cfg =
      "{\"alpha\": [[1, 0.5], [0, 0.7]], \"scheme\": \"czf\","
      " \"model\": \"statistical\", \"snr_db\": [10, 20, 30],"
      " \"trials\": 60, \"master_seed\": 11}";
  owned_curve c;
  REQUIRE(dcsi_rate_run(cfg, &c.c) == DCSI_OK);

  owned_str js;
  REQUIRE(dcsi_curve_json(c.c, &js.p) == DCSI_OK);
  const json j = json::parse(js.str());
  REQUIRE(j.at("snr_db").size() == 3);
  REQUIRE(j.at("sum_rate").size() == 3);
  // layout: outer index user, inner index grid point
  REQUIRE(j.at("per_user_rate").size() == 2);
  REQUIRE(j.at("per_user_rate")[0].size() == 3);
  CHECK(j.at("mc_trials").get<size_t>() == 60);
  CHECK(j.at("master_seed").get<uint64_t>() == 11);
  CHECK(j.at("scheme").get<std::string>() == "czf");
  CHECK(j.at("model").get<std::string>() == "statistical");
  CHECK(j.at("config_hash").get<std::string>().size() == 16);
  for (size_t n = 0; n < 3; ++n) {
    const double sum = j.at("sum_rate")[n].get<double>();
    double per = 0.0;
    for (size_t u = 0; u < 2; ++u) per += j.at("per_user_rate")[u][n].get<double>();
    CHECK(sum == doctest::Approx(per).epsilon(1e-9));
  }

  owned_str csv;
  REQUIRE(dcsi_curve_csv(c.c, &csv.p) == DCSI_OK);
  CHECK(csv.str().rfind("#", 0) == 0);
  CHECK(csv.str().find("snr_db") != std::string::npos);

  // identical config -> bit-identical results (threading must not leak in)
  const std::string cfg2 = std::string(cfg).insert(1, "\"threads\": 3, ");
  owned_curve c2;
  REQUIRE(dcsi_rate_run(cfg2.c_str(), &c2.c) == DCSI_OK);
  owned_str js2;
  REQUIRE(dcsi_curve_json(c2.c, &js2.p) == DCSI_OK);
  const json j2 = json::parse(js2.str());
  for (size_t n = 0; n < 3; ++n) {
    CHECK(j.at("sum_rate")[n].get<double>() == j2.at("sum_rate")[n].get<double>());
  }
}

TEST_CASE("slope json fits the windowed least squares line") {
  const char* cfg =
      "{\"alpha\": [[\"inf\", \"inf\"], [\"inf\", \"inf\"]], \"scheme\": \"perfect-zf\","
      " \"snr_db\": [40, 50, 60, 70, 80], \"trials\": 40, \"master_seed\": 3}";
  owned_curve c;
  REQUIRE(dcsi_rate_run(cfg, &c.c) == DCSI_OK);
  owned_str s;
  REQUIRE(dcsi_curve_slope_json(c.c, 40.0, 80.0, &s.p) == DCSI_OK);
  const json j = json::parse(s.str());
  CHECK(j.at("sum").get<double>() == doctest::Approx(2.0).epsilon(0.02));
  REQUIRE(j.at("per_user").size() == 2);
  CHECK(j.at("sum_stderr").get<double>() >= 0.0);
  CHECK(j.at("per_user_stderr").size() == 2);

  // a window holding fewer than two grid points cannot define a slope
  char* out = nullptr;
  CHECK(dcsi_curve_slope_json(c.c, 41.0, 49.0, &out) == DCSI_ERR_INVALID);
}

TEST_CASE("config canonicalization is stable and hashes match reruns") {
  const char* sparse = "{\"alpha\": [[1, 0.5], [0, 0.7]]}";
  owned_str first;
  REQUIRE(dcsi_config_canonical(sparse, &first.p) == DCSI_OK);
  const json j1 = json::parse(first.str());
  CHECK(j1.at("hash").get<std::string>().size() == 16);
  CHECK(j1.at("config").contains("scheme"));
  CHECK(j1.at("config").contains("snr_db"));

  // canonical form re-canonicalizes to itself
  owned_str second;
  REQUIRE(dcsi_config_canonical(j1.at("config").dump().c_str(), &second.p) == DCSI_OK);
  CHECK(json::parse(second.str()) == j1);
}

TEST_CASE("rate run rejects malformed configs with the right status") {
  dcsi_curve* c = nullptr;
  CHECK(dcsi_rate_run("{not json", &c) == DCSI_ERR_PARSE);
  CHECK(c == nullptr);
  CHECK(std::strlen(dcsi_last_error()) > 0);
  CHECK(dcsi_rate_run("{}", &c) == DCSI_ERR_PARSE);
  CHECK(dcsi_rate_run(nullptr, &c) == DCSI_ERR_INVALID);
  // a codebook larger than the configured cap is a resource error
  const char* huge =
      "{\"alpha\": [[1, 1], [1, 1]], \"model\": \"rvq\","
      " \"bits\": [[30, 30], [30, 30]], \"snr_db\": [10], \"trials\": 4}";
  CHECK(dcsi_rate_run(huge, &c) == DCSI_ERR_RESOURCE);
  // scheme/config contract violations map to invalid
  const char* badscheme =
      "{\"alpha\": [[1, 0.5], [0, 0.7]], \"scheme\": \"zf\", \"snr_db\": [10], \"trials\": 4}";
  CHECK(dcsi_rate_run(badscheme, &c) == DCSI_ERR_INVALID);
}

TEST_CASE("quantcheck json reports the sandwich verdicts") {
  owned_str s;
  REQUIRE(dcsi_quantcheck_json(2, 6, 4000, 5, 2, &s.p) == DCSI_OK);
  const json j = json::parse(s.str());
  CHECK(j.at("k").get<size_t>() == 2);
  CHECK(j.at("bits").get<int>() == 6);
  CHECK(j.at("trials").get<size_t>() == 4000);
  CHECK(j.at("bounds_apply").get<bool>());
  CHECK(j.at("mean_sin2").get<double>() > 0.0);
  CHECK(j.at("sin2_lo").get<double>() <= j.at("sin2_hi").get<double>());
  CHECK(j.at("sin2_pass").get<bool>());
  CHECK(j.at("log_pass").get<bool>());

  char* out = nullptr;
  CHECK(dcsi_quantcheck_json(2, 6, 0, 5, 2, &out) == DCSI_ERR_INVALID);
  CHECK(dcsi_quantcheck_json(2, 40, 100, 5, 1, &out) == DCSI_ERR_RESOURCE);
  CHECK(dcsi_quantcheck_json(2, 6, 100, 5, 1, nullptr) == DCSI_ERR_INVALID);
}
