// Copyright 2026 the pvbell authors
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

// Exercises the shared-library surface exactly as an external consumer
// would: opaque handles, status codes, thread-local error strings.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>
#include <pvbell/pvbell.h>

#include <cmath>
#include <cstring>
#include <string>

namespace {

struct Freer {
  pvb_state* s;
  ~Freer() { pvb_state_free(s); }
};

}  // namespace

TEST_CASE("state construction and inspection through handles") {
  pvb_state* ghz = nullptr;
  REQUIRE(pvb_state_ghz(2, 2, 3.14159265358979 / 4, &ghz) == PVB_OK);
  Freer f1{ghz};
  CHECK(pvb_state_num_parties(ghz) == 2);
  CHECK(pvb_state_local_dim(ghz) == 2);
  char buf[128];
  REQUIRE(pvb_state_describe(ghz, buf, sizeof(buf)) == PVB_OK);
  CHECK(std::strncmp(buf, "ghz(", 4) == 0);

  pvb_state* bad = nullptr;
  CHECK(pvb_state_ghz(2, 5, 0.1, &bad) == PVB_ERR_INVALID_ARGUMENT);
  CHECK(std::string(pvb_last_error()).find("d = 2 or 3") != std::string::npos);

  pvb_state* named = nullptr;
  REQUIRE(pvb_state_named("smolin4", &named) == PVB_OK);
  Freer f2{named};
  CHECK(pvb_state_num_parties(named) == 4);
  CHECK(pvb_state_named("unknown", &bad) == PVB_ERR_INVALID_ARGUMENT);

  pvb_state* zero = nullptr;
  REQUIRE(pvb_state_zero(1, 2, &zero) == PVB_OK);
  Freer f3{zero};
  pvb_state* three = nullptr;
  REQUIRE(pvb_state_tensor(ghz, zero, &three) == PVB_OK);
  Freer f4{three};
  CHECK(pvb_state_num_parties(three) == 3);

  const pvb_state* parts[2] = {ghz, ghz};
  const double weights[2] = {0.5, 0.5};
  pvb_state* mixed = nullptr;
  REQUIRE(pvb_state_mix(parts, weights, 2, &mixed) == PVB_OK);
  Freer f5{mixed};

  const double bad_weights[2] = {0.7, 0.7};
  CHECK(pvb_state_mix(parts, bad_weights, 2, &bad) == PVB_ERR_INVALID_ARGUMENT);
}

TEST_CASE("estimation through the C API is deterministic") {
  pvb_state* ghz = nullptr;
  REQUIRE(pvb_state_ghz(2, 2, 3.14159265358979 / 4, &ghz) == PVB_OK);
  Freer f{ghz};
  const int settings[2] = {2, 2};
  pvb_run_options options;
  pvb_run_options_init(&options);
  options.trials = 2000;
  options.seed = 7;
  options.workers = 2;
  pvb_estimate a{}, b{};
  REQUIRE(pvb_estimate_pv(ghz, settings, 2, &options, &a) == PVB_OK);
  options.workers = 1;
  REQUIRE(pvb_estimate_pv(ghz, settings, 2, &options, &b) == PVB_OK);
  CHECK(a.violations == b.violations);
  CHECK(a.p_hat == b.p_hat);
  CHECK(a.violations > 400);  // ~28% of 2000
  CHECK(a.violations < 750);
  CHECK(a.interrupted == 0);
  CHECK(a.ci_low < a.p_hat);
  CHECK(a.p_hat < a.ci_high);
}

TEST_CASE("wilson, witness, multiplicativity and formatting") {
  double lo = -1, hi = -1;
  REQUIRE(pvb_wilson_ci(0, 100, 0.95, &lo, &hi) == PVB_OK);
  CHECK(lo == 0.0);
  CHECK(hi == doctest::Approx(0.03699349876899627));
  CHECK(pvb_wilson_ci(5, 4, 0.95, &lo, &hi) == PVB_ERR_INVALID_ARGUMENT);

  pvb_estimate est{};
  est.trials = est.completed = 100000;
  est.violations = 74688;
  est.p_hat = 0.74688;
  pvb_wilson_ci(est.violations, est.trials, 0.95, &est.ci_low, &est.ci_high);
  const int settings[3] = {2, 2, 2};
  pvb_witness_report report{};
  REQUIRE(pvb_gme_witness(&est, settings, 3, 2, &report) == PVB_OK);
  CHECK(report.witnessed == 1);
  CHECK(report.threshold == doctest::Approx(2 * (3.14159265358979323846 - 3)));

  const int wrong[2] = {2, 2};
  CHECK(pvb_gme_witness(&est, wrong, 2, 2, &report) ==
        PVB_ERR_INVALID_ARGUMENT);

  pvb_estimate a = est, b = est, ab{};
  a.violations = 28318;
  a.p_hat = 0.28318;
  pvb_wilson_ci(a.violations, a.trials, 0.95, &a.ci_low, &a.ci_high);
  ab.trials = ab.completed = 100000;
  ab.violations = 48618;
  ab.p_hat = 0.48618;
  pvb_wilson_ci(ab.violations, ab.trials, 0.95, &ab.ci_low, &ab.ci_high);
  b = a;
  pvb_mult_report mult{};
  REQUIRE(pvb_multiplicativity_check(&a, &b, &ab, &mult) == PVB_OK);
  CHECK(mult.pass == 1);

  char buf[16];
  REQUIRE(pvb_format_percent(0.54893, buf, sizeof(buf)) == PVB_OK);
  CHECK(std::string(buf) == "54.893");
  CHECK(pvb_format_percent(0.5, buf, 2) == PVB_ERR_INVALID_ARGUMENT);
}

TEST_CASE("fit, chsh and appendix checks") {
  const double xs[5] = {2, 3, 4, 5, 6};
  double ps[5];
  for (int i = 0; i < 5; ++i) ps[i] = 1.0 - 0.9 * std::exp(-0.5 * xs[i]);
  pvb_fit_result fit{};
  REQUIRE(pvb_fit_exponential(xs, ps, 5, 0, &fit) == PVB_OK);
  CHECK(fit.a == doctest::Approx(0.9).epsilon(1e-9));
  CHECK(fit.b == doctest::Approx(0.5).epsilon(1e-9));

  pvb_chsh_params params{};
  params.alpha = 3.14159265358979323846 / 4;
  const double s = 1 / std::sqrt(2.0);
  params.a1[2] = 1;
  params.a2[0] = 1;
  params.b1[0] = s;
  params.b1[2] = s;
  params.b2[0] = -s;
  params.b2[2] = s;
  pvb_chsh_result value{};
  REQUIRE(pvb_chsh_value(&params, &value) == PVB_OK);
  CHECK(value.value == doctest::Approx(2 * std::sqrt(2.0)));
  CHECK(value.from_decomposition == doctest::Approx(value.value));
  double e = 0.0;
  REQUIRE(pvb_chsh_correlator(&params, 1, 1, &e) == PVB_OK);
  CHECK(e == doctest::Approx(s));

  pvb_appendix_report appendix{};
  REQUIRE(pvb_appendix_check(5000, 1000, 50, 3, &appendix) == PVB_OK);
  CHECK(appendix.pass == 1);
  CHECK(appendix.lemma_deficits == 0);
}

TEST_CASE("oracle check and LP dump") {
  pvb_state* ghz = nullptr;
  REQUIRE(pvb_state_ghz(2, 2, 3.14159265358979 / 4, &ghz) == PVB_OK);
  Freer f{ghz};
  const int settings[2] = {2, 2};
  pvb_oracle_report report{};
  REQUIRE(pvb_oracle_check(ghz, settings, 2, 100, 5, 0, &report) == PVB_OK);
  CHECK(report.trials == 100);
  CHECK(report.disagreements == 0);

  const std::string path = "/tmp/pvbell_capi_lp.txt";
  REQUIRE(pvb_dump_lp(ghz, settings, 2, 5, 0, path.c_str()) == PVB_OK);
  std::remove(path.c_str());
}

TEST_CASE("interrupt flag is settable and clearable") {
  CHECK(pvb_interrupt_requested() == 0);
  pvb_request_interrupt();
  CHECK(pvb_interrupt_requested() == 1);
  pvb_clear_interrupt();
  CHECK(pvb_interrupt_requested() == 0);
}
