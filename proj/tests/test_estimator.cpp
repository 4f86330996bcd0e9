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

#include "estimator.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <numbers>

#include "errors.hpp"

using namespace pvbell;

namespace {
constexpr double kPi = std::numbers::pi;

std::string temp_path(const char* name) {
  return (std::filesystem::temp_directory_path() / name).string();
}
}  // namespace

TEST_CASE("wilson intervals match the score formula") {
  // Frozen values computed directly from the Wilson formula with
  // z = 1.959964.
  {
    const auto [lo, hi] = wilson_ci(0, 100);
    CHECK(lo == 0.0);
    CHECK(hi == doctest::Approx(0.03699349876899627).epsilon(1e-12));
  }
  {
    const auto [lo, hi] = wilson_ci(50, 100);
    CHECK(lo == doctest::Approx(0.40383152963549296).epsilon(1e-12));
    CHECK(hi == doctest::Approx(0.596168470364507).epsilon(1e-12));
    CHECK(hi - 0.5 == doctest::Approx(0.5 - lo).epsilon(1e-12));
  }
  {
    const auto [lo, hi] = wilson_ci(100, 100);
    CHECK(hi == 1.0);
    CHECK(lo == doctest::Approx(0.9630065012310038).epsilon(1e-12));
  }
  {
    const auto [lo, hi] = wilson_ci(3, 7);
    CHECK(lo == doctest::Approx(0.15821985399244537).epsilon(1e-12));
    CHECK(hi == doctest::Approx(0.7495416372469643).epsilon(1e-12));
  }
  CHECK_THROWS_AS(wilson_ci(5, 0), Error);
  CHECK_THROWS_AS(wilson_ci(8, 7), Error);
  CHECK_THROWS_AS(wilson_ci(1, 10, 0.9), Error);
}

TEST_CASE("product states never violate") {
  const Scenario sc(2, {2, 2});
  EstimateOptions opt;
  opt.trials = 2000;
  opt.seed = 3;
  opt.workers = 2;
  const ViolationEstimate est = estimate_pv(make_zero(2, 2), sc, opt);
  CHECK(est.violations == 0);
  CHECK(est.p_hat == 0.0);
  CHECK(est.solver_failures == 0);
  CHECK(est.ci_low == 0.0);
}

TEST_CASE("estimates are invariant under the worker count") {
  const Scenario sc(2, {2, 2});
  const State ghz = make_ghz(2, 2, kPi / 4);
  ViolationEstimate reference;
  for (int workers : {1, 2, 3, 7}) {
    EstimateOptions opt;
    opt.trials = 3000;
    opt.seed = 99;
    opt.workers = workers;
    const ViolationEstimate est = estimate_pv(ghz, sc, opt);
    if (workers == 1) {
      reference = est;
      continue;
    }
    CHECK(est.violations == reference.violations);
    CHECK(est.solver_failures == reference.solver_failures);
    CHECK(est.p_hat == reference.p_hat);
    CHECK(est.ci_low == reference.ci_low);
    CHECK(est.ci_high == reference.ci_high);
  }
}

TEST_CASE("identical sampling mode runs end to end") {
  const Scenario sc(2, {2, 2});
  EstimateOptions opt;
  opt.trials = 500;
  opt.seed = 5;
  opt.mode = SamplingMode::identical_across_parties;
  opt.workers = 2;
  const ViolationEstimate est = estimate_pv(make_ghz(2, 2, kPi / 4), sc, opt);
  CHECK(est.completed == 500);
  const Scenario uneven(2, {3, 2});
  CHECK_THROWS_AS(estimate_pv(make_ghz(2, 2, kPi / 4), uneven, opt), Error);
}

TEST_CASE("interrupt, checkpoint and resume reproduce the full run") {
  const std::string path = temp_path("pvbell_test_ckpt.txt");
  std::filesystem::remove(path);
  const Scenario sc(2, {2, 2});
  const State ghz = make_ghz(2, 2, kPi / 4);

  EstimateOptions opt;
  opt.trials = 4000;
  opt.seed = 21;
  opt.workers = 2;

  const ViolationEstimate uninterrupted = estimate_pv(ghz, sc, opt);

  opt.checkpoint_path = path;
  opt.checkpoint_interval = 512;
  opt.stop_after = 2000;
  const ViolationEstimate partial = estimate_pv(ghz, sc, opt);
  CHECK(partial.interrupted);
  CHECK(partial.completed < 4000);
  REQUIRE(std::filesystem::exists(path));

  opt.stop_after = 0;
  opt.require_checkpoint = true;
  const ViolationEstimate resumed = estimate_pv(ghz, sc, opt);
  CHECK_FALSE(resumed.interrupted);
  CHECK(resumed.completed == 4000);
  CHECK(resumed.violations == uninterrupted.violations);
  CHECK(resumed.solver_failures == uninterrupted.solver_failures);
  CHECK(resumed.p_hat == uninterrupted.p_hat);
  CHECK(resumed.ci_low == uninterrupted.ci_low);
  CHECK(resumed.ci_high == uninterrupted.ci_high);

  // A mismatched seed must be refused.
  opt.seed = 22;
  opt.require_checkpoint = false;
  std::filesystem::remove(path);
  opt.stop_after = 1000;
  (void)estimate_pv(ghz, sc, opt);
  opt.seed = 23;
  opt.stop_after = 0;
  CHECK_THROWS_AS(estimate_pv(ghz, sc, opt), Error);

  // Corrupt checkpoints are detected by checksum.
  {
    std::ofstream f(path, std::ios::app);
    f << "tampered\n";
  }
  opt.seed = 22;
  CHECK_THROWS_AS(estimate_pv(ghz, sc, opt), Error);
  std::filesystem::remove(path);

  // Missing checkpoint with require_checkpoint fails; without it, runs fresh.
  opt.require_checkpoint = true;
  CHECK_THROWS_AS(estimate_pv(ghz, sc, opt), Error);
  opt.require_checkpoint = false;
  opt.trials = 600;
  const ViolationEstimate fresh = estimate_pv(ghz, sc, opt);
  CHECK(fresh.completed == 600);
  std::filesystem::remove(path);
}

TEST_CASE("cancel flag stops the run at a trial boundary") {
  const Scenario sc(2, {2, 2});
  EstimateOptions opt;
  opt.trials = 100000;
  opt.seed = 77;
  opt.workers = 2;
  std::atomic<bool> cancel{true};  // pre-set: stops almost immediately
  opt.cancel = &cancel;
  const ViolationEstimate est = estimate_pv(make_ghz(2, 2, kPi / 4), sc, opt);
  CHECK(est.interrupted);
  CHECK(est.completed < 100000);
}

TEST_CASE("oracle check on a product state compares everything") {
  const Scenario sc(2, {2, 2});
  const OracleCheckReport report = oracle_check(make_zero(2, 2), sc, 50, 1);
  CHECK(report.trials == 50);
  CHECK(report.compared + report.skipped_near_boundary == 50);
  CHECK(report.disagreements == 0);
}

TEST_CASE("estimator validates its inputs") {
  const Scenario sc(2, {2, 2});
  EstimateOptions opt;
  opt.trials = 0;
  CHECK_THROWS_AS(estimate_pv(make_zero(2, 2), sc, opt), Error);
  opt.trials = 10;
  CHECK_THROWS_AS(estimate_pv(make_zero(3, 2), sc, opt), Error);
  opt.tolerance = -1.0;
  CHECK_THROWS_AS(estimate_pv(make_zero(2, 2), sc, opt), Error);
}
