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

#include "analysis.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

#include "errors.hpp"
#include "rng.hpp"

using namespace pvbell;

namespace {
constexpr double kPi = std::numbers::pi;

ViolationEstimate fake_estimate(std::uint64_t violations, std::uint64_t trials,
                                const std::string& scenario) {
  ViolationEstimate est;
  est.trials = trials;
  est.completed = trials;
  est.violations = violations;
  est.p_hat = static_cast<double>(violations) / trials;
  std::tie(est.ci_low, est.ci_high) = wilson_ci(violations, trials);
  est.scenario_descriptor = scenario;
  return est;
}
}  // namespace

TEST_CASE("exponential fit recovers planted parameters exactly") {
  std::vector<FitPoint> points;
  for (int x = 2; x <= 6; ++x)
    points.push_back({static_cast<double>(x), 1.0 - 0.9 * std::exp(-0.5 * x)});
  const FitResult fit =
      fit_exponential(points, XDefinition::settings_of_one_party);
  CHECK(fit.a == doctest::Approx(0.9).epsilon(1e-9));
  CHECK(fit.b == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(fit.residual_rms < 1e-12);
  CHECK(fit.points_used == 5);
  CHECK(fit.points_excluded == 0);
}

TEST_CASE("exponential fit rejects bad input and excludes saturated points") {
  CHECK_THROWS_AS(
      fit_exponential({{1, 0.1}, {2, 0.2}}, XDefinition::settings_of_one_party),
      Error);
  CHECK_THROWS_AS(fit_exponential({{1, 0.1}, {1, 0.2}, {2, 0.3}},
                                  XDefinition::settings_of_one_party),
                  Error);
  // Saturated points are dropped (and counted), the rest still fits.
  std::vector<FitPoint> points = {{1, 0.3}, {2, 0.5}, {3, 0.7}, {4, 1.0}};
  const FitResult fit = fit_exponential(points, XDefinition::product_of_settings);
  CHECK(fit.points_excluded == 1);
  CHECK(fit.points_used == 3);
  CHECK(fit.x_definition == XDefinition::product_of_settings);
}

TEST_CASE("gme witness uses the lower confidence bound") {
  const Scenario sc(2, {2, 2, 2});
  // GHZ3-like estimate: clearly witnessed.
  const WitnessReport yes =
      gme_witness(fake_estimate(74688, 100000, sc.to_string()), sc);
  CHECK(yes.verdict == WitnessVerdict::WITNESSED);
  CHECK(yes.threshold == doctest::Approx(2 * (kPi - 3)).epsilon(1e-15));

  // An estimate straddling the threshold stays inconclusive.
  const WitnessReport borderline =
      gme_witness(fake_estimate(28318, 100000, sc.to_string()), sc);
  CHECK(borderline.verdict == WitnessVerdict::INCONCLUSIVE);

  // Wrong scenario shape is an error.
  const Scenario two(2, {2, 2});
  CHECK_THROWS_AS(
      gme_witness(fake_estimate(70000, 100000, two.to_string()), two), Error);
  const Scenario wrong_settings(2, {3, 2, 2});
  CHECK_THROWS_AS(gme_witness(fake_estimate(70000, 100000,
                                            wrong_settings.to_string()),
                              wrong_settings),
                  Error);
}

TEST_CASE("multiplicativity check") {
  const std::string sc2 = "d=2 settings=2x2";
  const std::string sc4 = "d=2 settings=2x2x2x2";
  // Perfect multiplicative data passes.
  const auto a = fake_estimate(28318, 100000, sc2);
  const auto b = fake_estimate(28318, 100000, sc2);
  const auto ab = fake_estimate(48618, 100000, sc4);
  const MultiplicativityReport report = multiplicativity_check(a, b, ab);
  CHECK(report.pass);
  CHECK(report.product == doctest::Approx((1 - 0.28318) * (1 - 0.28318)));

  // Far-off data fails.
  const auto bad = fake_estimate(80000, 100000, sc4);
  CHECK_FALSE(multiplicativity_check(a, b, bad).pass);

  // Product of trivial factors: both sides equal 1.
  const auto zero_a = fake_estimate(0, 10000, sc2);
  const auto zero_ab = fake_estimate(0, 10000, sc4);
  const MultiplicativityReport trivial =
      multiplicativity_check(zero_a, zero_a, zero_ab);
  CHECK(trivial.pass);
  CHECK(trivial.product == 1.0);
  CHECK(trivial.observed == 1.0);
}

TEST_CASE("chsh correlator formula") {
  ChshParams p;
  p.alpha = kPi / 4;
  p.a1 = {0, 0, 1};
  p.b1 = {0, 0, 1};
  p.a2 = {1, 0, 0};
  p.b2 = {1, 0, 0};
  CHECK(chsh_correlator(p, 1, 1) == doctest::Approx(1.0));   // z.z at any alpha
  CHECK(chsh_correlator(p, 2, 2) == doctest::Approx(1.0));   // x.x at alpha=pi/4
  p.alpha = 0.0;
  CHECK(chsh_correlator(p, 2, 2) == doctest::Approx(0.0));   // sin 0 kills x.x
  p.a1 = {2, 0, 0};
  CHECK_THROWS_AS(chsh_correlator(p, 1, 1), Error);
}

TEST_CASE("chsh value and its decomposition") {
  const double s = 1 / std::sqrt(2.0);
  ChshParams tsirelson;
  tsirelson.alpha = kPi / 4;
  tsirelson.a1 = {0, 0, 1};
  tsirelson.a2 = {1, 0, 0};
  tsirelson.b1 = {s, 0, s};
  tsirelson.b2 = {-s, 0, s};
  const ChshValue v = chsh_value(tsirelson);
  CHECK(v.value == doctest::Approx(2 * std::sqrt(2.0)).epsilon(1e-12));
  CHECK(v.from_decomposition == doctest::Approx(v.value).epsilon(1e-12));

  ChshParams all_z;
  all_z.alpha = kPi / 4;
  all_z.a1 = all_z.a2 = all_z.b1 = all_z.b2 = {0, 0, 1};
  const ChshValue vz = chsh_value(all_z);
  CHECK(vz.value == doctest::Approx(2.0));
  CHECK(vz.cz == doctest::Approx(2.0));
  CHECK(vz.cx == doctest::Approx(0.0));
  CHECK(vz.cy == doctest::Approx(0.0));
}

TEST_CASE("decomposition identity and |C_z| <= 2 on random draws") {
  for (std::uint64_t s = 0; s < 2000; ++s) {
    RandomStream rng(17, s);
    ChshParams p;
    p.alpha = rng.next_double() * kPi / 2;
    for (auto* vec : {&p.a1, &p.a2, &p.b1, &p.b2}) {
      const double z = 1.0 - 2.0 * rng.next_double();
      const double phi = 2.0 * kPi * rng.next_double();
      const double rxy = std::sqrt(std::max(0.0, 1.0 - z * z));
      (*vec) = {rxy * std::cos(phi), rxy * std::sin(phi), z};
    }
    const ChshValue v = chsh_value(p);
    CHECK(std::abs(v.value - v.from_decomposition) < 1e-12);
    CHECK(std::abs(v.cz) <= 2.0 + 1e-12);
  }
}

TEST_CASE("monotonicity in alpha when C_x - C_y > 0") {
  RandomStream rng(19, 0);
  for (int rep = 0; rep < 200; ++rep) {
    ChshParams p;
    for (auto* vec : {&p.a1, &p.a2, &p.b1, &p.b2}) {
      const double z = 1.0 - 2.0 * rng.next_double();
      const double phi = 2.0 * kPi * rng.next_double();
      const double rxy = std::sqrt(std::max(0.0, 1.0 - z * z));
      (*vec) = {rxy * std::cos(phi), rxy * std::sin(phi), z};
    }
    p.alpha = 0.0;
    ChshValue v = chsh_value(p);
    if (v.cx - v.cy <= 0) continue;
    double prev = -1e300;
    for (double alpha = 0.0; alpha <= kPi / 4 + 1e-12; alpha += kPi / 32) {
      p.alpha = alpha;
      const double value = chsh_value(p).from_decomposition;
      CHECK(value >= prev - 1e-12);
      prev = value;
    }
  }
}

TEST_CASE("correlator algebra agrees with the measurement pipeline") {
  RandomStream rng(23, 0);
  for (int rep = 0; rep < 50; ++rep) {
    const double alpha = rng.next_double() * kPi / 2;
    std::array<double, 3> a, b;
    for (auto* vec : {&a, &b}) {
      const double z = 1.0 - 2.0 * rng.next_double();
      const double phi = 2.0 * kPi * rng.next_double();
      const double rxy = std::sqrt(std::max(0.0, 1.0 - z * z));
      (*vec) = {rxy * std::cos(phi), rxy * std::sin(phi), z};
    }
    ChshParams p;
    p.alpha = alpha;
    p.a1 = a;
    p.b1 = b;
    p.a2 = {0, 0, 1};
    p.b2 = {0, 0, 1};
    const double direct = chsh_correlator(p, 1, 1);
    const double piped = chsh_correlator_via_behavior(alpha, a, b);
    CHECK(std::abs(direct - piped) < 1e-10);
  }
}

TEST_CASE("appendix lemma finds no deficit") {
  const LemmaReport report = appendix_lemma_check(20000, 3);
  CHECK(report.pass);
  CHECK(report.deficits == 0);
  CHECK(report.violating > 0);  // some random draws do violate CHSH
  CHECK(report.max_deficit == 0.0);
}

TEST_CASE("scan over psi3 yields the W state at theta = pi/2") {
  const Scenario sc(2, {2, 2, 2});
  EstimateOptions opt;
  opt.trials = 400;
  opt.seed = 9;
  opt.workers = 2;
  const auto curve =
      scan_alpha(ScanFamily::psi3_theta, {0.0, kPi / 2}, sc, opt);
  REQUIRE(curve.size() == 2);
  // theta = 0 is the product state |111>: never violates.
  CHECK(curve[0].estimate.violations == 0);
  // theta = pi/2 is W3: behaves like a genuinely entangled state.
  CHECK(curve[1].estimate.p_hat > 0.3);
}
