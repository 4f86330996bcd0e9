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

#include "measurement.hpp"

#include <doctest.h>

#include <algorithm>
#include <numbers>

#include "errors.hpp"

using namespace pvbell;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_CASE("qubit unitary matches its closed form") {
  const MeasurementBasis identity = qubit_unitary(0, 0, 0);
  CHECK((identity.columns - Eigen::MatrixXcd::Identity(2, 2)).cwiseAbs().maxCoeff() <
        1e-15);

  const MeasurementBasis rot = qubit_unitary(kPi / 4, 0, 0);
  const double c = std::cos(kPi / 4);
  CHECK(rot.columns(0, 0).real() == doctest::Approx(c));
  CHECK(rot.columns(1, 0).real() == doctest::Approx(-c));
  CHECK(rot.columns(0, 1).real() == doctest::Approx(c));
  CHECK(rot.columns(1, 1).real() == doctest::Approx(c));

  RandomStream rng(2, 0);
  for (int i = 0; i < 50; ++i) {
    const MeasurementBasis b = qubit_unitary(rng.next_double() * kPi / 2,
                                             rng.next_double() * 2 * kPi,
                                             rng.next_double() * 2 * kPi);
    CHECK(unitarity_deviation(b) < 1e-12);
  }
}

TEST_CASE("qutrit unitary block order") {
  const MeasurementBasis identity = qutrit_unitary({0, 0, 0, 0, 0, 0, 0, 0});
  CHECK((identity.columns - Eigen::MatrixXcd::Identity(3, 3)).cwiseAbs().maxCoeff() <
        1e-15);

  // phi1 = pi/2, rest 0: the first block swaps e1 and e2 up to a sign.
  const MeasurementBasis swap = qutrit_unitary({kPi / 2, 0, 0, 0, 0, 0, 0, 0});
  Eigen::Matrix3cd expected;
  expected << 0, 1, 0, -1, 0, 0, 0, 0, 1;
  CHECK((swap.columns - expected).cwiseAbs().maxCoeff() < 1e-15);

  RandomStream rng(3, 0);
  for (int i = 0; i < 50; ++i) {
    std::array<double, 8> a;
    for (double& v : a) v = rng.next_double() * 2 * kPi;
    a[0] = std::fmod(a[0], kPi / 2);
    a[3] = std::fmod(a[3], kPi / 2);
    a[6] = std::fmod(a[6], kPi / 2);
    CHECK(unitarity_deviation(qutrit_unitary(a)) < 1e-12);
  }
}

TEST_CASE("sampled settings satisfy the basis invariants") {
  const Scenario scenario(3, {2, 3});
  RandomStream rng(7, 0);
  const SettingsAssignment settings = sample_settings(scenario, rng);
  REQUIRE(settings.bases.size() == 2);
  CHECK(settings.bases[0].size() == 2);
  CHECK(settings.bases[1].size() == 3);
  for (const auto& party : settings.bases)
    for (const auto& basis : party) CHECK(unitarity_deviation(basis) < 1e-10);
}

TEST_CASE("identical mode copies one party's draws") {
  const Scenario scenario(2, {2, 2, 2});
  RandomStream rng(11, 4);
  const SettingsAssignment settings =
      sample_settings(scenario, rng, SamplingMode::identical_across_parties);
  for (int j = 0; j < 2; ++j) {
    CHECK((settings.bases[0][j].columns - settings.bases[2][j].columns)
              .cwiseAbs()
              .maxCoeff() == 0.0);
  }
  const Scenario uneven(2, {2, 3});
  RandomStream rng2(11, 4);
  CHECK_THROWS_AS(
      sample_settings(uneven, rng2, SamplingMode::identical_across_parties),
      Error);
}

TEST_CASE("first column overlap is Haar uniform (KS test)") {
  // |<0|v_0>|^2 = cos^2(phi) = 1 - xi must be uniform on [0,1].
  const int n = 100000;
  std::vector<double> samples(n);
  const Scenario scenario(2, {1});
  for (int i = 0; i < n; ++i) {
    RandomStream rng(123, static_cast<std::uint64_t>(i));
    const SettingsAssignment s = sample_settings(scenario, rng);
    samples[i] = std::norm(s.bases[0][0].columns(0, 0));
  }
  std::sort(samples.begin(), samples.end());
  double ks = 0.0;
  for (int i = 0; i < n; ++i) {
    const double cdf = samples[i];  // uniform CDF
    ks = std::max(ks, std::abs(cdf - (i + 1.0) / n));
    ks = std::max(ks, std::abs(cdf - static_cast<double>(i) / n));
  }
  // Critical value at significance 0.01 is 1.628 / sqrt(n).
  CHECK(ks < 1.628 / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("behavior of computational-basis measurements") {
  const Scenario scenario(2, {1, 1});
  SettingsAssignment settings;
  settings.bases = {{qubit_unitary(0, 0, 0)}, {qubit_unitary(0, 0, 0)}};

  const Behavior p00 = behavior(make_zero(2, 2), settings, scenario);
  CHECK(p00.value(0, 0) == doctest::Approx(1.0));
  CHECK(p00.value(0, 1) == doctest::Approx(0.0));
  CHECK(p00.value(0, 3) == doctest::Approx(0.0));

  const Behavior ghz = behavior(make_ghz(2, 2, kPi / 4), settings, scenario);
  CHECK(ghz.value(0, 0b00) == doctest::Approx(0.5));
  CHECK(ghz.value(0, 0b11) == doctest::Approx(0.5));
  CHECK(ghz.value(0, 0b01) == doctest::Approx(0.0));
  CHECK(ghz.value(0, 0b10) == doctest::Approx(0.0));
}

TEST_CASE("Tsirelson settings reach CHSH = 2 sqrt 2") {
  const Scenario scenario(2, {2, 2});
  const double s = 1 / std::sqrt(2.0);
  SettingsAssignment settings;
  settings.bases = {{bloch_basis(0, 0, 1), bloch_basis(1, 0, 0)},
                    {bloch_basis(s, 0, s), bloch_basis(-s, 0, s)}};
  const Behavior b = behavior(make_ghz(2, 2, kPi / 4), settings, scenario);
  double chsh = 0.0;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      double e = 0.0;
      for (int r = 0; r < 2; ++r)
        for (int t = 0; t < 2; ++t)
          e += ((r + t) % 2 ? -1 : 1) * b.value(2 * i + j, 2 * r + t);
      chsh += (i == 1 && j == 1) ? -e : e;
    }
  CHECK(chsh == doctest::Approx(2 * std::sqrt(2.0)).epsilon(1e-12));
}

TEST_CASE("behavior normalization and no-signaling") {
  RandomStream rng(17, 0);
  for (int rep = 0; rep < 20; ++rep) {
    const Scenario scenario(rep % 2 ? 3 : 2, rep % 3 ? std::vector<int>{2, 2}
                                                     : std::vector<int>{2, 3, 2});
    const State psi = random_pure_state(scenario.num_parties(),
                                        scenario.local_dim(), 100 + rep);
    RandomStream draw(17, rep);
    const Behavior b = behavior(psi, sample_settings(scenario, draw), scenario);
    CHECK(b.normalization_deviation() < 1e-9);
    CHECK(b.no_signaling_deviation() < 1e-9);
    for (double v : b.table) {
      CHECK(v >= 0.0);
      CHECK(v <= 1.0);
    }
  }
}

TEST_CASE("appending a |0> party leaves the original marginals intact") {
  const Scenario two(2, {2, 2});
  const Scenario three(2, {2, 2, 2});
  const State ghz = make_ghz(2, 2, kPi / 4);
  const State padded = tensor(ghz, make_zero(1, 2));
  RandomStream rng(23, 5);
  const SettingsAssignment base = sample_settings(two, rng);
  RandomStream rng2(23, 6);
  SettingsAssignment extended = base;
  extended.bases.push_back(sample_settings(two, rng2).bases[0]);

  const Behavior small = behavior(ghz, base, two);
  const Behavior big = behavior(padded, extended, three);
  // Marginalize the third party out of the big behavior.
  for (std::int64_t k = 0; k < small.num_setting_tuples(); ++k) {
    for (std::int64_t r = 0; r < small.num_outcomes; ++r) {
      for (int k3 = 0; k3 < 2; ++k3) {
        const double marg = big.value(k * 2 + k3, r * 2 + 0) +
                            big.value(k * 2 + k3, r * 2 + 1);
        CHECK(std::abs(marg - small.value(k, r)) < 1e-12);
      }
    }
  }
}

TEST_CASE("product states factorize") {
  const Scenario one(2, {2});
  const Scenario two(2, {2, 2});
  const State a = random_pure_state(1, 2, 31);
  const State b = random_pure_state(1, 2, 32);
  const State ab = tensor(a, b);
  RandomStream rng(29, 0);
  const SettingsAssignment sa = sample_settings(one, rng);
  const SettingsAssignment sb = sample_settings(one, rng);
  SettingsAssignment joint;
  joint.bases = {sa.bases[0], sb.bases[0]};
  const Behavior pa = behavior(a, sa, one);
  const Behavior pb = behavior(b, sb, one);
  const Behavior pab = behavior(ab, joint, two);
  for (int k1 = 0; k1 < 2; ++k1)
    for (int k2 = 0; k2 < 2; ++k2)
      for (int r1 = 0; r1 < 2; ++r1)
        for (int r2 = 0; r2 < 2; ++r2)
          CHECK(std::abs(pab.value(k1 * 2 + k2, r1 * 2 + r2) -
                         pa.value(k1, r1) * pb.value(k2, r2)) < 1e-12);
}
