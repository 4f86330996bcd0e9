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

#include "state.hpp"

#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <numbers>
#include <numeric>

#include "errors.hpp"
#include "text_io.hpp"

using namespace pvbell;

namespace {

constexpr double kPi = std::numbers::pi;

// Applies a permutation of parties to a pure state's amplitudes.
Eigen::VectorXcd permute_parties(const Eigen::VectorXcd& amps, int n, int d,
                                 const std::vector<int>& perm) {
  Eigen::VectorXcd out(amps.size());
  for (Eigen::Index idx = 0; idx < amps.size(); ++idx) {
    int digits[16];
    Eigen::Index rem = idx;
    for (int i = n - 1; i >= 0; --i) {
      digits[i] = static_cast<int>(rem % d);
      rem /= d;
    }
    Eigen::Index target = 0;
    for (int i = 0; i < n; ++i) target = target * d + digits[perm[i]];
    out[target] = amps[idx];
  }
  return out;
}

std::string temp_path(const char* name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

}  // namespace

TEST_CASE("ghz catalog states") {
  const State bell = make_ghz(2, 2, kPi / 4);
  CHECK(bell.pure_state().amplitudes[0].real() == doctest::Approx(1 / std::sqrt(2.0)));
  CHECK(bell.pure_state().amplitudes[3].real() == doctest::Approx(1 / std::sqrt(2.0)));
  CHECK(std::abs(bell.pure_state().amplitudes[1]) == 0.0);

  // sin(0) = 0 leaves only |111>.
  const State product = make_ghz(3, 2, 0.0);
  CHECK(std::abs(product.pure_state().amplitudes[7] - 1.0) < 1e-15);

  // Qutrit GHZ at alpha = pi/2: the cosine branch vanishes, |00> remains.
  const State qutrit_pole = make_ghz(2, 3, kPi / 2);
  CHECK(std::abs(qutrit_pole.pure_state().amplitudes[0] - 1.0) < 1e-12);

  // Literal formula at alpha = 0: (|11> + |22>)/sqrt(2).
  const State qutrit_zero = make_ghz(2, 3, 0.0);
  CHECK(std::abs(qutrit_zero.pure_state().amplitudes[4]) ==
        doctest::Approx(1 / std::sqrt(2.0)));
  CHECK(std::abs(qutrit_zero.pure_state().amplitudes[8]) ==
        doctest::Approx(1 / std::sqrt(2.0)));
  CHECK(std::abs(qutrit_zero.pure_state().amplitudes[0]) < 1e-15);

  CHECK_THROWS_AS(make_ghz(2, 4, 0.1), Error);
  CHECK_THROWS_AS(make_ghz(2, 2, -0.1), Error);
}

TEST_CASE("dicke states") {
  const State w3 = make_dicke(3, 1);
  const double r3 = 1 / std::sqrt(3.0);
  CHECK(w3.pure_state().amplitudes[0b001].real() == doctest::Approx(r3));
  CHECK(w3.pure_state().amplitudes[0b010].real() == doctest::Approx(r3));
  CHECK(w3.pure_state().amplitudes[0b100].real() == doctest::Approx(r3));

  const State d42 = make_dicke(4, 2);
  int support = 0;
  for (Eigen::Index i = 0; i < 16; ++i)
    if (std::abs(d42.pure_state().amplitudes[i]) > 0) {
      ++support;
      CHECK(d42.pure_state().amplitudes[i].real() ==
            doctest::Approx(1 / std::sqrt(6.0)));
    }
  CHECK(support == 6);

  const State w2 = make_dicke(2, 1);
  CHECK(w2.pure_state().amplitudes[1].real() == doctest::Approx(1 / std::sqrt(2.0)));
  CHECK(w2.pure_state().amplitudes[2].real() == doctest::Approx(1 / std::sqrt(2.0)));

  CHECK_THROWS_AS(make_dicke(3, 3), Error);
  CHECK_THROWS_AS(make_dicke(3, 0), Error);
}

TEST_CASE("named states match their formulas") {
  const State cluster = make_named(NamedState::cluster4);
  const auto& c = cluster.pure_state().amplitudes;
  CHECK(c[0b0000].real() == doctest::Approx(0.5));
  CHECK(c[0b0011].real() == doctest::Approx(0.5));
  CHECK(c[0b1100].real() == doctest::Approx(0.5));
  CHECK(c[0b1111].real() == doctest::Approx(-0.5));

  const State aharonov = make_named(NamedState::aharonov3);
  int plus = 0, minus = 0;
  for (Eigen::Index i = 0; i < 27; ++i) {
    const double re = aharonov.pure_state().amplitudes[i].real();
    if (re > 1e-12) ++plus;
    if (re < -1e-12) ++minus;
    if (std::abs(re) > 1e-12)
      CHECK(std::abs(re) == doctest::Approx(1 / std::sqrt(6.0)));
  }
  CHECK(plus == 3);
  CHECK(minus == 3);

  // Werner state spectrum, checked against direct diagonalization.
  const State werner = make_named(NamedState::werner2);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(
      werner.density_matrix().entries);
  auto eigs = solver.eigenvalues();
  std::sort(eigs.data(), eigs.data() + eigs.size());
  CHECK(eigs[3] == doctest::Approx(0.780330085889911).epsilon(1e-12));
  for (int i = 0; i < 3; ++i)
    CHECK(eigs[i] == doctest::Approx(0.073223304703363).epsilon(1e-12));

  // Smolin state: rank 4, uniform spectrum on the support.
  const State smolin = make_named(NamedState::smolin4);
  CHECK(smolin.ensemble().weights.size() == 4);
  for (double w : smolin.ensemble().weights) CHECK(w == doctest::Approx(0.25));

  CHECK_THROWS_AS(named_state_from_string("nope"), Error);
}

TEST_CASE("psi3 family") {
  const State w = make_psi3(kPi / 2);
  const State w3 = make_dicke(3, 1);
  CHECK((w.pure_state().amplitudes - w3.pure_state().amplitudes).norm() < 1e-15);

  const State product = make_psi3(0.0);
  CHECK(std::abs(product.pure_state().amplitudes[7] - 1.0) < 1e-15);

  const State mixed_angle = make_psi3(kPi / 4);
  CHECK(mixed_angle.pure_state().amplitudes.norm() == doctest::Approx(1.0));
}

TEST_CASE("tensor products") {
  const State ghz = make_ghz(2, 2, kPi / 4);
  const State zero = make_zero(1, 2);
  const State three = tensor(ghz, zero);
  CHECK(three.num_parties() == 3);
  CHECK(three.pure_state().amplitudes[0b000].real() ==
        doctest::Approx(1 / std::sqrt(2.0)));
  CHECK(three.pure_state().amplitudes[0b110].real() ==
        doctest::Approx(1 / std::sqrt(2.0)));

  const State two = tensor(make_zero(1, 2), make_zero(1, 2));
  CHECK(std::abs(two.pure_state().amplitudes[0] - 1.0) < 1e-15);

  // Mixed (x) pure keeps trace 1.
  const State wg = tensor(make_named(NamedState::werner2), ghz);
  CHECK(wg.density_matrix().entries.trace().real() == doctest::Approx(1.0));

  // Associativity up to entrywise 1e-12.
  const State a = make_ghz(1, 2, 0.3), b = make_ghz(1, 2, 0.9), c = make_zero(1, 2);
  const State left = tensor(tensor(a, b), c);
  const State right = tensor(a, tensor(b, c));
  CHECK((left.pure_state().amplitudes - right.pure_state().amplitudes)
            .cwiseAbs()
            .maxCoeff() < 1e-12);

  CHECK_THROWS_AS(tensor(make_ghz(2, 2, 0.1), make_ghz(2, 3, 0.1)), Error);
}

TEST_CASE("mix") {
  const State zero = make_zero(1, 2);
  PureState one;
  one.num_parties = 1;
  one.local_dim = 2;
  one.amplitudes = Eigen::VectorXcd::Zero(2);
  one.amplitudes[1] = 1.0;
  const State one_state = State::pure(std::move(one), "one");

  const State maximally_mixed = mix({zero, one_state}, {0.5, 0.5});
  CHECK((maximally_mixed.density_matrix().entries -
         0.5 * Eigen::MatrixXcd::Identity(2, 2))
            .cwiseAbs()
            .maxCoeff() < 1e-15);

  const State same = mix({zero}, {1.0});
  CHECK((same.density_matrix().entries - zero.density_matrix().entries)
            .cwiseAbs()
            .maxCoeff() < 1e-15);

  CHECK_THROWS_AS(mix({zero, one_state}, {0.6, 0.6}), Error);
  CHECK_THROWS_AS(mix({zero, one_state}, {1.5, -0.5}), Error);
}

TEST_CASE("random pure states") {
  const State a = random_pure_state(3, 2, 5);
  const State b = random_pure_state(3, 2, 5);
  const State c = random_pure_state(3, 2, 6);
  CHECK(a.pure_state().amplitudes.norm() == doctest::Approx(1.0));
  CHECK((a.pure_state().amplitudes - b.pure_state().amplitudes).norm() == 0.0);
  const double overlap =
      std::norm(a.pure_state().amplitudes.dot(c.pure_state().amplitudes));
  CHECK(overlap < 1.0 - 1e-6);
}

TEST_CASE("catalog states pass invariants and purity") {
  const std::vector<State> catalog = {
      make_ghz(2, 2, kPi / 4),       make_ghz(3, 2, kPi / 4),
      make_ghz(2, 3, 0.6154797),     make_dicke(4, 2),
      make_named(NamedState::singlet4), make_named(NamedState::cluster4),
      make_named(NamedState::aharonov3),
      make_named(NamedState::qutrit_dicke_q1),
      make_named(NamedState::qutrit_dicke_q2),
      make_named(NamedState::qutrit_dicke_q3), make_psi3(0.5)};
  for (const State& s : catalog) {
    validate_pure(s.pure_state());
    // Rank-1 density matrix: second-largest eigenvalue below 1e-10.
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(
        s.density_matrix().entries, Eigen::EigenvaluesOnly);
    auto eigs = solver.eigenvalues();
    std::sort(eigs.data(), eigs.data() + eigs.size());
    CHECK(eigs[eigs.size() - 1] == doctest::Approx(1.0).epsilon(1e-10));
    if (eigs.size() > 1) CHECK(eigs[eigs.size() - 2] < 1e-10);
  }
  validate_density(make_named(NamedState::smolin4).density_matrix());
  validate_density(make_named(NamedState::werner2).density_matrix());
}

TEST_CASE("ghz and dicke are permutation invariant") {
  for (const State& s : {make_ghz(4, 2, kPi / 4), make_dicke(4, 2)}) {
    const auto& amps = s.pure_state().amplitudes;
    for (const std::vector<int>& perm :
         {std::vector<int>{1, 0, 2, 3}, std::vector<int>{3, 2, 1, 0},
          std::vector<int>{2, 3, 0, 1}}) {
      CHECK((permute_parties(amps, 4, 2, perm) - amps).cwiseAbs().maxCoeff() <
            1e-15);
    }
  }
}

TEST_CASE("density matrix file round trip") {
  const std::string path = temp_path("pvbell_test_state.dm");
  const State ghz = make_ghz(2, 2, kPi / 4);
  save_density_matrix(ghz.density_matrix(), path);
  const State loaded = load_density_matrix(path);
  CHECK((loaded.density_matrix().entries - ghz.density_matrix().entries)
            .cwiseAbs()
            .maxCoeff() < 1e-12);
  std::filesystem::remove(path);
}

TEST_CASE("density matrix loader reports the failed invariant") {
  const std::string path = temp_path("pvbell_test_bad.dm");

  {  // trace 0.9
    std::FILE* f = std::fopen(path.c_str(), "w");
    std::fputs("1 2\n0.5+0j 0+0j\n0+0j 0.4+0j\n", f);
    std::fclose(f);
    CHECK_THROWS_WITH_AS(load_density_matrix(path),
                         doctest::Contains("trace"), Error);
  }
  {  // not Hermitian
    std::FILE* f = std::fopen(path.c_str(), "w");
    std::fputs("1 2\n0.5+0j 0.5+0j\n0+0j 0.5+0j\n", f);
    std::fclose(f);
    CHECK_THROWS_WITH_AS(load_density_matrix(path),
                         doctest::Contains("Hermitian"), Error);
  }
  {  // Hermitian, trace 1, but not PSD
    std::FILE* f = std::fopen(path.c_str(), "w");
    std::fputs("# comment line\n1 2\n0.5+0j 0.9+0j\n0.9+0j 0.5+0j\n", f);
    std::fclose(f);
    CHECK_THROWS_WITH_AS(load_density_matrix(path),
                         doctest::Contains("semidefinite"), Error);
  }
  {  // parse failure
    std::FILE* f = std::fopen(path.c_str(), "w");
    std::fputs("1 2\n0.5+0j zzz\n0+0j 0.5+0j\n", f);
    std::fclose(f);
    CHECK_THROWS_AS(load_density_matrix(path), Error);
  }
  {  // identity/4 for two qubits... here d=2, N=1: identity/2
    std::FILE* f = std::fopen(path.c_str(), "w");
    std::fputs("1 2\n0.5+0j 0+0j\n0+0j 0.5+0j\n", f);
    std::fclose(f);
    const State mixed = load_density_matrix(path);
    for (double w : mixed.ensemble().weights) CHECK(w == doctest::Approx(0.5));
  }
  std::filesystem::remove(path);
}

TEST_CASE("complex token parsing") {
  CHECK(parse_complex("0.5-0.5j") == std::complex<double>(0.5, -0.5));
  CHECK(parse_complex("1+0j") == std::complex<double>(1.0, 0.0));
  CHECK(parse_complex("-2.5e-3+1e-4j") == std::complex<double>(-2.5e-3, 1e-4));
  CHECK(parse_complex("0.25") == std::complex<double>(0.25, 0.0));
  CHECK(parse_complex("-0.5j") == std::complex<double>(0.0, -0.5));
  CHECK_THROWS_AS(parse_complex("abc"), Error);
  CHECK_THROWS_AS(parse_complex("1+2"), Error);
  const std::complex<double> z(0.123456789012345, -3.14159);
  CHECK(parse_complex(format_complex(z)) == z);
}

TEST_CASE("percent formatting rounds half to even") {
  CHECK(format_percent3(0.54893) == "54.893");
  CHECK(format_percent3(1.0) == "100.000");
  CHECK(format_percent3(0.0) == "0.000");
  // Exact binary ties resolve to the even neighbour.
  CHECK(format_percent3(56637.0 / 200000.0) == "28.318");
  CHECK(format_percent3(12.5 / 100000.0) == "0.012");
  CHECK(format_percent3(1.5 / 100000.0) == "0.002");
  CHECK(format_percent3(2.5 / 100000.0) == "0.002");
}
