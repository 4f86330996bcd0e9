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

#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace pvbell {

// Computational-basis convention used throughout: |r^1 r^2 ... r^N> maps to
// index sum_i r^i * d^(N-1-i), i.e. party 1 is the most significant digit.

struct PureState {
  int num_parties = 0;
  int local_dim = 0;
  Eigen::VectorXcd amplitudes;  // length d^N, unit norm
};

struct DensityMatrix {
  int num_parties = 0;
  int local_dim = 0;
  Eigen::MatrixXcd entries;  // d^N x d^N, Hermitian, trace 1, PSD
};

// Spectral decomposition of a state, the form the behavior computation
// consumes: P(..) = sum_e w_e |<psi_e|w>|^2.
struct SpectralEnsemble {
  std::vector<double> weights;  // nonnegative
  Eigen::MatrixXcd vectors;     // one column per kept eigenvector
};

// Validation tolerances.
inline constexpr double kPureNormTol = 1e-12;
inline constexpr double kHermitianTol = 1e-10;
inline constexpr double kTraceTol = 1e-10;
inline constexpr double kPsdTol = 1e-10;
inline constexpr double kMixWeightTol = 1e-12;

void validate_pure(const PureState& psi);
void validate_density(const DensityMatrix& rho);

// A quantum state on N qudits, pure or mixed.  Immutable after construction;
// safe to share across threads.
class State {
 public:
  static State pure(PureState psi, std::string descriptor);
  static State mixed(DensityMatrix rho, std::string descriptor);

  bool is_pure() const noexcept { return pure_ != nullptr; }
  int num_parties() const noexcept { return num_parties_; }
  int local_dim() const noexcept { return local_dim_; }
  Eigen::Index dim() const noexcept { return dim_; }

  const PureState& pure_state() const;          // requires is_pure()
  const DensityMatrix& density_matrix() const;  // materialized on demand
  const SpectralEnsemble& ensemble() const noexcept { return ensemble_; }

  const std::string& descriptor() const noexcept { return descriptor_; }
  // Content hash over the descriptor and amplitudes/entries; used to bind
  // checkpoints to the state they were produced with.
  std::uint64_t fingerprint() const noexcept { return fingerprint_; }

 private:
  State() = default;

  int num_parties_ = 0;
  int local_dim_ = 0;
  Eigen::Index dim_ = 0;
  std::shared_ptr<const PureState> pure_;
  mutable std::shared_ptr<const DensityMatrix> density_;
  SpectralEnsemble ensemble_;
  std::string descriptor_;
  std::uint64_t fingerprint_ = 0;
};

// --- catalog -------------------------------------------------------------

// Generalized GHZ state.  d=2: sin(a)|0..0> + cos(a)|1..1>;
// d=3: sin(a)|0..0> + cos(a)/sqrt(2) (|1..1> + |2..2>).
State make_ghz(int num_parties, int local_dim, double alpha);

// N-qubit Dicke state with e excitations; e=1 is the W state.
State make_dicke(int num_parties, int excitations);

// cos(theta)|111> + sin(theta)|W_3>.
State make_psi3(double theta);

enum class NamedState {
  singlet4,
  cluster4,
  aharonov3,
  qutrit_dicke_q1,
  qutrit_dicke_q2,
  qutrit_dicke_q3,
  smolin4,
  werner2,
};

NamedState named_state_from_string(const std::string& name);
State make_named(NamedState which);

// Kronecker product; party counts add, local dimensions must match.
// Pure (x) pure stays pure, anything else yields a density matrix.
State tensor(const State& a, const State& b);

// Convex combination; weights must be nonnegative and sum to 1.
State mix(const std::vector<State>& states, const std::vector<double>& weights);

// Haar-random pure state: normalized vector of i.i.d. standard complex
// Gaussians.  Deterministic for a given seed.
State random_pure_state(int num_parties, int local_dim, std::uint64_t seed);

// Text format: line 1 "N d", then d^N rows of d^N complex entries written
// re+imj; '#' starts a comment line.  Validates all DensityMatrix
// invariants and reports which one failed.
State load_density_matrix(const std::string& path);
void save_density_matrix(const DensityMatrix& rho, const std::string& path);

// |0...0> on the given number of parties (product state helper).
State make_zero(int num_parties, int local_dim);

std::uint64_t fnv1a64(const void* data, std::size_t size,
                      std::uint64_t seed = 0xcbf29ce484222325ull);

}  // namespace pvbell
