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
#include <array>
#include <vector>

#include "rng.hpp"
#include "scenario.hpp"
#include "state.hpp"

namespace pvbell {

// One projective measurement: outcome r corresponds to column r of the
// generating unitary.
struct MeasurementBasis {
  int party_dim = 0;
  Eigen::MatrixXcd columns;    // d x d unitary, orthonormal columns
  std::vector<double> angles;  // generating parameters, in draw order
};

// Largest deviation of columns^dagger * columns from the identity.
double unitarity_deviation(const MeasurementBasis& basis);

// 2x2 unitary from three angles:
//   [  cos(phi) e^{i psi}   sin(phi) e^{i chi}  ]
//   [ -sin(phi) e^{-i chi}  cos(phi) e^{-i psi} ]
// psi and chi are taken mod 2pi; phi is clamped to [0, pi/2].
MeasurementBasis qubit_unitary(double phi, double psi, double chi);

// 3x3 unitary from eight angles (phi1, psi1, chi1, phi2, psi2, chi2,
// phi3, psi3), the product of three two-level blocks acting on rows/columns
// (0,1), (0,2) and (1,2) in that order.
MeasurementBasis qutrit_unitary(const std::array<double, 8>& angles);

// Eigenbasis of a qubit observable n.sigma for a unit Bloch vector n;
// outcome 0 is the +1 eigenvector.
MeasurementBasis bloch_basis(double nx, double ny, double nz);

enum class SamplingMode {
  independent,              // fresh Haar basis per party and setting
  identical_across_parties  // one list of bases shared by all parties
};

// Ordered measurement choices for every party: bases[i][j] is party i's
// j-th observable.
struct SettingsAssignment {
  std::vector<std::vector<MeasurementBasis>> bases;
};

// Draws random bases for the whole scenario.  psi, chi are uniform on
// [0, 2pi); the mixing angles come from arcsin(xi^(1/2)) draws except the
// qutrit (0,2)-block angle, which uses arcsin(xi^(1/4)) — the ensemble the
// published violation frequencies were computed with.  All draws are
// independent per party and per setting; in identical mode one party's list
// is drawn and copied (requires equal m_i).
SettingsAssignment sample_settings(const Scenario& scenario, RandomStream& rng,
                                   SamplingMode mode = SamplingMode::independent);

// Joint outcome probabilities for every setting tuple.  Storage is flat:
// value(k, r) with k the setting-tuple index and r the outcome-tuple index,
// both mixed-radix with party 1 most significant.
struct Behavior {
  int local_dim = 0;
  std::vector<int> settings;
  std::int64_t num_outcomes = 0;  // d^N
  std::vector<double> table;      // size (prod m_i) * d^N

  double value(std::int64_t setting_tuple, std::int64_t outcome_tuple) const {
    return table[setting_tuple * num_outcomes + outcome_tuple];
  }
  int num_parties() const { return static_cast<int>(settings.size()); }
  std::int64_t num_setting_tuples() const {
    return static_cast<std::int64_t>(table.size()) / num_outcomes;
  }

  // Largest |sum_r P(r|k) - 1| over setting tuples.
  double normalization_deviation() const;
  // Largest change of any party-marginal when only unmeasured partners'
  // settings change; zero for quantum behaviors up to rounding.
  double no_signaling_deviation() const;
};

// Evaluates P(r|k) = Tr(rho |v^1_{k_1}><v^1_{k_1}| (x) ... ) for all setting
// and outcome tuples.  Entries are clamped to [0, 1].
Behavior behavior(const State& rho, const SettingsAssignment& settings,
                  const Scenario& scenario);

}  // namespace pvbell
