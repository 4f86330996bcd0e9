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

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "estimator.hpp"

namespace pvbell {

// Threshold 2(pi-3): the largest probability of violation any two-qubit
// state can reach with two binary settings per party; exceeding it with
// three qubits witnesses genuine tripartite entanglement.
double gme_threshold();

// --- exponential fit -------------------------------------------------------

enum class XDefinition { settings_of_one_party, product_of_settings };

struct FitPoint {
  double x = 0.0;
  double pv = 0.0;
};

struct FitResult {
  double a = 0.0;
  double b = 0.0;
  double residual_rms = 0.0;  // in probability units
  XDefinition x_definition = XDefinition::settings_of_one_party;
  int points_used = 0;
  int points_excluded = 0;  // pv >= 1, transform undefined
};

// Least-squares fit of p_v(x) = 1 - a e^{-bx}, linear in the transformed
// coordinates log(1 - p_v) = log a - b x.  Points with pv >= 1 are excluded
// (and counted); at least three usable points are required and x must be
// strictly increasing.
FitResult fit_exponential(const std::vector<FitPoint>& points,
                          XDefinition x_definition);

// --- GME witness -----------------------------------------------------------

enum class WitnessVerdict { WITNESSED, INCONCLUSIVE };

struct WitnessReport {
  WitnessVerdict verdict = WitnessVerdict::INCONCLUSIVE;
  double threshold = 0.0;  // 2(pi-3)
  double margin = 0.0;     // ci_low - threshold
};

// One-sided certificate: WITNESSED iff the estimate's lower confidence bound
// exceeds 2(pi-3).  Requires the 3-qubit, 2x2x2 scenario.
WitnessReport gme_witness(const ViolationEstimate& estimate,
                          const Scenario& scenario);

// --- multiplicativity ------------------------------------------------------

struct MultiplicativityReport {
  bool pass = false;
  double product = 0.0;     // (1 - p_a)(1 - p_b)
  double observed = 0.0;    // 1 - p_ab
  double difference = 0.0;  // |product - observed|
  double tolerance = 0.0;   // propagated 95% bound
};

// Checks that the local-realism probabilities multiply under tensoring:
// (1-p_a)(1-p_b) must match 1-p_ab within the CIs propagated in quadrature.
MultiplicativityReport multiplicativity_check(const ViolationEstimate& p_a,
                                              const ViolationEstimate& p_b,
                                              const ViolationEstimate& p_ab);

// --- alpha scans -----------------------------------------------------------

enum class ScanFamily { qubit_ghz, qutrit_ghz, psi3_theta };

struct ScanPoint {
  double alpha = 0.0;  // radians
  ViolationEstimate estimate;
};

// One estimate per grid point.  All points share the seed, so they see the
// same measurement draws; pointwise comparisons along the curve then benefit
// from common random numbers.
std::vector<ScanPoint> scan_alpha(ScanFamily family,
                                  const std::vector<double>& grid,
                                  const Scenario& scenario,
                                  const EstimateOptions& options);

// --- CHSH(alpha) algebra (appendix machinery) --------------------------

struct ChshParams {
  double alpha = 0.0;        // state angle of sin(a)|00> + cos(a)|11>
  std::array<double, 3> a1{}, a2{}, b1{}, b2{};  // unit Bloch vectors
};

// <AB> = a_z b_z + sin(2 alpha)(a_x b_x - a_y b_y) for the chosen setting
// pair (i, j in {1, 2}).
double chsh_correlator(const ChshParams& params, int i, int j);

struct ChshValue {
  double value = 0.0;  // E11 + E12 + E21 - E22
  double cx = 0.0, cy = 0.0, cz = 0.0;
  double from_decomposition = 0.0;  // cz + sin(2 alpha)(cx - cy)
};

ChshValue chsh_value(const ChshParams& params);

// Same correlator, but evaluated through the full pipeline: GHZ(alpha)
// state, Bloch eigenbases, behavior table.  Cross-checks the algebra.
double chsh_correlator_via_behavior(double alpha,
                                    const std::array<double, 3>& a,
                                    const std::array<double, 3>& b);

struct LemmaReport {
  std::uint64_t samples = 0;
  std::uint64_t violating = 0;  // draws with CHSH(alpha) > 2
  std::uint64_t deficits = 0;   // CHSH(pi/4) < CHSH(alpha) - 1e-12
  double max_deficit = 0.0;
  bool pass = false;
};

// Random search for counterexamples to the monotonicity lemma: whenever the
// partially entangled state violates CHSH, the maximally entangled state
// violates at least as much with the same measurements.
LemmaReport appendix_lemma_check(std::uint64_t samples, std::uint64_t seed);

struct AppendixReport {
  LemmaReport lemma;
  double max_decomposition_dev = 0.0;  // |sum-of-correlators - decomposition|
  double max_pipeline_dev = 0.0;       // |algebra - behavior pipeline|
  bool pass = false;
};

// Bundles the lemma search with random agreement checks of the two CHSH
// evaluations (tolerance 1e-12) and of the correlator algebra against the
// measurement pipeline (tolerance 1e-10).
AppendixReport appendix_check(std::uint64_t lemma_samples,
                              std::uint64_t algebra_samples,
                              std::uint64_t pipeline_samples,
                              std::uint64_t seed);

}  // namespace pvbell
