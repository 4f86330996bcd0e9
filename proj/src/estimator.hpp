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

#include <atomic>
#include <cstdint>
#include <string>
#include <utility>

#include "local_model.hpp"
#include "measurement.hpp"
#include "scenario.hpp"
#include "state.hpp"

namespace pvbell {

// A run is flagged invalid when solver failures reach this fraction of the
// trial budget.
inline constexpr double kMaxFailureRate = 1e-4;

struct ViolationEstimate {
  std::uint64_t trials = 0;     // requested budget
  std::uint64_t completed = 0;  // == trials unless interrupted
  std::uint64_t violations = 0;
  std::uint64_t solver_failures = 0;
  double p_hat = 0.0;
  double ci_low = 0.0;
  double ci_high = 1.0;
  std::uint64_t seed = 0;
  SamplingMode mode = SamplingMode::independent;
  std::string state_descriptor;
  std::string scenario_descriptor;
  double wall_time_s = 0.0;
  bool interrupted = false;
};

struct EstimateOptions {
  std::uint64_t trials = 0;
  std::uint64_t seed = 0;
  SamplingMode mode = SamplingMode::independent;
  double tolerance = kDefaultFeasibilityTol;
  int workers = 0;  // 0 = hardware concurrency
  // Checkpointing: persists running counts every `checkpoint_interval`
  // trials; an existing file resumes the run (after consistency checks).
  std::string checkpoint_path;
  std::uint64_t checkpoint_interval = 65536;
  bool require_checkpoint = false;  // fail instead of starting fresh
  // Cooperative cancellation (e.g. SIGINT): when set, the run stops at the
  // next trial boundary, writes a checkpoint if configured, and returns a
  // result marked interrupted.
  const std::atomic<bool>* cancel = nullptr;
  // Testing hook with the same code path as cancellation: stop after at
  // least this many trials have been scheduled (0 = run to completion).
  std::uint64_t stop_after = 0;
};

// Monte Carlo estimate of the probability of violation: samples measurement
// settings per trial, computes the behavior, and tests local-model
// feasibility.  Trial i draws from substream i of the seed, so the outcome
// is a pure function of (state, scenario, seed, trials) independent of the
// worker count or interruptions.
ViolationEstimate estimate_pv(const State& state, const Scenario& scenario,
                              const EstimateOptions& options);

// Wilson score interval at 95% confidence (z = 1.959964).
std::pair<double, double> wilson_ci(std::uint64_t successes,
                                    std::uint64_t trials, double level = 0.95);

struct OracleCheckReport {
  std::uint64_t trials = 0;
  std::uint64_t compared = 0;
  std::uint64_t skipped_near_boundary = 0;
  std::uint64_t disagreements = 0;
  std::uint64_t solver_failures = 0;
};

// Cross-validates solve_feasibility against the CHSH oracle (in the 2x2
// qubit scenario) and the vertex-membership oracle on random trials.  Draws
// whose decision sits inside the boundary band are skipped: for the CHSH
// scenario the band is max|CHSH| within 1e-7 of 2, otherwise a phase-1
// margin within a decade of the tolerance.
OracleCheckReport oracle_check(const State& state, const Scenario& scenario,
                               std::uint64_t trials, std::uint64_t seed,
                               double tolerance = kDefaultFeasibilityTol);

}  // namespace pvbell
