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

#include <cstdint>
#include <string>
#include <vector>

#include "measurement.hpp"
#include "scenario.hpp"

namespace pvbell {

inline constexpr double kDefaultFeasibilityTol = 1e-8;

// Joint deterministic strategies of a scenario.  Strategy sigma assigns an
// outcome to every (party, setting) pair; sigma decomposes into per-party
// codes with party 1 most significant, and each per-party code is the base-d
// number whose digit j (setting 1 most significant) is the outcome of
// setting j.
class StrategySpace {
 public:
  explicit StrategySpace(const Scenario& scenario);

  std::uint64_t total() const noexcept { return total_; }
  int num_parties() const noexcept { return static_cast<int>(m_.size()); }

  // Outcome of party i's setting k under joint strategy sigma.
  int outcome(std::uint64_t sigma, int party, int setting) const {
    const std::uint64_t code = (sigma / stride_[party]) % party_size_[party];
    return digits_[party][code * m_[party] + setting];
  }

  // Outcome-tuple index produced by sigma at the given decoded setting tuple.
  std::int64_t outcome_tuple(std::uint64_t sigma, const int* k) const {
    std::int64_t r = 0;
    for (int i = 0; i < num_parties(); ++i)
      r = r * d_ + outcome(sigma, i, k[i]);
    return r;
  }

 private:
  int d_;
  std::vector<int> m_;
  std::vector<std::uint64_t> party_size_;  // d^{m_i}
  std::vector<std::uint64_t> stride_;      // suffix products
  std::vector<std::vector<std::uint8_t>> digits_;
  std::uint64_t total_;
};

// The feasibility program deciding whether a behavior admits a local model:
// one nonnegative variable per joint deterministic strategy, one equality
// row per (setting tuple, outcome tuple) plus a final normalization row.
// The 0/1 incidence matrix is represented implicitly.
class LocalProgram {
 public:
  LocalProgram(const Scenario& scenario, const Behavior& behavior);

  const Scenario& scenario() const noexcept { return scenario_; }
  std::int64_t num_vars() const noexcept {
    return static_cast<std::int64_t>(strategies_.total());
  }
  // Marginal rows only, excluding the normalization row.
  std::int64_t num_marginal_rows() const noexcept { return marginal_rows_; }
  // Including the trailing normalization row.
  std::int64_t num_rows() const noexcept { return marginal_rows_ + 1; }

  double rhs(std::int64_t row) const { return rhs_.at(row); }
  const std::vector<double>& rhs_vector() const noexcept { return rhs_; }
  int matrix_entry(std::int64_t row, std::int64_t var) const;

  const StrategySpace& strategies() const noexcept { return strategies_; }

  // Deviations of the underlying behavior, measured at construction; used to
  // pick the internal solve path.
  double normalization_deviation() const noexcept { return norm_dev_; }
  double no_signaling_deviation() const noexcept { return ns_dev_; }

  // One line per row: the num_vars() matrix coefficients then the rhs.
  void dump(const std::string& path) const;

 private:
  friend class Phase1Solver;
  Scenario scenario_;
  StrategySpace strategies_;
  std::int64_t marginal_rows_;
  std::vector<double> rhs_;  // marginal rows then 1.0
  double norm_dev_ = 0.0;
  double ns_dev_ = 0.0;
};

enum class VerdictKind { LOCAL, NONLOCAL };

struct Verdict {
  VerdictKind kind = VerdictKind::LOCAL;
  // Phase-1 optimum: total residual infeasibility, >= 0.
  double margin = 0.0;
  // kind == LOCAL: weights over deterministic strategies reproducing the
  // behavior (size num_vars, almost all zero).
  std::vector<double> model;
  // kind == NONLOCAL: Farkas certificate y over the program rows
  // (normalization row last): y.A <= 0 componentwise and y.b > 0.
  std::vector<double> certificate;
  // Simplex pivots spent (diagnostic).
  std::int64_t iterations = 0;
};

// Reusable per-scenario solver acceleration: a feasible starting basis
// computed once from the scenario's barycenter behavior.  The constraint
// matrix depends only on the scenario, so runs over many behaviors of the
// same scenario restore feasibility from this basis with a short dual
// simplex pass instead of a full phase-1 solve.  Immutable after
// construction and shared across worker threads.
class SolveContext {
 public:
  explicit SolveContext(const Scenario& scenario);

  const Scenario& scenario() const noexcept { return scenario_; }
  bool valid() const noexcept { return valid_; }

  // Strategy id per reduced row, and the column-major inverse of that basis.
  const std::vector<std::int64_t>& warm_basis() const noexcept { return basis_; }
  const std::vector<double>& warm_binv() const noexcept { return binv_; }

 private:
  Scenario scenario_;
  std::vector<std::int64_t> basis_;
  std::vector<double> binv_;
  bool valid_ = false;
};

// Phase-1 simplex feasibility test.  Deterministic: Dantzig pricing with
// lowest-index tie breaking and a Bland fallback against cycling.  Throws
// Error(solver_failure) if the iteration limit is hit or the verdict fails
// its posterior soundness check; never misclassifies silently.  A context
// for the same scenario only accelerates the solve; verdicts and margins
// are unchanged.
Verdict solve_feasibility(const LocalProgram& lp,
                          double tol = kDefaultFeasibilityTol,
                          const SolveContext* context = nullptr);

struct BellFunctional {
  // One coefficient per (setting tuple, outcome tuple) behavior entry.
  std::vector<double> coefficients;
  double local_bound = 0.0;    // exhaustive max over deterministic strategies
  double quantum_value = 0.0;  // inner product with the tested behavior
};

// Turns a NONLOCAL verdict's certificate into a violated Bell functional.
BellFunctional extract_bell_functional(const Verdict& verdict,
                                       const LocalProgram& lp);

// Exact decider for the 2-party, 2-setting, 2-outcome scenario: evaluates
// all eight sign variants of the CHSH expression; NONLOCAL iff any exceeds
// 2 + 1e-9.
VerdictKind chsh_oracle(const Behavior& behavior);

// All eight |CHSH| variant values' maximum (exposed for band exclusion).
double chsh_max_violation(const Behavior& behavior);

// Independent membership test: Wolfe's min-norm-point algorithm over the
// convex hull of deterministic behaviors, assembled in full behavior space
// with its own strategy enumeration.  Shares no code with solve_feasibility.
VerdictKind vertex_membership_oracle(const Behavior& behavior,
                                     const Scenario& scenario,
                                     double distance_tol = 1e-8);

}  // namespace pvbell

