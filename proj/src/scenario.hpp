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

namespace pvbell {

// Default ceiling on the number of joint deterministic strategies
// d^(m_1+...+m_N) a scenario may generate.
inline constexpr std::uint64_t kDefaultStrategyCap = 10'000'000;

// A Bell scenario: N parties, each measuring one of m_i d-outcome projective
// observables on a local d-dimensional system.
class Scenario {
 public:
  Scenario(int local_dim, std::vector<int> settings,
           std::uint64_t strategy_cap = kDefaultStrategyCap);

  int num_parties() const noexcept { return static_cast<int>(settings_.size()); }
  int local_dim() const noexcept { return local_dim_; }
  const std::vector<int>& settings() const noexcept { return settings_; }
  int settings_for(int party) const { return settings_.at(party); }
  std::uint64_t strategy_cap() const noexcept { return cap_; }

  // d^N, the joint Hilbert-space dimension.
  std::int64_t state_dim() const noexcept { return state_dim_; }
  // Product of the m_i.
  std::int64_t num_setting_tuples() const noexcept { return setting_tuples_; }
  // d^N outcome tuples per setting tuple.
  std::int64_t num_outcome_tuples() const noexcept { return state_dim_; }
  // d^(sum m_i) joint deterministic strategies.
  std::uint64_t num_strategies() const noexcept { return num_strategies_; }

  bool uniform_settings() const noexcept;  // all m_i equal

  std::string to_string() const;  // e.g. "d=2 settings=3x2x2"

 private:
  int local_dim_;
  std::vector<int> settings_;
  std::uint64_t cap_;
  std::int64_t state_dim_;
  std::int64_t setting_tuples_;
  std::uint64_t num_strategies_;
};

}  // namespace pvbell
