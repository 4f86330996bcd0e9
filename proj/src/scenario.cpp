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

#include "scenario.hpp"

#include <algorithm>
#include <limits>

#include "errors.hpp"

namespace pvbell {

namespace {

// a*b with overflow saturation to max.
std::uint64_t mul_sat(std::uint64_t a, std::uint64_t b) {
  if (a != 0 && b > std::numeric_limits<std::uint64_t>::max() / a)
    return std::numeric_limits<std::uint64_t>::max();
  return a * b;
}

}  // namespace

Scenario::Scenario(int local_dim, std::vector<int> settings,
                   std::uint64_t strategy_cap)
    : local_dim_(local_dim), settings_(std::move(settings)), cap_(strategy_cap) {
  if (local_dim_ < 2) fail(Errc::invalid_argument, "local dimension must be >= 2");
  if (settings_.empty())
    fail(Errc::invalid_argument, "scenario needs at least one party");
  for (int m : settings_) {
    if (m < 1) fail(Errc::invalid_argument, "every party needs >= 1 setting");
  }

  std::uint64_t dim = 1, tuples = 1, strategies = 1;
  for (int m : settings_) {
    dim = mul_sat(dim, static_cast<std::uint64_t>(local_dim_));
    tuples = mul_sat(tuples, static_cast<std::uint64_t>(m));
    for (int j = 0; j < m; ++j)
      strategies = mul_sat(strategies, static_cast<std::uint64_t>(local_dim_));
  }
  num_strategies_ = strategies;
  if (strategies > cap_) {
    fail(Errc::cap_exceeded,
         "scenario requires " + std::to_string(strategies) +
             " joint strategies, exceeding the cap of " + std::to_string(cap_));
  }
  state_dim_ = static_cast<std::int64_t>(dim);
  setting_tuples_ = static_cast<std::int64_t>(tuples);
}

bool Scenario::uniform_settings() const noexcept {
  return std::all_of(settings_.begin(), settings_.end(),
                     [&](int m) { return m == settings_.front(); });
}

std::string Scenario::to_string() const {
  std::string out = "d=" + std::to_string(local_dim_) + " settings=";
  for (std::size_t i = 0; i < settings_.size(); ++i) {
    if (i) out += 'x';
    out += std::to_string(settings_[i]);
  }
  return out;
}

}  // namespace pvbell
