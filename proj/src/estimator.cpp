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

#include "estimator.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>
#include <vector>

#include "errors.hpp"
#include "rng.hpp"

namespace pvbell {

std::pair<double, double> wilson_ci(std::uint64_t successes,
                                    std::uint64_t trials, double level) {
  if (trials == 0 || successes > trials)
    fail(Errc::invalid_argument, "wilson_ci needs 0 <= successes <= trials, trials >= 1");
  if (std::abs(level - 0.95) > 1e-9)
    fail(Errc::invalid_argument, "wilson_ci supports the 95% level only");
  const double z = 1.959964;
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double center = (p + z2 / (2.0 * n)) / denom;
  const double half =
      z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
  // The boundary cases are exact: zero successes pin the lower end, all
  // successes pin the upper end.
  const double low = successes == 0 ? 0.0 : std::max(0.0, center - half);
  const double high = successes == trials ? 1.0 : std::min(1.0, center + half);
  return {low, high};
}

namespace {

struct CheckpointData {
  std::uint64_t seed = 0;
  std::uint64_t trials = 0;
  std::uint64_t state_fingerprint = 0;
  std::string scenario_descriptor;
  std::string mode;
  double tolerance = 0.0;
  std::uint64_t next_index = 0;
  std::uint64_t violations = 0;
  std::uint64_t failures = 0;
};

std::string checkpoint_payload(const CheckpointData& c) {
  char buf[512];
  std::snprintf(buf, sizeof(buf),
                "pvbell checkpoint v1\n"
                "seed %llu\n"
                "trials %llu\n"
                "state %016llx\n"
                "scenario %s\n"
                "mode %s\n"
                "tol %.17g\n"
                "next %llu\n"
                "violations %llu\n"
                "failures %llu\n",
                static_cast<unsigned long long>(c.seed),
                static_cast<unsigned long long>(c.trials),
                static_cast<unsigned long long>(c.state_fingerprint),
                c.scenario_descriptor.c_str(), c.mode.c_str(), c.tolerance,
                static_cast<unsigned long long>(c.next_index),
                static_cast<unsigned long long>(c.violations),
                static_cast<unsigned long long>(c.failures));
  return buf;
}

void write_checkpoint(const std::string& path, const CheckpointData& c) {
  const std::string payload = checkpoint_payload(c);
  const std::uint64_t sum = fnv1a64(payload.data(), payload.size());
  char tail[40];
  std::snprintf(tail, sizeof(tail), "checksum %016llx\n",
                static_cast<unsigned long long>(sum));
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    if (!out) fail(Errc::io_error, "cannot write checkpoint '" + tmp + "'");
    out << payload << tail;
    if (!out) fail(Errc::io_error, "checkpoint write failed");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) fail(Errc::io_error, "checkpoint rename failed: " + ec.message());
}

CheckpointData read_checkpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(Errc::io_error, "cannot open checkpoint '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  const std::string whole = ss.str();
  const auto pos = whole.rfind("checksum ");
  if (pos == std::string::npos || whole.compare(0, 19, "pvbell checkpoint v") != 0)
    fail(Errc::checkpoint_error, "checkpoint '" + path + "' is malformed");
  const std::string payload = whole.substr(0, pos);
  unsigned long long stored = 0;
  if (std::sscanf(whole.c_str() + pos, "checksum %llx", &stored) != 1)
    fail(Errc::checkpoint_error, "checkpoint '" + path + "' is malformed");
  const auto line_end = whole.find('\n', pos);
  if (line_end != std::string::npos &&
      whole.find_first_not_of(" \t\r\n", line_end) != std::string::npos)
    fail(Errc::checkpoint_error,
         "checkpoint '" + path + "' has trailing content (corrupt file)");
  if (fnv1a64(payload.data(), payload.size()) != stored)
    fail(Errc::checkpoint_error,
         "checkpoint '" + path + "' failed its checksum (corrupt file)");

  CheckpointData c;
  std::istringstream lines(payload);
  std::string line;
  std::getline(lines, line);  // header
  char scen[256] = {0}, mode[64] = {0};
  unsigned long long u = 0;
  while (std::getline(lines, line)) {
    if (std::sscanf(line.c_str(), "seed %llu", &u) == 1) c.seed = u;
    else if (std::sscanf(line.c_str(), "trials %llu", &u) == 1) c.trials = u;
    else if (std::sscanf(line.c_str(), "state %llx", &u) == 1) c.state_fingerprint = u;
    else if (std::sscanf(line.c_str(), "scenario %255[^\n]", scen) == 1) c.scenario_descriptor = scen;
    else if (std::sscanf(line.c_str(), "mode %63s", mode) == 1) c.mode = mode;
    else if (std::sscanf(line.c_str(), "next %llu", &u) == 1) c.next_index = u;
    else if (std::sscanf(line.c_str(), "violations %llu", &u) == 1) c.violations = u;
    else if (std::sscanf(line.c_str(), "failures %llu", &u) == 1) c.failures = u;
    else if (std::sscanf(line.c_str(), "tol %lg", &c.tolerance) == 1) {}
  }
  return c;
}

struct BlockCounts {
  std::uint64_t violations = 0;
  std::uint64_t failures = 0;
};

}  // namespace

ViolationEstimate estimate_pv(const State& state, const Scenario& scenario,
                              const EstimateOptions& options) {
  if (options.trials == 0) fail(Errc::invalid_argument, "need trials >= 1");
  if (state.num_parties() != scenario.num_parties() ||
      state.local_dim() != scenario.local_dim())
    fail(Errc::invalid_argument, "state does not match scenario");
  if (!(options.tolerance > 0.0))
    fail(Errc::invalid_argument, "tolerance must be positive");
  if (options.mode == SamplingMode::identical_across_parties &&
      !scenario.uniform_settings())
    fail(Errc::invalid_argument,
         "identical sampling mode requires equal settings per party");

  const auto t0 = std::chrono::steady_clock::now();
  const std::uint64_t total = options.trials;
  const std::string mode_name =
      options.mode == SamplingMode::independent ? "independent" : "identical";

  // Resume point.
  std::uint64_t start_index = 0;
  std::uint64_t base_violations = 0, base_failures = 0;
  const bool use_checkpoint = !options.checkpoint_path.empty();
  if (use_checkpoint && std::filesystem::exists(options.checkpoint_path)) {
    const CheckpointData c = read_checkpoint(options.checkpoint_path);
    if (c.seed != options.seed || c.trials != options.trials ||
        c.state_fingerprint != state.fingerprint() ||
        c.scenario_descriptor != scenario.to_string() ||
        c.mode != mode_name || c.tolerance != options.tolerance)
      fail(Errc::checkpoint_error,
           "checkpoint '" + options.checkpoint_path +
               "' belongs to a different run configuration; refusing to resume");
    start_index = c.next_index;
    base_violations = c.violations;
    base_failures = c.failures;
  } else if (use_checkpoint && options.require_checkpoint) {
    fail(Errc::checkpoint_error,
         "no checkpoint at '" + options.checkpoint_path + "' to resume from");
  }

  int workers = options.workers;
  if (workers <= 0)
    workers = static_cast<int>(std::thread::hardware_concurrency());
  if (workers < 1) workers = 1;

  const SolveContext solve_context(scenario);

  const std::uint64_t remaining = total - std::min(total, start_index);
  const std::uint64_t block =
      std::max<std::uint64_t>(1, std::min<std::uint64_t>(
          1024, remaining / (16 * static_cast<std::uint64_t>(workers)) + 1));
  const std::uint64_t num_blocks = remaining == 0 ? 0 : (remaining + block - 1) / block;

  std::atomic<std::uint64_t> next_block{0};
  std::atomic<bool> stop{false};
  std::mutex merge_mutex;
  std::map<std::uint64_t, BlockCounts> pending;  // finished, above watermark
  std::uint64_t watermark = 0;  // blocks fully merged
  std::uint64_t merged_violations = base_violations;
  std::uint64_t merged_failures = base_failures;
  std::uint64_t last_checkpoint = start_index;
  std::exception_ptr first_error;

  auto write_progress = [&](std::uint64_t next_index) {
    CheckpointData c;
    c.seed = options.seed;
    c.trials = options.trials;
    c.state_fingerprint = state.fingerprint();
    c.scenario_descriptor = scenario.to_string();
    c.mode = mode_name;
    c.tolerance = options.tolerance;
    c.next_index = next_index;
    c.violations = merged_violations;
    c.failures = merged_failures;
    write_checkpoint(options.checkpoint_path, c);
  };

  auto worker_fn = [&]() {
    std::vector<double> dummy;
    while (true) {
      if (stop.load(std::memory_order_relaxed)) return;
      const std::uint64_t b = next_block.fetch_add(1, std::memory_order_relaxed);
      if (b >= num_blocks) return;
      const std::uint64_t lo = start_index + b * block;
      const std::uint64_t hi = std::min(total, lo + block);
      if (options.stop_after > 0 && lo >= options.stop_after) {
        stop.store(true, std::memory_order_relaxed);
        return;
      }
      BlockCounts counts;
      bool aborted = false;
      for (std::uint64_t trial = lo; trial < hi; ++trial) {
        if (options.cancel != nullptr &&
            options.cancel->load(std::memory_order_relaxed)) {
          stop.store(true, std::memory_order_relaxed);
          aborted = true;
          break;
        }
        try {
          RandomStream rng(options.seed, trial);
          const SettingsAssignment settings =
              sample_settings(scenario, rng, options.mode);
          const Behavior b_table = behavior(state, settings, scenario);
          const LocalProgram lp(scenario, b_table);
          try {
            const Verdict v =
                solve_feasibility(lp, options.tolerance, &solve_context);
            if (v.kind == VerdictKind::NONLOCAL) ++counts.violations;
          } catch (const Error& e) {
            if (e.code() != Errc::solver_failure) throw;
            ++counts.failures;
          }
        } catch (...) {
          std::lock_guard<std::mutex> lock(merge_mutex);
          if (!first_error) first_error = std::current_exception();
          stop.store(true, std::memory_order_relaxed);
          aborted = true;
          break;
        }
      }
      if (aborted) return;

      std::lock_guard<std::mutex> lock(merge_mutex);
      pending[b] = counts;
      while (!pending.empty() && pending.begin()->first == watermark) {
        merged_violations += pending.begin()->second.violations;
        merged_failures += pending.begin()->second.failures;
        pending.erase(pending.begin());
        ++watermark;
      }
      if (use_checkpoint) {
        const std::uint64_t done_trials =
            std::min(total, start_index + watermark * block);
        if (done_trials >= last_checkpoint + options.checkpoint_interval) {
          write_progress(done_trials);
          last_checkpoint = done_trials;
        }
      }
    }
  };

  if (remaining > 0) {
    std::vector<std::thread> pool;
    const int used = static_cast<int>(
        std::min<std::uint64_t>(static_cast<std::uint64_t>(workers), num_blocks));
    pool.reserve(used);
    for (int i = 0; i < used; ++i) pool.emplace_back(worker_fn);
    for (auto& t : pool) t.join();
  }
  if (first_error) std::rethrow_exception(first_error);

  const std::uint64_t done_trials =
      std::min(total, start_index + watermark * block);
  const bool interrupted = done_trials < total;
  if (use_checkpoint && (interrupted || done_trials > last_checkpoint)) {
    write_progress(done_trials);
  }

  ViolationEstimate est;
  est.trials = total;
  est.completed = done_trials;
  est.violations = merged_violations;
  est.solver_failures = merged_failures;
  est.seed = options.seed;
  est.mode = options.mode;
  est.state_descriptor = state.descriptor();
  est.scenario_descriptor = scenario.to_string();
  est.interrupted = interrupted;
  const std::uint64_t effective = done_trials - std::min(done_trials, est.solver_failures);
  if (effective > 0) {
    est.p_hat = static_cast<double>(est.violations) / static_cast<double>(effective);
    std::tie(est.ci_low, est.ci_high) = wilson_ci(est.violations, effective);
  }
  est.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (!interrupted &&
      static_cast<double>(est.solver_failures) >
          kMaxFailureRate * static_cast<double>(total)) {
    fail(Errc::solver_failure,
         "run invalid: " + std::to_string(est.solver_failures) +
             " solver failures in " + std::to_string(total) + " trials");
  }
  return est;
}

OracleCheckReport oracle_check(const State& state, const Scenario& scenario,
                               std::uint64_t trials, std::uint64_t seed,
                               double tolerance) {
  if (trials == 0) fail(Errc::invalid_argument, "need trials >= 1");
  const bool chsh_scenario = scenario.num_parties() == 2 &&
                             scenario.local_dim() == 2 &&
                             scenario.settings() == std::vector<int>{2, 2};
  OracleCheckReport report;
  report.trials = trials;
  const SolveContext solve_context(scenario);
  for (std::uint64_t trial = 0; trial < trials; ++trial) {
    RandomStream rng(seed, trial);
    const SettingsAssignment settings = sample_settings(scenario, rng);
    const Behavior b = behavior(state, settings, scenario);
    const LocalProgram lp(scenario, b);
    Verdict verdict;
    try {
      verdict = solve_feasibility(lp, tolerance, &solve_context);
    } catch (const Error& e) {
      if (e.code() != Errc::solver_failure) throw;
      ++report.solver_failures;
      continue;
    }
    bool near_boundary;
    if (chsh_scenario) {
      near_boundary = std::abs(chsh_max_violation(b) - 2.0) <= 1e-7;
    } else {
      near_boundary =
          verdict.margin > 0.1 * tolerance && verdict.margin < 10.0 * tolerance;
    }
    if (near_boundary) {
      ++report.skipped_near_boundary;
      continue;
    }
    ++report.compared;
    const VerdictKind membership = vertex_membership_oracle(b, scenario);
    bool disagree = membership != verdict.kind;
    if (chsh_scenario) disagree = disagree || chsh_oracle(b) != verdict.kind;
    if (disagree) ++report.disagreements;
  }
  return report;
}

}  // namespace pvbell
