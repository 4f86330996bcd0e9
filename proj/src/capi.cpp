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

#include "pvbell/pvbell.h"

#include <atomic>
#include <cstring>
#include <string>
#include <vector>

#include "analysis.hpp"
#include "errors.hpp"
#include "estimator.hpp"
#include "local_model.hpp"
#include "measurement.hpp"
#include "rng.hpp"
#include "scenario.hpp"
#include "state.hpp"
#include "text_io.hpp"

struct pvb_state {
  pvbell::State impl;
};

namespace {

thread_local std::string t_last_error;
std::atomic<bool> g_interrupt{false};

pvb_status status_of(pvbell::Errc code) {
  switch (code) {
    case pvbell::Errc::invalid_argument: return PVB_ERR_INVALID_ARGUMENT;
    case pvbell::Errc::cap_exceeded: return PVB_ERR_CAP_EXCEEDED;
    case pvbell::Errc::parse_error: return PVB_ERR_PARSE;
    case pvbell::Errc::io_error: return PVB_ERR_IO;
    case pvbell::Errc::validation_error: return PVB_ERR_VALIDATION;
    case pvbell::Errc::solver_failure: return PVB_ERR_SOLVER;
    case pvbell::Errc::checkpoint_error: return PVB_ERR_CHECKPOINT;
  }
  return PVB_ERR_INTERNAL;
}

template <class Fn>
pvb_status guarded(Fn&& fn) {
  try {
    fn();
    return PVB_OK;
  } catch (const pvbell::Error& e) {
    t_last_error = e.what();
    return status_of(e.code());
  } catch (const std::exception& e) {
    t_last_error = e.what();
    return PVB_ERR_INTERNAL;
  } catch (...) {
    t_last_error = "unknown error";
    return PVB_ERR_INTERNAL;
  }
}

pvb_status make_state(pvb_state** out, pvbell::State state) {
  if (out == nullptr) {
    t_last_error = "output pointer is null";
    return PVB_ERR_INVALID_ARGUMENT;
  }
  *out = new pvb_state{std::move(state)};
  return PVB_OK;
}

void require(bool cond, const char* what) {
  if (!cond) pvbell::fail(pvbell::Errc::invalid_argument, what);
}

pvbell::Scenario make_scenario(const pvb_state* state, const int* settings,
                               int num_parties, std::uint64_t cap) {
  require(state != nullptr, "state handle is null");
  require(settings != nullptr && num_parties >= 1, "settings array is empty");
  require(num_parties == state->impl.num_parties(),
          "settings list length does not match the state's party count");
  return pvbell::Scenario(
      state->impl.local_dim(), std::vector<int>(settings, settings + num_parties),
      cap == 0 ? pvbell::kDefaultStrategyCap : cap);
}

pvbell::EstimateOptions make_options(const pvb_run_options* options) {
  require(options != nullptr, "run options pointer is null");
  require(options->trials >= 1, "need trials >= 1");
  pvbell::EstimateOptions opts;
  opts.trials = options->trials;
  opts.seed = options->seed;
  opts.mode = options->identical_mode
                  ? pvbell::SamplingMode::identical_across_parties
                  : pvbell::SamplingMode::independent;
  opts.tolerance = options->tolerance > 0.0 ? options->tolerance
                                            : pvbell::kDefaultFeasibilityTol;
  opts.workers = options->workers;
  if (options->checkpoint_path != nullptr)
    opts.checkpoint_path = options->checkpoint_path;
  if (options->checkpoint_interval > 0)
    opts.checkpoint_interval = options->checkpoint_interval;
  opts.require_checkpoint = options->require_checkpoint != 0;
  opts.stop_after = options->stop_after;
  opts.cancel = &g_interrupt;
  return opts;
}

pvb_estimate convert(const pvbell::ViolationEstimate& est) {
  pvb_estimate out{};
  out.trials = est.trials;
  out.completed = est.completed;
  out.violations = est.violations;
  out.solver_failures = est.solver_failures;
  out.p_hat = est.p_hat;
  out.ci_low = est.ci_low;
  out.ci_high = est.ci_high;
  out.seed = est.seed;
  out.wall_time_s = est.wall_time_s;
  out.interrupted = est.interrupted ? 1 : 0;
  return out;
}

pvbell::ViolationEstimate convert_back(const pvb_estimate& est,
                                       const pvbell::Scenario* scenario) {
  pvbell::ViolationEstimate core;
  core.trials = est.trials;
  core.completed = est.completed;
  core.violations = est.violations;
  core.solver_failures = est.solver_failures;
  core.p_hat = est.p_hat;
  core.ci_low = est.ci_low;
  core.ci_high = est.ci_high;
  core.seed = est.seed;
  core.interrupted = est.interrupted != 0;
  if (scenario != nullptr) core.scenario_descriptor = scenario->to_string();
  return core;
}

void copy_string(const std::string& text, char* buffer, size_t size) {
  require(buffer != nullptr && size > 0, "output buffer is empty");
  require(text.size() + 1 <= size, "output buffer is too small");
  std::memcpy(buffer, text.c_str(), text.size() + 1);
}

}  // namespace

extern "C" {

const char* pvb_version(void) { return "0.1.0"; }

const char* pvb_status_name(pvb_status status) {
  switch (status) {
    case PVB_OK: return "ok";
    case PVB_ERR_INVALID_ARGUMENT: return "invalid argument";
    case PVB_ERR_CAP_EXCEEDED: return "cap exceeded";
    case PVB_ERR_PARSE: return "parse error";
    case PVB_ERR_IO: return "io error";
    case PVB_ERR_VALIDATION: return "validation error";
    case PVB_ERR_SOLVER: return "solver failure";
    case PVB_ERR_CHECKPOINT: return "checkpoint error";
    case PVB_ERR_INTERNAL: return "internal error";
  }
  return "unknown";
}

const char* pvb_last_error(void) { return t_last_error.c_str(); }

pvb_status pvb_state_ghz(int num_parties, int local_dim, double alpha,
                         pvb_state** out) {
  return guarded([&] {
    make_state(out, pvbell::make_ghz(num_parties, local_dim, alpha));
  });
}

pvb_status pvb_state_dicke(int num_parties, int excitations, pvb_state** out) {
  return guarded(
      [&] { make_state(out, pvbell::make_dicke(num_parties, excitations)); });
}

pvb_status pvb_state_psi3(double theta, pvb_state** out) {
  return guarded([&] { make_state(out, pvbell::make_psi3(theta)); });
}

pvb_status pvb_state_named(const char* name, pvb_state** out) {
  return guarded([&] {
    require(name != nullptr, "state name is null");
    make_state(out,
               pvbell::make_named(pvbell::named_state_from_string(name)));
  });
}

pvb_status pvb_state_zero(int num_parties, int local_dim, pvb_state** out) {
  return guarded(
      [&] { make_state(out, pvbell::make_zero(num_parties, local_dim)); });
}

pvb_status pvb_state_random(int num_parties, int local_dim, uint64_t seed,
                            pvb_state** out) {
  return guarded([&] {
    make_state(out, pvbell::random_pure_state(num_parties, local_dim, seed));
  });
}

pvb_status pvb_state_tensor(const pvb_state* a, const pvb_state* b,
                            pvb_state** out) {
  return guarded([&] {
    require(a != nullptr && b != nullptr, "state handle is null");
    make_state(out, pvbell::tensor(a->impl, b->impl));
  });
}

pvb_status pvb_state_mix(const pvb_state* const* states, const double* weights,
                         size_t count, pvb_state** out) {
  return guarded([&] {
    require(states != nullptr && weights != nullptr && count > 0,
            "mix needs states and weights");
    std::vector<pvbell::State> list;
    list.reserve(count);
    for (size_t i = 0; i < count; ++i) {
      require(states[i] != nullptr, "state handle is null");
      list.push_back(states[i]->impl);
    }
    make_state(out, pvbell::mix(list, std::vector<double>(weights, weights + count)));
  });
}

pvb_status pvb_state_load(const char* path, pvb_state** out) {
  return guarded([&] {
    require(path != nullptr, "path is null");
    make_state(out, pvbell::load_density_matrix(path));
  });
}

void pvb_state_free(pvb_state* state) { delete state; }

int pvb_state_num_parties(const pvb_state* state) {
  return state == nullptr ? 0 : state->impl.num_parties();
}

int pvb_state_local_dim(const pvb_state* state) {
  return state == nullptr ? 0 : state->impl.local_dim();
}

pvb_status pvb_state_describe(const pvb_state* state, char* buffer,
                              size_t size) {
  return guarded([&] {
    require(state != nullptr, "state handle is null");
    copy_string(state->impl.descriptor(), buffer, size);
  });
}

void pvb_run_options_init(pvb_run_options* options) {
  if (options == nullptr) return;
  std::memset(options, 0, sizeof(*options));
  options->trials = 10000;
  options->tolerance = pvbell::kDefaultFeasibilityTol;
}

pvb_status pvb_estimate_pv(const pvb_state* state, const int* settings,
                           int num_parties, const pvb_run_options* options,
                           pvb_estimate* out) {
  return guarded([&] {
    require(out != nullptr, "output pointer is null");
    const pvbell::Scenario scenario = make_scenario(
        state, settings, num_parties,
        options != nullptr ? options->strategy_cap : 0);
    const pvbell::EstimateOptions opts = make_options(options);
    *out = convert(pvbell::estimate_pv(state->impl, scenario, opts));
  });
}

pvb_status pvb_wilson_ci(uint64_t violations, uint64_t trials, double level,
                         double* low, double* high) {
  return guarded([&] {
    require(low != nullptr && high != nullptr, "output pointer is null");
    std::tie(*low, *high) = pvbell::wilson_ci(violations, trials, level);
  });
}

void pvb_request_interrupt(void) { g_interrupt.store(true); }
void pvb_clear_interrupt(void) { g_interrupt.store(false); }
int pvb_interrupt_requested(void) { return g_interrupt.load() ? 1 : 0; }

pvb_status pvb_fit_exponential(const double* x, const double* pv, size_t count,
                               int x_is_product, pvb_fit_result* out) {
  return guarded([&] {
    require(x != nullptr && pv != nullptr && out != nullptr,
            "fit needs x, pv and an output struct");
    std::vector<pvbell::FitPoint> points(count);
    for (size_t i = 0; i < count; ++i) points[i] = {x[i], pv[i]};
    const pvbell::FitResult fit = pvbell::fit_exponential(
        points, x_is_product ? pvbell::XDefinition::product_of_settings
                             : pvbell::XDefinition::settings_of_one_party);
    out->a = fit.a;
    out->b = fit.b;
    out->residual_rms = fit.residual_rms;
    out->points_used = fit.points_used;
    out->points_excluded = fit.points_excluded;
  });
}

pvb_status pvb_gme_witness(const pvb_estimate* estimate, const int* settings,
                           int num_parties, int local_dim,
                           pvb_witness_report* out) {
  return guarded([&] {
    require(estimate != nullptr && out != nullptr,
            "witness needs an estimate and an output struct");
    require(settings != nullptr && num_parties >= 1, "settings array is empty");
    const pvbell::Scenario scenario(
        local_dim, std::vector<int>(settings, settings + num_parties));
    const pvbell::WitnessReport report =
        pvbell::gme_witness(convert_back(*estimate, &scenario), scenario);
    out->witnessed = report.verdict == pvbell::WitnessVerdict::WITNESSED;
    out->threshold = report.threshold;
    out->margin = report.margin;
  });
}

pvb_status pvb_multiplicativity_check(const pvb_estimate* p_a,
                                      const pvb_estimate* p_b,
                                      const pvb_estimate* p_ab,
                                      pvb_mult_report* out) {
  return guarded([&] {
    require(p_a != nullptr && p_b != nullptr && p_ab != nullptr && out != nullptr,
            "multiplicativity check needs three estimates");
    const pvbell::MultiplicativityReport report =
        pvbell::multiplicativity_check(convert_back(*p_a, nullptr),
                                       convert_back(*p_b, nullptr),
                                       convert_back(*p_ab, nullptr));
    out->pass = report.pass ? 1 : 0;
    out->product = report.product;
    out->observed = report.observed;
    out->difference = report.difference;
    out->tolerance = report.tolerance;
  });
}

pvb_status pvb_scan_alpha(pvb_scan_family family, const double* alphas_rad,
                          size_t count, const int* settings, int num_parties,
                          const pvb_run_options* options,
                          pvb_estimate* out_array) {
  return guarded([&] {
    require(alphas_rad != nullptr && count > 0, "scan grid is empty");
    require(out_array != nullptr, "output array is null");
    require(settings != nullptr && num_parties >= 1, "settings array is empty");
    int dim = 2;
    pvbell::ScanFamily fam = pvbell::ScanFamily::qubit_ghz;
    if (family == PVB_SCAN_QUTRIT_GHZ) {
      fam = pvbell::ScanFamily::qutrit_ghz;
      dim = 3;
    } else if (family == PVB_SCAN_PSI3) {
      fam = pvbell::ScanFamily::psi3_theta;
    }
    const pvbell::Scenario scenario(
        dim, std::vector<int>(settings, settings + num_parties),
        options != nullptr && options->strategy_cap > 0
            ? options->strategy_cap
            : pvbell::kDefaultStrategyCap);
    const pvbell::EstimateOptions opts = make_options(options);
    const std::vector<double> grid(alphas_rad, alphas_rad + count);
    const std::vector<pvbell::ScanPoint> curve =
        pvbell::scan_alpha(fam, grid, scenario, opts);
    for (size_t i = 0; i < curve.size(); ++i)
      out_array[i] = convert(curve[i].estimate);
  });
}

pvb_status pvb_chsh_correlator(const pvb_chsh_params* params, int i, int j,
                               double* out) {
  return guarded([&] {
    require(params != nullptr && out != nullptr, "correlator needs params");
    pvbell::ChshParams p;
    p.alpha = params->alpha;
    std::memcpy(p.a1.data(), params->a1, sizeof(params->a1));
    std::memcpy(p.a2.data(), params->a2, sizeof(params->a2));
    std::memcpy(p.b1.data(), params->b1, sizeof(params->b1));
    std::memcpy(p.b2.data(), params->b2, sizeof(params->b2));
    *out = pvbell::chsh_correlator(p, i, j);
  });
}

pvb_status pvb_chsh_value(const pvb_chsh_params* params, pvb_chsh_result* out) {
  return guarded([&] {
    require(params != nullptr && out != nullptr, "chsh_value needs params");
    pvbell::ChshParams p;
    p.alpha = params->alpha;
    std::memcpy(p.a1.data(), params->a1, sizeof(params->a1));
    std::memcpy(p.a2.data(), params->a2, sizeof(params->a2));
    std::memcpy(p.b1.data(), params->b1, sizeof(params->b1));
    std::memcpy(p.b2.data(), params->b2, sizeof(params->b2));
    const pvbell::ChshValue v = pvbell::chsh_value(p);
    out->value = v.value;
    out->cx = v.cx;
    out->cy = v.cy;
    out->cz = v.cz;
    out->from_decomposition = v.from_decomposition;
  });
}

pvb_status pvb_appendix_check(uint64_t lemma_samples, uint64_t algebra_samples,
                              uint64_t pipeline_samples, uint64_t seed,
                              pvb_appendix_report* out) {
  return guarded([&] {
    require(out != nullptr, "output pointer is null");
    const pvbell::AppendixReport report = pvbell::appendix_check(
        lemma_samples, algebra_samples, pipeline_samples, seed);
    out->lemma_samples = report.lemma.samples;
    out->lemma_violating = report.lemma.violating;
    out->lemma_deficits = report.lemma.deficits;
    out->lemma_max_deficit = report.lemma.max_deficit;
    out->max_decomposition_dev = report.max_decomposition_dev;
    out->max_pipeline_dev = report.max_pipeline_dev;
    out->pass = report.pass ? 1 : 0;
  });
}

pvb_status pvb_oracle_check(const pvb_state* state, const int* settings,
                            int num_parties, uint64_t trials, uint64_t seed,
                            double tolerance, pvb_oracle_report* out) {
  return guarded([&] {
    require(out != nullptr, "output pointer is null");
    const pvbell::Scenario scenario =
        make_scenario(state, settings, num_parties, 0);
    const pvbell::OracleCheckReport report = pvbell::oracle_check(
        state->impl, scenario, trials, seed,
        tolerance > 0.0 ? tolerance : pvbell::kDefaultFeasibilityTol);
    out->trials = report.trials;
    out->compared = report.compared;
    out->skipped_near_boundary = report.skipped_near_boundary;
    out->disagreements = report.disagreements;
    out->solver_failures = report.solver_failures;
  });
}

pvb_status pvb_dump_lp(const pvb_state* state, const int* settings,
                       int num_parties, uint64_t seed, uint64_t trial_index,
                       const char* path) {
  return guarded([&] {
    require(path != nullptr, "path is null");
    const pvbell::Scenario scenario =
        make_scenario(state, settings, num_parties, 0);
    pvbell::RandomStream rng(seed, trial_index);
    const pvbell::SettingsAssignment assignment =
        pvbell::sample_settings(scenario, rng);
    const pvbell::Behavior b =
        pvbell::behavior(state->impl, assignment, scenario);
    const pvbell::LocalProgram lp(scenario, b);
    lp.dump(path);
  });
}

pvb_status pvb_format_percent(double probability, char* buffer, size_t size) {
  return guarded(
      [&] { copy_string(pvbell::format_percent3(probability), buffer, size); });
}

}  // extern "C"
