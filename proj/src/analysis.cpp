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

#include "analysis.hpp"

#include <cmath>
#include <numbers>

#include "errors.hpp"
#include "rng.hpp"

namespace pvbell {

double gme_threshold() { return 2.0 * (std::numbers::pi - 3.0); }

FitResult fit_exponential(const std::vector<FitPoint>& points,
                          XDefinition x_definition) {
  FitResult result;
  result.x_definition = x_definition;
  std::vector<FitPoint> usable;
  usable.reserve(points.size());
  for (const FitPoint& p : points) {
    if (p.pv >= 1.0) {
      ++result.points_excluded;
      continue;
    }
    if (p.pv < 0.0)
      fail(Errc::invalid_argument, "fit points need p_v in [0, 1)");
    usable.push_back(p);
  }
  if (usable.size() < 3)
    fail(Errc::invalid_argument,
         "exponential fit needs at least three points with p_v < 1");
  for (std::size_t i = 1; i < usable.size(); ++i)
    if (!(usable[i].x > usable[i - 1].x))
      fail(Errc::invalid_argument, "fit points need strictly increasing x");

  const double n = static_cast<double>(usable.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (const FitPoint& p : usable) {
    const double y = std::log(1.0 - p.pv);
    sx += p.x;
    sy += y;
    sxx += p.x * p.x;
    sxy += p.x * y;
  }
  const double denom = n * sxx - sx * sx;
  if (std::abs(denom) < 1e-30)
    fail(Errc::invalid_argument, "fit points are degenerate in x");
  const double slope = (n * sxy - sx * sy) / denom;
  const double intercept = (sy - slope * sx) / n;
  result.a = std::exp(intercept);
  result.b = -slope;
  double ss = 0.0;
  for (const FitPoint& p : usable) {
    const double model = 1.0 - result.a * std::exp(-result.b * p.x);
    ss += (p.pv - model) * (p.pv - model);
  }
  result.residual_rms = std::sqrt(ss / n);
  result.points_used = static_cast<int>(usable.size());
  return result;
}

WitnessReport gme_witness(const ViolationEstimate& estimate,
                          const Scenario& scenario) {
  if (scenario.num_parties() != 3 || scenario.local_dim() != 2 ||
      scenario.settings() != std::vector<int>{2, 2, 2})
    fail(Errc::invalid_argument,
         "the GME witness applies to the 3-qubit 2x2x2 scenario only");
  if (estimate.scenario_descriptor != scenario.to_string())
    fail(Errc::invalid_argument,
         "estimate was not produced for the given scenario");
  WitnessReport report;
  report.threshold = gme_threshold();
  report.margin = estimate.ci_low - report.threshold;
  report.verdict = report.margin > 0.0 ? WitnessVerdict::WITNESSED
                                       : WitnessVerdict::INCONCLUSIVE;
  return report;
}

MultiplicativityReport multiplicativity_check(const ViolationEstimate& p_a,
                                              const ViolationEstimate& p_b,
                                              const ViolationEstimate& p_ab) {
  const double qa = 1.0 - p_a.p_hat;
  const double qb = 1.0 - p_b.p_hat;
  const double qab = 1.0 - p_ab.p_hat;
  const double ha = (p_a.ci_high - p_a.ci_low) / 2.0;
  const double hb = (p_b.ci_high - p_b.ci_low) / 2.0;
  const double hab = (p_ab.ci_high - p_ab.ci_low) / 2.0;
  MultiplicativityReport report;
  report.product = qa * qb;
  report.observed = qab;
  report.difference = std::abs(report.product - report.observed);
  const double h_prod = std::sqrt(qb * qb * ha * ha + qa * qa * hb * hb);
  report.tolerance = std::sqrt(h_prod * h_prod + hab * hab);
  report.pass = report.difference <= report.tolerance;
  return report;
}

std::vector<ScanPoint> scan_alpha(ScanFamily family,
                                  const std::vector<double>& grid,
                                  const Scenario& scenario,
                                  const EstimateOptions& options) {
  if (grid.empty()) fail(Errc::invalid_argument, "scan grid is empty");
  std::vector<ScanPoint> curve;
  curve.reserve(grid.size());
  for (double alpha : grid) {
    State state = [&] {
      switch (family) {
        case ScanFamily::qubit_ghz:
          return make_ghz(scenario.num_parties(), 2, alpha);
        case ScanFamily::qutrit_ghz:
          return make_ghz(scenario.num_parties(), 3, alpha);
        case ScanFamily::psi3_theta:
          return make_psi3(alpha);
      }
      fail(Errc::invalid_argument, "unknown scan family");
    }();
    ScanPoint point;
    point.alpha = alpha;
    point.estimate = estimate_pv(state, scenario, options);
    curve.push_back(std::move(point));
  }
  return curve;
}

namespace {

void require_unit(const std::array<double, 3>& v) {
  const double norm = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
  if (std::abs(norm - 1.0) > 1e-12)
    fail(Errc::invalid_argument, "Bloch vectors must have unit norm");
}

}  // namespace

double chsh_correlator(const ChshParams& params, int i, int j) {
  if ((i != 1 && i != 2) || (j != 1 && j != 2))
    fail(Errc::invalid_argument, "correlator indices must be 1 or 2");
  const auto& a = i == 1 ? params.a1 : params.a2;
  const auto& b = j == 1 ? params.b1 : params.b2;
  require_unit(a);
  require_unit(b);
  return a[2] * b[2] + std::sin(2.0 * params.alpha) * (a[0] * b[0] - a[1] * b[1]);
}

ChshValue chsh_value(const ChshParams& params) {
  require_unit(params.a1);
  require_unit(params.a2);
  require_unit(params.b1);
  require_unit(params.b2);
  ChshValue out;
  out.value = chsh_correlator(params, 1, 1) + chsh_correlator(params, 1, 2) +
              chsh_correlator(params, 2, 1) - chsh_correlator(params, 2, 2);
  const auto component = [&](int axis) {
    return params.a1[axis] * params.b1[axis] + params.a1[axis] * params.b2[axis] +
           params.a2[axis] * params.b1[axis] - params.a2[axis] * params.b2[axis];
  };
  out.cx = component(0);
  out.cy = component(1);
  out.cz = component(2);
  out.from_decomposition =
      out.cz + std::sin(2.0 * params.alpha) * (out.cx - out.cy);
  return out;
}

double chsh_correlator_via_behavior(double alpha,
                                    const std::array<double, 3>& a,
                                    const std::array<double, 3>& b) {
  require_unit(a);
  require_unit(b);
  const State state = make_ghz(2, 2, alpha);
  const Scenario scenario(2, {1, 1});
  SettingsAssignment assignment;
  assignment.bases = {{bloch_basis(a[0], a[1], a[2])},
                      {bloch_basis(b[0], b[1], b[2])}};
  const Behavior p = behavior(state, assignment, scenario);
  double e = 0.0;
  for (int r = 0; r < 2; ++r)
    for (int s = 0; s < 2; ++s)
      e += ((r + s) % 2 ? -1.0 : 1.0) * p.value(0, 2 * r + s);
  return e;
}

LemmaReport appendix_lemma_check(std::uint64_t samples, std::uint64_t seed) {
  if (samples == 0) fail(Errc::invalid_argument, "need samples >= 1");
  LemmaReport report;
  report.samples = samples;
  for (std::uint64_t s = 0; s < samples; ++s) {
    RandomStream rng(seed, s);
    ChshParams params;
    params.alpha = rng.next_double() * std::numbers::pi / 4.0;
    for (auto* vec : {&params.a1, &params.a2, &params.b1, &params.b2}) {
      // Uniform on the sphere.
      const double z = 1.0 - 2.0 * rng.next_double();
      const double phi = 2.0 * std::numbers::pi * rng.next_double();
      const double rxy = std::sqrt(std::max(0.0, 1.0 - z * z));
      (*vec)[0] = rxy * std::cos(phi);
      (*vec)[1] = rxy * std::sin(phi);
      (*vec)[2] = z;
    }
    const ChshValue at_alpha = chsh_value(params);
    if (at_alpha.value > 2.0) {
      ++report.violating;
      // Same measurements on the maximally entangled state.
      const double at_max = at_alpha.cz + (at_alpha.cx - at_alpha.cy);
      const double deficit = at_alpha.value - at_max;
      if (deficit > 1e-12) {
        ++report.deficits;
        report.max_deficit = std::max(report.max_deficit, deficit);
      }
    }
  }
  report.pass = report.deficits == 0;
  return report;
}

namespace {

ChshParams random_params(RandomStream& rng, double alpha_max) {
  ChshParams params;
  params.alpha = rng.next_double() * alpha_max;
  for (auto* vec : {&params.a1, &params.a2, &params.b1, &params.b2}) {
    const double z = 1.0 - 2.0 * rng.next_double();
    const double phi = 2.0 * std::numbers::pi * rng.next_double();
    const double rxy = std::sqrt(std::max(0.0, 1.0 - z * z));
    (*vec)[0] = rxy * std::cos(phi);
    (*vec)[1] = rxy * std::sin(phi);
    (*vec)[2] = z;
  }
  return params;
}

}  // namespace

AppendixReport appendix_check(std::uint64_t lemma_samples,
                              std::uint64_t algebra_samples,
                              std::uint64_t pipeline_samples,
                              std::uint64_t seed) {
  AppendixReport report;
  report.lemma = appendix_lemma_check(lemma_samples, seed);
  for (std::uint64_t s = 0; s < algebra_samples; ++s) {
    RandomStream rng(seed ^ 0x414c4745ull, s);
    const ChshParams params = random_params(rng, std::numbers::pi / 2);
    const ChshValue v = chsh_value(params);
    report.max_decomposition_dev = std::max(
        report.max_decomposition_dev, std::abs(v.value - v.from_decomposition));
  }
  for (std::uint64_t s = 0; s < pipeline_samples; ++s) {
    RandomStream rng(seed ^ 0x50495045ull, s);
    const ChshParams params = random_params(rng, std::numbers::pi / 2);
    const double direct = chsh_correlator(params, 1, 1);
    const double piped =
        chsh_correlator_via_behavior(params.alpha, params.a1, params.b1);
    report.max_pipeline_dev =
        std::max(report.max_pipeline_dev, std::abs(direct - piped));
  }
  report.pass = report.lemma.pass && report.max_decomposition_dev <= 1e-12 &&
                report.max_pipeline_dev <= 1e-10;
  return report;
}

}  // namespace pvbell
