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

// Command-line front end over the pvbell C API: reproduces the violation
// tables, scans, fits and consistency checks from flat JSON configs or
// flags, emitting CSV (default) or JSON lines.

#include <pvbell/pvbell.h>

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <csignal>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

constexpr double kPi = 3.14159265358979323846;

constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitConfig = 2;
constexpr int kExitCap = 3;
constexpr int kExitSolver = 4;
constexpr int kExitInterrupted = 130;

void handle_sigint(int) { pvb_request_interrupt(); }

[[noreturn]] void die(int code, const std::string& message) {
  std::cerr << "pvbell: " << message << "\n";
  std::exit(code);
}

int exit_code_for(pvb_status status) {
  switch (status) {
    case PVB_ERR_CAP_EXCEEDED: return kExitCap;
    case PVB_ERR_SOLVER: return kExitSolver;
    default: return kExitConfig;
  }
}

void check(pvb_status status) {
  if (status != PVB_OK) {
    die(exit_code_for(status),
        std::string(pvb_status_name(status)) + ": " + pvb_last_error());
  }
}

struct StateHandle {
  pvb_state* ptr = nullptr;
  StateHandle() = default;
  explicit StateHandle(pvb_state* p) : ptr(p) {}
  StateHandle(StateHandle&& other) noexcept : ptr(other.ptr) { other.ptr = nullptr; }
  StateHandle& operator=(StateHandle&& other) noexcept {
    if (this != &other) {
      pvb_state_free(ptr);
      ptr = other.ptr;
      other.ptr = nullptr;
    }
    return *this;
  }
  ~StateHandle() { pvb_state_free(ptr); }
  StateHandle(const StateHandle&) = delete;
  StateHandle& operator=(const StateHandle&) = delete;
};

// Settings like "3x2x2".
std::vector<int> parse_settings(const std::string& text) {
  std::vector<int> settings;
  std::string token;
  std::istringstream in(text);
  while (std::getline(in, token, 'x')) {
    try {
      const int m = std::stoi(token);
      if (m < 1) throw std::invalid_argument("non-positive");
      settings.push_back(m);
    } catch (const std::exception&) {
      die(kExitConfig, "bad settings '" + text +
                           "': expected positive integers joined by 'x'");
    }
  }
  if (settings.empty()) die(kExitConfig, "empty settings list");
  return settings;
}

struct StateParams {
  double alpha_deg = 45.0;
  double theta_deg = 45.0;
  int dim = 2;
  std::uint64_t state_seed = 1;
};

// One term of a state expression; terms joined by '*' are tensored.
StateHandle make_term(const std::string& term, const StateParams& params) {
  auto number_suffix = [&](const std::string& prefix) -> std::optional<int> {
    if (term.rfind(prefix, 0) != 0) return std::nullopt;
    const std::string rest = term.substr(prefix.size());
    if (rest.empty()) return std::nullopt;
    for (char c : rest)
      if (!std::isdigit(static_cast<unsigned char>(c))) return std::nullopt;
    return std::stoi(rest);
  };

  pvb_state* out = nullptr;
  const double alpha = params.alpha_deg * kPi / 180.0;
  const double theta = params.theta_deg * kPi / 180.0;
  if (auto n = number_suffix("ghz")) {
    check(pvb_state_ghz(*n, params.dim, alpha, &out));
    return StateHandle(out);
  }
  if (auto n = number_suffix("w")) {
    check(pvb_state_dicke(*n, 1, &out));
    return StateHandle(out);
  }
  if (auto n = number_suffix("zero")) {
    check(pvb_state_zero(*n, params.dim, &out));
    return StateHandle(out);
  }
  if (auto n = number_suffix("random")) {
    check(pvb_state_random(*n, params.dim, params.state_seed, &out));
    return StateHandle(out);
  }
  if (term.rfind("dicke", 0) == 0) {
    const auto sep = term.find('_');
    if (sep == std::string::npos)
      die(kExitConfig, "dicke term must look like dicke<N>_<e>");
    try {
      const int n = std::stoi(term.substr(5, sep - 5));
      const int e = std::stoi(term.substr(sep + 1));
      check(pvb_state_dicke(n, e, &out));
      return StateHandle(out);
    } catch (const std::exception&) {
      die(kExitConfig, "bad dicke term '" + term + "'");
    }
  }
  if (term == "psi3") {
    check(pvb_state_psi3(theta, &out));
    return StateHandle(out);
  }
  // Fall through to the named catalog.
  const pvb_status status = pvb_state_named(term.c_str(), &out);
  if (status != PVB_OK)
    die(kExitConfig, "unknown state term '" + term + "': " + pvb_last_error());
  return StateHandle(out);
}

StateHandle build_state(const std::string& expr, const std::string& state_file,
                        const StateParams& params) {
  if (!state_file.empty()) {
    if (!expr.empty())
      die(kExitConfig, "--state and --state-file are mutually exclusive");
    pvb_state* out = nullptr;
    check(pvb_state_load(state_file.c_str(), &out));
    return StateHandle(out);
  }
  if (expr.empty()) die(kExitConfig, "need --state or --state-file");
  std::vector<std::string> terms;
  std::string token;
  std::istringstream in(expr);
  while (std::getline(in, token, '*')) {
    if (token.empty()) die(kExitConfig, "empty term in state expression");
    terms.push_back(token);
  }
  StateHandle acc = make_term(terms[0], params);
  for (std::size_t i = 1; i < terms.size(); ++i) {
    StateHandle next = make_term(terms[i], params);
    pvb_state* combined = nullptr;
    check(pvb_state_tensor(acc.ptr, next.ptr, &combined));
    acc = StateHandle(combined);
  }
  return acc;
}

std::string format_fixed(double v, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", decimals, v);
  return buf;
}

std::string percent(double p) {
  char buf[32];
  check(pvb_format_percent(p, buf, sizeof(buf)));
  return buf;
}

struct OutputSink {
  std::string format = "csv";           // csv | jsonl
  std::unique_ptr<std::ofstream> file;  // empty -> stdout
  bool header_written = false;

  std::ostream& stream() { return file ? *file : std::cout; }

  void open(const std::string& path) {
    if (path.empty()) return;
    file = std::make_unique<std::ofstream>(path, std::ios::trunc);
    if (!*file) die(kExitConfig, "cannot open output file '" + path + "'");
  }
};

struct ResultRow {
  std::string state;
  int dim = 2;
  std::string settings;
  std::string mode;
  const pvb_estimate* est = nullptr;
  std::optional<double> alpha_deg;
};

void emit_row(OutputSink& sink, const ResultRow& row) {
  const pvb_estimate& e = *row.est;
  if (sink.format == "jsonl") {
    nlohmann::json j;
    if (row.alpha_deg) j["alpha_deg"] = *row.alpha_deg;
    j["state"] = row.state;
    j["dim"] = row.dim;
    j["settings"] = row.settings;
    j["mode"] = row.mode;
    j["trials"] = e.trials;
    j["violations"] = e.violations;
    j["solver_failures"] = e.solver_failures;
    j["pv_percent"] = percent(e.p_hat);
    j["ci_low"] = format_fixed(e.ci_low, 6);
    j["ci_high"] = format_fixed(e.ci_high, 6);
    j["seed"] = e.seed;
    j["wall_time_s"] = e.wall_time_s;
    sink.stream() << j.dump() << "\n";
    return;
  }
  if (!sink.header_written) {
    if (row.alpha_deg) sink.stream() << "alpha_deg,";
    sink.stream() << "state,dim,settings,mode,trials,violations,"
                     "solver_failures,pv_percent,ci_low,ci_high,seed,"
                     "wall_time_s\n";
    sink.header_written = true;
  }
  if (row.alpha_deg) sink.stream() << format_fixed(*row.alpha_deg, 4) << ',';
  sink.stream() << row.state << ',' << row.dim << ',' << row.settings << ','
                << row.mode << ',' << e.trials << ',' << e.violations << ','
                << e.solver_failures << ',' << percent(e.p_hat) << ','
                << format_fixed(e.ci_low, 6) << ',' << format_fixed(e.ci_high, 6)
                << ',' << e.seed << ',' << format_fixed(e.wall_time_s, 3)
                << "\n";
}

// Flat JSON config providing defaults that flags may override.
void apply_config_defaults(const std::string& path, CLI::App& cmd) {
  std::ifstream in(path);
  if (!in) die(kExitConfig, "cannot open config '" + path + "'");
  nlohmann::json config;
  try {
    in >> config;
  } catch (const std::exception& e) {
    die(kExitConfig, "config parse error: " + std::string(e.what()));
  }
  if (!config.is_object()) die(kExitConfig, "config must be a JSON object");
  for (const auto& [key, value] : config.items()) {
    CLI::Option* opt = cmd.get_option_no_throw("--" + key);
    if (opt == nullptr) continue;  // key may belong to another subcommand
    const std::string text =
        value.is_string() ? value.get<std::string>() : value.dump();
    opt->default_val(text);
  }
}

std::vector<double> parse_grid_degrees(const std::string& text) {
  std::vector<double> grid;
  if (text.find(':') != std::string::npos) {
    double lo = 0, hi = 0, step = 0;
    if (std::sscanf(text.c_str(), "%lg:%lg:%lg", &lo, &hi, &step) != 3 ||
        step <= 0 || hi < lo)
      die(kExitConfig, "bad grid '" + text + "': expected lo:hi:step");
    for (double a = lo; a <= hi + 1e-9; a += step) grid.push_back(a);
    return grid;
  }
  std::string token;
  std::istringstream in(text);
  while (std::getline(in, token, ',')) {
    try {
      grid.push_back(std::stod(token));
    } catch (const std::exception&) {
      die(kExitConfig, "bad grid entry '" + token + "'");
    }
  }
  if (grid.empty()) die(kExitConfig, "empty grid");
  return grid;
}

}  // namespace

int main(int argc, char** argv) {
  std::signal(SIGINT, handle_sigint);

  CLI::App app{"pvbell: probability of violation of local realism under "
               "Haar-random measurements"};
  app.require_subcommand(1);

  std::string state_expr, state_file, settings_text = "2x2", mode = "independent";
  std::string out_path, format = "csv", checkpoint, config_path;
  double alpha_deg = 45.0, theta_deg = 45.0, tol = 1e-8;
  int dim = 2, workers = 0;
  std::uint64_t trials = 10000, seed = 1, state_seed = 1;
  std::uint64_t checkpoint_interval = 65536, stop_after = 0, cap = 0;

  auto add_common = [&](CLI::App* cmd, bool with_state) {
    cmd->add_option("--config", config_path,
                    "flat JSON config; flags override its values");
    if (with_state) {
      cmd->add_option("--state", state_expr,
                      "state expression, e.g. ghz2, w3, dicke4_2, psi3, "
                      "cluster4, smolin4, werner2, ghz2*zero1");
      cmd->add_option("--state-file", state_file,
                      "density-matrix text file (see README for the format)");
      cmd->add_option("--alpha", alpha_deg, "GHZ angle in degrees");
      cmd->add_option("--theta", theta_deg, "psi3 angle in degrees");
      cmd->add_option("--dim", dim, "local dimension d (2 or 3)");
      cmd->add_option("--state-seed", state_seed, "seed for random<N> states");
    }
    cmd->add_option("--settings", settings_text,
                    "settings per party, e.g. 3x2x2");
    cmd->add_option("--trials", trials, "Monte Carlo trial count");
    cmd->add_option("--seed", seed, "RNG seed");
    cmd->add_option("--mode", mode, "independent | identical");
    cmd->add_option("--tol", tol, "LP feasibility tolerance");
    cmd->add_option("--workers", workers, "worker threads (0 = hardware)");
    cmd->add_option("--out", out_path, "output file (default stdout)");
    cmd->add_option("--format", format, "csv | jsonl");
    cmd->add_option("--checkpoint", checkpoint, "checkpoint file path");
    cmd->add_option("--checkpoint-interval", checkpoint_interval,
                    "trials between checkpoints");
    cmd->add_option("--stop-after", stop_after,
                    "stop near this many trials (testing hook)")
        ->group("");
    cmd->add_option("--cap", cap, "joint-strategy cap (0 = default 1e7)")
        ->group("");
  };

  CLI::App* cmd_estimate = app.add_subcommand(
      "estimate", "estimate the probability of violation for one state");
  add_common(cmd_estimate, true);

  CLI::App* cmd_resume = app.add_subcommand(
      "resume", "resume an estimate from an existing checkpoint");
  add_common(cmd_resume, true);

  CLI::App* cmd_scan = app.add_subcommand(
      "scan-alpha", "estimate along a grid of state angles");
  std::string family = "qubit_ghz", grid_text;
  cmd_scan->add_option("--family", family,
                       "qubit_ghz | qutrit_ghz | psi3_theta");
  cmd_scan->add_option("--grid", grid_text,
                       "degrees, as lo:hi:step or a comma list")
      ->required();
  add_common(cmd_scan, false);

  CLI::App* cmd_fit = app.add_subcommand(
      "fit", "fit 1 - a*exp(-b*x) to (x, p_v) points");
  std::string points_path, x_def = "one_party";
  cmd_fit->add_option("--points", points_path,
                      "CSV of x,p_v rows ('#' comments)")
      ->required();
  cmd_fit->add_option("--x-def", x_def, "one_party | product");
  cmd_fit->add_option("--out", out_path, "output file (default stdout)");
  cmd_fit->add_option("--format", format, "csv | jsonl");

  CLI::App* cmd_witness = app.add_subcommand(
      "witness", "estimate and apply the tripartite-entanglement witness");
  add_common(cmd_witness, true);

  CLI::App* cmd_appendix = app.add_subcommand(
      "verify-appendix", "randomized checks of the CHSH(alpha) lemma");
  std::uint64_t lemma_samples = 100000, algebra_samples = 10000,
                pipeline_samples = 1000, appendix_seed = 1;
  cmd_appendix->add_option("--samples", lemma_samples, "lemma sample count");
  cmd_appendix->add_option("--algebra-samples", algebra_samples,
                           "decomposition-agreement sample count");
  cmd_appendix->add_option("--pipeline-samples", pipeline_samples,
                           "behavior-pipeline sample count");
  cmd_appendix->add_option("--seed", appendix_seed, "RNG seed");

  CLI::App* cmd_oracle = app.add_subcommand(
      "oracle-check",
      "cross-check the LP verdicts against the CHSH and membership oracles");
  add_common(cmd_oracle, true);

  CLI::App* cmd_dump = app.add_subcommand(
      "dump-lp", "write one trial's feasibility program as text");
  std::string dump_path = "lp.txt";
  std::uint64_t dump_trial = 0;
  add_common(cmd_dump, true);
  cmd_dump->add_option("--lp-out", dump_path, "destination file");
  cmd_dump->add_option("--trial", dump_trial, "trial index to dump");

  // A config file provides defaults; the real parse then overrides.
  for (int i = 1; i + 1 < argc; ++i) {
    if (std::string(argv[i]) == "--config") {
      for (CLI::App* sub : {cmd_estimate, cmd_resume, cmd_scan, cmd_witness,
                            cmd_oracle, cmd_dump}) {
        apply_config_defaults(argv[i + 1], *sub);
      }
      break;
    }
  }

  CLI11_PARSE(app, argc, argv);

  StateParams params{alpha_deg, theta_deg, dim, state_seed};
  OutputSink sink;
  sink.format = format;
  if (format != "csv" && format != "jsonl")
    die(kExitConfig, "unknown format '" + format + "'");
  sink.open(out_path);

  pvb_run_options options;
  pvb_run_options_init(&options);
  options.trials = trials;
  options.seed = seed;
  options.tolerance = tol;
  options.workers = workers;
  options.strategy_cap = cap;
  options.checkpoint_interval = checkpoint_interval;
  options.stop_after = stop_after;
  if (mode == "identical") {
    options.identical_mode = 1;
  } else if (mode != "independent") {
    die(kExitConfig, "mode must be 'independent' or 'identical'");
  }
  if (!checkpoint.empty()) options.checkpoint_path = checkpoint.c_str();

  auto run_estimate = [&](bool require_checkpoint) -> int {
    options.require_checkpoint = require_checkpoint ? 1 : 0;
    if (require_checkpoint && checkpoint.empty())
      die(kExitConfig, "resume needs --checkpoint");
    const std::vector<int> settings = parse_settings(settings_text);
    StateHandle state = build_state(state_expr, state_file, params);
    pvb_estimate est{};
    check(pvb_estimate_pv(state.ptr, settings.data(),
                          static_cast<int>(settings.size()), &options, &est));
    char label[256];
    check(pvb_state_describe(state.ptr, label, sizeof(label)));
    emit_row(sink, {label, pvb_state_local_dim(state.ptr), settings_text, mode,
                    &est, std::nullopt});
    if (est.interrupted) {
      std::cerr << "pvbell: interrupted after " << est.completed << " of "
                << est.trials << " trials";
      if (!checkpoint.empty()) std::cerr << "; checkpoint written";
      std::cerr << "\n";
      return kExitInterrupted;
    }
    return kExitOk;
  };

  if (*cmd_estimate) return run_estimate(false);
  if (*cmd_resume) return run_estimate(true);

  if (*cmd_scan) {
    const std::vector<int> settings = parse_settings(settings_text);
    const std::vector<double> grid_deg = parse_grid_degrees(grid_text);
    std::vector<double> grid_rad(grid_deg.size());
    for (std::size_t i = 0; i < grid_deg.size(); ++i)
      grid_rad[i] = grid_deg[i] * kPi / 180.0;
    pvb_scan_family fam;
    if (family == "qubit_ghz") fam = PVB_SCAN_QUBIT_GHZ;
    else if (family == "qutrit_ghz") fam = PVB_SCAN_QUTRIT_GHZ;
    else if (family == "psi3_theta") fam = PVB_SCAN_PSI3;
    else die(kExitConfig, "unknown family '" + family + "'");
    std::vector<pvb_estimate> curve(grid_rad.size());
    check(pvb_scan_alpha(fam, grid_rad.data(), grid_rad.size(), settings.data(),
                         static_cast<int>(settings.size()), &options,
                         curve.data()));
    const int scan_dim = fam == PVB_SCAN_QUTRIT_GHZ ? 3 : 2;
    bool interrupted = false;
    for (std::size_t i = 0; i < curve.size(); ++i) {
      emit_row(sink, {family, scan_dim, settings_text, mode, &curve[i],
                      grid_deg[i]});
      interrupted = interrupted || curve[i].interrupted != 0;
    }
    return interrupted ? kExitInterrupted : kExitOk;
  }

  if (*cmd_fit) {
    std::ifstream in(points_path);
    if (!in) die(kExitConfig, "cannot open points file '" + points_path + "'");
    std::vector<double> xs, ps;
    std::string line;
    while (std::getline(in, line)) {
      const auto first = line.find_first_not_of(" \t\r");
      if (first == std::string::npos || line[first] == '#') continue;
      double x = 0, p = 0;
      if (std::sscanf(line.c_str(), "%lg , %lg", &x, &p) != 2 &&
          std::sscanf(line.c_str(), "%lg %lg", &x, &p) != 2)
        die(kExitConfig, "bad points line: " + line);
      xs.push_back(x);
      ps.push_back(p);
    }
    pvb_fit_result fit{};
    check(pvb_fit_exponential(xs.data(), ps.data(), xs.size(),
                              x_def == "product" ? 1 : 0, &fit));
    std::ostream& os = sink.stream();
    if (sink.format == "jsonl") {
      nlohmann::json j{{"a", fit.a},
                       {"b", fit.b},
                       {"residual_rms", fit.residual_rms},
                       {"x_definition", x_def},
                       {"points_used", fit.points_used},
                       {"points_excluded", fit.points_excluded}};
      os << j.dump() << "\n";
    } else {
      os << "a,b,residual_rms,x_definition,points_used,points_excluded\n"
         << format_fixed(fit.a, 9) << ',' << format_fixed(fit.b, 9) << ','
         << format_fixed(fit.residual_rms, 9) << ',' << x_def << ','
         << fit.points_used << ',' << fit.points_excluded << "\n";
    }
    return kExitOk;
  }

  if (*cmd_witness) {
    const std::vector<int> settings = parse_settings(settings_text);
    StateHandle state = build_state(state_expr, state_file, params);
    pvb_estimate est{};
    check(pvb_estimate_pv(state.ptr, settings.data(),
                          static_cast<int>(settings.size()), &options, &est));
    if (est.interrupted) return kExitInterrupted;
    pvb_witness_report report{};
    check(pvb_gme_witness(&est, settings.data(),
                          static_cast<int>(settings.size()),
                          pvb_state_local_dim(state.ptr), &report));
    char label[256];
    check(pvb_state_describe(state.ptr, label, sizeof(label)));
    std::ostream& os = sink.stream();
    if (sink.format == "jsonl") {
      nlohmann::json j{
          {"state", label},
          {"pv_percent", percent(est.p_hat)},
          {"ci_low", format_fixed(est.ci_low, 6)},
          {"threshold", report.threshold},
          {"margin", report.margin},
          {"verdict", report.witnessed ? "WITNESSED" : "INCONCLUSIVE"}};
      os << j.dump() << "\n";
    } else {
      os << "state,pv_percent,ci_low,threshold,margin,verdict\n"
         << label << ',' << percent(est.p_hat) << ','
         << format_fixed(est.ci_low, 6) << ','
         << format_fixed(report.threshold, 6) << ','
         << format_fixed(report.margin, 6) << ','
         << (report.witnessed ? "WITNESSED" : "INCONCLUSIVE") << "\n";
    }
    return kExitOk;
  }

  if (*cmd_appendix) {
    pvb_appendix_report report{};
    check(pvb_appendix_check(lemma_samples, algebra_samples, pipeline_samples,
                             appendix_seed, &report));
    std::ostream& os = sink.stream();
    char line[256];
    std::snprintf(line, sizeof(line), "%llu,%llu,%llu,%.3g,%.3g,%.3g,%s",
                  static_cast<unsigned long long>(report.lemma_samples),
                  static_cast<unsigned long long>(report.lemma_violating),
                  static_cast<unsigned long long>(report.lemma_deficits),
                  report.lemma_max_deficit, report.max_decomposition_dev,
                  report.max_pipeline_dev, report.pass ? "PASS" : "FAIL");
    os << "lemma_samples,violating,deficits,max_deficit,"
          "max_decomposition_dev,max_pipeline_dev,verdict\n"
       << line << "\n";
    return report.pass ? kExitOk : kExitCheckFailed;
  }

  if (*cmd_oracle) {
    const std::vector<int> settings = parse_settings(settings_text);
    StateHandle state = build_state(state_expr, state_file, params);
    pvb_oracle_report report{};
    check(pvb_oracle_check(state.ptr, settings.data(),
                           static_cast<int>(settings.size()), trials, seed, tol,
                           &report));
    std::ostream& os = sink.stream();
    os << "trials,compared,skipped_near_boundary,disagreements,"
          "solver_failures\n"
       << report.trials << ',' << report.compared << ','
       << report.skipped_near_boundary << ',' << report.disagreements << ','
       << report.solver_failures << "\n";
    return report.disagreements == 0 ? kExitOk : kExitCheckFailed;
  }

  if (*cmd_dump) {
    const std::vector<int> settings = parse_settings(settings_text);
    StateHandle state = build_state(state_expr, state_file, params);
    check(pvb_dump_lp(state.ptr, settings.data(),
                      static_cast<int>(settings.size()), seed, dump_trial,
                      dump_path.c_str()));
    std::cerr << "pvbell: wrote " << dump_path << "\n";
    return kExitOk;
  }

  return kExitConfig;
}
