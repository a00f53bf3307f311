// Copyright 2026 The lgfmo Authors
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

#include "lgfmo/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "lgfmo/dynamics.hpp"

namespace lgfmo {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  if (trim(s).empty()) return out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(trim(item));
  return out;
}

double parse_double(const std::string& s) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) {
    throw std::invalid_argument("expected a number, got '" + s + "'");
  }
  return v;
}

template <typename Int>
Int parse_int(const std::string& s) {
  Int v{};
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw std::invalid_argument("expected an integer, got '" + s + "'");
  }
  return v;
}

std::string fmt_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

template <typename T, typename F>
std::string join(const std::vector<T>& v, F&& f) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ", ";
    out += f(v[i]);
  }
  return out;
}

void require(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument(what);
}

void require_ascending(const std::vector<double>& v, const std::string& what) {
  for (std::size_t i = 1; i < v.size(); ++i) require(v[i] > v[i - 1], what + " must be strictly ascending");
}

double nonnegative(const std::string& s) {
  const double v = parse_double(s);
  require(v >= 0.0, "value must be nonnegative, got " + s);
  return v;
}

double positive(const std::string& s) {
  const double v = parse_double(s);
  require(v > 0.0, "value must be positive, got " + s);
  return v;
}

struct KeySpec {
  std::string section;
  std::string name;
  std::function<void(RunConfig&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

const std::vector<KeySpec>& key_specs() {
  static const std::vector<KeySpec> specs = {
      {"experiment", "experiment",
       [](RunConfig& c, const std::string& v) {
         require(v.empty() || std::ranges::find(kExperiments, v) != kExperiments.end(), "unknown experiment '" + v + "'");
         c.experiment = v;
       },
       [](const RunConfig& c) { return c.experiment; }},
      {"experiment", "initial_state",
       [](RunConfig& c, const std::string& v) {
         InitialState::from_label(v);
         c.initial_state = v;
       },
       [](const RunConfig& c) { return c.initial_state; }},
      {"experiment", "initial_states",
       [](RunConfig& c, const std::string& v) {
         auto items = split_list(v);
         for (const auto& s : items) InitialState::from_label(s);
         c.initial_states = std::move(items);
       },
       [](const RunConfig& c) { return join(c.initial_states, [](const std::string& s) { return s; }); }},
      {"experiment", "sites",
       [](RunConfig& c, const std::string& v) {
         std::vector<int> sites;
         for (const auto& s : split_list(v)) {
           const int m = parse_int<int>(s);
           require(m >= 1 && m <= kNumSites, "site must be in 1..7, got " + s);
           require(sites.empty() || m > sites.back(), "sites must be strictly ascending");
           sites.push_back(m);
         }
         c.sites = std::move(sites);
       },
       [](const RunConfig& c) { return join(c.sites, [](int m) { return std::to_string(m); }); }},
      {"experiment", "grid",
       [](RunConfig& c, const std::string& v) {
         require(v == "optical-path" || v == "uniform", "grid must be optical-path or uniform");
         c.grid = v;
       },
       [](const RunConfig& c) { return c.grid; }},
      {"experiment", "grid_points",
       [](RunConfig& c, const std::string& v) {
         c.grid_points = parse_int<int>(v);
         require(c.grid_points >= 1, "grid_points must be at least 1");
       },
       [](const RunConfig& c) { return std::to_string(c.grid_points); }},
      {"experiment", "grid_max_ps",
       [](RunConfig& c, const std::string& v) {
         c.grid_max_ps = positive(v);
         require(c.grid_max_ps <= kMaxSearchInterval, "grid_max_ps must not exceed 5");
       },
       [](const RunConfig& c) { return fmt_double(c.grid_max_ps); }},
      {"experiment", "gammas",
       [](RunConfig& c, const std::string& v) {
         std::vector<double> g;
         for (const auto& s : split_list(v)) g.push_back(nonnegative(s));
         require_ascending(g, "gammas");
         c.gammas = std::move(g);
       },
       [](const RunConfig& c) { return join(c.gammas, fmt_double); }},
      {"experiment", "gamma_max", [](RunConfig& c, const std::string& v) { c.gamma_max = nonnegative(v); },
       [](const RunConfig& c) { return fmt_double(c.gamma_max); }},
      {"experiment", "gamma_step", [](RunConfig& c, const std::string& v) { c.gamma_step = positive(v); },
       [](const RunConfig& c) { return fmt_double(c.gamma_step); }},
      {"experiment", "trials",
       [](RunConfig& c, const std::string& v) {
         c.trials = parse_int<int>(v);
         require(c.trials >= 1, "trials must be at least 1");
       },
       [](const RunConfig& c) { return std::to_string(c.trials); }},
      {"experiment", "sigma2", [](RunConfig& c, const std::string& v) { c.sigma2 = nonnegative(v); },
       [](const RunConfig& c) { return fmt_double(c.sigma2); }},
      {"experiment", "seed", [](RunConfig& c, const std::string& v) { c.seed = parse_int<std::uint64_t>(v); },
       [](const RunConfig& c) { return std::to_string(c.seed); }},
      {"experiment", "pattern",
       [](RunConfig& c, const std::string& v) {
         PatternChoice::from_string(v);
         c.pattern = v;
       },
       [](const RunConfig& c) { return c.pattern; }},
      {"experiment", "trapping_rates_per_ps",
       [](RunConfig& c, const std::string& v) {
         std::vector<double> r;
         for (const auto& s : split_list(v)) r.push_back(positive(s));
         require_ascending(r, "trapping_rates_per_ps");
         c.trapping_rates_per_ps = std::move(r);
       },
       [](const RunConfig& c) { return join(c.trapping_rates_per_ps, fmt_double); }},
      {"experiment", "t_max", [](RunConfig& c, const std::string& v) { c.t_max = nonnegative(v); },
       [](const RunConfig& c) { return fmt_double(c.t_max); }},
      {"experiment", "t_step", [](RunConfig& c, const std::string& v) { c.t_step = positive(v); },
       [](const RunConfig& c) { return fmt_double(c.t_step); }},
      {"model", "hamiltonian_file", [](RunConfig& c, const std::string& v) { c.hamiltonian_file = v; },
       [](const RunConfig& c) { return c.hamiltonian_file; }},
      {"model", "hamiltonian_units",
       [](RunConfig& c, const std::string& v) {
         hamiltonian_units_from_string(v);
         c.hamiltonian_units = v;
       },
       [](const RunConfig& c) { return c.hamiltonian_units; }},
      {"model", "gamma_deph_per_ps", [](RunConfig& c, const std::string& v) { c.gamma_deph_per_ps = nonnegative(v); },
       [](const RunConfig& c) { return fmt_double(c.gamma_deph_per_ps); }},
      {"model", "gamma_sink_cm", [](RunConfig& c, const std::string& v) { c.gamma_sink_cm = nonnegative(v); },
       [](const RunConfig& c) { return fmt_double(c.gamma_sink_cm); }},
      {"model", "gamma_recomb_cm", [](RunConfig& c, const std::string& v) { c.gamma_recomb_cm = nonnegative(v); },
       [](const RunConfig& c) { return fmt_double(c.gamma_recomb_cm); }},
      {"output", "out_dir", [](RunConfig& c, const std::string& v) { c.out_dir = v; },
       [](const RunConfig& c) { return c.out_dir; }},
  };
  return specs;
}

void apply_setting(RunConfig& config, const std::string& key, const std::string& value) {
  const auto& specs = key_specs();
  const auto it = std::ranges::find_if(specs, [&](const KeySpec& s) { return s.name == key; });
  try {
    it->set(config, value);
  } catch (const std::exception& e) {
    throw ConfigError(key + ": " + e.what());
  }
}

ConfigError line_error(int line, const std::string& what) {
  return ConfigError("config line " + std::to_string(line) + ": " + what);
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  RunConfig config;
  std::istringstream in(text);
  std::string raw;
  std::string section;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = trim(raw.substr(0, raw.find('#')));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw line_error(line_no, "malformed section header '" + line + "'");
      section = trim(std::string_view(line).substr(1, line.size() - 2));
      if (section != "model" && section != "experiment" && section != "output") {
        throw line_error(line_no, "unknown section [" + section + "]");
      }
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw line_error(line_no, "expected 'key = value', got '" + line + "'");
    const std::string key = trim(std::string_view(line).substr(0, eq));
    const std::string value = trim(std::string_view(line).substr(eq + 1));
    const auto& specs = key_specs();
    const auto it = std::ranges::find_if(specs, [&](const KeySpec& s) { return s.name == key; });
    if (it == specs.end()) throw line_error(line_no, "unknown key '" + key + "'");
    if (!section.empty() && it->section != section) {
      throw line_error(line_no, "key '" + key + "' belongs to section [" + it->section + "], not [" + section + "]");
    }
    try {
      it->set(config, value);
    } catch (const std::exception& e) {
      throw line_error(line_no, key + ": " + e.what());
    }
  }
  return config;
}

std::string render(const RunConfig& config) {
  std::string out;
  for (const char* section : {"experiment", "model", "output"}) {
    out += std::string("[") + section + "]\n";
    for (const auto& spec : key_specs()) {
      if (spec.section == section) out += spec.name + " = " + spec.get(config) + "\n";
    }
  }
  return out;
}

void validate(const RunConfig& config) {
  if (config.experiment.empty()) throw ConfigError("no experiment given");
  if (std::ranges::find(kExperiments, config.experiment) == kExperiments.end()) {
    throw ConfigError("unknown experiment '" + config.experiment + "'");
  }
  if (config.sites.empty()) throw ConfigError("site list is empty");
  if (config.initial_states.empty()) throw ConfigError("initial_states is empty");
}

Hamiltonian7 load_hamiltonian(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open Hamiltonian file '" + path + "'");
  Hamiltonian7::Matrix m;
  for (int i = 0; i < kNumSites; ++i) {
    for (int j = 0; j < kNumSites; ++j) {
      if (!(in >> m(i, j))) throw ConfigError("Hamiltonian file '" + path + "' must hold 49 numbers");
    }
  }
  std::string extra;
  if (in >> extra) throw ConfigError("Hamiltonian file '" + path + "' has trailing content");
  try {
    return Hamiltonian7(m);
  } catch (const std::invalid_argument& e) {
    throw ConfigError("Hamiltonian file '" + path + "': " + e.what());
  }
}

ExperimentSettings make_settings(const RunConfig& config) {
  ExperimentSettings s;
  if (!config.hamiltonian_file.empty()) s.hamiltonian = load_hamiltonian(config.hamiltonian_file);
  s.units = hamiltonian_units_from_string(config.hamiltonian_units);
  s.gamma_sink_cm = config.gamma_sink_cm;
  s.gamma_recomb_cm = config.gamma_recomb_cm;
  s.pattern = PatternChoice::from_string(config.pattern);
  return s;
}

std::vector<double> dt_grid(const RunConfig& config) {
  if (config.grid == "uniform") return uniform_grid(config.grid_points, config.grid_max_ps);
  return optical_path_grid(config.grid_max_ps);
}

std::string population_trajectory_csv(const LindbladModel& model, const InitialState& rho0, double t_max,
                                      double step) {
  if (!(t_max >= 0.0) || !(step > 0.0)) throw std::invalid_argument("need t_max >= 0 and step > 0");
  const long n = std::lround(t_max / step);
  const LindbladPropagator prop(model);
  const ComplexMatrix one_step = prop.transfer(step);
  std::string out = "t_ps,pop_G,pop_1,pop_2,pop_3,pop_4,pop_5,pop_6,pop_7,pop_S\n";
  ComplexVector state = vec(rho0.realize().matrix());
  char buf[32];
  for (long k = 0; k <= n; ++k) {
    if (k > 0) state = one_step * state;
    std::snprintf(buf, sizeof buf, "%.9g", static_cast<double>(k) * step);
    out += buf;
    for (int i = 0; i < kModelDim; ++i) {
      std::snprintf(buf, sizeof buf, ",%.9g", state(i * kModelDim + i).real());
      out += buf;
    }
    out += '\n';
  }
  return out;
}

namespace {

nlohmann::json grid_metadata(const RunConfig& config, const std::vector<double>& grid) {
  return {{"kind", config.grid},
          {"points", grid.size()},
          {"first_ps", grid.empty() ? 0.0 : grid.front()},
          {"last_ps", grid.empty() ? 0.0 : grid.back()},
          {"max_ps", config.grid_max_ps}};
}

nlohmann::json interval_metadata(const std::map<std::string, IntervalTable>& intervals) {
  nlohmann::json out = nlohmann::json::object();
  for (const auto& [state, table] : intervals) {
    nlohmann::json computed = nlohmann::json::object();
    nlohmann::json reference = nlohmann::json::object();
    for (const auto& [site, dt] : table) computed[std::to_string(site)] = dt;
    for (const auto& r : reference_table2()) {
      if (r.initial_state == state) reference[std::to_string(r.site)] = r.dt_ps;
    }
    out[state] = {{"computed_dt_ps", computed}, {"reference_dt_ps", reference}};
  }
  return out;
}

std::map<std::string, IntervalTable> coherent_intervals(const ExperimentSettings& settings,
                                                        const std::vector<InitialState>& states,
                                                        const std::vector<double>& grid) {
  const auto rows = run_table2(settings, states, grid);
  std::map<std::string, IntervalTable> out;
  for (const auto& s : states) out[s.label()] = interval_table(rows, s.label());
  return out;
}

}  // namespace

void run_experiment(const RunConfig& config, std::ostream& log) {
  validate(config);
  const ExperimentSettings settings = make_settings(config);
  const std::filesystem::path dir(config.out_dir);
  nlohmann::json meta = settings_metadata(settings);
  meta["experiment"] = config.experiment;
  meta["config"] = render(config);
  const std::string& name = config.experiment;

  if (name == "propagate") {
    const LindbladModel model = settings.noisy(config.gamma_deph_per_ps);
    const auto csv = population_trajectory_csv(model, InitialState::from_label(config.initial_state), config.t_max,
                                               config.t_step);
    std::filesystem::create_directories(dir);
    std::ofstream(dir / "propagate.csv", std::ios::binary) << csv;
    meta["gamma_deph_per_ps"] = config.gamma_deph_per_ps;
    std::ofstream(dir / "propagate.meta.json", std::ios::binary) << meta.dump(2) << '\n';
    log << "wrote " << (dir / "propagate.csv").string() << '\n';
    return;
  }

  const std::vector<double> grid = dt_grid(config);
  meta["dt_grid"] = grid_metadata(config, grid);
  std::vector<SweepRecord> records;

  if (name == "coherent-scan") {
    records = run_coherent_scan(settings, InitialState::from_label(config.initial_state),
                                site_observables(config.sites), grid);
  } else if (name == "table2") {
    std::vector<InitialState> states;
    for (const auto& s : config.initial_states) states.push_back(InitialState::from_label(s));
    const auto rows = run_table2(settings, states, grid);
    records = table2_records(rows, settings.pattern);
    nlohmann::json ref = nlohmann::json::array();
    for (const auto& r : reference_table2()) {
      ref.push_back({{"initial_state", r.initial_state}, {"site", r.site}, {"K", r.K}, {"dt_ps", r.dt_ps}});
    }
    meta["reference_table"] = ref;
  } else if (name == "dephasing-sweep") {
    const auto rho0 = InitialState::from_label(config.initial_state);
    if (std::holds_alternative<MaximallyMixed7>(rho0.variant())) {
      throw ConfigError("the maximally mixed state is not used in noisy sweeps");
    }
    auto intervals = coherent_intervals(settings, {rho0}, grid);
    IntervalTable table;
    for (int m : config.sites) table[m] = intervals[rho0.label()].at(m);
    const auto gammas = config.gammas.empty() ? gamma_grid(config.gamma_max, config.gamma_step) : config.gammas;
    records = run_dephasing_sweep(settings, rho0, gammas, table);
    meta["intervals"] = interval_metadata(intervals);
    meta["gammas"] = gammas;
  } else if (name == "robustness") {
    const auto intervals = coherent_intervals(settings, noisy_initial_states(), grid);
    const auto report = run_robustness(settings, config.trials, config.sigma2, config.seed, intervals);
    records = report.records;
    nlohmann::json summary = nlohmann::json::array();
    for (const auto& e : report.entries) {
      summary.push_back({{"initial_state", e.initial_state},
                         {"site", e.site},
                         {"dt_ps", e.dt_ps},
                         {"K_nominal", e.K_nominal},
                         {"max_shift", e.max_shift},
                         {"sign_preserved", e.sign_preserved}});
      log << e.initial_state << " site" << e.site << ": K=" << e.K_nominal << " max shift " << e.max_shift
          << (e.sign_preserved ? "" : " SIGN FLIP") << '\n';
    }
    meta["summary"] = summary;
    meta["seed"] = config.seed;
    meta["trials"] = config.trials;
    meta["sigma2"] = config.sigma2;
    meta["intervals"] = interval_metadata(intervals);
  } else if (name == "trapping-variants") {
    const auto intervals = coherent_intervals(settings, noisy_initial_states(), grid);
    std::vector<std::optional<double>> rates(config.trapping_rates_per_ps.begin(), config.trapping_rates_per_ps.end());
    rates.push_back(std::nullopt);
    records = run_trapping_variants(settings, rates, intervals);
    meta["trapping_rates_per_ps"] = config.trapping_rates_per_ps;
    meta["intervals"] = interval_metadata(intervals);
  }

  write_experiment(dir, name, records, meta);
  log << "wrote " << records.size() << " rows to " << (dir / (name + ".csv")).string() << '\n';
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Leggett-Garg quantities for the seven-site FMO excitation-transfer model", "lgfmo"};
  std::string experiment;
  std::string config_path;
  std::optional<std::string> out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> pattern;
  std::optional<int> grid_points;
  std::optional<std::string> initial;
  std::optional<double> t_max;
  std::optional<double> step;

  app.add_option("experiment", experiment, "coherent-scan | table2 | dephasing-sweep | robustness | "
                                           "trapping-variants | propagate");
  app.add_option("--config", config_path, "config file (key = value with [section] headers)");
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--seed", seed, "RNG seed for Hamiltonian perturbations");
  app.add_option("--pattern", pattern, "base | flip1 | flip2 | flip3 | min");
  app.add_option("--grid-points", grid_points, "use a uniform interval grid with N points over (0, 5] ps");
  app.add_option("--initial", initial, "initial state: site1..site7, mix16, maxmix7");
  app.add_option("--t-max", t_max, "propagate: final time in ps");
  app.add_option("--step", step, "propagate: output step in ps");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  }

  try {
    RunConfig config;
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) throw ConfigError("cannot open config file '" + config_path + "'");
      std::stringstream text;
      text << in.rdbuf();
      config = parse_config(text.str());
    }
    // Command-line values override the file and go through the same checks.
    if (!experiment.empty()) apply_setting(config, "experiment", experiment);
    if (out_dir) apply_setting(config, "out_dir", *out_dir);
    if (seed) apply_setting(config, "seed", std::to_string(*seed));
    if (pattern) apply_setting(config, "pattern", *pattern);
    if (grid_points) {
      apply_setting(config, "grid", "uniform");
      apply_setting(config, "grid_points", std::to_string(*grid_points));
    }
    if (initial) apply_setting(config, "initial_state", *initial);
    if (t_max) apply_setting(config, "t_max", fmt_double(*t_max));
    if (step) apply_setting(config, "t_step", fmt_double(*step));
    run_experiment(config, out);
    return 0;
  } catch (const NumericalError& e) {
    err << "lgfmo: numerical consistency error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "lgfmo: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace lgfmo
