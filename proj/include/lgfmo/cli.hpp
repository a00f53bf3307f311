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

#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "lgfmo/experiments.hpp"
#include "lgfmo/fmo_model.hpp"

namespace lgfmo {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline const std::vector<std::string> kExperiments = {"coherent-scan",  "table2",            "dephasing-sweep",
                                                      "robustness",     "trapping-variants", "propagate"};

/// Everything a run needs. Defaults give the standard FMO model.
///
/// Text form: `key = value` lines, optional `[model]`, `[experiment]` and
/// `[output]` section headers, `#` comments. Keys outside any section may be
/// any known key; keys inside a section must belong to it.
struct RunConfig {
  // [experiment]
  std::string experiment;  // empty: taken from the command line
  std::string initial_state = "mix16";
  std::vector<std::string> initial_states = {"mix16", "site1", "site6", "maxmix7"};
  std::vector<int> sites = {1, 2, 3, 4, 5, 6, 7};
  std::string grid = "optical-path";  // or "uniform"
  int grid_points = 1500;
  double grid_max_ps = 5.0;
  std::vector<double> gammas;  // empty: 0..gamma_max in gamma_step
  double gamma_max = 12.0;
  double gamma_step = 0.1;
  int trials = 10;
  double sigma2 = 2.0;
  std::uint64_t seed = 20100101;
  std::string pattern = "flip2";
  std::vector<double> trapping_rates_per_ps = {0.25, 1.0, 4.0};
  double t_max = 5.0;
  double t_step = 0.01;

  // [model]
  std::string hamiltonian_file;  // empty: built-in Hamiltonian
  std::string hamiltonian_units = "ordinary";
  double gamma_deph_per_ps = 0.0;
  double gamma_sink_cm = kDefaultSinkCm;
  double gamma_recomb_cm = kDefaultRecombCm;

  // [output]
  std::string out_dir = ".";

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

/// Strict parse; throws ConfigError naming the offending line.
RunConfig parse_config(const std::string& text);

/// Checks cross-field invariants; throws ConfigError.
void validate(const RunConfig& config);

/// Text that parses back to the same config.
std::string render(const RunConfig& config);

/// Reads a 7x7 whitespace-separated matrix in cm^-1.
Hamiltonian7 load_hamiltonian(const std::string& path);

ExperimentSettings make_settings(const RunConfig& config);
std::vector<double> dt_grid(const RunConfig& config);

/// Runs one experiment and writes its outputs under config.out_dir.
void run_experiment(const RunConfig& config, std::ostream& log);

/// Population trajectory CSV: t_ps,pop_G,pop_1..pop_7,pop_S.
std::string population_trajectory_csv(const LindbladModel& model, const InitialState& rho0, double t_max,
                                      double step);

/// Command-line entry point. 0 success, 1 usage/config error, 2 numerical error.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace lgfmo
