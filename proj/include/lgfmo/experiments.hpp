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

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "lgfmo/fmo_model.hpp"
#include "lgfmo/leggett_garg.hpp"

namespace lgfmo {

/// One row of experiment output.
struct SweepRecord {
  std::string experiment;
  std::string initial_state;
  std::string observable;
  double gamma_per_ps = 0.0;
  double dt_ps = 0.0;
  std::string pattern;
  double K = 0.0;
  bool violation = false;

  friend bool operator==(const SweepRecord&, const SweepRecord&) = default;
};

SweepRecord make_record(std::string experiment, const LGResult& r, double gamma_per_ps);

inline constexpr const char* kCsvHeader = "experiment,initial_state,observable,gamma_per_ps,dt_ps,pattern,K,violation";

/// CSV text with the fixed header, 9 significant digits, LF line endings.
std::string to_csv(const std::vector<SweepRecord>& records);

struct TemperatureAnchor {
  double gamma_per_ps;
  double temperature_K;
};

inline constexpr std::array<TemperatureAnchor, 2> kTemperatureAnchors{{{2.1, 77.0}, {9.1, 298.0}}};
inline constexpr double kRoomTemperatureDephasing = 9.1;  // ps^-1

/// Model and search settings shared by all experiments.
struct ExperimentSettings {
  Hamiltonian7 hamiltonian = build_default_hamiltonian();
  HamiltonianUnits units = HamiltonianUnits::Ordinary;
  double gamma_sink_cm = kDefaultSinkCm;
  double gamma_recomb_cm = kDefaultRecombCm;
  PatternChoice pattern = SignPattern::Flip2;

  LindbladModel coherent() const { return coherent_model(hamiltonian, units); }
  LindbladModel noisy(double gamma_deph_per_ps) const;
};

std::vector<DichotomicObservable> site_observables(const std::vector<int>& sites);
/// Projectors onto the energy eigenstates of the converted Hamiltonian, embedded in dim 9.
std::vector<DichotomicObservable> exciton_observables(const ExperimentSettings& settings);

std::vector<SweepRecord> run_coherent_scan(const ExperimentSettings& settings, const InitialState& rho0,
                                           const std::vector<DichotomicObservable>& observables,
                                           const std::vector<double>& grid);

struct Table2Row {
  std::string initial_state;
  std::string observable;  // "site<m>" or "all"
  int site;                // 0 for the maximally mixed summary row
  double K_min;
  double dt_star;
};

/// Strongest coherent violation per (initial state, site). A maximally mixed
/// initial state contributes a single summary row over all sites.
std::vector<Table2Row> run_table2(const ExperimentSettings& settings, const std::vector<InitialState>& initial_states,
                                  const std::vector<double>& grid);

std::vector<SweepRecord> table2_records(const std::vector<Table2Row>& rows, const PatternChoice& pattern);

/// Measurement interval per site for one initial state.
using IntervalTable = std::map<int, double>;
IntervalTable interval_table(const std::vector<Table2Row>& rows, const std::string& initial_state);

/// Reference coherent optimum (K, dt) per (initial state, site) for comparison.
struct ReferenceEntry {
  const char* initial_state;
  int site;
  double K;
  double dt_ps;
};
const std::vector<ReferenceEntry>& reference_table2();

/// 0, step, 2*step, ... up to max (inclusive within rounding).
std::vector<double> gamma_grid(double max = 12.0, double step = 0.1);

std::vector<SweepRecord> run_dephasing_sweep(const ExperimentSettings& settings, const InitialState& rho0,
                                             const std::vector<double>& gammas, const IntervalTable& intervals,
                                             const std::string& experiment = "dephasing-sweep");

struct RobustnessEntry {
  std::string initial_state;
  int site;
  double dt_ps;
  double K_nominal;
  double max_shift;
  bool sign_preserved;
};

struct RobustnessReport {
  std::vector<RobustnessEntry> entries;
  std::vector<SweepRecord> records;
};

/// Perturbs the Hamiltonian `trials` times (trial k uses seed + k) and records
/// K at room-temperature dephasing for every pair that violates nominally.
RobustnessReport run_robustness(const ExperimentSettings& settings, int trials, double sigma2, std::uint64_t seed,
                                const std::map<std::string, IntervalTable>& intervals);

/// K at room-temperature dephasing for every (initial state, site) pair and
/// every trapping rate; nullopt stands for the configured default rate.
std::vector<SweepRecord> run_trapping_variants(const ExperimentSettings& settings,
                                               const std::vector<std::optional<double>>& rates_per_ps,
                                               const std::map<std::string, IntervalTable>& intervals);

/// The three initial states used in the noisy experiments.
std::vector<InitialState> noisy_initial_states();

nlohmann::json settings_metadata(const ExperimentSettings& settings);

/// Writes <dir>/<name>.csv and <dir>/<name>.meta.json.
void write_experiment(const std::filesystem::path& dir, const std::string& name,
                      const std::vector<SweepRecord>& records, const nlohmann::json& metadata);

}  // namespace lgfmo
