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

#include "lgfmo/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#include "lgfmo/parallel.hpp"

namespace lgfmo {

namespace {

std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", x);
  return buf;
}

}  // namespace

SweepRecord make_record(std::string experiment, const LGResult& r, double gamma_per_ps) {
  if (!(gamma_per_ps >= 0.0)) throw std::invalid_argument("record dephasing rate must be nonnegative");
  return SweepRecord{std::move(experiment), r.initial_state, r.observable, gamma_per_ps, r.schedule.t2,
                     r.pattern.label(), r.K, r.violation()};
}

std::string to_csv(const std::vector<SweepRecord>& records) {
  std::string out = kCsvHeader;
  out += '\n';
  for (const auto& r : records) {
    out += r.experiment + ',' + r.initial_state + ',' + r.observable + ',' + format_double(r.gamma_per_ps) + ',' +
           format_double(r.dt_ps) + ',' + r.pattern + ',' + format_double(r.K) + ',' +
           (r.violation ? "true" : "false") + '\n';
  }
  return out;
}

LindbladModel ExperimentSettings::noisy(double gamma_deph_per_ps) const {
  return build_model(hamiltonian, gamma_deph_per_ps, gamma_sink_cm, gamma_recomb_cm, units);
}

std::vector<DichotomicObservable> site_observables(const std::vector<int>& sites) {
  std::vector<DichotomicObservable> out;
  out.reserve(sites.size());
  for (int m : sites) out.push_back(make_site_observable(StateLabel::site(m), kModelDim));
  return out;
}

std::vector<DichotomicObservable> exciton_observables(const ExperimentSettings& settings) {
  const auto eig = hermitian_eigendecomposition(settings.coherent().site_generator().cast<Complex>());
  std::vector<DichotomicObservable> out;
  for (int k = 0; k < kNumSites; ++k) {
    ComplexVector psi = ComplexVector::Zero(kModelDim);
    psi.segment(1, kNumSites) = eig.eigenvectors.col(k);
    out.push_back(make_state_observable(psi.normalized(), "exciton" + std::to_string(k + 1)));
  }
  return out;
}

std::vector<SweepRecord> run_coherent_scan(const ExperimentSettings& settings, const InitialState& rho0,
                                           const std::vector<DichotomicObservable>& observables,
                                           const std::vector<double>& grid) {
  if (observables.empty()) return {};
  validate_search_grid(grid);
  const LindbladPropagator prop(settings.coherent());
  const DensityOperator rho = rho0.realize();
  const auto per_point = parallel_map(grid.size(), [&](std::size_t i) {
    const IntervalMaps maps = interval_maps(prop, grid[i]);
    std::vector<LGResult> results;
    for (const auto& q : observables) results.push_back(lg_protocol(maps, q, rho, settings.pattern, rho0.label()));
    return results;
  });
  std::vector<SweepRecord> records;
  records.reserve(observables.size() * grid.size());
  for (std::size_t j = 0; j < observables.size(); ++j) {
    for (std::size_t i = 0; i < grid.size(); ++i) records.push_back(make_record("coherent-scan", per_point[i][j], 0.0));
  }
  return records;
}

std::vector<Table2Row> run_table2(const ExperimentSettings& settings, const std::vector<InitialState>& initial_states,
                                  const std::vector<double>& grid) {
  const auto sites = site_observables({1, 2, 3, 4, 5, 6, 7});
  std::vector<LGTarget> targets;
  for (const auto& s : initial_states) {
    const DensityOperator rho = s.realize();
    for (const auto& q : sites) targets.push_back({q, rho});
  }
  const LindbladPropagator prop(settings.coherent());
  const auto best = find_strongest_violations(prop, targets, grid, settings.pattern);

  std::vector<Table2Row> rows;
  for (std::size_t i = 0; i < initial_states.size(); ++i) {
    const auto& s = initial_states[i];
    if (std::holds_alternative<MaximallyMixed7>(s.variant())) {
      Table2Row summary{s.label(), "all", 0, std::numeric_limits<double>::infinity(), 0.0};
      for (int m = 0; m < kNumSites; ++m) {
        const auto& v = best[i * kNumSites + static_cast<std::size_t>(m)];
        if (v.K_min < summary.K_min) {
          summary.K_min = v.K_min;
          summary.dt_star = v.dt_star;
        }
      }
      rows.push_back(summary);
      continue;
    }
    for (int m = 0; m < kNumSites; ++m) {
      const auto& v = best[i * kNumSites + static_cast<std::size_t>(m)];
      rows.push_back({s.label(), sites[static_cast<std::size_t>(m)].label(), m + 1, v.K_min, v.dt_star});
    }
  }
  return rows;
}

std::vector<SweepRecord> table2_records(const std::vector<Table2Row>& rows, const PatternChoice& pattern) {
  std::vector<SweepRecord> out;
  for (const auto& r : rows) {
    out.push_back({"table2", r.initial_state, r.observable, 0.0, r.dt_star, pattern.label(), r.K_min, r.K_min < 0.0});
  }
  return out;
}

IntervalTable interval_table(const std::vector<Table2Row>& rows, const std::string& initial_state) {
  IntervalTable t;
  for (const auto& r : rows) {
    if (r.initial_state == initial_state && r.site > 0) t[r.site] = r.dt_star;
  }
  return t;
}

const std::vector<ReferenceEntry>& reference_table2() {
  static const std::vector<ReferenceEntry> table = {
      {"mix16", 1, -0.25053, 0.16678},    {"mix16", 2, -0.22321, 0.16678},    {"mix16", 3, -0.016389, 3.1021},
      {"mix16", 4, -0.01574, 1.1008},     {"mix16", 5, -0.12782, 0.13343},    {"mix16", 6, -0.17994, 0.16678},
      {"mix16", 7, -0.094719, 0.70048},   {"site1", 1, -0.4935, 0.16678},     {"site1", 2, -0.44335, 0.16678},
      {"site1", 3, -0.065461, 3.1355},    {"site1", 4, -0.091838, 1.7345},    {"site1", 5, -0.08013, 2.2015},
      {"site1", 6, -0.0097707, 0.16678},  {"site1", 7, -0.085607, 1.034},     {"site6", 1, -0.0077476, 0.13343},
      {"site6", 2, -0.0043891, 1.034},    {"site6", 3, -0.0032073, 0.13343},  {"site6", 4, -0.034082, 1.4677},
      {"site6", 5, -0.27786, 4.9701},     {"site6", 6, -0.35011, 0.16678},    {"site6", 7, -0.18045, 0.70048},
  };
  return table;
}

std::vector<double> gamma_grid(double max, double step) {
  if (!(step > 0.0) || !(max >= 0.0)) throw std::invalid_argument("gamma grid needs step > 0 and max >= 0");
  std::vector<double> out;
  for (long k = 0; k * step <= max * (1.0 + 1e-12); ++k) out.push_back(static_cast<double>(k) * step);
  return out;
}

std::vector<SweepRecord> run_dephasing_sweep(const ExperimentSettings& settings, const InitialState& rho0,
                                             const std::vector<double>& gammas, const IntervalTable& intervals,
                                             const std::string& experiment) {
  for (double g : gammas) {
    if (!(g >= 0.0)) throw std::invalid_argument("dephasing rates must be nonnegative");
  }
  const DensityOperator rho = rho0.realize();
  const auto per_gamma = parallel_map(gammas.size(), [&](std::size_t i) {
    const LindbladPropagator prop(settings.noisy(gammas[i]));
    std::vector<SweepRecord> rows;
    for (const auto& [site, dt] : intervals) {
      const auto q = make_site_observable(StateLabel::site(site), kModelDim);
      rows.push_back(make_record(experiment, lg_protocol(prop, q, rho, dt, settings.pattern, rho0.label()), gammas[i]));
    }
    return rows;
  });
  // Emit ordered by site, then gamma.
  std::vector<SweepRecord> records;
  const std::size_t n_sites = intervals.size();
  for (std::size_t s = 0; s < n_sites; ++s) {
    for (std::size_t i = 0; i < gammas.size(); ++i) records.push_back(per_gamma[i][s]);
  }
  return records;
}

std::vector<InitialState> noisy_initial_states() {
  return {InitialState::mixture16(), InitialState::pure_site(1), InitialState::pure_site(6)};
}

namespace {

struct RoomTemperaturePair {
  InitialState state;
  int site;
  double dt;
};

std::vector<RoomTemperaturePair> all_pairs(const std::map<std::string, IntervalTable>& intervals) {
  std::vector<RoomTemperaturePair> out;
  for (const auto& s : noisy_initial_states()) {
    const auto it = intervals.find(s.label());
    if (it == intervals.end()) continue;
    for (const auto& [site, dt] : it->second) out.push_back({s, site, dt});
  }
  return out;
}

LGResult room_temperature_K(const LindbladPropagator& prop, const RoomTemperaturePair& p,
                            const PatternChoice& pattern) {
  return lg_protocol(prop, make_site_observable(StateLabel::site(p.site), kModelDim), p.state.realize(), p.dt,
                     pattern, p.state.label());
}

}  // namespace

RobustnessReport run_robustness(const ExperimentSettings& settings, int trials, double sigma2, std::uint64_t seed,
                                const std::map<std::string, IntervalTable>& intervals) {
  if (trials < 1) throw std::invalid_argument("robustness needs at least one trial");
  const auto pairs = all_pairs(intervals);

  const LindbladPropagator nominal_prop(settings.noisy(kRoomTemperatureDephasing));
  RobustnessReport report;
  std::vector<RoomTemperaturePair> violating;
  for (const auto& p : pairs) {
    const LGResult r = room_temperature_K(nominal_prop, p, settings.pattern);
    if (!r.violation()) continue;
    violating.push_back(p);
    report.entries.push_back({p.state.label(), p.site, p.dt, r.K, 0.0, true});
    report.records.push_back(make_record("robustness-nominal", r, kRoomTemperatureDephasing));
  }

  const auto per_trial = parallel_map(static_cast<std::size_t>(trials), [&](std::size_t k) {
    ExperimentSettings perturbed = settings;
    perturbed.hamiltonian = perturb_hamiltonian(settings.hamiltonian, sigma2, seed + k);
    const LindbladPropagator prop(perturbed.noisy(kRoomTemperatureDephasing));
    std::vector<LGResult> results;
    for (const auto& p : violating) results.push_back(room_temperature_K(prop, p, settings.pattern));
    return results;
  });

  for (std::size_t k = 0; k < per_trial.size(); ++k) {
    char id[48];
    std::snprintf(id, sizeof id, "robustness-trial-%03zu", k + 1);
    for (std::size_t j = 0; j < violating.size(); ++j) {
      const LGResult& r = per_trial[k][j];
      auto& e = report.entries[j];
      e.max_shift = std::max(e.max_shift, std::abs(r.K - e.K_nominal));
      e.sign_preserved = e.sign_preserved && r.violation();
      report.records.push_back(make_record(id, r, kRoomTemperatureDephasing));
    }
  }
  return report;
}

std::vector<SweepRecord> run_trapping_variants(const ExperimentSettings& settings,
                                               const std::vector<std::optional<double>>& rates_per_ps,
                                               const std::map<std::string, IntervalTable>& intervals) {
  const auto pairs = all_pairs(intervals);
  const auto per_rate = parallel_map(rates_per_ps.size(), [&](std::size_t i) {
    LindbladModel model = settings.noisy(kRoomTemperatureDephasing);
    std::string id = "trapping-variants:sink=default";
    if (const auto& rate = rates_per_ps[i]) {
      if (!(*rate > 0.0)) throw std::invalid_argument("trapping rates must be positive");
      model.gamma_sink = RatePerPs(*rate);
      id = "trapping-variants:sink=" + format_double(*rate);
    }
    const LindbladPropagator prop(model);
    std::vector<SweepRecord> rows;
    for (const auto& p : pairs) {
      rows.push_back(make_record(id, room_temperature_K(prop, p, settings.pattern), kRoomTemperatureDephasing));
    }
    return rows;
  });
  std::vector<SweepRecord> records;
  for (const auto& rows : per_rate) records.insert(records.end(), rows.begin(), rows.end());
  return records;
}

nlohmann::json settings_metadata(const ExperimentSettings& settings) {
  nlohmann::json h = nlohmann::json::array();
  for (int i = 0; i < kNumSites; ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (int j = 0; j < kNumSites; ++j) row.push_back(settings.hamiltonian.matrix()(i, j));
    h.push_back(row);
  }
  const LindbladModel model = settings.noisy(0.0);
  nlohmann::json anchors = nlohmann::json::array();
  for (const auto& a : kTemperatureAnchors) anchors.push_back({{"gamma_per_ps", a.gamma_per_ps}, {"temperature_K", a.temperature_K}});
  return {
      {"hamiltonian_cm", h},
      {"hamiltonian_units", to_string(settings.units)},
      {"hamiltonian_scale_per_ps_per_cm", hamiltonian_scale(settings.units)},
      {"gamma_sink_cm", settings.gamma_sink_cm},
      {"gamma_sink_per_ps", model.gamma_sink.value()},
      {"gamma_recomb_cm", settings.gamma_recomb_cm},
      {"gamma_recomb_per_ps", model.gamma_recomb[0].value()},
      {"pattern", settings.pattern.label()},
      {"pattern_assumption",
       "K = -C12 - C23 + C13 + 1 (flip2, the survival-probability form) unless a different pattern is configured"},
      {"temperature_anchors", anchors},
  };
}

void write_experiment(const std::filesystem::path& dir, const std::string& name,
                      const std::vector<SweepRecord>& records, const nlohmann::json& metadata) {
  std::filesystem::create_directories(dir);
  {
    std::ofstream csv(dir / (name + ".csv"), std::ios::binary);
    if (!csv) throw std::runtime_error("cannot write " + (dir / (name + ".csv")).string());
    csv << to_csv(records);
  }
  std::ofstream meta(dir / (name + ".meta.json"), std::ios::binary);
  if (!meta) throw std::runtime_error("cannot write " + (dir / (name + ".meta.json")).string());
  meta << metadata.dump(2) << '\n';
}

}  // namespace lgfmo
