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
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lgfmo/dynamics.hpp"
#include "lgfmo/fmo_model.hpp"
#include "lgfmo/quantum_core.hpp"

namespace lgfmo {

/// Sign choices (s12, s23, s13) in K = s12*C12 + s23*C23 + s13*C13 + 1.
/// Only the four patterns obtainable by flipping Q at one of the three times exist.
enum class SignPattern {
  Base,   // (+, +, +)
  Flip1,  // (-, +, -)
  Flip2,  // (-, -, +), the survival-probability form
  Flip3,  // (+, -, -)
};

inline constexpr std::array<SignPattern, 4> kAllPatterns = {SignPattern::Base, SignPattern::Flip1,
                                                            SignPattern::Flip2, SignPattern::Flip3};

struct Signs {
  int s12;
  int s23;
  int s13;
};

Signs signs(SignPattern p);
std::string to_string(SignPattern p);
SignPattern sign_pattern_from_string(const std::string& s);

double assemble_K(SignPattern p, double c12, double c23, double c13);

/// Either one fixed sign pattern or the minimum over all four.
class PatternChoice {
 public:
  PatternChoice(SignPattern p) : fixed_(p) {}  // NOLINT(google-explicit-constructor)
  static PatternChoice minimum() { return PatternChoice(); }
  /// "base", "flip1", "flip2", "flip3" or "min".
  static PatternChoice from_string(const std::string& s);

  bool is_minimum() const { return !fixed_.has_value(); }
  SignPattern fixed() const { return *fixed_; }
  std::string label() const;

  double select(double c12, double c23, double c13) const;

  friend bool operator==(const PatternChoice&, const PatternChoice&) = default;

 private:
  PatternChoice() = default;
  std::optional<SignPattern> fixed_;
};

struct Schedule {
  double t1 = 0.0;
  double t2 = 0.0;
  double t3 = 0.0;
};

struct LGResult {
  double c12 = 0.0;
  double c23 = 0.0;
  double c13 = 0.0;
  double K = 0.0;
  PatternChoice pattern = SignPattern::Flip2;
  Schedule schedule;
  std::string observable;
  std::string initial_state;

  bool violation() const { return K < 0.0; }
  double K_for(SignPattern p) const { return assemble_K(p, c12, c23, c13); }
};

/// Channel maps for one measurement interval: N_dt and N_2dt.
struct IntervalMaps {
  double dt;
  ComplexMatrix once;
  ComplexMatrix twice;
};

IntervalMaps interval_maps(const LindbladPropagator& prop, double dt);

/// 1/2 Tr[Q2 N({Q1, rho1})] for a channel given by its transfer matrix.
/// Throws NumericalError if the imaginary residue exceeds 1e-8.
double correlator(const ComplexMatrix& transfer, const DichotomicObservable& q1, const DichotomicObservable& q2,
                  const ComplexMatrix& rho1);
double correlator(const LindbladPropagator& prop, const DichotomicObservable& q1, const DichotomicObservable& q2,
                  const DensityOperator& rho1, double dt);
double correlator(const LindbladModel& model, const DichotomicObservable& q1, const DichotomicObservable& q2,
                  const DensityOperator& rho1, double dt);

/// Three-time protocol at t = 0, dt, 2dt with the same observable each time.
LGResult lg_protocol(const IntervalMaps& maps, const DichotomicObservable& q, const DensityOperator& rho0,
                     PatternChoice pattern, std::string state_label = "custom");
LGResult lg_protocol(const LindbladPropagator& prop, const DichotomicObservable& q, const DensityOperator& rho0,
                     double dt, PatternChoice pattern, std::string state_label = "custom");
LGResult lg_protocol(const LindbladModel& model, const DichotomicObservable& q, const InitialState& rho0, double dt,
                     PatternChoice pattern);

/// 4|<psi|psi_2dt>|^2 - 4 Re[<psi|psi_dt>^2 <psi_2dt|psi>] under exp(-iHt).
double coherent_survival_K(const CoherentPropagator& prop, const ComplexVector& psi, double dt);
double coherent_survival_K(const ComplexMatrix& h, const ComplexVector& psi, double dt);

/// Closed-form coherent K (pattern Flip2) for the tabulated (initial state,
/// measured site) families: pi_16, |1><1|, |6><6| and the maximally mixed state.
struct TableIRow {
  InitialState state;
  int site;  // 1..7
};

/// prop must act on the 7-site space. Throws std::invalid_argument for rows
/// outside the tabulated families.
double coherent_tableI_K(const CoherentPropagator& prop, const TableIRow& row, double dt);

struct Violation {
  double K_min;
  double dt_star;
};

/// Target of a grid search: one observable measured on one prepared state.
struct LGTarget {
  DichotomicObservable q;
  DensityOperator rho0;
};

/// Exhaustive search over grid; smallest dt wins ties. The grid must be
/// nonempty, strictly ascending and inside (0, 5] ps.
Violation find_strongest_violation(const LindbladPropagator& prop, const DichotomicObservable& q,
                                   const DensityOperator& rho0, std::span<const double> grid, PatternChoice pattern);
Violation find_strongest_violation(const LindbladModel& model, const DichotomicObservable& q,
                                   const InitialState& rho0, std::span<const double> grid, PatternChoice pattern);

/// Same search for several targets, sharing one channel evaluation per grid point.
std::vector<Violation> find_strongest_violations(const LindbladPropagator& prop, std::span<const LGTarget> targets,
                                                 std::span<const double> grid, PatternChoice pattern);

inline constexpr double kMaxSearchInterval = 5.0;  // ps

void validate_search_grid(std::span<const double> grid);

/// dt_k = k * 0.001 / c ps for k = 1, 2, ... up to t_max: a step of 0.001 cm of
/// optical path (about 0.0333564 ps). The reference optima sit on this grid.
std::vector<double> optical_path_grid(double t_max = kMaxSearchInterval);

/// dt_k = k * t_max / n for k = 1..n.
std::vector<double> uniform_grid(int n, double t_max = kMaxSearchInterval);

}  // namespace lgfmo
