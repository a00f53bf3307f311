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
#include <optional>
#include <string>
#include <variant>

#include "lgfmo/quantum_core.hpp"

namespace lgfmo {

/// 7x7 real symmetric site Hamiltonian in cm^-1.
class Hamiltonian7 {
 public:
  using Matrix = Eigen::Matrix<double, kNumSites, kNumSites>;

  /// Throws std::invalid_argument unless m is exactly symmetric and finite.
  explicit Hamiltonian7(const Matrix& m);

  const Matrix& matrix() const { return matrix_; }
  // 1-based site indices.
  double entry(int row, int col) const { return matrix_(row - 1, col - 1); }

  friend bool operator==(const Hamiltonian7& a, const Hamiltonian7& b) { return a.matrix_ == b.matrix_; }

 private:
  Matrix matrix_;
};

/// How the cm^-1 Hamiltonian is turned into a generator in 1/ps.
///
/// Ordinary multiplies by c and reproduces the reference coherent optima and
/// their measurement intervals. Angular multiplies by 2*pi*c.
enum class HamiltonianUnits { Ordinary, Angular };

std::string to_string(HamiltonianUnits units);
HamiltonianUnits hamiltonian_units_from_string(const std::string& s);

double hamiltonian_scale(HamiltonianUnits units);

/// FMO master-equation parameters. Rates are stored in ps^-1.
struct LindbladModel {
  Hamiltonian7 hamiltonian;
  HamiltonianUnits units = HamiltonianUnits::Ordinary;
  std::array<RatePerPs, kNumSites> gamma_deph{};
  std::array<RatePerPs, kNumSites> gamma_recomb{};
  RatePerPs gamma_sink{};

  /// Site Hamiltonian converted to 1/ps, 7x7.
  RealMatrix site_generator() const;
  /// Site generator embedded in the 9-level basis with zero G/S rows and columns.
  ComplexMatrix embedded_generator() const;

  bool is_coherent() const;
};

Hamiltonian7 build_default_hamiltonian();

// Trapping rate 62.8/1.88 cm^-1 and recombination rate 1/(2*188) cm^-1.
inline constexpr double kDefaultSinkCm = 62.8 / 1.88;
inline constexpr double kDefaultRecombCm = 1.0 / (2.0 * 188.0);

/// Standard parameter set with uniform dephasing gamma (ps^-1).
LindbladModel build_default_model(double gamma_deph_per_ps = 0.0);

/// General constructor from cm^-1 sink/recombination inputs. Negative rates throw.
LindbladModel build_model(const Hamiltonian7& h, double gamma_deph_per_ps, double gamma_sink_cm,
                          double gamma_recomb_cm, HamiltonianUnits units = HamiltonianUnits::Ordinary);

/// Same Hamiltonian with every rate set to zero.
LindbladModel coherent_model(const Hamiltonian7& h, HamiltonianUnits units = HamiltonianUnits::Ordinary);

/// Adds independent N(0, sigma2) noise to the diagonal and upper triangle, then
/// mirrors. Deterministic for a given seed.
Hamiltonian7 perturb_hamiltonian(const Hamiltonian7& h, double sigma2, std::uint64_t seed);

/// Site block of a 9x9 matrix.
ComplexMatrix site_block(const ComplexMatrix& m9);

struct PureSite {
  int site;  // 1..7
};
struct Mixture16 {};
struct MaximallyMixed7 {};

class InitialState {
 public:
  using Variant = std::variant<PureSite, Mixture16, MaximallyMixed7>;

  InitialState(Variant v);
  static InitialState pure_site(int m) { return InitialState(PureSite{m}); }
  static InitialState mixture16() { return InitialState(Mixture16{}); }
  static InitialState maximally_mixed() { return InitialState(MaximallyMixed7{}); }

  /// Parses "site1".."site7", "mix16", "maxmix7".
  static InitialState from_label(const std::string& label);

  const Variant& variant() const { return v_; }
  std::string label() const;

  /// Density operator with support on the sites, in dimension 9 (or 7).
  DensityOperator realize(int dim = kModelDim) const;

  friend bool operator==(const InitialState&, const InitialState&) = default;

 private:
  Variant v_;
};

}  // namespace lgfmo
