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

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace lgfmo {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;

/// Raised when a computed quantity fails a numerical consistency check
/// (e.g. a correlator that should be real carries an imaginary residue).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Speed of light in cm/ps.
inline constexpr double kSpeedOfLightCmPerPs = 0.0299792458;

/// Number of levels in the full model: ground, seven sites, sink.
inline constexpr int kModelDim = 9;
inline constexpr int kNumSites = 7;

/// One of the nine basis labels. Row/column order is G, 1, ..., 7, S.
class StateLabel {
 public:
  enum class Kind { Ground, Site, Sink };

  static StateLabel ground() { return StateLabel(Kind::Ground, 0); }
  static StateLabel sink() { return StateLabel(Kind::Sink, 0); }
  static StateLabel site(int m);

  Kind kind() const { return kind_; }
  bool is_site() const { return kind_ == Kind::Site; }
  // Site number 1..7; 0 for G and S.
  int site_number() const { return site_; }

  /// Index in the 9-level basis.
  int index() const;
  /// Index in the 7-site basis; only valid for sites.
  int site_index() const;

  std::string name() const;

  friend bool operator==(const StateLabel&, const StateLabel&) = default;

 private:
  StateLabel(Kind kind, int site) : kind_(kind), site_(site) {}
  Kind kind_;
  int site_;
};

struct Wavenumber {
  double value = 0.0;  // cm^-1
};

/// A nonnegative rate in ps^-1.
class RatePerPs {
 public:
  RatePerPs() = default;
  explicit RatePerPs(double value);
  double value() const { return value_; }

  friend bool operator==(const RatePerPs&, const RatePerPs&) = default;

 private:
  double value_ = 0.0;
};

/// 2*pi*c*e, the angular frequency in rad/ps of a wavenumber.
double wavenumber_to_angular_ps(Wavenumber e);

/// c*e, the ordinary frequency in 1/ps of a wavenumber.
double wavenumber_to_ordinary_ps(Wavenumber e);

bool approx_equal(const ComplexMatrix& a, const ComplexMatrix& b, double abs_tol);
double max_abs(const ComplexMatrix& m);
double hermiticity_error(const ComplexMatrix& m);

/// Hermitian, unit-trace, positive semidefinite matrix.
class DensityOperator {
 public:
  static constexpr double kHermitianTol = 1e-10;
  static constexpr double kTraceTol = 1e-10;
  static constexpr double kPositivityTol = 1e-9;

  /// Throws std::invalid_argument if any invariant fails.
  explicit DensityOperator(ComplexMatrix matrix);

  const ComplexMatrix& matrix() const { return matrix_; }
  Eigen::Index dim() const { return matrix_.rows(); }

  double population(int index) const { return matrix_(index, index).real(); }

  static DensityOperator pure(const ComplexVector& psi);

 private:
  ComplexMatrix matrix_;
};

/// Two-outcome observable Q = 2P - I with P a rank-1 projector.
class DichotomicObservable {
 public:
  DichotomicObservable(ComplexMatrix projector, std::string label);

  const ComplexMatrix& projector() const { return projector_; }
  /// The +-1 valued observable 2P - I.
  ComplexMatrix observable() const;
  const std::string& label() const { return label_; }
  Eigen::Index dim() const { return projector_.rows(); }

 private:
  ComplexMatrix projector_;
  std::string label_;
};

/// Observable asking "is the excitation at site m?". dim is 7 or 9.
DichotomicObservable make_site_observable(const StateLabel& m, int dim);

/// Observable asking "is the system in state psi?". psi must be normalized.
DichotomicObservable make_state_observable(const ComplexVector& psi, std::string label = "state");

struct Eigendecomposition {
  Eigen::VectorXd eigenvalues;  // ascending
  ComplexMatrix eigenvectors;   // columns
};

/// Eigendecomposition of a Hermitian matrix with a reproducible gauge.
///
/// Each eigenvector is phase-fixed so its first nonzero entry is real and
/// positive. Eigenvalues are ascending; inside a degenerate cluster (relative
/// gap < 1e-9) columns are ordered by descending lexicographic comparison of
/// their (real, imag) entries, which makes the identity decompose to V = I.
Eigendecomposition hermitian_eigendecomposition(const ComplexMatrix& m);

}  // namespace lgfmo
