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

#include "lgfmo/quantum_core.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

namespace lgfmo {

StateLabel StateLabel::site(int m) {
  if (m < 1 || m > kNumSites) {
    throw std::invalid_argument("site index must be in 1..7, got " + std::to_string(m));
  }
  return StateLabel(Kind::Site, m);
}

int StateLabel::index() const {
  switch (kind_) {
    case Kind::Ground:
      return 0;
    case Kind::Site:
      return site_;
    case Kind::Sink:
      return kModelDim - 1;
  }
  return -1;
}

int StateLabel::site_index() const {
  if (!is_site()) throw std::invalid_argument("label " + name() + " is not a site");
  return site_ - 1;
}

std::string StateLabel::name() const {
  switch (kind_) {
    case Kind::Ground:
      return "G";
    case Kind::Site:
      return std::to_string(site_);
    case Kind::Sink:
      return "S";
  }
  return "?";
}

RatePerPs::RatePerPs(double value) : value_(value) {
  if (!(value >= 0.0) || !std::isfinite(value)) {
    throw std::invalid_argument("rate must be a finite nonnegative number, got " + std::to_string(value));
  }
}

double wavenumber_to_angular_ps(Wavenumber e) {
  return 2.0 * std::numbers::pi * kSpeedOfLightCmPerPs * e.value;
}

double wavenumber_to_ordinary_ps(Wavenumber e) { return kSpeedOfLightCmPerPs * e.value; }

double max_abs(const ComplexMatrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

bool approx_equal(const ComplexMatrix& a, const ComplexMatrix& b, double abs_tol) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
  return max_abs(a - b) <= abs_tol;
}

double hermiticity_error(const ComplexMatrix& m) { return max_abs(m - m.adjoint()); }

DensityOperator::DensityOperator(ComplexMatrix matrix) : matrix_(std::move(matrix)) {
  if (matrix_.rows() != matrix_.cols() || matrix_.rows() == 0) {
    throw std::invalid_argument("density operator must be a nonempty square matrix");
  }
  if (hermiticity_error(matrix_) > kHermitianTol) {
    throw std::invalid_argument("density operator is not Hermitian");
  }
  if (std::abs(matrix_.trace() - Complex(1.0)) > kTraceTol) {
    throw std::invalid_argument("density operator does not have unit trace");
  }
  const Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(matrix_, Eigen::EigenvaluesOnly);
  if (solver.eigenvalues().minCoeff() < -kPositivityTol) {
    throw std::invalid_argument("density operator is not positive semidefinite");
  }
}

DensityOperator DensityOperator::pure(const ComplexVector& psi) {
  return DensityOperator(psi * psi.adjoint());
}

DichotomicObservable::DichotomicObservable(ComplexMatrix projector, std::string label)
    : projector_(std::move(projector)), label_(std::move(label)) {
  constexpr double tol = 1e-12;
  if (projector_.rows() != projector_.cols()) {
    throw std::invalid_argument("projector must be square");
  }
  if (hermiticity_error(projector_) > tol || max_abs(projector_ * projector_ - projector_) > tol) {
    throw std::invalid_argument("matrix is not an orthogonal projector");
  }
  if (std::abs(projector_.trace() - Complex(1.0)) > tol) {
    throw std::invalid_argument("projector must have rank 1");
  }
}

ComplexMatrix DichotomicObservable::observable() const {
  return 2.0 * projector_ - ComplexMatrix::Identity(dim(), dim());
}

DichotomicObservable make_site_observable(const StateLabel& m, int dim) {
  if (!m.is_site()) {
    throw std::invalid_argument("site observables are defined for chromophore sites only, got " + m.name());
  }
  if (dim != kNumSites && dim != kModelDim) {
    throw std::invalid_argument("site observable dimension must be 7 or 9");
  }
  const int idx = dim == kModelDim ? m.index() : m.site_index();
  ComplexMatrix p = ComplexMatrix::Zero(dim, dim);
  p(idx, idx) = 1.0;
  return DichotomicObservable(std::move(p), "site" + m.name());
}

DichotomicObservable make_state_observable(const ComplexVector& psi, std::string label) {
  if (std::abs(psi.norm() - 1.0) > 1e-12) {
    throw std::invalid_argument("state vector is not normalized (norm " + std::to_string(psi.norm()) + ")");
  }
  return DichotomicObservable(psi * psi.adjoint(), std::move(label));
}

namespace {

void fix_phase(Eigen::Ref<ComplexVector> v) {
  const double threshold = 1e-10 * v.cwiseAbs().maxCoeff();
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (std::abs(v(i)) > threshold) {
      v *= std::conj(v(i)) / std::abs(v(i));
      v(i) = Complex(v(i).real(), 0.0);
      return;
    }
  }
}

// True if a should come before b within a degenerate cluster.
bool lexicographically_before(const ComplexVector& a, const ComplexVector& b) {
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    if (a(i).real() != b(i).real()) return a(i).real() > b(i).real();
    if (a(i).imag() != b(i).imag()) return a(i).imag() > b(i).imag();
  }
  return false;
}

}  // namespace

Eigendecomposition hermitian_eigendecomposition(const ComplexMatrix& m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("matrix must be square");
  if (hermiticity_error(m) > 1e-10) throw std::invalid_argument("matrix is not Hermitian");

  const Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(m);
  if (solver.info() != Eigen::Success) throw NumericalError("Hermitian eigensolver did not converge");

  const Eigen::Index n = m.rows();
  ComplexMatrix vecs = solver.eigenvectors();
  for (Eigen::Index j = 0; j < n; ++j) fix_phase(vecs.col(j));
  const Eigen::VectorXd& vals = solver.eigenvalues();

  // Eigen already returns ascending eigenvalues; only reorder within clusters.
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  const double scale = std::max(1.0, vals.size() ? vals.cwiseAbs().maxCoeff() : 0.0);
  std::size_t begin = 0;
  while (begin < order.size()) {
    std::size_t end = begin + 1;
    while (end < order.size() &&
           std::abs(vals(order[end]) - vals(order[end - 1])) < 1e-9 * scale) {
      ++end;
    }
    std::stable_sort(order.begin() + static_cast<std::ptrdiff_t>(begin),
                     order.begin() + static_cast<std::ptrdiff_t>(end),
                     [&](Eigen::Index a, Eigen::Index b) {
                       return lexicographically_before(vecs.col(a), vecs.col(b));
                     });
    begin = end;
  }

  Eigendecomposition out{Eigen::VectorXd(n), ComplexMatrix(n, n)};
  for (Eigen::Index j = 0; j < n; ++j) {
    out.eigenvalues(j) = vals(order[static_cast<std::size_t>(j)]);
    out.eigenvectors.col(j) = vecs.col(order[static_cast<std::size_t>(j)]);
  }
  return out;
}

}  // namespace lgfmo
