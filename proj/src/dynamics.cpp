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

#include "lgfmo/dynamics.hpp"

#include <cmath>

#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

namespace lgfmo {

namespace {

const Complex kI(0.0, 1.0);

ComplexMatrix ket_bra(int row, int col) {
  ComplexMatrix m = ComplexMatrix::Zero(kModelDim, kModelDim);
  m(row, col) = 1.0;
  return m;
}

void require_model_dim(const ComplexMatrix& rho) {
  if (rho.rows() != kModelDim || rho.cols() != kModelDim) {
    throw std::invalid_argument("expected a 9x9 operator");
  }
}

ComplexMatrix dissipator(double rate, const ComplexMatrix& a, const ComplexMatrix& rho) {
  const ComplexMatrix ada = a.adjoint() * a;
  return rate * (2.0 * a * rho * a.adjoint() - ada * rho - rho * ada);
}

}  // namespace

ComplexVector vec(const ComplexMatrix& m) {
  return Eigen::Map<const ComplexVector>(m.data(), m.size());
}

ComplexMatrix unvec(const ComplexVector& v, Eigen::Index dim) {
  if (v.size() != dim * dim) throw std::invalid_argument("vector length does not match dim^2");
  return Eigen::Map<const ComplexMatrix>(v.data(), dim, dim);
}

ComplexMatrix lindblad_rhs(const ComplexMatrix& h, const std::vector<JumpTerm>& jumps, const ComplexMatrix& rho) {
  ComplexMatrix out = -kI * (h * rho - rho * h);
  for (const auto& j : jumps) out += dissipator(j.rate, j.op, rho);
  return out;
}

ComplexMatrix apply_dissipator(const LindbladModel& model, const ComplexMatrix& rho) {
  require_model_dim(rho);
  ComplexMatrix out = ComplexMatrix::Zero(kModelDim, kModelDim);
  for (int m = 1; m <= kNumSites; ++m) {
    const auto site = StateLabel::site(m);
    out += dissipator(model.gamma_recomb[site.site_index()].value(),
                      ket_bra(StateLabel::ground().index(), site.index()), rho);
  }
  return out;
}

ComplexMatrix apply_sink(const LindbladModel& model, const ComplexMatrix& rho) {
  require_model_dim(rho);
  return dissipator(model.gamma_sink.value(), ket_bra(StateLabel::sink().index(), StateLabel::site(3).index()),
                    rho);
}

ComplexMatrix apply_dephasing(const LindbladModel& model, const ComplexMatrix& rho) {
  require_model_dim(rho);
  ComplexMatrix out = ComplexMatrix::Zero(kModelDim, kModelDim);
  for (int m = 1; m <= kNumSites; ++m) {
    const auto site = StateLabel::site(m);
    out += dissipator(model.gamma_deph[site.site_index()].value(), ket_bra(site.index(), site.index()), rho);
  }
  return out;
}

ComplexMatrix apply_master_equation(const LindbladModel& model, const ComplexMatrix& rho) {
  require_model_dim(rho);
  const ComplexMatrix h = model.embedded_generator();
  return -kI * (h * rho - rho * h) + apply_dissipator(model, rho) + apply_sink(model, rho) +
         apply_dephasing(model, rho);
}

std::vector<JumpTerm> fmo_jump_terms(const LindbladModel& model) {
  std::vector<JumpTerm> jumps;
  for (int m = 1; m <= kNumSites; ++m) {
    const auto site = StateLabel::site(m);
    if (const double r = model.gamma_recomb[site.site_index()].value(); r > 0.0) {
      jumps.push_back({r, ket_bra(StateLabel::ground().index(), site.index())});
    }
  }
  if (const double r = model.gamma_sink.value(); r > 0.0) {
    jumps.push_back({r, ket_bra(StateLabel::sink().index(), StateLabel::site(3).index())});
  }
  for (int m = 1; m <= kNumSites; ++m) {
    const auto site = StateLabel::site(m);
    if (const double r = model.gamma_deph[site.site_index()].value(); r > 0.0) {
      jumps.push_back({r, ket_bra(site.index(), site.index())});
    }
  }
  return jumps;
}

Liouvillian::Liouvillian(const ComplexMatrix& hamiltonian, const std::vector<JumpTerm>& jumps)
    : dim_(hamiltonian.rows()) {
  if (hamiltonian.rows() != hamiltonian.cols()) throw std::invalid_argument("Hamiltonian must be square");
  const auto id = ComplexMatrix::Identity(dim_, dim_);
  // vec(A X B) = (B^T kron A) vec(X)
  matrix_ = -kI * (Eigen::kroneckerProduct(id, hamiltonian).eval() -
                   Eigen::kroneckerProduct(hamiltonian.transpose(), id).eval());
  for (const auto& j : jumps) {
    if (j.op.rows() != dim_ || j.op.cols() != dim_) throw std::invalid_argument("jump operator dimension mismatch");
    const ComplexMatrix ada = j.op.adjoint() * j.op;
    matrix_ += j.rate * (2.0 * Eigen::kroneckerProduct(j.op.conjugate(), j.op).eval() -
                         Eigen::kroneckerProduct(id, ada).eval() -
                         Eigen::kroneckerProduct(ada.transpose(), id).eval());
  }
}

ComplexMatrix Liouvillian::apply(const ComplexMatrix& rho) const {
  return unvec(matrix_ * vec(rho), dim_);
}

Liouvillian build_liouvillian(const LindbladModel& model) {
  return Liouvillian(model.embedded_generator(), fmo_jump_terms(model));
}

CoherentPropagator::CoherentPropagator(const ComplexMatrix& h) : eig_(hermitian_eigendecomposition(h)) {}

ComplexMatrix CoherentPropagator::unitary(double t) const {
  const ComplexVector phases = (-kI * t * eig_.eigenvalues.cast<Complex>()).array().exp();
  return eig_.eigenvectors * phases.asDiagonal() * eig_.eigenvectors.adjoint();
}

ComplexVector CoherentPropagator::apply_ket(const ComplexVector& psi, double t) const {
  return unitary(t) * psi;
}

ComplexMatrix CoherentPropagator::apply(const ComplexMatrix& rho, double t) const {
  const ComplexMatrix u = unitary(t);
  return u * rho * u.adjoint();
}

DensityOperator CoherentPropagator::apply(const DensityOperator& rho, double t) const {
  return DensityOperator(apply(rho.matrix(), t));
}

LindbladPropagator::LindbladPropagator(Liouvillian generator)
    : generator_(std::move(generator)), cache_(std::make_shared<Cache>()) {}

LindbladPropagator::LindbladPropagator(const LindbladModel& model) : LindbladPropagator(build_liouvillian(model)) {}

ComplexMatrix LindbladPropagator::transfer(double t) const {
  if (!(t >= 0.0) || !std::isfinite(t)) {
    throw std::invalid_argument("propagation time must be finite and nonnegative");
  }
  {
    std::lock_guard lock(cache_->mutex);
    if (auto it = cache_->maps.find(t); it != cache_->maps.end()) return it->second;
  }
  ComplexMatrix map = (generator_.matrix() * t).exp();
  std::lock_guard lock(cache_->mutex);
  if (cache_->maps.size() >= kMaxCached) cache_->maps.clear();
  cache_->maps.emplace(t, map);
  return map;
}

ComplexMatrix LindbladPropagator::apply(const ComplexMatrix& x, double t) const {
  if (x.rows() != dim() || x.cols() != dim()) throw std::invalid_argument("operator dimension mismatch");
  return unvec(transfer(t) * vec(x), dim());
}

DensityOperator LindbladPropagator::propagate(const DensityOperator& rho, double t) const {
  return DensityOperator(apply(rho.matrix(), t));
}

DensityOperator propagate(const LindbladModel& model, const DensityOperator& rho, double t) {
  return LindbladPropagator(model).propagate(rho, t);
}

}  // namespace lgfmo
