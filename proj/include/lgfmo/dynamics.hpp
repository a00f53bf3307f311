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

#include <map>
#include <memory>
#include <mutex>
#include <vector>

#include "lgfmo/fmo_model.hpp"
#include "lgfmo/quantum_core.hpp"

namespace lgfmo {

/// One dissipative channel rate * (2 A rho A^dag - {A^dag A, rho}).
struct JumpTerm {
  double rate;
  ComplexMatrix op;
};

/// Column-stacking vectorization: vec(A X B) = (B^T kron A) vec(X).
ComplexVector vec(const ComplexMatrix& m);
ComplexMatrix unvec(const ComplexVector& v, Eigen::Index dim);

/// -i[H, rho] + sum_k rate_k (2 A rho A^dag - {A^dag A, rho}), evaluated directly.
ComplexMatrix lindblad_rhs(const ComplexMatrix& h, const std::vector<JumpTerm>& jumps, const ComplexMatrix& rho);

// The three FMO dissipators, applied to a 9x9 matrix.
ComplexMatrix apply_dissipator(const LindbladModel& model, const ComplexMatrix& rho);
ComplexMatrix apply_sink(const LindbladModel& model, const ComplexMatrix& rho);
ComplexMatrix apply_dephasing(const LindbladModel& model, const ComplexMatrix& rho);

/// Right-hand side of the FMO master equation.
ComplexMatrix apply_master_equation(const LindbladModel& model, const ComplexMatrix& rho);

/// Jump operators (recombination, trapping, dephasing) of the FMO model, zero rates omitted.
std::vector<JumpTerm> fmo_jump_terms(const LindbladModel& model);

/// Superoperator acting on column-stacked density matrices.
class Liouvillian {
 public:
  Liouvillian(const ComplexMatrix& hamiltonian, const std::vector<JumpTerm>& jumps);

  const ComplexMatrix& matrix() const { return matrix_; }
  Eigen::Index dim() const { return dim_; }
  ComplexMatrix apply(const ComplexMatrix& rho) const;

 private:
  ComplexMatrix matrix_;
  Eigen::Index dim_;
};

Liouvillian build_liouvillian(const LindbladModel& model);

/// Exact unitary evolution exp(-iHt) from an eigendecomposition of H.
class CoherentPropagator {
 public:
  /// h is Hermitian and already in 1/ps.
  explicit CoherentPropagator(const ComplexMatrix& h);

  ComplexMatrix unitary(double t) const;
  ComplexVector apply_ket(const ComplexVector& psi, double t) const;
  ComplexMatrix apply(const ComplexMatrix& rho, double t) const;
  DensityOperator apply(const DensityOperator& rho, double t) const;

  const Eigendecomposition& spectrum() const { return eig_; }

 private:
  Eigendecomposition eig_;
};

/// Lindblad semigroup exp(L t), with transfer matrices cached per interval.
///
/// Copies share the cache. Safe for concurrent use.
class LindbladPropagator {
 public:
  explicit LindbladPropagator(Liouvillian generator);
  explicit LindbladPropagator(const LindbladModel& model);

  const Liouvillian& generator() const { return generator_; }
  Eigen::Index dim() const { return generator_.dim(); }

  /// exp(L t). Throws std::invalid_argument for t < 0.
  ComplexMatrix transfer(double t) const;

  /// Applies the channel for time t to any (not necessarily positive) operator.
  ComplexMatrix apply(const ComplexMatrix& x, double t) const;
  DensityOperator propagate(const DensityOperator& rho, double t) const;

 private:
  struct Cache {
    std::mutex mutex;
    std::map<double, ComplexMatrix> maps;
  };
  static constexpr std::size_t kMaxCached = 64;

  Liouvillian generator_;
  std::shared_ptr<Cache> cache_;
};

DensityOperator propagate(const LindbladModel& model, const DensityOperator& rho, double t);

}  // namespace lgfmo
