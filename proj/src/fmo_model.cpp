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

#include "lgfmo/fmo_model.hpp"

#include <cmath>
#include <random>

namespace lgfmo {

Hamiltonian7::Hamiltonian7(const Matrix& m) : matrix_(m) {
  if (!matrix_.allFinite()) throw std::invalid_argument("Hamiltonian has non-finite entries");
  if (matrix_ != matrix_.transpose()) throw std::invalid_argument("Hamiltonian must be symmetric");
}

std::string to_string(HamiltonianUnits units) {
  return units == HamiltonianUnits::Ordinary ? "ordinary" : "angular";
}

HamiltonianUnits hamiltonian_units_from_string(const std::string& s) {
  if (s == "ordinary") return HamiltonianUnits::Ordinary;
  if (s == "angular") return HamiltonianUnits::Angular;
  throw std::invalid_argument("unknown Hamiltonian units '" + s + "' (expected ordinary|angular)");
}

double hamiltonian_scale(HamiltonianUnits units) {
  return units == HamiltonianUnits::Ordinary ? wavenumber_to_ordinary_ps(Wavenumber{1.0})
                                             : wavenumber_to_angular_ps(Wavenumber{1.0});
}

RealMatrix LindbladModel::site_generator() const {
  return hamiltonian.matrix() * hamiltonian_scale(units);
}

ComplexMatrix LindbladModel::embedded_generator() const {
  ComplexMatrix h = ComplexMatrix::Zero(kModelDim, kModelDim);
  h.block(1, 1, kNumSites, kNumSites) = site_generator().cast<Complex>();
  return h;
}

bool LindbladModel::is_coherent() const {
  if (gamma_sink.value() != 0.0) return false;
  for (int m = 0; m < kNumSites; ++m) {
    if (gamma_deph[m].value() != 0.0 || gamma_recomb[m].value() != 0.0) return false;
  }
  return true;
}

Hamiltonian7 build_default_hamiltonian() {
  Hamiltonian7::Matrix h;
  // clang-format off
  h <<  215.0, -104.1,    5.1,   -4.3,    4.7,  -15.1,   -7.8,
       -104.1,  220.0,   32.6,    7.1,    5.4,    8.3,    0.8,
          5.1,   32.6,    0.0,  -46.8,    1.0,   -8.1,    5.1,
         -4.3,    7.1,  -46.8,  125.0,  -70.7,  -14.7,  -61.5,
          4.7,    5.4,    1.0,  -70.7,  450.0,   89.7,   -2.5,
        -15.1,    8.3,   -8.1,  -14.7,   89.7,  330.0,   32.7,
         -7.8,    0.8,    5.1,  -61.5,   -2.5,   32.7,  280.0;
  // clang-format on
  return Hamiltonian7(h);
}

LindbladModel build_model(const Hamiltonian7& h, double gamma_deph_per_ps, double gamma_sink_cm,
                          double gamma_recomb_cm, HamiltonianUnits units) {
  if (gamma_sink_cm < 0.0 || gamma_recomb_cm < 0.0) {
    throw std::invalid_argument("trapping and recombination rates must be nonnegative");
  }
  LindbladModel model{h, units, {}, {}, {}};
  const RatePerPs deph(gamma_deph_per_ps);
  const RatePerPs recomb(wavenumber_to_angular_ps(Wavenumber{gamma_recomb_cm}));
  model.gamma_deph.fill(deph);
  model.gamma_recomb.fill(recomb);
  model.gamma_sink = RatePerPs(wavenumber_to_angular_ps(Wavenumber{gamma_sink_cm}));
  return model;
}

LindbladModel build_default_model(double gamma_deph_per_ps) {
  return build_model(build_default_hamiltonian(), gamma_deph_per_ps, kDefaultSinkCm, kDefaultRecombCm);
}

LindbladModel coherent_model(const Hamiltonian7& h, HamiltonianUnits units) {
  return LindbladModel{h, units, {}, {}, {}};
}

Hamiltonian7 perturb_hamiltonian(const Hamiltonian7& h, double sigma2, std::uint64_t seed) {
  if (!(sigma2 >= 0.0)) throw std::invalid_argument("noise variance must be nonnegative");
  Hamiltonian7::Matrix m = h.matrix();
  if (sigma2 == 0.0) return Hamiltonian7(m);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, std::sqrt(sigma2));
  for (int i = 0; i < kNumSites; ++i) {
    for (int j = i; j < kNumSites; ++j) {
      m(i, j) += noise(rng);
      m(j, i) = m(i, j);
    }
  }
  return Hamiltonian7(m);
}

ComplexMatrix site_block(const ComplexMatrix& m9) {
  if (m9.rows() != kModelDim || m9.cols() != kModelDim) throw std::invalid_argument("expected a 9x9 matrix");
  return m9.block(1, 1, kNumSites, kNumSites);
}

InitialState::InitialState(Variant v) : v_(v) {
  if (const auto* p = std::get_if<PureSite>(&v_)) StateLabel::site(p->site);
}

InitialState InitialState::from_label(const std::string& label) {
  if (label == "mix16") return mixture16();
  if (label == "maxmix7") return maximally_mixed();
  if (label.size() == 5 && label.rfind("site", 0) == 0 && label[4] >= '1' && label[4] <= '7') {
    return pure_site(label[4] - '0');
  }
  throw std::invalid_argument("unknown initial state '" + label + "' (expected site1..site7, mix16, maxmix7)");
}

std::string InitialState::label() const {
  if (const auto* p = std::get_if<PureSite>(&v_)) return "site" + std::to_string(p->site);
  if (std::holds_alternative<Mixture16>(v_)) return "mix16";
  return "maxmix7";
}

DensityOperator InitialState::realize(int dim) const {
  if (dim != kModelDim && dim != kNumSites) throw std::invalid_argument("dimension must be 7 or 9");
  auto idx = [dim](int site) {
    const auto label = StateLabel::site(site);
    return dim == kModelDim ? label.index() : label.site_index();
  };
  ComplexMatrix rho = ComplexMatrix::Zero(dim, dim);
  if (const auto* p = std::get_if<PureSite>(&v_)) {
    rho(idx(p->site), idx(p->site)) = 1.0;
  } else if (std::holds_alternative<Mixture16>(v_)) {
    rho(idx(1), idx(1)) = 0.5;
    rho(idx(6), idx(6)) = 0.5;
  } else {
    for (int m = 1; m <= kNumSites; ++m) rho(idx(m), idx(m)) = 1.0 / kNumSites;
  }
  return DensityOperator(std::move(rho));
}

}  // namespace lgfmo
