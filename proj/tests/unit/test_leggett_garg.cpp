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


#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>
#include <vector>

#include <doctest.h>

#include "lgfmo/dynamics.hpp"
#include "lgfmo/leggett_garg.hpp"
#include "oracles.hpp"

using namespace lgfmo;

namespace {

struct SpinHalf {
  double omega = 2.3;
  LindbladPropagator prop;
  DichotomicObservable q;

  explicit SpinHalf(double w = 2.3)
      : omega(w), prop(Liouvillian(sigma_x(w), {})), q(up_projector(), "sigma_z") {}

  static ComplexMatrix sigma_x(double w) {
    ComplexMatrix h(2, 2);
    h << 0.0, w / 2.0, w / 2.0, 0.0;
    return h;
  }
  static ComplexMatrix up_projector() {
    ComplexMatrix p = ComplexMatrix::Zero(2, 2);
    p(0, 0) = 1.0;
    return p;
  }
};

const LindbladModel& coherent() {
  static const LindbladModel m = coherent_model(build_default_hamiltonian());
  return m;
}

}  // namespace

TEST_CASE("sign patterns") {
  CHECK(kAllPatterns.size() == 4);
  const auto b = signs(SignPattern::Base);
  CHECK((b.s12 == 1 && b.s23 == 1 && b.s13 == 1));
  const auto f1 = signs(SignPattern::Flip1);
  CHECK((f1.s12 == -1 && f1.s23 == 1 && f1.s13 == -1));
  const auto f2 = signs(SignPattern::Flip2);
  CHECK((f2.s12 == -1 && f2.s23 == -1 && f2.s13 == 1));
  const auto f3 = signs(SignPattern::Flip3);
  CHECK((f3.s12 == 1 && f3.s23 == -1 && f3.s13 == -1));
  for (auto p : kAllPatterns) CHECK(sign_pattern_from_string(to_string(p)) == p);
  CHECK_THROWS_AS(sign_pattern_from_string("flip4"), std::invalid_argument);
  CHECK(assemble_K(SignPattern::Flip2, 0.1, 0.2, 0.3) == doctest::Approx(1.0));

  CHECK(PatternChoice::from_string("min").is_minimum());
  CHECK(PatternChoice::from_string("flip3").fixed() == SignPattern::Flip3);
  CHECK(PatternChoice::minimum().label() == "min");
  CHECK_THROWS_AS(PatternChoice::from_string("max"), std::invalid_argument);
}

TEST_CASE("pattern minimum is below each pattern") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int k = 0; k < 200; ++k) {
    const double a = u(rng), b = u(rng), c = u(rng);
    const double m = PatternChoice::minimum().select(a, b, c);
    bool hit = false;
    for (auto p : kAllPatterns) {
      CHECK(m <= assemble_K(p, a, b, c));
      hit = hit || m == assemble_K(p, a, b, c);
    }
    CHECK(hit);
  }
}

TEST_CASE("spin-half oracle") {
  const SpinHalf s;
  const DensityOperator up(SpinHalf::up_projector());
  const double dt = 3.0 * std::numbers::pi / (4.0 * s.omega);
  const LGResult r = lg_protocol(s.prop, s.q, up, dt, SignPattern::Base);
  CHECK(std::abs(r.K - (1.0 - std::numbers::sqrt2)) <= 1e-9);
  CHECK(r.violation());
  CHECK(r.schedule.t2 == dt);
  CHECK(r.schedule.t3 == 2.0 * dt);

  // C(dt) = cos(omega dt) for every diagonal state.
  std::mt19937_64 rng(32);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 50; ++k) {
    const double p = u(rng);
    const double t = 3.0 * u(rng) + 0.01;
    ComplexMatrix rho = ComplexMatrix::Zero(2, 2);
    rho(0, 0) = p;
    rho(1, 1) = 1.0 - p;
    const DensityOperator d(rho);
    CHECK(correlator(s.prop, s.q, s.q, d, t) == doctest::Approx(std::cos(s.omega * t)).epsilon(1e-10));
    const LGResult lg = lg_protocol(s.prop, s.q, d, t, SignPattern::Base);
    const double expected = std::cos(2.0 * s.omega * t) + 2.0 * std::cos(s.omega * t) + 1.0;
    CHECK(std::abs(lg.K - expected) <= 1e-10);
  }
}

TEST_CASE("equal-time correlator is one") {
  std::mt19937_64 rng(33);
  for (int k = 0; k < 20; ++k) {
    const LindbladPropagator prop(oracle::random_model(rng));
    const auto q = make_state_observable(oracle::random_unit_vector(rng, 9));
    const DensityOperator rho(oracle::random_density(rng, 9));
    CHECK(std::abs(correlator(prop, q, q, rho, 0.0) - 1.0) <= 1e-12);
  }
}

TEST_CASE("short-interval limit") {
  const auto q = make_site_observable(StateLabel::site(2), 9);
  const LindbladPropagator prop(build_default_model(1.0));
  const DensityOperator rho = InitialState::mixture16().realize();
  const LGResult r = lg_protocol(prop, q, rho, 1e-7, SignPattern::Base);
  CHECK(r.K == doctest::Approx(4.0).epsilon(1e-5));
  CHECK(std::abs(r.K_for(SignPattern::Flip2)) <= 1e-5);
  CHECK_THROWS_AS(lg_protocol(prop, q, rho, 0.0, SignPattern::Base), std::invalid_argument);
}

TEST_CASE("correlator agrees with collapse branches") {
  std::mt19937_64 rng(34);
  std::uniform_real_distribution<double> udt(0.01, 5.0);
  for (int k = 0; k < 100; ++k) {
    const LindbladPropagator prop(oracle::random_model(rng));
    const auto q1 = make_state_observable(oracle::random_unit_vector(rng, 9));
    const auto q2 = make_state_observable(oracle::random_unit_vector(rng, 9));
    const DensityOperator rho(k % 2 ? oracle::random_density(rng, 9) : oracle::random_site_density(rng));
    const double dt = udt(rng);
    const double expected = oracle::collapse_correlator([&](const ComplexMatrix& x) { return prop.apply(x, dt); },
                                                        q1.projector(), q2.observable(), rho.matrix());
    CHECK(std::abs(correlator(prop, q1, q2, rho, dt) - expected) <= 1e-12);
  }
}

TEST_CASE("flipping the middle observable maps base to flip2") {
  std::mt19937_64 rng(35);
  for (int k = 0; k < 20; ++k) {
    const LindbladPropagator prop(oracle::random_model(rng));
    const auto q = make_state_observable(oracle::random_unit_vector(rng, 9));
    const DensityOperator rho(oracle::random_density(rng, 9));
    const double dt = 0.1 + 0.2 * k;
    const IntervalMaps maps = interval_maps(prop, dt);
    const ComplexMatrix qm = q.observable();
    const ComplexMatrix rho2 = prop.apply(rho.matrix(), dt);
    // Correlators with -Q at t2, computed from the definition.
    auto corr = [](const ComplexMatrix& t, const ComplexMatrix& a, const ComplexMatrix& b, const ComplexMatrix& r) {
      return (0.5 * (b * unvec(t * vec(a * r + r * a), r.rows())).trace()).real();
    };
    const double c12 = corr(maps.once, qm, -qm, rho.matrix());
    const double c23 = corr(maps.once, -qm, qm, rho2);
    const double c13 = corr(maps.twice, qm, qm, rho.matrix());
    const LGResult r = lg_protocol(maps, q, rho, SignPattern::Flip2);
    CHECK(std::abs(assemble_K(SignPattern::Base, c12, c23, c13) - r.K) <= 1e-12);
  }
}

TEST_CASE("imaginary residue is reported, not truncated") {
  const auto q = make_site_observable(StateLabel::site(1), 9);
  const ComplexMatrix bogus = Complex(0.0, 1.0) * ComplexMatrix::Identity(81, 81);
  const ComplexMatrix rho = InitialState::pure_site(1).realize().matrix();
  CHECK_THROWS_AS(correlator(bogus, q, q, rho), NumericalError);
  CHECK_THROWS_AS(correlator(ComplexMatrix::Identity(49, 49), q, q, rho), std::invalid_argument);
}

TEST_CASE("reference coherent values") {
  const LindbladPropagator prop(coherent());
  const auto q1 = make_site_observable(StateLabel::site(1), 9);
  const double dt = 0.16678;
  const LGResult r = lg_protocol(prop, q1, InitialState::mixture16().realize(), dt, SignPattern::Flip2);
  CHECK(std::abs(r.K + 0.25053) <= 5e-4);

  const ComplexMatrix h7 = coherent().site_generator().cast<Complex>();
  ComplexVector e1 = ComplexVector::Zero(7);
  e1(0) = 1.0;
  const double survival = coherent_survival_K(h7, e1, dt);
  const double pipeline = lg_protocol(prop, q1, InitialState::pure_site(1).realize(), dt, SignPattern::Flip2).K;
  CHECK(std::abs(survival - pipeline) <= 1e-10);
  CHECK(std::abs(survival + 0.4935) <= 5e-4);

  const auto grid = optical_path_grid();
  const auto v66 =
      find_strongest_violation(coherent(), make_site_observable(StateLabel::site(6), 9), InitialState::pure_site(6),
                               grid, SignPattern::Flip2);
  CHECK(std::abs(v66.K_min + 0.35011) <= 5e-4);
  CHECK(std::abs(v66.dt_star - 0.16678) <= 0.034);
  const auto v3 = find_strongest_violation(coherent(), make_site_observable(StateLabel::site(3), 9),
                                           InitialState::mixture16(), grid, SignPattern::Flip2);
  CHECK(std::abs(v3.K_min + 0.016389) <= 5e-4);
  CHECK(std::abs(v3.dt_star - 3.1021) <= 0.034);
}

TEST_CASE("survival form") {
  const ComplexMatrix h7 = coherent().site_generator().cast<Complex>();
  const CoherentPropagator prop(h7);
  std::mt19937_64 rng(36);
  const ComplexVector psi = oracle::random_unit_vector(rng, 7);
  CHECK(std::abs(coherent_survival_K(prop, psi, 0.0)) <= 1e-12);
  for (int k = 0; k < 7; ++k) {
    const ComplexVector phi = prop.spectrum().eigenvectors.col(k);
    for (double dt : {0.05, 0.7, 2.9}) CHECK(std::abs(coherent_survival_K(prop, phi, dt)) <= 1e-10);
  }
  CHECK_THROWS_AS(coherent_survival_K(prop, psi * 2.0, 0.1), std::invalid_argument);
}

TEST_CASE("closed forms agree with the pipeline") {
  const CoherentPropagator prop7(coherent().site_generator().cast<Complex>());
  const LindbladPropagator prop9(coherent());
  std::vector<TableIRow> rows;
  for (int m = 1; m <= 7; ++m) {
    rows.push_back({InitialState::mixture16(), m});
    rows.push_back({InitialState::maximally_mixed(), m});
  }
  rows.push_back({InitialState::pure_site(1), 1});
  rows.push_back({InitialState::pure_site(6), 6});
  for (const auto& row : rows) CHECK(std::abs(coherent_tableI_K(prop7, row, 0.0)) <= 1e-12);

  std::mt19937_64 rng(37);
  std::uniform_real_distribution<double> udt(0.01, 5.0);
  for (int k = 0; k < 100; ++k) {
    const double dt = udt(rng);
    for (const auto& row : rows) {
      const auto q = make_site_observable(StateLabel::site(row.site), 9);
      const double pipeline = lg_protocol(prop9, q, row.state.realize(), dt, SignPattern::Flip2).K;
      CHECK(std::abs(coherent_tableI_K(prop7, row, dt) - pipeline) <= 1e-9);
    }
  }
  CHECK_THROWS_AS(coherent_tableI_K(prop7, {InitialState::pure_site(2), 2}, 0.1), std::invalid_argument);
  const CoherentPropagator prop9c(coherent().embedded_generator());
  CHECK_THROWS_AS(coherent_tableI_K(prop9c, rows.front(), 0.1), std::invalid_argument);
}

TEST_CASE("observables commuting with H saturate") {
  const ComplexMatrix h9 = coherent().embedded_generator();
  const auto eig = hermitian_eigendecomposition(h9);
  const LindbladPropagator prop(coherent());
  std::mt19937_64 rng(38);
  for (int k = 0; k < 9; ++k) {
    const auto q = make_state_observable(eig.eigenvectors.col(k));
    const DensityOperator rho(oracle::random_density(rng, 9));
    for (double dt : {0.1, 1.3, 4.9}) {
      CHECK(std::abs(lg_protocol(prop, q, rho, dt, SignPattern::Flip2).K) <= 1e-10);
    }
  }
}

TEST_CASE("exciton phase does not change K") {
  const ComplexMatrix h9 = coherent().embedded_generator();
  const auto eig = hermitian_eigendecomposition(h9);
  const LindbladPropagator prop(build_default_model(3.0));
  const DensityOperator rho = InitialState::mixture16().realize();
  for (int k = 0; k < 9; ++k) {
    const ComplexVector phi = eig.eigenvectors.col(k);
    const ComplexVector rotated = phi * std::polar(1.0, 0.37 * (k + 1));
    const double a = lg_protocol(prop, make_state_observable(phi), rho, 0.4, SignPattern::Flip2).K;
    const double b = lg_protocol(prop, make_state_observable(rotated), rho, 0.4, SignPattern::Flip2).K;
    CHECK(std::abs(a - b) <= 1e-12);
  }
}

TEST_CASE("grid search") {
  const LindbladPropagator prop(coherent());
  const auto q = make_site_observable(StateLabel::site(1), 9);
  const DensityOperator rho = InitialState::mixture16().realize();

  const std::vector<double> single = {0.5};
  const auto v = find_strongest_violation(prop, q, rho, single, SignPattern::Flip2);
  CHECK(v.dt_star == 0.5);
  CHECK(v.K_min == lg_protocol(prop, q, rho, 0.5, SignPattern::Flip2).K);

  // A commuting observable gives K = 0 everywhere.
  const auto eig = hermitian_eigendecomposition(coherent().embedded_generator());
  const auto flat = find_strongest_violation(prop, make_state_observable(eig.eigenvectors.col(3)), rho,
                                             std::vector<double>{0.2, 0.4, 0.6}, SignPattern::Flip2);
  CHECK(std::abs(flat.K_min) <= 1e-10);

  // Search result is the minimum of the pointwise values.
  const auto grid = uniform_grid(40);
  const auto best = find_strongest_violation(prop, q, rho, grid, SignPattern::Flip2);
  double m = 1e9;
  for (double dt : grid) m = std::min(m, lg_protocol(prop, q, rho, dt, SignPattern::Flip2).K);
  CHECK(best.K_min == m);

  CHECK_THROWS_AS(validate_search_grid(std::vector<double>{}), std::invalid_argument);
  CHECK_THROWS_AS(validate_search_grid(std::vector<double>{0.0, 1.0}), std::invalid_argument);
  CHECK_THROWS_AS(validate_search_grid(std::vector<double>{1.0, 1.0}), std::invalid_argument);
  CHECK_THROWS_AS(validate_search_grid(std::vector<double>{2.0, 1.0}), std::invalid_argument);
  CHECK_THROWS_AS(validate_search_grid(std::vector<double>{5.5}), std::invalid_argument);
  CHECK_NOTHROW(validate_search_grid(std::vector<double>{0.1, 5.0}));
}

TEST_CASE("grids") {
  const auto g = uniform_grid(1500);
  CHECK(g.size() == 1500);
  CHECK(g.front() == doctest::Approx(1.0 / 300.0));
  CHECK(g.back() == 5.0);
  const auto o = optical_path_grid();
  CHECK(o.size() == 149);
  CHECK(o.front() == doctest::Approx(0.0333564095));
  CHECK(o.back() <= 5.0);
  CHECK_THROWS_AS(uniform_grid(0), std::invalid_argument);
  CHECK_THROWS_AS(uniform_grid(10, -1.0), std::invalid_argument);
}
