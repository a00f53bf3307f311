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

#include "lgfmo/leggett_garg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "lgfmo/parallel.hpp"

namespace lgfmo {

Signs signs(SignPattern p) {
  switch (p) {
    case SignPattern::Base:
      return {+1, +1, +1};
    case SignPattern::Flip1:
      return {-1, +1, -1};
    case SignPattern::Flip2:
      return {-1, -1, +1};
    case SignPattern::Flip3:
      return {+1, -1, -1};
  }
  throw std::invalid_argument("invalid sign pattern");
}

std::string to_string(SignPattern p) {
  switch (p) {
    case SignPattern::Base:
      return "base";
    case SignPattern::Flip1:
      return "flip1";
    case SignPattern::Flip2:
      return "flip2";
    case SignPattern::Flip3:
      return "flip3";
  }
  return "?";
}

SignPattern sign_pattern_from_string(const std::string& s) {
  for (auto p : kAllPatterns) {
    if (to_string(p) == s) return p;
  }
  throw std::invalid_argument("unknown sign pattern '" + s + "' (expected base|flip1|flip2|flip3)");
}

double assemble_K(SignPattern p, double c12, double c23, double c13) {
  const auto s = signs(p);
  return s.s12 * c12 + s.s23 * c23 + s.s13 * c13 + 1.0;
}

PatternChoice PatternChoice::from_string(const std::string& s) {
  if (s == "min") return minimum();
  return PatternChoice(sign_pattern_from_string(s));
}

std::string PatternChoice::label() const { return fixed_ ? to_string(*fixed_) : "min"; }

double PatternChoice::select(double c12, double c23, double c13) const {
  if (fixed_) return assemble_K(*fixed_, c12, c23, c13);
  double k = std::numeric_limits<double>::infinity();
  for (auto p : kAllPatterns) k = std::min(k, assemble_K(p, c12, c23, c13));
  return k;
}

IntervalMaps interval_maps(const LindbladPropagator& prop, double dt) {
  ComplexMatrix once = prop.transfer(dt);
  ComplexMatrix twice = once * once;
  return {dt, std::move(once), std::move(twice)};
}

double correlator(const ComplexMatrix& transfer, const DichotomicObservable& q1, const DichotomicObservable& q2,
                  const ComplexMatrix& rho1) {
  const Eigen::Index n = rho1.rows();
  if (q1.dim() != n || q2.dim() != n || transfer.rows() != n * n) {
    throw std::invalid_argument("correlator: dimension mismatch");
  }
  const ComplexMatrix a = q1.observable();
  const ComplexMatrix evolved = unvec(transfer * vec(a * rho1 + rho1 * a), n);
  const Complex c = 0.5 * (q2.observable() * evolved).trace();
  if (std::abs(c.imag()) > 1e-8) {
    throw NumericalError("correlator has imaginary residue " + std::to_string(c.imag()));
  }
  return c.real();
}

double correlator(const LindbladPropagator& prop, const DichotomicObservable& q1, const DichotomicObservable& q2,
                  const DensityOperator& rho1, double dt) {
  return correlator(prop.transfer(dt), q1, q2, rho1.matrix());
}

double correlator(const LindbladModel& model, const DichotomicObservable& q1, const DichotomicObservable& q2,
                  const DensityOperator& rho1, double dt) {
  return correlator(LindbladPropagator(model), q1, q2, rho1, dt);
}

LGResult lg_protocol(const IntervalMaps& maps, const DichotomicObservable& q, const DensityOperator& rho0,
                     PatternChoice pattern, std::string state_label) {
  const ComplexMatrix& rho1 = rho0.matrix();
  const ComplexMatrix rho2 = unvec(maps.once * vec(rho1), rho1.rows());

  LGResult r;
  r.c12 = correlator(maps.once, q, q, rho1);
  r.c23 = correlator(maps.once, q, q, rho2);
  r.c13 = correlator(maps.twice, q, q, rho1);
  r.K = pattern.select(r.c12, r.c23, r.c13);
  r.pattern = pattern;
  r.schedule = {0.0, maps.dt, 2.0 * maps.dt};
  r.observable = q.label();
  r.initial_state = std::move(state_label);
  return r;
}

LGResult lg_protocol(const LindbladPropagator& prop, const DichotomicObservable& q, const DensityOperator& rho0,
                     double dt, PatternChoice pattern, std::string state_label) {
  if (!(dt > 0.0)) throw std::invalid_argument("measurement interval must be positive");
  return lg_protocol(interval_maps(prop, dt), q, rho0, pattern, std::move(state_label));
}

LGResult lg_protocol(const LindbladModel& model, const DichotomicObservable& q, const InitialState& rho0, double dt,
                     PatternChoice pattern) {
  return lg_protocol(LindbladPropagator(model), q, rho0.realize(static_cast<int>(q.dim())), dt, pattern,
                     rho0.label());
}

double coherent_survival_K(const CoherentPropagator& prop, const ComplexVector& psi, double dt) {
  if (std::abs(psi.norm() - 1.0) > 1e-12) throw std::invalid_argument("state vector is not normalized");
  const Complex a = psi.dot(prop.apply_ket(psi, dt));  // <psi|psi_dt>
  const Complex b = psi.dot(prop.apply_ket(psi, 2.0 * dt));
  return 4.0 * std::norm(b) - 4.0 * (a * a * std::conj(b)).real();
}

double coherent_survival_K(const ComplexMatrix& h, const ComplexVector& psi, double dt) {
  return coherent_survival_K(CoherentPropagator(h), psi, dt);
}

namespace {

// Overlaps <a|b_t> with |b_t> = exp(-iHt)|b> on the 7-site space.
class SiteOverlaps {
 public:
  SiteOverlaps(const CoherentPropagator& prop, double dt) : u1_(prop.unitary(dt)), u2_(prop.unitary(2.0 * dt)) {}

  // <a|b_dt>, <a|b_2dt>; sites are 1-based.
  Complex at1(int a, int b) const { return u1_(a - 1, b - 1); }
  Complex at2(int a, int b) const { return u2_(a - 1, b - 1); }
  // <a_2dt|b_dt>
  Complex cross(int a, int b) const { return u2_.col(a - 1).dot(u1_.col(b - 1)); }
  // <m| (|p_dt><p_2dt|) |m>
  Complex sandwich(int m, int p) const { return at1(m, p) * std::conj(at2(m, p)); }

 private:
  ComplexMatrix u1_;
  ComplexMatrix u2_;
};

double pure_site_row(const SiteOverlaps& o, int p, int m) {
  if (m == p) {
    return 4.0 * std::norm(o.at2(p, p)) - 4.0 * (std::conj(o.at2(p, p)) * o.at1(p, p) * o.at1(p, p)).real();
  }
  return 2.0 * std::norm(o.at1(m, p)) -
         4.0 * (o.at1(m, p) * std::conj(o.at2(m, p)) * o.at1(m, m)).real() +
         2.0 * (o.cross(p, m) * o.at1(m, p)).real();
}

double mixture16_row(const SiteOverlaps& o, int m) {
  double populations = 0.0;
  if (m == 1) {
    populations = std::norm(o.at1(1, 6)) + std::norm(o.at2(1, 1));
  } else if (m == 6) {
    populations = std::norm(o.at1(6, 1)) + std::norm(o.at2(6, 6));
  } else {
    populations = std::norm(o.at1(m, 1)) + std::norm(o.at1(m, 6));
  }
  const Complex coherence = (o.sandwich(m, 1) + o.sandwich(m, 6)) * o.at1(m, m);
  return 2.0 * (populations - coherence.real());
}

double maximally_mixed_row(const SiteOverlaps& o, int m) {
  constexpr double d = kNumSites;
  return 4.0 / d - 8.0 / d * std::norm(o.at1(m, m)) + 4.0 / d * std::norm(o.at2(m, m));
}

}  // namespace

double coherent_tableI_K(const CoherentPropagator& prop, const TableIRow& row, double dt) {
  if (prop.spectrum().eigenvalues.size() != kNumSites) {
    throw std::invalid_argument("closed forms are defined on the 7-site space");
  }
  StateLabel::site(row.site);
  const SiteOverlaps o(prop, dt);
  const auto& v = row.state.variant();
  if (const auto* p = std::get_if<PureSite>(&v)) {
    if (p->site != 1 && p->site != 6) {
      throw std::invalid_argument("no closed form for initial state " + row.state.label());
    }
    return pure_site_row(o, p->site, row.site);
  }
  if (std::holds_alternative<Mixture16>(v)) return mixture16_row(o, row.site);
  return maximally_mixed_row(o, row.site);
}

void validate_search_grid(std::span<const double> grid) {
  if (grid.empty()) throw std::invalid_argument("interval grid is empty");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!(grid[i] > 0.0) || grid[i] > kMaxSearchInterval) {
      throw std::invalid_argument("interval grid must lie in (0, 5] ps");
    }
    if (i > 0 && !(grid[i] > grid[i - 1])) throw std::invalid_argument("interval grid must be strictly ascending");
  }
}

std::vector<Violation> find_strongest_violations(const LindbladPropagator& prop, std::span<const LGTarget> targets,
                                                 std::span<const double> grid, PatternChoice pattern) {
  validate_search_grid(grid);
  // Rows: grid points; columns: targets.
  const auto per_point = parallel_map(grid.size(), [&](std::size_t i) {
    const IntervalMaps maps = interval_maps(prop, grid[i]);
    std::vector<double> ks;
    ks.reserve(targets.size());
    for (const auto& t : targets) ks.push_back(lg_protocol(maps, t.q, t.rho0, pattern).K);
    return ks;
  });

  std::vector<Violation> out(targets.size(), Violation{std::numeric_limits<double>::infinity(), 0.0});
  for (std::size_t i = 0; i < grid.size(); ++i) {
    for (std::size_t j = 0; j < targets.size(); ++j) {
      if (per_point[i][j] < out[j].K_min) out[j] = {per_point[i][j], grid[i]};
    }
  }
  return out;
}

Violation find_strongest_violation(const LindbladPropagator& prop, const DichotomicObservable& q,
                                   const DensityOperator& rho0, std::span<const double> grid, PatternChoice pattern) {
  const std::vector<LGTarget> targets{{q, rho0}};
  return find_strongest_violations(prop, targets, grid, pattern).front();
}

Violation find_strongest_violation(const LindbladModel& model, const DichotomicObservable& q,
                                   const InitialState& rho0, std::span<const double> grid, PatternChoice pattern) {
  return find_strongest_violation(LindbladPropagator(model), q, rho0.realize(static_cast<int>(q.dim())), grid,
                                  pattern);
}

std::vector<double> optical_path_grid(double t_max) {
  const double step = 0.001 / kSpeedOfLightCmPerPs;
  std::vector<double> grid;
  for (int k = 1; k * step <= t_max; ++k) grid.push_back(k * step);
  return grid;
}

std::vector<double> uniform_grid(int n, double t_max) {
  if (n < 1) throw std::invalid_argument("grid needs at least one point");
  if (!(t_max > 0.0)) throw std::invalid_argument("grid end must be positive");
  std::vector<double> grid(static_cast<std::size_t>(n));
  for (int k = 1; k <= n; ++k) grid[static_cast<std::size_t>(k - 1)] = k * t_max / n;
  return grid;
}

}  // namespace lgfmo
