#pragma once

#include <algorithm>
#include <cmath>
#include <iostream>
#include <string>
#include <vector>

#include "mvt/bl_function.hpp"
#include "mvt/measure.hpp"
#include "mvt/stopped_flow.hpp"
#include "mvt/trajectory.hpp"

namespace mvt {

// F_f(mu) = f * mu: weights pick up the factor f(x_i), positions unchanged.
inline ParticleMeasure apply_gating(const ParticleMeasure& mu, const GatingFunction& f) {
  std::vector<Atom> atoms = mu.atoms();
  for (Atom& a : atoms) a.weight *= f(a.position);
  return ParticleMeasure(std::move(atoms));
}

// Solution operator for fixed velocity: transport every atom along the
// stopped flow while its weight evolves multiplicatively,
//   w_i(t) = w_i(0) * exp( integral_0^t f(x_i(s)) ds ),
// which is the exact action of the variation-of-constants solution on atomic
// data. Gating keeps acting after an atom stops (f evaluated at the boundary
// point). Substeps are cut at the piece boundaries of f so each integrated
// fragment has a smooth integrand.
inline Trajectory mild_solve(const ParticleMeasure& nu0, const BLFunction& v,
                             const GatingFunction& f, double T,
                             std::vector<double> sample_times, const IntegratorConfig& cfg = {}) {
  cfg.validate();
  if (!(T >= 0.0) || !std::isfinite(T)) throw InvalidParameter("mild_solve: bad horizon");
  for (double s : sample_times) {
    if (!(s >= 0.0 && s <= T)) throw InvalidParameter("mild_solve: sample time outside [0,T]");
  }
  if (!validate_discontinuity_condition(f, v).empty()) {
    std::cerr << "mvt: warning: gating jump located at a zero of the velocity; "
                 "evaluating f from the right there\n";
  }

  sample_times.push_back(0.0);
  if (T > 0.0) sample_times.push_back(T);
  std::sort(sample_times.begin(), sample_times.end());
  sample_times.erase(std::unique(sample_times.begin(), sample_times.end()), sample_times.end());

  const std::vector<double>& splits = f.split_points();
  std::vector<detail::AtomState> states(nu0.size());
  for (std::size_t i = 0; i < nu0.size(); ++i) states[i].position = nu0.atoms()[i].position;

  Trajectory traj;
  traj.times = sample_times;
  traj.slices.reserve(sample_times.size());
  traj.provenance = "mild_solve";
  for (std::size_t k = 0; k < sample_times.size(); ++k) {
    if (k > 0) {
      for (detail::AtomState& st : states) {
        detail::advance_atom(st, sample_times[k - 1], sample_times[k], v, &f, splits, cfg);
      }
    }
    std::vector<Atom> atoms(nu0.size());
    for (std::size_t i = 0; i < nu0.size(); ++i) {
      atoms[i] = {states[i].position, nu0.atoms()[i].weight * std::exp(states[i].log_gain)};
    }
    traj.slices.push_back(ParticleMeasure(std::move(atoms)));
  }
  return traj;
}

// Uniformly spaced sample times (n_samples intervals over [0, T]).
inline std::vector<double> uniform_times(double T, int n_samples) {
  if (n_samples < 1) throw InvalidParameter("uniform_times: need at least one interval");
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(n_samples) + 1);
  for (int i = 0; i <= n_samples; ++i) {
    out.push_back(T * static_cast<double>(i) / static_cast<double>(n_samples));
  }
  return out;
}

// Checks every slice against ||mu_t||_TV <= ||mu_0||_TV * exp(||f||_inf t),
// the uniform mass bound that holds independently of the partition.
inline bool tv_envelope(const Trajectory& traj, const GatingFunction& f) {
  if (traj.slices.empty()) return true;
  double tv0 = tv_norm(traj.slices.front());
  double rate = f.sup_bound();
  for (std::size_t k = 0; k < traj.slices.size(); ++k) {
    double bound = tv0 * std::exp(rate * traj.times[k]) * (1.0 + 1e-9);
    if (tv_norm(traj.slices[k]) > bound) return false;
  }
  return true;
}

}  // namespace mvt
