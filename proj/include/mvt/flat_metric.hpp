#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "mvt/errors.hpp"
#include "mvt/measure.hpp"
#include "mvt/simplex.hpp"
#include "mvt/trajectory.hpp"

namespace mvt {

// Optimal dual witness for ||mu||*_BL: the test function values at the atoms
// together with the split of the unit budget into sup part a and Lipschitz
// part b, so that |phi_i| <= a, |phi_i - phi_j| <= b |x_i - x_j| and
// value = sum_i w_i phi_i.
struct FlatNormCertificate {
  double value = 0.0;
  std::vector<double> optimal_phi;
  double sup_part = 0.0;
  double lip_part = 0.0;
};

// Dual bounded-Lipschitz (flat) norm of an atomic measure, solved as a small
// linear program over the atom values of the test function. Adjacency
// constraints on sorted atoms are exact in 1D: any feasible phi on the atoms
// extends to [0,1] by tight linear interpolation with the same Lipschitz
// constant, and clamping to [-a, a] preserves it, so nothing is lost by
// optimizing on the atoms alone.
inline FlatNormCertificate flat_norm(const ParticleMeasure& mu, const CoalescePolicy& policy = {}) {
  ParticleMeasure m = mu.coalesced(policy);
  const std::size_t n = m.size();
  FlatNormCertificate cert;
  if (n == 0) return cert;

  // variables: u_i = phi_i + a (i < n), then a, then b
  const std::size_t va = n;
  const std::size_t vb = n + 1;
  std::vector<std::vector<double>> rows;
  std::vector<double> rhs;
  auto add_row = [&](std::vector<double> row, double r) {
    rows.push_back(std::move(row));
    rhs.push_back(r);
  };

  {
    std::vector<double> row(n + 2, 0.0);
    row[va] = 1.0;
    row[vb] = 1.0;
    add_row(std::move(row), 1.0);  // a + b <= 1
  }
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> row(n + 2, 0.0);
    row[i] = 1.0;
    row[va] = -2.0;
    add_row(std::move(row), 0.0);  // u_i <= 2a  (phi_i <= a; phi_i >= -a is u_i >= 0)
  }
  for (std::size_t i = 0; i + 1 < n; ++i) {
    double gap = m.atoms()[i + 1].position - m.atoms()[i].position;
    std::vector<double> row(n + 2, 0.0);
    row[i] = 1.0;
    row[i + 1] = -1.0;
    row[vb] = -gap;
    add_row(row, 0.0);  // u_i - u_{i+1} <= b gap
    row[i] = -1.0;
    row[i + 1] = 1.0;
    add_row(std::move(row), 0.0);  // u_{i+1} - u_i <= b gap
  }

  std::vector<double> objective(n + 2, 0.0);
  double weight_sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    objective[i] = m.atoms()[i].weight;
    weight_sum += m.atoms()[i].weight;
  }
  objective[va] = -weight_sum;

  DenseSimplex lp(std::move(rows), std::move(rhs), std::move(objective));
  cert.value = lp.solve();
  std::vector<double> x = lp.solution();
  cert.sup_part = x[va];
  cert.lip_part = x[vb];
  cert.optimal_phi.resize(n);
  for (std::size_t i = 0; i < n; ++i) cert.optimal_phi[i] = x[i] - cert.sup_part;
  return cert;
}

inline double flat_distance(const ParticleMeasure& mu, const ParticleMeasure& nu) {
  return flat_norm(linear_combine(1.0, mu, -1.0, nu)).value;
}

// sup over shared sample times of the flat norm of the slice difference.
// Trajectories over different time ranges are rejected; trajectories with
// non-nested sample times fall back to nearest-time matching, reported
// through `resampled`.
inline double sup_flat_distance(const Trajectory& tr1, const Trajectory& tr2,
                                bool* resampled = nullptr) {
  tr1.validate();
  tr2.validate();
  if (std::abs(tr1.horizon() - tr2.horizon()) > 1e-9) {
    throw IncompatibleTrajectories("trajectories cover different time ranges");
  }
  if (resampled != nullptr) *resampled = false;
  double sup = 0.0;
  for (std::size_t i = 0; i < tr1.times.size(); ++i) {
    double t = tr1.times[i];
    std::size_t best = 0;
    double best_gap = std::abs(tr2.times[0] - t);
    for (std::size_t j = 1; j < tr2.times.size(); ++j) {
      double gap = std::abs(tr2.times[j] - t);
      if (gap < best_gap) {
        best = j;
        best_gap = gap;
      }
    }
    if (best_gap > 1e-12 && resampled != nullptr) *resampled = true;
    sup = std::max(sup, flat_distance(tr1.slices[i], tr2.slices[best]));
  }
  return sup;
}

}  // namespace mvt
