#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "mvt/errors.hpp"
#include "mvt/flat_metric.hpp"
#include "mvt/measure.hpp"
#include "mvt/mild_solver.hpp"
#include "mvt/stopped_flow.hpp"
#include "mvt/trajectory.hpp"
#include "mvt/velocity_model.hpp"

namespace mvt {

// Time grid 0 = t_0 < t_1 < ... < t_N = T for the forward-Euler scheme.
struct Partition {
  std::vector<double> times;

  static Partition uniform(double T, int n_intervals) {
    if (!(T > 0.0)) throw InvalidParameter("partition: horizon must be positive");
    if (n_intervals < 1) throw InvalidParameter("partition: need at least one interval");
    Partition p;
    p.times.reserve(static_cast<std::size_t>(n_intervals) + 1);
    for (int j = 0; j <= n_intervals; ++j) {
      p.times.push_back(T * static_cast<double>(j) / static_cast<double>(n_intervals));
    }
    return p;
  }

  void validate() const {
    if (times.size() < 2 || times.front() != 0.0) {
      throw InvalidParameter("partition: must start at 0 with at least one interval");
    }
    for (std::size_t j = 0; j + 1 < times.size(); ++j) {
      if (!(times[j] < times[j + 1])) throw InvalidParameter("partition: times must increase");
    }
  }

  std::size_t intervals() const { return times.size() - 1; }
  double horizon() const { return times.back(); }

  double mesh() const {
    double m = 0.0;
    for (std::size_t j = 0; j + 1 < times.size(); ++j) m = std::max(m, times[j + 1] - times[j]);
    return m;
  }
};

// Uniform partitions with 2^k intervals for k = 1..k_max; meshes halve
// exactly, so the sequence is nonincreasing and vanishes.
inline std::vector<Partition> dyadic_refinements(double T, int k_max) {
  if (k_max < 1) throw InvalidParameter("dyadic_refinements: k_max must be >= 1");
  std::vector<Partition> out;
  out.reserve(static_cast<std::size_t>(k_max));
  for (int k = 1; k <= k_max; ++k) out.push_back(Partition::uniform(T, 1 << k));
  return out;
}

// Forward-Euler scheme for measure-dependent velocity: on each partition
// interval the field is frozen at the left-endpoint slice and the fixed-v
// solution operator is applied. Slices are recorded at every partition point
// plus `samples_per_interval - 1` uniform interior samples per interval.
inline Trajectory euler_solve(const ParticleMeasure& nu0, const VelocityModel& model,
                              const GatingFunction& f, const Partition& alpha,
                              const IntegratorConfig& cfg = {}, int samples_per_interval = 1) {
  alpha.validate();
  cfg.validate();
  if (samples_per_interval < 1) throw InvalidParameter("euler_solve: samples_per_interval >= 1");

  const std::vector<double>& splits = f.split_points();
  std::vector<detail::AtomState> states(nu0.size());
  for (std::size_t i = 0; i < nu0.size(); ++i) states[i].position = nu0.atoms()[i].position;

  auto snapshot = [&]() {
    std::vector<Atom> atoms(nu0.size());
    for (std::size_t i = 0; i < nu0.size(); ++i) {
      atoms[i] = {states[i].position, nu0.atoms()[i].weight * std::exp(states[i].log_gain)};
    }
    return ParticleMeasure(std::move(atoms));
  };

  Trajectory traj;
  traj.provenance = "euler_solve N=" + std::to_string(alpha.intervals()) +
                    " model=" + model.describe;
  traj.times.push_back(0.0);
  traj.slices.push_back(snapshot());

  for (std::size_t j = 0; j + 1 < alpha.times.size(); ++j) {
    BLFunction frozen = freeze_velocity(model, traj.slices.back());
    // stopping is a property of the fixed-v flow; a new frozen field may
    // carry a stopped atom away from the boundary again
    for (detail::AtomState& st : states) {
      st.stopped = false;
      st.hit_time.reset();
    }
    double t_lo = alpha.times[j];
    double t_hi = alpha.times[j + 1];
    for (int s = 1; s <= samples_per_interval; ++s) {
      double target = t_lo + (t_hi - t_lo) * static_cast<double>(s) /
                                 static_cast<double>(samples_per_interval);
      if (s == samples_per_interval) target = t_hi;
      for (detail::AtomState& st : states) {
        detail::advance_atom(st, traj.times.back(), target, frozen, &f, splits, cfg);
      }
      traj.times.push_back(target);
      traj.slices.push_back(snapshot());
    }
  }
  return traj;
}

struct ConvergenceRow {
  int k = 0;
  long n_intervals = 0;
  double mesh = 0.0;
  double sup_flat_gap = 0.0;
  double ratio = std::numeric_limits<double>::quiet_NaN();  // gap_k / gap_{k-1}
};

// Cauchy-style convergence diagnostics: sup-flat gaps between consecutive
// dyadic Euler refinements, evaluated over the coarser run's sample times.
// First-order behaviour shows as ratios near one half.
inline std::vector<ConvergenceRow> convergence_table(const ParticleMeasure& nu0,
                                                     const VelocityModel& model,
                                                     const GatingFunction& f, double T, int k_max,
                                                     const IntegratorConfig& cfg = {},
                                                     int samples_per_interval = 1) {
  if (k_max < 2) throw InvalidParameter("convergence_table: k_max must be >= 2");
  std::vector<Partition> partitions = dyadic_refinements(T, k_max);
  std::vector<Trajectory> runs;
  runs.reserve(partitions.size());
  for (const Partition& p : partitions) {
    runs.push_back(euler_solve(nu0, model, f, p, cfg, samples_per_interval));
  }
  std::vector<ConvergenceRow> rows;
  for (int k = 1; k < k_max; ++k) {
    ConvergenceRow row;
    row.k = k;
    row.n_intervals = 1L << k;
    row.mesh = partitions[static_cast<std::size_t>(k - 1)].mesh();
    row.sup_flat_gap = sup_flat_distance(runs[static_cast<std::size_t>(k - 1)],
                                         runs[static_cast<std::size_t>(k)]);
    if (!rows.empty() && rows.back().sup_flat_gap > 0.0) {
      row.ratio = row.sup_flat_gap / rows.back().sup_flat_gap;
    }
    rows.push_back(row);
  }
  return rows;
}

// First-order Richardson extrapolation from the two finest runs; an estimate
// of the mesh-limit slice, not an exact object.
inline double extrapolated_end_mass(const Trajectory& coarse, const Trajectory& fine) {
  double m_coarse = total_mass(coarse.final());
  double m_fine = total_mass(fine.final());
  return 2.0 * m_fine - m_coarse;
}

}  // namespace mvt
