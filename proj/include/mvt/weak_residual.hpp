#pragma once

#include <cmath>
#include <functional>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "mvt/bl_function.hpp"
#include "mvt/errors.hpp"
#include "mvt/measure.hpp"
#include "mvt/mild_solver.hpp"
#include "mvt/trajectory.hpp"
#include "mvt/velocity_model.hpp"

namespace mvt {

// C^1 test function on [0,1] x [0,T] with vanishing spatial derivative at
// both endpoints, the no-flux counterpart of the stopped flow.
struct TestFunction {
  std::string id;
  std::function<double(double, double)> value;
  std::function<double(double, double)> dx;
  std::function<double(double, double)> dt;
  double sup_value = 0.0;
  double sup_dx = 0.0;
  double sup_dt = 0.0;
};

// Rejects test functions whose spatial derivative fails to vanish at an
// endpoint, checked on a 1000-point time grid.
inline void require_valid_test_function(const TestFunction& psi, double T) {
  constexpr int kGrid = 1000;
  for (int i = 0; i < kGrid; ++i) {
    double t = T * static_cast<double>(i) / static_cast<double>(kGrid - 1);
    double at0 = psi.dx(0.0, t);
    double at1 = psi.dx(1.0, t);
    if (!std::isfinite(at0) || !std::isfinite(at1) || std::abs(at0) > 1e-12 ||
        std::abs(at1) > 1e-12) {
      throw InvalidParameter("test function violates d_x psi = 0 at an endpoint: " + psi.id);
    }
    if (!std::isfinite(psi.value(0.5, t)) || !std::isfinite(psi.dt(0.5, t))) {
      throw InvalidParameter("test function evaluates non-finite: " + psi.id);
    }
  }
}

// Separable catalog psi(x,t) = g(t) cos(k pi x) for k = 0..max_mode and
// g in {1, t/T, cos(pi t / T)}. Every member satisfies the endpoint
// conditions exactly since sin(k pi x) vanishes at x in {0,1}.
inline std::vector<TestFunction> test_function_catalog(double T, int max_mode) {
  if (max_mode < 0) throw InvalidParameter("test_function_catalog: max_mode must be >= 0");
  if (!(T > 0.0)) throw InvalidParameter("test_function_catalog: horizon must be positive");
  const double pi = std::numbers::pi;

  struct TimeFactor {
    std::string tag;
    std::function<double(double)> g;
    std::function<double(double)> dg;
    double sup_g;
    double sup_dg;
  };
  std::vector<TimeFactor> factors = {
      {"one", [](double) { return 1.0; }, [](double) { return 0.0; }, 1.0, 0.0},
      {"ramp", [T](double t) { return t / T; }, [T](double) { return 1.0 / T; }, 1.0, 1.0 / T},
      {"cos",
       [T, pi](double t) { return std::cos(pi * t / T); },
       [T, pi](double t) { return -pi / T * std::sin(pi * t / T); },
       1.0,
       pi / T},
  };

  std::vector<TestFunction> catalog;
  for (int k = 0; k <= max_mode; ++k) {
    double kp = k * pi;
    for (const TimeFactor& tf : factors) {
      TestFunction psi;
      psi.id = "cos" + std::to_string(k) + "_" + tf.tag;
      psi.value = [kp, g = tf.g](double x, double t) { return std::cos(kp * x) * g(t); };
      // the spatial derivative vanishes identically at the endpoints; return
      // the exact zero there so the catalog passes its own gate bit-exactly
      psi.dx = [kp, g = tf.g](double x, double t) {
        if (x == 0.0 || x == 1.0) return 0.0;
        return -kp * std::sin(kp * x) * g(t);
      };
      psi.dt = [kp, dg = tf.dg](double x, double t) { return std::cos(kp * x) * dg(t); };
      psi.sup_value = tf.sup_g;
      psi.sup_dx = kp * tf.sup_g;
      psi.sup_dt = tf.sup_dg;
      catalog.push_back(std::move(psi));
    }
  }
  return catalog;
}

// Absolute defect of the weak formulation for one test function:
//   | <mu_T, psi(.,T)> - <nu_0, psi(.,0)>
//     - int_0^T <mu_t, dt psi + dx psi * v[mu_t]> dt
//     - int_0^T <F_f(mu_t), psi(.,t)> dt |
// with both time integrals evaluated by the composite trapezoid rule over
// the trajectory's sample times. The velocity inside the integrand is
// re-evaluated from each slice, not from any frozen field.
inline double weak_defect(const Trajectory& traj, const VelocityModel& model,
                          const GatingFunction& f, const TestFunction& psi) {
  traj.validate();
  if (traj.times.size() < 3) throw InvalidParameter("weak_defect: need at least 3 slices");
  require_valid_test_function(psi, traj.horizon());

  double T = traj.horizon();
  double lhs = pair(traj.final(), [&](double x) { return psi.value(x, T); }) -
               pair(traj.initial(), [&](double x) { return psi.value(x, 0.0); });

  std::vector<double> integrand(traj.times.size());
  for (std::size_t k = 0; k < traj.times.size(); ++k) {
    double t = traj.times[k];
    const ParticleMeasure& slice = traj.slices[k];
    double transport = pair(slice, [&](double x) {
      return psi.dt(x, t) + psi.dx(x, t) * model.eval(slice, x);
    });
    double gating = pair(apply_gating(slice, f), [&](double x) { return psi.value(x, t); });
    integrand[k] = transport + gating;
  }
  double rhs = 0.0;
  for (std::size_t k = 0; k + 1 < traj.times.size(); ++k) {
    rhs += 0.5 * (integrand[k] + integrand[k + 1]) * (traj.times[k + 1] - traj.times[k]);
  }
  return std::abs(lhs - rhs);
}

struct DefectRow {
  std::string psi_id;
  double defect = 0.0;
};

inline std::vector<DefectRow> defect_sweep(const Trajectory& traj, const VelocityModel& model,
                                           const GatingFunction& f,
                                           const std::vector<TestFunction>& catalog) {
  std::vector<DefectRow> rows;
  rows.reserve(catalog.size());
  for (const TestFunction& psi : catalog) {
    rows.push_back({psi.id, weak_defect(traj, model, f, psi)});
  }
  return rows;
}

inline double max_defect(const std::vector<DefectRow>& rows) {
  double m = 0.0;
  for (const DefectRow& r : rows) m = std::max(m, r.defect);
  return m;
}

}  // namespace mvt
