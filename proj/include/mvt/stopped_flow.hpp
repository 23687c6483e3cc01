#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <vector>

#include "mvt/bl_function.hpp"
#include "mvt/errors.hpp"

namespace mvt {

struct FlowResult {
  double position = 0.0;
  bool stopped = false;
  std::optional<double> hit_time;  // present iff stopped within the horizon
};

// Fixed-step classical Runge-Kutta with bisection event location. The fixed
// step keeps runs reproducible across platforms and refinement levels.
struct IntegratorConfig {
  double substep = 1e-3;
  double boundary_bisect_tol = 1e-12;

  void validate() const {
    if (!(substep > 0.0) || !(substep <= 0.1)) {
      throw InvalidParameter("substep must lie in (0, 0.1]");
    }
    if (!(boundary_bisect_tol > 0.0) || !(boundary_bisect_tol <= 1e-10)) {
      throw InvalidParameter("boundary_bisect_tol must lie in (0, 1e-10]");
    }
  }
};

namespace detail {

// Per-characteristic state advanced by the event loop below. `log_gain`
// accumulates the integral of f along the path, so the atom weight at time t
// is w0 * exp(log_gain); the factor is positive for any sign of w0, which is
// exactly how the mild solution acts on atoms.
struct AtomState {
  double position = 0.0;
  double log_gain = 0.0;
  bool stopped = false;
  std::optional<double> hit_time;
};

struct RkStep {
  double position = 0.0;
  double gain = 0.0;
};

// One joint RK4 step for (x, integral of f along x). Velocity and gating are
// only ever evaluated at positions clamped to [0,1]; a step whose endpoint
// leaves the interval is handed to the event logic instead of being used.
template <class V>
RkStep rk4_step(double x, double h, V&& v, const GatingFunction* f, double direction) {
  auto vel = [&](double p) {
    double value = v(std::clamp(p, 0.0, 1.0));
    if (!std::isfinite(value)) throw NonFiniteVelocity("velocity evaluated non-finite");
    return value;
  };
  auto gate = [&](double p) {
    if (f == nullptr) return 0.0;
    double value = f->eval_toward(std::clamp(p, 0.0, 1.0), direction);
    if (!std::isfinite(value)) throw NonFiniteGating("gating evaluated non-finite");
    return value;
  };
  double k1 = vel(x);
  double l1 = gate(x);
  double k2 = vel(x + 0.5 * h * k1);
  double l2 = gate(x + 0.5 * h * k1);
  double k3 = vel(x + 0.5 * h * k2);
  double l3 = gate(x + 0.5 * h * k2);
  double k4 = vel(x + h * k3);
  double l4 = gate(x + h * k3);
  RkStep out;
  out.position = x + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  out.gain = h / 6.0 * (l1 + 2.0 * l2 + 2.0 * l3 + l4);
  return out;
}

// Advance one characteristic from t0 to t1 under fixed velocity v, with
// permanent stopping at the boundary and optional gating along the way.
// `splits` are interior x-locations (corners and jumps of f) at which a
// substep is cut by bisection, so the gating integrand stays smooth inside
// every integrated fragment.
template <class V>
void advance_atom(AtomState& st, double t0, double t1, V&& v, const GatingFunction* f,
                  std::span<const double> splits, const IntegratorConfig& cfg) {
  double t = t0;
  if (st.stopped) {
    if (f != nullptr) st.log_gain += (*f)(st.position) * (t1 - t0);
    return;
  }
  const double time_eps = 1e-15 * std::max(1.0, std::abs(t1));
  long guard = 0;
  const long guard_limit =
      64 + 8 * static_cast<long>((t1 - t0) / cfg.substep + static_cast<double>(splits.size()) + 2.0);

  while (t < t1 - time_eps) {
    if (++guard > guard_limit) {
      throw NumericalError("flow integration failed to make progress");
    }
    double h = std::min(cfg.substep, t1 - t);
    double x = st.position;
    double direction = v(std::clamp(x, 0.0, 1.0)) < 0.0 ? -1.0 : 1.0;
    RkStep full = rk4_step(x, h, v, f, direction);

    // earliest split strictly crossed within this substep
    double split_target = 0.0;
    bool has_split = false;
    for (double b : splits) {
      if ((x - b) * (full.position - b) < 0.0) {
        if (!has_split || std::abs(b - x) < std::abs(split_target - x)) {
          split_target = b;
          has_split = true;
        }
      }
    }

    if (has_split) {
      // locate the crossing time of the nearest split and cut the step there
      double lo = 0.0, hi = h;
      double sign0 = x - split_target;
      for (int it = 0; it < 80 && hi - lo > 1e-16; ++it) {
        double mid = 0.5 * (lo + hi);
        RkStep probe = rk4_step(x, mid, v, f, direction);
        if ((probe.position - split_target) * sign0 > 0.0) {
          lo = mid;
        } else {
          hi = mid;
        }
      }
      RkStep cut = rk4_step(x, lo, v, f, direction);
      st.position = split_target;
      st.log_gain += cut.gain;
      t += lo;
      continue;
    }

    if (full.position >= 0.0 && full.position <= 1.0) {
      st.position = full.position;
      st.log_gain += full.gain;
      t += h;
      continue;
    }

    // boundary event: largest partial step that stays inside
    double boundary = full.position > 1.0 ? 1.0 : 0.0;
    double lo = 0.0, hi = h;
    RkStep at_lo{x, 0.0};
    for (int it = 0; it < 100; ++it) {
      double mid = 0.5 * (lo + hi);
      RkStep probe = rk4_step(x, mid, v, f, direction);
      if (probe.position >= 0.0 && probe.position <= 1.0) {
        lo = mid;
        at_lo = probe;
        if (std::abs(probe.position - boundary) <= cfg.boundary_bisect_tol) break;
      } else {
        hi = mid;
      }
      if (hi - lo <= 1e-16) break;
    }
    st.log_gain += at_lo.gain;
    st.position = boundary;
    t += lo;

    double v_at_boundary = v(boundary);
    bool outward_or_zero = boundary == 1.0 ? v_at_boundary >= 0.0 : v_at_boundary <= 0.0;
    if (outward_or_zero) {
      st.stopped = true;
      st.hit_time = t;
      if (f != nullptr) st.log_gain += (*f)(boundary) * (t1 - t);
      return;
    }
    // strictly inward velocity at the clamped point: overshoot artifact,
    // integration continues from the boundary un-stopped
  }
}

}  // namespace detail

// The stopped flow: solve x' = v(x) from x0 over [0, t], freezing the
// trajectory permanently once it reaches a boundary point where v points
// outward or vanishes.
template <class V>
FlowResult flow_map(double x0, double t, V&& v, const IntegratorConfig& cfg = {}) {
  cfg.validate();
  if (!(x0 >= 0.0 && x0 <= 1.0)) throw InvalidParameter("flow_map: x0 outside [0,1]");
  if (!std::isfinite(t) || t < 0.0) throw InvalidParameter("flow_map: bad horizon");
  detail::AtomState st;
  st.position = x0;
  detail::advance_atom(st, 0.0, t, v, nullptr, {}, cfg);
  return {st.position, st.stopped, st.hit_time};
}

inline FlowResult flow_map(double x0, double t, const BLFunction& v,
                           const IntegratorConfig& cfg = {}) {
  return flow_map(x0, t, [&v](double x) { return v(x); }, cfg);
}

// |Phi_t(Phi_s(x0)) - Phi_{s+t}(x0)|; zero for the exact semigroup.
inline double semigroup_defect(double x0, double s, double t, const BLFunction& v,
                               const IntegratorConfig& cfg = {}) {
  if (s < 0.0 || t < 0.0) throw InvalidParameter("semigroup_defect: negative times");
  FlowResult first = flow_map(x0, s, v, cfg);
  FlowResult chained = flow_map(first.position, t, v, cfg);
  FlowResult direct = flow_map(x0, s + t, v, cfg);
  return std::abs(chained.position - direct.position);
}

}  // namespace mvt
