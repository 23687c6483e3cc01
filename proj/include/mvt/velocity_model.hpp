#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <utility>

#include "mvt/bl_function.hpp"
#include "mvt/measure.hpp"

namespace mvt {

// Convolution kernel K on [-1,1] with certified bounds, giving the
// interaction field v[mu](x) = (K * mu)(x) = sum_i w_i K(x - x_i).
struct Kernel {
  BLFunction fn;
};

// A (possibly measure-dependent) velocity field with declared bounds per
// TV radius R: |v[mu]| <= sup_bound_at(R), Lipschitz-in-x <= lip_bound_at(R)
// and ||v[mu]-v[nu]||_inf <= flat_lip_bound_at(R) * ||mu-nu||*_BL whenever
// both measures have TV norm at most R.
struct VelocityModel {
  enum class Kind { fixed_field, kernel_convolution, custom };

  Kind kind = Kind::fixed_field;
  std::function<double(const ParticleMeasure&, double)> eval;
  std::function<double(double)> sup_bound_at;
  std::function<double(double)> lip_bound_at;
  std::function<double(double)> flat_lip_bound_at;
  std::string describe;
};

inline VelocityModel fixed_field_model(BLFunction field, std::string describe = "fixed field") {
  VelocityModel model;
  model.kind = VelocityModel::Kind::fixed_field;
  model.eval = [field](const ParticleMeasure&, double x) { return field(x); };
  model.sup_bound_at = [s = field.sup_bound](double) { return s; };
  model.lip_bound_at = [l = field.lip_bound](double) { return l; };
  model.flat_lip_bound_at = [](double) { return 0.0; };
  model.describe = std::move(describe);
  return model;
}

inline VelocityModel kernel_model(Kernel kernel, std::string describe = "kernel convolution") {
  VelocityModel model;
  model.kind = VelocityModel::Kind::kernel_convolution;
  model.eval = [k = kernel.fn](const ParticleMeasure& mu, double x) {
    // direct summation; instances are small enough that no fast summation
    // is warranted
    double v = 0.0;
    for (const Atom& a : mu.atoms()) v += a.weight * k(x - a.position);
    return v;
  };
  model.sup_bound_at = [s = kernel.fn.sup_bound](double r) { return s * r; };
  model.lip_bound_at = [l = kernel.fn.lip_bound](double r) { return l * r; };
  // |<mu - nu, K(x - .)>| <= ||K(x - .)||_BL ||mu - nu||*_BL
  model.flat_lip_bound_at = [n = bl_norm(kernel.fn)](double) { return n; };
  model.describe = std::move(describe);
  return model;
}

// v_j = v[mu]: the field frozen at one measure, with bounds instantiated for
// R = ||mu||_TV.
inline BLFunction freeze_velocity(const VelocityModel& model, const ParticleMeasure& mu) {
  double r = tv_norm(mu);
  BLFunction out;
  out.eval = [eval = model.eval, mu](double x) { return eval(mu, x); };
  out.sup_bound = model.sup_bound_at(r);
  out.lip_bound = model.lip_bound_at(r);
  return out;
}

}  // namespace mvt
