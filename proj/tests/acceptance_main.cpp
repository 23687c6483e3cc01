// Acceptance suite: one self-contained check per shipped guarantee, one
// pass/fail line each. Returns the number of failed criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "mvt/mvt.hpp"
#include "oracles.hpp"

using namespace mvt;

namespace {

struct Criterion {
  int number;
  std::string label;
  double budget_seconds;
  std::function<bool(std::string&)> run;
};

ParticleMeasure two_atoms() { return ParticleMeasure({{0.25, 0.5}, {0.75, 0.5}}); }

VelocityModel attraction_kernel() {
  return kernel_model({affine_fn(0.0, -1.0, -1.0, 1.0)}, "kernel affine 0 -1");
}

ParticleMeasure attraction_truth(double t) {
  return ParticleMeasure({{0.5 - 0.25 * std::exp(-t), 0.5}, {0.5 + 0.25 * std::exp(-t), 0.5}});
}

bool criterion_positive_norm_identity(std::string& detail) {
  std::mt19937_64 rng(9001);
  double worst = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    ParticleMeasure mu = oracle::random_measure(rng, 32, /*positive=*/true);
    worst = std::max(worst, std::abs(flat_norm(mu).value - tv_norm(mu)));
  }
  detail = "max |flat - tv| = " + std::to_string(worst);
  return worst <= 1e-9;
}

bool criterion_two_atom_formula(std::string& detail) {
  double worst_formula = 0.0;
  double worst_oracle = 0.0;
  for (double d : {0.1, 0.25, 0.5, 1.0}) {
    double lo = 0.5 - d / 2.0;
    ParticleMeasure dipole({{lo, 1.0}, {lo + d, -1.0}});
    double lp = flat_norm(dipole).value;
    worst_formula = std::max(worst_formula, std::abs(lp - 2.0 * d / (2.0 + d)));
    worst_oracle = std::max(worst_oracle, std::abs(lp - oracle::flat_norm_grid(dipole)));
  }
  detail = "formula gap " + std::to_string(worst_formula) + ", oracle gap " +
           std::to_string(worst_oracle);
  return worst_formula <= 1e-6 && worst_oracle <= 2e-3;
}

bool criterion_stopped_flow_exactness(std::string& detail) {
  IntegratorConfig cfg{1e-3, 1e-12};
  BLFunction one = constant_fn(1.0);

  FlowResult mid = flow_map(0.3, 0.5, one, cfg);
  bool ok = std::abs(mid.position - 0.8) <= 1e-9 && !mid.stopped;

  FlowResult hit = flow_map(0.3, 1.0, one, cfg);
  ok = ok && hit.stopped && hit.position == 1.0 && hit.hit_time.has_value() &&
       std::abs(*hit.hit_time - 0.7) <= 1e-9;

  FlowResult pulled = flow_map(0.5, 2.0, affine_fn(0.0, -1.0), cfg);
  double linear_gap = std::abs(pulled.position - 0.5 * std::exp(-2.0));
  ok = ok && linear_gap <= 1e-8 && !pulled.stopped;

  detail = "hit_time gap " + std::to_string(hit.hit_time ? std::abs(*hit.hit_time - 0.7) : 1.0) +
           ", linear-field gap " + std::to_string(linear_gap);
  return ok;
}

bool criterion_mild_closed_forms(std::string& detail) {
  ParticleMeasure nu0({{0.2, 0.5}, {0.7, 1.5}});
  Trajectory decay = mild_solve(nu0, constant_fn(0.0), GatingFunction::from(constant_fn(-1.0)),
                                1.0, uniform_times(1.0, 16));
  double worst_tv = 0.0;
  for (std::size_t k = 0; k < decay.times.size(); ++k) {
    worst_tv = std::max(worst_tv,
                        std::abs(tv_norm(decay.slices[k]) - 2.0 * std::exp(-decay.times[k])));
  }

  GatingFunction gate(
      {{0.0, 0.8 - 1e-6, constant_fn(0.0)},
       {0.8 - 1e-6, 0.8, piecewise_linear_fn({{0.8 - 1e-6, 0.0}, {0.8, -1.0}})},
       {0.8, 1.0, constant_fn(-1.0)}});
  Trajectory gated = mild_solve(ParticleMeasure::dirac(0.5, 1.0), constant_fn(1.0), gate, 1.0,
                                uniform_times(1.0, 10));
  double weight_gap = std::abs(gated.final().atoms()[0].weight - std::exp(-0.7));

  detail = "tv-decay gap " + std::to_string(worst_tv) + ", layer-weight gap " +
           std::to_string(weight_gap);
  return worst_tv <= 1e-8 && weight_gap <= 1e-4;
}

// shared sweep for criteria 5 and 6: every builtin scenario, every dyadic
// refinement level
struct GallerySweep {
  long envelope_violations = 0;
  long negative_weights = 0;
  long slices_checked = 0;
};

GallerySweep sweep_gallery() {
  GallerySweep result;
  for (const ScenarioConfig& cfg : builtin_scenarios()) {
    ParticleMeasure nu0 = ingest_initial_measure(cfg.initial);
    VelocityModel model = build_velocity(cfg.velocity);
    GatingFunction f = build_gating(cfg.gating);
    bool positive_data = true;
    for (const Atom& a : nu0.atoms()) positive_data = positive_data && a.weight >= 0.0;

    double tv0 = tv_norm(nu0);
    double rate = f.sup_bound();
    for (const Partition& p : dyadic_refinements(cfg.horizon, cfg.k_max)) {
      Trajectory run = euler_solve(nu0, model, f, p, cfg.integrator(), 2);
      for (std::size_t k = 0; k < run.slices.size(); ++k) {
        ++result.slices_checked;
        double bound = tv0 * std::exp(rate * run.times[k]) * (1.0 + 1e-9);
        if (tv_norm(run.slices[k]) > bound) ++result.envelope_violations;
        if (positive_data) {
          for (const Atom& a : run.slices[k].atoms()) {
            if (a.weight < 0.0) ++result.negative_weights;
          }
        }
      }
    }
  }
  return result;
}

GallerySweep& gallery() {
  static GallerySweep cached = sweep_gallery();
  return cached;
}

bool criterion_tv_envelope(std::string& detail) {
  detail = std::to_string(gallery().envelope_violations) + " violations over " +
           std::to_string(gallery().slices_checked) + " slices";
  return gallery().envelope_violations == 0;
}

bool criterion_positivity(std::string& detail) {
  detail = std::to_string(gallery().negative_weights) + " negative weights over " +
           std::to_string(gallery().slices_checked) + " slices";
  return gallery().negative_weights == 0;
}

bool criterion_euler_convergence(std::string& detail) {
  ParticleMeasure nu0 = two_atoms();
  VelocityModel model = attraction_kernel();
  GatingFunction f;  // zero gating
  std::vector<double> gaps;
  for (int k = 1; k <= 8; ++k) {
    Trajectory run = euler_solve(nu0, model, f, Partition::uniform(1.0, 1 << k), {}, 1);
    double gap = 0.0;
    for (std::size_t j = 0; j < run.times.size(); ++j) {
      gap = std::max(gap, flat_distance(run.slices[j], attraction_truth(run.times[j])));
    }
    gaps.push_back(gap);
  }
  bool monotone = true;
  for (std::size_t k = 3; k < gaps.size(); ++k) {
    if (!(gaps[k] < gaps[k - 1])) monotone = false;
  }
  bool final_small = gaps.back() <= 1e-3;
  bool ratios_ok = true;
  for (std::size_t k = 4; k < gaps.size(); ++k) {
    double ratio = gaps[k] / gaps[k - 1];
    if (!(ratio >= 0.3 && ratio <= 0.7)) ratios_ok = false;
  }
  char buf[256];
  std::snprintf(buf, sizeof(buf),
                "gaps k=1..8: %.2e %.2e %.2e %.2e %.2e %.2e %.2e %.2e (monotone %s, ratios %s)",
                gaps[0], gaps[1], gaps[2], gaps[3], gaps[4], gaps[5], gaps[6], gaps[7],
                monotone ? "yes" : "no", ratios_ok ? "yes" : "no");
  detail = buf;
  return monotone && final_small && ratios_ok;
}

bool criterion_weak_certificate(std::string& detail) {
  std::vector<TestFunction> catalog = test_function_catalog(1.0, 4);
  bool ok = true;
  double finest_stopped = 0.0;
  double finest_kernel = 0.0;

  {  // stopped transport under refinement of the sampling
    ParticleMeasure nu0 = ParticleMeasure::dirac(0.3);
    BLFunction v = constant_fn(1.0);
    VelocityModel model = fixed_field_model(v);
    GatingFunction f;
    double prev = 0.0;
    for (int k = 3; k <= 7; ++k) {
      Partition p = Partition::uniform(1.0, 1 << k);
      Trajectory run = euler_solve(nu0, model, f, p, {}, 5);
      double d = max_defect(defect_sweep(run, model, f, catalog)) / tv_norm(nu0);
      if (k > 3 && !(d <= prev / 3.0)) ok = false;
      prev = d;
      finest_stopped = d;
    }
    if (!(finest_stopped <= 1e-3)) ok = false;
  }
  {  // interaction kernel under joint mesh + sampling refinement
    ParticleMeasure nu0 = two_atoms();
    VelocityModel model = attraction_kernel();
    GatingFunction f;
    double prev = 0.0;
    for (int k = 2; k <= 5; ++k) {
      Partition p = Partition::uniform(1.0, 1 << k);
      Trajectory run = euler_solve(nu0, model, f, p, {}, 4);
      double d = max_defect(defect_sweep(run, model, f, catalog)) / tv_norm(nu0);
      if (k > 2 && !(d <= prev / 3.0)) ok = false;
      prev = d;
      finest_kernel = d;
    }
    if (!(finest_kernel <= 1e-3)) ok = false;
  }
  detail = "finest normalized defects: stopped " + std::to_string(finest_stopped) + ", kernel " +
           std::to_string(finest_kernel);
  return ok;
}

bool criterion_semigroup(std::string& detail) {
  IntegratorConfig cfg{1e-3, 1e-12};
  double worst_flow = 0.0;
  BLFunction smooth_fields[] = {
      {[](double x) { return x * (1.0 - x); }, 0.25, 1.0},
      {[](double x) { return 0.3 + 0.2 * std::sin(3.0 * x); }, 0.5, 0.6},
      affine_fn(0.4, -0.3),
  };
  for (const BLFunction& v : smooth_fields) {
    for (double x0 : {0.1, 0.3, 0.7}) {
      worst_flow = std::max(worst_flow, semigroup_defect(x0, 0.7, 0.7, v, cfg));
    }
  }

  double worst_q = 0.0;
  struct FixedCase {
    BLFunction v;
    GatingFunction f;
  };
  FixedCase cases[] = {
      {constant_fn(1.0), GatingFunction::from(constant_fn(0.0))},
      {affine_fn(0.5, -0.5), GatingFunction::from(affine_fn(-0.5, 0.3))},
      {{[](double x) { return 0.4 * std::sin(2.0 * x) + 0.1; }, 0.5, 0.8},
       GatingFunction::from(constant_fn(-0.6))},
  };
  ParticleMeasure nu0({{0.15, 0.7}, {0.45, 0.3}, {0.85, 0.6}});
  for (const FixedCase& c : cases) {
    Trajectory first = mild_solve(nu0, c.v, c.f, 0.4, {}, cfg);
    Trajectory chained = mild_solve(first.final(), c.v, c.f, 0.6, {}, cfg);
    Trajectory direct = mild_solve(nu0, c.v, c.f, 1.0, {}, cfg);
    worst_q = std::max(worst_q, flat_distance(chained.final(), direct.final()));
  }
  detail = "flow defect " + std::to_string(worst_flow) + ", Q defect " + std::to_string(worst_q);
  return worst_flow <= 1e-8 && worst_q <= 1e-7;
}

bool criterion_flat_axioms(std::string& detail) {
  std::mt19937_64 rng(424242);
  std::uniform_real_distribution<double> scale(-3.0, 3.0);
  double worst_hom = 0.0;
  double worst_triangle = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    ParticleMeasure mu = oracle::random_measure(rng, 16, false);
    ParticleMeasure nu = oracle::random_measure(rng, 16, false);
    double a = scale(rng);
    worst_hom = std::max(worst_hom, std::abs(flat_norm(linear_combine(a, mu, 0.0, nu)).value -
                                             std::abs(a) * flat_norm(mu).value));
    double slack = flat_norm(mu).value + flat_norm(nu).value -
                   flat_norm(linear_combine(1.0, mu, 1.0, nu)).value;
    worst_triangle = std::max(worst_triangle, -slack);
  }
  detail = "homogeneity gap " + std::to_string(worst_hom) + ", triangle slack " +
           std::to_string(worst_triangle);
  return worst_hom <= 1e-9 && worst_triangle <= 1e-9;
}

}  // namespace

int main() {
  std::vector<Criterion> criteria = {
      {1, "positive-measure norm identity (flat == tv on 200 random positive measures)", 5.0,
       criterion_positive_norm_identity},
      {2, "two-atom flat metric matches 2d/(2+d) and the dense-grid oracle", 5.0,
       criterion_two_atom_formula},
      {3, "stopped flow matches constant-speed and linear-field closed forms", 1.0,
       criterion_stopped_flow_exactness},
      {4, "mild solver closed forms (exponential tv decay, boundary-layer weight)", 1.0,
       criterion_mild_closed_forms},
      {5, "tv envelope holds on every shipped scenario and refinement level", 30.0,
       criterion_tv_envelope},
      {6, "positivity preserved on every positive shipped scenario", 30.0, criterion_positivity},
      {7, "Euler refinements converge to the interaction-kernel closed form", 60.0,
       criterion_euler_convergence},
      {8, "weak-formulation defect shrinks 3x per refinement down to 1e-3", 120.0,
       criterion_weak_certificate},
      {9, "flow and solution-operator semigroup defects stay at tolerance", 10.0,
       criterion_semigroup},
      {10, "flat-norm homogeneity and triangle inequality on random signed pairs", 10.0,
       criterion_flat_axioms},
  };

  int failures = 0;
  for (Criterion& c : criteria) {
    std::string detail;
    auto start = std::chrono::steady_clock::now();
    bool ok = false;
    try {
      ok = c.run(detail);
    } catch (const std::exception& e) {
      detail = std::string("exception: ") + e.what();
    }
    double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    bool in_budget = seconds <= c.budget_seconds;
    bool pass = ok && in_budget;
    if (!pass) ++failures;
    std::printf("[%s] criterion %2d: %s — %s [%.2fs%s]\n", pass ? "PASS" : "FAIL", c.number,
                c.label.c_str(), detail.c_str(), seconds, in_budget ? "" : " OVER BUDGET");
  }
  if (failures == 0) {
    std::printf("acceptance: all %zu criteria passed\n", criteria.size());
  } else {
    std::printf("acceptance: %d criterion(s) failed\n", failures);
  }
  return failures;
}
