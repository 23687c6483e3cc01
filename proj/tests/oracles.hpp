#pragma once

// Test-only reference implementations. Everything here is independent of the
// library's solver paths: the flat-norm oracle optimizes a piecewise-linear
// test function on a dense grid by dynamic programming (no simplex), and the
// integration oracles are plain fixed-step rules with no event handling.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <random>
#include <vector>

#include "mvt/measure.hpp"

namespace oracle {

// Concave piecewise-linear function stored as its breakpoint list.
struct ConcavePl {
  std::vector<double> xs;
  std::vector<double> ys;

  double max_value() const {
    double m = ys.front();
    for (double y : ys) m = std::max(m, y);
    return m;
  }

  void add_linear(double w) {
    for (std::size_t i = 0; i < xs.size(); ++i) ys[i] += w * xs[i];
  }

  // g(x) = max_{|x'-x| <= c} f(x'): shift the rising part left, the falling
  // part right, and bridge with a plateau at the max.
  void sup_filter(double c) {
    if (c <= 0.0) return;
    double ymax = max_value();
    double tol = 1e-13 * std::max(1.0, std::abs(ymax));
    std::size_t m1 = 0;
    while (ys[m1] < ymax - tol) ++m1;
    std::size_t m2 = xs.size() - 1;
    while (ys[m2] < ymax - tol) --m2;

    std::vector<double> nx, ny;
    for (std::size_t i = 0; i < m1; ++i) {
      nx.push_back(xs[i] - c);
      ny.push_back(ys[i]);
    }
    nx.push_back(xs[m1] - c);
    ny.push_back(ymax);
    nx.push_back(xs[m2] + c);
    ny.push_back(ymax);
    for (std::size_t i = m2 + 1; i < xs.size(); ++i) {
      nx.push_back(xs[i] + c);
      ny.push_back(ys[i]);
    }
    xs = std::move(nx);
    ys = std::move(ny);
  }

  double eval(double x) const {
    if (x <= xs.front()) return ys.front();
    if (x >= xs.back()) return ys.back();
    for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
      if (x <= xs[i + 1]) {
        double dx = xs[i + 1] - xs[i];
        if (dx == 0.0) return std::max(ys[i], ys[i + 1]);
        double t = (x - xs[i]) / dx;
        return ys[i] + t * (ys[i + 1] - ys[i]);
      }
    }
    return ys.back();
  }

  void clamp_domain(double lo, double hi) {
    double ylo = eval(lo);
    double yhi = eval(hi);
    std::vector<double> nx{lo}, ny{ylo};
    for (std::size_t i = 0; i < xs.size(); ++i) {
      if (xs[i] > lo && xs[i] < hi) {
        nx.push_back(xs[i]);
        ny.push_back(ys[i]);
      }
    }
    nx.push_back(hi);
    ny.push_back(yhi);
    xs = std::move(nx);
    ys = std::move(ny);
  }
};

// max sum_k w_k phi_k over |phi_k| <= a, |phi_k - phi_{k+1}| <= b * gap_k,
// solved exactly by sweeping a concave value function across the nodes.
inline double chain_max(const std::vector<double>& positions, const std::vector<double>& weights,
                        double a, double b) {
  if (positions.empty()) return 0.0;
  if (a <= 0.0) return 0.0;
  ConcavePl value{{-a, a}, {0.0, 0.0}};
  value.add_linear(weights[0]);
  for (std::size_t k = 1; k < positions.size(); ++k) {
    value.sup_filter(b * (positions[k] - positions[k - 1]));
    value.clamp_domain(-a, a);
    value.add_linear(weights[k]);
  }
  return value.max_value();
}

// Dense-grid flat-norm oracle: piecewise-linear test functions on a uniform
// grid, atoms entering through linear interpolation, budget split a + b = 1
// maximized by ternary search (the value is concave in a).
inline double flat_norm_grid(const mvt::ParticleMeasure& mu, int grid_points = 2001) {
  mvt::ParticleMeasure m = mu.coalesced();
  if (m.empty()) return 0.0;
  const int g = grid_points;
  std::vector<double> node_weight(static_cast<std::size_t>(g), 0.0);
  for (const mvt::Atom& atom : m.atoms()) {
    double scaled = atom.position * (g - 1);
    int j = std::min(static_cast<int>(scaled), g - 2);
    double lam = scaled - j;
    node_weight[static_cast<std::size_t>(j)] += atom.weight * (1.0 - lam);
    node_weight[static_cast<std::size_t>(j) + 1] += atom.weight * lam;
  }
  std::vector<double> positions;
  std::vector<double> weights;
  for (int j = 0; j < g; ++j) {
    if (node_weight[static_cast<std::size_t>(j)] != 0.0) {
      positions.push_back(static_cast<double>(j) / (g - 1));
      weights.push_back(node_weight[static_cast<std::size_t>(j)]);
    }
  }

  auto value_at = [&](double a) { return chain_max(positions, weights, a, 1.0 - a); };
  double best = std::max(value_at(0.0), value_at(1.0));
  for (int i = 1; i < 40; ++i) best = std::max(best, value_at(i / 40.0));
  double lo = 0.0, hi = 1.0;
  for (int it = 0; it < 120; ++it) {
    double m1 = lo + (hi - lo) / 3.0;
    double m2 = hi - (hi - lo) / 3.0;
    double v1 = value_at(m1);
    double v2 = value_at(m2);
    best = std::max({best, v1, v2});
    if (v1 < v2) {
      lo = m1;
    } else {
      hi = m2;
    }
  }
  return best;
}

// Plain fixed-step RK4 for x' = v(x), no boundary handling.
template <class V>
double rk4_reference(double x0, double t, V&& v, double h) {
  double x = x0;
  double remaining = t;
  while (remaining > 0.0) {
    double step = std::min(h, remaining);
    double k1 = v(x);
    double k2 = v(x + 0.5 * step * k1);
    double k3 = v(x + 0.5 * step * k2);
    double k4 = v(x + step * k3);
    x += step / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    remaining -= step;
  }
  return x;
}

// Composite Simpson quadrature of s -> integrand(s) over [0, T].
template <class F>
double simpson(F&& integrand, double T, int panels) {
  double h = T / (2 * panels);
  double total = integrand(0.0) + integrand(T);
  for (int i = 1; i < 2 * panels; ++i) {
    total += integrand(i * h) * (i % 2 == 1 ? 4.0 : 2.0);
  }
  return total * h / 3.0;
}

inline mvt::ParticleMeasure random_measure(std::mt19937_64& rng, int max_atoms, bool positive,
                                           double min_separation = 1e-4) {
  std::uniform_int_distribution<int> count_dist(1, max_atoms);
  std::uniform_real_distribution<double> pos_dist(0.0, 1.0);
  std::uniform_real_distribution<double> weight_dist(positive ? 0.05 : -1.0, 1.0);
  int n = count_dist(rng);
  std::vector<double> positions;
  while (static_cast<int>(positions.size()) < n) {
    double p = pos_dist(rng);
    bool ok = true;
    for (double q : positions) {
      if (std::abs(p - q) < min_separation) ok = false;
    }
    if (ok) positions.push_back(p);
  }
  std::vector<mvt::Atom> atoms;
  for (double p : positions) atoms.push_back({p, weight_dist(rng)});
  return mvt::ParticleMeasure(std::move(atoms));
}

}  // namespace oracle
