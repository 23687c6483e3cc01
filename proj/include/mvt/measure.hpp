#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

#include "mvt/errors.hpp"

namespace mvt {

struct Atom {
  double position = 0.0;
  double weight = 0.0;
};

// Atoms closer than `tolerance` merge by weight addition; the merged atom
// keeps the first (leftmost) position of its cluster.
struct CoalescePolicy {
  double tolerance = 1e-12;

  void validate() const {
    if (!(tolerance >= 0.0) || !(tolerance < 1.0)) {
      throw InvalidParameter("coalesce tolerance must lie in [0, 1)");
    }
  }
};

// A finite signed Borel measure on [0,1] represented as weighted atoms.
// Atoms are kept sorted by position (stable, so atom identity survives
// monotone maps); the representation is immutable after construction.
class ParticleMeasure {
 public:
  ParticleMeasure() = default;

  explicit ParticleMeasure(std::vector<Atom> atoms) : atoms_(std::move(atoms)) {
    for (const Atom& a : atoms_) {
      if (!(a.position >= 0.0 && a.position <= 1.0)) {
        throw InvalidParameter("atom position outside [0,1]");
      }
      if (!std::isfinite(a.weight)) {
        throw InvalidParameter("atom weight must be finite");
      }
    }
    std::stable_sort(atoms_.begin(), atoms_.end(),
                     [](const Atom& a, const Atom& b) { return a.position < b.position; });
  }

  static ParticleMeasure dirac(double position, double weight = 1.0) {
    return ParticleMeasure({{position, weight}});
  }

  const std::vector<Atom>& atoms() const { return atoms_; }
  std::size_t size() const { return atoms_.size(); }
  bool empty() const { return atoms_.empty(); }

  // Merges clusters of atoms whose successive gaps are below the tolerance
  // and drops exact-zero weights. Never called implicitly by evolution code.
  ParticleMeasure coalesced(const CoalescePolicy& policy = {}) const {
    policy.validate();
    ParticleMeasure out;
    std::size_t i = 0;
    while (i < atoms_.size()) {
      double cluster_pos = atoms_[i].position;
      double cluster_weight = atoms_[i].weight;
      double last_pos = atoms_[i].position;
      std::size_t j = i + 1;
      while (j < atoms_.size() && atoms_[j].position - last_pos < policy.tolerance) {
        cluster_weight += atoms_[j].weight;
        last_pos = atoms_[j].position;
        ++j;
      }
      if (cluster_weight != 0.0) {
        out.atoms_.push_back({cluster_pos, cluster_weight});
      }
      i = j;
    }
    return out;
  }

 private:
  std::vector<Atom> atoms_;
};

// <mu, phi> = sum_i w_i * phi(x_i), summed in ascending-position order.
// The sequential order is part of the contract: push_forward under a
// monotone map reproduces pairings bit-for-bit.
template <class F>
double pair(const ParticleMeasure& mu, F&& phi) {
  double total = 0.0;
  for (const Atom& a : mu.atoms()) {
    total += a.weight * phi(a.position);
  }
  return total;
}

inline double total_mass(const ParticleMeasure& mu) {
  double total = 0.0;
  for (const Atom& a : mu.atoms()) total += a.weight;
  return total;
}

inline double first_moment(const ParticleMeasure& mu) {
  return pair(mu, [](double x) { return x; });
}

inline double tv_norm(const ParticleMeasure& mu, const CoalescePolicy& policy = {}) {
  ParticleMeasure merged = mu.coalesced(policy);
  double total = 0.0;
  for (const Atom& a : merged.atoms()) total += std::abs(a.weight);
  return total;
}

// Image measure under a total map [0,1] -> [0,1]. Map values within
// kMapRangeTol of the interval are clamped; anything farther out throws.
inline constexpr double kMapRangeTol = 1e-9;

template <class F>
ParticleMeasure push_forward(const ParticleMeasure& mu, F&& map) {
  std::vector<Atom> atoms;
  atoms.reserve(mu.size());
  for (const Atom& a : mu.atoms()) {
    double y = map(a.position);
    if (!std::isfinite(y) || y < -kMapRangeTol || y > 1.0 + kMapRangeTol) {
      throw MapOutOfRange("push-forward map left [0,1]");
    }
    atoms.push_back({std::clamp(y, 0.0, 1.0), a.weight});
  }
  return ParticleMeasure(std::move(atoms));
}

inline ParticleMeasure linear_combine(double a, const ParticleMeasure& mu, double b,
                                      const ParticleMeasure& nu) {
  std::vector<Atom> atoms;
  atoms.reserve(mu.size() + nu.size());
  for (const Atom& at : mu.atoms()) {
    double w = a * at.weight;
    if (w != 0.0) atoms.push_back({at.position, w});
  }
  for (const Atom& at : nu.atoms()) {
    double w = b * at.weight;
    if (w != 0.0) atoms.push_back({at.position, w});
  }
  return ParticleMeasure(std::move(atoms));
}

}  // namespace mvt
