#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "mvt/errors.hpp"

namespace mvt {

// A scalar function with certified sup and Lipschitz bounds. The bounds are
// metadata: they must dominate the evaluator but need not be tight.
struct BLFunction {
  std::function<double(double)> eval;
  double sup_bound = 0.0;
  double lip_bound = 0.0;

  double operator()(double x) const { return eval(x); }
};

inline double bl_norm(const BLFunction& phi) { return phi.sup_bound + phi.lip_bound; }

inline BLFunction constant_fn(double c) {
  return {[c](double) { return c; }, std::abs(c), 0.0};
}

// a + b*x on [lo, hi].
inline BLFunction affine_fn(double a, double b, double lo = 0.0, double hi = 1.0) {
  double sup = std::max(std::abs(a + b * lo), std::abs(a + b * hi));
  return {[a, b](double x) { return a + b * x; }, sup, std::abs(b)};
}

// Piecewise-linear interpolant through nodes with ascending x. Duplicate x
// values encode jumps; evaluation is right-continuous at a jump.
inline BLFunction piecewise_linear_fn(std::vector<std::pair<double, double>> nodes) {
  if (nodes.size() < 2) {
    throw InvalidParameter("piecewise_linear needs at least two nodes");
  }
  double sup = 0.0;
  double lip = 0.0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    sup = std::max(sup, std::abs(nodes[i].second));
    if (i + 1 < nodes.size()) {
      double dx = nodes[i + 1].first - nodes[i].first;
      if (dx < 0.0) throw InvalidParameter("piecewise_linear nodes must have ascending x");
      if (dx > 0.0) {
        lip = std::max(lip, std::abs(nodes[i + 1].second - nodes[i].second) / dx);
      }
    }
  }
  auto eval = [nodes = std::move(nodes)](double x) {
    if (x <= nodes.front().first) return nodes.front().second;
    if (x >= nodes.back().first) return nodes.back().second;
    // last segment whose left node is <= x; right-continuous at duplicates
    std::size_t i = 0;
    for (std::size_t j = 0; j + 1 < nodes.size(); ++j) {
      if (nodes[j].first <= x) i = j;
    }
    double dx = nodes[i + 1].first - nodes[i].first;
    if (dx == 0.0) return nodes[i + 1].second;
    double t = (x - nodes[i].first) / dx;
    return nodes[i].second + t * (nodes[i + 1].second - nodes[i].second);
  };
  BLFunction out;
  out.eval = std::move(eval);
  out.sup_bound = sup;
  out.lip_bound = lip;
  return out;
}

// Pointwise product with the certified product bounds
// sup(fg) <= sup(f) sup(g) and lip(fg) <= sup(f) lip(g) + lip(f) sup(g).
inline BLFunction multiply(const BLFunction& f, const BLFunction& g) {
  BLFunction out;
  out.eval = [fe = f.eval, ge = g.eval](double x) { return fe(x) * ge(x); };
  out.sup_bound = f.sup_bound * g.sup_bound;
  out.lip_bound = f.sup_bound * g.lip_bound + f.lip_bound * g.sup_bound;
  return out;
}

// One piece of a piecewise bounded-Lipschitz function, alive on [lo, hi).
// The final piece of a GatingFunction is closed at x = 1.
struct GatingPiece {
  double lo = 0.0;
  double hi = 1.0;
  BLFunction fn;
};

// Piecewise bounded-Lipschitz right-hand-side weight f. Pieces tile [0,1];
// evaluation is right-continuous at interior boundaries. `breakpoints` lists
// the interior boundaries where the one-sided limits actually differ, while
// `split_points` lists every interior piece boundary (used by the solver to
// split integration substeps at corners as well as jumps).
class GatingFunction {
 public:
  GatingFunction() : GatingFunction(std::vector<GatingPiece>{{0.0, 1.0, constant_fn(0.0)}}) {}

  explicit GatingFunction(std::vector<GatingPiece> pieces) : pieces_(std::move(pieces)) {
    if (pieces_.empty()) throw InvalidParameter("gating function needs at least one piece");
    if (pieces_.front().lo != 0.0 || pieces_.back().hi != 1.0) {
      throw InvalidParameter("gating pieces must tile [0,1]");
    }
    for (std::size_t i = 0; i + 1 < pieces_.size(); ++i) {
      if (pieces_[i].hi != pieces_[i + 1].lo || !(pieces_[i].lo < pieces_[i].hi)) {
        throw InvalidParameter("gating pieces must tile [0,1]");
      }
    }
    if (!(pieces_.back().lo < pieces_.back().hi)) {
      throw InvalidParameter("gating pieces must tile [0,1]");
    }
    for (std::size_t i = 0; i + 1 < pieces_.size(); ++i) {
      double b = pieces_[i].hi;
      split_points_.push_back(b);
      double left = pieces_[i].fn(b);
      double right = pieces_[i + 1].fn(b);
      if (std::abs(left - right) > kJumpTol) breakpoints_.push_back(b);
    }
  }

  static GatingFunction from(BLFunction f) {
    return GatingFunction({{0.0, 1.0, std::move(f)}});
  }

  double operator()(double x) const { return piece_at(x).fn(x); }

  // Left limit at interior boundaries; elsewhere identical to operator().
  double eval_from_left(double x) const {
    for (std::size_t i = 0; i + 1 < pieces_.size(); ++i) {
      if (x == pieces_[i].hi) return pieces_[i].fn(x);
    }
    return (*this)(x);
  }

  // `direction < 0` selects the left limit when x sits exactly on a piece
  // boundary; used when a characteristic leaves a boundary moving left.
  double eval_toward(double x, double direction) const {
    return direction < 0.0 ? eval_from_left(x) : (*this)(x);
  }

  const std::vector<GatingPiece>& pieces() const { return pieces_; }
  const std::vector<double>& breakpoints() const { return breakpoints_; }
  const std::vector<double>& split_points() const { return split_points_; }

  double sup_bound() const {
    double s = 0.0;
    for (const GatingPiece& p : pieces_) s = std::max(s, p.fn.sup_bound);
    return s;
  }

  double max_piece_lip() const {
    double l = 0.0;
    for (const GatingPiece& p : pieces_) l = std::max(l, p.fn.lip_bound);
    return l;
  }

 private:
  static constexpr double kJumpTol = 1e-12;

  const GatingPiece& piece_at(double x) const {
    for (std::size_t i = 0; i + 1 < pieces_.size(); ++i) {
      if (x < pieces_[i].hi) return pieces_[i];
    }
    return pieces_.back();
  }

  std::vector<GatingPiece> pieces_;
  std::vector<double> breakpoints_;
  std::vector<double> split_points_;
};

// f_n(x) = -max(0, 1 - n x) - max(0, 1 - n (1 - x)): tent ramps of width 1/n
// pulling the value to -1 at both endpoints, zero in the bulk. Converges
// pointwise to the pure boundary sink (0 inside, -1 at {0,1}).
inline GatingFunction boundary_layer_family(int n) {
  if (n < 1) throw InvalidParameter("boundary_layer requires n >= 1");
  double nd = static_cast<double>(n);
  auto formula = [nd](double x) {
    return -std::max(0.0, 1.0 - nd * x) - std::max(0.0, 1.0 - nd * (1.0 - x));
  };
  BLFunction ramp{formula, 1.0, nd};
  std::vector<double> edges;
  double left = 1.0 / nd;
  double right = 1.0 - 1.0 / nd;
  if (left < right) {
    edges = {left, right};
  } else if (left > 0.0 && left < 1.0 && left == right) {
    edges = {left};
  }
  std::vector<GatingPiece> pieces;
  double lo = 0.0;
  for (double e : edges) {
    pieces.push_back({lo, e, ramp});
    lo = e;
  }
  pieces.push_back({lo, 1.0, ramp});
  return GatingFunction(std::move(pieces));
}

inline constexpr double kZeroVelocityTol = 1e-9;

// All breakpoints of f where v is numerically zero; nonempty output flags a
// configuration outside the well-posedness assumptions (advisory only).
inline std::vector<double> validate_discontinuity_condition(const GatingFunction& f,
                                                            const BLFunction& v) {
  std::vector<double> violations;
  for (double b : f.breakpoints()) {
    if (std::abs(v(b)) <= kZeroVelocityTol) violations.push_back(b);
  }
  return violations;
}

}  // namespace mvt
