#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "mvt/errors.hpp"

namespace mvt {

// Dense tableau simplex for small instances:
//   maximize c.x  subject to  A x <= b,  x >= 0,  with all b >= 0,
// so the origin is feasible and a single phase suffices. Bland's rule keeps
// the pivoting cycle-free; instances here have a few hundred rows at most.
class DenseSimplex {
 public:
  DenseSimplex(std::vector<std::vector<double>> a, std::vector<double> b, std::vector<double> c)
      : m_(b.size()), n_(c.size()) {
    for (const std::vector<double>& row : a) {
      if (row.size() != n_) throw InvalidParameter("simplex: ragged constraint matrix");
    }
    for (double rhs : b) {
      if (rhs < 0.0) throw InvalidParameter("simplex: negative right-hand side");
    }
    // columns: n structural variables then m slacks; last column is the rhs
    tab_.assign(m_ + 1, std::vector<double>(n_ + m_ + 1, 0.0));
    basis_.resize(m_);
    for (std::size_t i = 0; i < m_; ++i) {
      for (std::size_t j = 0; j < n_; ++j) tab_[i][j] = a[i][j];
      tab_[i][n_ + i] = 1.0;
      tab_[i].back() = b[i];
      basis_[i] = n_ + i;
    }
    for (std::size_t j = 0; j < n_; ++j) tab_[m_][j] = -c[j];
  }

  // Runs the pivoting loop; returns the optimal objective value and exposes
  // the solution through `solution()`. Throws LpNotConverged past the
  // iteration budget.
  double solve() {
    const long max_iters = 50 * static_cast<long>(m_ + n_ + 8) * static_cast<long>(m_ + n_ + 8);
    for (long iter = 0; iter < max_iters; ++iter) {
      std::size_t pivot_col = n_ + m_;
      for (std::size_t j = 0; j < n_ + m_; ++j) {
        if (tab_[m_][j] < -kEps) {
          pivot_col = j;  // Bland: first improving column
          break;
        }
      }
      if (pivot_col == n_ + m_) return tab_[m_].back();

      std::size_t pivot_row = m_;
      double best_ratio = 0.0;
      for (std::size_t i = 0; i < m_; ++i) {
        if (tab_[i][pivot_col] > kEps) {
          double ratio = tab_[i].back() / tab_[i][pivot_col];
          if (pivot_row == m_ || ratio < best_ratio - kEps ||
              (ratio < best_ratio + kEps && basis_[i] < basis_[pivot_row])) {
            pivot_row = i;
            best_ratio = ratio;
          }
        }
      }
      if (pivot_row == m_) {
        throw LpNotConverged("simplex: unbounded direction encountered");
      }
      pivot(pivot_row, pivot_col);
    }
    throw LpNotConverged("simplex: iteration budget exceeded");
  }

  std::vector<double> solution() const {
    std::vector<double> x(n_, 0.0);
    for (std::size_t i = 0; i < m_; ++i) {
      if (basis_[i] < n_) x[basis_[i]] = tab_[i].back();
    }
    return x;
  }

 private:
  static constexpr double kEps = 1e-11;

  void pivot(std::size_t r, std::size_t s) {
    double inv = 1.0 / tab_[r][s];
    for (double& value : tab_[r]) value *= inv;
    tab_[r][s] = 1.0;  // kill accumulated round-off on the pivot itself
    for (std::size_t i = 0; i <= m_; ++i) {
      if (i == r) continue;
      double factor = tab_[i][s];
      if (factor == 0.0) continue;
      for (std::size_t j = 0; j < tab_[i].size(); ++j) tab_[i][j] -= factor * tab_[r][j];
      tab_[i][s] = 0.0;
    }
    basis_[r] = s;
  }

  std::size_t m_ = 0;
  std::size_t n_ = 0;
  std::vector<std::vector<double>> tab_;
  std::vector<std::size_t> basis_;
};

}  // namespace mvt
