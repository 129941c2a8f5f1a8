#include "exact_lp.hpp"

#include <stdexcept>

namespace logicdepth::detail {

namespace {

class Tableau {
 public:
  Tableau(std::size_t rows, std::size_t cols)
      : m_(rows), n_(cols), a_(rows, std::vector<mpq_class>(cols + 1)), basis_(rows) {}

  mpq_class& at(std::size_t i, std::size_t j) { return a_[i][j]; }
  mpq_class& rhs(std::size_t i) { return a_[i][n_]; }
  std::size_t& basic(std::size_t i) { return basis_[i]; }

  /// Runs simplex for min cost.x over the columns marked `allowed`.
  /// Returns false if the objective is unbounded below.
  bool minimize(const std::vector<mpq_class>& cost, const std::vector<bool>& allowed) {
    obj_.assign(n_ + 1, mpq_class(0));
    for (std::size_t j = 0; j < n_; ++j) obj_[j] = cost[j];
    for (std::size_t i = 0; i < m_; ++i) {
      const mpq_class& cb = cost[basis_[i]];
      if (cb == 0) continue;
      for (std::size_t j = 0; j <= n_; ++j) obj_[j] -= cb * a_[i][j];
    }
    for (;;) {
      std::size_t enter = n_;
      for (std::size_t j = 0; j < n_; ++j) {
        if (allowed[j] && obj_[j] < 0) {
          enter = j;
          break;
        }
      }
      if (enter == n_) return true;

      std::size_t leave = m_;
      mpq_class best;
      for (std::size_t i = 0; i < m_; ++i) {
        if (a_[i][enter] <= 0) continue;
        mpq_class ratio = a_[i][n_] / a_[i][enter];
        if (leave == m_ || ratio < best || (ratio == best && basis_[i] < basis_[leave])) {
          leave = i;
          best = std::move(ratio);
        }
      }
      if (leave == m_) return false;
      pivot(leave, enter);
    }
  }

  void pivot(std::size_t r, std::size_t e) {
    const mpq_class p = a_[r][e];
    for (std::size_t j = 0; j <= n_; ++j) {
      if (a_[r][j] != 0) a_[r][j] /= p;
    }
    auto eliminate = [&](std::vector<mpq_class>& row) {
      if (row[e] == 0) return;
      const mpq_class f = row[e];
      for (std::size_t j = 0; j <= n_; ++j) {
        if (a_[r][j] != 0) row[j] -= f * a_[r][j];
      }
    };
    for (std::size_t i = 0; i < m_; ++i) {
      if (i != r) eliminate(a_[i]);
    }
    if (!obj_.empty()) eliminate(obj_);
    basis_[r] = e;
  }

  mpq_class value_of(std::size_t j) const {
    for (std::size_t i = 0; i < m_; ++i) {
      if (basis_[i] == j) return a_[i][n_];
    }
    return 0;
  }

 private:
  std::size_t m_;
  std::size_t n_;
  std::vector<std::vector<mpq_class>> a_;
  std::vector<std::size_t> basis_;
  std::vector<mpq_class> obj_;
};

}  // namespace

std::optional<std::vector<mpq_class>> min_l1_margin_solution(
    const std::vector<std::vector<int>>& rows, std::size_t cols) {
  const std::size_t m = rows.size();
  if (m == 0) return std::vector<mpq_class>(cols, mpq_class(0));

  // Columns: u+ [0, c), u- [c, 2c), surplus [2c, 2c+m), artificial [2c+m, 2c+2m).
  const std::size_t c = cols;
  const std::size_t surplus0 = 2 * c;
  const std::size_t art0 = 2 * c + m;
  const std::size_t n = 2 * c + 2 * m;

  Tableau t(m, n);
  for (std::size_t i = 0; i < m; ++i) {
    if (rows[i].size() != cols) throw std::invalid_argument("margin LP: ragged constraint rows");
    for (std::size_t j = 0; j < c; ++j) {
      t.at(i, j) = rows[i][j];
      t.at(i, c + j) = -rows[i][j];
    }
    t.at(i, surplus0 + i) = -1;
    t.at(i, art0 + i) = 1;
    t.rhs(i) = 1;
    t.basic(i) = art0 + i;
  }

  std::vector<mpq_class> cost(n, mpq_class(0));
  std::vector<bool> allowed(n, true);
  for (std::size_t j = art0; j < n; ++j) cost[j] = 1;
  t.minimize(cost, allowed);

  mpq_class infeasibility = 0;
  for (std::size_t i = 0; i < m; ++i) {
    if (t.basic(i) >= art0) infeasibility += t.rhs(i);
  }
  if (infeasibility > 0) return std::nullopt;

  // Pivot zero-level artificials out where possible; rows that cannot be
  // pivoted are redundant and keep their artificial at zero.
  for (std::size_t i = 0; i < m; ++i) {
    if (t.basic(i) < art0) continue;
    for (std::size_t j = 0; j < art0; ++j) {
      if (t.at(i, j) != 0) {
        t.pivot(i, j);
        break;
      }
    }
  }

  std::fill(cost.begin(), cost.end(), mpq_class(0));
  for (std::size_t j = 0; j < 2 * c; ++j) cost[j] = 1;
  for (std::size_t j = art0; j < n; ++j) allowed[j] = false;
  if (!t.minimize(cost, allowed)) throw std::logic_error("margin LP: L1 objective unbounded");

  std::vector<mpq_class> u(c);
  for (std::size_t j = 0; j < c; ++j) u[j] = t.value_of(j) - t.value_of(c + j);
  return u;
}

}  // namespace logicdepth::detail
