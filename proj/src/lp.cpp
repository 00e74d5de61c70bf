#include "lp.hpp"

#include <cstddef>
#include <optional>

namespace ojoin::lp {
namespace {

class Tableau {
 public:
  Tableau(std::size_t rows, std::size_t cols)
      : cols_(cols), t_(rows, std::vector<Rational>(cols + 1)), basis_(rows) {}

  Rational& at(std::size_t r, std::size_t c) { return t_[r][c]; }
  Rational& rhs(std::size_t r) { return t_[r][cols_]; }
  std::size_t rows() const { return t_.size(); }
  std::size_t& basis(std::size_t r) { return basis_[r]; }

  void pivot(std::size_t r, std::size_t c) {
    const Rational p = t_[r][c];
    for (auto& v : t_[r]) v /= p;
    for (std::size_t i = 0; i < t_.size(); ++i) {
      if (i == r || t_[i][c] == 0) continue;
      const Rational f = t_[i][c];
      for (std::size_t j = 0; j <= cols_; ++j) t_[i][j] -= f * t_[r][j];
    }
    basis_[r] = c;
  }

  void drop_row(std::size_t r) {
    t_.erase(t_.begin() + static_cast<std::ptrdiff_t>(r));
    basis_.erase(basis_.begin() + static_cast<std::ptrdiff_t>(r));
  }

  // Returns false if unbounded.
  bool optimize(const std::vector<Rational>& cost, const std::vector<bool>& allowed) {
    for (;;) {
      std::optional<std::size_t> enter;
      for (std::size_t j = 0; j < cols_ && !enter; ++j) {
        if (!allowed[j] || is_basic(j)) continue;
        Rational d = cost[j];
        for (std::size_t i = 0; i < t_.size(); ++i) d -= cost[basis_[i]] * t_[i][j];
        if (d < 0) enter = j;
      }
      if (!enter) return true;
      std::optional<std::size_t> leave;
      Rational best;
      for (std::size_t i = 0; i < t_.size(); ++i) {
        if (t_[i][*enter] <= 0) continue;
        Rational ratio = t_[i][cols_] / t_[i][*enter];
        if (!leave || ratio < best || (ratio == best && basis_[i] < basis_[*leave])) {
          leave = i;
          best = ratio;
        }
      }
      if (!leave) return false;
      pivot(*leave, *enter);
    }
  }

  Rational objective(const std::vector<Rational>& cost) const {
    Rational v = 0;
    for (std::size_t i = 0; i < t_.size(); ++i) v += cost[basis_[i]] * t_[i][cols_];
    return v;
  }

  std::vector<Rational> point(std::size_t n) const {
    std::vector<Rational> x(n);
    for (std::size_t i = 0; i < t_.size(); ++i) {
      if (basis_[i] < n) x[basis_[i]] = t_[i][cols_];
    }
    return x;
  }

 private:
  bool is_basic(std::size_t j) const {
    for (auto b : basis_) {
      if (b == j) return true;
    }
    return false;
  }

  std::size_t cols_;
  std::vector<std::vector<Rational>> t_;
  std::vector<std::size_t> basis_;
};

}  // namespace

Result minimize(const std::vector<Rational>& c, const std::vector<Row>& rows) {
  const std::size_t n = c.size();
  const std::size_t m = rows.size();

  // Column layout: originals, one slack/surplus per inequality, one artificial per row.
  std::size_t n_slack = 0;
  for (const auto& r : rows) n_slack += r.sense != Sense::kEq;
  const std::size_t art0 = n + n_slack;
  const std::size_t cols = art0 + m;

  Tableau tab(m, cols);
  std::size_t slack = n;
  for (std::size_t i = 0; i < m; ++i) {
    const Row& r = rows[i];
    const bool flip = r.b < 0;
    const Rational sign = flip ? -1 : 1;
    for (std::size_t j = 0; j < n; ++j) tab.at(i, j) = sign * r.a[j];
    tab.rhs(i) = sign * r.b;
    if (r.sense != Sense::kEq) {
      const Rational s = r.sense == Sense::kLe ? 1 : -1;
      tab.at(i, slack++) = sign * s;
    }
    tab.at(i, art0 + i) = 1;
    tab.basis(i) = art0 + i;
  }

  std::vector<Rational> phase1(cols);
  for (std::size_t j = art0; j < cols; ++j) phase1[j] = 1;
  std::vector<bool> all(cols, true);
  tab.optimize(phase1, all);

  Result res;
  if (tab.objective(phase1) != 0) return res;
  res.feasible = true;

  // Drive artificial variables out of the basis, dropping redundant rows.
  for (std::size_t i = 0; i < tab.rows();) {
    if (tab.basis(i) < art0) {
      ++i;
      continue;
    }
    std::optional<std::size_t> col;
    for (std::size_t j = 0; j < art0 && !col; ++j) {
      if (tab.at(i, j) != 0) col = j;
    }
    if (col) {
      tab.pivot(i, *col);
      ++i;
    } else {
      tab.drop_row(i);
    }
  }

  std::vector<Rational> cost(cols);
  for (std::size_t j = 0; j < n; ++j) cost[j] = c[j];
  std::vector<bool> allowed(cols, true);
  for (std::size_t j = art0; j < cols; ++j) allowed[j] = false;
  if (!tab.optimize(cost, allowed)) return res;
  res.bounded = true;
  res.value = tab.objective(cost);
  res.x = tab.point(n);
  return res;
}

Result lexmin_optimum(const std::vector<Rational>& c, std::vector<Row> rows) {
  Result best = minimize(c, rows);
  if (!best.feasible || !best.bounded) return best;
  const std::size_t n = c.size();
  rows.push_back({c, Sense::kEq, best.value});
  for (std::size_t k = 0; k < n; ++k) {
    std::vector<Rational> unit(n);
    unit[k] = 1;
    Result r = minimize(unit, rows);
    rows.push_back({unit, Sense::kEq, r.value});
    best.x = r.x;
  }
  return best;
}

}  // namespace ojoin::lp
