#include "specmine/matching.h"

#include <algorithm>
#include <cmath>
#include <limits>

namespace specmine::match {

namespace {

// Min-cost assignment on a square matrix; returns column per row.
std::vector<int> solve_square(const std::vector<std::vector<double>>& cost) {
  const int n = static_cast<int>(cost.size());
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<int> p(n + 1, 0), way(n + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<char> used(n + 1, false);
    do {
      used[j0] = true;
      int i0 = p[j0], j1 = 0;
      double delta = inf;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        double cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0);
  }
  std::vector<int> rowsol(n, -1);
  for (int j = 1; j <= n; ++j)
    if (p[j]) rowsol[p[j] - 1] = j - 1;
  return rowsol;
}

struct Solved {
  std::vector<int> col_of_row;
  double total = 0.0;
};

// Rows/columns flagged in `skip_row`/`skip_col` are removed from the problem.
Solved solve(const WeightMatrix& w, const std::vector<char>& skip_row, const std::vector<char>& skip_col) {
  std::vector<std::size_t> rows, cols;
  for (std::size_t i = 0; i < w.size(); ++i)
    if (!skip_row[i]) rows.push_back(i);
  std::size_t m = w.empty() ? 0 : w[0].size();
  for (std::size_t j = 0; j < m; ++j)
    if (!skip_col[j]) cols.push_back(j);
  Solved out;
  out.col_of_row.assign(w.size(), -1);
  std::size_t n = std::max(rows.size(), cols.size());
  if (rows.empty() || cols.empty()) return out;

  double top = 0.0;
  for (auto i : rows)
    for (auto j : cols) top = std::max(top, w[i][j]);
  std::vector<std::vector<double>> cost(n, std::vector<double>(n, top));
  for (std::size_t a = 0; a < rows.size(); ++a)
    for (std::size_t b = 0; b < cols.size(); ++b) cost[a][b] = top - w[rows[a]][cols[b]];
  auto sol = solve_square(cost);
  for (std::size_t a = 0; a < rows.size(); ++a) {
    int b = sol[a];
    if (b < 0 || static_cast<std::size_t>(b) >= cols.size()) continue;
    double weight = w[rows[a]][cols[b]];
    if (weight <= 0.0) continue;
    out.col_of_row[rows[a]] = static_cast<int>(cols[b]);
    out.total += weight;
  }
  return out;
}

}  // namespace

double maximum_weight_total(const WeightMatrix& weights) {
  std::size_t m = weights.empty() ? 0 : weights[0].size();
  return solve(weights, std::vector<char>(weights.size(), 0), std::vector<char>(m, 0)).total;
}

Assignment maximum_weight_matching(const WeightMatrix& weights) {
  Assignment result;
  const std::size_t n = weights.size();
  const std::size_t m = n == 0 ? 0 : weights[0].size();
  std::vector<char> skip_row(n, 0), skip_col(m, 0);
  double remaining = solve(weights, skip_row, skip_col).total;
  if (remaining <= 0.0) return result;

  double scale = 0.0;
  for (const auto& row : weights)
    for (double x : row) scale = std::max(scale, x);
  const double eps = 1e-9 * scale * static_cast<double>(std::max<std::size_t>(1, n + m));

  // Fix rows in order, taking the smallest column that keeps the optimum.
  for (std::size_t i = 0; i < n; ++i) {
    skip_row[i] = 1;
    bool taken = false;
    for (std::size_t j = 0; j < m && !taken; ++j) {
      if (skip_col[j] || weights[i][j] <= 0.0) continue;
      skip_col[j] = 1;
      double rest = solve(weights, skip_row, skip_col).total;
      if (weights[i][j] + rest >= remaining - eps) {
        result.pairs.emplace_back(i, j);
        result.total += weights[i][j];
        remaining = rest;
        taken = true;
      } else {
        skip_col[j] = 0;
      }
    }
    if (!taken && remaining <= eps) break;
  }
  return result;
}

}  // namespace specmine::match
