#include "ma/hungarian.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ma/error.hpp"

namespace ma {

// Kuhn-Munkres with row/column potentials, O(n^3). Columns are scanned in
// increasing index order and improvements use strict '<', so equal-cost
// alternatives resolve to the smallest index deterministically.
Assignment hungarian(const std::vector<std::vector<double>>& cost) {
  const int rows = static_cast<int>(cost.size());
  const int cols = rows > 0 ? static_cast<int>(cost[0].size()) : 0;
  Assignment result;
  if (rows == 0 || cols == 0) return result;

  double max_cost = -std::numeric_limits<double>::infinity();
  for (const auto& row : cost) {
    if (static_cast<int>(row.size()) != cols) {
      throw InputError("cost matrix rows have unequal lengths");
    }
    for (double c : row) {
      if (!std::isfinite(c)) {
        throw InputError("cost matrix entries must be finite");
      }
      max_cost = std::max(max_cost, c);
    }
  }

  const int n = std::max(rows, cols);
  const double sentinel = 10.0 * (1.0 + max_cost);
  auto padded = [&](int r, int c) -> double {
    return (r < rows && c < cols) ? cost[r][c] : sentinel;
  };

  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<int> match(n + 1, 0);  // match[j] = row assigned to column j (1-based)
  std::vector<int> way(n + 1, 0);

  for (int i = 1; i <= n; ++i) {
    match[0] = i;
    int j0 = 0;
    std::vector<double> min_slack(n + 1, kInf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      const int i0 = match[j0];
      int j1 = 0;
      double delta = kInf;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double reduced = padded(i0 - 1, j - 1) - u[i0] - v[j];
        if (reduced < min_slack[j]) {
          min_slack[j] = reduced;
          way[j] = j0;
        }
        if (min_slack[j] < delta) {
          delta = min_slack[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[match[j]] += delta;
          v[j] -= delta;
        } else {
          min_slack[j] -= delta;
        }
      }
      j0 = j1;
    } while (match[j0] != 0);
    do {
      const int j1 = way[j0];
      match[j0] = match[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  std::vector<int> row_to_col(rows, -1);
  for (int j = 1; j <= n; ++j) {
    const int r = match[j] - 1;
    const int c = j - 1;
    if (r >= 0 && r < rows && c < cols) row_to_col[r] = c;
  }
  for (int r = 0; r < rows; ++r) {
    if (row_to_col[r] < 0) continue;
    result.pairs.emplace_back(r, row_to_col[r]);
    result.total_cost += cost[r][row_to_col[r]];
  }
  return result;
}

}  // namespace ma
