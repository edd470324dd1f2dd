#include <doctest.h>

#include <algorithm>
#include <limits>
#include <numeric>
#include <random>
#include <vector>

#include "ma/error.hpp"
#include "ma/hungarian.hpp"

using namespace ma;

namespace {

// Exhaustive minimum over all injections of the smaller side into the larger.
double brute_force_min_cost(const std::vector<std::vector<double>>& cost) {
  const int n = static_cast<int>(cost.size());
  const int m = static_cast<int>(cost[0].size());
  if (n > m) {
    std::vector<std::vector<double>> t(m, std::vector<double>(n));
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < m; ++j) t[j][i] = cost[i][j];
    }
    return brute_force_min_cost(t);
  }
  std::vector<int> cols(m);
  std::iota(cols.begin(), cols.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  do {
    double total = 0.0;
    for (int i = 0; i < n; ++i) total += cost[i][cols[i]];
    best = std::min(best, total);
  } while (std::next_permutation(cols.begin(), cols.end()));
  return best;
}

// Dyadic entries keep every small sum exact, so equality checks are exact.
double dyadic_uniform(std::mt19937_64& rng) {
  return static_cast<double>(static_cast<std::int64_t>(rng() % 2049) - 1024) / 1024.0;
}

}  // namespace

TEST_CASE("hungarian solves the stated examples") {
  const Assignment one = hungarian({{3.5}});
  REQUIRE(one.pairs.size() == 1);
  CHECK(one.pairs[0] == std::pair{0, 0});
  CHECK(one.total_cost == 3.5);

  const Assignment diag = hungarian({{0, 1, 1}, {1, 0, 1}, {1, 1, 0}});
  CHECK(diag.total_cost == 0.0);
  for (int i = 0; i < 3; ++i) CHECK(diag.pairs[i] == std::pair{i, i});

  const Assignment mixed = hungarian({{4, 1, 3}, {2, 0, 5}, {3, 2, 2}});
  CHECK(mixed.total_cost == 5.0);
  CHECK(mixed.pairs == std::vector<std::pair<int, int>>{{0, 1}, {1, 0}, {2, 2}});
}

TEST_CASE("hungarian equals the exhaustive minimum on 1000 random matrices") {
  std::mt19937_64 rng(900);
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 7);
    const int m = 1 + static_cast<int>(rng() % 7);
    std::vector<std::vector<double>> cost(n, std::vector<double>(m));
    for (auto& row : cost) {
      for (double& c : row) c = dyadic_uniform(rng);
    }
    const Assignment result = hungarian(cost);
    CHECK(result.pairs.size() == static_cast<std::size_t>(std::min(n, m)));
    CHECK(result.total_cost == brute_force_min_cost(cost));

    std::vector<char> row_used(n, 0), col_used(m, 0);
    double recomputed = 0.0;
    for (auto [r, c] : result.pairs) {
      CHECK_FALSE(row_used[r]);
      CHECK_FALSE(col_used[c]);
      row_used[r] = col_used[c] = 1;
      recomputed += cost[r][c];
    }
    CHECK(recomputed == result.total_cost);
  }
}

TEST_CASE("hungarian is deterministic") {
  std::mt19937_64 rng(17);
  std::vector<std::vector<double>> cost(5, std::vector<double>(5));
  for (auto& row : cost) {
    for (double& c : row) c = dyadic_uniform(rng);
  }
  const Assignment a = hungarian(cost);
  const Assignment b = hungarian(cost);
  CHECK(a.pairs == b.pairs);
  CHECK(a.total_cost == b.total_cost);
}

TEST_CASE("hungarian validates its input") {
  CHECK(hungarian({}).pairs.empty());
  CHECK_THROWS_AS(hungarian({{1.0, 2.0}, {3.0}}), InputError);
  CHECK_THROWS_AS(hungarian({{std::numeric_limits<double>::infinity()}}), InputError);
  CHECK_THROWS_AS(hungarian({{std::numeric_limits<double>::quiet_NaN()}}), InputError);
}
