#pragma once

#include <utility>
#include <vector>

namespace ma {

struct Assignment {
  std::vector<std::pair<int, int>> pairs;  // (row, col), sorted by row
  double total_cost = 0.0;
};

/// Minimum-cost assignment of min(n, m) pairs on an n x m cost matrix.
/// Rectangular inputs are squared up by padding with a large sentinel;
/// padded pairs are dropped from the result. Deterministic given the input.
/// Throws InputError on ragged rows or non-finite entries.
Assignment hungarian(const std::vector<std::vector<double>>& cost);

}  // namespace ma
