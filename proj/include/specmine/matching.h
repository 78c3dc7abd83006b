#pragma once

#include <cstddef>
#include <utility>
#include <vector>

namespace specmine::match {

using WeightMatrix = std::vector<std::vector<double>>;

struct Assignment {
  /// (row, column) pairs in ascending row order. Zero-weight pairs are never
  /// part of an assignment.
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  double total = 0.0;
};

/// Maximum-weight bipartite matching over a non-negative n x m matrix
/// (Kuhn-Munkres). Among optimal assignments the one whose row-wise column
/// vector is lexicographically smallest is returned, with "unassigned"
/// ordered after every column.
Assignment maximum_weight_matching(const WeightMatrix& weights);

/// Optimal total weight only.
double maximum_weight_total(const WeightMatrix& weights);

}  // namespace specmine::match
