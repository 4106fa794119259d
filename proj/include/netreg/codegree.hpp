#pragma once

// Squared adjacency matrix and the empirical codegree distance
//   dhat_ij = ( n^-1 sum_t ( n^-1 sum_s D_ts (D_is - D_js) )^2 )^{1/2}
//           = n^{-3/2} || M_.i - M_.j ||_2,   M = D D.
//
// Two routes are provided: a literal O(n^4) evaluation of the triple sum
// kept as a test oracle, and the production path through G = M M with
//   dhat_ij^2 = n^-3 (G_ii - 2 G_ij + G_jj).

#include <cstddef>
#include <cstdint>

#include <Eigen/Core>

#include "netreg/adjacency.hpp"

namespace netreg {

using CountMatrix = Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Symmetric n x n matrix of codegree distances with zero diagonal and
/// entries in [0,1].
class CodegreeDistanceMatrix {
 public:
  CodegreeDistanceMatrix() = default;
  /// Takes ownership; asserts shape only.
  explicit CodegreeDistanceMatrix(Eigen::MatrixXd values);

  std::size_t size() const noexcept { return static_cast<std::size_t>(values_.rows()); }
  double operator()(std::size_t i, std::size_t j) const noexcept {
    return values_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  }
  const Eigen::MatrixXd& values() const noexcept { return values_; }

  double max_value() const;

  /// Relabeled copy: result(i,j) = this(perm[i], perm[j]).
  CodegreeDistanceMatrix permuted(const std::vector<std::size_t>& perm) const;

 private:
  Eigen::MatrixXd values_;
};

/// M = D D via packed-bit popcounts, parallel over rows.
CountMatrix squared_adjacency(const AdjacencyMatrix& d);

/// Gram route, parallel. Equals the reference within 1e-10 per entry.
CodegreeDistanceMatrix distance_matrix_fast(const AdjacencyMatrix& d);

namespace reference {

/// Serial triple loop M_it = sum_s D_is D_st.
CountMatrix squared_adjacency(const AdjacencyMatrix& d);

/// Literal serial evaluation of the triple sum, t and s over all 1..n.
/// O(n^4); meant for n <= 60.
CodegreeDistanceMatrix distance_matrix(const AdjacencyMatrix& d);

}  // namespace reference

inline CodegreeDistanceMatrix distance_matrix_reference(const AdjacencyMatrix& d) {
  return reference::distance_matrix(d);
}

}  // namespace netreg
