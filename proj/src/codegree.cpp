#include "netreg/codegree.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <vector>

#include <omp.h>

#include <Eigen/Dense>

namespace netreg {

CodegreeDistanceMatrix::CodegreeDistanceMatrix(Eigen::MatrixXd values) : values_(std::move(values)) {}

double CodegreeDistanceMatrix::max_value() const { return values_.size() == 0 ? 0.0 : values_.maxCoeff(); }

CodegreeDistanceMatrix CodegreeDistanceMatrix::permuted(const std::vector<std::size_t>& perm) const {
  const auto n = values_.rows();
  Eigen::MatrixXd out(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      out(i, j) = values_(static_cast<Eigen::Index>(perm[static_cast<std::size_t>(i)]),
                          static_cast<Eigen::Index>(perm[static_cast<std::size_t>(j)]));
    }
  }
  return CodegreeDistanceMatrix(std::move(out));
}

CountMatrix squared_adjacency(const AdjacencyMatrix& d) {
  const std::size_t n = d.size();
  const std::size_t words = (n + 63) / 64;
  std::vector<std::uint64_t> packed(n * words, 0);
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint8_t* row = d.row(i);
    std::uint64_t* dst = packed.data() + i * words;
    for (std::size_t s = 0; s < n; ++s) {
      if (row[s]) dst[s / 64] |= std::uint64_t{1} << (s % 64);
    }
  }

  const auto count = static_cast<Eigen::Index>(n);
  CountMatrix m(count, count);
#pragma omp parallel for schedule(dynamic, 16)
  for (Eigen::Index i = 0; i < count; ++i) {
    const std::uint64_t* ri = packed.data() + static_cast<std::size_t>(i) * words;
    for (Eigen::Index j = i; j < count; ++j) {
      const std::uint64_t* rj = packed.data() + static_cast<std::size_t>(j) * words;
      std::int64_t common = 0;
      for (std::size_t w = 0; w < words; ++w) common += std::popcount(ri[w] & rj[w]);
      m(i, j) = common;
      m(j, i) = common;
    }
  }
  return m;
}

CodegreeDistanceMatrix distance_matrix_fast(const AdjacencyMatrix& d) {
  const auto n = static_cast<Eigen::Index>(d.size());
  // Entries of M are <= n and of G = M M are <= n^3, so every value below
  // is an integer held exactly in a double.
  const Eigen::MatrixXd m = squared_adjacency(d).cast<double>();
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(n, n);
  if (omp_get_max_threads() > 1 && !omp_in_parallel()) {
    // Column stripes of G, one serial product each.
    constexpr Eigen::Index kStripe = 64;
    const Eigen::Index stripes = (n + kStripe - 1) / kStripe;
#pragma omp parallel for schedule(dynamic, 1)
    for (Eigen::Index s = 0; s < stripes; ++s) {
      const Eigen::Index c0 = s * kStripe;
      const Eigen::Index width = std::min(kStripe, n - c0);
      g.middleCols(c0, width).noalias() = m * m.middleCols(c0, width);
    }
  } else {
    g.selfadjointView<Eigen::Lower>().rankUpdate(m);  // M symmetric: M M^T = M M
  }

  const double scale = 1.0 / (static_cast<double>(n) * static_cast<double>(n) * static_cast<double>(n));
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n, n);
#pragma omp parallel for schedule(static)
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = j + 1; i < n; ++i) {
      const double numerator = g(i, i) - 2.0 * g(i, j) + g(j, j);
      const double value = std::sqrt(std::max(numerator, 0.0) * scale);
      out(i, j) = value;
      out(j, i) = value;
    }
  }
  return CodegreeDistanceMatrix(std::move(out));
}

}  // namespace netreg
