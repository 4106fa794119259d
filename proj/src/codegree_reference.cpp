// Serial reference kernels. Kept deliberately literal; used as test oracles
// and as the baseline in the benchmark.

#include <cmath>

#include "netreg/codegree.hpp"

namespace netreg::reference {

CountMatrix squared_adjacency(const AdjacencyMatrix& d) {
  const std::size_t n = d.size();
  const auto count = static_cast<Eigen::Index>(n);
  CountMatrix m = CountMatrix::Zero(count, count);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t t = 0; t < n; ++t) {
      std::int64_t acc = 0;
      for (std::size_t s = 0; s < n; ++s) acc += d(i, s) * d(s, t);
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(t)) = acc;
    }
  }
  return m;
}

CodegreeDistanceMatrix distance_matrix(const AdjacencyMatrix& d) {
  const std::size_t n = d.size();
  const double inv_n = 1.0 / static_cast<double>(n);
  const auto count = static_cast<Eigen::Index>(n);
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(count, count);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      double outer = 0.0;
      for (std::size_t t = 0; t < n; ++t) {
        double inner = 0.0;
        for (std::size_t s = 0; s < n; ++s) {
          inner += static_cast<double>(d(t, s)) *
                   (static_cast<double>(d(i, s)) - static_cast<double>(d(j, s)));
        }
        inner *= inv_n;
        outer += inner * inner;
      }
      const double value = std::sqrt(outer * inv_n);
      out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = value;
      out(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = value;
    }
  }
  return CodegreeDistanceMatrix(std::move(out));
}

}  // namespace netreg::reference
