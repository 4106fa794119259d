#include <doctest.h>

#include <cmath>

#include "netreg/codegree.hpp"
#include "netreg/parallel.hpp"
#include "support/generators.hpp"

using namespace netreg;

namespace {

AdjacencyMatrix path3() { return AdjacencyMatrix::from_edges(3, {{0, 1}, {1, 2}}); }

}  // namespace

TEST_CASE("squared adjacency: hand-computed cases") {
  CountMatrix expected(3, 3);
  expected << 1, 0, 1, 0, 2, 0, 1, 0, 1;
  CHECK(squared_adjacency(path3()) == expected);
  CHECK(reference::squared_adjacency(path3()) == expected);

  CHECK(squared_adjacency(AdjacencyMatrix(7)).isZero());

  const CountMatrix full = squared_adjacency(AdjacencyMatrix::complete(9));
  for (Eigen::Index i = 0; i < 9; ++i) {
    for (Eigen::Index j = 0; j < 9; ++j) CHECK(full(i, j) == (i == j ? 8 : 7));
  }
}

TEST_CASE("squared adjacency: packed route equals triple loop across word boundaries") {
  auto rng = gen::engine(31);
  for (std::size_t n : {1u, 2u, 63u, 64u, 65u, 130u}) {
    const auto d = gen::random_graph(n, 0.4, rng);
    const CountMatrix m = squared_adjacency(d);
    CHECK(m == reference::squared_adjacency(d));
    for (std::size_t i = 0; i < n; ++i) CHECK(m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) == static_cast<std::int64_t>(d.degree(i)));
  }
}

TEST_CASE("3-node path distances") {
  for (const auto& delta : {distance_matrix_reference(path3()), distance_matrix_fast(path3())}) {
    CHECK(delta(0, 2) == 0.0);
    CHECK(delta(0, 1) == doctest::Approx(std::sqrt(6.0 / 27.0)).epsilon(1e-15));
    CHECK(delta(1, 2) == doctest::Approx(std::sqrt(6.0 / 27.0)).epsilon(1e-15));
    for (std::size_t i = 0; i < 3; ++i) CHECK(delta(i, i) == 0.0);
  }
}

TEST_CASE("duplicate agents have zero distance") {
  // Agents 0 and 1 share neighbourhoods {2,3} and are not linked to each other.
  const auto d = AdjacencyMatrix::from_edges(5, {{0, 2}, {0, 3}, {1, 2}, {1, 3}, {3, 4}});
  CHECK(distance_matrix_reference(d)(0, 1) == 0.0);
  CHECK(distance_matrix_fast(d)(0, 1) == 0.0);
}

TEST_CASE("property: fast route equals the literal sum on 50 random graphs") {
  auto rng = gen::engine(32);
  std::uniform_int_distribution<std::size_t> size(3, 60);
  std::uniform_real_distribution<double> density(0.02, 0.98);
  for (int trial = 0; trial < 50; ++trial) {
    const auto d = gen::random_graph(size(rng), density(rng), rng);
    const auto ref = distance_matrix_reference(d);
    const auto fast = distance_matrix_fast(d);
    CHECK((ref.values() - fast.values()).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("property: metric structure of the distance matrix") {
  auto rng = gen::engine(33);
  for (int trial = 0; trial < 5; ++trial) {
    const auto d = gen::random_graph(30, 0.3 + 0.1 * trial, rng);
    const auto ref = distance_matrix_reference(d);
    const auto fast = distance_matrix_fast(d);
    const std::size_t n = d.size();
    for (std::size_t i = 0; i < n; ++i) {
      CHECK(ref(i, i) == 0.0);
      CHECK(fast(i, i) == 0.0);
      for (std::size_t j = 0; j < n; ++j) {
        CHECK(ref(i, j) == ref(j, i));
        CHECK(fast(i, j) == fast(j, i));
        CHECK((fast(i, j) >= 0.0 && fast(i, j) <= 1.0));
        for (std::size_t t = 0; t < n; ++t) {
          CHECK(ref(i, j) <= ref(i, t) + ref(t, j) + 1e-15);
          CHECK(fast(i, j) <= fast(i, t) + fast(t, j) + 1e-12);
        }
      }
    }
  }
}

TEST_CASE("property: relabeling agents permutes the distance matrix") {
  auto rng = gen::engine(34);
  for (int trial = 0; trial < 5; ++trial) {
    const auto d = gen::random_graph(40, 0.5, rng);
    const auto perm = gen::permutation(40, rng);
    const auto lhs = distance_matrix_fast(d.permuted(perm));
    const auto rhs = distance_matrix_fast(d).permuted(perm);
    CHECK((lhs.values() - rhs.values()).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("fast route is independent of the thread count") {
  auto rng = gen::engine(35);
  const auto d = gen::random_graph(150, 0.5, rng);
  const auto one = distance_matrix_fast(d);
  const int before = max_threads();
  set_num_threads(4);
  const auto four = distance_matrix_fast(d);
  set_num_threads(before);
  CHECK(one.values() == four.values());
}

TEST_CASE("max_value") {
  CHECK(distance_matrix_fast(path3()).max_value() == doctest::Approx(std::sqrt(6.0 / 27.0)));
  CHECK(distance_matrix_fast(AdjacencyMatrix(4)).max_value() == 0.0);
}
