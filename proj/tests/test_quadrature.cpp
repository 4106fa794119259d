#include <doctest.h>

#include <cmath>
#include <numeric>

#include "netreg/errors.hpp"
#include "netreg/quadrature.hpp"

using namespace netreg;

TEST_CASE("composite rule integrates polynomials up to degree 15 exactly") {
  const QuadratureGrid g = composite_gauss_legendre(4);
  CHECK(g.size() == 32);
  for (int p = 0; p <= 15; ++p) {
    double sum = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) sum += g.weights[i] * std::pow(g.nodes[i], p);
    CHECK(sum == doctest::Approx(1.0 / (p + 1)).epsilon(1e-14));
  }
}

TEST_CASE("weights sum to one and nodes are increasing inside (0,1)") {
  const QuadratureGrid g = make_quadrature();
  CHECK(g.size() == 512);
  CHECK(std::accumulate(g.weights.begin(), g.weights.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(g.nodes.front() > 0.0);
  CHECK(g.nodes.back() < 1.0);
  for (std::size_t i = 1; i < g.size(); ++i) CHECK(g.nodes[i] > g.nodes[i - 1]);
  CHECK_NOTHROW(g.validate());
}

TEST_CASE("panel count aligns with cells") {
  CHECK(make_quadrature(512, 2).size() == 512);
  const QuadratureGrid g3 = make_quadrature(512, 3);
  CHECK(g3.size() == 528);
  CHECK(g3.size() % (3 * kGaussPointsPerPanel) == 0);
  // No node sits on a cell boundary, so each panel lies inside one cell.
  for (double x : g3.nodes) {
    CHECK(std::abs(x * 3.0 - std::round(x * 3.0)) > 1e-6);
  }
}

TEST_CASE("smooth non-polynomial integrand converges") {
  const auto integrate = [](const QuadratureGrid& g) {
    double s = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) s += g.weights[i] * std::exp(g.nodes[i]);
    return s;
  };
  CHECK(integrate(make_quadrature(64)) == doctest::Approx(std::exp(1.0) - 1.0).epsilon(1e-14));
}

TEST_CASE("invalid grids are rejected") {
  CHECK_THROWS_AS(composite_gauss_legendre(0), DomainError);
  QuadratureGrid bad = make_quadrature(16);
  bad.weights.pop_back();
  CHECK_THROWS(bad.validate());
}
