#include <doctest.h>

#include <cmath>

#include "netreg/errors.hpp"
#include "netreg/lemmas.hpp"

using namespace netreg;

namespace {

Eigen::MatrixXd theta2() {
  Eigen::MatrixXd m(2, 2);
  m << 0.8, 0.2, 0.2, 0.6;
  return m;
}

std::vector<GraphonSpec> builtins() {
  Eigen::MatrixXd g(3, 3);
  g << 0.9, 0.1, 0.4, 0.1, 0.5, 0.2, 0.4, 0.2, 0.7;
  return {GraphonSpec::homophily(), GraphonSpec::additive_logistic(), GraphonSpec::blockmodel(theta2()),
          GraphonSpec::grid(g), GraphonSpec::homophily(0.3)};
}

}  // namespace

TEST_CASE("pair generators") {
  const auto lat = lattice_pairs(3);
  REQUIRE(lat.size() == 9);
  CHECK(lat[0].u == 0.0);
  CHECK(lat[8].v == 1.0);
  CHECK(lat[5].u == 0.5);
  CHECK_THROWS_AS(lattice_pairs(1), DomainError);

  const auto a = random_pairs(100, 9);
  const auto b = random_pairs(100, 9);
  const auto c = random_pairs(100, 10);
  REQUIRE(a.size() == 100);
  bool differs = false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].u == b[i].u);
    CHECK(a[i].v == b[i].v);
    CHECK((a[i].u >= 0.0 && a[i].u <= 1.0));
    differs = differs || a[i].u != c[i].u;
  }
  CHECK(differs);
}

TEST_CASE("Hoelder constants: bound formula and validation") {
  const HolderConstants hc(1.0, 4.0);
  // 2 * 4^{1/6} * delta^{1/3}
  CHECK(hc.network_distance_bound(0.125) == doctest::Approx(2.0 * std::pow(4.0, 1.0 / 6.0) * 0.5).epsilon(1e-15));
  CHECK(hc.network_distance_bound(0.0) == 0.0);
  CHECK_THROWS_AS(HolderConstants(0.0, 1.0), DomainError);
  CHECK_THROWS_AS(HolderConstants(1.0, -1.0), DomainError);
}

TEST_CASE("holder_constants certification") {
  const auto h = holder_constants(GraphonSpec::homophily());
  REQUIRE(h);
  CHECK(h->alpha() == 1.0);
  CHECK(h->c() == 4.0);
  const auto l = holder_constants(GraphonSpec::additive_logistic());
  REQUIRE(l);
  CHECK(l->alpha() == 1.0);
  CHECK(l->c() == 2.0);
  CHECK_FALSE(holder_constants(GraphonSpec::blockmodel(theta2())).has_value());
  Eigen::MatrixXd one(1, 1);
  one << 0.5;
  CHECK(holder_constants(GraphonSpec::blockmodel(one)).has_value());
  CHECK_THROWS_AS(holder_constants(GraphonSpec::grid(theta2())), UnsupportedError);
}

TEST_CASE("codegree bound: constant graphon gives zeros") {
  Eigen::MatrixXd one(1, 1);
  one << 0.5;
  const auto spec = GraphonSpec::blockmodel(one);
  const auto rep = verify_lemma1(spec, lattice_pairs(5), default_grid(spec));
  REQUIRE(rep.rows.size() == 25);
  for (const auto& r : rep.rows) {
    CHECK(r.delta == 0.0);
    CHECK(r.d == 0.0);
    CHECK(r.pass);
  }
  CHECK(rep.tightness_quantiles().empty());
}

TEST_CASE("codegree bound: homophily (0,1)") {
  const auto spec = GraphonSpec::homophily();
  const auto rep = verify_lemma1(spec, {{0.0, 1.0}}, default_grid(spec));
  REQUIRE(rep.rows.size() == 1);
  CHECK(rep.rows[0].delta <= 1.0 / std::sqrt(3.0));
  CHECK(rep.rows[0].bound == doctest::Approx(1.0 / std::sqrt(3.0)).epsilon(1e-13));
  CHECK(rep.rows[0].pass);
}

TEST_CASE("property: codegree bound holds on 1000 random pairs for every built-in") {
  for (const auto& spec : builtins()) {
    const auto rep = verify_lemma1(spec, random_pairs(1000, 77), default_grid(spec));
    CHECK(rep.rows.size() == 1000);
    CHECK(rep.violations() == 0);
    for (const auto& r : rep.rows) CHECK(r.delta <= r.d + kLemmaTolerance);
  }
}

TEST_CASE("Hoelder distance bound") {
  SUBCASE("homophily with certified constants") {
    const auto spec = GraphonSpec::homophily();
    const auto rep =
        verify_lemmaA1(spec, holder_constants(spec), random_pairs(1000, 78), default_grid(spec));
    CHECK(rep.certified);
    CHECK(rep.rows.size() == 1000);
    CHECK(rep.violations() == 0);
  }
  SUBCASE("exact ties have zero bound") {
    const auto spec = GraphonSpec::additive_logistic();
    const auto rep = verify_lemmaA1(spec, HolderConstants(1.0, 2.0), {{0.3, 0.3}}, default_grid(spec));
    REQUIRE(rep.rows.size() == 1);
    CHECK(rep.rows[0].bound == 0.0);
    CHECK(rep.rows[0].d == 0.0);
    CHECK(rep.rows[0].pass);
  }
  SUBCASE("too small constants are caught as violations") {
    const auto spec = GraphonSpec::homophily();
    const auto rep = verify_lemmaA1(spec, HolderConstants(1.0, 1e-9), {{0.0, 1.0}}, default_grid(spec));
    CHECK(rep.violations() == 1);
  }
  SUBCASE("blockmodel is not certified") {
    const auto spec = GraphonSpec::blockmodel(theta2());
    const auto rep = verify_lemmaA1(spec, HolderConstants(1.0, 4.0), lattice_pairs(4), default_grid(spec));
    CHECK_FALSE(rep.certified);
    CHECK(rep.rows.empty());
    CHECK(rep.violations() == 0);
  }
  SUBCASE("missing constants are not certified") {
    const auto spec = GraphonSpec::homophily();
    CHECK_FALSE(verify_lemmaA1(spec, std::nullopt, lattice_pairs(4), default_grid(spec)).certified);
  }
}

TEST_CASE("exact-tie equivalence on blockmodel pairs") {
  const auto spec = GraphonSpec::blockmodel(theta2());
  const auto rep = verify_lemma1(spec, lattice_pairs(21), default_grid(spec));
  for (const auto& r : rep.rows) {
    const bool same = block_index(r.u, 2) == block_index(r.v, 2);
    CHECK((r.delta == 0.0) == same);
    CHECK((r.d == 0.0) == same);
  }
}

TEST_CASE("tightness quantiles are ordered and within [0,1]") {
  const auto spec = GraphonSpec::additive_logistic();
  const auto q = verify_lemma1(spec, random_pairs(200, 5), default_grid(spec)).tightness_quantiles();
  REQUIRE(q.size() == 5);
  for (std::size_t i = 1; i < q.size(); ++i) CHECK(q[i] >= q[i - 1]);
  CHECK(q.front() >= 0.0);
  CHECK(q.back() <= 1.0 + 1e-12);
}
