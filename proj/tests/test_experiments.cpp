#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "netreg/errors.hpp"
#include "netreg/experiments.hpp"
#include "netreg/parallel.hpp"

using namespace netreg;

namespace {

ExperimentConfig small_config() {
  ExperimentConfig c = default_consistency_config();
  c.sample_sizes = {30, 60};
  c.replications = 4;
  c.base_seed = 5;
  return c;
}

GraphonSpec two_blocks() {
  Eigen::MatrixXd m(2, 2);
  m << 0.9, 0.1, 0.1, 0.9;
  return GraphonSpec::blockmodel(m);
}

bool same_raw(const ExperimentReport& a, const ExperimentReport& b) {
  if (a.raw.size() != b.raw.size()) return false;
  for (std::size_t i = 0; i < a.raw.size(); ++i) {
    const auto& x = a.raw[i];
    const auto& y = b.raw[i];
    if (x.check != y.check || x.n != y.n || x.replication != y.replication || x.seed != y.seed ||
        x.ok != y.ok || x.value != y.value || x.signed_value != y.signed_value || x.note != y.note) {
      return false;
    }
  }
  return true;
}

}  // namespace

TEST_CASE("check names round-trip") {
  for (auto c : {CheckKind::ConsistencyBeta, CheckKind::ConsistencyLambda, CheckKind::UniformDelta,
                 CheckKind::Lemma1, CheckKind::LemmaA1, CheckKind::Identification,
                 CheckKind::IdentificationLambda}) {
    CHECK(parse_check(to_string(c)) == c);
  }
  CHECK(to_string(CheckKind::LemmaA1) == "lemmaA1");
  CHECK_THROWS_AS(parse_check("lemma2"), ConfigError);
}

TEST_CASE("zero_or_decreasing") {
  std::string detail;
  CHECK(zero_or_decreasing({0.0, 1e-12, 0.0}, 50, &detail));
  CHECK(zero_or_decreasing({0.4, 0.3, 0.2, 0.1}, 50));
  CHECK_FALSE(zero_or_decreasing({0.4, 0.3, 0.3, 0.1}, 50));
  CHECK_FALSE(zero_or_decreasing({0.4, 0.5, 0.2, 0.1}, 50, &detail));
  CHECK_FALSE(detail.empty());
  CHECK(zero_or_decreasing({0.4, 0.5, 0.2, 0.1}, 49));
  CHECK_FALSE(zero_or_decreasing({0.4, 0.5, 0.2, 0.3}, 20));
  CHECK(zero_or_decreasing({0.4}, 1));
}

TEST_CASE("replication seeds depend on every coordinate") {
  const auto s = replication_seed(1, 1, 100, 0);
  CHECK(s == replication_seed(1, 1, 100, 0));
  CHECK(s != replication_seed(2, 1, 100, 0));
  CHECK(s != replication_seed(1, 2, 100, 0));
  CHECK(s != replication_seed(1, 1, 200, 0));
  CHECK(s != replication_seed(1, 1, 100, 1));
}

TEST_CASE("config validation") {
  auto c = small_config();
  CHECK_NOTHROW(c.validate());
  c.sample_sizes = {60, 30};
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c.sample_sizes = {30, 30};
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c.sample_sizes = {1, 30};
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = small_config();
  c.replications = 0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = small_config();
  c.kernel.target_decay = 0.3;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = small_config();
  c.kernel.automatic = false;
  c.kernel.bandwidth = 0.0;
  CHECK_THROWS_AS(c.validate(), ConfigError);

  ExperimentConfig bounds;
  bounds.checks = {CheckKind::Lemma1};
  CHECK_NOTHROW(bounds.validate());
}

TEST_CASE("target share schedule") {
  KernelChoice k;
  CHECK(k.target_at(100) == kDefaultTargetR);
  CHECK(k.target_at(800) == kDefaultTargetR);
  k.target_decay = 0.2;
  CHECK(k.target_at(100) == doctest::Approx(0.05));
  CHECK(k.target_at(800) == doctest::Approx(0.05 * std::pow(8.0, -0.2)));
  k.target_r = 1.0;
  CHECK(k.target_at(10) == 1.0);
}

TEST_CASE("zero lambda and zero noise: beta error is exactly zero") {
  auto c = small_config();
  c.outcome.lambda = ZeroEffect{};
  c.outcome.epsilon_sd = 0.0;
  const auto rep = run_consistency(c);
  CHECK(rep.raw.size() == 2 * 2 * 4);
  for (const auto& a : rep.aggregates) {
    if (a.check != CheckKind::ConsistencyBeta) continue;
    CHECK(a.successes == 4);
    CHECK(a.bias == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(a.rmse < 1e-10);
    CHECK(a.median < 1e-10);
  }
  REQUIRE(rep.verdict(CheckKind::ConsistencyBeta));
  CHECK(rep.verdict(CheckKind::ConsistencyBeta)->pass);
}

TEST_CASE("reports are reproducible and thread-count independent") {
  const auto c = small_config();
  const auto a = run_consistency(c);
  const int before = max_threads();
  set_num_threads(3);
  const auto b = run_consistency(c);
  set_num_threads(before);
  CHECK(same_raw(a, b));
  auto other = c;
  other.base_seed = 6;
  CHECK_FALSE(same_raw(a, run_consistency(other)));
}

TEST_CASE("aggregates are computed from the raw table") {
  const auto rep = run_consistency(small_config());
  for (const auto& agg : rep.aggregates) {
    std::vector<double> v;
    double sum = 0.0;
    double sq = 0.0;
    for (const auto& r : rep.raw) {
      if (r.check == agg.check && r.n == agg.n && r.ok) {
        v.push_back(r.value);
        sum += r.signed_value;
        sq += r.value * r.value;
      }
    }
    REQUIRE(v.size() == 4);
    std::sort(v.begin(), v.end());
    CHECK(agg.median == doctest::Approx((v[1] + v[2]) / 2.0));
    CHECK(agg.max_error == v.back());
    CHECK(agg.bias == doctest::Approx(sum / 4.0));
    CHECK(agg.rmse == doctest::Approx(std::sqrt(sq / 4.0)));
  }
}

TEST_CASE("estimation failures are recorded; too many become a config error") {
  auto c = small_config();
  c.kernel.automatic = false;
  c.kernel.bandwidth = 1e-14;
  const auto rep = run_consistency(c);
  CHECK(rep.config_error);
  CHECK_FALSE(rep.passed());
  for (const auto& r : rep.raw) {
    CHECK_FALSE(r.ok);
    CHECK_FALSE(r.note.empty());
  }
}

TEST_CASE("uniform delta") {
  SUBCASE("constant graphon: statistic is max dhat and decreases") {
    ExperimentConfig c = small_config();
    Eigen::MatrixXd one(1, 1);
    one << 0.5;
    c.graphon = GraphonSpec::blockmodel(one);
    c.sample_sizes = {50, 100, 200, 400};
    c.replications = 5;
    c.checks = {CheckKind::UniformDelta};
    const auto rep = run_uniform_delta(c);
    REQUIRE(rep.verdict(CheckKind::UniformDelta));
    CHECK(rep.verdict(CheckKind::UniformDelta)->pass);
    const auto m = rep.medians(CheckKind::UniformDelta);
    REQUIRE(m.size() == 4);
    CHECK(m.back() < m.front());
  }
  SUBCASE("sparse graphon is reported without a pass rule") {
    ExperimentConfig c = small_config();
    c.graphon = GraphonSpec::homophily(0.3);
    c.sample_sizes = {80};
    c.replications = 2;
    c.checks = {CheckKind::UniformDelta};
    const auto rep = run_uniform_delta(c);
    REQUIRE(rep.verdict(CheckKind::UniformDelta));
    CHECK(rep.verdict(CheckKind::UniformDelta)->rule.find("informational") != std::string::npos);
    for (const auto& r : rep.raw) CHECK(std::isfinite(r.value));
  }
}

TEST_CASE("identification check") {
  ExperimentConfig c = small_config();
  c.graphon = two_blocks();
  c.outcome.lambda = BlockEffects{{-1.0, 1.0}};
  c.outcome.epsilon_sd = 0.0;
  c.checks = {CheckKind::Identification};
  const auto rep = run_identification_check(c);
  for (const auto& r : rep.raw) {
    CHECK(r.ok);
    CHECK(r.value < 1e-10);
  }
  CHECK(rep.passed());

  ExperimentConfig h = small_config();
  h.checks = {CheckKind::Identification};
  CHECK_THROWS_AS(run_identification_check(h), UnsupportedError);
}

TEST_CASE("bound sweeps") {
  ExperimentConfig c;
  c.checks = {CheckKind::Lemma1, CheckKind::LemmaA1};
  c.lattice_size = 20;
  c.random_pairs = 100;
  c.graphon = GraphonSpec::homophily();
  auto rep = run_bound_sweep(c);
  REQUIRE(rep.verdict(CheckKind::Lemma1));
  REQUIRE(rep.verdict(CheckKind::LemmaA1));
  CHECK(rep.verdict(CheckKind::Lemma1)->pass);
  CHECK(rep.verdict(CheckKind::LemmaA1)->pass);
  CHECK(rep.raw.front().n == 500);

  c.graphon = two_blocks();
  rep = run_bound_sweep(c);
  CHECK(rep.verdict(CheckKind::Lemma1)->pass);
  CHECK(rep.verdict(CheckKind::LemmaA1)->detail.find("not certified") != std::string::npos);
}

TEST_CASE("run_experiment keeps only requested checks") {
  auto c = small_config();
  c.checks = {CheckKind::ConsistencyBeta};
  const auto rep = run_experiment(c);
  for (const auto& r : rep.raw) CHECK(r.check == CheckKind::ConsistencyBeta);
  for (const auto& a : rep.aggregates) CHECK(a.check == CheckKind::ConsistencyBeta);
  CHECK(rep.verdicts.size() == 1);
}

TEST_CASE("replication concurrency follows the memory budget") {
  const int before = max_threads();
  set_num_threads(8);
  CHECK(replication_concurrency(100, 2048) == 8);
  // 48 n^2 bytes per replication: n = 4096 needs 768 MiB.
  CHECK(replication_concurrency(4096, 2048) == 2);
  CHECK(replication_concurrency(100000, 1) == 1);
  set_num_threads(before);
}
