#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "netreg/codegree.hpp"
#include "netreg/errors.hpp"
#include "netreg/io.hpp"
#include "support/generators.hpp"

using namespace netreg;
namespace fs = std::filesystem;

namespace {

ValidationKind adjacency_error(const std::string& text, std::optional<std::size_t> n = std::nullopt) {
  std::istringstream in(text);
  try {
    io::read_adjacency_csv(in, n);
  } catch (const ValidationError& e) {
    return e.kind();
  }
  FAIL("no ValidationError thrown");
  return ValidationKind::Parse;
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "netreg_io_tests";
  fs::create_directories(dir);
  return dir / name;
}

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream out(p);
  out << text;
}

}  // namespace

TEST_CASE("outcome CSV") {
  std::istringstream in("y,x1,x2\n1.5,2,3\n\n-0.25, 4 ,5e-1\r\n");
  const auto t = io::read_outcome_csv(in);
  REQUIRE(t.y.size() == 2);
  CHECK(t.y[1] == -0.25);
  CHECK(t.x(1, 0) == 4.0);
  CHECK(t.x(1, 1) == 0.5);

  std::istringstream bad("y,x1\n1,2\n3,abc\n");
  try {
    io::read_outcome_csv(bad);
    FAIL("expected a parse error");
  } catch (const ValidationError& e) {
    CHECK(e.kind() == ValidationKind::Parse);
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }
  std::istringstream ragged("y,x1\n1,2,3\n");
  CHECK_THROWS_AS(io::read_outcome_csv(ragged), ValidationError);
  std::istringstream header("a,b\n1,2\n");
  CHECK_THROWS_AS(io::read_outcome_csv(header), ValidationError);
}

TEST_CASE("adjacency CSV: valid inputs") {
  std::istringstream dense("0,1,0\n1,0,1\n0,1,0\n");
  const auto a = io::read_adjacency_csv(dense, std::nullopt);
  std::istringstream edges("i,j\n1,2\n2,3\n");
  const auto b = io::read_adjacency_csv(edges, 3);
  CHECK(a == b);
  CHECK(a == AdjacencyMatrix::from_edges(3, {{0, 1}, {1, 2}}));
  CHECK(a(0, 1) == 1);
  CHECK(a(0, 2) == 0);
}

TEST_CASE("adjacency CSV: each defect has its own error kind") {
  CHECK(adjacency_error("0,1\n0,0\n") == ValidationKind::Asymmetric);
  CHECK(adjacency_error("1,1\n1,0\n") == ValidationKind::NonzeroDiagonal);
  CHECK(adjacency_error("0,2\n2,0\n") == ValidationKind::NonBinary);
  CHECK(adjacency_error("0,1,0\n1,0\n") == ValidationKind::DimensionMismatch);
  CHECK(adjacency_error("0,x\nx,0\n") == ValidationKind::Parse);
  CHECK(adjacency_error("i,j\n2,2\n", 3) == ValidationKind::NonzeroDiagonal);
  CHECK(adjacency_error("i,j\n1,4\n", 3) == ValidationKind::IndexOutOfRange);
  CHECK(adjacency_error("i,j\n0,1\n", 3) == ValidationKind::IndexOutOfRange);
  CHECK(adjacency_error("0,1\n1,0\n", 3) == ValidationKind::DimensionMismatch);
}

TEST_CASE("ingest_sample") {
  write_text(scratch("o.csv"), "y,x1\n1,1\n2,2\n1,1\n");
  write_text(scratch("d.csv"), "i,j\n1,2\n2,3\n");
  const Sample s = io::ingest_sample(scratch("o.csv"), scratch("d.csv"));
  CHECK(s.n == 3);
  CHECK_FALSE(s.hidden_w.has_value());
  CHECK_FALSE(s.hidden_lambda.has_value());
  write_text(scratch("d4.csv"), "0,1,0,0\n1,0,1,0\n0,1,0,0\n0,0,0,0\n");
  try {
    io::ingest_sample(scratch("o.csv"), scratch("d4.csv"));
    FAIL("expected a dimension error");
  } catch (const ValidationError& e) {
    CHECK(e.kind() == ValidationKind::DimensionMismatch);
  }
}

TEST_CASE("CSV writers round-trip") {
  auto rng = gen::engine(61);
  Sample s;
  s.n = 20;
  s.d = gen::random_graph(20, 0.3, rng);
  s.x = gen::normal_matrix(20, 2, rng);
  s.y = gen::normal_matrix(20, 1, rng).col(0);

  std::stringstream outcome;
  io::write_outcome_csv(outcome, s);
  const auto t = io::read_outcome_csv(outcome);
  CHECK(t.y == s.y);
  CHECK(t.x == s.x);

  std::stringstream dense;
  io::write_adjacency_dense_csv(dense, s.d);
  CHECK(io::read_adjacency_csv(dense, 20) == s.d);
  std::stringstream edges;
  io::write_edge_list_csv(edges, s.d);
  CHECK(io::read_adjacency_csv(edges, 20) == s.d);

  std::stringstream dist;
  const auto delta = distance_matrix_fast(s.d);
  io::write_distance_csv(dist, delta);
  std::string first;
  std::getline(dist, first);
  CHECK(first.substr(0, 2) == "0,");
}

TEST_CASE("format_double is shortest round-trip") {
  CHECK(io::format_double(0.1) == "0.1");
  CHECK(io::format_double(1.0) == "1");
  CHECK(io::format_double(-2.5e-12) == "-2.5e-12");
  auto rng = gen::engine(62);
  for (int i = 0; i < 1000; ++i) {
    const double v = gen::normal_matrix(1, 1, rng)(0, 0) * std::pow(10.0, i % 20 - 10);
    CHECK(std::strtod(io::format_double(v).c_str(), nullptr) == v);
  }
}

TEST_CASE("graphon JSON") {
  using io::json;
  const auto b = io::graphon_from_json(json::parse(R"({"kind":"blockmodel","theta":[[0.8,0.2],[0.2,0.6]]})"));
  CHECK(b.kind() == "blockmodel");
  CHECK(b.cells() == 2);
  const auto g = io::graphon_from_json(json::parse(R"({"kind":"grid","m":2,"values":[0.1,0.4,0.4,0.9],"sparsity_scale":0.5})"));
  CHECK(g.piecewise_constant());
  CHECK(eval_graphon(g, 0.9, 0.1) == doctest::Approx(0.2));
  for (const auto& spec : {b, g, GraphonSpec::homophily(0.7), GraphonSpec::additive_logistic()}) {
    const auto back = io::graphon_from_json(io::to_json(spec));
    CHECK(back.kind() == spec.kind());
    CHECK(back.sparsity_scale() == spec.sparsity_scale());
    CHECK(eval_graphon(back, 0.3, 0.8) == eval_graphon(spec, 0.3, 0.8));
  }
  CHECK_THROWS_AS(io::graphon_from_json(json::parse(R"({"kind":"ring"})")), ConfigError);
  CHECK_THROWS_AS(io::graphon_from_json(json::parse(R"({"theta":[[1]]})")), ConfigError);
  CHECK_THROWS_AS(io::graphon_from_json(json::parse(R"({"kind":"blockmodel","theta":[[0.8,0.3],[0.2,0.6]]})")),
                  ConfigError);
  CHECK_THROWS_AS(io::graphon_from_json(json::parse(R"({"kind":"grid","m":2,"values":[0.1]})")), ConfigError);
  CHECK_THROWS_AS(io::graphon_from_json(json::parse(R"({"kind":"homophily","sparsity_scale":"x"})")), ConfigError);
}

TEST_CASE("outcome JSON round-trip") {
  using io::json;
  const auto o = io::outcome_from_json(json::parse(R"({
    "beta": [1.0, -2.0],
    "lambda": {"kind": "peer_effects", "gamma": [0.5, 0.1], "delta": 0.3},
    "covariate_mean": [{"kind": "linear", "a": 0, "b": 1}, {"kind": "quadratic", "a": 1, "b": 0, "c": 2}],
    "covariate_noise_sd": [1.0, 0.5],
    "epsilon_sd": 0.25
  })"));
  CHECK(o.k() == 2);
  CHECK(std::holds_alternative<PeerEffects>(o.lambda));
  const auto back = io::outcome_from_json(io::to_json(o));
  CHECK(back.beta == o.beta);
  CHECK(back.epsilon_sd == 0.25);
  CHECK(back.covariate_mean.coordinate(1, 0.5) == o.covariate_mean.coordinate(1, 0.5));
  CHECK(std::get<PeerEffects>(back.lambda).delta == 0.3);
  CHECK_THROWS_AS(io::outcome_from_json(json::parse(R"({"beta":[1],"covariate_mean":[{"kind":"cubic"}],
                  "covariate_noise_sd":[1],"epsilon_sd":0})")),
                  ConfigError);
}

TEST_CASE("experiment JSON") {
  using io::json;
  auto j = json::parse(R"({
    "graphon": {"kind": "homophily"},
    "outcome": {"beta": [1], "lambda": {"kind": "linear_in_w", "rho": 2},
                "covariate_mean": [{"kind": "linear", "a": 0, "b": 1}],
                "covariate_noise_sd": [1], "epsilon_sd": 0.5},
    "sample_sizes": [50, 100], "replications": 3, "base_seed": 9,
    "kernel": {"kind": "smooth_bump", "bandwidth": 0.02},
    "checks": ["consistency_beta", "uniform_delta"]
  })");
  auto c = io::experiment_from_json(j);
  CHECK_FALSE(c.kernel.automatic);
  CHECK(c.kernel.kind == KernelKind::SmoothBump);
  CHECK(c.kernel.bandwidth == 0.02);
  CHECK(c.replications == 3);
  CHECK(c.enabled(CheckKind::UniformDelta));
  CHECK_FALSE(c.enabled(CheckKind::Lemma1));

  j["kernel"] = "auto";
  CHECK(io::experiment_from_json(j).kernel.automatic);
  j["kernel"] = {{"target_r", 0.1}, {"target_decay", 0.1}};
  c = io::experiment_from_json(j);
  CHECK(c.kernel.automatic);
  CHECK(c.kernel.target_r == 0.1);
  CHECK(c.kernel.target_decay == 0.1);
  j["sample_sizes"] = {100, 50};
  CHECK_THROWS_AS(io::experiment_from_json(j), ConfigError);
  j["sample_sizes"] = {50, 100};
  j["checks"] = {"lemma3"};
  CHECK_THROWS_AS(io::experiment_from_json(j), ConfigError);
}

TEST_CASE("load_json reports the line of a syntax error") {
  write_text(scratch("bad.json"), "{\n  \"kind\": \"homophily\",\n  oops\n}\n");
  try {
    io::load_json(scratch("bad.json"));
    FAIL("expected a parse error");
  } catch (const ValidationError& e) {
    CHECK(e.kind() == ValidationKind::Parse);
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }
}

TEST_CASE("estimation result JSON") {
  EstimationResult r;
  r.beta_hat = Eigen::VectorXd::Constant(1, 1.25);
  r.lambda_hat = Eigen::VectorXd::Zero(4);
  r.effective_pairs = 3;
  r.r_min = 0.5;
  r.rate_threshold = 0.7;
  const auto j = io::to_json(r);
  CHECK(j["beta_hat"][0] == 1.25);
  CHECK(j["n"] == 4);
  CHECK(j["effective_pairs"] == 3);
  CHECK(j["meets_rate"] == false);
  CHECK(j["bias_corrected"] == false);
  CHECK(j["kernel"]["kind"] == "boxcar");
}
