#pragma once

// Monte Carlo harness: consistency of the estimators, uniform convergence of
// the empirical codegree distance, exact-tie identification, and the
// distance-inequality sweeps. Every pass rule is recorded in the report.

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "netreg/estimate.hpp"
#include "netreg/graphon.hpp"
#include "netreg/simulate.hpp"

namespace netreg {

enum class CheckKind {
  ConsistencyBeta,
  ConsistencyLambda,
  UniformDelta,
  Lemma1,
  LemmaA1,
  Identification,
  IdentificationLambda,  // reported alongside Identification
};

std::string to_string(CheckKind check);
/// Throws ConfigError for unknown names.
CheckKind parse_check(const std::string& name);

struct KernelChoice {
  bool automatic = true;
  KernelKind kind = KernelKind::Boxcar;
  double bandwidth = 0.0;  // used when !automatic
  double target_r = kDefaultTargetR;
  double gamma_rate = 1.0;
  /// Target share at sample size n is target_r * (n / 100)^-target_decay,
  /// so h_n shrinks with n when target_decay > 0. Must be < gamma_rate / 4.
  double target_decay = 0.0;

  double target_at(std::size_t n) const;
};

struct ExperimentConfig {
  GraphonSpec graphon = GraphonSpec::homophily();
  OutcomeSpec outcome;
  std::vector<std::size_t> sample_sizes;
  std::size_t replications = 1;
  KernelChoice kernel;
  std::uint64_t base_seed = 0;
  std::vector<CheckKind> checks;
  std::size_t memory_budget_mb = 2048;
  std::size_t lattice_size = 100;
  std::size_t random_pairs = 1000;
  std::size_t quadrature_nodes = kDefaultQuadratureNodes;

  /// Throws ConfigError: sizes strictly increasing and >= 2, replications >= 1.
  void validate() const;
  bool enabled(CheckKind check) const;
};

/// Homophily graphon, m(w) = w, covariate noise sd 1, beta = 1,
/// lambda = 2w, eps sd 0.5, n in {100, 200, 400, 800}.
ExperimentConfig default_consistency_config();

struct RawRecord {
  CheckKind check = CheckKind::ConsistencyBeta;
  std::size_t n = 0;
  std::size_t replication = 0;
  std::uint64_t seed = 0;
  bool ok = true;
  double value = 0.0;         // nonnegative error statistic
  double signed_value = 0.0;  // signed companion (for bias)
  std::string note;
};

struct AggregateRecord {
  CheckKind check = CheckKind::ConsistencyBeta;
  std::size_t n = 0;
  std::size_t successes = 0;
  std::size_t failures = 0;
  double median = 0.0;
  double bias = 0.0;
  double rmse = 0.0;
  double max_error = 0.0;
};

struct CheckVerdict {
  CheckKind check = CheckKind::ConsistencyBeta;
  bool pass = false;
  std::string rule;
  std::string detail;
};

struct ExperimentReport {
  std::vector<RawRecord> raw;
  std::vector<AggregateRecord> aggregates;
  std::vector<CheckVerdict> verdicts;
  /// Set when more than 20% of replications failed at some n.
  bool config_error = false;
  double runtime_seconds = 0.0;

  bool passed() const;
  const CheckVerdict* verdict(CheckKind check) const;
  std::vector<double> medians(CheckKind check) const;
  void append(ExperimentReport other);
};

inline constexpr double kExactTolerance = 1e-10;
inline constexpr double kMaxFailureShare = 0.2;

/// Medians that are all <= kExactTolerance pass; otherwise they must
/// strictly decrease in n, tolerating one adjacent inversion when
/// replications < 50.
bool zero_or_decreasing(const std::vector<double>& medians, std::size_t replications,
                        std::string* detail = nullptr);

/// Seed of one replication; depends only on (base_seed, check family, n, r).
std::uint64_t replication_seed(std::uint64_t base_seed, std::uint64_t family, std::size_t n,
                               std::size_t replication);

/// |beta_hat - beta| and max_i |lambda_hat_i - lambda(w_i)| per replication.
ExperimentReport run_consistency(const ExperimentConfig& config);

/// max_{i<j} |dhat_ij - delta(w_i, w_j)| per replication.
ExperimentReport run_uniform_delta(const ExperimentConfig& config);

/// Exact-tie pairwise least squares over pairs in the same hidden block, and
/// within-block residual means versus the block effects. Blockmodel only
/// (UnsupportedError otherwise).
ExperimentReport run_identification_check(const ExperimentConfig& config);

/// Lemma sweeps over the lattice and random pairs.
ExperimentReport run_bound_sweep(const ExperimentConfig& config);

/// Runs every enabled check.
ExperimentReport run_experiment(const ExperimentConfig& config);

/// Replications allowed to run at once for sample size n.
std::size_t replication_concurrency(std::size_t n, std::size_t memory_budget_mb);

}  // namespace netreg
