#pragma once

// Draws samples {y_i, x_i, w_i} and D from the outcome model
//   y_i = x_i beta + lambda(w_i) + eps_i
// and the link model D_ij = 1{eta_ij <= f(w_i, w_j)} 1{i != j}.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <variant>
#include <vector>

#include <Eigen/Core>

#include "netreg/adjacency.hpp"
#include "netreg/covariates.hpp"
#include "netreg/graphon.hpp"

namespace netreg {

/// lambda(w) = alpha[block(w)], blocks = alpha.size().
struct BlockEffects {
  std::vector<double> alpha;
};

/// lambda(w) = rho * w
struct LinearInW {
  double rho = 0.0;
};

/// lambda(w) = E[x_j | D_ij = 1, w] gamma + delta E[y_j | D_ij = 1, w]
struct PeerEffects {
  Eigen::VectorXd gamma;
  double delta = 0.0;
};

struct ZeroEffect {};

using LambdaVariant = std::variant<ZeroEffect, BlockEffects, LinearInW, PeerEffects>;

struct OutcomeSpec {
  Eigen::VectorXd beta;
  LambdaVariant lambda = ZeroEffect{};
  CovariateMean covariate_mean;
  std::vector<double> covariate_noise_sd;
  double epsilon_sd = 0.0;

  std::size_t k() const noexcept { return static_cast<std::size_t>(beta.size()); }

  /// Throws ConfigError on dimension mismatches, non-positive noise sd,
  /// negative epsilon sd or |delta| >= 1.
  void validate() const;
};

/// Checks alignment of lambda and graphon (BlockEffects vs Blockmodel
/// block count). Throws ConfigError.
void validate_pairing(const GraphonSpec& graphon, const OutcomeSpec& outcome);

/// The true lambda(w) for an outcome spec. PeerEffects is solved once on a
/// 512-node grid and interpolated linearly (flat beyond the end nodes).
class LambdaFunction {
 public:
  LambdaFunction(const GraphonSpec& graphon, const OutcomeSpec& outcome);

  double operator()(double w) const;

 private:
  LambdaVariant variant_;
  std::vector<double> nodes_;
  std::vector<double> values_;
};

struct Sample {
  std::size_t n = 0;
  Eigen::VectorXd y;
  Eigen::MatrixXd x;  // n x k
  AdjacencyMatrix d;
  std::optional<Eigen::VectorXd> hidden_w;
  std::optional<Eigen::VectorXd> hidden_lambda;

  std::size_t k() const noexcept { return static_cast<std::size_t>(x.cols()); }

  /// Agent relabeling: new agent i is old agent perm[i].
  Sample permuted(const std::vector<std::size_t>& perm) const;
};

/// Deterministic in (graphon, outcome, n, seed); independent of the thread
/// count. Throws DomainError for n < 2, ConfigError for invalid specs.
Sample draw_sample(const GraphonSpec& graphon, const OutcomeSpec& outcome, std::size_t n,
                   std::uint64_t seed);

}  // namespace netreg
