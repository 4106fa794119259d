#include "netreg/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "netreg/errors.hpp"
#include "netreg/rng.hpp"

namespace netreg {

void OutcomeSpec::validate() const {
  const auto dim = k();
  if (dim == 0) throw ConfigError("outcome: beta must have at least one coefficient");
  if (covariate_mean.dim() != dim) {
    throw ConfigError("outcome: covariate_mean has " + std::to_string(covariate_mean.dim()) +
                      " coordinates, beta has " + std::to_string(dim));
  }
  if (covariate_noise_sd.size() != dim) {
    throw ConfigError("outcome: covariate_noise_sd length differs from beta");
  }
  for (double sd : covariate_noise_sd) {
    if (!(sd > 0.0)) throw ConfigError("outcome: covariate_noise_sd must be strictly positive");
  }
  if (!(epsilon_sd >= 0.0)) throw ConfigError("outcome: epsilon_sd must be nonnegative");
  if (const auto* b = std::get_if<BlockEffects>(&lambda); b && b->alpha.empty()) {
    throw ConfigError("outcome: block_effects needs at least one alpha");
  }
  if (const auto* p = std::get_if<PeerEffects>(&lambda)) {
    if (static_cast<std::size_t>(p->gamma.size()) != dim) {
      throw ConfigError("outcome: peer_effects gamma length differs from beta");
    }
    if (!(std::abs(p->delta) < 1.0)) throw ConfigError("outcome: peer_effects requires |delta| < 1");
  }
}

void validate_pairing(const GraphonSpec& graphon, const OutcomeSpec& outcome) {
  const auto* effects = std::get_if<BlockEffects>(&outcome.lambda);
  const auto* blocks = std::get_if<Blockmodel>(&graphon.variant());
  if (effects && blocks && effects->alpha.size() != static_cast<std::size_t>(blocks->theta.rows())) {
    throw ConfigError("block_effects has " + std::to_string(effects->alpha.size()) +
                      " alphas but the blockmodel has " + std::to_string(blocks->theta.rows()) +
                      " blocks");
  }
}

LambdaFunction::LambdaFunction(const GraphonSpec& graphon, const OutcomeSpec& outcome)
    : variant_(outcome.lambda) {
  if (const auto* p = std::get_if<PeerEffects>(&variant_)) {
    const QuadratureGrid grid = make_quadrature(kDefaultQuadratureNodes, graphon.cells());
    nodes_ = grid.nodes;
    values_ = peer_effect_lambda(graphon, outcome.beta, p->gamma, p->delta,
                                 outcome.covariate_mean, grid)
                  .lambda;
  }
}

double LambdaFunction::operator()(double w) const {
  if (std::holds_alternative<ZeroEffect>(variant_)) return 0.0;
  if (const auto* b = std::get_if<BlockEffects>(&variant_)) {
    return b->alpha[block_index(w, b->alpha.size())];
  }
  if (const auto* l = std::get_if<LinearInW>(&variant_)) return l->rho * w;

  if (w <= nodes_.front()) return values_.front();
  if (w >= nodes_.back()) return values_.back();
  const auto hi = static_cast<std::size_t>(std::upper_bound(nodes_.begin(), nodes_.end(), w) - nodes_.begin());
  const std::size_t lo = hi - 1;
  const double t = (w - nodes_[lo]) / (nodes_[hi] - nodes_[lo]);
  return values_[lo] + t * (values_[hi] - values_[lo]);
}

Sample Sample::permuted(const std::vector<std::size_t>& perm) const {
  Sample out;
  out.n = n;
  out.y.resize(y.size());
  out.x.resize(x.rows(), x.cols());
  for (std::size_t i = 0; i < n; ++i) {
    const auto dst = static_cast<Eigen::Index>(i);
    const auto src = static_cast<Eigen::Index>(perm[i]);
    out.y[dst] = y[src];
    out.x.row(dst) = x.row(src);
  }
  out.d = d.permuted(perm);
  auto permute = [&](const std::optional<Eigen::VectorXd>& v) -> std::optional<Eigen::VectorXd> {
    if (!v) return std::nullopt;
    Eigen::VectorXd r(v->size());
    for (std::size_t i = 0; i < n; ++i) r[static_cast<Eigen::Index>(i)] = (*v)[static_cast<Eigen::Index>(perm[i])];
    return r;
  };
  out.hidden_w = permute(hidden_w);
  out.hidden_lambda = permute(hidden_lambda);
  return out;
}

Sample draw_sample(const GraphonSpec& graphon, const OutcomeSpec& outcome, std::size_t n,
                   std::uint64_t seed) {
  if (n < 2) throw DomainError("draw_sample: n must be at least 2, got " + std::to_string(n));
  outcome.validate();
  validate_pairing(graphon, outcome);
  const LambdaFunction lambda(graphon, outcome);
  const std::size_t k = outcome.k();

  Sample s;
  s.n = n;
  s.y.resize(static_cast<Eigen::Index>(n));
  s.x.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(k));
  Eigen::VectorXd w(static_cast<Eigen::Index>(n));
  Eigen::VectorXd lam(static_cast<Eigen::Index>(n));

  const auto count = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    const auto u = static_cast<std::uint64_t>(i);
    const double wi = rng::Stream(rng::derive_key(seed, rng::kTagLatent, u)).uniform();
    rng::Stream xs(rng::derive_key(seed, rng::kTagCovariate, u));
    for (std::size_t j = 0; j < k; ++j) {
      s.x(i, static_cast<Eigen::Index>(j)) =
          outcome.covariate_mean.coordinate(j, wi) + outcome.covariate_noise_sd[j] * xs.normal();
    }
    const double eps = outcome.epsilon_sd * rng::Stream(rng::derive_key(seed, rng::kTagError, u)).normal();
    w[i] = wi;
    lam[i] = lambda(wi);
    s.y[i] = s.x.row(i).dot(outcome.beta) + lam[i] + eps;
  }

  s.d = AdjacencyMatrix(n);
#pragma omp parallel for schedule(dynamic, 16)
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    const auto ui = static_cast<std::size_t>(i);
    for (std::size_t j = ui + 1; j < n; ++j) {
      // eta in (0,1], so f = 0 never links and f = 1 always does.
      const double eta = 1.0 - rng::to_unit(rng::derive_key(seed, rng::kTagLink, ui, j));
      if (eta <= graphon(w[i], w[static_cast<Eigen::Index>(j)])) s.d.set_edge(ui, j);
    }
  }
  s.hidden_w = std::move(w);
  s.hidden_lambda = std::move(lam);
  return s;
}

}  // namespace netreg
