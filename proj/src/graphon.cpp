#include "netreg/graphon.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "netreg/errors.hpp"

namespace netreg {

namespace {

void check_unit(double u, const char* what) {
  if (!(u >= 0.0 && u <= 1.0)) {
    throw DomainError(std::string(what) + " must lie in [0,1], got " + std::to_string(u));
  }
}

void check_table(const Eigen::MatrixXd& m, const char* what) {
  if (m.rows() == 0 || m.rows() != m.cols()) {
    throw DomainError(std::string(what) + " must be a nonempty square matrix");
  }
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (!(m(i, j) >= 0.0 && m(i, j) <= 1.0)) {
        throw DomainError(std::string(what) + " entries must lie in [0,1]");
      }
      if (m(i, j) != m(j, i)) throw DomainError(std::string(what) + " must be symmetric");
    }
  }
}

void check_scale(double s) {
  if (!(s > 0.0 && s <= 1.0)) throw DomainError("sparsity_scale must lie in (0,1]");
}

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

}  // namespace

std::size_t block_index(double u, std::size_t blocks) noexcept {
  const double scaled = std::floor(static_cast<double>(blocks) * u);
  if (scaled <= 0.0) return 0;
  return std::min(static_cast<std::size_t>(scaled), blocks - 1);
}

double logistic(double t) noexcept { return 1.0 / (1.0 + std::exp(-t)); }

GraphonSpec::GraphonSpec(GraphonVariant v, double scale) : variant_(std::move(v)), scale_(scale) {}

GraphonSpec GraphonSpec::blockmodel(Eigen::MatrixXd theta, double sparsity_scale) {
  check_table(theta, "blockmodel theta");
  check_scale(sparsity_scale);
  return GraphonSpec(Blockmodel{std::move(theta)}, sparsity_scale);
}

GraphonSpec GraphonSpec::homophily(double sparsity_scale) {
  check_scale(sparsity_scale);
  return GraphonSpec(Homophily{}, sparsity_scale);
}

GraphonSpec GraphonSpec::additive_logistic(double sparsity_scale) {
  check_scale(sparsity_scale);
  return GraphonSpec(AdditiveLogistic{}, sparsity_scale);
}

GraphonSpec GraphonSpec::grid(Eigen::MatrixXd values, double sparsity_scale) {
  check_table(values, "grid values");
  check_scale(sparsity_scale);
  return GraphonSpec(GridGraphon{std::move(values)}, sparsity_scale);
}

std::string GraphonSpec::kind() const {
  return std::visit(Overloaded{
                        [](const Blockmodel&) { return std::string("blockmodel"); },
                        [](const Homophily&) { return std::string("homophily"); },
                        [](const AdditiveLogistic&) { return std::string("additive_logistic"); },
                        [](const GridGraphon&) { return std::string("grid"); },
                    },
                    variant_);
}

std::size_t GraphonSpec::cells() const noexcept {
  return std::visit(Overloaded{
                        [](const Blockmodel& b) { return static_cast<std::size_t>(b.theta.rows()); },
                        [](const GridGraphon& g) { return static_cast<std::size_t>(g.values.rows()); },
                        [](const auto&) { return std::size_t{1}; },
                    },
                    variant_);
}

bool GraphonSpec::piecewise_constant() const noexcept {
  return std::holds_alternative<Blockmodel>(variant_) ||
         std::holds_alternative<GridGraphon>(variant_);
}

double GraphonSpec::operator()(double u, double v) const noexcept {
  const double f = std::visit(
      Overloaded{
          [&](const Blockmodel& b) {
            const auto l = static_cast<std::size_t>(b.theta.rows());
            return b.theta(static_cast<Eigen::Index>(block_index(u, l)),
                           static_cast<Eigen::Index>(block_index(v, l)));
          },
          [&](const Homophily&) { return 1.0 - (u - v) * (u - v); },
          [&](const AdditiveLogistic&) { return logistic(u + v); },
          [&](const GridGraphon& g) {
            const auto m = static_cast<std::size_t>(g.values.rows());
            return g.values(static_cast<Eigen::Index>(block_index(u, m)),
                            static_cast<Eigen::Index>(block_index(v, m)));
          },
      },
      variant_);
  return scale_ * f;
}

double eval_graphon(const GraphonSpec& spec, double u, double v) {
  check_unit(u, "u");
  check_unit(v, "v");
  return spec(u, v);
}

QuadratureGrid default_grid(const GraphonSpec& spec, std::size_t min_nodes) {
  return make_quadrature(min_nodes, spec.cells());
}

std::vector<double> link_function(const GraphonSpec& spec, double u, const QuadratureGrid& grid) {
  check_unit(u, "u");
  std::vector<double> out(grid.size());
  for (std::size_t t = 0; t < grid.size(); ++t) out[t] = spec(u, grid.nodes[t]);
  return out;
}

std::vector<double> codegree_function(const GraphonSpec& spec, double u,
                                      const QuadratureGrid& grid) {
  const std::vector<double> fu = link_function(spec, u, grid);
  std::vector<double> out(grid.size());
  for (std::size_t t = 0; t < grid.size(); ++t) {
    double acc = 0.0;
    for (std::size_t s = 0; s < grid.size(); ++s) {
      acc += grid.weights[s] * fu[s] * spec(grid.nodes[t], grid.nodes[s]);
    }
    out[t] = acc;
  }
  return out;
}

double network_distance(const GraphonSpec& spec, double u, double v, const QuadratureGrid& grid) {
  check_unit(u, "u");
  check_unit(v, "v");
  double acc = 0.0;
  for (std::size_t t = 0; t < grid.size(); ++t) {
    const double diff = spec(u, grid.nodes[t]) - spec(v, grid.nodes[t]);
    acc += grid.weights[t] * diff * diff;
  }
  return std::sqrt(acc);
}

double codegree_distance(const GraphonSpec& spec, double u, double v, const QuadratureGrid& grid) {
  check_unit(u, "u");
  check_unit(v, "v");
  const std::size_t g = grid.size();
  std::vector<double> diff(g);
  for (std::size_t s = 0; s < g; ++s) {
    diff[s] = grid.weights[s] * (spec(u, grid.nodes[s]) - spec(v, grid.nodes[s]));
  }
  double acc = 0.0;
  for (std::size_t t = 0; t < g; ++t) {
    double inner = 0.0;
    for (std::size_t s = 0; s < g; ++s) inner += spec(grid.nodes[t], grid.nodes[s]) * diff[s];
    acc += grid.weights[t] * inner * inner;
  }
  return std::sqrt(acc);
}

ProfileTable::ProfileTable(GraphonSpec spec, QuadratureGrid grid)
    : spec_(std::move(spec)), grid_(std::move(grid)) {
  grid_.validate();
  const auto g = static_cast<Eigen::Index>(grid_.size());
  weighted_kernel_.resize(g, g);
  for (Eigen::Index s = 0; s < g; ++s) {
    for (Eigen::Index t = 0; t < g; ++t) {
      weighted_kernel_(s, t) = grid_.weights[static_cast<std::size_t>(s)] *
                               spec_(grid_.nodes[static_cast<std::size_t>(t)],
                                     grid_.nodes[static_cast<std::size_t>(s)]);
    }
  }
}

Eigen::MatrixXd ProfileTable::link_profiles(const std::vector<double>& points) const {
  const auto n = static_cast<Eigen::Index>(points.size());
  const auto g = static_cast<Eigen::Index>(grid_.size());
  Eigen::MatrixXd out(n, g);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double u = points[static_cast<std::size_t>(i)];
    check_unit(u, "point");
    for (Eigen::Index t = 0; t < g; ++t) out(i, t) = spec_(u, grid_.nodes[static_cast<std::size_t>(t)]);
  }
  return out;
}

Eigen::MatrixXd ProfileTable::codegree_profiles(const std::vector<double>& points) const {
  return link_profiles(points) * weighted_kernel_;
}

double ProfileTable::row_distance(const Eigen::MatrixXd& profiles, Eigen::Index a,
                                  Eigen::Index b) const {
  double acc = 0.0;
  for (Eigen::Index t = 0; t < profiles.cols(); ++t) {
    const double diff = profiles(a, t) - profiles(b, t);
    acc += grid_.weights[static_cast<std::size_t>(t)] * diff * diff;
  }
  return std::sqrt(acc);
}

Eigen::MatrixXd ProfileTable::codegree_distance_matrix(const std::vector<double>& points) const {
  // Row-major copy keeps each profile contiguous for the pair loop.
  using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  const RowMatrix profiles = codegree_profiles(points);
  const auto n = profiles.rows();
  const auto g = profiles.cols();
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n, n);
#pragma omp parallel for schedule(dynamic, 8)
  for (Eigen::Index i = 0; i < n; ++i) {
    const double* pi = profiles.data() + i * g;
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double* pj = profiles.data() + j * g;
      double acc = 0.0;
      for (Eigen::Index t = 0; t < g; ++t) {
        const double diff = pi[t] - pj[t];
        acc += grid_.weights[static_cast<std::size_t>(t)] * diff * diff;
      }
      out(i, j) = std::sqrt(acc);
    }
  }
  out.triangularView<Eigen::StrictlyLower>() = out.transpose();
  return out;
}

PopulationStatistics population_statistics(const GraphonSpec& spec, double u,
                                           const std::function<double(double)>& covariate_mean,
                                           const QuadratureGrid& grid) {
  const std::vector<double> fu = link_function(spec, u, grid);
  PopulationStatistics stats;
  double weighted_mean = 0.0;
  for (std::size_t t = 0; t < grid.size(); ++t) {
    stats.degree += grid.weights[t] * fu[t];
    weighted_mean += grid.weights[t] * fu[t] * covariate_mean(grid.nodes[t]);
  }
  if (!(stats.degree > 0.0)) return stats;

  double triangles = 0.0;
  for (std::size_t t = 0; t < grid.size(); ++t) {
    double inner = 0.0;
    for (std::size_t s = 0; s < grid.size(); ++s) {
      inner += grid.weights[s] * fu[s] * spec(grid.nodes[t], grid.nodes[s]);
    }
    triangles += grid.weights[t] * fu[t] * inner;
  }
  stats.peer_mean = weighted_mean / stats.degree;
  stats.clustering = triangles / (stats.degree * stats.degree);
  return stats;
}

PeerEffectSolution peer_effect_lambda(const GraphonSpec& spec, const Eigen::VectorXd& beta,
                                      const Eigen::VectorXd& gamma, double delta,
                                      const CovariateMean& covariate_mean,
                                      const QuadratureGrid& grid) {
  if (!(std::abs(delta) < 1.0)) {
    throw ContractionError("peer effects require |delta| < 1, got " + std::to_string(delta));
  }
  const auto k = static_cast<Eigen::Index>(covariate_mean.dim());
  if (beta.size() != k || gamma.size() != k) {
    throw DomainError("peer effects: beta, gamma and covariate mean dimensions differ");
  }
  const std::size_t g = grid.size();

  // Row-normalized averaging operator A[a][b] = w_b f(a,b) / sum_b w_b f(a,b).
  std::vector<double> avg(g * g);
  for (std::size_t a = 0; a < g; ++a) {
    double degree = 0.0;
    for (std::size_t b = 0; b < g; ++b) {
      avg[a * g + b] = grid.weights[b] * spec(grid.nodes[a], grid.nodes[b]);
      degree += avg[a * g + b];
    }
    if (!(degree > 0.0)) {
      throw DomainError("peer effects: zero degree at u = " + std::to_string(grid.nodes[a]));
    }
    for (std::size_t b = 0; b < g; ++b) avg[a * g + b] /= degree;
  }

  std::vector<double> source(g);
  for (std::size_t b = 0; b < g; ++b) {
    const double w = grid.nodes[b];
    source[b] = covariate_mean.dot(w, gamma) + delta * covariate_mean.dot(w, beta);
  }
  std::vector<double> base(g, 0.0);
  for (std::size_t a = 0; a < g; ++a) {
    for (std::size_t b = 0; b < g; ++b) base[a] += avg[a * g + b] * source[b];
  }

  constexpr std::size_t kMaxIterations = 10'000;
  constexpr double kTolerance = 1e-10;
  PeerEffectSolution sol;
  sol.lambda = base;
  std::vector<double> next(g);
  double previous_change = std::numeric_limits<double>::infinity();
  for (std::size_t it = 1; it <= kMaxIterations; ++it) {
    double change = 0.0;
    for (std::size_t a = 0; a < g; ++a) {
      double acc = 0.0;
      for (std::size_t b = 0; b < g; ++b) acc += avg[a * g + b] * sol.lambda[b];
      const double updated = base[a] + delta * acc;
      next[a] = (1.0 - sol.damping) * sol.lambda[a] + sol.damping * updated;
      change = std::max(change, std::abs(next[a] - sol.lambda[a]));
    }
    sol.lambda.swap(next);
    sol.iterations = it;
    if (change < kTolerance) return sol;
    if (change > previous_change && sol.damping == 1.0) sol.damping = 0.5;
    previous_change = change;
  }
  throw ContractionError("peer effects: fixed point did not converge in 10000 iterations");
}

}  // namespace netreg
