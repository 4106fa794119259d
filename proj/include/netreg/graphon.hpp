#pragma once

// Graphon models f: [0,1]^2 -> [0,1] and their population link and codegree
// functions, evaluated under a QuadratureGrid.

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <Eigen/Core>

#include "netreg/covariates.hpp"
#include "netreg/quadrature.hpp"

namespace netreg {

/// f(u,v) = theta[block(u)][block(v)] with l equal-width blocks.
struct Blockmodel {
  Eigen::MatrixXd theta;
};

/// f(u,v) = 1 - (u - v)^2
struct Homophily {};

/// f(u,v) = 1 / (1 + exp(-(u + v)))
struct AdditiveLogistic {};

/// Piecewise-constant interpolation of an m x m symmetric table on
/// equal-width cells.
struct GridGraphon {
  Eigen::MatrixXd values;
};

using GraphonVariant = std::variant<Blockmodel, Homophily, AdditiveLogistic, GridGraphon>;

/// Zero-based block of u among `blocks` equal-width cells; u = 1 falls in
/// the last block.
std::size_t block_index(double u, std::size_t blocks) noexcept;

double logistic(double t) noexcept;

class GraphonSpec {
 public:
  static GraphonSpec blockmodel(Eigen::MatrixXd theta, double sparsity_scale = 1.0);
  static GraphonSpec homophily(double sparsity_scale = 1.0);
  static GraphonSpec additive_logistic(double sparsity_scale = 1.0);
  static GraphonSpec grid(Eigen::MatrixXd values, double sparsity_scale = 1.0);

  const GraphonVariant& variant() const noexcept { return variant_; }
  double sparsity_scale() const noexcept { return scale_; }

  /// "blockmodel", "homophily", "additive_logistic" or "grid".
  std::string kind() const;

  /// Number of constant cells per axis for piecewise-constant variants,
  /// 1 for the smooth ones.
  std::size_t cells() const noexcept;
  bool piecewise_constant() const noexcept;

  /// Scaled f(u,v) without range checks; callers guarantee u,v in [0,1].
  double operator()(double u, double v) const noexcept;

 private:
  GraphonSpec(GraphonVariant v, double scale);

  GraphonVariant variant_;
  double scale_ = 1.0;
};

/// Scaled f(u,v). Throws DomainError unless u,v in [0,1].
double eval_graphon(const GraphonSpec& spec, double u, double v);

/// Quadrature grid aligned with the graphon's cell boundaries.
QuadratureGrid default_grid(const GraphonSpec& spec,
                            std::size_t min_nodes = kDefaultQuadratureNodes);

/// f(u, nodes[t]) for every grid node.
std::vector<double> link_function(const GraphonSpec& spec, double u, const QuadratureGrid& grid);

/// p(u, nodes[t]) = sum_s w_s f(u, s) f(nodes[t], s).
std::vector<double> codegree_function(const GraphonSpec& spec, double u,
                                      const QuadratureGrid& grid);

/// ||f_u - f_v||_2 under the grid measure.
double network_distance(const GraphonSpec& spec, double u, double v, const QuadratureGrid& grid);

/// ||p_u - p_v||_2 under the grid measure.
double codegree_distance(const GraphonSpec& spec, double u, double v, const QuadratureGrid& grid);

/// Batched link and codegree profiles. Precomputes the G x G table
/// w_s f(nodes[t], s) once, so codegree profiles of many points cost one
/// matrix product.
class ProfileTable {
 public:
  ProfileTable(GraphonSpec spec, QuadratureGrid grid);

  const GraphonSpec& spec() const noexcept { return spec_; }
  const QuadratureGrid& grid() const noexcept { return grid_; }

  /// Row i holds f(points[i], nodes[t]).
  Eigen::MatrixXd link_profiles(const std::vector<double>& points) const;
  /// Row i holds p(points[i], nodes[t]).
  Eigen::MatrixXd codegree_profiles(const std::vector<double>& points) const;

  /// Weighted L2 distance between rows a and b of a profile matrix.
  double row_distance(const Eigen::MatrixXd& profiles, Eigen::Index a, Eigen::Index b) const;

  /// Matrix of codegree distances delta(points[i], points[j]).
  Eigen::MatrixXd codegree_distance_matrix(const std::vector<double>& points) const;

 private:
  GraphonSpec spec_;
  QuadratureGrid grid_;
  Eigen::MatrixXd weighted_kernel_;  // (s, t) -> w_s f(nodes[t], s)
};

struct PopulationStatistics {
  double degree = 0.0;
  /// Undefined (empty) when the degree is zero.
  std::optional<double> peer_mean;
  std::optional<double> clustering;
};

/// Population degree, average peer characteristic and clustering of an
/// agent of type u, for a scalar covariate mean m.
PopulationStatistics population_statistics(const GraphonSpec& spec, double u,
                                           const std::function<double(double)>& covariate_mean,
                                           const QuadratureGrid& grid);

struct PeerEffectSolution {
  std::vector<double> lambda;  // at grid nodes
  std::size_t iterations = 0;
  double damping = 1.0;
};

/// Solves lambda(u) = A[m gamma](u) + delta A[m beta + lambda](u), where
/// A[g](u) is the f(u, .)-weighted average of g, by fixed-point iteration
/// on the grid nodes. Requires |delta| < 1 and positive degree everywhere.
PeerEffectSolution peer_effect_lambda(const GraphonSpec& spec, const Eigen::VectorXd& beta,
                                      const Eigen::VectorXd& gamma, double delta,
                                      const CovariateMean& covariate_mean,
                                      const QuadratureGrid& grid);

}  // namespace netreg
