#pragma once

#include <cstddef>
#include <vector>

namespace netreg {

/// Discrete probability measure on [0,1] used for every population integral.
/// Nodes strictly increase inside [0,1]; weights are positive and sum to 1.
struct QuadratureGrid {
  std::vector<double> nodes;
  std::vector<double> weights;

  std::size_t size() const noexcept { return nodes.size(); }

  /// Throws DomainError if the invariants above do not hold.
  void validate() const;
};

inline constexpr std::size_t kGaussPointsPerPanel = 8;
inline constexpr std::size_t kDefaultQuadratureNodes = 512;

/// Composite 8-point Gauss-Legendre rule on `panels` equal-width panels.
QuadratureGrid composite_gauss_legendre(std::size_t panels);

/// At least `min_nodes` nodes, with panel edges on every multiple of
/// 1/`cells` so piecewise-constant graphons with that many cells integrate
/// exactly.
QuadratureGrid make_quadrature(std::size_t min_nodes = kDefaultQuadratureNodes,
                               std::size_t cells = 1);

}  // namespace netreg
