#include "netreg/quadrature.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include <boost/math/quadrature/gauss.hpp>

#include "netreg/errors.hpp"

namespace netreg {

void QuadratureGrid::validate() const {
  if (nodes.empty() || nodes.size() != weights.size()) {
    throw DomainError("quadrature grid: nodes and weights must be nonempty and of equal length");
  }
  for (std::size_t t = 0; t < nodes.size(); ++t) {
    if (!(nodes[t] >= 0.0 && nodes[t] <= 1.0)) {
      throw DomainError("quadrature grid: node outside [0,1]");
    }
    if (t > 0 && !(nodes[t] > nodes[t - 1])) {
      throw DomainError("quadrature grid: nodes not strictly increasing");
    }
    if (!(weights[t] > 0.0)) throw DomainError("quadrature grid: nonpositive weight");
  }
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  if (std::abs(total - 1.0) > 1e-12) {
    throw DomainError("quadrature grid: weights sum to " + std::to_string(total));
  }
}

QuadratureGrid composite_gauss_legendre(std::size_t panels) {
  if (panels == 0) throw DomainError("composite_gauss_legendre: zero panels");
  using Rule = boost::math::quadrature::gauss<double, kGaussPointsPerPanel>;
  // Boost stores the nonnegative half of the symmetric rule.
  const auto& abscissa = Rule::abscissa();
  const auto& weight = Rule::weights();
  constexpr std::size_t half = kGaussPointsPerPanel / 2;
  static_assert(kGaussPointsPerPanel % 2 == 0);

  QuadratureGrid grid;
  grid.nodes.reserve(panels * kGaussPointsPerPanel);
  grid.weights.reserve(panels * kGaussPointsPerPanel);
  const double width = 1.0 / static_cast<double>(panels);
  for (std::size_t p = 0; p < panels; ++p) {
    const double mid = (static_cast<double>(p) + 0.5) * width;
    const double scale = 0.5 * width;
    for (std::size_t q = half; q-- > 0;) {
      grid.nodes.push_back(mid - scale * abscissa[q]);
      grid.weights.push_back(scale * weight[q]);
    }
    for (std::size_t q = 0; q < half; ++q) {
      grid.nodes.push_back(mid + scale * abscissa[q]);
      grid.weights.push_back(scale * weight[q]);
    }
  }
  // Panel weights carry rounding at the 1e-16 level; renormalize exactly.
  const double total = std::accumulate(grid.weights.begin(), grid.weights.end(), 0.0);
  for (double& w : grid.weights) w /= total;
  return grid;
}

QuadratureGrid make_quadrature(std::size_t min_nodes, std::size_t cells) {
  if (cells == 0) throw DomainError("make_quadrature: zero cells");
  std::size_t panels = (min_nodes + kGaussPointsPerPanel - 1) / kGaussPointsPerPanel;
  if (panels == 0) panels = 1;
  panels = ((panels + cells - 1) / cells) * cells;
  return composite_gauss_legendre(panels);
}

}  // namespace netreg
