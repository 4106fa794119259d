#pragma once

// Numerical checks of the codegree/network distance inequalities
//   delta(u,v) <= d(u,v)                                  (always)
//   d(u,v) <= 2 C^{1/(2+4a)} delta(u,v)^{a/(1+2a)}        (Hoelder graphons)
// and a brute-force certificate for the Hoelder constants (a, C).

#include <cstddef>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "netreg/graphon.hpp"

namespace netreg {

inline constexpr double kLemmaTolerance = 1e-8;

struct PointPair {
  double u = 0.0;
  double v = 0.0;
};

/// k x k lattice of pairs (i/(k-1), j/(k-1)).
std::vector<PointPair> lattice_pairs(std::size_t k);
/// `count` i.i.d. uniform pairs drawn from the counter-based RNG.
std::vector<PointPair> random_pairs(std::size_t count, std::uint64_t seed);

class HolderConstants {
 public:
  /// Throws DomainError unless alpha > 0 and c > 0.
  HolderConstants(double alpha, double c);

  double alpha() const noexcept { return alpha_; }
  double c() const noexcept { return c_; }

  /// 2 C^{1/(2+4a)} delta^{a/(1+2a)}
  double network_distance_bound(double codegree_distance) const;

 private:
  double alpha_;
  double c_;
};

struct PairCheck {
  std::size_t index = 0;
  double u = 0.0;
  double v = 0.0;
  double delta = 0.0;  // codegree distance
  double d = 0.0;      // network distance
  double bound = 0.0;  // the quantity the checked side must not exceed
  bool pass = true;
};

enum class LemmaCheck { Lemma1, LemmaA1 };

struct LemmaReport {
  LemmaCheck check = LemmaCheck::Lemma1;
  /// False when no Hoelder constants could be certified; rows is then empty.
  bool certified = true;
  std::optional<HolderConstants> constants;
  double tolerance = kLemmaTolerance;
  std::vector<PairCheck> rows;

  std::size_t violations() const;
  /// Quantiles (0, .25, .5, .75, 1) of delta/d over pairs with d > 0.
  std::vector<double> tightness_quantiles() const;
};

/// pass iff delta <= d + tol. Bound column holds d.
LemmaReport verify_lemma1(const GraphonSpec& spec, const std::vector<PointPair>& pairs,
                          const QuadratureGrid& grid, double tol = kLemmaTolerance);

/// pass iff d <= bound(delta) + tol. Reports "not certified" (no rows) when
/// `constants` is empty or the graphon is piecewise constant with >= 2 cells.
LemmaReport verify_lemmaA1(const GraphonSpec& spec, std::optional<HolderConstants> constants,
                           const std::vector<PointPair>& pairs, const QuadratureGrid& grid,
                           double tol = kLemmaTolerance);

inline constexpr std::size_t kDefaultHolderResolution = 200;

/// Searches alpha in {1, 1/2, 1/3, 1/4} and C in powers of two up to 2^10
/// such that, for every u and eps in {k/R}, the sampled measure of
/// {v : sup_t |f(u,t) - f(v,t)| <= eps} is at least (eps/C)^{1/alpha}, with
/// a factor-2 margin on C for sampling error. Empty result: not certified
/// (always the case for blockmodels with >= 2 blocks). Throws
/// UnsupportedError for Grid graphons.
std::optional<HolderConstants> holder_constants(
    const GraphonSpec& spec, std::size_t search_grid_resolution = kDefaultHolderResolution);

}  // namespace netreg
