#include "netreg/lemmas.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "netreg/errors.hpp"
#include "netreg/rng.hpp"

namespace netreg {

std::vector<PointPair> lattice_pairs(std::size_t k) {
  if (k < 2) throw DomainError("lattice_pairs: need k >= 2");
  std::vector<PointPair> pairs;
  pairs.reserve(k * k);
  const double step = 1.0 / static_cast<double>(k - 1);
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      pairs.push_back({i == k - 1 ? 1.0 : static_cast<double>(i) * step,
                       j == k - 1 ? 1.0 : static_cast<double>(j) * step});
    }
  }
  return pairs;
}

std::vector<PointPair> random_pairs(std::size_t count, std::uint64_t seed) {
  rng::Stream stream(rng::derive_key(seed, rng::kTagPairs));
  std::vector<PointPair> pairs(count);
  for (auto& p : pairs) {
    p.u = stream.uniform();
    p.v = stream.uniform();
  }
  return pairs;
}

HolderConstants::HolderConstants(double alpha, double c) : alpha_(alpha), c_(c) {
  if (!(alpha > 0.0) || !(c > 0.0)) throw DomainError("Hoelder constants must be positive");
}

double HolderConstants::network_distance_bound(double codegree_distance) const {
  return 2.0 * std::pow(c_, 1.0 / (2.0 + 4.0 * alpha_)) *
         std::pow(codegree_distance, alpha_ / (1.0 + 2.0 * alpha_));
}

std::size_t LemmaReport::violations() const {
  return static_cast<std::size_t>(
      std::count_if(rows.begin(), rows.end(), [](const PairCheck& r) { return !r.pass; }));
}

std::vector<double> LemmaReport::tightness_quantiles() const {
  std::vector<double> ratios;
  for (const auto& r : rows) {
    if (r.d > 0.0) ratios.push_back(r.delta / r.d);
  }
  if (ratios.empty()) return {};
  std::sort(ratios.begin(), ratios.end());
  std::vector<double> out;
  for (double q : {0.0, 0.25, 0.5, 0.75, 1.0}) {
    const auto idx = static_cast<std::size_t>(std::lround(q * static_cast<double>(ratios.size() - 1)));
    out.push_back(ratios[idx]);
  }
  return out;
}

namespace {

// Distances for every pair, sharing profile computations across repeated
// endpoints.
std::vector<PairCheck> pair_distances(const GraphonSpec& spec, const std::vector<PointPair>& pairs,
                                      const QuadratureGrid& grid) {
  std::map<double, Eigen::Index> index;
  std::vector<double> points;
  for (const auto& p : pairs) {
    for (double x : {p.u, p.v}) {
      if (!(x >= 0.0 && x <= 1.0)) throw DomainError("pair endpoint outside [0,1]");
      if (index.emplace(x, static_cast<Eigen::Index>(points.size())).second) points.push_back(x);
    }
  }
  const ProfileTable table(spec, grid);
  const Eigen::MatrixXd links = table.link_profiles(points);
  const Eigen::MatrixXd codegrees = table.codegree_profiles(points);

  std::vector<PairCheck> rows(pairs.size());
  const auto count = static_cast<std::ptrdiff_t>(pairs.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t k = 0; k < count; ++k) {
    const auto& p = pairs[static_cast<std::size_t>(k)];
    const Eigen::Index a = index.at(p.u);
    const Eigen::Index b = index.at(p.v);
    PairCheck& row = rows[static_cast<std::size_t>(k)];
    row.index = static_cast<std::size_t>(k);
    row.u = p.u;
    row.v = p.v;
    row.delta = table.row_distance(codegrees, a, b);
    row.d = table.row_distance(links, a, b);
  }
  return rows;
}

}  // namespace

LemmaReport verify_lemma1(const GraphonSpec& spec, const std::vector<PointPair>& pairs,
                          const QuadratureGrid& grid, double tol) {
  LemmaReport report;
  report.check = LemmaCheck::Lemma1;
  report.tolerance = tol;
  report.rows = pair_distances(spec, pairs, grid);
  for (auto& row : report.rows) {
    row.bound = row.d;
    row.pass = row.delta <= row.d + tol;
  }
  return report;
}

LemmaReport verify_lemmaA1(const GraphonSpec& spec, std::optional<HolderConstants> constants,
                           const std::vector<PointPair>& pairs, const QuadratureGrid& grid,
                           double tol) {
  LemmaReport report;
  report.check = LemmaCheck::LemmaA1;
  report.tolerance = tol;
  if (!constants || (spec.piecewise_constant() && spec.cells() >= 2)) {
    report.certified = false;
    return report;
  }
  report.constants = constants;
  report.rows = pair_distances(spec, pairs, grid);
  for (auto& row : report.rows) {
    row.bound = constants->network_distance_bound(row.delta);
    row.pass = row.d <= row.bound + tol;
  }
  return report;
}

std::optional<HolderConstants> holder_constants(const GraphonSpec& spec,
                                                std::size_t search_grid_resolution) {
  if (std::holds_alternative<GridGraphon>(spec.variant())) {
    throw UnsupportedError("holder_constants: grid graphons are not supported");
  }
  if (spec.cells() >= 2) return std::nullopt;
  const std::size_t r = search_grid_resolution;
  if (r < 2) throw DomainError("holder_constants: search grid resolution must be >= 2");

  const std::size_t points = r + 1;
  std::vector<double> x(points);
  for (std::size_t k = 0; k < points; ++k) x[k] = static_cast<double>(k) / static_cast<double>(r);

  // sup over sampled t of |f(u,t) - f(v,t)|, per (u,v).
  std::vector<double> table(points * points);
  for (std::size_t a = 0; a < points; ++a) {
    for (std::size_t t = 0; t < points; ++t) table[a * points + t] = spec(x[a], x[t]);
  }
  std::vector<double> sup(points * points, 0.0);
  const auto np = static_cast<std::ptrdiff_t>(points);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t a = 0; a < np; ++a) {
    for (std::size_t b = 0; b < points; ++b) {
      double m = 0.0;
      for (std::size_t t = 0; t < points; ++t) {
        m = std::max(m, std::abs(table[static_cast<std::size_t>(a) * points + t] - table[b * points + t]));
      }
      sup[static_cast<std::size_t>(a) * points + b] = m;
    }
  }

  // measure[u][k]: sampled measure of S(u, k/r), as a count of grid points / r.
  std::vector<double> measure(points * r);
  for (std::size_t a = 0; a < points; ++a) {
    std::vector<double> row(sup.begin() + static_cast<std::ptrdiff_t>(a * points),
                            sup.begin() + static_cast<std::ptrdiff_t>((a + 1) * points));
    std::sort(row.begin(), row.end());
    for (std::size_t k = 1; k <= r; ++k) {
      const double eps = x[k];
      const auto count = static_cast<double>(std::upper_bound(row.begin(), row.end(), eps) - row.begin());
      measure[a * r + (k - 1)] = std::min(1.0, count / static_cast<double>(r));
    }
  }

  constexpr double kMaxC = 1024.0;
  for (double alpha : {1.0, 1.0 / 2.0, 1.0 / 3.0, 1.0 / 4.0}) {
    double worst = 0.0;
    for (std::size_t a = 0; a < points; ++a) {
      for (std::size_t k = 1; k <= r; ++k) {
        worst = std::max(worst, x[k] / std::pow(measure[a * r + (k - 1)], alpha));
      }
    }
    double c = 1.0;
    while (c < 2.0 * worst && c <= kMaxC) c *= 2.0;
    if (c <= kMaxC) return HolderConstants(alpha, c);
  }
  return std::nullopt;
}

}  // namespace netreg
