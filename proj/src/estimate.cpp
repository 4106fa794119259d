#include "netreg/estimate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Dense>

#include "netreg/errors.hpp"

namespace netreg {

std::string to_string(KernelKind kind) {
  return kind == KernelKind::Boxcar ? "boxcar" : "smooth_bump";
}

KernelKind parse_kernel_kind(const std::string& name) {
  if (name == "boxcar") return KernelKind::Boxcar;
  if (name == "smooth_bump") return KernelKind::SmoothBump;
  throw ConfigError("unknown kernel '" + name + "' (expected boxcar or smooth_bump)");
}

void KernelSpec::validate() const {
  if (!(bandwidth > 0.0) || !std::isfinite(bandwidth)) {
    throw DomainError("kernel bandwidth must be positive and finite");
  }
  if (!(gamma_rate > 0.0)) throw DomainError("kernel gamma_rate must be positive");
}

double kernel_eval(KernelKind kind, double u) {
  if (!(u >= 0.0)) throw DomainError("kernel argument must be nonnegative");
  if (u >= 1.0) return 0.0;
  if (kind == KernelKind::Boxcar) return 1.0;
  return std::exp(1.0 - 1.0 / (1.0 - u));
}

namespace {

void check_dimensions(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                      const CodegreeDistanceMatrix& delta) {
  const auto n = static_cast<std::size_t>(x.rows());
  if (static_cast<std::size_t>(y.size()) != n || delta.size() != n) {
    throw DomainError("estimation inputs disagree on the number of agents");
  }
  if (x.cols() == 0) throw DomainError("estimation needs at least one covariate");
}

// Weight of pair (i,j); the squared distance is divided by h.
inline double pair_weight(KernelKind kind, double distance, double bandwidth) {
  return kernel_eval(kind, distance * distance / bandwidth);
}

double min_share(const CodegreeDistanceMatrix& delta, KernelKind kind, double bandwidth) {
  const auto n = static_cast<std::ptrdiff_t>(delta.size());
  double lowest = std::numeric_limits<double>::infinity();
#pragma omp parallel for schedule(static) reduction(min : lowest)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    double acc = 0.0;
    for (std::ptrdiff_t j = 0; j < n; ++j) {
      if (j != i) {
        acc += pair_weight(kind, delta(static_cast<std::size_t>(i), static_cast<std::size_t>(j)), bandwidth);
      }
    }
    lowest = std::min(lowest, acc / static_cast<double>(n - 1));
  }
  return lowest;
}

}  // namespace

BetaFit beta_hat(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                 const CodegreeDistanceMatrix& delta, const KernelSpec& kernel) {
  check_dimensions(x, y, delta);
  kernel.validate();
  const auto n = static_cast<std::ptrdiff_t>(x.rows());
  const auto k = static_cast<std::ptrdiff_t>(x.cols());
  const std::ptrdiff_t stride = k * k + k;

  using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  const RowMatrix xr = x;

  // One partial sum per row i (over j > i), reduced afterwards in row order
  // so the result does not depend on the thread schedule.
  std::vector<double> partial(static_cast<std::size_t>(n * stride), 0.0);
  std::vector<std::size_t> row_pairs(static_cast<std::size_t>(n), 0);
#pragma omp parallel
  {
    std::vector<double> dx(static_cast<std::size_t>(k));
#pragma omp for schedule(dynamic, 16)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
      double* acc = partial.data() + i * stride;
      const double* xi = xr.data() + i * k;
      std::size_t used = 0;
      for (std::ptrdiff_t j = i + 1; j < n; ++j) {
        const double w = pair_weight(kernel.kind, delta(static_cast<std::size_t>(i), static_cast<std::size_t>(j)),
                                     kernel.bandwidth);
        if (w <= 0.0) continue;
        ++used;
        const double* xj = xr.data() + j * k;
        const double dy = y[i] - y[j];
        for (std::ptrdiff_t a = 0; a < k; ++a) dx[static_cast<std::size_t>(a)] = xi[a] - xj[a];
        for (std::ptrdiff_t a = 0; a < k; ++a) {
          const double wa = w * dx[static_cast<std::size_t>(a)];
          for (std::ptrdiff_t b = 0; b < k; ++b) acc[a * k + b] += wa * dx[static_cast<std::size_t>(b)];
          acc[k * k + a] += wa * dy;
        }
      }
      row_pairs[static_cast<std::size_t>(i)] = used;
    }
  }

  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(k, k);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(k);
  BetaFit fit;
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const double* acc = partial.data() + i * stride;
    for (std::ptrdiff_t a = 0; a < k; ++a) {
      for (std::ptrdiff_t b = 0; b < k; ++b) gram(a, b) += acc[a * k + b];
      rhs[a] += acc[k * k + a];
    }
    fit.effective_pairs += row_pairs[static_cast<std::size_t>(i)];
  }

  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram, Eigen::EigenvaluesOnly);
  const double largest = eig.eigenvalues().maxCoeff();
  const double smallest = eig.eigenvalues().minCoeff();
  const double rcond = largest > 0.0 ? std::max(smallest, 0.0) / largest : 0.0;
  if (fit.effective_pairs == 0 || rcond < kMinReciprocalCondition) {
    throw SingularSystemError(
        "bandwidth too small / insufficient matched variation: weighted design has reciprocal "
        "condition " + std::to_string(rcond) + " over " + std::to_string(fit.effective_pairs) +
            " weighted pairs; raise the bandwidth",
        rcond);
  }
  fit.condition_number = largest / smallest;
  fit.beta = gram.ldlt().solve(rhs);
  return fit;
}

BetaFit beta_hat(const Sample& sample, const CodegreeDistanceMatrix& delta,
                 const KernelSpec& kernel) {
  return beta_hat(sample.x, sample.y, delta, kernel);
}

Eigen::VectorXd lambda_hat(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                           const CodegreeDistanceMatrix& delta, const KernelSpec& kernel,
                           const Eigen::VectorXd& beta) {
  check_dimensions(x, y, delta);
  kernel.validate();
  if (beta.size() != x.cols()) throw DomainError("lambda_hat: beta length differs from covariates");
  const Eigen::VectorXd residual = y - x * beta;
  const auto n = static_cast<std::ptrdiff_t>(x.rows());
  Eigen::VectorXd out(n);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    double num = 0.0;
    double den = 0.0;
    for (std::ptrdiff_t t = 0; t < n; ++t) {
      const double w = pair_weight(kernel.kind, delta(static_cast<std::size_t>(i), static_cast<std::size_t>(t)),
                                   kernel.bandwidth);
      num += w * residual[t];
      den += w;
    }
    out[i] = num / den;  // den >= K(0) > 0 through t = i
  }
  return out;
}

Eigen::VectorXd lambda_hat(const Sample& sample, const CodegreeDistanceMatrix& delta,
                           const KernelSpec& kernel, const Eigen::VectorXd& beta) {
  return lambda_hat(sample.x, sample.y, delta, kernel, beta);
}

BandwidthDiagnostic bandwidth_diagnostic(const CodegreeDistanceMatrix& delta,
                                         const KernelSpec& kernel) {
  kernel.validate();
  const auto n = static_cast<std::ptrdiff_t>(delta.size());
  if (n < 2) throw DomainError("bandwidth diagnostic needs at least two agents");
  BandwidthDiagnostic diag;
  diag.r_hat.resize(n);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    double acc = 0.0;
    for (std::ptrdiff_t j = 0; j < n; ++j) {
      if (j != i) {
        acc += pair_weight(kernel.kind, delta(static_cast<std::size_t>(i), static_cast<std::size_t>(j)),
                           kernel.bandwidth);
      }
    }
    diag.r_hat[i] = acc / static_cast<double>(n - 1);
  }
  diag.r_bar = diag.r_hat.mean();
  diag.r_min = diag.r_hat.minCoeff();
  diag.rate_threshold = std::pow(static_cast<double>(n), -kernel.gamma_rate / 4.0);
  diag.meets_rate = diag.r_min > diag.rate_threshold;
  return diag;
}

const std::vector<double>& bandwidth_grid() {
  static const std::vector<double> grid = [] {
    std::vector<double> g;
    for (int k = 0; k <= 120; ++k) g.push_back(std::pow(10.0, -10.0 + static_cast<double>(k) / 10.0));
    return g;
  }();
  return grid;
}

BandwidthChoice select_bandwidth(const CodegreeDistanceMatrix& delta, KernelKind kind,
                                 double gamma_rate, double target) {
  if (!(target > 0.0 && target <= 1.0)) throw DomainError("target share must lie in (0,1]");
  if (!(gamma_rate > 0.0)) throw DomainError("gamma_rate must be positive");
  if (delta.size() < 2) throw DomainError("bandwidth selection needs at least two agents");
  const auto& grid = bandwidth_grid();

  // min_i r_hat is nondecreasing in h, so bisect on the grid index.
  const double best = min_share(delta, kind, grid.back());
  if (best < target) {
    throw TargetUnreachableError("no bandwidth on the grid reaches min r_hat >= " +
                                     std::to_string(target) + "; best achieved " + std::to_string(best),
                                 best);
  }
  std::size_t lo = 0;
  std::size_t hi = grid.size() - 1;  // invariant: grid[hi] reaches the target
  double hi_share = best;
  if (const double first = min_share(delta, kind, grid.front()); first >= target) {
    hi = 0;
    hi_share = first;
  } else {
    while (hi - lo > 1) {
      const std::size_t mid = lo + (hi - lo) / 2;
      const double share = min_share(delta, kind, grid[mid]);
      if (share >= target) {
        hi = mid;
        hi_share = share;
      } else {
        lo = mid;
      }
    }
  }
  BandwidthChoice choice;
  choice.bandwidth = grid[hi];
  choice.r_min = hi_share;
  choice.rate_threshold = std::pow(static_cast<double>(delta.size()), -gamma_rate / 4.0);
  choice.meets_rate = hi_share > choice.rate_threshold;
  return choice;
}

EstimationResult estimate(const Sample& sample, const CodegreeDistanceMatrix& delta,
                          const KernelSpec& kernel) {
  const BetaFit fit = beta_hat(sample, delta, kernel);
  const BandwidthDiagnostic diag = bandwidth_diagnostic(delta, kernel);
  EstimationResult result;
  result.beta_hat = fit.beta;
  result.lambda_hat = lambda_hat(sample, delta, kernel, fit.beta);
  result.kernel = kernel;
  result.effective_pairs = fit.effective_pairs;
  result.r_hat = diag.r_hat;
  result.r_bar = diag.r_bar;
  result.r_min = diag.r_min;
  result.rate_threshold = diag.rate_threshold;
  result.condition_number = fit.condition_number;
  return result;
}

}  // namespace netreg
