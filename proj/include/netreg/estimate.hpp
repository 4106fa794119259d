#pragma once

// Kernel-matched pairwise-difference estimator of beta and the
// Nadaraya-Watson-type estimator of lambda(w_i). Kernel weights are
// K(dhat_ij^2 / h): the kernel argument is the SQUARED codegree distance
// divided by the bandwidth.

#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "netreg/codegree.hpp"
#include "netreg/simulate.hpp"

namespace netreg {

enum class KernelKind {
  Boxcar,      // K(u) = 1 on [0,1)
  SmoothBump,  // K(u) = exp(1 - 1/(1-u)) on [0,1)
};

std::string to_string(KernelKind kind);
/// Accepts "boxcar" and "smooth_bump"; throws ConfigError otherwise.
KernelKind parse_kernel_kind(const std::string& name);

struct KernelSpec {
  KernelKind kind = KernelKind::Boxcar;
  double bandwidth = 1.0;
  /// Rate exponent used only by the bandwidth diagnostic threshold n^{-gamma/4}.
  double gamma_rate = 1.0;

  void validate() const;
};

/// K(u). Zero for u >= 1; DomainError for negative or NaN u.
double kernel_eval(KernelKind kind, double u);
inline double kernel_eval(const KernelSpec& k, double u) { return kernel_eval(k.kind, u); }

inline constexpr double kMinReciprocalCondition = 1e-12;

struct BetaFit {
  Eigen::VectorXd beta;
  std::size_t effective_pairs = 0;  // pairs i<j with positive weight
  double condition_number = 0.0;    // of the weighted design matrix
};

/// Weighted least squares over differenced pairs i<j. Throws
/// SingularSystemError when the reciprocal condition of the weighted design
/// is below 1e-12 (or no pair carries weight).
BetaFit beta_hat(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                 const CodegreeDistanceMatrix& delta, const KernelSpec& kernel);
BetaFit beta_hat(const Sample& sample, const CodegreeDistanceMatrix& delta,
                 const KernelSpec& kernel);

/// Per-agent kernel average of y_t - x_t beta over all t, including t = i.
Eigen::VectorXd lambda_hat(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                           const CodegreeDistanceMatrix& delta, const KernelSpec& kernel,
                           const Eigen::VectorXd& beta);
Eigen::VectorXd lambda_hat(const Sample& sample, const CodegreeDistanceMatrix& delta,
                           const KernelSpec& kernel, const Eigen::VectorXd& beta);

struct BandwidthDiagnostic {
  Eigen::VectorXd r_hat;  // (n-1)^-1 sum_{j != i} K(dhat_ij^2 / h)
  double r_bar = 0.0;
  double r_min = 0.0;
  double rate_threshold = 0.0;  // n^{-gamma/4}
  bool meets_rate = false;      // r_min > rate_threshold
};

BandwidthDiagnostic bandwidth_diagnostic(const CodegreeDistanceMatrix& delta,
                                         const KernelSpec& kernel);

/// Log-spaced bandwidth search grid, 10 points per decade on [1e-10, 1e2].
const std::vector<double>& bandwidth_grid();

struct BandwidthChoice {
  double bandwidth = 0.0;
  double r_min = 0.0;
  double rate_threshold = 0.0;
  bool meets_rate = false;
};

inline constexpr double kDefaultTargetR = 0.05;

/// Smallest grid bandwidth with min_i r_hat >= target. Throws
/// TargetUnreachableError (carrying the best achieved min r_hat) otherwise.
BandwidthChoice select_bandwidth(const CodegreeDistanceMatrix& delta, KernelKind kind,
                                 double gamma_rate, double target = kDefaultTargetR);

struct EstimationResult {
  Eigen::VectorXd beta_hat;
  Eigen::VectorXd lambda_hat;
  KernelSpec kernel;
  std::size_t effective_pairs = 0;
  Eigen::VectorXd r_hat;
  double r_bar = 0.0;
  double r_min = 0.0;
  double rate_threshold = 0.0;
  double condition_number = 0.0;
};

/// beta_hat, lambda_hat and the bandwidth diagnostic for a fixed kernel.
EstimationResult estimate(const Sample& sample, const CodegreeDistanceMatrix& delta,
                          const KernelSpec& kernel);

}  // namespace netreg
