#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace netreg {

/// One coordinate of m(w) = E[x | w]: a + b*w + c*w^2.
struct MeanPolynomial {
  enum class Kind { Constant, Linear, Quadratic };

  Kind kind = Kind::Constant;
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;

  static MeanPolynomial constant(double a) { return {Kind::Constant, a, 0.0, 0.0}; }
  static MeanPolynomial linear(double a, double b) { return {Kind::Linear, a, b, 0.0}; }
  static MeanPolynomial quadratic(double a, double b, double c) {
    return {Kind::Quadratic, a, b, c};
  }

  double operator()(double w) const noexcept { return a + w * (b + w * c); }

  /// Closed-form integral over [0,1] under the uniform law.
  double mean() const noexcept { return a + b / 2.0 + c / 3.0; }
};

std::string to_string(MeanPolynomial::Kind kind);

/// Vector-valued covariate mean m: [0,1] -> R^k.
class CovariateMean {
 public:
  CovariateMean() = default;
  explicit CovariateMean(std::vector<MeanPolynomial> coords) : coords_(std::move(coords)) {}

  std::size_t dim() const noexcept { return coords_.size(); }
  const std::vector<MeanPolynomial>& coordinates() const noexcept { return coords_; }

  Eigen::VectorXd operator()(double w) const;
  double coordinate(std::size_t j, double w) const { return coords_[j](w); }

  /// m(w) . beta
  double dot(double w, const Eigen::VectorXd& beta) const;

 private:
  std::vector<MeanPolynomial> coords_;
};

}  // namespace netreg
