#include "netreg/covariates.hpp"

namespace netreg {

std::string to_string(MeanPolynomial::Kind kind) {
  switch (kind) {
    case MeanPolynomial::Kind::Constant:
      return "constant";
    case MeanPolynomial::Kind::Linear:
      return "linear";
    case MeanPolynomial::Kind::Quadratic:
      return "quadratic";
  }
  return "constant";
}

Eigen::VectorXd CovariateMean::operator()(double w) const {
  Eigen::VectorXd out(static_cast<Eigen::Index>(coords_.size()));
  for (std::size_t j = 0; j < coords_.size(); ++j) out[static_cast<Eigen::Index>(j)] = coords_[j](w);
  return out;
}

double CovariateMean::dot(double w, const Eigen::VectorXd& beta) const {
  double acc = 0.0;
  for (std::size_t j = 0; j < coords_.size(); ++j) acc += coords_[j](w) * beta[static_cast<Eigen::Index>(j)];
  return acc;
}

}  // namespace netreg
