#pragma once

#include <cmath>

namespace plvote {

// Logistic sigmoid with inverse temperature beta. Branches on the sign of
// beta*x so the exponential never overflows.
inline double sigma(double beta, double x) {
  const double z = beta * x;
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

// beta * sigma(x) * (1 - sigma(x)), with 1 - sigma(x) taken as sigma(-x) to
// keep relative precision in the tails.
inline double sigma_derivative(double beta, double x) {
  return beta * sigma(beta, x) * sigma(beta, -x);
}

/// (1+e^-b)/(1-e^-b), the factor shared by every tournament bound.
inline double coth_half(double beta) {
  return (1.0 + std::exp(-beta)) / -std::expm1(-beta);
}

}  // namespace plvote
