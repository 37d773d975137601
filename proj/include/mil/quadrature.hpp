#pragma once

#include <vector>

namespace mil {

// Nodes and weights of a 1-D rule. Weights sum to the mass of the weight function.
struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Gauss-Hermite rule for the standard normal density: sum_i w_i f(x_i) ~= E f(z),
/// z ~ N(0,1). Exact for polynomials of degree <= 2n-1. Built by Golub-Welsch
/// on the probabilists' Jacobi matrix.
QuadratureRule gauss_hermite_normal(int n);

/// Gauss-Laguerre rule for the weight e^{-u} on [0, inf).
QuadratureRule gauss_laguerre(int n);

/// Composite Simpson rule on [a, b] with an even number of panels.
QuadratureRule simpson(double a, double b, int panels);

}  // namespace mil
