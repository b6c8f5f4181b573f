#pragma once

#include <vector>

namespace qfi {

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Gauss–Legendre rule of the given order on [-1, 1]; nodes ascending.
/// Rules are computed once per order and cached process-wide.
const QuadratureRule& gauss_legendre(int order);

/// Gauss–Legendre rule mapped to [a, b].
QuadratureRule gauss_legendre(int order, double a, double b);

}  // namespace qfi
