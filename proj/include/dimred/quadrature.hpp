// Gauss-Legendre rules and composite panel quadrature.
#pragma once

#include <functional>
#include <vector>

namespace dimred {

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// n-point Gauss-Legendre rule on [-1, 1] (Newton on the Legendre recurrence).
const QuadratureRule& gauss_legendre(int n);

/// Rule on [a, b] made of `panels` equal panels per interval between
/// consecutive breakpoints, each with an `order`-point Gauss rule.
QuadratureRule composite_rule(const std::vector<double>& breakpoints, int panels, int order);

double integrate(const std::function<double(double)>& f, const QuadratureRule& rule);

}  // namespace dimred
