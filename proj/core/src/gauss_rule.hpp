#pragma once

#include <vector>

namespace symkor::detail {

struct Rule1D {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Gauss-Legendre rule with `points` nodes mapped onto [a, b]. 1 <= points <= 32.
Rule1D gauss_legendre(int points, double a, double b);

/// Composite rule: `points` Gauss nodes on every interval between consecutive breakpoints.
Rule1D composite_gauss(const std::vector<double>& breakpoints, int points);

}  // namespace symkor::detail
