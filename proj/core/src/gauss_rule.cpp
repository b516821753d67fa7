#include "gauss_rule.hpp"

#include <boost/math/special_functions/legendre.hpp>

#include <array>
#include <stdexcept>

namespace symkor::detail {
namespace {

constexpr int kMaxPoints = 32;

// Reference rule on [-1, 1]; legendre_p_zeros returns the non-negative roots.
Rule1D reference_rule(int n) {
  const auto half = boost::math::legendre_p_zeros<double>(n);
  Rule1D r;
  for (double x : half) {
    const double dp = boost::math::legendre_p_prime(n, x);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    r.nodes.push_back(x);
    r.weights.push_back(w);
    if (x != 0.0) {
      r.nodes.push_back(-x);
      r.weights.push_back(w);
    }
  }
  return r;
}

const Rule1D& cached_rule(int n) {
  static const std::array<Rule1D, kMaxPoints + 1> table = [] {
    std::array<Rule1D, kMaxPoints + 1> t{};
    for (int k = 1; k <= kMaxPoints; ++k) t[k] = reference_rule(k);
    return t;
  }();
  return table[n];
}

}  // namespace

Rule1D gauss_legendre(int points, double a, double b) {
  if (points < 1 || points > kMaxPoints) {
    throw std::invalid_argument("Gauss rule size must lie in [1, 32]");
  }
  const Rule1D& ref = cached_rule(points);
  Rule1D out;
  out.nodes.resize(ref.nodes.size());
  out.weights.resize(ref.weights.size());
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  for (std::size_t k = 0; k < ref.nodes.size(); ++k) {
    out.nodes[k] = mid + half * ref.nodes[k];
    out.weights[k] = half * ref.weights[k];
  }
  return out;
}

Rule1D composite_gauss(const std::vector<double>& breakpoints, int points) {
  Rule1D out;
  for (std::size_t k = 0; k + 1 < breakpoints.size(); ++k) {
    if (!(breakpoints[k + 1] > breakpoints[k])) continue;
    const Rule1D piece = gauss_legendre(points, breakpoints[k], breakpoints[k + 1]);
    out.nodes.insert(out.nodes.end(), piece.nodes.begin(), piece.nodes.end());
    out.weights.insert(out.weights.end(), piece.weights.begin(), piece.weights.end());
  }
  return out;
}

}  // namespace symkor::detail
