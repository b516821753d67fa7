#include "symkor/targets.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "symkor/multiindex.hpp"

namespace symkor {
namespace {

using std::numbers::pi;

TargetFunction prod_sine(int d) {
  TargetFunction f;
  f.name = "prod_sine";
  f.d = d;
  f.eval = [](std::span<const double> x) {
    double v = 1.0;
    for (double xi : x) v *= std::sin(pi * xi);
    return v;
  };
  f.grad = [](std::span<const double> x, std::span<double> g) {
    const std::size_t n = x.size();
    for (std::size_t k = 0; k < n; ++k) {
      double v = pi * std::cos(pi * x[k]);
      for (std::size_t j = 0; j < n; ++j) {
        if (j != k) v *= std::sin(pi * x[j]);
      }
      g[k] = v;
    }
  };
  f.mixed2 = [](std::span<const double> x) {
    double v = 1.0;
    for (double xi : x) v *= -pi * pi * std::sin(pi * xi);
    return v;
  };
  f.seminorm_2_2 = std::pow(pi, 2.0 * d) * std::pow(2.0, -0.5 * d);
  f.energy_norm = pi * std::sqrt(d * std::pow(2.0, -d));
  return f;
}

TargetFunction prod_quadratic(int d) {
  TargetFunction f;
  f.name = "prod_quadratic";
  f.d = d;
  f.eval = [](std::span<const double> x) {
    double v = 1.0;
    for (double xi : x) v *= xi * (1.0 - xi);
    return v;
  };
  f.grad = [](std::span<const double> x, std::span<double> g) {
    const std::size_t n = x.size();
    for (std::size_t k = 0; k < n; ++k) {
      double v = 1.0 - 2.0 * x[k];
      for (std::size_t j = 0; j < n; ++j) {
        if (j != k) v *= x[j] * (1.0 - x[j]);
      }
      g[k] = v;
    }
  };
  f.mixed2 = [d](std::span<const double>) { return std::pow(-2.0, d); };
  f.seminorm_2_2 = std::pow(2.0, d);
  f.energy_norm = std::sqrt(d / 3.0 * std::pow(30.0, -(d - 1)));
  return f;
}

// Energy norm of prod_j g(x_j) (1 + sum_j x_j), g = x(1-x), from exact
// univariate moments:
//   A_k = int x^k g^2, B_k = int x^k g'^2, C1 = int x g g'.
double mixed_poly_energy(int d) {
  const double a0 = 1.0 / 30.0, a1 = 1.0 / 60.0, a2 = 1.0 / 105.0;
  const double b0 = 1.0 / 3.0, b1 = 1.0 / 6.0, b2 = 2.0 / 15.0;
  const double c1 = -1.0 / 60.0;
  const int m = d - 1;  // coordinates other than the differentiated one
  const double base = std::pow(a0, m);
  const double er = m >= 1 ? m * a1 * std::pow(a0, m - 1) : 0.0;
  const double er2 = (m >= 1 ? m * a2 * std::pow(a0, m - 1) : 0.0) +
                     (m >= 2 ? m * (m - 1) * a1 * a1 * std::pow(a0, m - 2) : 0.0);
  const double e1 = (b0 + 2.0 * b1 + b2) * base + 2.0 * (b0 + b1) * er + b0 * er2;
  const double e2 = 2.0 * c1 * base;
  const double e3 = std::pow(a0, d);
  return std::sqrt(d * (e1 + e2 + e3));
}

TargetFunction mixed_poly(int d) {
  TargetFunction f;
  f.name = "mixed_poly";
  f.d = d;
  f.eval = [](std::span<const double> x) {
    double p = 1.0, s = 1.0;
    for (double xi : x) {
      p *= xi * (1.0 - xi);
      s += xi;
    }
    return p * s;
  };
  f.grad = [](std::span<const double> x, std::span<double> g) {
    const std::size_t n = x.size();
    double s = 1.0, p = 1.0;
    for (double xi : x) {
      s += xi;
      p *= xi * (1.0 - xi);
    }
    for (std::size_t k = 0; k < n; ++k) {
      double rest = 1.0;
      for (std::size_t j = 0; j < n; ++j) {
        if (j != k) rest *= x[j] * (1.0 - x[j]);
      }
      g[k] = (1.0 - 2.0 * x[k]) * rest * s + p;
    }
  };
  f.mixed2 = [d](std::span<const double> x) {
    double w = -2.0;
    for (double xi : x) w += 2.0 - 6.0 * xi;
    return std::pow(-2.0, d - 1) * w;
  };
  f.seminorm_2_2 = std::pow(2.0, d - 1) * std::sqrt(static_cast<double>(d * d + 7 * d + 4));
  f.energy_norm = mixed_poly_energy(d);
  return f;
}

TargetFunction zero(int d) {
  TargetFunction f;
  f.name = "zero";
  f.d = d;
  f.eval = [](std::span<const double>) { return 0.0; };
  f.grad = [](std::span<const double>, std::span<double> g) { std::fill(g.begin(), g.end(), 0.0); };
  f.mixed2 = [](std::span<const double>) { return 0.0; };
  f.seminorm_2_2 = 0.0;
  f.energy_norm = 0.0;
  return f;
}

}  // namespace

TargetFunction builtin_target(std::string_view name, int d) {
  if (d < 1 || static_cast<std::size_t>(d) > kMaxDim) {
    throw std::invalid_argument("target dimension out of range");
  }
  if (name == "prod_sine") return prod_sine(d);
  if (name == "prod_quadratic") return prod_quadratic(d);
  if (name == "mixed_poly") return mixed_poly(d);
  if (name == "zero") return zero(d);
  throw std::invalid_argument("unknown target '" + std::string(name) + "'");
}

std::vector<std::string> builtin_target_names() {
  return {"prod_sine", "prod_quadratic", "mixed_poly", "zero"};
}

}  // namespace symkor
