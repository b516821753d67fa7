#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace symkor {

/// A function on [0,1]^d with the derivative data needed by the sparse-grid
/// and norm routines. grad writes d partial derivatives into its output span.
/// mixed2 is the full mixed derivative d^{2d} f / dx_1^2 ... dx_d^2 and may be
/// empty for targets that cannot provide it.
struct TargetFunction {
  std::string name;
  int d = 1;
  std::function<double(std::span<const double>)> eval;
  std::function<void(std::span<const double>, std::span<double>)> grad;
  std::function<double(std::span<const double>)> mixed2;
  std::optional<double> seminorm_2_2;  ///< analytic |f|_{2,2}
  std::optional<double> energy_norm;   ///< analytic ||f||_E

  std::vector<double> gradient(std::span<const double> x) const {
    std::vector<double> g(static_cast<std::size_t>(d));
    grad(x, g);
    return g;
  }
};

/// Built-in symmetric corpus:
///   prod_sine       prod_j sin(pi x_j)
///   prod_quadratic  prod_j x_j (1 - x_j)
///   mixed_poly      prod_j x_j (1 - x_j) * (1 + sum_j x_j)
///   zero            the zero function
/// All vanish on the boundary of the unit cube. For mixed_poly,
///   |f|_{2,2} = 2^{d-1} sqrt(d^2 + 7d + 4)
/// since its mixed derivative is (-2)^{d-1} (-2 + sum_j (2 - 6 x_j)).
/// Throws std::invalid_argument for unknown names or d outside [1, 16].
TargetFunction builtin_target(std::string_view name, int d);

std::vector<std::string> builtin_target_names();

}  // namespace symkor
