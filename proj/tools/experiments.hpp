#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "symkor/interpolant.hpp"
#include "symkor/multiindex.hpp"
#include "symkor/quadrature.hpp"
#include "symkor/targets.hpp"

namespace symkor::experiments {

/// Bad flags or out-of-range values; maps to exit code 2.
struct UsageError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct Config {
  std::string command;
  int d = 2;
  int d_max = 0;  ///< 0: same as d
  int n_min = 1;
  int n_max = 4;
  std::string target = "prod_sine";
  double delta = 0.0;          ///< <= 0: default_delta of the index set
  std::string quad = "auto";   ///< auto | tensor | low_discrepancy
  std::uint64_t quad_samples = 1 << 16;
  std::vector<std::uint64_t> samples{100, 1000, 10000};  ///< M schedule for gradient-fit
  double noise = 0.0;
  std::uint64_t seed = 0;
  int seeds = 1;
  bool fit_interpolant = false;
  std::string out;

  int last_d() const { return d_max > 0 ? d_max : d; }
  /// Throws UsageError.
  void validate() const;
  nlohmann::json to_json() const;
};

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> footer;  ///< emitted as '#'-prefixed lines

  std::string to_csv() const;
};

struct Outcome {
  Table table;
  nlohmann::json report;
  std::vector<std::string> failures;
  bool ok() const { return failures.empty(); }
};

Outcome run_counts(const Config& cfg);
Outcome run_rates(const Config& cfg);
Outcome run_net_verify(const Config& cfg);
Outcome run_gradient_fit(const Config& cfg);

/// Writes <out> (CSV) and <out>.json (config, report, failures). Empty out
/// prints the CSV to stdout and skips the sidecar.
void write_outputs(const Config& cfg, const Outcome& outcome);

/// Quadrature used by the experiments for objects refined up to finest_level.
QuadratureSpec experiment_quadrature(const Config& cfg, int d, int finest_level);

/// Least-squares fit of the outer coefficients of the symmetric basis to
/// gradient samples: minimizes sum_j |sum_k c_k grad psi_k(x_j) - y_j|^2.
struct GradientFit {
  std::optional<SurplusTable> table;  ///< empty when the design is rank-deficient
  std::size_t rank = 0;
  std::size_t basis_size = 0;
  double empirical_loss = 0.0;  ///< mean over samples of the squared residual norm
};
GradientFit fit_gradient(const IndexSetSpec& spec, const std::vector<std::vector<double>>& x,
                         const std::vector<std::vector<double>>& y);

/// Uniform points and noisy gradients y = grad f(x) + U[-noise, noise]^d.
void draw_gradient_samples(const TargetFunction& f, std::size_t M, double noise, std::uint64_t seed,
                           std::vector<std::vector<double>>& x, std::vector<std::vector<double>>& y);

std::string format_double(double v);

}  // namespace symkor::experiments
