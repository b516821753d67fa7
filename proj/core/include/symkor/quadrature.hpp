#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "symkor/interpolant.hpp"
#include "symkor/sqrelu_net.hpp"
#include "symkor/targets.hpp"

namespace symkor {

/// Anything with a value and an exact gradient on [0,1]^d. finest_level and
/// breakpoints describe where the field may fail to be smooth: on dyadic
/// hyperplanes of that level and on the listed per-axis coordinates.
struct Field {
  int dim = 0;
  int finest_level = 0;
  std::vector<std::vector<double>> breakpoints;
  std::function<ValueGrad(std::span<const double>)> eval;
};

Field make_field(const TargetFunction& f);
Field make_field(const SurplusTable& table);
Field make_field(const SqReluNet& net);
Field zero_field(int d);

enum class QuadratureMode { TensorGaussPerCell, LowDiscrepancy };

std::string to_string(QuadratureMode m);
QuadratureMode quadrature_mode_from_string(const std::string& s);

struct QuadratureSpec {
  QuadratureMode mode = QuadratureMode::TensorGaussPerCell;
  int cell_level = 0;                    ///< dyadic cells of width 2^-cell_level per axis
  int points_per_cell_per_axis = 3;      ///< Gauss-Legendre points, 1..32
  std::uint64_t sample_count = 1 << 14;  ///< low-discrepancy points over all shifts
  int shifts = 16;                       ///< random shifts for the error bar
  std::uint64_t seed = 0;

  /// Throws std::invalid_argument for out-of-range fields.
  void validate() const;
  nlohmann::json to_json() const;
  static QuadratureSpec from_json(const nlohmann::json& j);
};

/// Tensor rule for d <= 3, and for larger d while cell_level * d <= 24;
/// low-discrepancy sampling otherwise.
QuadratureSpec default_quadrature(int d, int cell_level, int points = 3);

struct ErrorReport {
  double l2 = 0.0;
  double energy = 0.0;
  double h1 = 0.0;
  struct StdErr {
    double l2 = 0.0;
    double energy = 0.0;
    double h1 = 0.0;
  };
  std::optional<StdErr> estimator_stderr;  ///< low-discrepancy mode only
  QuadratureSpec spec;

  nlohmann::json to_json() const;
  static std::string csv_header();
  std::string csv_row() const;
};

/// L2, energy and H1 norms of a - b on [0,1]^d.
ErrorReport norm_diff(const Field& a, const Field& b, const QuadratureSpec& spec);

/// norm_diff(a, b_k) for every k with one pass over the quadrature nodes.
std::vector<ErrorReport> norm_diff(const Field& a, std::span<const Field> bs, const QuadratureSpec& spec);

/// L2 norm of the mixed derivative D^(2,...,2) f. Throws when f has no mixed2.
double seminorm_2_2(const TargetFunction& f, const QuadratureSpec& spec);

/// Integral over [0,1]^d of the K-vector integrand fn(x, out). Returns means
/// and, in low-discrepancy mode, per-component standard errors across shifts.
struct Integral {
  std::vector<double> mean;
  std::vector<double> stderr_;
};
Integral integrate(int d, const std::vector<std::vector<double>>& breakpoints,
                   const QuadratureSpec& spec, int K,
                   const std::function<void(std::span<const double>, std::span<double>)>& fn);

}  // namespace symkor
