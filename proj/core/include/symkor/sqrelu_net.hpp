#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "symkor/interpolant.hpp"
#include "symkor/multiindex.hpp"
#include "symkor/symmetry.hpp"

namespace symkor {

/// sigma(x) = max(x, 0)^2
inline double sqrelu(double x) { return x > 0.0 ? x * x : 0.0; }

/// One affine map. Row-major weights of shape rows x cols.
struct Layer {
  int rows = 0;
  int cols = 0;
  std::vector<double> weights;
  std::vector<double> bias;

  double& w(int r, int c) { return weights[static_cast<std::size_t>(r) * cols + c]; }
  double w(int r, int c) const { return weights[static_cast<std::size_t>(r) * cols + c]; }
};

struct NetMetadata {
  int width = 0;              ///< largest hidden layer
  int depth = 0;              ///< number of hidden layers
  std::size_t params = 0;     ///< weights + biases over all affine maps
  std::size_t neurons = 0;    ///< hidden neurons
  bool operator==(const NetMetadata&) const = default;
};

/// Hidden neuron whose preactivation must stay nonnegative (the x and y
/// neurons of product blocks and the x neuron of identity blocks).
struct Probe {
  int layer = 0;
  int neuron = 0;
  bool operator==(const Probe&) const = default;
};

/// Alternating affine maps and sigma; no activation after the last map.
/// Immutable after construction.
class SqReluNet {
 public:
  SqReluNet() = default;
  /// Throws std::invalid_argument when the layer shapes do not chain.
  SqReluNet(int input_dim, std::vector<Layer> layers, std::vector<Probe> probes = {});

  int input_dim() const { return input_dim_; }
  int output_dim() const { return layers_.empty() ? input_dim_ : layers_.back().rows; }
  std::span<const Layer> layers() const { return layers_; }
  std::span<const Probe> probes() const { return probes_; }
  const NetMetadata& metadata() const { return meta_; }
  static NetMetadata compute_metadata(std::span<const Layer> layers);

  std::vector<double> forward(std::span<const double> x) const;
  /// Scalar output; throws when output_dim() != 1.
  double value(std::span<const double> x) const;
  /// Forward pass that throws std::domain_error when a probed preactivation
  /// falls below -tol.
  std::vector<double> forward_checked(std::span<const double> x, double tol = 1e-12) const;
  /// Smallest probed preactivation at x (+inf without probes).
  double min_probe(std::span<const double> x) const;
  /// Value and reverse-mode gradient of a scalar-output net.
  ValueGrad evaluate(std::span<const double> x) const;

  /// Kink locations of first-layer neurons that read a single input, per input axis.
  std::vector<std::vector<double>> axis_breakpoints() const;

  nlohmann::json to_json() const;
  static SqReluNet from_json(const nlohmann::json& doc);

 private:
  struct Sparse {
    std::vector<std::size_t> row_start;
    std::vector<int> col;
    std::vector<double> val;
  };
  void run(std::span<const double> x, std::vector<std::vector<double>>* pre,
           std::vector<double>& out) const;

  int input_dim_ = 0;
  std::vector<Layer> layers_;
  std::vector<Probe> probes_;
  std::vector<Sparse> sparse_;
  NetMetadata meta_;
};

/// Sum of scalar-output nets of equal depth and input dimension, realized as one
/// net by stacking hidden layers block-diagonally. Each summand is scaled.
SqReluNet parallel_sum(std::span<const SqReluNet> nets, std::span<const double> scale);

/// Exact product of d nonnegative inputs (binary tree of width-3 product
/// blocks after one mixed product/identity layer).
SqReluNet gadget_product_tree(int d);
/// S_delta(x) = (sigma(x) - sigma(x - delta)) / (2 delta); 0 < delta < 1.
SqReluNet gadget_s_delta(double delta);
/// h_delta(x) = S(x + 1 - delta) - 2 S(x) + S(x - 1 + delta); 0 < delta < 1.
SqReluNet gadget_h_delta(double delta);

/// Closed forms of the two gadgets above.
double s_delta(double delta, double x);
double h_delta(double delta, double x);

/// Architecture formulas the builders are checked against.
namespace arch {
int floor_log2(int d);
int product_tree_depth(int d);
int product_tree_width(int d);        ///< 2d - i with i = d - 2^floor(log2 d)
int product_tree_neurons(int d);      ///< (2d - i) + 3(k - 1)
int feature_width(int d);             ///< 6d: six sigma neurons per smoothed hat
int basis_depth(int d);               ///< floor(log2 d) + 2
/// Shared hat layer (6d^2) followed by D product trees.
int basis_width(int d, int D);
/// Width of one G_xi sub-network with its own hat layer: max(6d^2, tree width).
int subnet_width(int d);
/// Published values, kept for reporting next to the measured ones.
long long published_basis_width(int d);   ///< 3 d^3 (2^{d-1} - 1)
long long published_subnet_width(int d);  ///< 3 d^2
long long published_d_bound(int d);       ///< d 2^{d-1} - d + 1
}  // namespace arch

/// Smoothed hat hdelta((x - i h) / h) with h = 2^-l: support inside
/// [(i-1)h, (i+1)h], value 1 - 3 delta / 2 at the grid point. 0 < delta < 1.
double smoothed_hat(int level, int index, double delta, double x);
double smoothed_hat_slope(int level, int index, double delta, double x);

/// Depth-1 net x -> sum_j xi^{2^{j-1}} * smoothed_hat(l_j, i_j)(x) with 6d
/// sigma neurons. Throws std::invalid_argument for delta outside (0, 1), for
/// xi < 1, and when the feature fails the numeric nonnegativity check.
SqReluNet build_coordinate_feature(const LevelIndex& l, const OddIndex& i, int xi, double delta);

struct NetBuildReport {
  std::string basis_id;
  double delta = 0.0;
  /// sum_xi |a_xi| d(d+1) M_xi^{d-1} e_xi with e_xi the 1D H1 error of the
  /// smoothed feature and M_xi the larger of the two feature H1 norms.
  double claimed_h1_error_bound = 0.0;
  /// sum_xi |a_xi - round(a_xi)| * sup G_xi
  double rounding_perturbation = 0.0;
  /// machine epsilon * sum_xi |a_xi| * sup G_xi
  double cancellation_estimate = 0.0;
  std::optional<double> measured_h1_distance;
  std::optional<bool> support_ok;
  std::optional<double> max_symmetry_defect;

  nlohmann::json to_json() const;
};

/// Net realizing psi_{l,i} approximately: one shared hat layer, D product
/// trees over the features F_xi(x_s), combined with the rounded a_xi.
/// (l, i) must be canonical and coeffs must match d.
struct BasisNet {
  SqReluNet net;
  NetBuildReport report;
};
BasisNet build_sym_basis_net(const LevelIndex& l, const OddIndex& i, double delta,
                             const VandermondeCoefficients& coeffs);

/// One G_xi term with its own hat layer, scaled by scale.
SqReluNet build_g_xi_subnet(const LevelIndex& l, const OddIndex& i, int xi, double delta,
                            double scale);

struct FullNet {
  SqReluNet net;
  /// Sub-networks vbar * a_xi * G_xi whose outputs sum to net's output.
  std::vector<SqReluNet> decomposition;
  std::vector<NetBuildReport> reports;
};
/// Sum over table entries of vbar * basis net. Throws for non-symmetric
/// tables. An empty table yields a network with constant output 0.
/// with_decomposition=false skips building the per-term sub-networks.
FullNet assemble_full_net(const SurplusTable& table, double delta, bool with_decomposition = true);

/// 2^{-(n+6)} times the smallest mesh width 2^{-n}.
double default_delta(const IndexSetSpec& spec);

}  // namespace symkor
