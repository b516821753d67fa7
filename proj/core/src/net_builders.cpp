#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "gauss_rule.hpp"
#include "net_assembler.hpp"
#include "symkor/sqrelu_net.hpp"

namespace symkor {
namespace {

using detail::Affine;
using detail::Assembler;

constexpr int kMaxNetDim = 6;

// Shifts and output weights (times 1/(2 delta)) of the six sigma neurons of h_delta.
struct HatNeuron {
  double shift;
  double weight;
};
std::array<HatNeuron, 6> hat_neurons(double delta) {
  return {{{1.0 - delta, 1.0},
           {1.0 - 2.0 * delta, -1.0},
           {0.0, -2.0},
           {-delta, 2.0},
           {-1.0 + delta, 1.0},
           {-1.0, -1.0}}};
}

void require_feature_delta(double delta) {
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("delta must lie in (0, 1)");
  double lowest = 0.0;
  for (int k = 0; k <= 4000; ++k) lowest = std::min(lowest, h_delta(delta, -1.0 + k / 2000.0));
  if (lowest < -1e-14) {
    throw std::invalid_argument("delta too large: smoothed hat takes negative values");
  }
}

// Smoothed hat of factor (level, index) read from input `axis`; returns a form
// over the layer being built.
Affine hat_block(Assembler& a, int axis, int level, int index, double delta) {
  const double inv_h = std::ldexp(1.0, level);
  Affine out;
  for (const auto& n : hat_neurons(delta)) {
    Affine pre{{{axis, inv_h}}, -static_cast<double>(index) + n.shift};
    const int id = a.add_neuron(pre);
    out.terms.emplace_back(id, n.weight / (2.0 * delta));
  }
  return out;
}

struct Term {
  LevelIndex l;
  OddIndex i;
  std::vector<std::pair<int, double>> nodes;  // (xi, output coefficient)
};

// Shared hat layer per term, then one product tree per (term, xi).
SqReluNet assemble_terms(int d, const std::vector<Term>& terms, double delta) {
  Assembler a(d);
  std::vector<std::vector<Affine>> tree_inputs;
  std::vector<double> tree_coeffs;
  for (const auto& t : terms) {
    std::vector<std::vector<Affine>> hats(static_cast<std::size_t>(d));
    for (int s = 0; s < d; ++s) {
      for (int j = 0; j < d; ++j) hats[s].push_back(hat_block(a, s, t.l[j], t.i[j], delta));
    }
    for (const auto& [xi, coeff] : t.nodes) {
      // Features enter the product tree divided by W = sum_j xi^{2^{j-1}} so
      // every block input stays in [0, 1]; W^d moves to the output weight.
      double W = 0.0;
      for (int j = 0; j < d; ++j) W += node_weight(xi, j + 1).get_d();
      std::vector<Affine> features(static_cast<std::size_t>(d));
      for (int s = 0; s < d; ++s) {
        for (int j = 0; j < d; ++j) features[s].add(hats[s][j], node_weight(xi, j + 1).get_d() / W);
      }
      tree_inputs.push_back(std::move(features));
      tree_coeffs.push_back(coeff * std::pow(W, d));
    }
  }
  a.close_layer();
  const auto roots = detail::product_trees(a, tree_inputs);
  Affine out;
  for (std::size_t k = 0; k < roots.size(); ++k) out.add(roots[k], tree_coeffs[k]);
  return a.finish({out});
}

void require_net_pair(const LevelIndex& l, const OddIndex& i) {
  require_compatible(l, i);
  if (static_cast<int>(l.size()) > kMaxNetDim) {
    throw std::invalid_argument("network synthesis supports d <= 6");
  }
  if (!is_canonical(l, i)) throw std::invalid_argument("basis network needs a canonical (l, i)");
}

std::string basis_id(const LevelIndex& l, const OddIndex& i) {
  std::ostringstream os;
  os << "l=(";
  for (std::size_t j = 0; j < l.size(); ++j) os << (j ? "," : "") << l[j];
  os << ");i=(";
  for (std::size_t j = 0; j < i.size(); ++j) os << (j ? "," : "") << i[j];
  os << ")";
  return os.str();
}

struct FeatureNorms {
  double error = 0.0;  // H1([0,1]) distance between exact and smoothed feature
  double exact = 0.0;
  double smoothed = 0.0;
};

FeatureNorms feature_norms(const LevelIndex& l, const OddIndex& i, int xi, double delta) {
  const std::size_t d = l.size();
  std::vector<double> cuts{0.0, 1.0};
  for (std::size_t j = 0; j < d; ++j) {
    const double h = std::ldexp(1.0, -l[j]), c = i[j] * h;
    for (double t : {-1.0, -1.0 + delta, -1.0 + 2.0 * delta, 0.0, delta, 1.0 - delta, 1.0}) {
      cuts.push_back(c + t * h);
    }
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  const auto rule = detail::composite_gauss(cuts, 3);

  FeatureNorms out;
  for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
    const double x = rule.nodes[q];
    double fv = 0, fs = 0, gv = 0, gs = 0;
    for (std::size_t j = 0; j < d; ++j) {
      const double w = node_weight(xi, static_cast<int>(j) + 1).get_d();
      const auto hs = hat_1d(l[j], i[j], x);
      fv += w * hs.value;
      fs += w * hs.slope;
      gv += w * smoothed_hat(l[j], i[j], delta, x);
      gs += w * smoothed_hat_slope(l[j], i[j], delta, x);
    }
    const double wq = rule.weights[q];
    out.error += wq * ((fv - gv) * (fv - gv) + (fs - gs) * (fs - gs));
    out.exact += wq * (fv * fv + fs * fs);
    out.smoothed += wq * (gv * gv + gs * gs);
  }
  out.error = std::sqrt(out.error);
  out.exact = std::sqrt(out.exact);
  out.smoothed = std::sqrt(out.smoothed);
  return out;
}

NetBuildReport make_report(const LevelIndex& l, const OddIndex& i, double delta,
                           const VandermondeCoefficients& coeffs) {
  const int d = static_cast<int>(l.size());
  NetBuildReport r;
  r.basis_id = basis_id(l, i);
  r.delta = delta;
  const auto rounded = coeffs.rounded();
  for (std::size_t k = 0; k < coeffs.D(); ++k) {
    const int xi = static_cast<int>(k) + 1;
    const auto fn = feature_norms(l, i, xi, delta);
    const double M = std::max(fn.exact, fn.smoothed);
    r.claimed_h1_error_bound +=
        std::abs(rounded[k]) * d * (d + 1) * std::pow(M, d - 1) * fn.error;

    double weight_sum = 0.0;
    for (int j = 1; j <= d; ++j) weight_sum += node_weight(xi, j).get_d();
    const double sup_g = std::pow(weight_sum, d);
    const mpq_class err = coeffs.a[k] - mpq_class(rounded[k]);
    r.rounding_perturbation += std::abs(err.get_d()) * sup_g;
    r.cancellation_estimate +=
        std::numeric_limits<double>::epsilon() * std::abs(rounded[k]) * sup_g;
  }
  return r;
}

}  // namespace

double smoothed_hat(int level, int index, double delta, double x) {
  const double h = std::ldexp(1.0, -level);
  return h_delta(delta, (x - index * h) / h);
}

double smoothed_hat_slope(int level, int index, double delta, double x) {
  const double inv_h = std::ldexp(1.0, level);
  const double t = (x - index / inv_h) * inv_h;
  auto ds = [delta](double u) { return (std::max(u, 0.0) - std::max(u - delta, 0.0)) / delta; };
  return inv_h * (ds(t + 1.0 - delta) - 2.0 * ds(t) + ds(t - 1.0 + delta));
}

SqReluNet build_coordinate_feature(const LevelIndex& l, const OddIndex& i, int xi, double delta) {
  require_compatible(l, i);
  if (xi < 1) throw std::invalid_argument("feature node xi must be at least 1");
  require_feature_delta(delta);
  Assembler a(1);
  Affine out;
  for (std::size_t j = 0; j < l.size(); ++j) {
    out.add(hat_block(a, 0, l[j], i[j], delta), node_weight(xi, static_cast<int>(j) + 1).get_d());
  }
  a.close_layer();
  return a.finish({out});
}

nlohmann::json NetBuildReport::to_json() const {
  nlohmann::json j{{"basis_id", basis_id},
                   {"delta", delta},
                   {"claimed_h1_error_bound", claimed_h1_error_bound},
                   {"rounding_perturbation", rounding_perturbation},
                   {"cancellation_estimate", cancellation_estimate}};
  j["measured_h1_distance"] = measured_h1_distance ? nlohmann::json(*measured_h1_distance) : nlohmann::json(nullptr);
  j["support_ok"] = support_ok ? nlohmann::json(*support_ok) : nlohmann::json(nullptr);
  j["max_symmetry_defect"] = max_symmetry_defect ? nlohmann::json(*max_symmetry_defect) : nlohmann::json(nullptr);
  return j;
}

BasisNet build_sym_basis_net(const LevelIndex& l, const OddIndex& i, double delta,
                             const VandermondeCoefficients& coeffs) {
  require_net_pair(l, i);
  if (coeffs.d != static_cast<int>(l.size()) || coeffs.a.size() != coeffs.D()) {
    throw std::invalid_argument("Vandermonde coefficients do not match the dimension");
  }
  require_feature_delta(delta);
  const auto rounded = coeffs.rounded();
  Term t{l, i, {}};
  for (std::size_t k = 0; k < rounded.size(); ++k) t.nodes.emplace_back(static_cast<int>(k) + 1, rounded[k]);
  return {assemble_terms(static_cast<int>(l.size()), {t}, delta), make_report(l, i, delta, coeffs)};
}

SqReluNet build_g_xi_subnet(const LevelIndex& l, const OddIndex& i, int xi, double delta,
                            double scale) {
  require_net_pair(l, i);
  if (xi < 1) throw std::invalid_argument("feature node xi must be at least 1");
  require_feature_delta(delta);
  return assemble_terms(static_cast<int>(l.size()), {Term{l, i, {{xi, scale}}}}, delta);
}

FullNet assemble_full_net(const SurplusTable& table, double delta, bool with_decomposition) {
  if (!table.symmetric()) throw std::invalid_argument("assemble_full_net needs a symmetric table");
  const int d = table.dim();
  if (d > kMaxNetDim) throw std::invalid_argument("network synthesis supports d <= 6");
  require_feature_delta(delta);

  FullNet out;
  if (table.size() == 0) {
    Assembler a(d);
    for (int k = 0; k < arch::basis_depth(d); ++k) {
      a.add_neuron(Affine::constant(0.0));
      a.close_layer();
    }
    out.net = a.finish({Affine::constant(0.0)});
    return out;
  }

  const auto coeffs = vandermonde_coefficients(d);
  const auto rounded = coeffs.rounded();
  std::vector<Term> terms;
  for (const auto& e : table.entries()) {
    Term t{e.level, e.index, {}};
    for (std::size_t k = 0; k < rounded.size(); ++k) {
      t.nodes.emplace_back(static_cast<int>(k) + 1, e.coeff * rounded[k]);
      if (with_decomposition) {
        out.decomposition.push_back(
            build_g_xi_subnet(e.level, e.index, static_cast<int>(k) + 1, delta, e.coeff * rounded[k]));
      }
    }
    terms.push_back(std::move(t));
    out.reports.push_back(make_report(e.level, e.index, delta, coeffs));
  }
  out.net = assemble_terms(d, terms, delta);
  return out;
}

double default_delta(const IndexSetSpec& spec) {
  spec.validate();
  return std::ldexp(1.0, -(2 * spec.n + 6));
}

}  // namespace symkor
