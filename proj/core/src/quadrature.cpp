#include "symkor/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <random>
#include <sstream>
#include <stdexcept>

#include <boost/random/sobol.hpp>

#include "gauss_rule.hpp"

namespace symkor {
namespace {

constexpr double kMaxTensorNodes = 4e8;

std::vector<std::vector<double>> merge_breakpoints(const Field& a, const Field& b) {
  std::vector<std::vector<double>> out(static_cast<std::size_t>(a.dim));
  for (std::size_t s = 0; s < out.size(); ++s) {
    if (s < a.breakpoints.size()) out[s] = a.breakpoints[s];
    if (s < b.breakpoints.size()) out[s].insert(out[s].end(), b.breakpoints[s].begin(), b.breakpoints[s].end());
  }
  return out;
}

Integral integrate_tensor(int d, const std::vector<std::vector<double>>& breakpoints,
                          const QuadratureSpec& spec, int K,
                          const std::function<void(std::span<const double>, std::span<double>)>& fn) {
  const std::size_t dd = static_cast<std::size_t>(d);
  std::vector<detail::Rule1D> axes(dd);
  double total_nodes = 1.0;
  for (std::size_t s = 0; s < dd; ++s) {
    const int cells = 1 << spec.cell_level;
    std::vector<double> cuts;
    for (int c = 0; c <= cells; ++c) cuts.push_back(static_cast<double>(c) / cells);
    if (s < breakpoints.size()) {
      for (double b : breakpoints[s]) {
        if (b > 0.0 && b < 1.0) cuts.push_back(b);
      }
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    axes[s] = detail::composite_gauss(cuts, spec.points_per_cell_per_axis);
    total_nodes *= static_cast<double>(axes[s].nodes.size());
  }
  if (total_nodes > kMaxTensorNodes) {
    throw std::invalid_argument("tensor quadrature: too many nodes; use low-discrepancy mode");
  }

  std::vector<double> acc(static_cast<std::size_t>(K), 0.0), vals(static_cast<std::size_t>(K));
  std::vector<std::size_t> pos(dd, 0);
  std::vector<double> x(dd);
  while (true) {
    double w = 1.0;
    for (std::size_t s = 0; s < dd; ++s) {
      x[s] = axes[s].nodes[pos[s]];
      w *= axes[s].weights[pos[s]];
    }
    std::fill(vals.begin(), vals.end(), 0.0);
    fn(x, vals);
    for (int k = 0; k < K; ++k) acc[k] += w * vals[k];

    std::size_t s = 0;
    while (s < dd && pos[s] + 1 == axes[s].nodes.size()) pos[s++] = 0;
    if (s == dd) break;
    ++pos[s];
  }
  return {acc, {}};
}

Integral integrate_sobol(int d, const QuadratureSpec& spec, int K,
                         const std::function<void(std::span<const double>, std::span<double>)>& fn) {
  const std::size_t dd = static_cast<std::size_t>(d);
  const std::uint64_t per_shift = spec.sample_count / static_cast<std::uint64_t>(spec.shifts);
  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  std::vector<std::vector<double>> estimates(static_cast<std::size_t>(spec.shifts),
                                             std::vector<double>(static_cast<std::size_t>(K), 0.0));
  std::vector<double> shift(dd), x(dd), vals(static_cast<std::size_t>(K));
  for (int r = 0; r < spec.shifts; ++r) {
    for (auto& u : shift) u = unif(rng);
    boost::random::sobol engine(static_cast<std::size_t>(d));
    auto& est = estimates[r];
    for (std::uint64_t q = 0; q < per_shift; ++q) {
      for (std::size_t s = 0; s < dd; ++s) {
        const double p = static_cast<double>(engine() >> 11) * 0x1p-53;
        double y = p + shift[s];
        x[s] = y >= 1.0 ? y - 1.0 : y;
      }
      std::fill(vals.begin(), vals.end(), 0.0);
      fn(x, vals);
      for (int k = 0; k < K; ++k) est[k] += vals[k];
    }
    for (auto& v : est) v /= static_cast<double>(per_shift);
  }

  Integral out;
  out.mean.assign(static_cast<std::size_t>(K), 0.0);
  out.stderr_.assign(static_cast<std::size_t>(K), 0.0);
  const double R = spec.shifts;
  for (int k = 0; k < K; ++k) {
    double m = 0.0;
    for (const auto& e : estimates) m += e[k];
    m /= R;
    double var = 0.0;
    for (const auto& e : estimates) var += (e[k] - m) * (e[k] - m);
    var /= (R - 1.0);
    out.mean[k] = m;
    out.stderr_[k] = std::sqrt(var / R);
  }
  return out;
}

// Standard error of sqrt(q) from that of q (first-order propagation).
double root_stderr(double q, double se) { return q > 0.0 ? se / (2.0 * std::sqrt(q)) : std::sqrt(se); }

}  // namespace

std::string to_string(QuadratureMode m) {
  return m == QuadratureMode::TensorGaussPerCell ? "tensor" : "low_discrepancy";
}

QuadratureMode quadrature_mode_from_string(const std::string& s) {
  if (s == "tensor") return QuadratureMode::TensorGaussPerCell;
  if (s == "low_discrepancy" || s == "sobol") return QuadratureMode::LowDiscrepancy;
  throw std::invalid_argument("unknown quadrature mode: " + s);
}

void QuadratureSpec::validate() const {
  if (cell_level < 0 || cell_level > 20) throw std::invalid_argument("quadrature: cell_level must lie in [0, 20]");
  if (points_per_cell_per_axis < 1 || points_per_cell_per_axis > 32) {
    throw std::invalid_argument("quadrature: points per cell must lie in [1, 32]");
  }
  if (mode == QuadratureMode::LowDiscrepancy) {
    if (sample_count < 1000) throw std::invalid_argument("quadrature: sample_count must be at least 1000");
    if (shifts < 2 || sample_count / static_cast<std::uint64_t>(shifts) < 1) {
      throw std::invalid_argument("quadrature: need at least two shifts with samples each");
    }
  }
}

nlohmann::json QuadratureSpec::to_json() const {
  return {{"mode", to_string(mode)},
          {"cell_level", cell_level},
          {"points_per_cell_per_axis", points_per_cell_per_axis},
          {"sample_count", sample_count},
          {"shifts", shifts},
          {"seed", seed}};
}

QuadratureSpec QuadratureSpec::from_json(const nlohmann::json& j) {
  QuadratureSpec s;
  s.mode = quadrature_mode_from_string(j.at("mode").get<std::string>());
  s.cell_level = j.value("cell_level", s.cell_level);
  s.points_per_cell_per_axis = j.value("points_per_cell_per_axis", s.points_per_cell_per_axis);
  s.sample_count = j.value("sample_count", s.sample_count);
  s.shifts = j.value("shifts", s.shifts);
  s.seed = j.value("seed", s.seed);
  s.validate();
  return s;
}

QuadratureSpec default_quadrature(int d, int cell_level, int points) {
  QuadratureSpec s;
  s.cell_level = cell_level;
  s.points_per_cell_per_axis = points;
  if (d > 3 && cell_level * d > 24) s.mode = QuadratureMode::LowDiscrepancy;
  return s;
}

Integral integrate(int d, const std::vector<std::vector<double>>& breakpoints,
                   const QuadratureSpec& spec, int K,
                   const std::function<void(std::span<const double>, std::span<double>)>& fn) {
  spec.validate();
  if (d < 1) throw std::invalid_argument("integrate: dimension must be positive");
  if (spec.mode == QuadratureMode::TensorGaussPerCell) return integrate_tensor(d, breakpoints, spec, K, fn);
  return integrate_sobol(d, spec, K, fn);
}

Field make_field(const TargetFunction& f) {
  Field out;
  out.dim = f.d;
  out.eval = [f](std::span<const double> x) {
    ValueGrad vg;
    vg.value = f.eval(x);
    vg.grad.assign(x.size(), 0.0);
    f.grad(x, vg.grad);
    return vg;
  };
  return out;
}

Field make_field(const SurplusTable& table) {
  Field out;
  out.dim = table.dim();
  out.finest_level = table.finest_level();
  auto shared = std::make_shared<const SurplusTable>(table);
  out.eval = [shared](std::span<const double> x) { return shared->evaluate(x); };
  return out;
}

Field make_field(const SqReluNet& net) {
  if (net.output_dim() != 1) throw std::invalid_argument("make_field: network output is not scalar");
  Field out;
  out.dim = net.input_dim();
  out.breakpoints = net.axis_breakpoints();
  auto shared = std::make_shared<const SqReluNet>(net);
  out.eval = [shared](std::span<const double> x) { return shared->evaluate(x); };
  return out;
}

Field zero_field(int d) {
  Field out;
  out.dim = d;
  out.eval = [d](std::span<const double>) {
    ValueGrad vg;
    vg.grad.assign(static_cast<std::size_t>(d), 0.0);
    return vg;
  };
  return out;
}

std::vector<ErrorReport> norm_diff(const Field& a, std::span<const Field> bs, const QuadratureSpec& spec) {
  int finest = a.finest_level;
  auto bps = std::vector<std::vector<double>>(static_cast<std::size_t>(a.dim));
  for (const auto& b : bs) {
    if (a.dim != b.dim || a.dim < 1) throw std::invalid_argument("norm_diff: dimension mismatch");
    finest = std::max(finest, b.finest_level);
    for (std::size_t s = 0; s < bps.size(); ++s) {
      if (s < b.breakpoints.size()) bps[s].insert(bps[s].end(), b.breakpoints[s].begin(), b.breakpoints[s].end());
    }
  }
  if (bs.empty()) return {};
  bps = merge_breakpoints(a, Field{a.dim, 0, bps, {}});
  if (spec.mode == QuadratureMode::TensorGaussPerCell && spec.cell_level < finest) {
    throw std::invalid_argument("norm_diff: cell_level is coarser than the fields' finest level");
  }
  const int K = 2 * static_cast<int>(bs.size());
  const auto I = integrate(a.dim, bps, spec, K, [&](std::span<const double> x, std::span<double> out) {
    const auto va = a.eval(x);
    for (std::size_t k = 0; k < bs.size(); ++k) {
      const auto vb = bs[k].eval(x);
      const double dv = va.value - vb.value;
      double g = 0.0;
      for (std::size_t s = 0; s < va.grad.size(); ++s) {
        const double dg = va.grad[s] - vb.grad[s];
        g += dg * dg;
      }
      out[2 * k] = dv * dv;
      out[2 * k + 1] = g;
    }
  });

  std::vector<ErrorReport> reports(bs.size());
  for (std::size_t k = 0; k < bs.size(); ++k) {
    ErrorReport& r = reports[k];
    r.spec = spec;
    const double l2sq = std::max(I.mean[2 * k], 0.0), esq = std::max(I.mean[2 * k + 1], 0.0);
    r.l2 = std::sqrt(l2sq);
    r.energy = std::sqrt(esq);
    r.h1 = std::sqrt(l2sq + esq);
    if (!I.stderr_.empty()) {
      ErrorReport::StdErr se;
      se.l2 = root_stderr(l2sq, I.stderr_[2 * k]);
      se.energy = root_stderr(esq, I.stderr_[2 * k + 1]);
      // shifts are shared, so the squared-H1 error bar is bounded by the sum
      se.h1 = root_stderr(l2sq + esq, I.stderr_[2 * k] + I.stderr_[2 * k + 1]);
      r.estimator_stderr = se;
    }
  }
  return reports;
}

ErrorReport norm_diff(const Field& a, const Field& b, const QuadratureSpec& spec) {
  return norm_diff(a, std::span<const Field>(&b, 1), spec).front();
}

double seminorm_2_2(const TargetFunction& f, const QuadratureSpec& spec) {
  if (!f.mixed2) throw std::invalid_argument("seminorm_2_2: target provides no mixed2");
  const auto I = integrate(f.d, {}, spec, 1, [&](std::span<const double> x, std::span<double> out) {
    const double v = f.mixed2(x);
    out[0] = v * v;
  });
  return std::sqrt(std::max(I.mean[0], 0.0));
}

nlohmann::json ErrorReport::to_json() const {
  nlohmann::json j{{"l2", l2}, {"energy", energy}, {"h1", h1}, {"quadrature", spec.to_json()}};
  if (estimator_stderr) {
    j["estimator_stderr"] = {{"l2", estimator_stderr->l2},
                             {"energy", estimator_stderr->energy},
                             {"h1", estimator_stderr->h1}};
  } else {
    j["estimator_stderr"] = nullptr;
  }
  return j;
}

std::string ErrorReport::csv_header() { return "l2,energy,h1,stderr_h1,quad_mode"; }

std::string ErrorReport::csv_row() const {
  std::ostringstream os;
  os << std::setprecision(17) << l2 << ',' << energy << ',' << h1 << ',';
  if (estimator_stderr) os << estimator_stderr->h1;
  os << ',' << to_string(spec.mode);
  return os.str();
}

}  // namespace symkor
