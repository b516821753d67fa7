#include "experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include <Eigen/Dense>

#include "symkor/sqrelu_net.hpp"
#include "symkor/symmetry.hpp"

namespace symkor::experiments {
namespace {

constexpr int kMaxCountDim = 16;
constexpr int kMaxNetDim = 6;
// Budget (quadrature nodes x hidden neurons) for the optional network column.
constexpr double kNetColumnBudget = 2e9;

constexpr double kMaxDenseWeights = 2e7;

std::string fmt_u64(std::uint64_t v) { return std::to_string(v); }

// Dense size of the second affine map of the assembled net (the largest one):
// hat-layer neurons times first tree-layer neurons.
bool full_net_fits(const SurplusTable& table) {
  const int d = table.dim();
  const double D = static_cast<double>(vandermonde_coefficients(d).D());
  const double m = static_cast<double>(table.size());
  const double hats = m * 6.0 * d * d;
  const double trees = m * D * arch::product_tree_width(d);
  return hats * trees <= kMaxDenseWeights;
}

double tensor_node_count(int d, int cell_level, int points, const Field& a) {
  double total = 1.0;
  for (int s = 0; s < d; ++s) {
    double per_axis = static_cast<double>(1 << cell_level);
    if (static_cast<std::size_t>(s) < a.breakpoints.size()) per_axis += a.breakpoints[s].size();
    total *= per_axis * points;
  }
  return total;
}

double max_sym_mismatch(const SurplusTable& plain, const SurplusTable& sym, int d, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<double> x(static_cast<std::size_t>(d));
  double worst = 0.0;
  for (int k = 0; k < 1000; ++k) {
    for (auto& v : x) v = unif(rng);
    worst = std::max(worst, std::abs(plain.value(x) - sym.value(x)));
  }
  return worst;
}

// Points sampled uniformly among those outside the support of psi_{l,i}.
bool outside_support(const LevelIndex& l, const OddIndex& i, std::span<const double> x) {
  std::vector<int> tau(l.size());
  for (std::size_t k = 0; k < tau.size(); ++k) tau[k] = static_cast<int>(k);
  do {
    bool inside = true;
    for (std::size_t nu = 0; nu < l.size() && inside; ++nu) {
      const double h = std::ldexp(1.0, -l[nu]);
      const double t = x[tau[nu]];
      inside = t > (i[nu] - 1) * h && t < (i[nu] + 1) * h;
    }
    if (inside) return false;
  } while (std::next_permutation(tau.begin(), tau.end()));
  return true;
}

}  // namespace

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

void Config::validate() const {
  if (d < 1) throw UsageError("--d must be at least 1");
  if (d_max != 0 && d_max < d) throw UsageError("--d-max must not be below --d");
  const int cap = command == "counts" ? kMaxCountDim : kMaxNetDim;
  if (last_d() > cap) {
    throw UsageError("dimension cap exceeded: " + command + " supports d <= " + std::to_string(cap));
  }
  if (n_min < 1 || n_max < n_min) throw UsageError("need 1 <= --n-min <= --n-max");
  if (n_max > 20) throw UsageError("--n-max must not exceed 20");
  if (command != "counts") {
    const auto names = builtin_target_names();
    if (std::find(names.begin(), names.end(), target) == names.end()) {
      throw UsageError("unknown target '" + target + "'");
    }
  }
  if (delta >= 1.0) throw UsageError("--delta must lie in (0, 1)");
  if (quad != "auto" && quad != "tensor" && quad != "low_discrepancy") {
    throw UsageError("--quad must be auto, tensor or low_discrepancy");
  }
  if (quad_samples < 1000) throw UsageError("--quad-samples must be at least 1000");
  if (samples.empty()) throw UsageError("--samples needs at least one value");
  if (noise < 0.0) throw UsageError("--noise must be nonnegative");
  if (seeds < 1) throw UsageError("--seeds must be at least 1");
}

nlohmann::json Config::to_json() const {
  return {{"command", command}, {"d", d},         {"d_max", last_d()},
          {"n_min", n_min},     {"n_max", n_max}, {"target", target},
          {"delta", delta},     {"quad", quad},   {"quad_samples", quad_samples},
          {"samples", samples}, {"noise", noise}, {"seed", seed},
          {"seeds", seeds},     {"fit_interpolant", fit_interpolant}, {"out", out}};
}

std::string Table::to_csv() const {
  std::ostringstream os;
  for (std::size_t k = 0; k < header.size(); ++k) os << (k ? "," : "") << header[k];
  os << '\n';
  for (const auto& row : rows) {
    for (std::size_t k = 0; k < row.size(); ++k) os << (k ? "," : "") << row[k];
    os << '\n';
  }
  for (const auto& line : footer) os << "# " << line << '\n';
  return os.str();
}

void write_outputs(const Config& cfg, const Outcome& outcome) {
  const std::string csv = outcome.table.to_csv();
  if (cfg.out.empty()) {
    std::cout << csv;
    return;
  }
  std::ofstream f(cfg.out, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + cfg.out);
  f << csv;
  nlohmann::json side{{"config", cfg.to_json()},
                      {"columns", outcome.table.header},
                      {"report", outcome.report},
                      {"failures", outcome.failures}};
  std::ofstream j(cfg.out + ".json", std::ios::binary);
  if (!j) throw std::runtime_error("cannot open " + cfg.out + ".json");
  j << side.dump(2) << '\n';
}

QuadratureSpec experiment_quadrature(const Config& cfg, int d, int finest_level) {
  QuadratureSpec q = default_quadrature(d, finest_level, 3);
  if (cfg.quad == "tensor") q.mode = QuadratureMode::TensorGaussPerCell;
  if (cfg.quad == "low_discrepancy") q.mode = QuadratureMode::LowDiscrepancy;
  q.sample_count = cfg.quad_samples;
  q.seed = cfg.seed;
  return q;
}

Outcome run_counts(const Config& cfg) {
  cfg.validate();
  Outcome o;
  o.table.header = {"d", "n", "V_grid", "X_grid", "X_sym_grid", "X_sym_orbits", "bound", "bound_ok"};
  auto& rows = o.report["rows"] = nlohmann::json::array();
  for (int d = cfg.d; d <= cfg.last_d(); ++d) {
    for (int n = cfg.n_min; n <= cfg.n_max; ++n) {
      const IndexSetSpec V{IndexSetKind::TotalDegree, n, d}, X{IndexSetKind::EnergyBased, n, d};
      const auto v = count_grid_points(V, false);
      const auto x = count_grid_points(X, false);
      const auto xs = count_grid_points(X, true);
      const auto orbits = count_canonical_orbits(X);
      const double bound = energy_grid_count_bound(n, d);
      const bool ok = static_cast<double>(x) <= bound;
      if (!ok) o.failures.push_back("count bound violated at d=" + std::to_string(d) + " n=" + std::to_string(n));
      if (!(xs <= x && x <= v)) {
        o.failures.push_back("set inclusion violated at d=" + std::to_string(d) + " n=" + std::to_string(n));
      }
      o.table.rows.push_back({std::to_string(d), std::to_string(n), fmt_u64(v), fmt_u64(x), fmt_u64(xs),
                              fmt_u64(orbits), format_double(bound), ok ? "1" : "0"});
      rows.push_back({{"d", d}, {"n", n}, {"V_grid", v}, {"X_grid", x}, {"X_sym_grid", xs},
                      {"X_sym_orbits", orbits}, {"bound", bound}, {"bound_ok", ok}});
    }
  }
  return o;
}

Outcome run_rates(const Config& cfg) {
  cfg.validate();
  Outcome o;
  o.table.header = {"d", "n", "m_full", "m_sym", "err_f1", "err_f2", "err_f2_sym", "err_net", "delta",
                    "err_f2_times_m_sym", "sym_max_diff"};
  auto& rows = o.report["rows"] = nlohmann::json::array();
  for (int d = cfg.d; d <= cfg.last_d(); ++d) {
    const auto f = builtin_target(cfg.target, d);
    const Field ff = make_field(f);
    std::vector<double> errs;
    for (int n = cfg.n_min; n <= cfg.n_max; ++n) {
      const IndexSetSpec V{IndexSetKind::TotalDegree, n, d}, X{IndexSetKind::EnergyBased, n, d};
      const auto f1 = build_interpolant(f, V, false);
      const auto f2 = build_interpolant(f, X, false);
      const auto f2s = build_interpolant(f, X, true);
      const auto q = experiment_quadrature(cfg, d, n);
      const std::vector<Field> fields{make_field(f1), make_field(f2), make_field(f2s)};
      const auto reports = norm_diff(ff, fields, q);
      const double e1 = reports[0].energy, e2 = reports[1].energy, e2s = reports[2].energy;
      const double mismatch = max_sym_mismatch(f2, f2s, d, cfg.seed + static_cast<std::uint64_t>(n));
      if (mismatch > 1e-12) {
        o.failures.push_back("symmetric and plain interpolants differ by " + format_double(mismatch) +
                             " at d=" + std::to_string(d) + " n=" + std::to_string(n));
      }

      double enet = std::nan("");
      const double delta = cfg.delta > 0.0 ? cfg.delta : default_delta(X);
      if (d <= 3 && full_net_fits(f2s)) {
        const auto full = assemble_full_net(f2s, delta, false);
        const Field nf = make_field(full.net);
        auto qn = q;
        const double cost = (qn.mode == QuadratureMode::TensorGaussPerCell
                                 ? tensor_node_count(d, qn.cell_level, qn.points_per_cell_per_axis, nf)
                                 : static_cast<double>(qn.sample_count)) *
                            static_cast<double>(full.net.metadata().neurons);
        if (cost <= kNetColumnBudget) enet = norm_diff(ff, nf, qn).energy;
      }
      errs.push_back(e2);
      o.table.rows.push_back({std::to_string(d), std::to_string(n), std::to_string(f2.size()),
                              std::to_string(f2s.size()), format_double(e1), format_double(e2),
                              format_double(e2s), format_double(enet), format_double(delta),
                              format_double(e2 * static_cast<double>(f2s.size())), format_double(mismatch)});
      rows.push_back({{"d", d}, {"n", n}, {"m_full", f2.size()}, {"m_sym", f2s.size()}, {"err_f1", e1},
                      {"err_f2", e2}, {"err_f2_sym", e2s},
                      {"err_net", std::isnan(enet) ? nlohmann::json(nullptr) : nlohmann::json(enet)},
                      {"delta", delta}, {"sym_max_diff", mismatch}, {"quadrature", q.to_json()}});
    }
    std::vector<double> ratios;
    for (std::size_t k = 1; k < errs.size(); ++k) ratios.push_back(errs[k - 1] / errs[k]);
    double slope = 0.0;
    if (errs.size() > 1) slope = std::log2(errs.front() / errs.back()) / static_cast<double>(errs.size() - 1);
    std::ostringstream line;
    line << "d=" << d << " err_f2 halving ratios:";
    for (double r : ratios) line << ' ' << format_double(r);
    line << "; mean log2 slope " << format_double(slope);
    o.table.footer.push_back(line.str());
    o.report["slopes"][std::to_string(d)] = {{"ratios", ratios}, {"mean_log2_slope", slope}};
  }
  return o;
}

Outcome run_net_verify(const Config& cfg) {
  cfg.validate();
  Outcome o;
  o.table.header = {"d", "n", "basis_id", "depth", "depth_expected", "width", "width_expected",
                    "width_published", "neurons", "support_points", "support_max", "symmetry_defect",
                    "h1_to_oracle", "claimed_bound"};
  auto& nets = o.report["basis_nets"] = nlohmann::json::array();
  auto& fulls = o.report["full_nets"] = nlohmann::json::array();
  auto fail = [&](const std::string& what) { o.failures.push_back(what); };

  for (int d = cfg.d; d <= cfg.last_d(); ++d) {
    const auto coeffs = vandermonde_coefficients(d);
    const int D = static_cast<int>(coeffs.D());
    const bool float_path = d <= 3;
    const auto f = builtin_target(cfg.target, d);
    for (int n = cfg.n_min; n <= cfg.n_max; ++n) {
      const IndexSetSpec X{IndexSetKind::EnergyBased, n, d};
      const double delta = cfg.delta > 0.0 ? cfg.delta : default_delta(X);
      std::mt19937_64 rng(cfg.seed + 1000 * static_cast<std::uint64_t>(d) + static_cast<std::uint64_t>(n));
      std::uniform_real_distribution<double> unif(0.0, 1.0);
      std::vector<double> x(static_cast<std::size_t>(d)), y(x);

      for (const auto& orbit : canonical_orbits(X)) {
        auto b = build_sym_basis_net(orbit.level, orbit.index, delta, coeffs);
        const auto& m = b.net.metadata();
        const int depth_exp = arch::basis_depth(d);
        const int width_exp = arch::basis_width(d, D);
        if (m.depth != depth_exp) fail(b.report.basis_id + ": depth " + std::to_string(m.depth));
        if (m.width != width_exp) fail(b.report.basis_id + ": width " + std::to_string(m.width));

        int support_points = 0;
        double support_max = 0.0, sym_defect = 0.0;
        std::optional<double> h1;
        if (float_path) {
          for (int t = 0; t < 200000 && support_points < 10000; ++t) {
            for (auto& v : x) v = unif(rng);
            if (!outside_support(orbit.level, orbit.index, x)) continue;
            ++support_points;
            support_max = std::max(support_max, std::abs(b.net.value(x)));
          }
          for (int t = 0; t < 10000; ++t) {
            for (auto& v : x) v = unif(rng);
            y = x;
            std::shuffle(y.begin(), y.end(), rng);
            sym_defect = std::max(sym_defect, std::abs(b.net.value(x) - b.net.value(y)));
          }
          if (support_max > 1e-10) fail(b.report.basis_id + ": output outside the support " + format_double(support_max));
          if (sym_defect > 1e-10) fail(b.report.basis_id + ": permutation defect " + format_double(sym_defect));

          Field oracle;
          oracle.dim = d;
          oracle.finest_level = orbit.level.max();
          const LevelIndex lv = orbit.level;
          const OddIndex iv = orbit.index;
          SurplusTable one(IndexSetSpec{IndexSetKind::TotalDegree, lv.sum() - d + 1, d}, true,
                           {{lv, iv, 1.0}});
          const Field of = make_field(one);
          auto q = experiment_quadrature(cfg, d, of.finest_level);
          h1 = norm_diff(make_field(b.net), of, q).h1;
          b.report.measured_h1_distance = h1;
          b.report.support_ok = support_max <= 1e-10;
          b.report.max_symmetry_defect = sym_defect;
        }
        o.table.rows.push_back({std::to_string(d), std::to_string(n), b.report.basis_id, std::to_string(m.depth),
                                std::to_string(depth_exp), std::to_string(m.width), std::to_string(width_exp),
                                std::to_string(arch::published_basis_width(d)), std::to_string(m.neurons),
                                std::to_string(support_points), format_double(support_max),
                                format_double(sym_defect), h1 ? format_double(*h1) : "nan",
                                format_double(b.report.claimed_h1_error_bound)});
        auto j = b.report.to_json();
        j["d"] = d;
        j["n"] = n;
        j["depth"] = m.depth;
        j["width"] = m.width;
        j["neurons"] = m.neurons;
        j["params"] = m.params;
        j["width_expected"] = width_exp;
        j["width_published"] = arch::published_basis_width(d);
        j["float_path"] = float_path;
        nets.push_back(j);
      }

      // Full network and its decomposition.
      const auto table = build_interpolant(f, X, true);
      if (!full_net_fits(table)) {
        fulls.push_back({{"d", d}, {"n", n}, {"skipped", "dense layer size above the memory cap"}});
        continue;
      }
      const auto full = assemble_full_net(table, delta, true);
      const auto& fm = full.net.metadata();
      nlohmann::json fj{{"d", d}, {"n", n}, {"depth", fm.depth}, {"width", fm.width},
                        {"neurons", fm.neurons}, {"params", fm.params}, {"subnets", full.decomposition.size()},
                        {"subnet_width_expected", arch::subnet_width(d)},
                        {"subnet_width_published", arch::published_subnet_width(d)}};
      if (fm.depth != arch::basis_depth(d)) fail("full net depth " + std::to_string(fm.depth));
      for (const auto& s : full.decomposition) {
        if (s.metadata().width != arch::subnet_width(d) || s.metadata().depth != arch::basis_depth(d)) {
          fail("decomposition sub-network of width " + std::to_string(s.metadata().width));
          break;
        }
      }
      if (float_path) {
        double worst = 0.0;
        for (int t = 0; t < 1000; ++t) {
          for (auto& v : x) v = unif(rng);
          double sum = 0.0, scale = 0.0;
          for (const auto& s : full.decomposition) {
            const double v = s.value(x);
            sum += v;
            scale += std::abs(v);
          }
          worst = std::max(worst, std::abs(sum - full.net.value(x)) / std::max(1.0, scale));
        }
        fj["decomposition_relative_defect"] = worst;
        if (worst > 1e-10) fail("decomposition does not sum to the network output");
      }
      fulls.push_back(fj);
    }
  }
  return o;
}

void draw_gradient_samples(const TargetFunction& f, std::size_t M, double noise, std::uint64_t seed,
                           std::vector<std::vector<double>>& x, std::vector<std::vector<double>>& y) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0), eta(-noise, noise);
  const std::size_t d = static_cast<std::size_t>(f.d);
  x.assign(M, std::vector<double>(d));
  y.assign(M, std::vector<double>(d));
  for (std::size_t j = 0; j < M; ++j) {
    for (auto& v : x[j]) v = unif(rng);
    f.grad(x[j], y[j]);
    if (noise > 0.0) {
      for (auto& v : y[j]) v += eta(rng);
    }
  }
}

GradientFit fit_gradient(const IndexSetSpec& spec, const std::vector<std::vector<double>>& x,
                         const std::vector<std::vector<double>>& y) {
  const auto orbits = canonical_orbits(spec);
  const std::size_t m = orbits.size(), M = x.size(), d = static_cast<std::size_t>(spec.d);
  GradientFit out;
  out.basis_size = m;
  if (M * d < m) return out;

  std::vector<SurplusTable> single;
  single.reserve(m);
  for (const auto& o : orbits) single.emplace_back(spec, true, std::vector<SurplusTable::Entry>{{o.level, o.index, 1.0}});

  Eigen::MatrixXd A(static_cast<Eigen::Index>(M * d), static_cast<Eigen::Index>(m));
  Eigen::VectorXd b(static_cast<Eigen::Index>(M * d));
  for (std::size_t j = 0; j < M; ++j) {
    for (std::size_t k = 0; k < m; ++k) {
      const auto g = single[k].evaluate(x[j]).grad;
      for (std::size_t s = 0; s < d; ++s) A(static_cast<Eigen::Index>(j * d + s), static_cast<Eigen::Index>(k)) = g[s];
    }
    for (std::size_t s = 0; s < d; ++s) b(static_cast<Eigen::Index>(j * d + s)) = y[j][s];
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A);
  out.rank = static_cast<std::size_t>(qr.rank());
  if (out.rank < m) return out;
  const Eigen::VectorXd c = qr.solve(b);
  out.empirical_loss = (A * c - b).squaredNorm() / static_cast<double>(M);

  std::vector<SurplusTable::Entry> entries;
  for (std::size_t k = 0; k < m; ++k) entries.push_back({orbits[k].level, orbits[k].index, c(static_cast<Eigen::Index>(k))});
  out.table.emplace(spec, true, std::move(entries));
  return out;
}

Outcome run_gradient_fit(const Config& cfg) {
  cfg.validate();
  Outcome o;
  o.table.header = {"d", "n", "M", "seed", "basis_size", "rank", "empirical_loss", "energy_error",
                    "max_coeff_diff"};
  auto& rows = o.report["rows"] = nlohmann::json::array();
  auto& means = o.report["mean_energy_error"] = nlohmann::json::object();

  for (int d = cfg.d; d <= cfg.last_d(); ++d) {
    for (int n = cfg.n_min; n <= cfg.n_max; ++n) {
      const IndexSetSpec X{IndexSetKind::EnergyBased, n, d};
      const auto base = builtin_target(cfg.target, d);
      std::optional<SurplusTable> reference;
      TargetFunction f = base;
      if (cfg.fit_interpolant) {
        reference.emplace(build_interpolant(base, X, true));
        f = as_target(*reference);
      }
      const Field ff = make_field(f);
      const auto q = experiment_quadrature(cfg, d, n);

      std::vector<double> mean_err;
      for (auto M : cfg.samples) {
        double sum = 0.0;
        int used = 0;
        for (int s = 0; s < cfg.seeds; ++s) {
          const std::uint64_t seed = cfg.seed + static_cast<std::uint64_t>(s);
          std::vector<std::vector<double>> xs, ys;
          draw_gradient_samples(f, M, cfg.noise, seed, xs, ys);
          const auto fit = fit_gradient(X, xs, ys);
          std::vector<std::string> row{std::to_string(d), std::to_string(n), std::to_string(M), std::to_string(seed),
                                       std::to_string(fit.basis_size), std::to_string(fit.rank)};
          nlohmann::json jr{{"d", d}, {"n", n}, {"M", M}, {"seed", seed}, {"basis_size", fit.basis_size},
                            {"rank", fit.rank}};
          if (!fit.table) {
            row.insert(row.end(), {"nan", "nan", "nan"});
            jr["skipped"] = "rank-deficient design";
            o.table.rows.push_back(row);
            rows.push_back(jr);
            continue;
          }
          const double err = norm_diff(ff, make_field(*fit.table), q).energy;
          double coeff_diff = std::nan("");
          if (reference) {
            coeff_diff = 0.0;
            for (const auto& e : reference->entries()) {
              coeff_diff = std::max(coeff_diff, std::abs(e.coeff - fit.table->find(e.level, e.index).value_or(0.0)));
            }
            if (cfg.noise == 0.0 && coeff_diff > 1e-8) {
              o.failures.push_back("noiseless fit misses the interpolant coefficients by " + format_double(coeff_diff));
            }
          }
          sum += err;
          ++used;
          row.insert(row.end(), {format_double(fit.empirical_loss), format_double(err), format_double(coeff_diff)});
          jr["empirical_loss"] = fit.empirical_loss;
          jr["energy_error"] = err;
          jr["max_coeff_diff"] = std::isnan(coeff_diff) ? nlohmann::json(nullptr) : nlohmann::json(coeff_diff);
          o.table.rows.push_back(row);
          rows.push_back(jr);
        }
        const double mean = used ? sum / used : std::nan("");
        mean_err.push_back(mean);
        o.table.footer.push_back("d=" + std::to_string(d) + " n=" + std::to_string(n) + " M=" + std::to_string(M) +
                                 " mean energy error " + format_double(mean));
      }
      for (std::size_t k = 1; k < mean_err.size(); ++k) {
        if (mean_err[k] > mean_err[k - 1]) {
          o.failures.push_back("mean energy error increased between M=" + std::to_string(cfg.samples[k - 1]) +
                               " and M=" + std::to_string(cfg.samples[k]));
        }
      }
      means[std::to_string(d) + "," + std::to_string(n)] = mean_err;
    }
  }
  return o;
}

}  // namespace symkor::experiments
