#include "symkor/sqrelu_net.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "net_assembler.hpp"

namespace symkor {

SqReluNet::SqReluNet(int input_dim, std::vector<Layer> layers, std::vector<Probe> probes)
    : input_dim_(input_dim), layers_(std::move(layers)), probes_(std::move(probes)) {
  if (input_dim_ < 1) throw std::invalid_argument("network input dimension must be positive");
  int cols = input_dim_;
  for (const auto& L : layers_) {
    if (L.cols != cols || L.rows < 1 ||
        L.weights.size() != static_cast<std::size_t>(L.rows) * L.cols ||
        L.bias.size() != static_cast<std::size_t>(L.rows)) {
      throw std::invalid_argument("network layer shapes do not chain");
    }
    cols = L.rows;
  }
  for (const auto& p : probes_) {
    if (p.layer < 0 || p.layer + 1 >= static_cast<int>(layers_.size()) || p.neuron < 0 ||
        p.neuron >= layers_[p.layer].rows) {
      throw std::invalid_argument("network probe outside the hidden layers");
    }
  }
  meta_ = compute_metadata(layers_);

  sparse_.resize(layers_.size());
  for (std::size_t k = 0; k < layers_.size(); ++k) {
    const auto& L = layers_[k];
    auto& S = sparse_[k];
    S.row_start.push_back(0);
    for (int r = 0; r < L.rows; ++r) {
      for (int c = 0; c < L.cols; ++c) {
        if (L.w(r, c) != 0.0) {
          S.col.push_back(c);
          S.val.push_back(L.w(r, c));
        }
      }
      S.row_start.push_back(S.col.size());
    }
  }
}

NetMetadata SqReluNet::compute_metadata(std::span<const Layer> layers) {
  NetMetadata m;
  m.depth = layers.empty() ? 0 : static_cast<int>(layers.size()) - 1;
  for (std::size_t k = 0; k < layers.size(); ++k) {
    m.params += layers[k].weights.size() + layers[k].bias.size();
    if (k + 1 < layers.size()) {
      m.width = std::max(m.width, layers[k].rows);
      m.neurons += static_cast<std::size_t>(layers[k].rows);
    }
  }
  return m;
}

void SqReluNet::run(std::span<const double> x, std::vector<std::vector<double>>* pre,
                    std::vector<double>& out) const {
  if (static_cast<int>(x.size()) != input_dim_) {
    throw std::invalid_argument("network input dimension mismatch");
  }
  std::vector<double> h(x.begin(), x.end());
  if (pre) pre->clear();
  for (std::size_t k = 0; k < layers_.size(); ++k) {
    const auto& L = layers_[k];
    const auto& S = sparse_[k];
    std::vector<double> z(L.bias);
    for (int r = 0; r < L.rows; ++r) {
      double acc = z[r];
      for (std::size_t e = S.row_start[r]; e < S.row_start[r + 1]; ++e) acc += S.val[e] * h[S.col[e]];
      z[r] = acc;
    }
    if (k + 1 == layers_.size()) {
      out = std::move(z);
      return;
    }
    if (pre) pre->push_back(z);
    for (auto& v : z) v = sqrelu(v);
    h = std::move(z);
  }
  out = std::move(h);
}

std::vector<double> SqReluNet::forward(std::span<const double> x) const {
  std::vector<double> out;
  run(x, nullptr, out);
  return out;
}

double SqReluNet::value(std::span<const double> x) const {
  if (output_dim() != 1) throw std::invalid_argument("network output is not scalar");
  return forward(x)[0];
}

double SqReluNet::min_probe(std::span<const double> x) const {
  std::vector<std::vector<double>> pre;
  std::vector<double> out;
  run(x, &pre, out);
  double m = std::numeric_limits<double>::infinity();
  for (const auto& p : probes_) m = std::min(m, pre[p.layer][p.neuron]);
  return m;
}

std::vector<double> SqReluNet::forward_checked(std::span<const double> x, double tol) const {
  std::vector<std::vector<double>> pre;
  std::vector<double> out;
  run(x, &pre, out);
  for (const auto& p : probes_) {
    if (pre[p.layer][p.neuron] < -tol) {
      throw std::domain_error("network: negative input reached a product or identity block");
    }
  }
  return out;
}

ValueGrad SqReluNet::evaluate(std::span<const double> x) const {
  if (output_dim() != 1) throw std::invalid_argument("network output is not scalar");
  std::vector<std::vector<double>> pre;
  std::vector<double> out;
  run(x, &pre, out);

  ValueGrad vg;
  vg.value = out[0];
  // adjoint of the signals feeding the current layer
  std::vector<double> adj{1.0};
  for (std::size_t k = layers_.size(); k-- > 0;) {
    const auto& L = layers_[k];
    const auto& S = sparse_[k];
    std::vector<double> below(static_cast<std::size_t>(L.cols), 0.0);
    for (int r = 0; r < L.rows; ++r) {
      if (adj[r] == 0.0) continue;
      for (std::size_t e = S.row_start[r]; e < S.row_start[r + 1]; ++e) {
        below[S.col[e]] += S.val[e] * adj[r];
      }
    }
    if (k > 0) {
      const auto& z = pre[k - 1];
      for (std::size_t c = 0; c < below.size(); ++c) below[c] *= z[c] > 0.0 ? 2.0 * z[c] : 0.0;
    }
    adj = std::move(below);
  }
  vg.grad = std::move(adj);
  return vg;
}

std::vector<std::vector<double>> SqReluNet::axis_breakpoints() const {
  std::vector<std::vector<double>> out(static_cast<std::size_t>(input_dim_));
  if (layers_.size() < 2) return out;
  const auto& L = layers_.front();
  for (int r = 0; r < L.rows; ++r) {
    int axis = -1;
    int nonzero = 0;
    for (int c = 0; c < L.cols; ++c) {
      if (L.w(r, c) != 0.0) {
        axis = c;
        ++nonzero;
      }
    }
    if (nonzero == 1) out[axis].push_back(-L.bias[r] / L.w(r, axis));
  }
  for (auto& v : out) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
  }
  return out;
}

nlohmann::json SqReluNet::to_json() const {
  nlohmann::json doc;
  doc["schema"] = "sqrelu-net/v1";
  doc["input_dim"] = input_dim_;
  doc["output_dim"] = output_dim();
  auto& arr = doc["layers"] = nlohmann::json::array();
  for (const auto& L : layers_) {
    arr.push_back({{"rows", L.rows}, {"cols", L.cols}, {"weights", L.weights}, {"bias", L.bias}});
  }
  auto& pr = doc["probes"] = nlohmann::json::array();
  for (const auto& p : probes_) pr.push_back({p.layer, p.neuron});
  doc["metadata"] = {{"width", meta_.width},
                     {"depth", meta_.depth},
                     {"param_count", meta_.params},
                     {"neuron_count", meta_.neurons}};
  return doc;
}

SqReluNet SqReluNet::from_json(const nlohmann::json& doc) {
  if (doc.value("schema", std::string{}) != "sqrelu-net/v1") {
    throw std::invalid_argument("network JSON: unsupported schema");
  }
  std::vector<Layer> layers;
  for (const auto& jl : doc.at("layers")) {
    Layer L;
    L.rows = jl.at("rows").get<int>();
    L.cols = jl.at("cols").get<int>();
    L.weights = jl.at("weights").get<std::vector<double>>();
    L.bias = jl.at("bias").get<std::vector<double>>();
    layers.push_back(std::move(L));
  }
  std::vector<Probe> probes;
  for (const auto& p : doc.value("probes", nlohmann::json::array())) {
    probes.push_back({p.at(0).get<int>(), p.at(1).get<int>()});
  }
  SqReluNet net(doc.at("input_dim").get<int>(), std::move(layers), std::move(probes));
  if (doc.contains("metadata")) {
    const auto& m = doc["metadata"];
    const NetMetadata claimed{m.at("width").get<int>(), m.at("depth").get<int>(),
                              m.at("param_count").get<std::size_t>(),
                              m.at("neuron_count").get<std::size_t>()};
    if (!(claimed == net.metadata())) {
      throw std::invalid_argument("network JSON: metadata does not match the layers");
    }
  }
  return net;
}

SqReluNet parallel_sum(std::span<const SqReluNet> nets, std::span<const double> scale) {
  if (nets.empty() || nets.size() != scale.size()) {
    throw std::invalid_argument("parallel_sum: need one scale per network");
  }
  const int in = nets[0].input_dim();
  const std::size_t nl = nets[0].layers().size();
  for (const auto& n : nets) {
    if (n.input_dim() != in || n.layers().size() != nl || n.output_dim() != 1) {
      throw std::invalid_argument("parallel_sum: networks differ in input dimension or depth");
    }
  }
  std::vector<Layer> layers(nl);
  std::vector<Probe> probes;
  for (std::size_t k = 0; k < nl; ++k) {
    Layer& L = layers[k];
    L.cols = k == 0 ? in : layers[k - 1].rows;
    L.rows = 0;
    if (k + 1 == nl) {
      L.rows = 1;
    } else {
      for (const auto& n : nets) L.rows += n.layers()[k].rows;
    }
    L.weights.assign(static_cast<std::size_t>(L.rows) * L.cols, 0.0);
    L.bias.assign(static_cast<std::size_t>(L.rows), 0.0);

    int row_off = 0, col_off = 0;
    for (std::size_t m = 0; m < nets.size(); ++m) {
      const Layer& src = nets[m].layers()[k];
      const bool last = k + 1 == nl;
      for (int r = 0; r < src.rows; ++r) {
        const int rr = last ? 0 : row_off + r;
        const double s = last ? scale[m] : 1.0;
        for (int c = 0; c < src.cols; ++c) {
          const int cc = k == 0 ? c : col_off + c;
          L.w(rr, cc) += s * src.w(r, c);
        }
        L.bias[rr] += s * src.bias[r];
      }
      if (!last) {
        for (const auto& p : nets[m].probes()) {
          if (p.layer == static_cast<int>(k)) probes.push_back({p.layer, row_off + p.neuron});
        }
      }
      row_off += last ? 0 : src.rows;
      col_off += src.cols;
    }
  }
  return SqReluNet(in, std::move(layers), std::move(probes));
}

namespace detail {

Affine& Affine::add(const Affine& o, double s) {
  for (const auto& [k, v] : o.terms) terms.emplace_back(k, s * v);
  c += s * o.c;
  return *this;
}

Assembler::Assembler(int input_dim) : input_dim_(input_dim), current_width_(input_dim) {}

int Assembler::add_neuron(const Affine& pre, bool probe) {
  if (probe) probes_.push_back({depth(), static_cast<int>(pending_.size())});
  pending_.push_back(pre);
  return static_cast<int>(pending_.size()) - 1;
}

void Assembler::close_layer() {
  if (pending_.empty()) throw std::logic_error("assembler: closing an empty layer");
  Layer L;
  L.rows = static_cast<int>(pending_.size());
  L.cols = current_width_;
  L.weights.assign(static_cast<std::size_t>(L.rows) * L.cols, 0.0);
  L.bias.resize(pending_.size());
  for (int r = 0; r < L.rows; ++r) {
    for (const auto& [k, v] : pending_[r].terms) L.w(r, k) += v;
    L.bias[r] = pending_[r].c;
  }
  layers_.push_back(std::move(L));
  current_width_ = static_cast<int>(pending_.size());
  pending_.clear();
}

SqReluNet Assembler::finish(const std::vector<Affine>& outputs) {
  if (!pending_.empty()) throw std::logic_error("assembler: finishing with an open layer");
  Layer L;
  L.rows = static_cast<int>(outputs.size());
  L.cols = current_width_;
  L.weights.assign(static_cast<std::size_t>(L.rows) * L.cols, 0.0);
  L.bias.resize(outputs.size());
  for (int r = 0; r < L.rows; ++r) {
    for (const auto& [k, v] : outputs[r].terms) L.w(r, k) += v;
    L.bias[r] = outputs[r].c;
  }
  layers_.push_back(std::move(L));
  return SqReluNet(input_dim_, std::move(layers_), std::move(probes_));
}

Affine product_block(Assembler& a, const Affine& x, const Affine& y) {
  Affine sum = x;
  sum.add(y);
  const int s = a.add_neuron(sum);
  const int nx = a.add_neuron(x, true);
  const int ny = a.add_neuron(y, true);
  return {{{s, 0.5}, {nx, -0.5}, {ny, -0.5}}, 0.0};
}

Affine identity_block(Assembler& a, const Affine& x) {
  Affine shifted = x;
  shifted.c += 1.0;
  const int p = a.add_neuron(shifted);
  const int q = a.add_neuron(x, true);
  return {{{p, 0.5}, {q, -0.5}}, -0.5};
}

std::vector<Affine> product_trees(Assembler& a, const std::vector<std::vector<Affine>>& inputs) {
  if (inputs.empty()) throw std::invalid_argument("product_trees: no trees");
  const int d = static_cast<int>(inputs[0].size());
  if (d < 1) throw std::invalid_argument("product_trees: arity must be positive");
  const int k = 1 << arch::floor_log2(d);
  const int pairs = d - k;

  std::vector<std::vector<Affine>> level(inputs.size());
  for (std::size_t t = 0; t < inputs.size(); ++t) {
    if (static_cast<int>(inputs[t].size()) != d) throw std::invalid_argument("product_trees: arity mismatch");
    for (int p = 0; p < pairs; ++p) {
      level[t].push_back(product_block(a, inputs[t][2 * p], inputs[t][2 * p + 1]));
    }
    for (int q = 2 * pairs; q < d; ++q) level[t].push_back(identity_block(a, inputs[t][q]));
  }
  a.close_layer();

  while (level[0].size() > 1) {
    for (auto& vals : level) {
      std::vector<Affine> next;
      for (std::size_t p = 0; p + 1 < vals.size(); p += 2) {
        next.push_back(product_block(a, vals[p], vals[p + 1]));
      }
      vals = std::move(next);
    }
    a.close_layer();
  }

  std::vector<Affine> out;
  for (auto& vals : level) out.push_back(std::move(vals[0]));
  return out;
}

}  // namespace detail

SqReluNet gadget_product_tree(int d) {
  if (d < 1 || d > 64) throw std::invalid_argument("gadget_product_tree: d must lie in [1, 64]");
  detail::Assembler a(d);
  std::vector<detail::Affine> in;
  for (int s = 0; s < d; ++s) in.push_back(detail::Affine::unit(s));
  auto out = detail::product_trees(a, {in});
  return a.finish(out);
}

namespace {

void require_delta(double delta) {
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("delta must lie in (0, 1)");
}

// Neurons of S_delta(x + shift) appended to `a`, scaled by s, returned as a form.
detail::Affine s_delta_block(detail::Assembler& a, const detail::Affine& x, double shift,
                             double delta, double s) {
  detail::Affine p = x, q = x;
  p.c += shift;
  q.c += shift - delta;
  const int np = a.add_neuron(p);
  const int nq = a.add_neuron(q);
  const double w = s / (2.0 * delta);
  return {{{np, w}, {nq, -w}}, 0.0};
}

}  // namespace

SqReluNet gadget_s_delta(double delta) {
  require_delta(delta);
  detail::Assembler a(1);
  auto out = s_delta_block(a, detail::Affine::unit(0), 0.0, delta, 1.0);
  a.close_layer();
  return a.finish({out});
}

SqReluNet gadget_h_delta(double delta) {
  require_delta(delta);
  detail::Assembler a(1);
  const auto x = detail::Affine::unit(0);
  detail::Affine out = s_delta_block(a, x, 1.0 - delta, delta, 1.0);
  out.add(s_delta_block(a, x, 0.0, delta, -2.0));
  out.add(s_delta_block(a, x, -1.0 + delta, delta, 1.0));
  a.close_layer();
  return a.finish({out});
}

double s_delta(double delta, double x) { return (sqrelu(x) - sqrelu(x - delta)) / (2.0 * delta); }

double h_delta(double delta, double x) {
  if (delta > 0.5) {
    return s_delta(delta, x + 1.0 - delta) - 2.0 * s_delta(delta, x) + s_delta(delta, x - 1.0 + delta);
  }
  // piecewise form, free of the cancellation in the sigma sum
  if (x <= -1.0 + delta || x >= 1.0) return 0.0;
  if (x <= -1.0 + 2.0 * delta) {
    const double u = x + 1.0 - delta;
    return u * u / (2.0 * delta);
  }
  if (x <= 0.0) return x + 1.0 - 1.5 * delta;
  if (x <= delta) return x + 1.0 - 1.5 * delta - x * x / delta;
  if (x <= 1.0 - delta) return 1.0 - x - 0.5 * delta;
  return (1.0 - x) * (1.0 - x) / (2.0 * delta);
}

namespace arch {

int floor_log2(int d) {
  if (d < 1) throw std::invalid_argument("floor_log2: argument must be positive");
  int r = 0;
  while ((2 << r) <= d) ++r;
  return r;
}

int product_tree_depth(int d) { return floor_log2(d) + 1; }

int product_tree_width(int d) {
  // later layers hold 3k / 2^j <= 3k / 2 <= d + k neurons
  const int i = d - (1 << floor_log2(d));
  return 2 * d - i;
}

int product_tree_neurons(int d) {
  const int k = 1 << floor_log2(d);
  return (2 * d - (d - k)) + 3 * (k - 1);
}

int feature_width(int d) { return 6 * d; }
int basis_depth(int d) { return floor_log2(d) + 2; }
int basis_width(int d, int D) { return std::max(6 * d * d, D * product_tree_width(d)); }
int subnet_width(int d) { return std::max(6 * d * d, product_tree_width(d)); }

long long published_basis_width(int d) { return 3LL * d * d * d * ((1LL << (d - 1)) - 1); }
long long published_subnet_width(int d) { return 3LL * d * d; }
long long published_d_bound(int d) { return static_cast<long long>(d) * (1LL << (d - 1)) - d + 1; }

}  // namespace arch

}  // namespace symkor
