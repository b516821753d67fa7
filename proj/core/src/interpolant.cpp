#include "symkor/interpolant.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>
#include <stdexcept>

#include "gauss_rule.hpp"
#include "symkor/symmetry.hpp"

namespace symkor {
namespace {

constexpr double kStencil[3] = {-0.5, 1.0, -0.5};

// Odd index whose support [i-1, i+1) * h contains x, or 0 when x sits at 1.
int containing_index(int level, double x) {
  const int i = 2 * static_cast<int>(std::floor(std::ldexp(x, level - 1))) + 1;
  return i < (1 << level) ? i : 0;
}

std::vector<std::vector<int>> all_permutations(int d) {
  std::vector<std::vector<int>> perms;
  std::vector<int> tau(static_cast<std::size_t>(d));
  std::iota(tau.begin(), tau.end(), 0);
  do {
    perms.push_back(tau);
  } while (std::next_permutation(tau.begin(), tau.end()));
  return perms;
}

}  // namespace

double surplus_stencil(const TargetFunction& f, const LevelIndex& l, const OddIndex& i) {
  require_compatible(l, i);
  const std::size_t d = l.size();
  if (static_cast<int>(d) != f.d) throw std::invalid_argument("surplus_stencil: dimension mismatch");

  std::vector<double> x(d);
  std::vector<int> offset(d, 0);  // 0,1,2 -> -h, 0, +h
  double total = 0.0;
  while (true) {
    double w = 1.0;
    bool on_boundary = false;
    for (std::size_t j = 0; j < d; ++j) {
      w *= kStencil[offset[j]];
      const int pos = i[j] + offset[j] - 1;
      x[j] = std::ldexp(static_cast<double>(pos), -l[j]);
      if (pos == 0 || pos == (1 << l[j])) on_boundary = true;
    }
    if (!on_boundary) total += w * f.eval(x);

    std::size_t j = 0;
    while (j < d && offset[j] == 2) offset[j++] = 0;
    if (j == d) break;
    ++offset[j];
  }
  return total;
}

double surplus_integral(const TargetFunction& f, const LevelIndex& l, const OddIndex& i,
                        int points) {
  require_compatible(l, i);
  if (!f.mixed2) throw std::invalid_argument("surplus_integral: target provides no mixed2");
  const std::size_t d = l.size();
  if (static_cast<int>(d) != f.d) throw std::invalid_argument("surplus_integral: dimension mismatch");

  // Per axis: Gauss nodes on both halves of the support, weights premultiplied by the hat.
  std::vector<detail::Rule1D> axes(d);
  double scale = 1.0;
  for (std::size_t j = 0; j < d; ++j) {
    const double h = std::ldexp(1.0, -l[j]);
    const double c = i[j] * h;
    detail::Rule1D left = detail::gauss_legendre(points, c - h, c);
    const detail::Rule1D right = detail::gauss_legendre(points, c, c + h);
    left.nodes.insert(left.nodes.end(), right.nodes.begin(), right.nodes.end());
    left.weights.insert(left.weights.end(), right.weights.begin(), right.weights.end());
    for (std::size_t k = 0; k < left.nodes.size(); ++k) {
      left.weights[k] *= hat_1d(l[j], i[j], left.nodes[k]).value;
    }
    axes[j] = std::move(left);
    scale *= -0.5 * h;
  }

  std::vector<std::size_t> pos(d, 0);
  std::vector<double> x(d);
  double total = 0.0;
  while (true) {
    double w = 1.0;
    for (std::size_t j = 0; j < d; ++j) {
      x[j] = axes[j].nodes[pos[j]];
      w *= axes[j].weights[pos[j]];
    }
    total += w * f.mixed2(x);

    std::size_t j = 0;
    while (j < d && pos[j] + 1 == axes[j].nodes.size()) pos[j++] = 0;
    if (j == d) break;
    ++pos[j];
  }
  return scale * total;
}

SurplusTable::SurplusTable(IndexSetSpec spec, bool symmetric, std::vector<Entry> entries)
    : spec_(spec), symmetric_(symmetric), entries_(std::move(entries)) {
  spec_.validate();
  const auto levels = index_set(spec_);
  const std::set<LevelIndex> allowed(levels.begin(), levels.end());
  for (const auto& e : entries_) {
    if (static_cast<int>(e.level.size()) != spec_.d) {
      throw std::invalid_argument("surplus table: entry dimension mismatch");
    }
    require_compatible(e.level, e.index);
    if (!allowed.contains(e.level)) {
      throw std::invalid_argument("surplus table: level outside the declared index set");
    }
    if (symmetric_ && !is_canonical(e.level, e.index)) {
      throw std::invalid_argument("surplus table: symmetric table holds a non-canonical key");
    }
    if (!std::isfinite(e.coeff)) throw std::invalid_argument("surplus table: non-finite coefficient");
  }
  std::sort(entries_.begin(), entries_.end(), [](const Entry& a, const Entry& b) {
    return a.level != b.level ? a.level < b.level : a.index < b.index;
  });
  for (std::size_t k = 1; k < entries_.size(); ++k) {
    if (entries_[k].level == entries_[k - 1].level && entries_[k].index == entries_[k - 1].index) {
      throw std::invalid_argument("surplus table: duplicate key");
    }
  }
  build_blocks();
  if (symmetric_) permutations_ = all_permutations(spec_.d);
}

std::size_t SurplusTable::dense_offset(const LevelIndex& l, const OddIndex& i) const {
  std::size_t off = 0;
  for (std::size_t j = 0; j < l.size(); ++j) {
    off = (off << (l[j] - 1)) | static_cast<std::size_t>((i[j] - 1) / 2);
  }
  return off;
}

void SurplusTable::build_blocks() {
  blocks_.clear();
  for (const auto& e : entries_) {
    if (blocks_.empty() || blocks_.back().level != e.level) {
      Block b;
      b.level = e.level;
      b.coeffs.assign(std::size_t{1} << (e.level.sum() - spec_.d), 0.0);
      blocks_.push_back(std::move(b));
    }
    blocks_.back().coeffs[dense_offset(e.level, e.index)] = e.coeff;
  }
  finest_ = 0;
  for (const auto& b : blocks_) finest_ = std::max(finest_, b.level.max());
}

std::optional<double> SurplusTable::find(const LevelIndex& l, const OddIndex& i) const {
  auto it = std::lower_bound(entries_.begin(), entries_.end(), std::pair{l, i},
                             [](const Entry& e, const std::pair<LevelIndex, OddIndex>& key) {
                               return e.level != key.first ? e.level < key.first
                                                           : e.index < key.second;
                             });
  if (it != entries_.end() && it->level == l && it->index == i) return it->coeff;
  return std::nullopt;
}

ValueGrad SurplusTable::evaluate(std::span<const double> x) const {
  const std::size_t d = static_cast<std::size_t>(spec_.d);
  if (x.size() != d) throw std::invalid_argument("surplus table: point dimension mismatch");
  ValueGrad out;
  out.grad.assign(d, 0.0);

  // Per coordinate and level: containing odd index (0 if none) and hat sample.
  struct Cached {
    int index;
    HatSample s;
  };
  const std::size_t levels = static_cast<std::size_t>(finest_level()) + 1;
  thread_local std::vector<Cached> cache;
  cache.resize(d * levels);
  for (std::size_t c = 0; c < d; ++c) {
    for (std::size_t L = 1; L < levels; ++L) {
      const int lv = static_cast<int>(L);
      const int i = containing_index(lv, x[c]);
      cache[c * levels + L] = {i, i ? hat_1d(lv, i, x[c]) : HatSample{0.0, 0.0}};
    }
  }

  std::array<const HatSample*, kMaxDim> s{};
  auto accumulate = [&](const Block& b, std::span<const int> perm) {
    // perm maps factor nu -> coordinate perm[nu]; identity for plain tables
    std::size_t off = 0;
    for (std::size_t nu = 0; nu < d; ++nu) {
      const std::size_t coord = perm.empty() ? nu : static_cast<std::size_t>(perm[nu]);
      const Cached& e = cache[coord * levels + static_cast<std::size_t>(b.level[nu])];
      if (e.index == 0) return;
      off = (off << (b.level[nu] - 1)) | static_cast<std::size_t>((e.index - 1) / 2);
      s[nu] = &e.s;
    }
    const double c = b.coeffs[off];
    if (c == 0.0) return;
    double v = c;
    for (std::size_t nu = 0; nu < d; ++nu) v *= s[nu]->value;
    out.value += v;
    for (std::size_t nu = 0; nu < d; ++nu) {
      double g = c * s[nu]->slope;
      for (std::size_t mu = 0; mu < d; ++mu) {
        if (mu != nu) g *= s[mu]->value;
      }
      out.grad[perm.empty() ? nu : static_cast<std::size_t>(perm[nu])] += g;
    }
  };

  for (const auto& b : blocks_) {
    if (!symmetric_) {
      accumulate(b, {});
    } else {
      for (const auto& perm : permutations_) accumulate(b, perm);
    }
  }
  return out;
}

nlohmann::json SurplusTable::to_json() const {
  nlohmann::json doc;
  doc["schema"] = "symkor.surplus_table/1";
  doc["spec"] = {{"kind", to_string(spec_.kind)}, {"n", spec_.n}, {"d", spec_.d}};
  doc["symmetric"] = symmetric_;
  auto& arr = doc["entries"] = nlohmann::json::array();
  for (const auto& e : entries_) {
    arr.push_back(nlohmann::json::array(
        {std::vector<int>(e.level.begin(), e.level.end()),
         std::vector<int>(e.index.begin(), e.index.end()), e.coeff}));
  }
  return doc;
}

SurplusTable SurplusTable::from_json(const nlohmann::json& doc) {
  if (doc.value("schema", std::string{}) != "symkor.surplus_table/1") {
    throw std::invalid_argument("surplus table JSON: unsupported schema");
  }
  const auto& js = doc.at("spec");
  IndexSetSpec spec{index_set_kind_from_string(js.at("kind").get<std::string>()),
                    js.at("n").get<int>(), js.at("d").get<int>()};
  std::vector<Entry> entries;
  for (const auto& row : doc.at("entries")) {
    const auto l = row.at(0).get<std::vector<int>>();
    const auto i = row.at(1).get<std::vector<int>>();
    entries.push_back({LevelIndex(std::span<const int>(l)), OddIndex(std::span<const int>(i)),
                       row.at(2).get<double>()});
  }
  return SurplusTable(spec, doc.at("symmetric").get<bool>(), std::move(entries));
}

SurplusTable build_interpolant(const TargetFunction& f, const IndexSetSpec& spec, bool symmetric) {
  spec.validate();
  if (f.d != spec.d) throw std::invalid_argument("build_interpolant: dimension mismatch");
  std::vector<SurplusTable::Entry> entries;

  if (!symmetric) {
    for (const auto& l : index_set(spec)) {
      for_each_odd_index(l, [&](const OddIndex& i) {
        entries.push_back({l, i, surplus_stencil(f, l, i)});
      });
    }
    return SurplusTable(spec, false, std::move(entries));
  }

  if (spec.d > 1) {
    std::mt19937_64 rng(0x5eedULL);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::vector<double> x(static_cast<std::size_t>(spec.d));
    for (int trial = 0; trial < 10; ++trial) {
      for (auto& v : x) v = unif(rng);
      const double fx = f.eval(x);
      auto y = x;
      std::shuffle(y.begin(), y.end(), rng);
      if (std::abs(f.eval(y) - fx) > 1e-12 * std::max(1.0, std::abs(fx))) {
        throw std::invalid_argument("build_interpolant: target is not permutation-symmetric");
      }
    }
  }

  for (const auto& orbit : canonical_orbits(spec)) {
    const double v = surplus_stencil(f, orbit.level, orbit.index);
    entries.push_back({orbit.level, orbit.index, v / static_cast<double>(orbit.stabilizer_size)});
  }
  return SurplusTable(spec, true, std::move(entries));
}

ValueGrad eval_interpolant(const SurplusTable& table, std::span<const double> x) {
  return table.evaluate(x);
}

TargetFunction as_target(const SurplusTable& table) {
  TargetFunction f;
  f.name = table.symmetric() ? "symmetric_interpolant" : "interpolant";
  f.d = table.dim();
  auto shared = std::make_shared<const SurplusTable>(table);
  f.eval = [shared](std::span<const double> x) { return shared->value(x); };
  f.grad = [shared](std::span<const double> x, std::span<double> g) {
    const auto vg = shared->evaluate(x);
    std::copy(vg.grad.begin(), vg.grad.end(), g.begin());
  };
  return f;
}

}  // namespace symkor
