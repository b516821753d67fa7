#include "symkor/multiindex.hpp"

#include <gmpxx.h>

#include <cmath>
#include <limits>

namespace symkor {

void IndexSetSpec::validate() const {
  if (n < 1) throw std::invalid_argument("index set refinement n must be >= 1");
  if (d < 1 || static_cast<std::size_t>(d) > kMaxDim) {
    throw std::invalid_argument("index set dimension must lie in [1, " +
                                std::to_string(kMaxDim) + "]");
  }
}

std::string to_string(IndexSetKind kind) {
  return kind == IndexSetKind::TotalDegree ? "total_degree" : "energy_based";
}

IndexSetKind index_set_kind_from_string(const std::string& name) {
  if (name == "total_degree") return IndexSetKind::TotalDegree;
  if (name == "energy_based") return IndexSetKind::EnergyBased;
  throw std::invalid_argument("unknown index set kind '" + name + "'");
}

bool is_valid_level(const LevelIndex& l) {
  if (l.empty()) return false;
  return std::all_of(l.begin(), l.end(), [](int v) { return v >= 1 && v <= 30; });
}

bool is_compatible(const LevelIndex& l, const OddIndex& i) {
  if (!is_valid_level(l) || l.size() != i.size()) return false;
  for (std::size_t j = 0; j < l.size(); ++j) {
    const long long limit = (1LL << l[j]) - 1;
    if (i[j] < 1 || i[j] > limit || i[j] % 2 == 0) return false;
  }
  return true;
}

void require_compatible(const LevelIndex& l, const OddIndex& i) {
  if (!is_compatible(l, i)) {
    throw std::invalid_argument("odd index is not compatible with level");
  }
}

bool is_ordered(const LevelIndex& l) { return std::is_sorted(l.begin(), l.end()); }

void for_each_odd_index(const LevelIndex& l, const std::function<void(const OddIndex&)>& fn) {
  if (!is_valid_level(l)) throw std::invalid_argument("invalid level index");
  const std::size_t d = l.size();
  OddIndex i(d, 1);
  while (true) {
    fn(i);
    // odometer increment, last coordinate fastest -> lexicographic order
    std::size_t j = d;
    while (j > 0) {
      --j;
      if (i[j] + 2 < (1 << l[j])) {
        i[j] += 2;
        break;
      }
      i[j] = 1;
      if (j == 0) return;
    }
  }
}

std::vector<OddIndex> odd_index_set(const LevelIndex& l) {
  std::vector<OddIndex> out;
  out.reserve(std::size_t{1} << (l.sum() - static_cast<int>(l.size())));
  for_each_odd_index(l, [&](const OddIndex& i) { out.push_back(i); });
  return out;
}

std::vector<double> grid_point(const LevelIndex& l, const OddIndex& i) {
  require_compatible(l, i);
  std::vector<double> x(l.size());
  for (std::size_t j = 0; j < l.size(); ++j) x[j] = std::ldexp(static_cast<double>(i[j]), -l[j]);
  return x;
}

HatSample hat_1d(int level, int index, double x) {
  const double t = std::ldexp(x, level) - index;
  const double scale = std::ldexp(1.0, level);
  if (t < -1.0 || t >= 1.0) return {0.0, 0.0};
  if (t < 0.0) return {1.0 + t, scale};
  return {1.0 - t, -scale};
}

HatValue hat_eval(const LevelIndex& l, const OddIndex& i, std::span<const double> x) {
  if (x.size() != l.size()) throw std::invalid_argument("hat_eval: dimension mismatch");
  const std::size_t d = l.size();
  std::array<HatSample, kMaxDim> s{};
  for (std::size_t j = 0; j < d; ++j) s[j] = hat_1d(l[j], i[j], x[j]);

  HatValue out;
  out.gradient.assign(d, 0.0);
  out.value = 1.0;
  for (std::size_t j = 0; j < d; ++j) out.value *= s[j].value;
  for (std::size_t k = 0; k < d; ++k) {
    double g = s[k].slope;
    for (std::size_t j = 0; j < d; ++j) {
      if (j != k) g *= s[j].value;
    }
    out.gradient[k] = g;
  }
  return out;
}

bool in_energy_set(const LevelIndex& l, int n) {
  const int d = static_cast<int>(l.size());
  const long excess = static_cast<long>(l.sum()) - n - d + 1;

  mpz_class rhs = 0;  // sum_j 4^{l_j}
  for (int v : l) {
    mpz_class term;
    mpz_ui_pow_ui(term.get_mpz_t(), 2, static_cast<unsigned long>(2 * v));
    rhs += term;
  }
  mpz_class lhs;  // 4^n + 4d - 4
  mpz_ui_pow_ui(lhs.get_mpz_t(), 2, static_cast<unsigned long>(2 * n));
  lhs += 4 * (d - 1);

  if (excess >= 0) {
    lhs <<= static_cast<mp_bitcnt_t>(5 * excess);
  } else {
    rhs <<= static_cast<mp_bitcnt_t>(-5 * excess);
  }
  return lhs <= rhs;
}

namespace {

void level_recursion(LevelIndex& l, std::size_t pos, int remaining,
                     const std::function<void(const LevelIndex&)>& fn) {
  const std::size_t d = l.size();
  if (pos == d) {
    fn(l);
    return;
  }
  // each later coordinate still needs at least 1
  const int tail = static_cast<int>(d - pos - 1);
  for (int v = 1; v <= remaining - tail; ++v) {
    l[pos] = v;
    level_recursion(l, pos + 1, remaining - v, fn);
  }
}

}  // namespace

void for_each_level(int d, int budget, const std::function<void(const LevelIndex&)>& fn) {
  if (d < 1 || static_cast<std::size_t>(d) > kMaxDim) {
    throw std::invalid_argument("for_each_level: bad dimension");
  }
  if (budget < d) return;
  LevelIndex l(static_cast<std::size_t>(d), 1);
  level_recursion(l, 0, budget, fn);
}

std::vector<LevelIndex> index_set(const IndexSetSpec& spec) {
  spec.validate();
  std::vector<LevelIndex> out;
  const int budget = spec.n + spec.d - 1;
  // X_n lies inside V_n, so V_n is the candidate pool for both kinds.
  for_each_level(spec.d, budget, [&](const LevelIndex& l) {
    if (spec.kind == IndexSetKind::TotalDegree || in_energy_set(l, spec.n)) out.push_back(l);
  });
  std::sort(out.begin(), out.end());
  return out;
}

std::uint64_t count_grid_points(const IndexSetSpec& spec, bool symmetric) {
  std::uint64_t total = 0;
  for (const auto& l : index_set(spec)) {
    if (symmetric && !is_ordered(l)) continue;
    const int shift = l.sum() - spec.d;
    if (shift >= 63) throw std::overflow_error("count_grid_points: count exceeds 64 bits");
    const std::uint64_t c = std::uint64_t{1} << shift;
    if (total > std::numeric_limits<std::uint64_t>::max() - c) {
      throw std::overflow_error("count_grid_points: count exceeds 64 bits");
    }
    total += c;
  }
  return total;
}

double energy_grid_count_bound(int n, int d) {
  return std::ldexp(1.0, n) * (d / 2.0) * std::exp(static_cast<double>(d));
}

}  // namespace symkor
