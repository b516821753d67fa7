#include "symkor/symmetry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

namespace symkor {
namespace {

using Pair = std::pair<int, int>;

std::vector<Pair> pairs_of(const LevelIndex& l, const OddIndex& i) {
  if (l.size() != i.size()) throw std::invalid_argument("level/index dimension mismatch");
  std::vector<Pair> p(l.size());
  for (std::size_t j = 0; j < l.size(); ++j) p[j] = {l[j], i[j]};
  return p;
}

std::uint64_t to_u64(const mpz_class& v) {
  if (v < 0 || mpz_sizeinbase(v.get_mpz_t(), 2) > 64) {
    throw std::overflow_error("count exceeds 64 bits");
  }
  std::uint64_t out = 0;
  mpz_export(&out, nullptr, -1, sizeof(out), 0, 0, v.get_mpz_t());
  return out;
}

// Round-to-nearest-even conversion; mpq_get_d truncates.
double nearest_double(const mpq_class& q) {
  if (q == 0) return 0.0;
  mpz_class num = abs(q.get_num());
  const mpz_class& den = q.get_den();
  // exponent estimate so that num * 2^shift / den lies in [2^53, 2^55)
  const long nb = static_cast<long>(mpz_sizeinbase(num.get_mpz_t(), 2));
  const long db = static_cast<long>(mpz_sizeinbase(den.get_mpz_t(), 2));
  long shift = 54 - (nb - db);
  mpz_class scaled_num = num, scaled_den = den;
  if (shift >= 0) {
    scaled_num <<= static_cast<mp_bitcnt_t>(shift);
  } else {
    scaled_den <<= static_cast<mp_bitcnt_t>(-shift);
  }
  mpz_class m, r;
  mpz_tdiv_qr(m.get_mpz_t(), r.get_mpz_t(), scaled_num.get_mpz_t(), scaled_den.get_mpz_t());
  // keep exactly 53 significant bits; fold dropped bits and remainder into rounding
  long extra = static_cast<long>(mpz_sizeinbase(m.get_mpz_t(), 2)) - 53;
  bool sticky = r != 0;
  if (extra > 0) {
    mpz_class low = m & ((mpz_class(1) << static_cast<mp_bitcnt_t>(extra)) - 1);
    m >>= static_cast<mp_bitcnt_t>(extra);
    const mpz_class half = mpz_class(1) << static_cast<mp_bitcnt_t>(extra - 1);
    if (low > half || (low == half && (sticky || mpz_odd_p(m.get_mpz_t())))) {
      m += 1;
    }
    shift -= extra;
  } else if (sticky) {
    // m already had at most 53 bits; compare 2r with den for the tie rule
    mpz_class twice = r * 2;
    const int c = cmp(twice, scaled_den);
    if (c > 0 || (c == 0 && mpz_odd_p(m.get_mpz_t()))) m += 1;
  }
  const double mag = std::ldexp(m.get_d(), static_cast<int>(-shift));
  return q < 0 ? -mag : mag;
}

void exponent_recursion(int nu, int remaining, int d, int acc, std::vector<int>& out) {
  if (nu == d) {
    if (remaining == 0) out.push_back(acc);
    return;
  }
  for (int k = 0; k <= remaining; ++k) {
    exponent_recursion(nu + 1, remaining - k, d, acc + k * (1 << nu), out);
  }
}

}  // namespace

std::uint64_t factorial(int n) {
  if (n < 0 || n > 20) throw std::invalid_argument("factorial argument out of range");
  std::uint64_t f = 1;
  for (int k = 2; k <= n; ++k) f *= static_cast<std::uint64_t>(k);
  return f;
}

std::pair<LevelIndex, OddIndex> canonicalize(const LevelIndex& l, const OddIndex& i) {
  auto p = pairs_of(l, i);
  std::sort(p.begin(), p.end());
  LevelIndex cl = l;
  OddIndex ci = i;
  for (std::size_t j = 0; j < p.size(); ++j) {
    cl[j] = p[j].first;
    ci[j] = p[j].second;
  }
  return {cl, ci};
}

bool is_canonical(const LevelIndex& l, const OddIndex& i) {
  const auto p = pairs_of(l, i);
  return std::is_sorted(p.begin(), p.end());
}

std::uint64_t stabilizer_size(const LevelIndex& l, const OddIndex& i) {
  auto p = pairs_of(l, i);
  std::sort(p.begin(), p.end());
  std::uint64_t s = 1;
  std::size_t run = 1;
  for (std::size_t j = 1; j <= p.size(); ++j) {
    if (j < p.size() && p[j] == p[j - 1]) {
      ++run;
    } else {
      s *= factorial(static_cast<int>(run));
      run = 1;
    }
  }
  return s;
}

std::vector<SymOrbit> canonical_orbits(const IndexSetSpec& spec) {
  const std::uint64_t group = factorial(spec.d);
  std::vector<SymOrbit> out;
  for (const auto& l : index_set(spec)) {
    if (!is_ordered(l)) continue;
    OddIndex i(l.size(), 1);
    // indices non-decreasing inside each block of equal levels
    auto rec = [&](auto&& self, std::size_t pos) -> void {
      if (pos == l.size()) {
        SymOrbit o{l, i, 0, stabilizer_size(l, i)};
        o.orbit_size = group / o.stabilizer_size;
        out.push_back(o);
        return;
      }
      const int start = (pos > 0 && l[pos] == l[pos - 1]) ? i[pos - 1] : 1;
      const int limit = (1 << l[pos]) - 1;
      for (int v = start; v <= limit; v += 2) {
        i[pos] = v;
        self(self, pos + 1);
      }
    };
    rec(rec, 0);
  }
  return out;
}

std::uint64_t count_canonical_orbits(const IndexSetSpec& spec) {
  mpz_class total = 0;
  for (const auto& l : index_set(spec)) {
    if (!is_ordered(l)) continue;
    mpz_class c = 1;
    std::size_t j = 0;
    while (j < l.size()) {
      std::size_t k = j;
      while (k < l.size() && l[k] == l[j]) ++k;
      const unsigned long block = static_cast<unsigned long>(k - j);
      const unsigned long choices = 1UL << (l[j] - 1);
      mpz_class b;
      mpz_bin_uiui(b.get_mpz_t(), choices + block - 1, block);
      c *= b;
      j = k;
    }
    total += c;
  }
  return to_u64(total);
}

std::uint64_t partition_count(int k) {
  if (k < 0) throw std::invalid_argument("partition_count: negative argument");
  std::vector<mpz_class> p(static_cast<std::size_t>(k) + 1, 0);
  p[0] = 1;
  for (int part = 1; part <= k; ++part) {
    for (int s = part; s <= k; ++s) p[s] += p[s - part];
  }
  return to_u64(p[k]);
}

std::uint64_t partition_count_parts(int s, int parts) {
  if (s < 0 || parts < 0) throw std::invalid_argument("partition_count_parts: negative argument");
  // table[t][q]: partitions of t into exactly q parts
  std::vector<std::vector<mpz_class>> table(static_cast<std::size_t>(s) + 1,
                                            std::vector<mpz_class>(parts + 1, 0));
  table[0][0] = 1;
  for (int t = 1; t <= s; ++t) {
    for (int q = 1; q <= std::min(t, parts); ++q) {
      table[t][q] = table[t - 1][q - 1] + table[t - q][q];
    }
  }
  return to_u64(table[s][parts]);
}

std::vector<int> vandermonde_exponents(int d) {
  if (d < 1 || d > 16) throw std::invalid_argument("vandermonde_exponents: d out of range");
  std::vector<int> out;
  exponent_recursion(0, d, d, 0, out);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

mpz_class node_weight(int xi, int j) {
  mpz_class w;
  mpz_ui_pow_ui(w.get_mpz_t(), static_cast<unsigned long>(xi), 1UL << (j - 1));
  return w;
}

VandermondeCoefficients vandermonde_coefficients(int d) {
  if (d < 1 || d > 8) throw std::invalid_argument("vandermonde_coefficients: d must lie in [1, 8]");
  VandermondeCoefficients out;
  out.d = d;
  out.lambdas = vandermonde_exponents(d);
  out.K = (1 << d) - 1;
  const std::size_t n = out.lambdas.size();

  // Row m: sum_xi a_xi xi^{lambda_m} = [lambda_m == K]; augmented column n.
  std::vector<std::vector<mpq_class>> A(n, std::vector<mpq_class>(n + 1));
  for (std::size_t m = 0; m < n; ++m) {
    for (std::size_t c = 0; c < n; ++c) {
      mpz_ui_pow_ui(A[m][c].get_num_mpz_t(), c + 1, static_cast<unsigned long>(out.lambdas[m]));
    }
    A[m][n] = out.lambdas[m] == out.K ? 1 : 0;
  }

  // Gauss-Jordan over the rationals.
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    while (piv < n && A[piv][k] == 0) ++piv;
    if (piv == n) throw std::runtime_error("vandermonde_coefficients: singular system");
    if (piv != k) std::swap(A[piv], A[k]);
    const mpq_class inv = 1 / A[k][k];
    for (std::size_t c = k; c <= n; ++c) A[k][c] *= inv;
    for (std::size_t r = 0; r < n; ++r) {
      if (r == k || A[r][k] == 0) continue;
      const mpq_class f = A[r][k];
      for (std::size_t c = k; c <= n; ++c) A[r][c] -= f * A[k][c];
    }
  }

  out.a.resize(n);
  for (std::size_t r = 0; r < n; ++r) out.a[r] = A[r][n];
  return out;
}

std::vector<double> VandermondeCoefficients::rounded() const {
  std::vector<double> out(a.size());
  std::transform(a.begin(), a.end(), out.begin(), nearest_double);
  return out;
}

nlohmann::json VandermondeCoefficients::to_json() const {
  nlohmann::json doc;
  doc["schema"] = "symkor.vandermonde/1";
  doc["d"] = d;
  doc["K"] = K;
  doc["lambdas"] = lambdas;
  auto& arr = doc["a"] = nlohmann::json::array();
  for (const auto& q : a) {
    arr.push_back({{"num", q.get_num().get_str()}, {"den", q.get_den().get_str()}});
  }
  return doc;
}

VandermondeCoefficients VandermondeCoefficients::from_json(const nlohmann::json& doc) {
  if (doc.value("schema", std::string{}) != "symkor.vandermonde/1") {
    throw std::invalid_argument("vandermonde JSON: unsupported schema");
  }
  VandermondeCoefficients out;
  out.d = doc.at("d").get<int>();
  out.K = doc.at("K").get<int>();
  out.lambdas = doc.at("lambdas").get<std::vector<int>>();
  for (const auto& e : doc.at("a")) {
    mpq_class q(mpz_class(e.at("num").get<std::string>()),
                mpz_class(e.at("den").get<std::string>()));
    q.canonicalize();
    out.a.push_back(q);
  }
  if (out.a.size() != out.lambdas.size()) {
    throw std::invalid_argument("vandermonde JSON: coefficient count mismatch");
  }
  return out;
}

mpq_class vandermonde_symmetrize(const VandermondeCoefficients& coeffs,
                                 const std::vector<std::vector<mpq_class>>& samples) {
  const std::size_t d = static_cast<std::size_t>(coeffs.d);
  if (samples.size() != d) throw std::invalid_argument("samples must have d rows");
  mpq_class total = 0;
  for (std::size_t x = 0; x < coeffs.D(); ++x) {
    const int xi = static_cast<int>(x) + 1;
    mpq_class g = 1;
    for (std::size_t s = 0; s < d; ++s) {
      mpq_class feature = 0;
      for (std::size_t j = 0; j < d; ++j) {
        feature += mpq_class(node_weight(xi, static_cast<int>(j) + 1)) * samples[j].at(s);
      }
      g *= feature;
    }
    total += coeffs.a[x] * g;
  }
  total.canonicalize();
  return total;
}

mpq_class permutation_sum(const std::vector<std::vector<mpq_class>>& samples) {
  const std::size_t d = samples.size();
  std::vector<std::size_t> tau(d);
  std::iota(tau.begin(), tau.end(), 0);
  mpq_class total = 0;
  do {
    mpq_class term = 1;
    for (std::size_t nu = 0; nu < d; ++nu) term *= samples[nu].at(tau[nu]);
    total += term;
  } while (std::next_permutation(tau.begin(), tau.end()));
  total.canonicalize();
  return total;
}

double sym_basis_oracle(const LevelIndex& l, const OddIndex& i, std::span<const double> x) {
  require_compatible(l, i);
  const std::size_t d = l.size();
  if (x.size() != d) throw std::invalid_argument("sym_basis_oracle: dimension mismatch");
  if (d > 10) throw std::invalid_argument("sym_basis_oracle: d! too large");
  std::vector<std::size_t> tau(d);
  std::iota(tau.begin(), tau.end(), 0);
  double total = 0.0;
  do {
    double term = 1.0;
    for (std::size_t nu = 0; nu < d; ++nu) term *= hat_1d(l[nu], i[nu], x[tau[nu]]).value;
    total += term;
  } while (std::next_permutation(tau.begin(), tau.end()));
  return total;
}

}  // namespace symkor
