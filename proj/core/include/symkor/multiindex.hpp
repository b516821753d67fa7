#pragma once

#include <algorithm>
#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace symkor {

/// Largest supported dimension. Grid counts explode well before this.
inline constexpr std::size_t kMaxDim = 16;

/// Fixed-capacity integer multi-index. The tag keeps level and index vectors
/// from being mixed up at call sites.
template <class Tag>
class SmallIndex {
 public:
  SmallIndex() = default;

  SmallIndex(std::size_t d, int fill) : d_(checked_dim(d)) {
    std::fill_n(v_.begin(), d_, fill);
  }

  SmallIndex(std::initializer_list<int> values) : d_(checked_dim(values.size())) {
    std::copy(values.begin(), values.end(), v_.begin());
  }

  explicit SmallIndex(std::span<const int> values) : d_(checked_dim(values.size())) {
    std::copy(values.begin(), values.end(), v_.begin());
  }

  std::size_t size() const { return d_; }
  bool empty() const { return d_ == 0; }

  int operator[](std::size_t j) const { return v_[j]; }
  int& operator[](std::size_t j) { return v_[j]; }

  const int* begin() const { return v_.data(); }
  const int* end() const { return v_.data() + d_; }
  int* begin() { return v_.data(); }
  int* end() { return v_.data() + d_; }

  std::span<const int> values() const { return {v_.data(), d_}; }

  int sum() const {
    int s = 0;
    for (std::size_t j = 0; j < d_; ++j) s += v_[j];
    return s;
  }

  int max() const { return d_ == 0 ? 0 : *std::max_element(begin(), end()); }

  friend bool operator==(const SmallIndex& a, const SmallIndex& b) {
    return std::equal(a.begin(), a.end(), b.begin(), b.end());
  }
  friend std::strong_ordering operator<=>(const SmallIndex& a, const SmallIndex& b) {
    return std::lexicographical_compare_three_way(a.begin(), a.end(), b.begin(), b.end());
  }

 private:
  static std::size_t checked_dim(std::size_t d) {
    if (d > kMaxDim) {
      throw std::invalid_argument("multi-index dimension " + std::to_string(d) +
                                  " exceeds kMaxDim");
    }
    return d;
  }

  std::array<int, kMaxDim> v_{};
  std::size_t d_ = 0;
};

struct LevelTag;
struct OddTag;

/// Dyadic level vector l = (l_1, ..., l_d), every component >= 1.
using LevelIndex = SmallIndex<LevelTag>;
/// Odd position vector i with 1 <= i_j <= 2^{l_j} - 1.
using OddIndex = SmallIndex<OddTag>;

enum class IndexSetKind { TotalDegree, EnergyBased };

struct IndexSetSpec {
  IndexSetKind kind = IndexSetKind::EnergyBased;
  int n = 1;
  int d = 1;

  void validate() const;
  friend bool operator==(const IndexSetSpec&, const IndexSetSpec&) = default;
};

std::string to_string(IndexSetKind kind);
IndexSetKind index_set_kind_from_string(const std::string& name);

bool is_valid_level(const LevelIndex& l);
bool is_compatible(const LevelIndex& l, const OddIndex& i);
/// Throws std::invalid_argument when (l, i) is not a basis-function label.
void require_compatible(const LevelIndex& l, const OddIndex& i);

/// Levels sorted non-decreasingly (representatives of permutation classes).
bool is_ordered(const LevelIndex& l);

/// All odd index vectors of level l, in lexicographic order.
/// The result always has 2^{|l|_1 - d} elements.
std::vector<OddIndex> odd_index_set(const LevelIndex& l);

/// Calls fn(i) for every odd index vector of level l without materializing the set.
void for_each_odd_index(const LevelIndex& l, const std::function<void(const OddIndex&)>& fn);

/// Grid point i * 2^{-l}, componentwise.
std::vector<double> grid_point(const LevelIndex& l, const OddIndex& i);

/// Value and right-continuous slope of the 1D hat phi_{level,index}.
struct HatSample {
  double value = 0.0;
  double slope = 0.0;
};
HatSample hat_1d(int level, int index, double x);

struct HatValue {
  double value = 0.0;
  std::vector<double> gradient;
};
/// Tensor-product hat phi_{l,i}(x) with its piecewise-constant-slope gradient.
HatValue hat_eval(const LevelIndex& l, const OddIndex& i, std::span<const double> x);

/// Membership test for the energy-based set X_n, decided in exact integer
/// arithmetic: 32^{|l|_1 - n - d + 1} * (4^n + 4d - 4) <= sum_j 4^{l_j}.
bool in_energy_set(const LevelIndex& l, int n);

/// V_n (TotalDegree) or X_n (EnergyBased) as a lexicographically sorted list.
std::vector<LevelIndex> index_set(const IndexSetSpec& spec);

/// Calls fn(l) for every level l >= 1 of dimension d with |l|_1 <= budget.
void for_each_level(int d, int budget, const std::function<void(const LevelIndex&)>& fn);

/// Number of (l, i) grid points over the index set. With symmetric=true only
/// non-decreasing levels contribute (all of their odd indices are counted).
std::uint64_t count_grid_points(const IndexSetSpec& spec, bool symmetric);

/// Known upper bound 2^n * (d/2) * e^d on the full energy-based grid count.
double energy_grid_count_bound(int n, int d);

}  // namespace symkor
