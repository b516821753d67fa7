#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include <nlohmann/json.hpp>

#include "symkor/multiindex.hpp"
#include "symkor/targets.hpp"

namespace symkor {

struct ValueGrad {
  double value = 0.0;
  std::vector<double> grad;
};

/// Hierarchical surplus from function values: the tensor product of the 1D
/// stencil [-1/2, 1, -1/2] at spacing h_{l_j} around the grid point.
double surplus_stencil(const TargetFunction& f, const LevelIndex& l, const OddIndex& i);

/// prod_j(-h_{l_j}/2) * integral of phi_{l,i} * D^{(2,...,2)} f over the
/// support, by tensor Gauss-Legendre quadrature with `points` nodes on each
/// half of every 1D support. Throws std::invalid_argument when f has no mixed2.
double surplus_integral(const TargetFunction& f, const LevelIndex& l, const OddIndex& i,
                        int points);

/// Immutable table of hierarchical coefficients.
///
/// Non-symmetric tables hold one entry per (l, i) with l in the index set.
/// Symmetric tables hold one entry per canonical pair (non-decreasing levels,
/// indices sorted inside equal-level blocks) carrying v / |Stab(l, i)|, and
/// evaluate as sum of coeff * psi_{l,i} with psi the full permutation sum.
class SurplusTable {
 public:
  struct Entry {
    LevelIndex level;
    OddIndex index;
    double coeff = 0.0;
  };

  /// Validates the key invariants and builds evaluation blocks.
  SurplusTable(IndexSetSpec spec, bool symmetric, std::vector<Entry> entries);

  const IndexSetSpec& spec() const { return spec_; }
  bool symmetric() const { return symmetric_; }
  int dim() const { return spec_.d; }
  std::size_t size() const { return entries_.size(); }
  std::span<const Entry> entries() const { return entries_; }
  std::optional<double> find(const LevelIndex& l, const OddIndex& i) const;
  /// Largest level component present (0 for an empty table).
  int finest_level() const { return finest_; }

  ValueGrad evaluate(std::span<const double> x) const;
  double value(std::span<const double> x) const { return evaluate(x).value; }

  nlohmann::json to_json() const;
  static SurplusTable from_json(const nlohmann::json& doc);

 private:
  struct Block {
    LevelIndex level;
    std::vector<double> coeffs;  // dense over odd indices, mixed radix
  };

  std::size_t dense_offset(const LevelIndex& l, const OddIndex& i) const;
  void build_blocks();

  IndexSetSpec spec_;
  bool symmetric_ = false;
  std::vector<Entry> entries_;
  std::vector<Block> blocks_;
  std::vector<std::vector<int>> permutations_;
  int finest_ = 0;
};

/// Builds the truncated expansion over the index set with stencil surpluses.
/// symmetric=true stores canonical pairs only and rejects targets that fail a
/// permutation-invariance spot check at 10 pseudo-random points.
SurplusTable build_interpolant(const TargetFunction& f, const IndexSetSpec& spec, bool symmetric);

ValueGrad eval_interpolant(const SurplusTable& table, std::span<const double> x);

/// Wraps a table as a TargetFunction (value and gradient; no mixed2).
TargetFunction as_target(const SurplusTable& table);

}  // namespace symkor
