#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "symkor/multiindex.hpp"

namespace symkor {

/// One class of (level, index) pairs under simultaneous coordinate permutation.
struct SymOrbit {
  LevelIndex level;  ///< non-decreasing
  OddIndex index;    ///< lexicographically smallest under the level's stabilizer
  std::uint64_t orbit_size = 1;
  std::uint64_t stabilizer_size = 1;
};

std::uint64_t factorial(int n);

/// Sorts the coordinate pairs (l_j, i_j); the result is the canonical
/// representative of the pair's permutation class.
std::pair<LevelIndex, OddIndex> canonicalize(const LevelIndex& l, const OddIndex& i);
bool is_canonical(const LevelIndex& l, const OddIndex& i);

/// Number of permutations tau with tau(l) = l and tau(i) = i.
std::uint64_t stabilizer_size(const LevelIndex& l, const OddIndex& i);

/// Canonical orbits over every l in the index set, ordered by (level, index).
std::vector<SymOrbit> canonical_orbits(const IndexSetSpec& spec);

/// Number of canonical orbits, counted combinatorially (no enumeration of
/// indices): per ordered level, multisets of odd indices inside each block
/// of equal levels.
std::uint64_t count_canonical_orbits(const IndexSetSpec& spec);

/// p(k): unrestricted integer partitions. Throws std::overflow_error past 64 bits.
std::uint64_t partition_count(int k);
/// Partitions of s into exactly `parts` positive parts.
std::uint64_t partition_count_parts(int s, int parts);

/// Exact coefficients a with sum_xi a_xi G_xi = full permutation sum, where
/// G_xi(x) = prod_s sum_j xi^{2^{j-1}} phi_j(x_s) for nodes xi = 1..D.
struct VandermondeCoefficients {
  int d = 1;
  std::vector<int> lambdas;  ///< sorted distinct values of sum_q 2^{j_q - 1}
  int K = 1;                 ///< 2^d - 1
  std::vector<mpq_class> a;  ///< length D, indexed by node xi - 1

  std::size_t D() const { return lambdas.size(); }
  std::vector<double> rounded() const;
  nlohmann::json to_json() const;
  static VandermondeCoefficients from_json(const nlohmann::json& doc);
};

/// Valid for 1 <= d <= 8; throws std::invalid_argument otherwise.
VandermondeCoefficients vandermonde_coefficients(int d);

/// Distinct values of sum_q 2^{j_q - 1} over j in {1..d}^d.
std::vector<int> vandermonde_exponents(int d);

/// Weight xi^{2^{j-1}} attached to univariate factor j (1-based) at node xi.
mpz_class node_weight(int xi, int j);

/// sum_xi a_xi G_xi evaluated in exact arithmetic. samples[nu][s] holds
/// phi_{nu}(x_s) for factor nu and coordinate s (both 0-based).
mpq_class vandermonde_symmetrize(const VandermondeCoefficients& coeffs,
                                 const std::vector<std::vector<mpq_class>>& samples);

/// Literal sum over all d! permutations of prod_nu phi_nu(x_{tau(nu)}).
mpq_class permutation_sum(const std::vector<std::vector<mpq_class>>& samples);

/// psi_{l,i}(x) = sum over all d! permutations of phi_{l,i}(tau(x)), by
/// brute-force permutation enumeration. Intended for testing (d <= 10).
double sym_basis_oracle(const LevelIndex& l, const OddIndex& i, std::span<const double> x);

}  // namespace symkor
