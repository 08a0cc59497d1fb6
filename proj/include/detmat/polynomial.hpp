#pragma once

#include "detmat/oracle.hpp"
#include "detmat/pattern.hpp"
#include "detmat/prime_field.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <string_view>
#include <vector>

namespace detmat {

/// Integer polynomial in matrix-entry variables z_ij.
struct PolynomialSpec {
  struct Term {
    std::int64_t coeff = 0;
    std::vector<int> exponents;  // parallel to variables
  };
  std::vector<Cell> variables;  // zero-based, in order of first appearance
  std::vector<Term> terms;

  int degree_in(Cell var) const;
};

/// Fixture format: first line "# detmat-polynomial v1", further '#' lines are comments, then
/// one term per line "coeff i1,j1:e1 i2,j2:e2 ..." with 1-based indices and exponents >= 1.
PolynomialSpec parse_polynomial(std::string_view text);
PolynomialSpec read_polynomial_file(const std::filesystem::path& path);

/// Value at the matrix x (indexed by zero-based cells) over Z/p.
std::uint64_t evaluate(const PolynomialSpec& spec, const FFMatrix& x, const PrimeField& field);

/// Substitutes integers for every variable except `free_var` and returns the coefficients of
/// the resulting univariate polynomial, lowest degree first, trailing zeros trimmed. Throws
/// std::invalid_argument if a variable is unassigned and std::overflow_error past 64 bits.
std::vector<std::int64_t> specialize_univariate(const PolynomialSpec& spec, const std::map<Cell, std::int64_t>& values,
                                                Cell free_var);

struct VanishingOptions {
  int points_per_prime = 10;
  std::vector<std::uint64_t> primes{kDefaultPrime, kSecondPrime};
  std::uint64_t seed = kDefaultSeed;
};

/// True iff the polynomial is zero at every sampled point X = A B of rank <= r.
/// Throws std::invalid_argument if a variable lies outside the m x n grid.
bool polynomial_vanishes_on_variety(const PolynomialSpec& spec, const MatroidContext& ctx,
                                    const VanishingOptions& opts = {});

}  // namespace detmat
