#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <optional>
#include <random>

namespace detmat {

/// 2^61 - 1, the default oracle modulus.
inline constexpr std::uint64_t kDefaultPrime = (std::uint64_t{1} << 61) - 1;
/// 2^62 - 57, used for the confirmation trial of a dependence verdict.
inline constexpr std::uint64_t kSecondPrime = (std::uint64_t{1} << 62) - 57;

/// Deterministic Miller-Rabin, exact for every 64-bit input.
bool is_prime(std::uint64_t n);

/// Arithmetic in Z/p for a prime p < 2^63. Residues are kept in [0, p).
class PrimeField {
 public:
  /// Throws std::invalid_argument if p is not prime or does not fit below 2^63.
  explicit PrimeField(std::uint64_t p);

  std::uint64_t modulus() const { return p_; }
  std::uint64_t reduce(std::uint64_t a) const { return a % p_; }
  /// Maps an arbitrary signed integer to its residue.
  std::uint64_t from_signed(std::int64_t a) const;

  std::uint64_t add(std::uint64_t a, std::uint64_t b) const {
    std::uint64_t s = a + b;
    return s >= p_ ? s - p_ : s;
  }
  std::uint64_t sub(std::uint64_t a, std::uint64_t b) const { return a >= b ? a - b : a + (p_ - b); }
  std::uint64_t neg(std::uint64_t a) const { return a == 0 ? 0 : p_ - a; }
  std::uint64_t mul(std::uint64_t a, std::uint64_t b) const {
    return static_cast<std::uint64_t>(static_cast<unsigned __int128>(a) * b % p_);
  }
  std::uint64_t pow(std::uint64_t base, std::uint64_t exp) const;
  /// Throws std::domain_error on zero.
  std::uint64_t inv(std::uint64_t a) const;

  friend bool operator==(const PrimeField&, const PrimeField&) = default;

 private:
  std::uint64_t p_;
};

struct FieldSpec {
  std::uint64_t p = kDefaultPrime;
  std::uint64_t seed = 0;
};

using FFMatrix = Eigen::Matrix<std::uint64_t, Eigen::Dynamic, Eigen::Dynamic>;
using FFVector = Eigen::Matrix<std::uint64_t, Eigen::Dynamic, 1>;

/// Row-reduces `a` in place to echelon form and returns its rank.
int ff_rank_inplace(FFMatrix& a, const PrimeField& field);

template <typename Derived>
int ff_rank(const Eigen::MatrixBase<Derived>& a, const PrimeField& field) {
  FFMatrix work = a;
  return ff_rank_inplace(work, field);
}

/// Entries i.i.d. uniform in [0, p), drawn row-major from a generator seeded by spec.seed.
FFMatrix ff_random_matrix(const FieldSpec& spec, Eigen::Index rows, Eigen::Index cols);
FFMatrix ff_random_matrix(std::mt19937_64& rng, std::uint64_t p, Eigen::Index rows, Eigen::Index cols);

FFMatrix ff_multiply(const FFMatrix& a, const FFMatrix& b, const PrimeField& field);

struct SolutionCount {
  bool consistent = false;
  int nullity = 0;
  /// 0 if inconsistent, p^nullity otherwise; empty when that overflows 64 bits.
  std::optional<std::uint64_t> count;
};

/// Solutions x of a x = b over Z/p. Throws std::invalid_argument on a row mismatch.
SolutionCount ff_count_solutions(const FFMatrix& a, const FFVector& b, const PrimeField& field);

/// One solution of a x = b (free variables set to zero), or nullopt if inconsistent.
std::optional<FFVector> ff_solve(const FFMatrix& a, const FFVector& b, const PrimeField& field);

}  // namespace detmat
