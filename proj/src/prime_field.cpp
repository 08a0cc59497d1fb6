#include "detmat/prime_field.hpp"

#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace detmat {

namespace {

std::uint64_t mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t n) {
  return static_cast<std::uint64_t>(static_cast<unsigned __int128>(a) * b % n);
}

std::uint64_t powmod(std::uint64_t base, std::uint64_t exp, std::uint64_t n) {
  std::uint64_t result = 1 % n;
  base %= n;
  while (exp != 0) {
    if (exp & 1) result = mulmod(result, base, n);
    base = mulmod(base, base, n);
    exp >>= 1;
  }
  return result;
}

// Reduced row echelon form of the augmented system; returns the pivot column per pivot row.
std::vector<Eigen::Index> rref_inplace(FFMatrix& a, const PrimeField& f) {
  std::vector<Eigen::Index> pivots;
  Eigen::Index row = 0;
  for (Eigen::Index col = 0; col < a.cols() && row < a.rows(); ++col) {
    Eigen::Index pivot = row;
    while (pivot < a.rows() && a(pivot, col) == 0) ++pivot;
    if (pivot == a.rows()) continue;
    if (pivot != row) a.row(pivot).swap(a.row(row));
    const std::uint64_t scale = f.inv(a(row, col));
    for (Eigen::Index c = col; c < a.cols(); ++c) a(row, c) = f.mul(a(row, c), scale);
    for (Eigen::Index r = 0; r < a.rows(); ++r) {
      if (r == row || a(r, col) == 0) continue;
      const std::uint64_t factor = a(r, col);
      for (Eigen::Index c = col; c < a.cols(); ++c) a(r, c) = f.sub(a(r, c), f.mul(factor, a(row, c)));
    }
    pivots.push_back(col);
    ++row;
  }
  return pivots;
}

}  // namespace

bool is_prime(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t small : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
    if (n % small == 0) return n == small;
  }
  std::uint64_t d = n - 1;
  int s = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++s;
  }
  // This witness set is exact below 2^64.
  for (std::uint64_t a : {2ULL, 325ULL, 9375ULL, 28178ULL, 450775ULL, 9780504ULL, 1795265022ULL}) {
    std::uint64_t x = powmod(a, d, n);
    if (x == 0 || x == 1 || x == n - 1) continue;
    bool composite = true;
    for (int k = 1; k < s; ++k) {
      x = mulmod(x, x, n);
      if (x == n - 1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

PrimeField::PrimeField(std::uint64_t p) : p_(p) {
  if (p >= (std::uint64_t{1} << 63)) throw std::invalid_argument("modulus must be below 2^63");
  if (!is_prime(p)) throw std::invalid_argument("modulus " + std::to_string(p) + " is not prime");
}

std::uint64_t PrimeField::from_signed(std::int64_t a) const {
  const std::int64_t m = static_cast<std::int64_t>(p_);
  std::int64_t r = a % m;
  return static_cast<std::uint64_t>(r < 0 ? r + m : r);
}

std::uint64_t PrimeField::pow(std::uint64_t base, std::uint64_t exp) const { return powmod(base, exp, p_); }

std::uint64_t PrimeField::inv(std::uint64_t a) const {
  if (a % p_ == 0) throw std::domain_error("zero has no inverse");
  return powmod(a, p_ - 2, p_);
}

int ff_rank_inplace(FFMatrix& a, const PrimeField& f) {
  Eigen::Index row = 0;
  for (Eigen::Index col = 0; col < a.cols() && row < a.rows(); ++col) {
    Eigen::Index pivot = row;
    while (pivot < a.rows() && a(pivot, col) == 0) ++pivot;
    if (pivot == a.rows()) continue;
    if (pivot != row) a.row(pivot).swap(a.row(row));
    const std::uint64_t scale = f.inv(a(row, col));
    for (Eigen::Index r = row + 1; r < a.rows(); ++r) {
      if (a(r, col) == 0) continue;
      const std::uint64_t factor = f.mul(a(r, col), scale);
      a(r, col) = 0;
      for (Eigen::Index c = col + 1; c < a.cols(); ++c) a(r, c) = f.sub(a(r, c), f.mul(factor, a(row, c)));
    }
    ++row;
  }
  return static_cast<int>(row);
}

FFMatrix ff_random_matrix(std::mt19937_64& rng, std::uint64_t p, Eigen::Index rows, Eigen::Index cols) {
  std::uniform_int_distribution<std::uint64_t> dist(0, p - 1);
  FFMatrix out(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) out(i, j) = dist(rng);
  return out;
}

FFMatrix ff_random_matrix(const FieldSpec& spec, Eigen::Index rows, Eigen::Index cols) {
  std::mt19937_64 rng(spec.seed);
  return ff_random_matrix(rng, spec.p, rows, cols);
}

FFMatrix ff_multiply(const FFMatrix& a, const FFMatrix& b, const PrimeField& f) {
  if (a.cols() != b.rows()) throw std::invalid_argument("ff_multiply: inner dimensions differ");
  FFMatrix out = FFMatrix::Zero(a.rows(), b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index k = 0; k < a.cols(); ++k) {
      if (a(i, k) == 0) continue;
      for (Eigen::Index j = 0; j < b.cols(); ++j) out(i, j) = f.add(out(i, j), f.mul(a(i, k), b(k, j)));
    }
  return out;
}

SolutionCount ff_count_solutions(const FFMatrix& a, const FFVector& b, const PrimeField& f) {
  if (a.rows() != b.rows()) throw std::invalid_argument("ff_count_solutions: a and b have different row counts");
  FFMatrix aug(a.rows(), a.cols() + 1);
  aug << a, b;
  const std::vector<Eigen::Index> pivots = rref_inplace(aug, f);
  SolutionCount result;
  result.consistent = pivots.empty() || pivots.back() != a.cols();
  if (!result.consistent) {
    result.count = 0;
    return result;
  }
  result.nullity = static_cast<int>(a.cols()) - static_cast<int>(pivots.size());
  unsigned __int128 count = 1;
  for (int k = 0; k < result.nullity; ++k) {
    count *= f.modulus();
    if (count > std::numeric_limits<std::uint64_t>::max()) return result;
  }
  result.count = static_cast<std::uint64_t>(count);
  return result;
}

std::optional<FFVector> ff_solve(const FFMatrix& a, const FFVector& b, const PrimeField& f) {
  if (a.rows() != b.rows()) throw std::invalid_argument("ff_solve: a and b have different row counts");
  FFMatrix aug(a.rows(), a.cols() + 1);
  aug << a, b;
  const std::vector<Eigen::Index> pivots = rref_inplace(aug, f);
  if (!pivots.empty() && pivots.back() == a.cols()) return std::nullopt;
  FFVector x = FFVector::Zero(a.cols());
  for (std::size_t k = 0; k < pivots.size(); ++k) x(pivots[k]) = aug(static_cast<Eigen::Index>(k), a.cols());
  return x;
}

}  // namespace detmat
