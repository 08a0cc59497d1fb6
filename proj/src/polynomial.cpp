#include "detmat/polynomial.hpp"

#include "detmat/errors.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace detmat {

namespace {

constexpr std::string_view kHeader = "# detmat-polynomial v1";

std::int64_t parse_int(std::string_view tok, int line) {
  std::int64_t v = 0;
  if (!tok.empty() && tok.front() == '+') tok.remove_prefix(1);
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (tok.empty() || ec != std::errc() || ptr != tok.data() + tok.size()) {
    throw ParseError("polynomial line " + std::to_string(line) + ": bad integer '" + std::string(tok) + "'");
  }
  return v;
}

std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
  std::int64_t out = 0;
  if (__builtin_mul_overflow(a, b, &out)) throw std::overflow_error("polynomial specialization overflows 64 bits");
  return out;
}

std::int64_t checked_add(std::int64_t a, std::int64_t b) {
  std::int64_t out = 0;
  if (__builtin_add_overflow(a, b, &out)) throw std::overflow_error("polynomial specialization overflows 64 bits");
  return out;
}

}  // namespace

int PolynomialSpec::degree_in(Cell var) const {
  auto it = std::find(variables.begin(), variables.end(), var);
  if (it == variables.end()) return 0;
  const auto k = static_cast<std::size_t>(it - variables.begin());
  int deg = 0;
  for (const Term& t : terms) deg = std::max(deg, t.exponents[k]);
  return deg;
}

PolynomialSpec parse_polynomial(std::string_view text) {
  PolynomialSpec spec;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  std::vector<std::vector<std::pair<std::size_t, int>>> raw;
  std::vector<std::int64_t> coeffs;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (lineno == 1) {
      if (line != kHeader) throw ParseError("polynomial file must start with \"" + std::string(kHeader) + "\"");
      continue;
    }
    if (line.empty() || line.front() == '#') continue;
    std::istringstream tokens(line);
    std::string tok;
    tokens >> tok;
    const std::int64_t coeff = parse_int(tok, lineno);
    if (coeff == 0) throw ParseError("polynomial line " + std::to_string(lineno) + ": zero coefficient");
    std::vector<std::pair<std::size_t, int>> factors;
    while (tokens >> tok) {
      const auto comma = tok.find(',');
      const auto colon = tok.find(':');
      if (comma == std::string::npos || colon == std::string::npos || colon < comma) {
        throw ParseError("polynomial line " + std::to_string(lineno) + ": expected i,j:e, got '" + tok + "'");
      }
      const std::int64_t i = parse_int(std::string_view(tok).substr(0, comma), lineno);
      const std::int64_t j = parse_int(std::string_view(tok).substr(comma + 1, colon - comma - 1), lineno);
      const std::int64_t e = parse_int(std::string_view(tok).substr(colon + 1), lineno);
      if (i < 1 || j < 1 || i > kMaxDimension || j > kMaxDimension || e < 1) {
        throw ParseError("polynomial line " + std::to_string(lineno) + ": index or exponent out of range");
      }
      const Cell c{static_cast<int>(i - 1), static_cast<int>(j - 1)};
      auto it = std::find(spec.variables.begin(), spec.variables.end(), c);
      if (it == spec.variables.end()) {
        spec.variables.push_back(c);
        it = spec.variables.end() - 1;
      }
      factors.emplace_back(static_cast<std::size_t>(it - spec.variables.begin()), static_cast<int>(e));
    }
    raw.push_back(std::move(factors));
    coeffs.push_back(coeff);
  }
  if (lineno == 0) throw ParseError("empty polynomial file");
  for (std::size_t t = 0; t < raw.size(); ++t) {
    PolynomialSpec::Term term;
    term.coeff = coeffs[t];
    term.exponents.assign(spec.variables.size(), 0);
    for (auto [k, e] : raw[t]) term.exponents[k] += e;
    spec.terms.push_back(std::move(term));
  }
  return spec;
}

PolynomialSpec read_polynomial_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open polynomial file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_polynomial(buf.str());
}

std::uint64_t evaluate(const PolynomialSpec& spec, const FFMatrix& x, const PrimeField& field) {
  std::uint64_t total = 0;
  for (const auto& term : spec.terms) {
    std::uint64_t v = field.from_signed(term.coeff);
    for (std::size_t k = 0; k < spec.variables.size() && v != 0; ++k) {
      if (term.exponents[k] == 0) continue;
      const Cell c = spec.variables[k];
      v = field.mul(v, field.pow(field.reduce(x(c.row, c.col)), static_cast<std::uint64_t>(term.exponents[k])));
    }
    total = field.add(total, v);
  }
  return total;
}

std::vector<std::int64_t> specialize_univariate(const PolynomialSpec& spec, const std::map<Cell, std::int64_t>& values,
                                                Cell free_var) {
  std::vector<std::int64_t> coeffs(static_cast<std::size_t>(spec.degree_in(free_var)) + 1, 0);
  for (const auto& term : spec.terms) {
    std::int64_t v = term.coeff;
    int power = 0;
    for (std::size_t k = 0; k < spec.variables.size(); ++k) {
      if (term.exponents[k] == 0) continue;
      const Cell c = spec.variables[k];
      if (c == free_var) {
        power = term.exponents[k];
        continue;
      }
      auto it = values.find(c);
      if (it == values.end()) {
        throw std::invalid_argument("specialize_univariate: no value for z" + std::to_string(c.row + 1) +
                                    std::to_string(c.col + 1));
      }
      for (int e = 0; e < term.exponents[k]; ++e) v = checked_mul(v, it->second);
    }
    coeffs[static_cast<std::size_t>(power)] = checked_add(coeffs[static_cast<std::size_t>(power)], v);
  }
  while (coeffs.size() > 1 && coeffs.back() == 0) coeffs.pop_back();
  return coeffs;
}

bool polynomial_vanishes_on_variety(const PolynomialSpec& spec, const MatroidContext& ctx,
                                    const VanishingOptions& opts) {
  for (const Cell& c : spec.variables) {
    if (c.row >= ctx.rows() || c.col >= ctx.cols()) {
      throw std::invalid_argument("polynomial variable outside the " + std::to_string(ctx.rows()) + "x" +
                                  std::to_string(ctx.cols()) + " grid");
    }
  }
  for (std::size_t pi = 0; pi < opts.primes.size(); ++pi) {
    const PrimeField field(opts.primes[pi]);
    for (int t = 0; t < opts.points_per_prime; ++t) {
      std::mt19937_64 rng = trial_stream(opts.seed, 0x706f6c79 + pi, static_cast<std::uint64_t>(t));
      const FFMatrix a = ff_random_matrix(rng, field.modulus(), ctx.rows(), ctx.rank());
      const FFMatrix b = ff_random_matrix(rng, field.modulus(), ctx.rank(), ctx.cols());
      if (evaluate(spec, ff_multiply(a, b, field), field) != 0) return false;
    }
  }
  return true;
}

}  // namespace detmat
