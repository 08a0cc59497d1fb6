#include "doctest.h"
#include "support.hpp"

#include "detmat/errors.hpp"
#include "detmat/pattern.hpp"

#include <random>

using namespace detmat;

TEST_CASE("parse and print round trip") {
  const std::string text = "3 4\n1101\n0110\n1111\n";
  const Pattern p = parse_pattern(text);
  CHECK(p.rows() == 3);
  CHECK(p.cols() == 4);
  CHECK(p.size() == 9);
  CHECK(p(0, 0));
  CHECK_FALSE(p(0, 2));
  CHECK(to_text(p) == text);
  CHECK(p.row_count(2) == 4);
  CHECK(p.col_count(0) == 2);
  CHECK(p.row_mask(0) == 0b1011u);
  CHECK(p.col_mask(1) == 0b111u);
}

TEST_CASE("malformed pattern text is rejected") {
  CHECK_THROWS_AS(parse_pattern(""), ParseError);
  CHECK_THROWS_AS(parse_pattern("2 2\n11\n"), ParseError);
  CHECK_THROWS_AS(parse_pattern("2 2\n11\n1x\n"), ParseError);
  CHECK_THROWS_AS(parse_pattern("2 2\n111\n11\n"), ParseError);
  CHECK_THROWS_AS(parse_pattern("2,2\n11\n11\n"), ParseError);
  CHECK_THROWS_AS(parse_pattern("0 2\n"), ParseError);
  CHECK_THROWS_AS(parse_pattern("65 1\n"), ParseError);
  CHECK_THROWS_AS(read_pattern_file("/definitely/not/here.pat"), ParseError);
}

TEST_CASE("context validates the rank regime") {
  CHECK_THROWS_AS(MatroidContext(3, 3, 3), RegimeError);
  CHECK_THROWS_AS(MatroidContext(3, 4, 0), RegimeError);
  const MatroidContext ctx(5, 6, 3);
  CHECK(ctx.rank_bound() == 24);
  CHECK(ctx.minors_height() == 6);
  CHECK(ctx.transposed() == MatroidContext(6, 5, 3));
}

TEST_CASE("transforms preserve size and invert") {
  std::mt19937_64 rng(7);
  for (int k = 0; k < 200; ++k) {
    const int m = 2 + static_cast<int>(rng() % 5);
    const int n = 2 + static_cast<int>(rng() % 5);
    const Pattern p = testsupport::random_density(m, n, 0.5, rng);
    CHECK(transpose(transpose(p)) == p);
    const auto rp = testsupport::random_perm(m, rng);
    const auto cp = testsupport::random_perm(n, rng);
    const Pattern q = permute(p, rp, cp);
    CHECK(q.size() == p.size());
    for (const Cell& c : p.cells()) CHECK(q(rp[c.row], cp[c.col]));
    const Pattern s = stitch(p);
    CHECK(s.size() == p.size() + m + n + 1);
    CHECK(excise(s) == p);
  }
}

TEST_CASE("stitching the complement of the identity") {
  detmat::Incidence inc = detmat::Incidence::Constant(4, 4, true);
  for (int i = 0; i < 4; ++i) inc(i, i) = false;
  const Pattern s = stitch(Pattern(inc));
  CHECK(s.rows() == 5);
  CHECK(s.size() == 21);
}

TEST_CASE("excise needs a full last row and column") {
  const Pattern p = parse_pattern("2 2\n11\n10\n");
  CHECK_THROWS_AS(excise(p), PreconditionError);
  CHECK_THROWS_AS(permute(p, {0, 0}, {0, 1}), std::invalid_argument);
}

TEST_CASE("restrict and line reduction") {
  const Pattern p = parse_pattern("3 3\n110\n011\n111\n");
  const Pattern sub = restrict_to(p, {2, 0}, {1, 2});
  CHECK(to_text(sub) == "2 2\n11\n10\n");
  const LineReduction red = reduce_columns(p, 2);
  CHECK(red.kept == IndexSet{1});
  CHECK(red.removed == IndexSet{0, 2});
  const LineReduction rows = reduce_rows(p, 2);
  CHECK(rows.kept == IndexSet{2});
}

TEST_CASE("ladders and order convexity") {
  CHECK(is_ladder(testsupport::load("antidiag-omega1-4x4.pat")));
  CHECK_FALSE(is_ladder(testsupport::load("antidiag-omega3-4x4.pat")));
  const Pattern staircase = parse_pattern("3 3\n111\n110\n100\n");
  CHECK(is_order_convex(staircase, PathOrder::Diagonal));
  const Pattern gap = parse_pattern("1 3\n101\n");
  CHECK_FALSE(is_order_convex(gap, PathOrder::AntiDiagonal));
  CHECK_FALSE(is_order_convex(gap, PathOrder::Diagonal));
}

TEST_CASE("masks and index sets") {
  CHECK(mask_to_indices(0b10110) == IndexSet{1, 2, 4});
  CHECK(indices_to_mask({0, 3}) == 0b1001u);
  CHECK(format_index_set({0, 1, 2}) == "{1,2,3}");
  const Pattern p = parse_pattern("2 3\n111\n010\n");
  CHECK(count_inside(p, {0, 1}, {1}) == 2);
}
