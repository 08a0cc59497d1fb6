#include "doctest.h"
#include "support.hpp"

#include "detmat/bases.hpp"
#include "detmat/errors.hpp"

#include <set>

using namespace detmat;

TEST_CASE("enumeration matches the brute-force path filter") {
  for (auto [m, n, r] : {std::tuple{2, 2, 1}, {3, 3, 1}, {3, 3, 2}, {3, 4, 2}, {4, 4, 2}, {4, 5, 3}, {5, 5, 2}}) {
    CAPTURE(m);
    CAPTURE(n);
    CAPTURE(r);
    const FamilyEnumeration e = enumerate_families(MatroidContext(m, n, r));
    CHECK_FALSE(e.truncated);
    std::vector<std::vector<std::string>> got;
    for (const PathFamily& f : e.families) got.push_back(f.paths);
    CHECK(got == testsupport::brute_families(m, n, r));
  }
}

TEST_CASE("family counts") {
  CHECK(enumerate_families(MatroidContext(2, 2, 1)).families.size() == 2);
  CHECK(enumerate_families(MatroidContext(3, 3, 1)).families.size() == 6);
  CHECK(enumerate_families(MatroidContext(3, 3, 2)).families.size() == 3);
  CHECK(enumerate_families(MatroidContext(4, 4, 2)).families.size() == 20);
  CHECK(enumerate_families(MatroidContext(5, 5, 2)).families.size() == 175);
  CHECK(enumerate_families(MatroidContext(4, 4, 3)).families.size() == 4);
  CHECK(enumerate_families(MatroidContext(5, 5, 3)).families.size() == 50);
  CHECK(enumerate_families(MatroidContext(6, 6, 3)).families.size() == 980);
  const FamilyEnumeration cut = enumerate_families(MatroidContext(5, 5, 2), 10);
  CHECK(cut.truncated);
  CHECK(cut.families.size() == 10);
}

TEST_CASE("families are bases in both orientations") {
  for (auto [m, n, r] : {std::tuple{3, 3, 1}, {3, 3, 2}, {4, 4, 2}, {4, 5, 2}, {5, 5, 3}}) {
    const MatroidContext ctx(m, n, r);
    for (const PathFamily& f : enumerate_families(ctx).families) {
      const Pattern p = family_to_pattern(f);
      CHECK(p.size() == ctx.rank_bound());
      CHECK(is_base(p, ctx));
      CHECK(is_base(diagonal_variant(f), ctx));
      CHECK(is_order_convex(diagonal_variant(f), PathOrder::Diagonal) == is_order_convex(p, PathOrder::AntiDiagonal));
    }
  }
}

TEST_CASE("paths and validation") {
  const PathFamily f{3, 3, {"DDLL"}};
  const std::vector<Cell> cells = path_cells(f, 0);
  CHECK(cells.front() == Cell{0, 2});
  CHECK(cells.back() == Cell{2, 0});
  CHECK(cells.size() == 5);
  CHECK_NOTHROW(validate_family(f));
  CHECK_THROWS_AS(validate_family(PathFamily{3, 3, {"DDL"}}), PreconditionError);
  CHECK_THROWS_AS(validate_family(PathFamily{3, 3, {"DXLL"}}), PreconditionError);
  CHECK_THROWS_AS(validate_family(PathFamily{3, 3, {"DDLL", "LD"}}), PreconditionError);
  CHECK_THROWS_AS(validate_family(PathFamily{3, 3, {"DDLL", "LD", "x"}}), PreconditionError);
}

TEST_CASE("decomposition inverts the construction") {
  for (const PathFamily& f : enumerate_families(MatroidContext(5, 5, 2)).families) {
    const auto back = family_from_pattern(family_to_pattern(f), 2);
    REQUIRE(back);
    CHECK(family_to_pattern(*back) == family_to_pattern(f));
  }
  CHECK(family_from_pattern(testsupport::load("antidiag-9x9.pat"), 4));
  CHECK_FALSE(family_from_pattern(testsupport::load("codim2-exceptional-4x4.pat"), 2));
}

TEST_CASE("ladder families") {
  int ladders = 0;
  for (const PathFamily& f : enumerate_families(MatroidContext(4, 4, 2)).families) {
    CHECK(ladder_unique_check(f) == is_ladder(family_to_pattern(f)));
    ladders += ladder_unique_check(f);
  }
  CHECK(ladders > 0);
}

TEST_CASE("sampling") {
  const MatroidContext small(4, 4, 2);
  std::set<std::vector<std::string>> seen;
  for (std::uint64_t s = 0; s < 200; ++s) {
    const PathFamily f = sample_family(small, s);
    CHECK_NOTHROW(validate_family(f));
    seen.insert(f.paths);
  }
  CHECK(seen.size() > 15);
  CHECK(sample_family(small, 9) == sample_family(small, 9));

  const MatroidContext big(9, 9, 4);
  std::set<std::vector<std::string>> many;
  for (std::uint64_t s = 0; s < 20; ++s) {
    const PathFamily f = sample_family(big, s, 100);
    CHECK_NOTHROW(validate_family(f));
    many.insert(f.paths);
  }
  CHECK(many.size() > 10);
  CHECK(is_base(family_to_pattern(sample_family(big, 3, 100)), big));
}
