#include "ergolab/group.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <random>

using namespace ergolab;

namespace {

// One-line permutation -> element index, for readable S_n assertions.
int perm_index(const GroupPtr& g, const std::vector<int>& one_line) {
  auto elems = symmetric_elements(static_cast<int>(one_line.size()));
  for (size_t i = 0; i < elems.size(); ++i)
    if (elems[i] == one_line) return static_cast<int>(i);
  FAIL("permutation not found");
  return -1;
}

std::vector<GroupPtr> small_group_zoo(int max_order) {
  std::vector<GroupPtr> zoo;
  for (int n = 1; n <= max_order; ++n) zoo.push_back(cyclic_group(n));
  for (int n = 2; 2 * n <= max_order; ++n) zoo.push_back(dihedral_group(n));
  for (int n = 1; n <= 3; ++n)
    if (n <= 2 || max_order >= 6) zoo.push_back(symmetric_group(n));
  zoo.push_back(product_group(cyclic_group(2), cyclic_group(2)));
  if (max_order >= 8) zoo.push_back(product_group(cyclic_group(2), cyclic_group(4)));
  if (max_order >= 8) zoo.push_back(product_group(product_group(cyclic_group(2), cyclic_group(2)), cyclic_group(2)));
  if (max_order >= 9) zoo.push_back(product_group(cyclic_group(3), cyclic_group(3)));
  if (max_order >= 12) zoo.push_back(product_group(cyclic_group(2), cyclic_group(6)));
  if (max_order >= 12) zoo.push_back(product_group(cyclic_group(3), cyclic_group(4)));
  return zoo;
}

}  // namespace

TEST_CASE("cyclic group basics") {
  GroupPtr z4 = cyclic_group(4);
  CHECK(z4->order == 4);
  CHECK(z4->identity == 0);
  CHECK(z4->inv(3) == 1);
  CHECK(z4->abelian);
  CHECK(z4->cyclic_factors == std::vector<int>{4});
}

TEST_CASE("symmetric group S3") {
  GroupPtr s3 = symmetric_group(3);
  CHECK(s3->order == 6);
  CHECK_FALSE(s3->abelian);
  // Composition convention (sigma*tau)(x) = sigma(tau(x)).
  int t01 = perm_index(s3, {1, 0, 2});  // swap 0,1
  int t12 = perm_index(s3, {0, 2, 1});  // swap 1,2
  int cycle = perm_index(s3, {1, 2, 0});
  CHECK(s3->op(t01, t12) == cycle);  // first swap 1,2 then swap 0,1: x -> (0 1 2) cycle
}

TEST_CASE("klein four group") {
  GroupPtr k4 = product_group(cyclic_group(2), cyclic_group(2));
  CHECK(k4->order == 4);
  for (int x = 0; x < 4; ++x) CHECK(k4->inv(x) == x);
  CHECK(k4->cyclic_factors == (std::vector<int>{2, 2}));
}

TEST_CASE("dihedral group relations") {
  GroupPtr d4 = dihedral_group(4);
  CHECK(d4->order == 8);
  CHECK_FALSE(d4->abelian);
  // reflections are involutions
  for (int i = 4; i < 8; ++i) CHECK(d4->op(i, i) == d4->identity);
  // s r s = r^{-1}
  int r = 1, s = 4;
  CHECK(d4->op(d4->op(s, r), s) == d4->inv(r));
}

TEST_CASE("explicit tables are validated") {
  // Z2 as an explicit table works.
  CHECK_NOTHROW(explicit_group({{0, 1}, {1, 0}}, "Z2"));
  // Not a Latin square.
  CHECK_THROWS_AS(explicit_group({{0, 0}, {1, 0}}), TableInvalid);
  // Latin square without identity (ok rows/cols but no unit).
  CHECK_THROWS_AS(explicit_group({{1, 0}, {0, 1}}), TableInvalid);
  // Latin square with identity and two-sided inverses (every element an
  // involution) that cannot be associative at order 5.
  std::vector<std::vector<int>> loop = {
      {0, 1, 2, 3, 4},
      {1, 0, 3, 4, 2},
      {2, 4, 0, 1, 3},
      {3, 2, 4, 0, 1},
      {4, 3, 1, 2, 0},
  };
  CHECK_THROWS_AS(explicit_group(loop), TableInvalid);
  CHECK_THROWS_AS(symmetric_group(6), SizeLimit);
}

TEST_CASE("validator rejects any single mutated Cayley entry") {
  std::mt19937_64 rng(991);
  for (GroupPtr g : {cyclic_group(6), symmetric_group(3), dihedral_group(3)}) {
    for (int trial = 0; trial < 40; ++trial) {
      FiniteGroup broken = *g;
      std::uniform_int_distribution<int> cell(0, g->order * g->order - 1);
      std::uniform_int_distribution<int> val(1, g->order - 1);
      int idx = cell(rng);
      broken.table[idx] = (broken.table[idx] + val(rng)) % g->order;
      CHECK_THROWS_AS(detail::validate_group(broken), TableInvalid);
    }
  }
}

TEST_CASE("generated subgroup examples") {
  GroupPtr z6 = cyclic_group(6);
  CHECK(generated_subgroup(z6, {2}).elements == (std::vector<int>{0, 2, 4}));

  GroupPtr z4 = cyclic_group(4);
  CHECK(generated_subgroup(z4, {}).elements == (std::vector<int>{0}));

  GroupPtr s3 = symmetric_group(3);
  int t12 = perm_index(s3, {1, 0, 2});
  int t13 = perm_index(s3, {2, 1, 0});
  CHECK(generated_subgroup(s3, {t12, t13}).whole_group());
}

TEST_CASE("difference subgroup examples") {
  GroupPtr z4 = cyclic_group(4);
  CHECK(difference_subgroup(z4, {1, 3}).elements == (std::vector<int>{0, 2}));

  GroupPtr z2 = cyclic_group(2);
  CHECK(difference_subgroup(z2, {0, 1}).whole_group());

  GroupPtr s3 = symmetric_group(3);
  int t12 = perm_index(s3, {1, 0, 2});
  int t13 = perm_index(s3, {2, 1, 0});
  int e = s3->identity;
  int c123 = perm_index(s3, {1, 2, 0});
  int c132 = perm_index(s3, {2, 0, 1});
  std::vector<int> a3 = {e, c123, c132};
  std::sort(a3.begin(), a3.end());
  CHECK(difference_subgroup(s3, {t12, t13}).elements == a3);

  CHECK_THROWS_AS(difference_subgroup(z4, {}), EmptySupport);
}

TEST_CASE("coset containment witness examples") {
  GroupPtr z4 = cyclic_group(4);
  auto w = coset_containment_witness(z4, {1, 3});
  REQUIRE(w.has_value());
  CHECK(w->representative == 1);
  CHECK(w->subgroup.elements == (std::vector<int>{0, 2}));

  GroupPtr z2 = cyclic_group(2);
  CHECK_FALSE(coset_containment_witness(z2, {0, 1}).has_value());

  GroupPtr z3 = cyclic_group(3);
  auto w3 = coset_containment_witness(z3, {1});
  REQUIRE(w3.has_value());
  CHECK(w3->representative == 1);
  CHECK(w3->subgroup.elements == (std::vector<int>{0}));
}

TEST_CASE("z subgroup examples") {
  CHECK(z_subgroup({2, -2, 0}).d == 2);
  CHECK(z_subgroup({6, 10}).d == 2);
  CHECK(z_subgroup({0}).d == 0);
  CHECK(z_subgroup({0}).compact());
  CHECK_FALSE(z_subgroup({4}).compact());
  CHECK_THROWS_AS(z_subgroup({}), EmptySupport);
}

TEST_CASE("generated subgroup is a minimal fixed point") {
  std::mt19937_64 rng(1234);
  for (GroupPtr g : small_group_zoo(12)) {
    std::uniform_int_distribution<int> pick(0, g->order - 1);
    for (int trial = 0; trial < 10; ++trial) {
      std::vector<int> s;
      for (int i = 0; i < 1 + trial % 3; ++i) s.push_back(pick(rng));
      Subgroup h = generated_subgroup(g, s);
      for (int extra : h.elements) {
        std::vector<int> s2 = s;
        s2.push_back(extra);
        CHECK(generated_subgroup(g, s2).elements == h.elements);
      }
    }
  }
}

TEST_CASE("difference subgroup is base-point independent") {
  std::mt19937_64 rng(555);
  for (GroupPtr g : small_group_zoo(12)) {
    std::uniform_int_distribution<int> pick(0, g->order - 1);
    for (int trial = 0; trial < 8; ++trial) {
      std::set<int> sset;
      for (int i = 0; i < 2 + trial % 3; ++i) sset.insert(pick(rng));
      std::vector<int> s(sset.begin(), sset.end());
      Subgroup diff = difference_subgroup(g, s);
      for (int base : s) {
        std::vector<int> translated;
        for (int x : s) translated.push_back(g->op(g->inv(base), x));
        CHECK(generated_subgroup(g, translated).elements == diff.elements);
      }
    }
  }
}

TEST_CASE("witness absent iff difference subgroup is everything, exhaustively to order 12") {
  for (GroupPtr g : small_group_zoo(12)) {
    auto subgroups = enumerate_subgroups(g);
    for (unsigned mask = 1; mask < (1u << g->order); ++mask) {
      std::vector<int> s;
      for (int x = 0; x < g->order; ++x)
        if (mask & (1u << x)) s.push_back(x);
      bool fast = difference_subgroup(g, s).whole_group();
      bool witnessed = coset_containment_witness(g, s, &subgroups).has_value();
      REQUIRE(fast == !witnessed);
    }
  }
}

TEST_CASE("subgroup enumeration respects Lagrange and caps") {
  GroupPtr s3 = symmetric_group(3);
  auto subs = enumerate_subgroups(s3);
  CHECK(subs.size() == 6);  // 1, three of order 2, A3, S3
  for (const auto& h : subs) CHECK(6 % h.size() == 0);

  GroupPtr big = product_group(cyclic_group(11), cyclic_group(12));
  CHECK_THROWS_AS(enumerate_subgroups(big), SizeLimit);
  CHECK_THROWS_AS(coset_containment_witness(big, {1, 2}), SizeLimit);
}
