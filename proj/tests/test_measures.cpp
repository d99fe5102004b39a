#include "ergolab/measure.hpp"
#include "ergolab/spectral.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <random>

using namespace ergolab;

namespace {

int perm_index(const GroupPtr& g, const std::vector<int>& one_line) {
  auto elems = symmetric_elements(static_cast<int>(one_line.size()));
  for (size_t i = 0; i < elems.size(); ++i)
    if (elems[i] == one_line) return static_cast<int>(i);
  FAIL("permutation not found");
  return -1;
}

FiniteMeasure random_complex_measure(const GroupPtr& g, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<cplx> c(g->order);
  for (auto& x : c) x = cplx{u(rng), u(rng)};
  return from_weights(g, std::move(c));
}

// Independent oracle: distribution of the n-step walk with steps +0/+1 (fair
// coin), accumulated by direct long-double Pascal recursion.
std::vector<long double> pascal_row(int n) {
  std::vector<long double> row{1.0L};
  for (int step = 0; step < n; ++step) {
    std::vector<long double> next(row.size() + 1, 0.0L);
    for (size_t j = 0; j < row.size(); ++j) {
      next[j] += 0.5L * row[j];
      next[j + 1] += 0.5L * row[j];
    }
    row = std::move(next);
  }
  return row;
}

}  // namespace

TEST_CASE("measure constructors") {
  GroupPtr z2 = cyclic_group(2);
  FiniteMeasure d = dirac(z2, z2->identity);
  CHECK(d.coeffs[0] == cplx{1.0, 0.0});
  CHECK(d.coeffs[1] == cplx{});

  GroupPtr z4 = cyclic_group(4);
  FiniteMeasure h = haar_on_subgroup(generated_subgroup(z4, {2}));
  CHECK(h.coeffs == std::vector<cplx>{0.5, 0.0, 0.5, 0.0});

  GroupPtr z6 = cyclic_group(6);
  FiniteMeasure u = uniform_on_set(z6, {1, 2});
  CHECK(u.coeffs == std::vector<cplx>{0.0, 0.5, 0.5, 0.0, 0.0, 0.0});

  CHECK_THROWS_AS(dirac(z2, 5), IndexOutOfRange);
  CHECK_THROWS_AS(from_weights(z2, {1.0}), IndexOutOfRange);
}

TEST_CASE("convolution examples") {
  GroupPtr s3 = symmetric_group(3);
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> pick(0, 5);
  for (int t = 0; t < 20; ++t) {
    int a = pick(rng), b = pick(rng);
    FiniteMeasure c = convolve(dirac(s3, a), dirac(s3, b));
    CHECK(sup_distance(c, dirac(s3, s3->op(a, b))) == 0.0);
  }

  GroupPtr z2 = cyclic_group(2);
  FiniteMeasure mu = from_weights(z2, {0.25, 0.75});
  FiniteMeasure sq = convolve(mu, mu);
  CHECK(std::abs(sq.coeffs[0] - cplx{5.0 / 8.0, 0}) < 1e-15);
  CHECK(std::abs(sq.coeffs[1] - cplx{3.0 / 8.0, 0}) < 1e-15);

  IntMeasure step = z_measure({{0, 0.5}, {1, 0.5}});
  IntMeasure two = convolve(step, step);
  CHECK(std::abs(two.at(0) - cplx{0.25, 0}) < 1e-16);
  CHECK(std::abs(two.at(1) - cplx{0.5, 0}) < 1e-16);
  CHECK(std::abs(two.at(2) - cplx{0.25, 0}) < 1e-16);

  GroupPtr z2b = cyclic_group(3);
  CHECK_THROWS_AS(convolve(mu, haar(z2b)), GroupMismatch);
}

TEST_CASE("powers") {
  GroupPtr z2 = cyclic_group(2);
  FiniteMeasure mu = from_weights(z2, {0.25, 0.75});
  CHECK(sup_distance(power(mu, 0), dirac(z2, 0)) == 0.0);
  CHECK(sup_distance(power(dirac(z2, 1), 3), dirac(z2, 1)) == 0.0);

  GroupPtr z4 = cyclic_group(4);
  FiniteMeasure nu = uniform_on_set(z4, {1, 3});
  CHECK(sup_distance(power(nu, 2), from_weights(z4, {0.5, 0.0, 0.5, 0.0})) < 1e-15);

  CHECK(sup_distance(power(z_dirac(1), 0), z_dirac(0)) == 0.0);
}

TEST_CASE("involution") {
  GroupPtr z4 = cyclic_group(4);
  CHECK(sup_distance(involution(dirac(z4, 1)), dirac(z4, 3)) == 0.0);
  CHECK(sup_distance(involution(cplx{0, 1} * dirac(z4, 1)), cplx{0, -1} * dirac(z4, 3)) == 0.0);

  GroupPtr z2 = cyclic_group(2);
  FiniteMeasure mu = from_weights(z2, {0.3, 0.7});
  CHECK(sup_distance(involution(mu), mu) == 0.0);  // all elements self-inverse, real coeffs

  std::mt19937_64 rng(11);
  GroupPtr s3 = symmetric_group(3);
  FiniteMeasure r = random_complex_measure(s3, rng);
  CHECK(sup_distance(involution(involution(r)), r) == 0.0);
  CHECK(tv_norm(involution(r)) == Catch::Approx(tv_norm(r)).epsilon(1e-14));

  IntMeasure zi = z_measure({{-2, cplx{0, 1}}, {5, 2.0}});
  IntMeasure zt = involution(zi);
  CHECK(zt.at(2) == cplx{0, -1});
  CHECK(zt.at(-5) == cplx{2, 0});
}

TEST_CASE("tv norm and support") {
  GroupPtr z2 = cyclic_group(2);
  CHECK(tv_norm(uniform_on_set(z2, {0, 1})) == Catch::Approx(1.0));
  CHECK(tv_norm(dirac(z2, 0) - dirac(z2, 1)) == Catch::Approx(2.0));

  FiniteMeasure tiny = from_weights(z2, {0.5, 1e-15});
  CHECK(support(tiny, 1e-12) == std::vector<int>{0});
  CHECK(support(tiny, 0.0) == (std::vector<int>{0, 1}));
}

TEST_CASE("classification examples") {
  GroupPtr z2 = cyclic_group(2);
  MeasureClass a = classify(from_weights(z2, {0.25, 0.75}));
  CHECK(a.probability);
  CHECK(a.adapted);
  CHECK(a.strictly_aperiodic);
  CHECK(a.power_bounded);
  CHECK(a.power_bounded_certificate == "tv_norm^n = 1");

  GroupPtr z4 = cyclic_group(4);
  MeasureClass b = classify(uniform_on_set(z4, {1, 3}));
  CHECK(b.adapted);
  CHECK_FALSE(b.strictly_aperiodic);
  REQUIRE(b.coset_witness.has_value());
  CHECK(b.coset_witness->representative == 1);
  CHECK(b.coset_witness->subgroup.elements == (std::vector<int>{0, 2}));

  GroupPtr s3 = symmetric_group(3);
  int t12 = perm_index(s3, {1, 0, 2});
  int t13 = perm_index(s3, {2, 1, 0});
  int t23 = perm_index(s3, {0, 2, 1});
  MeasureClass c = classify(uniform_on_set(s3, {t12, t13, t23}));
  CHECK(c.adapted);
  CHECK_FALSE(c.strictly_aperiodic);
  REQUIRE(c.coset_witness.has_value());
  CHECK(c.coset_witness->subgroup.size() == 3);  // the odd coset of A3

  CHECK_THROWS_AS(classify(from_weights(z2, {0.0, 0.0})), EmptySupport);
}

TEST_CASE("classification on Z") {
  MeasureClass a = classify(z_measure({{0, 0.5}, {1, 0.5}}));
  CHECK(a.probability);
  CHECK(a.adapted);
  CHECK(a.strictly_aperiodic);

  MeasureClass b = classify(z_measure({{-1, 0.5}, {1, 0.5}}));
  CHECK(b.adapted);  // gcd(-1, 1) = 1
  CHECK(b.z_generated->d == 1);
  CHECK_FALSE(b.strictly_aperiodic);  // support inside the coset 1 + 2Z
  CHECK(b.z_difference_generated->d == 2);

  MeasureClass c = classify(z_dirac(1));
  CHECK(c.adapted);
  CHECK_FALSE(c.strictly_aperiodic);  // singleton support sits in a coset of {0}

  MeasureClass d = classify(z_measure({{2, 0.5}, {6, 0.5}}));
  CHECK_FALSE(d.adapted);
  CHECK(d.z_generated->d == 2);
  CHECK_FALSE(d.strictly_aperiodic);
  CHECK(d.z_difference_generated->d == 4);
}

TEST_CASE("action on functions") {
  GroupPtr z6 = cyclic_group(6);
  GroupFunction f{z6, {1.0, 2.0, 0.0, -1.0, cplx{0, 1}, 3.0}};

  GroupFunction mean = act_on_function(haar(z6), f);
  cplx avg{};
  for (const cplx& v : f.values) avg += v;
  avg /= 6.0;
  for (const cplx& v : mean.values) CHECK(std::abs(v - avg) < 1e-15);

  for (int g = 0; g < 6; ++g) {
    GroupFunction lhs = act_on_function(dirac(z6, g), f);
    GroupFunction rhs = translate(f, g);
    for (int s = 0; s < 6; ++s) CHECK(lhs.values[s] == rhs.values[s]);
  }

  GroupPtr z2 = cyclic_group(2);
  GroupFunction e0{z2, {1.0, 0.0}};
  GroupFunction acted = act_on_function(from_weights(z2, {0.25, 0.75}), e0);
  CHECK(std::abs(acted.values[0] - cplx{0.25, 0}) < 1e-16);
  CHECK(std::abs(acted.values[1] - cplx{0.75, 0}) < 1e-16);
}

TEST_CASE("action is a norm contraction") {
  std::mt19937_64 rng(2024);
  const double inf = std::numeric_limits<double>::infinity();
  for (GroupPtr g : {cyclic_group(5), symmetric_group(3), dihedral_group(4)}) {
    for (int t = 0; t < 10; ++t) {
      FiniteMeasure mu = random_complex_measure(g, rng);
      GroupFunction f{g, random_complex_measure(g, rng).coeffs};
      GroupFunction out = act_on_function(mu, f);
      for (double p : {1.0, 2.0, inf})
        CHECK(function_norm(out, p) <= tv_norm(mu) * function_norm(f, p) + 1e-12);
    }
  }
}

TEST_CASE("convolution algebra laws, randomized") {
  std::mt19937_64 rng(31337);
  std::vector<GroupPtr> groups = {cyclic_group(24), symmetric_group(4), dihedral_group(12),
                                  product_group(cyclic_group(2), cyclic_group(6))};
  for (GroupPtr g : groups) {
    for (int t = 0; t < 5; ++t) {
      FiniteMeasure a = random_complex_measure(g, rng);
      FiniteMeasure b = random_complex_measure(g, rng);
      FiniteMeasure c = random_complex_measure(g, rng);
      CHECK(tv_distance(convolve(convolve(a, b), c), convolve(a, convolve(b, c))) < 1e-12 * g->order);
      FiniteMeasure e = dirac(g, g->identity);
      CHECK(tv_distance(convolve(e, a), a) == 0.0);
      CHECK(tv_distance(convolve(a, e), a) == 0.0);
      CHECK(tv_norm(convolve(a, b)) <= tv_norm(a) * tv_norm(b) + 1e-12);
      // star-algebra law
      CHECK(tv_distance(involution(convolve(a, b)), convolve(involution(b), involution(a))) < 1e-12 * g->order);
    }
  }
}

TEST_CASE("support identity for symmetrized probability measures") {
  std::mt19937_64 rng(99);
  for (GroupPtr g : {symmetric_group(3), cyclic_group(8), dihedral_group(5)}) {
    std::uniform_real_distribution<double> u(0.1, 1.0);
    std::uniform_int_distribution<int> coin(0, 1);
    for (int t = 0; t < 25; ++t) {
      std::vector<double> w(g->order, 0.0);
      double total = 0;
      for (int x = 0; x < g->order; ++x)
        if (coin(rng)) total += (w[x] = u(rng));
      if (total == 0) continue;
      std::vector<cplx> cw(g->order);
      for (int x = 0; x < g->order; ++x) cw[x] = w[x] / total;
      FiniteMeasure mu = from_weights(g, cw);

      std::set<int> expected;
      std::vector<int> s = support(mu);
      for (int a : s)
        for (int b : s) expected.insert(g->op(g->inv(a), b));
      std::vector<int> got = support(convolve(involution(mu), mu));
      CHECK(got == std::vector<int>(expected.begin(), expected.end()));
    }
  }
}

TEST_CASE("strict aperiodicity iff symmetrization is adapted, exhaustively to order 8") {
  for (GroupPtr g : {cyclic_group(6), cyclic_group(8), symmetric_group(3), dihedral_group(4),
                     product_group(cyclic_group(2), cyclic_group(4))}) {
    for (unsigned mask = 1; mask < (1u << g->order); ++mask) {
      std::vector<int> s;
      for (int x = 0; x < g->order; ++x)
        if (mask & (1u << x)) s.push_back(x);
      FiniteMeasure mu = uniform_on_set(g, s);
      MeasureClass cls = classify(mu);  // internally cross-checks both criteria
      MeasureClass sym = classify(convolve(involution(mu), mu));
      REQUIRE(cls.strictly_aperiodic == sym.adapted);
      if (cls.strictly_aperiodic) CHECK(cls.adapted);
    }
  }
}

TEST_CASE("haar measures of subgroups are idempotent") {
  for (GroupPtr g : {symmetric_group(3), cyclic_group(12)}) {
    for (const Subgroup& h : enumerate_subgroups(g)) {
      FiniteMeasure m = haar_on_subgroup(h);
      CHECK(classify(m).idempotent);
    }
  }
}

TEST_CASE("Z window bookkeeping") {
  IntMeasure walk = z_measure({{-1, 0.5}, {1, 0.5}});
  IntMeasure p4 = power(walk, 4);
  CHECK(p4.lo() == -4);
  CHECK(p4.hi() == 4);
  CHECK(std::abs(p4.at(0) - cplx{6.0 / 16.0, 0}) < 1e-15);
  CHECK(p4.at(1) == cplx{});  // parity hole stays stored, support filters it
  CHECK(support(p4).size() == 5);

  auto row = pascal_row(64);
  IntMeasure drift = power(z_measure({{0, 0.5}, {1, 0.5}}), 64);
  for (int j = 0; j <= 64; ++j)
    CHECK(std::abs(drift.at(j) - cplx{static_cast<double>(row[j]), 0}) < 1e-12);

  CHECK_THROWS_AS(power(z_measure({{0, 0.5}, {2000000, 0.5}}), 2), SupportOverflow);
}

TEST_CASE("pairing and l2 inner products") {
  GroupPtr z3 = cyclic_group(3);
  FiniteMeasure mu = uniform_on_set(z3, {1});
  GroupFunction f{z3, {1.0, cplx{0, 2}, -1.0}};
  CHECK(pairing(mu, f) == f.values[1]);

  ZFunction u = z_measure({{0, cplx{1, 1}}, {3, 2.0}});
  ZFunction v = z_measure({{0, cplx{0, 1}}, {2, 5.0}});
  CHECK(l2_inner(u, v) == cplx{1, 1} * std::conj(cplx{0, 1}));
}
