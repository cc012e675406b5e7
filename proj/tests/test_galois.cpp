#include <random>

#include "doctest.h"
#include "isochar/galois.hpp"

using namespace isochar;

namespace {

FPoly poly(const FieldPtr& F, std::initializer_list<long> coeffs) {
  std::vector<Elem> c;
  for (long v : coeffs) c.push_back(F->from_int(v));
  return FPoly(F, c);
}

std::vector<Elem> brute_roots(const FPoly& f) {
  std::vector<Elem> r;
  for (Elem a = 0; a < f.field->order(); ++a) {
    FPoly g = f;
    while (g.eval(a) == 0 && g.degree() > 0) {
      r.push_back(a);
      g = g / FPoly::linear(f.field, a);
    }
  }
  return r;
}

FPoly product(const std::vector<std::pair<FPoly, unsigned>>& fac, const FieldPtr& F) {
  FPoly r = FPoly::constant(F, 1);
  for (const auto& [g, m] : fac)
    for (unsigned i = 0; i < m; ++i) r = r * g;
  return r;
}

}  // namespace

TEST_CASE("levels and Frobenius") {
  FieldTower t(11, 8);
  FieldPtr f1 = t.level(1);
  CHECK(f1->order() == 11);
  FieldPtr f2 = t.level(2);
  CHECK(f2->order() == 121);
  std::mt19937_64 rng(1);
  for (int i = 0; i < 50; ++i) {
    Elem x = f2->random(rng);
    CHECK(f2->pow(x, 121) == x);
    CHECK(f2->frobenius(f2->frobenius(x)) == x);
    Elem y = f2->random(rng);
    CHECK(f2->frobenius(f2->add(x, y)) == f2->add(f2->frobenius(x), f2->frobenius(y)));
    if (x) CHECK(f2->mul(x, f2->inv(x)) == 1);
  }
  for (Elem e = 0; e < 11; ++e) CHECK(f2->frobenius(e) == e);
  Elem g = f2->generator();
  CHECK(f2->frobenius(g) != g);

  FieldPtr f4 = t.level(4);
  CHECK(f4->order() == 14641);
  for (int i = 0; i < 50; ++i) {
    Elem a = f2->random(rng), b = f2->random(rng);
    CHECK(t.embed(f2->add(a, b), 2, 4) == f4->add(t.embed(a, 2, 4), t.embed(b, 2, 4)));
    CHECK(t.embed(f2->mul(a, b), 2, 4) == f4->mul(t.embed(a, 2, 4), t.embed(b, 2, 4)));
    Elem x = f4->random(rng);
    CHECK(f4->pow(x, mpz_class(14641)) == x);
  }
  // a large level without tables
  FieldPtr f8 = t.level(8);
  for (int i = 0; i < 10; ++i) {
    Elem x = f8->random(rng);
    mpz_class q;
    mpz_ui_pow_ui(q.get_mpz_t(), 11, 8);
    CHECK(f8->pow(x, q) == x);
    Elem a = f2->random(rng), b = f2->random(rng);
    CHECK(t.embed(f2->mul(a, b), 2, 8) == f8->mul(t.embed(a, 2, 8), t.embed(b, 2, 8)));
    CHECK(t.embed(t.embed(a, 2, 4), 4, 8) == t.embed(a, 2, 8));
  }
  CHECK_THROWS_AS(t.level(9), DegreeCapExceeded);
}

TEST_CASE("moduli are the lowest irreducibles") {
  // over F_5 the lowest degree-2 irreducible in the encoding order is x^2 + 2
  CHECK(lowest_irreducible(5, 2) == std::vector<std::uint64_t>{2, 0, 1});
  CHECK(lowest_irreducible(11, 2) == std::vector<std::uint64_t>{1, 0, 1});
  // brute force: every smaller monic quadratic over F_7 has a root
  auto mod = lowest_irreducible(7, 2);
  FieldTower t(7, 2);
  auto F = t.level(1);
  for (std::uint64_t c0 = 0; c0 < 7; ++c0)
    for (std::uint64_t c1 = 0; c1 < 7; ++c1) {
      if (c1 * 7 + c0 >= mod[1] * 7 + mod[0]) continue;
      FPoly f(F, {c0, c1, 1});
      CHECK(!brute_roots(f).empty());
    }
  CHECK(brute_roots(FPoly(F, {mod[0], mod[1], 1})).empty());
}

TEST_CASE("factorization") {
  FieldTower t11(11, 4);
  auto F = t11.level(1);
  auto fx = factor_squarefree(poly(F, {1, 0, 1}));
  REQUIRE(fx.size() == 1);
  CHECK(fx[0].first.degree() == 2);
  CHECK(brute_roots(poly(F, {1, 0, 1})).empty());

  auto fy = factor_squarefree(poly(F, {-1, 0, 1}));
  REQUIRE(fy.size() == 2);
  CHECK(fy[0].first == poly(F, {-10, 1}));  // x - 10 = x + 1 sorted by constant
  CHECK(product(fy, F) == poly(F, {-1, 0, 1}));

  FieldTower t5(5, 2);
  auto F5 = t5.level(1);
  auto fz = factor_squarefree(poly(F5, {0, -1, 0, 1}));
  CHECK(fz.size() == 3);
  for (auto& [g, m] : fz) CHECK((g.degree() == 1 && m == 1));

  // random products over F_{11^2}, including repeated and p-th power factors
  auto F2 = t11.level(2);
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 25; ++trial) {
    FPoly f = FPoly::constant(F2, 1);
    int nf = 1 + rng() % 4;
    for (int i = 0; i < nf; ++i) {
      std::vector<Elem> c(2 + rng() % 4);
      for (auto& x : c) x = F2->random(rng);
      c.back() = 1;
      FPoly g(F2, c);
      unsigned m = 1 + rng() % 3;
      if (trial % 5 == 0) m = 11;
      for (unsigned k = 0; k < m; ++k) f = f * g;
    }
    auto fac = factor_squarefree(f);
    CHECK(product(fac, F2) == f);
    int total = 0;
    for (auto& [g, m] : fac) {
      CHECK(is_irreducible(g));
      CHECK(g.lead() == 1);
      total += g.degree() * static_cast<int>(m);
    }
    CHECK(total == f.degree());
  }
}

TEST_CASE("roots") {
  FieldTower t11(11, 2);
  auto F = t11.level(1);
  CHECK(roots_in_level(poly(F, {-1, 0, 1}), F) == std::vector<Elem>{1, 10});
  CHECK(roots_in_level(poly(F, {1, 0, 1}), F).empty());
  auto F2 = t11.level(2);
  auto r2 = roots_in_level(poly(F, {1, 0, 1}), F2, &t11);
  CHECK(r2.size() == 2);
  CHECK(r2 == brute_roots(FPoly(F2, {1, 0, 1})));
  FieldTower t7(7, 1);
  auto F7 = t7.level(1);
  CHECK(roots_in_level(poly(F7, {9, -6, 1}), F7) == std::vector<Elem>{3, 3});

  // agreement with exhaustive search on a 14641-element level
  FieldTower t(11, 4);
  auto F4 = t.level(4);
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 6; ++trial) {
    FPoly f = FPoly::constant(F4, 1);
    for (int i = 0; i < 3; ++i) f = f * FPoly::linear(F4, F4->random(rng));
    std::vector<Elem> extra(3);
    for (auto& x : extra) x = F4->random(rng);
    extra.back() = 1;
    f = f * FPoly(F4, extra);
    CHECK(roots_in_level(f, F4) == brute_roots(f));
  }
}

TEST_CASE("element text round trip") {
  FieldTower t(13, 3);
  auto F = t.level(3);
  std::mt19937_64 rng(2);
  for (int i = 0; i < 30; ++i) {
    Elem a = F->random(rng);
    CHECK(F->parse(F->to_string(a)) == a);
  }
  CHECK(t.level(1)->to_string(5) == "5");
}

TEST_CASE("integer factoring") {
  auto f = factor_integer(mpz_class(360));
  REQUIRE(f.size() == 3);
  CHECK(f[0] == std::pair<mpz_class, unsigned>{2, 3});
  CHECK(f[2] == std::pair<mpz_class, unsigned>{5, 1});
  auto g = factor_integer(mpz_class("1000000016000000063"));  // 1000000007 * 1000000009
  REQUIRE(g.size() == 2);
  CHECK(g[0].first == 1000000007);
  CHECK(is_prime(31));
  CHECK(!is_prime(1));
  CHECK(!is_prime(4));
}

TEST_CASE("factoring in characteristic 2 and 3") {
  for (std::uint64_t p : {2ull, 3ull}) {
    FieldTower t(p, 12);
    for (unsigned k : {1u, 2u, 3u}) {
      auto F = t.level(k);
      std::mt19937_64 rng(7);
      for (int trial = 0; trial < 40; ++trial) {
        std::vector<Elem> c(2 + trial % 9);
        for (auto& x : c) x = F->random(rng);
        c.back() = 1;
        FPoly f(F, c);
        FPoly prod = FPoly::constant(F, 1);
        for (const auto& [g, e] : factor_squarefree(f, kFactorSeed)) {
          CHECK(is_irreducible(g));
          for (unsigned i = 0; i < e; ++i) prod = prod * g;
        }
        CHECK(prod == monic(f));
      }
    }
  }
  FieldTower t2(2, 4);
  auto F4 = t2.level(2);
  // x^3 - 1 splits over F_4
  auto roots = roots_in_level(FPoly(t2.level(1), {1, 0, 0, 1}), F4, &t2);
  CHECK(roots.size() == 3);
}
