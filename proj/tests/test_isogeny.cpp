#include <algorithm>
#include <map>
#include <random>
#include <set>

#include "doctest.h"
#include "isochar/isogeny.hpp"

using namespace isochar;

namespace {

const std::uint64_t kPrimes[] = {5, 7, 11, 13, 17, 19, 23, 29, 31};

// classical Phi_2(X, Y), evaluated in the field
Elem phi2(const FiniteField& F, Elem x, Elem y) {
  struct T {
    int i, j;
    const char* c;
  };
  const T terms[] = {{3, 0, "1"},          {2, 2, "-1"},          {2, 1, "1488"},       {2, 0, "-162000"},
                     {1, 1, "40773375"},  {1, 0, "8748000000"}, {0, 0, "-157464000000000"}};
  Elem s = 0;
  for (const auto& t : terms) {
    Elem c = F.from_int(mpz_class(t.c));
    Elem m1 = F.mul(F.pow(x, t.i), F.pow(y, t.j));
    s = F.add(s, F.mul(c, m1));
    if (t.i != t.j) s = F.add(s, F.mul(c, F.mul(F.pow(y, t.i), F.pow(x, t.j))));
  }
  return s;
}

FPoly cubic(const Curve& e) { return FPoly(e.field, {e.b, e.a, 0, 1}); }

// x(2P) from the duplication formula
std::pair<FPoly, FPoly> doubling(const Curve& e) {
  const auto& K = *e.field;
  FPoly num(e.field, {K.mul(e.a, e.a), K.neg(K.mul(K.from_int(8), e.b)), K.neg(K.mul(K.from_int(2), e.a)), 0, 1});
  FPoly den = scale(cubic(e), K.from_int(4));
  return {num, den};
}

// Velu maps are normalized: F(x) * (x')^2 equals the image cubic evaluated at x'
bool satisfies_image_equation(const Isogeny& phi) {
  const auto& K = *phi.source.field;
  const FPoly& N = phi.num;
  const FPoly& D = phi.den;
  FPoly wr = derivative(N) * D - N * derivative(D);
  FPoly lhs = cubic(phi.source) * wr * wr;
  FPoly D2 = D * D;
  FPoly rhs = D * (N * N * N + scale(N * D2, phi.target.a) + scale(D2 * D, phi.target.b));
  (void)K;
  return lhs == rhs;
}

std::vector<Elem> ss_js(FieldTower& t) {
  auto F2 = t.level(2);
  std::vector<Elem> out;
  for (Elem j = 0; j < F2->order(); ++j)
    if (is_supersingular(curve_from_j(F2, j))) out.push_back(j);
  return out;
}

}  // namespace

TEST_CASE("j-invariants") {
  FieldTower t(13, 4);
  auto F = t.level(1);
  CHECK(j_invariant(make_curve(F, 0, 1)) == 0);
  CHECK(j_invariant(make_curve(F, 1, 0)) == F->from_int(1728));
  CHECK(j_invariant(curve_from_j(F, 5)) == 5);
  for (Elem j = 0; j < 13; ++j) CHECK(j_invariant(curve_from_j(F, j)) == j);
  CHECK_THROWS(make_curve(F, 0, 0));
}

TEST_CASE("supersingularity agrees with point counting") {
  for (auto p : kPrimes) {
    FieldTower t(p, 2);
    auto F2 = t.level(2);
    for (Elem j = 0; j < F2->order(); ++j) {
      Curve e = curve_from_j(F2, j);
      std::uint64_t n = point_count(e);
      std::int64_t trace = static_cast<std::int64_t>(p * p + 1) - static_cast<std::int64_t>(n);
      CHECK(is_supersingular(e) == (trace % static_cast<std::int64_t>(p) == 0));
    }
  }
  FieldTower t11(11, 2);
  auto F = t11.level(1);
  CHECK(is_supersingular(curve_from_j(F, 0)));
  CHECK(is_supersingular(curve_from_j(F, 1)));
  CHECK(!is_supersingular(curve_from_j(F, 2)));
  FieldTower t13(13, 2);
  auto js = ss_js(t13);
  CHECK(js == std::vector<Elem>{5});
}

TEST_CASE("mass formula for supersingular j") {
  for (auto p : kPrimes) {
    FieldTower t(p, 2);
    mpq_class mass = 0;
    for (Elem j : ss_js(t)) {
      mpq_class w(2, automorphism_count(curve_from_j(t.level(2), j)));
      w.canonicalize();
      mass += w;
    }
    mpq_class expect(p - 1, 12);
    expect.canonicalize();
    CHECK(mass == expect);
  }
}

TEST_CASE("supersingular models have Frobenius -p") {
  for (auto p : kPrimes) {
    FieldTower t(p, 2);
    for (Elem j : ss_js(t)) {
      Curve e = supersingular_model(t.level(2), j);
      CHECK(j_invariant(e) == j);
      CHECK(point_count(e) == (p + 1) * (p + 1));
    }
  }
}

TEST_CASE("cyclic subgroups") {
  FieldTower t(11, 8);
  auto F = t.level(1);
  Curve e = make_curve(F, 1, 0);
  auto two = cyclic_subgroups(e, 2, &t);
  REQUIRE(two.size() == 3);
  auto F2 = t.level(2);
  CHECK(two[0].kernel.field == F2);
  CHECK(two[0].kernel == FPoly::x(F2));
  Elem alpha = two[1].kernel.coeff(0);
  CHECK(F2->mul(alpha, alpha) == F2->neg(1));
  CHECK(two[2].kernel.coeff(0) == F2->neg(alpha));

  // n = 3 on a few curves over F_13
  FieldTower t13(13, 24);
  auto G = t13.level(1);
  for (Elem j : {Elem(2), Elem(7)}) {
    auto subs = cyclic_subgroups(curve_from_j(G, j), 3, &t13);
    CHECK(subs.size() == 4);
    for (auto& c : subs) CHECK(c.kernel.degree() == 1);
  }

  // n = 7 on supersingular curves over F_121
  for (Elem j : {Elem(0), Elem(1)}) {
    Curve ss = supersingular_model(F2, j);
    auto subs = cyclic_subgroups(ss, 7);
    REQUIRE(subs.size() == 8);
    FPoly prod = FPoly::constant(F2, 1);
    for (auto& c : subs) {
      CHECK(c.kernel.degree() == 3);
      prod = prod * c.kernel;
      // closure: doubling permutes the roots of the kernel polynomial
      auto [num, den] = doubling(ss);
      FPoly r = mulmod(num % c.kernel, invmod(den % c.kernel, c.kernel), c.kernel);
      CHECK(compose_mod(c.kernel, r, c.kernel).is_zero());
    }
    CHECK(prod.degree() == 24);
    CHECK(prod == monic(division_polynomial(ss, 7)));
  }
}

TEST_CASE("Velu isogenies") {
  for (auto p : {11ull, 13ull, 17ull, 19ull}) {
    FieldTower t(p, 2);
    auto F2 = t.level(2);
    for (Elem j : ss_js(t)) {
      Curve e = supersingular_model(F2, j);
      for (unsigned n : {2u, 3u, 5u, 7u}) {
        if (n == p) continue;
        auto subs = cyclic_subgroups(e, n);
        for (const auto& c : subs) {
          Isogeny phi = velu(e, c);
          CHECK(satisfies_image_equation(phi));
          CHECK(phi.num.degree() == static_cast<int>(n));
          CHECK(phi.den.degree() == static_cast<int>(n) - 1);
          Elem jt = j_invariant(phi.target);
          CHECK(is_supersingular(phi.target));
          if (n == 2) CHECK(phi2(*F2, j, jt) == 0);
          // image curve stays in the Frobenius -p class
          CHECK(point_count(phi.target) == (p + 1) * (p + 1));
        }
      }
    }
  }
}

TEST_CASE("Velu is Galois equivariant") {
  FieldTower t(23, 2);
  auto F2 = t.level(2);
  for (Elem j : ss_js(t)) {
    Curve e = supersingular_model(F2, j);
    Curve ep{F2, F2->frobenius(e.a), F2->frobenius(e.b)};
    std::multiset<Elem> a, b;
    for (auto& c : cyclic_subgroups(e, 3)) a.insert(F2->frobenius(j_invariant(velu(e, c).target)));
    for (auto& c : cyclic_subgroups(ep, 3)) b.insert(j_invariant(velu(ep, c).target));
    CHECK(a == b);
  }
}

TEST_CASE("push_subgroup") {
  FieldTower t(11, 2);
  auto F2 = t.level(2);
  Curve e = supersingular_model(F2, 0);
  auto sevens = cyclic_subgroups(e, 7);
  for (auto& c : sevens) {
    CHECK(push_subgroup(Isogeny::identity(e), c).kernel == c.kernel);
  }
  // C -> phi_D(C) -> back through the dual recovers C up to automorphism
  auto threes = cyclic_subgroups(e, 3);
  for (auto& c : sevens) {
    for (auto& d : threes) {
      Isogeny phi = velu(e, d);
      CyclicSubgroup img = push_subgroup(phi, c);
      CHECK(img.order == 7);
      CHECK((division_polynomial(phi.target, 7) % img.kernel).is_zero());
      bool recovered = false;
      for (auto& k : cyclic_subgroups(phi.target, 3)) {
        Isogeny psi = velu(phi.target, k);
        auto s = isomorphism_scale(psi.target, e);
        if (!s) continue;
        CyclicSubgroup back = push_subgroup(psi, img);
        FPoly moved = transform_kernel(back.kernel, *s);
        if (canonical_kernel(e, moved) == canonical_kernel(e, c.kernel)) recovered = true;
      }
      CHECK(recovered);
    }
  }
}

TEST_CASE("automorphism counts") {
  FieldTower t(11, 2);
  auto F2 = t.level(2);
  CHECK(automorphism_count(curve_from_j(F2, 3)) == 2);
  CHECK(automorphism_count(curve_from_j(F2, 0)) == 6);
  CHECK(automorphism_count(curve_from_j(F2, 1)) == 4);
  Curve e = supersingular_model(F2, 0);
  std::map<unsigned, int> counts;
  for (auto& c : cyclic_subgroups(e, 7)) ++counts[automorphism_count(e, &c)];
  // zeta_3 has two eigenlines on E[7] since 7 = 1 mod 3
  CHECK(counts[6] == 2);
  CHECK(counts[2] == 6);
  // orbit sizes match stabilizers
  std::map<FPoly, int> orbit;
  for (auto& c : cyclic_subgroups(e, 7)) ++orbit[canonical_kernel(e, c.kernel)];
  CHECK(orbit.size() == 4);
}
