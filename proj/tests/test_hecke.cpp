#include <algorithm>
#include <map>

#include "doctest.h"
#include "isochar/errors.hpp"
#include "isochar/hecke.hpp"
#include "isochar/ssmod.hpp"

using namespace isochar;

namespace {

OperatorSet pick(const RestrictedModule& r, const std::vector<std::string>& labels) {
  OperatorSet out;
  for (const auto& l : labels) out[l] = r.operators.at(l);
  return out;
}

// degree-zero edge module for (p, q) with its algebra generators
struct Fixture {
  GraphModule m;
  RestrictedModule deg;
  OperatorSet gens;
  HeckeAlgebra t;
  Lattice ribet;  // inside the degree-zero coordinates
};

Fixture make(std::uint64_t p, std::uint64_t q, unsigned bound) {
  Fixture f;
  f.m = build_edge_module(p, q, bound);
  f.deg = degree_zero_submodule(f.m);
  f.gens = pick(f.deg, generator_labels(p * q, bound));
  f.t = algebra_from_operators(f.gens);
  Lattice k = kernel_basis(vstack(f.m.op("alpha"), f.m.op("beta")));
  f.ribet = Lattice(f.deg.lattice.rank(), coordinates_in(f.deg.lattice, k.basis()));
  return f;
}

IntVector minus(IntVector a, const IntVector& b) {
  for (std::size_t i = 0; i < a.size(); ++i) a[i] -= b[i];
  return a;
}

}  // namespace

TEST_CASE("trivial algebras") {
  auto t = algebra_from_operators({{"I", IntMatrix::identity(3)}});
  CHECK(t.rank() == 1);
  auto d = algebra_from_operators({{"I", IntMatrix::identity(2)}, {"D", IntMatrix{{1, 0}, {0, 2}}}});
  CHECK(d.rank() == 2);
  CHECK(maximal_ideals_above(d, 5).size() == 2);
  CHECK(maximal_ideals_above(t, 7).size() == 1);
  CHECK(maximal_ideals_above(t, 7)[0].degree == 1);
  CHECK_THROWS_AS(algebra_from_operators({{"A", IntMatrix{{0, 1}, {0, 0}}}, {"B", IntMatrix{{0, 0}, {1, 0}}}}),
                  NonCommuting);
  // Z[i] inside M_2(Z): one prime of degree 2 above 3, two above 5, ramified at 2
  auto gi = algebra_from_operators({{"i", IntMatrix{{0, -1}, {1, 0}}}});
  CHECK(gi.rank() == 2);
  auto above3 = maximal_ideals_above(gi, 3);
  REQUIRE(above3.size() == 1);
  CHECK(above3[0].degree == 2);
  CHECK(maximal_ideals_above(gi, 5).size() == 2);
  auto above2 = maximal_ideals_above(gi, 2);
  REQUIRE(above2.size() == 1);
  CHECK(above2[0].local_dimension == 2);
  CHECK(above2[0].degree == 1);
}

TEST_CASE("Sturm bound") {
  CHECK(sturm_generator_bound(35) == 8);
  CHECK(sturm_generator_bound(77) == 16);
  CHECK(generator_labels(77, 16) == std::vector<std::string>{"T2", "T3", "T5", "T13", "w7", "w11"});
}

TEST_CASE("edge module algebra for (11,7)") {
  Fixture f = make(11, 7, 16);
  CHECK(f.t.rank() == 7);
  // multiplication closes, is commutative and has a unit
  auto table = f.t.multiplication_table();
  const IntVector one = f.t.one();
  for (std::size_t i = 0; i < f.t.rank(); ++i) {
    IntVector ei(f.t.rank(), 0);
    ei[i] = 1;
    CHECK(f.t.multiply(one, ei) == ei);
    for (std::size_t j = 0; j < f.t.rank(); ++j) CHECK(table[i].col(j) == table[j].col(i));
  }
  // more Hecke operators do not enlarge the algebra
  auto more = f.gens;
  auto wide = build_edge_module(11, 7, 19);
  auto wdeg = degree_zero_submodule(wide);
  more["T17"] = wdeg.operators.at("T17");
  more["T19"] = wdeg.operators.at("T19");
  CHECK(algebra_from_operators(more) == f.t);
  CHECK(f.t.relations_hold(f.gens));
  for (std::size_t i = 0; i < f.t.rank(); ++i) CHECK(f.t.act_basis(f.gens)[i] == f.t.basis()[i]);
}

TEST_CASE("new quotient and annihilators") {
  Fixture f = make(11, 7, 16);
  REQUIRE(f.ribet.rank() == 5);
  auto nq = new_quotient(f.t, f.ribet);
  CHECK(nq.algebra.rank() == 5);
  CHECK(nq.kernel.rank() == 2);
  CHECK(is_ideal(f.t, nq.kernel));
  auto kp = annihilator(f.t, nq.kernel);
  CHECK(nq.kernel.rank() + kp.rank() == f.t.rank());
  auto kpp = perp(f.t, kp);
  CHECK(kpp.contains(nq.kernel));
  CHECK(kpp.rank() == nq.kernel.rank());

  auto whole = new_quotient(f.t, Lattice::full(7));
  CHECK(whole.kernel.rank() == 0);
  CHECK(whole.algebra == f.t);
  CHECK(new_quotient(f.t, Lattice::zero(7)).algebra.rank() == 0);
  CHECK(annihilator(f.t, Lattice::zero(f.t.rank())).rank() == f.t.rank());
  CHECK(annihilator(f.t, Lattice::full(f.t.rank())).rank() == 0);
  CHECK_THROWS_AS(new_quotient(f.t, Lattice(7, IntMatrix{{1, 0, 0, 0, 0, 0, 0}})), NotStable);
}

TEST_CASE("maximal ideals against characteristic polynomials") {
  Fixture f = make(11, 7, 16);
  auto nq = new_quotient(f.t, f.ribet);
  const HeckeAlgebra& t = nq.algebra;
  for (std::uint64_t ell : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull}) {
    auto ms = maximal_ideals_above(t, ell);
    std::size_t total = 0;
    for (const auto& m : ms) {
      total += m.local_dimension;
      CHECK(m.local_dimension % m.degree == 0);
      CHECK(m.lattice.contains(IntVector(t.rank(), Integer(static_cast<unsigned long>(ell)))));
      CHECK(!m.contains(t.one()));
      // reduction is a ring map
      for (const auto& a : t.labels())
        for (const auto& b : t.labels()) {
          IntVector x = t.generator_coords(a), y = t.generator_coords(b);
          CHECK(m.reduce(t.multiply(x, y)) == m.residue_field->mul(m.images.at(a), m.images.at(b)));
        }
    }
    CHECK(total == t.rank());
    // T3 images: each irreducible factor of charpoly(T3) mod ell accounts for its multiplicity
    IntMatrix t3 = t.generator("T3");
    IntVector cp = charpoly(t3);
    FieldTower tw(ell, 8);
    auto base = tw.level(1);
    std::vector<Elem> c;
    for (auto& x : cp) c.push_back(base->from_int(x));
    std::map<FPoly, std::size_t> expected;
    for (const auto& [g, e] : factor_squarefree(FPoly(base, c))) expected[g] += g.degree() * e;
    std::map<FPoly, std::size_t> seen;
    for (const auto& m : ms) {
      // minimal polynomial of the T3 image over F_ell
      const auto& K = *m.residue_field;
      Elem a = m.images.at("T3");
      std::vector<Elem> conj{a};
      for (Elem b = K.frobenius(a); b != a; b = K.frobenius(b)) conj.push_back(b);
      FPoly mp = FPoly::constant(m.residue_field, 1);
      for (Elem b : conj) mp = mp * FPoly::linear(m.residue_field, b);
      std::vector<Elem> down;
      for (std::size_t i = 0; i <= static_cast<std::size_t>(mp.degree()); ++i) {
        Elem v = mp.coeff(i);
        REQUIRE(K.in_prime_field(v));
        down.push_back(K.digits(v)[0]);
      }
      seen[FPoly(base, down)] += m.local_dimension;
    }
    CHECK(seen == expected);
  }
}

TEST_CASE("Eisenstein classification") {
  Fixture f = make(11, 7, 16);
  auto nq = new_quotient(f.t, f.ribet);
  std::map<std::uint64_t, int> eis;
  for (std::uint64_t ell : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull})
    for (auto m : maximal_ideals_above(f.t, ell)) {
      bool s = classify_in_s(m, f.t, 77);
      if (m.eisenstein) {
        ++eis[ell];
        CHECK(m.degree == 1);
        for (const auto& l : f.t.labels())
          if (l[0] == 'T') {
            std::uint64_t n = std::stoull(l.substr(1));
            CHECK(m.images.at(l) == m.residue_field->from_int(Integer(static_cast<unsigned long>(n + 1))));
          }
      }
      CHECK(s == (m.eisenstein || ell < 5));
    }
  // the Eisenstein primes of level 77 in this range: 2, 3, 5
  CHECK(eis.count(7) == 0);
  CHECK(eis.count(11) == 0);
  CHECK(eis.count(13) == 0);
  CHECK(eis.count(5) == 1);
  // identity algebra: one ideal, Eisenstein by definition
  auto one = algebra_from_operators({{"T2", IntMatrix{{3}}}, {"T3", IntMatrix{{4}}}});
  auto ms = maximal_ideals_above(one, 7);
  REQUIRE(ms.size() == 1);
  CHECK(is_eisenstein(ms[0], one, 77));
}
