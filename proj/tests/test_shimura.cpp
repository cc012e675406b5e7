#include <algorithm>
#include <map>
#include <set>

#include "doctest.h"
#include "isochar/errors.hpp"
#include "isochar/shimura.hpp"

using namespace isochar;

namespace {

int kronecker_minus4(std::uint64_t r) { return r % 4 == 1 ? 1 : -1; }
int kronecker_minus3(std::uint64_t r) { return r % 3 == 1 ? 1 : -1; }

// Eichler: genus of the Shimura curve of discriminant pq
mpq_class shimura_genus(std::uint64_t p, std::uint64_t q) {
  mpq_class g = 1 + mpq_class(static_cast<long>((p - 1) * (q - 1)), 12);
  g -= mpq_class((1 - kronecker_minus4(p)) * (1 - kronecker_minus4(q)), 4);
  g -= mpq_class((1 - kronecker_minus3(p)) * (1 - kronecker_minus3(q)), 3);
  g.canonicalize();
  return g;
}

// genus of X_0(N) for squarefree N
mpq_class x0_genus(const std::vector<std::uint64_t>& primes) {
  mpq_class mu = 1, nu2 = 1, nu3 = 1;
  for (auto r : primes) {
    mu *= static_cast<long>(r + 1);
    nu2 *= 1 + kronecker_minus4(r);
    nu3 *= 1 + kronecker_minus3(r);
  }
  mpq_class g = 1 + mu / 12 - nu2 / 4 - nu3 / 3 - mpq_class(1L << primes.size(), 2);
  g.canonicalize();
  return g;
}

const CaseData& case_of(std::uint64_t p, std::uint64_t q) {
  static std::map<std::pair<std::uint64_t, std::uint64_t>, CaseData> cache;
  auto key = std::make_pair(p, q);
  auto it = cache.find(key);
  if (it == cache.end()) it = cache.emplace(key, build_case(p, q)).first;
  return it->second;
}

const std::vector<std::pair<std::uint64_t, std::uint64_t>> four = {{11, 7}, {5, 7}, {7, 5}, {7, 11}};

}  // namespace

TEST_CASE("genus oracles") {
  CHECK(shimura_genus(11, 7) == 5);
  CHECK(shimura_genus(5, 7) == 3);
  CHECK(x0_genus({7, 11}) == 7);
  CHECK(x0_genus({11}) == 1);
  CHECK(x0_genus({5}) == 0);
}

TEST_CASE("case construction") {
  CHECK_THROWS_AS(build_case(7, 7), Error);
  CHECK_THROWS_AS(build_case(3, 7), Error);
  CHECK_THROWS_AS(build_case(9, 7), Error);
  for (auto [p, q] : four) {
    const CaseData& c = case_of(p, q);
    CAPTURE(p);
    CAPTURE(q);
    CHECK(c.sturm_saturated);
    CHECK(c.y_p_relations_hold);
    CHECK(mpq_class(static_cast<long>(c.y_q.rank())) == shimura_genus(p, q));
    CHECK(c.y_p.rank() == c.y_q.rank());
    CHECK(c.t_new->rank() == c.y_q.rank());
    CHECK(c.x_p_new.rank() == c.y_q.rank());
    CHECK(c.x_q_new.rank() == c.y_q.rank());
    // toric ranks of J_0(pq) at p and q
    CHECK(mpq_class(static_cast<long>(c.x_p_full.rank())) == x0_genus({p, q}) - 2 * x0_genus({q}));
    CHECK(mpq_class(static_cast<long>(c.x_q_full.rank())) == x0_genus({p, q}) - 2 * x0_genus({p}));
  }
}

TEST_CASE("ribet kernel and rank identity") {
  const CaseData& c = case_of(11, 7);
  CHECK(ribet_kernel(c, 'q').rank() == 5);
  CHECK(ribet_kernel(c, 'p').rank() == 5);
  CHECK_THROWS_AS(ribet_kernel(c, 'x'), Error);
  RankIdentity q = ribet_rank_identity(c, 'q');
  CHECK(q.full == 7);
  CHECK(q.vertex == 1);
  CHECK(q.holds());
  CHECK(ribet_rank_identity(c, 'p').holds());
  const CaseData& d = case_of(5, 7);
  RankIdentity dq = ribet_rank_identity(d, 'q');
  CHECK(dq.vertex == 0);
  CHECK(dq.kernel == dq.full);
  CHECK(dq.kernel == 3);
  for (auto [p, qq] : four) {
    const CaseData& e = case_of(p, qq);
    CHECK(e.pside.surjection_cokernel.empty());
    CHECK(e.qside.surjection_cokernel.empty());
  }
}

TEST_CASE("Jacquet-Langlands witness") {
  for (auto [p, q] : four) {
    const CaseData& c = case_of(p, q);
    JLWitness w = jacquet_langlands(c);
    CHECK(w.agrees());
    for (const char* l : {"T2", "T3", "T13"})
      CHECK(std::find(w.labels.begin(), w.labels.end(), l) != w.labels.end());
  }
}

TEST_CASE("new part laws on the Ribet kernels") {
  for (auto [p, q] : four) {
    const CaseData& c = case_of(p, q);
    for (char s : {'p', 'q'}) {
      const TModule& y = ribet_kernel(c, s);
      const IntMatrix& g = ribet_gram(c, s);
      for (auto r : {p, q}) CHECK(y.action.count(hecke_label(r)) == 0);
      // T_r = -w_r on the edge modules, so T_r + w_r vanishes on Y
      const GraphSide& side = s == 'q' ? c.pside : c.qside;
      for (auto r : {p, q}) {
        IntMatrix t = restrict_operator(side.degree_zero.operators.at(hecke_label(r)), side.ribet);
        IntMatrix w = y.action.at(atkin_lehner_label(r));
        CHECK(t + w == IntMatrix(y.rank(), y.rank()));
      }
      // Hecke operators are self-adjoint for the monodromy pairing
      for (const auto& [label, a] : y.action) CHECK(g * a == a.transpose() * g);
      FiniteTModule phi = component_group_shimura(c, s);
      CHECK(phi.order() == abs(determinant(g)));
    }
  }
}

TEST_CASE("component groups") {
  // frozen after the first verified run; orders are |det gram|
  const CaseData& c = case_of(11, 7);
  CHECK(component_group_shimura(c, 'q').group.invariant_factors == IntVector{2, 6, 12});
  CHECK(component_group_shimura(c, 'p').group.invariant_factors == IntVector{6});
  const CaseData& d = case_of(5, 7);
  CHECK(component_group_shimura(d, 'q').group.invariant_factors == IntVector{24});
  CHECK(component_group_shimura(d, 'p').group.invariant_factors == IntVector{12});

  for (auto [p, q] : four) {
    const CaseData& e = case_of(p, q);
    CHECK(verify_component_eisenstein(e, 'p').kind == VerdictKind::Verified);
    CHECK(verify_component_eisenstein(e, 'q').kind == VerdictKind::Verified);
  }

  // negative control: T / m for a non-Eisenstein m
  TModule t = regular_module(c.t_new);
  const MaximalIdeal* bad = nullptr;
  for (const auto& m : c.s_new->above(7))
    if (!m.eisenstein) bad = &m;
  REQUIRE(bad != nullptr);
  FiniteTModule f = finite_module(c.t_new, t.action, Lattice::full(t.rank()), bad->lattice);
  Verdict v = eisenstein_support_verdict(f, *c.s_new);
  CHECK(v.kind == VerdictKind::FailsAt);
  CHECK(v.failing_ideals.size() == 1);
  // and T / m for the Eisenstein ideal above 5 passes
  for (const auto& m : c.s_new->above(5))
    if (m.eisenstein) {
      FiniteTModule g = finite_module(c.t_new, t.action, Lattice::full(t.rank()), m.lattice);
      CHECK(eisenstein_support_verdict(g, *c.s_new).kind == VerdictKind::Verified);
    }
}

TEST_CASE("character groups up to S") {
  for (auto [p, q] : std::vector<std::pair<std::uint64_t, std::uint64_t>>{{11, 7}, {5, 7}}) {
    const CaseData& c = case_of(p, q);
    Verdict v = verify_chargp(c, SearchBudget{}, 42);
    REQUIRE(v.kind == VerdictKind::Verified);
    CHECK(v.certificate_valid);
    CHECK(validate_certificate(c.x_p_new, dual(c.y_q), *v.certificate, *c.s_new));
    CHECK(verify_chargp(c, SearchBudget::none(), 42).kind == VerdictKind::Inconclusive);
  }
}

TEST_CASE("Ribet's second exact sequence") {
  const CaseData& c = case_of(11, 7);
  RibExact2 a = verify_ribexact2(c, 7);
  CHECK(a.q2 == 11);
  CHECK(a.verdict.kind == VerdictKind::Verified);
  // X_11(J_0(11)) has rank one with T_7 = -2, so |X^2 / (T_7^2 - 1)| = 60
  CHECK(a.rhs_invariants == IntVector{2, 30});
  CHECK(a.lhs_outside_s == a.rhs_outside_s);
  RibExact2 b = verify_ribexact2(c, 11);
  CHECK(b.rhs_invariants.empty());
  CHECK(b.lhs_outside_s.empty());
  CHECK(b.verdict.kind == VerdictKind::Verified);
  CHECK_THROWS_AS(verify_ribexact2(c, 13), Error);
  const CaseData& d = case_of(5, 7);
  CHECK(verify_ribexact2(d, 5).verdict.kind == VerdictKind::Verified);
  CHECK(verify_ribexact2(d, 7).verdict.kind == VerdictKind::Verified);
}

TEST_CASE("main theorem and global multiplicity one") {
  for (auto [p, q] : std::vector<std::pair<std::uint64_t, std::uint64_t>>{{11, 7}, {5, 7}}) {
    const CaseData& c = case_of(p, q);
    CHECK(verify_thm_main(c, 'p').kind == VerdictKind::Verified);
    CHECK(verify_thm_main(c, 'q').kind == VerdictKind::Verified);
    Verdict g = verify_globalmult1(c, SearchBudget{}, 42);
    REQUIRE(g.kind == VerdictKind::Verified);
    CHECK(g.certificate_valid);
    CHECK(verify_globalmult1(c, SearchBudget::none(), 42).kind == VerdictKind::Inconclusive);
  }
}

TEST_CASE("controllability and multiplicity") {
  for (auto [p, q] : four) {
    const CaseData& c = case_of(p, q);
    auto rows = controllability_report(c, 13);
    CHECK(!rows.empty());
    for (const auto& r : rows) {
      CAPTURE(r.ell);
      CHECK(r.range_ok);
      CHECK(r.bound_ok);
      CHECK(r.mult_one_ok);
      CHECK(r.congruence_ok);
      CHECK(r.predicted_torsion_dim == 2 * r.h_m);
      CHECK(r.in_s == (r.eisenstein || r.ell <= 3));
    }
    // the residue degrees above l add up to at most rank T_new
    std::map<std::uint64_t, unsigned> deg;
    for (const auto& r : rows) deg[r.ell] += r.degree;
    for (const auto& [ell, d] : deg) CHECK(d <= c.t_new->rank());
  }
  // the new quotient at level 77 has no Eisenstein ideal above 5; that one lives on the 11a old part
  std::set<std::uint64_t> eis;
  for (const auto& r : controllability_report(case_of(11, 7), 13))
    if (r.eisenstein) eis.insert(r.ell);
  CHECK(eis == std::set<std::uint64_t>{2, 3});

  auto hits = find_higher_multiplicity({{5, 7}}, 13);
  CHECK(hits.empty());
}
