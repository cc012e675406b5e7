#pragma once

// Character groups of J_0(pq) and of the Jacobian of the Shimura curve of
// discriminant pq, built from the two supersingular graphs, and the checks
// relating them.

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "isochar/ssmod.hpp"
#include "isochar/tmod.hpp"

namespace isochar {

/// One characteristic: the edge module in characteristic `p` at level `q`.
struct GraphSide {
  std::uint64_t p = 0;
  std::uint64_t q = 0;
  GraphModule edges;
  GraphModule vertices;
  RestrictedModule degree_zero;
  RestrictedModule vertex_degree_zero;
  Lattice ribet_ambient;  // kernel of (alpha, beta) in edge coordinates
  Lattice ribet;          // the same inside degree-zero coordinates
  IntMatrix ribet_gram;
  std::size_t vertex_rank = 0;  // rank of the degree-zero vertex module
  IntVector surjection_cokernel;  // coker of (alpha, beta) on degree-zero parts
};

struct CaseOptions {
  unsigned ell_max = 13;
  std::uint64_t sturm_override = 0;  // 0: use the Sturm bound
};

struct CaseData {
  std::uint64_t p = 0;
  std::uint64_t q = 0;
  std::uint64_t level = 0;
  std::uint64_t sturm = 0;
  unsigned hecke_upto = 0;
  std::vector<std::string> generators;
  bool sturm_saturated = false;  // adding every computed T_l leaves the algebra unchanged

  GraphSide pside;  // characteristic p, level q
  GraphSide qside;  // characteristic q, level p

  AlgebraPtr t_full_p;  // on X_p(J_0(pq))
  AlgebraPtr t_full_q;  // on X_q(J_0(pq))
  AlgebraPtr t_new;     // image on the Ribet kernel of the p-side
  Lattice k_p;          // kernel of t_full_p -> t_new
  Lattice k_q;

  TModule x_p_full;
  TModule x_q_full;
  TModule x_p_new;  // X_p(J_0(pq)) (x) t_new
  TModule x_q_new;
  TModule y_q;  // X_q of the Shimura Jacobian (p-side Ribet kernel)
  TModule y_p;  // X_p of the Shimura Jacobian (q-side Ribet kernel)
  bool y_p_relations_hold = false;

  std::shared_ptr<IdealCatalog> s_new;
  std::shared_ptr<IdealCatalog> s_full_p;
  std::shared_ptr<IdealCatalog> s_full_q;
};

/// Where graph modules come from; the defaults build them from scratch.
struct ModuleSource {
  std::function<GraphModule(std::uint64_t p, std::uint64_t q, unsigned upto)> edges;
  std::function<GraphModule(std::uint64_t p, unsigned upto)> vertices;
};

/// Throws Error for p = q or primes < 5.
CaseData build_case(std::uint64_t p, std::uint64_t q, const CaseOptions& opts = {}, const ModuleSource& source = {});
/// Hecke operators needed for a case: the Sturm bound, l_max and one prime past the bound.
unsigned case_hecke_bound(std::uint64_t p, std::uint64_t q, const CaseOptions& opts);

enum class VerdictKind { Verified, FailsAt, Inconclusive };
std::string to_string(VerdictKind v);

struct Verdict {
  VerdictKind kind = VerdictKind::Inconclusive;
  std::optional<Certificate> certificate;
  bool certificate_valid = false;
  std::vector<std::string> failing_ideals;
  std::string detail;
};

/// Side 'p' or 'q' selects the character group of the Shimura Jacobian at
/// that prime: Y_p from the q-side graph, Y_q from the p-side graph.
const TModule& ribet_kernel(const CaseData& c, char side);
const IntMatrix& ribet_gram(const CaseData& c, char side);
FiniteTModule component_group_shimura(const CaseData& c, char side);

struct RankIdentity {
  std::size_t full = 0;
  std::size_t kernel = 0;
  std::size_t vertex = 0;
  bool holds() const { return full == kernel + 2 * vertex; }
};
RankIdentity ribet_rank_identity(const CaseData& c, char side);

struct JLWitness {
  std::vector<std::string> labels;
  std::vector<std::pair<IntVector, IntVector>> charpolys;  // (Y_q, Y_p)
  bool relations_hold = false;
  bool agrees() const;
};
JLWitness jacquet_langlands(const CaseData& c);

/// Verified when every maximal ideal in the support of f is Eisenstein.
Verdict eisenstein_support_verdict(const FiniteTModule& f, const IdealCatalog& cat);
/// Component group of J_0(pq) at r in {p, q} is supported on Eisenstein ideals.
Verdict verify_component_eisenstein(const CaseData& c, char side);
Verdict verify_chargp(const CaseData& c, const SearchBudget& budget, std::uint64_t seed);
struct RibExact2 {
  std::uint64_t q1 = 0;
  std::uint64_t q2 = 0;
  IntVector lhs_invariants;
  IntVector rhs_invariants;
  IntVector lhs_outside_s;
  IntVector rhs_outside_s;
  Verdict verdict;
};
/// Y_{q1}^* / Y_{q1} against X_{q2}^2 / (T_{q1}^2 - 1) up to S.
RibExact2 verify_ribexact2(const CaseData& c, std::uint64_t q1);
Verdict verify_thm_main(const CaseData& c, char side);
Verdict verify_globalmult1(const CaseData& c, const SearchBudget& budget, std::uint64_t seed);

struct IdealRecord {
  std::uint64_t ell = 0;
  unsigned degree = 0;
  std::string images;
  bool eisenstein = false;
  bool in_s = false;
  unsigned d_p = 0;
  unsigned d_q = 0;
  unsigned h_m = 0;
  bool controllable_p = false;
  bool controllable_q = false;
  unsigned predicted_torsion_dim = 0;
  bool bound_ok = true;      // h_m <= 2^k, outside S only
  bool mult_one_ok = true;   // d_p = d_q = 1 (non-Eisenstein, l >= 5) implies h_m = 1
  bool congruence_ok = true; // d_r = 2 (non-Eisenstein, l >= 5) implies r = 1 mod l
  bool range_ok = true;      // d_r in {1, 2}
};

std::vector<IdealRecord> controllability_report(const CaseData& c, unsigned ell_max);

struct MultiplicityHit {
  std::uint64_t p = 0;
  std::uint64_t q = 0;
  IdealRecord ideal;
};
std::vector<MultiplicityHit> find_higher_multiplicity(const std::vector<std::pair<std::uint64_t, std::uint64_t>>& cases,
                                                      unsigned ell_max);

/// dim over the residue field of M / m M.
unsigned fiber_dimension(const TModule& m, const MaximalIdeal& ideal);

}  // namespace isochar
