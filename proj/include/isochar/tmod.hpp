#pragma once

// Modules over a Hecke algebra given as Z^r with generator actions: duals,
// tensor products modulo torsion, Hom modules, ideal torsion and quotients,
// finite modules with their support, and S-isomorphism search.

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "isochar/hecke.hpp"

namespace isochar {

using AlgebraPtr = std::shared_ptr<const HeckeAlgebra>;

struct TModule {
  AlgebraPtr algebra;
  OperatorSet action;                  // generator matrices on Z^rank
  std::vector<IntMatrix> basis_action;  // images of the algebra basis
  bool rank_one = false;

  std::size_t rank() const;
  /// Action of an algebra element given in the algebra's coordinates.
  IntMatrix act(const IntVector& a) const;
};

/// Checks that the action factors through the algebra. Throws NotStable.
TModule make_module(AlgebraPtr t, OperatorSet action, bool rank_one = false);
/// The algebra acting on itself.
TModule regular_module(AlgebraPtr t);
/// Restriction to a stable sublattice of Z^rank. Throws NotStable.
TModule submodule(const TModule& m, const Lattice& sub);
/// Same lattice and action viewed over another algebra with the same labels
/// (for instance a quotient through which the action factors).
TModule change_algebra(const TModule& m, AlgebraPtr t);

/// Z^n / sat(relations): `projection` is surjective with kernel sat(relations),
/// `section` is an integral right inverse.
struct QuotientMap {
  IntMatrix projection;
  IntMatrix section;
};
QuotientMap quotient_map(const Lattice& relations);

struct Presented {
  TModule module;
  IntMatrix projection;  // from the ambient construction onto the module
  IntMatrix section;
};

TModule dual(const TModule& m);
/// M (x)_T N modulo Z-torsion; the ambient is Z^(m*n) with e_i (x) f_j at i*n + j.
Presented tensor_presentation(const TModule& m, const TModule& n);
TModule tensor_mod_torsion(const TModule& m, const TModule& n);

struct HomModule {
  TModule module;               // acted on by post-composition
  std::vector<IntMatrix> maps;  // basis, each n.rank() x m.rank()
  IntMatrix map(const IntVector& coords) const;
};
HomModule hom_module(const TModule& m, const TModule& n);

/// Action of every element of an ideal (given in algebra coordinates).
struct Sub {
  TModule module;
  Lattice lattice;  // inside the parent's Z^rank
};
Sub ideal_torsion(const TModule& m, const Lattice& ideal);
/// I M inside M.
Lattice ideal_image(const TModule& m, const Lattice& ideal);
Presented ideal_quotient(const TModule& m, const Lattice& ideal);
/// X / X[K^perp], acting through `t_new`.
Presented base_change_new(const TModule& x, const Lattice& k, AlgebraPtr t_new);

/// Maximal ideals of one algebra, computed lazily per residue characteristic
/// and classified against level n.
class IdealCatalog {
 public:
  IdealCatalog(AlgebraPtr t, std::uint64_t level);
  const std::vector<MaximalIdeal>& above(std::uint64_t ell) const;
  const AlgebraPtr& algebra() const { return t_; }
  std::uint64_t level() const { return level_; }

 private:
  AlgebraPtr t_;
  std::uint64_t level_;
  mutable std::map<std::uint64_t, std::vector<MaximalIdeal>> cache_;
};

/// outer / inner for stable lattices of Z^r under `action`.
struct FiniteTModule {
  AlgebraPtr algebra;
  OperatorSet action;
  Lattice outer;
  Lattice inner;
  FiniteAbelianGroup group;

  Integer order() const { return group.order(); }
  bool trivial() const { return group.trivial(); }
};

FiniteTModule finite_module(AlgebraPtr t, const OperatorSet& action, const Lattice& outer, const Lattice& inner);
/// Y* / Y for a module carrying a nondegenerate pairing, with Y* realised as
/// gram^{-1} Z^r.
FiniteTModule component_group(const TModule& y, const IntMatrix& gram);
/// coker(h : M -> N).
FiniteTModule cokernel(const TModule& target, const IntMatrix& h);

/// True when m (f) != f, i.e. f[m] != 0.
bool in_support(const FiniteTModule& f, const MaximalIdeal& m);
/// Maximal ideals m with f[m] != 0.
std::vector<MaximalIdeal> support_of_finite(const FiniteTModule& f, const IdealCatalog& catalog);
/// Support restricted to ideals outside S.
std::vector<MaximalIdeal> support_outside_s(const FiniteTModule& f, const IdealCatalog& catalog);
/// f with every part supported in S removed: the product of its localizations
/// outside S, as invariant factors.
IntVector invariants_outside_s(const FiniteTModule& f, const IdealCatalog& catalog);

struct SearchBudget {
  int sweep_bound = 2;
  std::size_t sweep_max_rank = 6;
  std::size_t random_draws = 10000;
  int random_bound = 8;

  static SearchBudget none() { return {0, 0, 0, 0}; }
  bool empty() const { return random_draws == 0 && (sweep_bound == 0 || sweep_max_rank == 0); }
};

enum class SearchStatus { Verified, Inconclusive };

struct Certificate {
  IntMatrix map;  // N.rank() x M.rank()
  IntVector hom_coords;
  Integer determinant;
  IntVector cokernel_invariants;
  std::vector<std::pair<std::uint64_t, std::string>> cokernel_support;  // (ell, generator images)
};

struct SearchResult {
  SearchStatus status = SearchStatus::Inconclusive;
  std::optional<Certificate> certificate;
  std::size_t candidates_tried = 0;
};

/// det of hom.map(c) for each candidate, OpenMP-parallel and a serial reference.
std::vector<Integer> candidate_determinants(const HomModule& hom, const std::vector<IntVector>& coords);
std::vector<Integer> candidate_determinants_serial(const HomModule& hom, const std::vector<IntVector>& coords);

/// Looks for h in Hom_T(M, N) with det h != 0 and coker h supported in S.
/// Throws RankMismatch.
SearchResult s_isomorphism_search(const TModule& m, const TModule& n, const IdealCatalog& s, const SearchBudget& budget,
                                  std::uint64_t seed);
/// Recomputes everything in the certificate from scratch.
bool validate_certificate(const TModule& m, const TModule& n, const Certificate& c, const IdealCatalog& s);

/// Hom_{t_new}(base change of t_full^*, t_new), the inverse of the dualizing module.
TModule build_L(AlgebraPtr t_full, AlgebraPtr t_new, const Lattice& k);

/// [[tau, r I], [-I, 0]] on M + M.
IntMatrix old_part_action(const IntMatrix& tau, std::uint64_t r);

/// Canonical maps; each is an isomorphism of lattices for the rank-one modules
/// of the pipeline. Columns are images of basis vectors.
/// T (x) M -> M, a (x) x -> a x.
IntMatrix evaluation_map(const TModule& m);
/// (M (x) N)^* -> Hom(M, N^*).
IntMatrix dual_tensor_to_hom(const TModule& m, const TModule& n);
/// M (x) N^* -> Hom(M, N)^*.
IntMatrix tensor_dual_to_dual_hom(const TModule& m, const TModule& n);

/// |det| = 1 for a square matrix.
bool is_unimodular(const IntMatrix& m);

}  // namespace isochar
