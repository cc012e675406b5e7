#pragma once

// Commutative matrix algebras generated by labeled operators on Z^n: integral
// basis, new quotients, ideals, annihilators and maximal ideals.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "isochar/exactlin.hpp"
#include "isochar/galois.hpp"

namespace isochar {

using OperatorSet = std::map<std::string, IntMatrix>;

class HeckeAlgebra;

/// Integral basis of the algebra generated by `ops` (matrices on Z^n acting
/// on column vectors). Throws NonCommuting.
HeckeAlgebra algebra_from_operators(const OperatorSet& ops);
/// Same, for operators on the ambient space restricted to a stable lattice.
/// Throws NotStable.
HeckeAlgebra algebra_from_operators(const OperatorSet& ops, const Lattice& reference);

class HeckeAlgebra {
 public:
  HeckeAlgebra() = default;

  std::size_t rank() const { return basis_.size(); }
  std::size_t module_rank() const { return n_; }
  std::vector<std::string> labels() const;
  const OperatorSet& generators() const { return gens_; }
  const IntMatrix& generator(const std::string& label) const;
  const std::vector<IntMatrix>& basis() const { return basis_; }

  IntMatrix element(const IntVector& coords) const;
  std::optional<IntVector> coordinates(const IntMatrix& a) const;
  /// Throws NotSublattice when a is not in the algebra.
  IntVector coords(const IntMatrix& a) const;
  IntVector one() const;
  IntVector generator_coords(const std::string& label) const;
  IntVector multiply(const IntVector& a, const IntVector& b) const;
  /// Multiplication by a on the algebra: column j = coords(a b_j).
  IntMatrix regular(const IntVector& a) const;
  /// table[i] = regular(e_i).
  std::vector<IntMatrix> multiplication_table() const;

  /// Images of the basis elements on another module, given the generator
  /// actions there.
  std::vector<IntMatrix> act_basis(const OperatorSet& module_gens) const;
  IntMatrix act(const IntVector& a, const OperatorSet& module_gens) const;
  /// Every integer relation among the spanning monomials holds for the
  /// given actions, so act() is well defined.
  bool relations_hold(const OperatorSet& module_gens) const;

  /// Same Z-span in End(Z^n).
  friend bool operator==(const HeckeAlgebra& a, const HeckeAlgebra& b) { return a.span_ == b.span_; }

 private:
  friend HeckeAlgebra algebra_from_operators(const OperatorSet& ops);

  struct Monomial {
    std::size_t parent = 0;  // index of the monomial this one extends
    std::string label;       // empty for the identity
  };

  std::vector<IntMatrix> monomial_images(const OperatorSet& module_gens) const;

  std::size_t n_ = 0;
  OperatorSet gens_;
  std::vector<Monomial> monomials_;
  IntMatrix basis_in_monomials_;  // rank x #monomials
  IntMatrix relations_;           // rows: integer relations among monomials
  std::vector<IntMatrix> basis_;
  Lattice span_;  // row span of the flattened basis in Z^(n*n)
};

/// Ideals are sublattices of Z^rank in the algebra's coordinates.
Lattice ideal_generated(const HeckeAlgebra& t, const std::vector<IntVector>& elements);
bool is_ideal(const HeckeAlgebra& t, const Lattice& i);
/// {a : a i = 0}.
Lattice annihilator(const HeckeAlgebra& t, const Lattice& i);
inline Lattice perp(const HeckeAlgebra& t, const Lattice& i) { return annihilator(t, i); }

struct NewQuotient {
  HeckeAlgebra algebra;  // image of t in End(target)
  Lattice kernel;        // ideal K of t
  IntMatrix projection;  // coordinates in `algebra` of the image of each basis element of t (columns)
};

/// Restriction of t to an operator-stable sublattice of Z^n. Throws NotStable.
NewQuotient new_quotient(const HeckeAlgebra& t, const Lattice& target);

/// ceil((N/6) prod_{r | N} (1 + 1/r)).
std::uint64_t sturm_generator_bound(std::uint64_t n);

struct MaximalIdeal {
  std::uint64_t ell = 0;
  unsigned degree = 0;               // residue degree
  std::size_t local_dimension = 0;   // dim over F_ell of the local factor of t / ell t
  Lattice lattice;                   // contains ell t
  FieldPtr residue_field;            // F_{ell^degree}
  std::map<std::string, Elem> images;  // generator reductions
  bool eisenstein = false;
  bool in_s = false;
  std::map<std::uint64_t, unsigned> controllability;  // d_r for r | N

  bool contains(const IntVector& a) const { return lattice.contains(a); }
  /// Image of an algebra element in the residue field.
  Elem reduce(const IntVector& a) const;

  IntMatrix residue_projection;  // degree x rank, kernel m / ell t
  IntMatrix power_inverse;       // inverse of the projected powers of the primitive element
  Elem primitive_image = 0;
};

/// All maximal ideals of residue characteristic ell, sorted by degree and
/// generator images.
std::vector<MaximalIdeal> maximal_ideals_above(const HeckeAlgebra& t, std::uint64_t ell);

/// T_l = l + 1 mod m for every generator T_l with l prime to n.
bool is_eisenstein(const MaximalIdeal& m, const HeckeAlgebra& t, std::uint64_t n);
/// Eisenstein or residue characteristic 2 or 3; also sets m.eisenstein and m.in_s.
bool classify_in_s(MaximalIdeal& m, const HeckeAlgebra& t, std::uint64_t n);

/// Generator labels "T<l>" for primes l <= bound prime to n, then "w<r>" for r | n.
std::vector<std::string> generator_labels(std::uint64_t n, std::uint64_t bound);

}  // namespace isochar
