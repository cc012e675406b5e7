#pragma once

// Short Weierstrass curves y^2 = x^3 + ax + b over finite fields, division
// polynomials, cyclic subgroups of prime order, Velu quotients and the
// automorphism action on kernel polynomials.

#include <optional>
#include <vector>

#include "isochar/galois.hpp"

namespace isochar {

struct Curve {
  FieldPtr field;
  Elem a = 0;
  Elem b = 0;

  friend bool operator==(const Curve& x, const Curve& y) {
    return x.field == y.field && x.a == y.a && x.b == y.b;
  }
};

/// Throws Error when 4a^3 + 27b^2 = 0.
Curve make_curve(FieldPtr field, Elem a, Elem b);
Elem j_invariant(const Curve& e);
/// (0,1) for j = 0, (1,0) for j = 1728, else a = 3j(1728-j), b = 2j(1728-j)^2.
Curve curve_from_j(FieldPtr field, Elem j);
/// Same curve over a larger level of the tower.
Curve lift(const Curve& e, FieldTower& tower, unsigned k);

/// Hasse invariant test; the curve must live on a level of degree <= 2.
bool is_supersingular(const Curve& e);
/// #E(F) by brute force over the curve's own field (point at infinity included).
std::uint64_t point_count(const Curve& e);
/// For a supersingular j in F_{p^2}: curve_from_j, replaced by its quadratic
/// twist if needed so that #E(F_{p^2}) = (p+1)^2. On such a model Frobenius
/// acts as -p, so every cyclic subgroup of order prime to p is F_{p^2}-rational.
Curve supersingular_model(FieldPtr f2, Elem j);

/// Reduced division polynomial: psi_n for odd n, psi_n / (2y) for even n.
FPoly division_polynomial(const Curve& e, unsigned n);

struct CyclicSubgroup {
  unsigned order = 0;
  FPoly kernel;  // monic; roots are the x-coordinates of the nonzero points
};

/// All n+1 cyclic subgroups of prime order n != p, sorted by kernel
/// polynomial. When some subgroup is not rational over the curve's field,
/// the computation moves to the smallest sufficient level of `tower`; the
/// kernels then live on that level. Throws DegreeCapExceeded.
std::vector<CyclicSubgroup> cyclic_subgroups(const Curve& e, unsigned n, FieldTower* tower = nullptr);

struct Isogeny {
  Curve source;
  Curve target;
  unsigned degree = 1;
  FPoly num;  // x-coordinate map num/den
  FPoly den;

  Elem map_x(Elem x) const;
  static Isogeny identity(const Curve& e);
};

/// Quotient by a subgroup with Velu's formulas (Kohel's kernel-polynomial form).
Isogeny velu(const Curve& e, const CyclicSubgroup& c);
/// Image of a subgroup meeting the isogeny kernel trivially (for instance of
/// order prime to the degree).
CyclicSubgroup push_subgroup(const Isogeny& phi, const CyclicSubgroup& c);

/// Kernel polynomial of the subgroup after the isomorphism x -> s x.
FPoly transform_kernel(const FPoly& h, Elem s);
/// Values s = u^2 over u in Aut(E): {1}, {1,-1} for j = 1728, cube roots of
/// unity for j = 0. The curve's field must contain them.
std::vector<Elem> automorphism_scalars(const Curve& e);
/// |Aut(E)| or, with a subgroup, the order of its stabilizer in Aut(E).
unsigned automorphism_count(const Curve& e, const CyclicSubgroup* c = nullptr);
/// Least kernel polynomial in the Aut(E)-orbit; `stabilizer` receives the
/// number of scalars s fixing h (|Aut(E,C)| / 2).
FPoly canonical_kernel(const Curve& e, const FPoly& h, unsigned* stabilizer = nullptr);
/// s with to = (s^2 from.a, s^3 from.b), if one exists in the common field.
std::optional<Elem> isomorphism_scale(const Curve& from, const Curve& to);

}  // namespace isochar
