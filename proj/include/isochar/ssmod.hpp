#pragma once

// Supersingular graph modules in characteristic p: the vertex module Z[SS_p]
// and the edge module on the supersingular points of X_0(q), with Hecke
// operators, Atkin-Lehner involutions, degeneracy maps and weights.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "isochar/exactlin.hpp"
#include "isochar/isogeny.hpp"

namespace isochar {

struct VertexPoint {
  Elem j = 0;
  unsigned weight = 1;  // |Aut(E)| / 2
};

struct EdgePoint {
  Elem j = 0;
  std::vector<Elem> kernel;  // canonical kernel polynomial, constant term first
  unsigned weight = 1;       // |Aut(E, C)| / 2
};

/// Operator labels: "T<l>" for Hecke operators, "w<r>" for Atkin-Lehner
/// involutions (r the prime, e.g. "w7"), "frob" for the Frobenius twist, and
/// "alpha"/"beta" for the degeneracy maps edge -> vertex.
struct GraphModule {
  std::uint64_t p = 0;
  std::uint64_t q = 0;  // 0 for the vertex module
  unsigned hecke_upto = 0;
  std::vector<std::uint64_t> modulus;  // defining polynomial of F_{p^2}
  std::vector<VertexPoint> vertices;
  std::vector<EdgePoint> edges;  // empty for the vertex module
  std::map<std::string, IntMatrix> operators;

  bool is_edge_module() const { return q != 0; }
  std::size_t size() const { return is_edge_module() ? edges.size() : vertices.size(); }
  IntVector weights() const;
  const IntMatrix& op(const std::string& label) const;
  /// Endomorphism labels in a fixed order (T's by l, then w's, then frob).
  std::vector<std::string> endomorphism_labels() const;
};

std::string hecke_label(std::uint64_t ell);
std::string atkin_lehner_label(std::uint64_t r);

/// Supersingular j-invariants with weights, sorted by packed value. Throws
/// MassFormulaViolation unless sum 1/w = (p-1)/12.
std::vector<VertexPoint> enumerate_ss(std::uint64_t p);

/// Brandt module on SS_p with T_l for primes l <= hecke_upto, l != p.
GraphModule build_vertex_module(std::uint64_t p, unsigned hecke_upto);
/// Edge module for X_0(q) in characteristic p with T_l (l <= hecke_upto,
/// l not in {p,q}), w_q, w_p, frob, alpha, beta.
GraphModule build_edge_module(std::uint64_t p, std::uint64_t q, unsigned hecke_upto);

/// Serial reference for the column assembly of T_l (the builders use the
/// parallel version).
IntMatrix hecke_operator_serial(const GraphModule& m, std::uint64_t ell);
IntMatrix hecke_operator(const GraphModule& m, std::uint64_t ell);
/// Atkin-Lehner involution at r in {p, q}: edge reversal for r = q; for
/// r = p the negated Frobenius twist.
IntMatrix atkin_lehner(const GraphModule& m, std::uint64_t r);
IntMatrix frobenius_twist(const GraphModule& m);

struct RestrictedModule {
  Lattice lattice;
  std::map<std::string, IntMatrix> operators;  // endomorphisms only
  IntMatrix gram;
};

/// Coordinate-sum-zero sublattice with every endomorphism restricted.
RestrictedModule degree_zero_submodule(const GraphModule& m);
/// Weighted pairing <e_i, e_j> = w_i delta_ij restricted to sub, in sub's basis.
IntMatrix monodromy_gram(const GraphModule& m, const Lattice& sub);

/// Sum of 1/w over the basis.
mpq_class mass(const GraphModule& m);

struct ModularPolynomial {
  unsigned ell = 0;
  std::map<std::pair<unsigned, unsigned>, Integer> coeffs;  // X^i Y^j, both triangles stored

  Integer coeff(unsigned i, unsigned j) const;
  unsigned degree() const;
  /// Phi(j, Y) as a polynomial in Y.
  FPoly specialize(const FieldPtr& field, Elem j) const;
};

/// "ell <l>" then "<i> <j> <coeff>" lines with i >= j. ParseError, AsymmetryError.
ModularPolynomial load_modular_polynomial(const std::string& path);

/// For every basis point, the multiset of j(E/D) over the l+1 subgroups D
/// equals the roots of Phi_l(j(E), Y) in F_{p^2} with multiplicity. Returns
/// the number of basis points that disagree.
std::size_t modular_polynomial_disagreements(const GraphModule& m, const ModularPolynomial& phi);

/// Cache file: header with format tag and SHA-256 of the body, then the
/// body (moduli, basis, weights, operators in the matrix text format).
std::string serialize(const GraphModule& m);
/// Throws ParseError on malformed input or hash mismatch.
GraphModule deserialize(const std::string& text);
std::string sha256_hex(const std::string& data);

}  // namespace isochar
