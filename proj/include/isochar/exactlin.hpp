#pragma once

// Exact integer linear algebra: matrices over Z, Hermite and Smith normal
// forms, integer kernels, lattices and finite abelian quotients.

#include <gmpxx.h>

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "isochar/errors.hpp"

namespace isochar {

using Integer = mpz_class;
using IntVector = std::vector<Integer>;

class IntMatrix {
 public:
  IntMatrix() = default;
  IntMatrix(std::size_t rows, std::size_t cols);
  IntMatrix(std::initializer_list<std::initializer_list<long>> rows);

  static IntMatrix identity(std::size_t n);
  static IntMatrix from_rows(const std::vector<IntVector>& rows, std::size_t cols);
  static IntMatrix diagonal(const IntVector& d);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  Integer& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const Integer& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  IntVector row(std::size_t i) const;
  IntVector col(std::size_t j) const;
  void set_row(std::size_t i, const IntVector& v);

  IntMatrix transpose() const;
  IntMatrix select_rows(std::size_t begin, std::size_t end) const;
  bool is_zero() const;
  bool is_square() const { return rows_ == cols_; }
  Integer trace() const;

  IntMatrix operator-() const;
  IntMatrix& operator+=(const IntMatrix& o);
  IntMatrix& operator-=(const IntMatrix& o);
  IntMatrix& operator*=(const Integer& s);

  friend IntMatrix operator+(IntMatrix a, const IntMatrix& b) { return a += b; }
  friend IntMatrix operator-(IntMatrix a, const IntMatrix& b) { return a -= b; }
  friend IntMatrix operator*(IntMatrix a, const Integer& s) { return a *= s; }
  friend IntMatrix operator*(const IntMatrix& a, const IntMatrix& b);
  friend IntVector operator*(const IntMatrix& a, const IntVector& v);
  friend bool operator==(const IntMatrix& a, const IntMatrix& b);

  /// Matrix text format: "rows cols" then one line per row.
  std::string to_text() const;
  static IntMatrix from_text(std::istream& in);

  const std::vector<Integer>& data() const { return data_; }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Integer> data_;
};

IntMatrix vstack(const IntMatrix& a, const IntMatrix& b);
IntMatrix hstack(const IntMatrix& a, const IntMatrix& b);
IntMatrix kronecker(const IntMatrix& a, const IntMatrix& b);
/// Row-major flattening of a matrix into a 1 x (rows*cols) matrix row.
IntVector flatten(const IntMatrix& m);
IntMatrix unflatten(const IntVector& v, std::size_t rows, std::size_t cols);

/// Row Hermite normal form: upper echelon, positive pivots, entries above a
/// pivot reduced into [0, pivot). Zero rows are dropped.
IntMatrix hnf(const IntMatrix& m);

struct HnfResult {
  IntMatrix h;          // full-height echelon form (zero rows at the bottom)
  IntMatrix transform;  // unimodular, transform * m == h
  std::size_t rank = 0;
};
HnfResult hnf_with_transform(const IntMatrix& m);

struct SmithForm {
  IntMatrix diagonal;  // same shape as input
  IntMatrix left;      // unimodular
  IntMatrix right;     // unimodular; left * m * right == diagonal
  IntVector invariants() const;  // nonzero diagonal entries d_1 | d_2 | ...
};
SmithForm snf(const IntMatrix& m);

std::size_t rank(const IntMatrix& m);
Integer determinant(const IntMatrix& m);

/// Coefficients of the characteristic polynomial det(xI - m), constant term
/// first, computed with exact Faddeev-LeVerrier divisions.
IntVector charpoly(const IntMatrix& m);

class Lattice;

/// Integer kernel {v : m v = 0}; saturated by construction.
Lattice kernel_basis(const IntMatrix& m);

/// Sublattice of Z^n given by the row span of a basis kept in HNF.
class Lattice {
 public:
  Lattice() = default;
  explicit Lattice(std::size_t ambient_rank);
  /// Row span of `generators` (any spanning set).
  Lattice(std::size_t ambient_rank, const IntMatrix& generators);

  static Lattice full(std::size_t n);
  static Lattice zero(std::size_t n) { return Lattice(n); }

  std::size_t ambient_rank() const { return ambient_; }
  std::size_t rank() const { return basis_.rows(); }
  const IntMatrix& basis() const { return basis_; }

  bool contains(const IntVector& v) const;
  bool contains(const Lattice& other) const;
  /// Coordinates of v with respect to basis(), if v lies in the lattice.
  std::optional<IntVector> coordinates(const IntVector& v) const;

  friend bool operator==(const Lattice& a, const Lattice& b) {
    return a.ambient_ == b.ambient_ && a.basis_ == b.basis_;
  }

 private:
  std::size_t ambient_ = 0;
  IntMatrix basis_;
};

Lattice saturate(const Lattice& l);
Lattice lattice_sum(const Lattice& a, const Lattice& b);
Lattice intersect(const Lattice& a, const Lattice& b);
/// Rows of `m` are vectors; returns their coordinates in l's basis or throws NotSublattice.
IntMatrix coordinates_in(const Lattice& l, const IntMatrix& rows);

struct FiniteAbelianGroup {
  IntVector invariant_factors;  // d_1 | d_2 | ... , each > 1
  IntMatrix generator_lifts;    // one ambient row per invariant factor
  Integer order() const;
  bool trivial() const { return invariant_factors.empty(); }
};

/// outer / inner for inner of finite index in outer.
FiniteAbelianGroup quotient_group(const Lattice& outer, const Lattice& inner);

/// Matrix of an endomorphism `op` (acting on column vectors of the ambient
/// space) restricted to the sublattice `sub`, in sub's basis: op * B^T = B^T * R.
/// Throws OperatorDoesNotRestrict if sub is not stable.
IntMatrix restrict_operator(const IntMatrix& op, const Lattice& sub);

/// Linear algebra over F_ell (ell prime < 2^32); entries are reduced into [0, ell).
std::size_t rank_mod(const IntMatrix& m, std::uint64_t ell);
/// Rows spanning {v : m v = 0 mod ell}.
IntMatrix kernel_mod(const IntMatrix& m, std::uint64_t ell);
/// Reduced row echelon basis of the row space mod ell.
IntMatrix row_basis_mod(const IntMatrix& m, std::uint64_t ell);

std::string to_string(const IntVector& v);

}  // namespace isochar
