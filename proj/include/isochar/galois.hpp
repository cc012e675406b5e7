#pragma once

// Finite fields F_{p^k} and univariate polynomials over them.
//
// An element of F_{p^k} is packed into a uint64 as the base-p integer whose
// digits are its coordinates in the power basis 1, g, ..., g^{k-1}, where g
// is the class of x modulo the level's defining polynomial.

#include <gmpxx.h>

#include <cstdint>
#include <map>
#include <memory>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "isochar/errors.hpp"

namespace isochar {

using Elem = std::uint64_t;

/// Seed of the pseudo-random stream used by equal-degree splitting.
inline constexpr std::uint64_t kFactorSeed = 0x5eedf00dULL;

class FiniteField {
 public:
  /// Field with p^k elements defined by the monic `modulus` (over F_p,
  /// constant term first). For k == 1 the modulus is ignored.
  FiniteField(std::uint64_t p, unsigned k, std::vector<std::uint64_t> modulus);

  std::uint64_t characteristic() const { return p_; }
  unsigned degree() const { return k_; }
  std::uint64_t order() const { return order_; }
  const std::vector<std::uint64_t>& modulus() const { return modulus_; }

  Elem add(Elem a, Elem b) const;
  Elem sub(Elem a, Elem b) const;
  Elem neg(Elem a) const;
  Elem mul(Elem a, Elem b) const;
  Elem inv(Elem a) const;  // throws on zero
  Elem div(Elem a, Elem b) const { return mul(a, inv(b)); }
  Elem pow(Elem a, std::uint64_t e) const;
  Elem pow(Elem a, const mpz_class& e) const;
  Elem from_int(long v) const;
  Elem from_int(const mpz_class& v) const;
  Elem frobenius(Elem a) const { return pow(a, p_); }

  /// Power-basis coordinates, length degree().
  std::vector<std::uint64_t> digits(Elem a) const;
  Elem from_digits(const std::vector<std::uint64_t>& d) const;
  bool in_prime_field(Elem a) const { return a < p_; }
  /// Class of x in F_p[x]/(modulus); 1 in the prime field.
  Elem generator() const { return k_ == 1 ? 1 : p_; }
  Elem random(std::mt19937_64& rng) const { return rng() % order_; }

  /// "3", "2*g+5", "g^2+1": power-basis polynomial in g.
  std::string to_string(Elem a) const;
  Elem parse(const std::string& s) const;

 private:
  Elem mul_poly(Elem a, Elem b) const;

  std::uint64_t p_;
  unsigned k_;
  std::uint64_t order_;
  std::vector<std::uint64_t> modulus_;
  std::vector<std::uint64_t> pow_p_;  // p^i for i <= k
  // exp/log tables for small fields; empty otherwise
  std::vector<Elem> exp_;
  std::vector<std::uint32_t> log_;
};

using FieldPtr = std::shared_ptr<const FiniteField>;

/// Polynomial over a finite field, constant term first, no trailing zeros.
struct FPoly {
  FieldPtr field;
  std::vector<Elem> c;

  FPoly() = default;
  explicit FPoly(FieldPtr f) : field(std::move(f)) {}
  FPoly(FieldPtr f, std::vector<Elem> coeffs);

  static FPoly constant(FieldPtr f, Elem a) { return FPoly(std::move(f), {a}); }
  static FPoly x(FieldPtr f) { return FPoly(f, {0, 1}); }
  /// x - a
  static FPoly linear(FieldPtr f, Elem a);

  int degree() const { return static_cast<int>(c.size()) - 1; }
  bool is_zero() const { return c.empty(); }
  bool is_one() const { return c.size() == 1 && c[0] == 1; }
  Elem lead() const { return c.empty() ? 0 : c.back(); }
  Elem coeff(std::size_t i) const { return i < c.size() ? c[i] : 0; }
  void normalize();

  Elem eval(Elem a) const;

  friend bool operator==(const FPoly& a, const FPoly& b) { return a.c == b.c; }
  friend bool operator<(const FPoly& a, const FPoly& b);  // degree, then coefficients from the top
};

FPoly operator+(const FPoly& a, const FPoly& b);
FPoly operator-(const FPoly& a, const FPoly& b);
FPoly operator-(const FPoly& a);
FPoly operator*(const FPoly& a, const FPoly& b);
FPoly scale(const FPoly& a, Elem s);
/// Quotient and remainder; b nonzero.
std::pair<FPoly, FPoly> divmod(const FPoly& a, const FPoly& b);
FPoly operator/(const FPoly& a, const FPoly& b);
FPoly operator%(const FPoly& a, const FPoly& b);
FPoly monic(const FPoly& a);
FPoly gcd(const FPoly& a, const FPoly& b);
/// Inverse of a modulo m (gcd must be 1).
FPoly invmod(const FPoly& a, const FPoly& m);
FPoly mulmod(const FPoly& a, const FPoly& b, const FPoly& m);
FPoly powmod(const FPoly& a, const mpz_class& e, const FPoly& m);
FPoly derivative(const FPoly& a);
/// a(b(x))
FPoly compose(const FPoly& a, const FPoly& b);
/// a(b(x)) mod m
FPoly compose_mod(const FPoly& a, const FPoly& b, const FPoly& m);
std::string to_string(const FPoly& f);

bool is_irreducible(const FPoly& f);

/// Complete factorization by squarefree, distinct-degree and equal-degree
/// splitting. Monic irreducible factors with multiplicities, sorted.
std::vector<std::pair<FPoly, unsigned>> factor_squarefree(const FPoly& f, std::uint64_t seed = kFactorSeed);

/// Tower of extensions of F_p with compatible embeddings.
class FieldTower {
 public:
  /// degree_cap bounds every level that may be built.
  FieldTower(std::uint64_t p, unsigned degree_cap);

  std::uint64_t characteristic() const { return p_; }
  unsigned degree_cap() const { return cap_; }

  /// Builds (or returns) the level of degree k. Throws DegreeCapExceeded.
  FieldPtr level(unsigned k);
  bool has_level(unsigned k) const { return levels_.count(k) != 0; }
  std::vector<unsigned> built_degrees() const;

  /// Image of an element of level d in level k (d | k, both built).
  Elem embed(Elem a, unsigned d, unsigned k) const;
  FPoly embed(const FPoly& f, unsigned k) const;

 private:
  std::uint64_t p_;
  unsigned cap_;
  std::map<unsigned, FieldPtr> levels_;
  std::map<std::pair<unsigned, unsigned>, Elem> gen_images_;  // (d,k) -> image of g_d
};

/// Lowest monic irreducible of degree k over F_p in the order of the integer
/// encoding sum c_i p^i.
std::vector<std::uint64_t> lowest_irreducible(std::uint64_t p, unsigned k);

/// Roots of f (over some level) lying in `level`, with multiplicity, sorted.
/// `tower` supplies the embedding when f's field is a proper subfield.
std::vector<Elem> roots_in_level(const FPoly& f, const FieldPtr& level, const FieldTower* tower = nullptr,
                                 std::uint64_t seed = kFactorSeed);

/// Prime test and factorization of machine integers.
bool is_prime(std::uint64_t n);
std::vector<std::pair<mpz_class, unsigned>> factor_integer(const mpz_class& n);

}  // namespace isochar
