#include <random>
#include <sstream>

#include "doctest.h"
#include "isochar/exactlin.hpp"

using namespace isochar;

namespace {

IntMatrix random_matrix(std::mt19937_64& rng, std::size_t r, std::size_t c, long bound) {
  std::uniform_int_distribution<long> d(-bound, bound);
  IntMatrix m(r, c);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) m(i, j) = d(rng);
  return m;
}

bool is_hnf(const IntMatrix& h) {
  std::size_t last = 0;
  for (std::size_t i = 0; i < h.rows(); ++i) {
    std::size_t c = 0;
    while (c < h.cols() && h(i, c) == 0) ++c;
    if (c == h.cols()) return false;
    if (i > 0 && c <= last) return false;
    if (h(i, c) <= 0) return false;
    for (std::size_t k = 0; k < i; ++k)
      if (h(k, c) < 0 || h(k, c) >= h(i, c)) return false;
    last = c;
  }
  return true;
}

}  // namespace

TEST_CASE("hnf small cases") {
  CHECK(hnf(IntMatrix{{1, 1}, {0, 0}}) == IntMatrix{{1, 1}});
  CHECK(hnf(IntMatrix::identity(4)) == IntMatrix::identity(4));
  IntMatrix h = hnf(IntMatrix{{2, 4}, {6, 8}});
  CHECK(is_hnf(h));
  CHECK(abs(determinant(h)) == 8);
  CHECK(h == IntMatrix{{2, 0}, {0, 4}});
}

TEST_CASE("hnf properties on random matrices") {
  std::mt19937_64 rng(7);
  for (int t = 0; t < 60; ++t) {
    std::size_t r = 1 + rng() % 5, c = 1 + rng() % 5;
    IntMatrix m = random_matrix(rng, r, c, 6);
    IntMatrix h = hnf(m);
    CHECK(is_hnf(h));
    CHECK(hnf(h) == h);
    HnfResult ht = hnf_with_transform(m);
    CHECK(ht.transform * m == ht.h);
    CHECK(abs(determinant(ht.transform)) == 1);
    CHECK(ht.rank == h.rows());
    // same row span: each generates the other
    Lattice lh(c, h);
    for (std::size_t i = 0; i < r; ++i) CHECK(lh.contains(m.row(i)));
  }
}

TEST_CASE("snf") {
  SmithForm s = snf(IntMatrix{{2, 0}, {0, 3}});
  CHECK(s.diagonal == IntMatrix{{1, 0}, {0, 6}});
  CHECK(snf(IntMatrix(2, 3)).diagonal == IntMatrix(2, 3));
  CHECK(snf(IntMatrix{{2, 0}, {0, 2}}).diagonal == IntMatrix{{2, 0}, {0, 2}});

  std::mt19937_64 rng(11);
  for (int t = 0; t < 60; ++t) {
    std::size_t r = 1 + rng() % 5, c = 1 + rng() % 5;
    IntMatrix m = random_matrix(rng, r, c, 9);
    SmithForm f = snf(m);
    CHECK(f.left * m * f.right == f.diagonal);
    CHECK(abs(determinant(f.left)) == 1);
    CHECK(abs(determinant(f.right)) == 1);
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t j = 0; j < c; ++j)
        if (i != j) CHECK(f.diagonal(i, j) == 0);
    IntVector inv = f.invariants();
    for (std::size_t i = 0; i + 1 < inv.size(); ++i) CHECK(inv[i + 1] % inv[i] == 0);
    if (r == c) {
      Integer prod = 1;
      for (std::size_t i = 0; i < r; ++i) prod *= f.diagonal(i, i);
      CHECK(prod == abs(determinant(m)));
    }
  }
}

TEST_CASE("kernel_basis") {
  CHECK(kernel_basis(IntMatrix{{1, 1}}).basis() == IntMatrix{{1, -1}});
  CHECK(kernel_basis(IntMatrix::identity(3)).rank() == 0);
  Lattice k = kernel_basis(IntMatrix{{2, 4}});
  CHECK(k.rank() == 1);
  CHECK(k.contains(IntVector{2, -1}));
  CHECK(k.contains(IntVector{-2, 1}));

  std::mt19937_64 rng(3);
  for (int t = 0; t < 50; ++t) {
    std::size_t r = 1 + rng() % 4, c = 1 + rng() % 5;
    IntMatrix m = random_matrix(rng, r, c, 4);
    Lattice kb = kernel_basis(m);
    CHECK(kb.rank() + rank(m) == c);
    CHECK((m * kb.basis().transpose()).is_zero());
    CHECK(saturate(kb) == kb);
    // brute force: every small solution lies in the kernel lattice
    if (c <= 3) {
      IntVector v(c);
      std::vector<long> x(c, -3);
      while (true) {
        for (std::size_t i = 0; i < c; ++i) v[i] = x[i];
        if ((m * v) == IntVector(r)) CHECK(kb.contains(v));
        std::size_t i = 0;
        while (i < c && x[i] == 3) x[i++] = -3;
        if (i == c) break;
        ++x[i];
      }
    }
  }
}

TEST_CASE("saturate") {
  CHECK(saturate(Lattice(2, IntMatrix{{2, 0}})).basis() == IntMatrix{{1, 0}});
  Lattice u(2, IntMatrix{{1, 2}, {0, 1}});
  CHECK(saturate(u) == Lattice::full(2));
  CHECK(saturate(Lattice(2, IntMatrix{{2, 2}})).basis() == IntMatrix{{1, 1}});
}

TEST_CASE("quotient_group") {
  Lattice z2 = Lattice::full(2);
  FiniteAbelianGroup g = quotient_group(z2, Lattice(2, IntMatrix{{2, 0}, {0, 2}}));
  CHECK(g.invariant_factors == IntVector{2, 2});
  CHECK(quotient_group(z2, z2).trivial());
  FiniteAbelianGroup h = quotient_group(z2, Lattice(2, IntMatrix{{2, 0}, {0, 3}}));
  CHECK(h.invariant_factors == IntVector{6});
  // the lift generates: 6 * lift is in inner, 2*lift and 3*lift are not
  Lattice inner(2, IntMatrix{{2, 0}, {0, 3}});
  IntVector g0 = h.generator_lifts.row(0);
  auto mul = [](IntVector v, long k) {
    for (auto& x : v) x *= k;
    return v;
  };
  CHECK(inner.contains(mul(g0, 6)));
  CHECK(!inner.contains(mul(g0, 2)));
  CHECK(!inner.contains(mul(g0, 3)));

  CHECK_THROWS_AS(quotient_group(Lattice(2, IntMatrix{{2, 0}}), z2), NotSublattice);
  CHECK_THROWS_AS(quotient_group(z2, Lattice(2, IntMatrix{{1, 0}})), InfiniteIndex);

  std::mt19937_64 rng(5);
  for (int t = 0; t < 30; ++t) {
    IntMatrix a = random_matrix(rng, 3, 3, 5);
    IntMatrix b = random_matrix(rng, 3, 3, 3);
    if (determinant(a) == 0 || determinant(b) == 0) continue;
    Lattice outer = Lattice::full(3), mid(3, a), inner(3, b * a);
    Integer o1 = quotient_group(outer, mid).order();
    Integer o2 = quotient_group(mid, inner).order();
    CHECK(o1 * o2 == quotient_group(outer, inner).order());
    CHECK(o1 == abs(determinant(a)));
  }
}

TEST_CASE("determinant and charpoly") {
  CHECK(determinant(IntMatrix{{2, 4}, {6, 8}}) == -8);
  CHECK(charpoly(IntMatrix{{0, 7}, {-1, 0}}) == IntVector{7, 0, 1});
  std::mt19937_64 rng(9);
  for (int t = 0; t < 20; ++t) {
    IntMatrix m = random_matrix(rng, 4, 4, 5);
    IntVector c = charpoly(m);
    // Cayley-Hamilton
    IntMatrix acc(4, 4), pw = IntMatrix::identity(4);
    for (std::size_t k = 0; k < c.size(); ++k) {
      acc += pw * c[k];
      pw = pw * m;
    }
    CHECK(acc.is_zero());
    CHECK(c[0] == determinant(m) * (m.rows() % 2 ? -1 : 1));
  }
}

TEST_CASE("intersect, restrict, text format") {
  Lattice a(2, IntMatrix{{2, 0}, {0, 1}}), b(2, IntMatrix{{1, 0}, {0, 3}});
  CHECK(intersect(a, b) == Lattice(2, IntMatrix{{2, 0}, {0, 3}}));
  IntMatrix op{{0, 1}, {1, 0}};
  Lattice diag(2, IntMatrix{{1, 1}});
  CHECK(restrict_operator(op, diag) == IntMatrix{{1}});
  CHECK_THROWS_AS(restrict_operator(op, Lattice(2, IntMatrix{{1, 0}})), OperatorDoesNotRestrict);
  IntMatrix m{{1, -2, 3}, {40, 5, -600}};
  std::istringstream in(m.to_text());
  CHECK(IntMatrix::from_text(in) == m);
}

TEST_CASE("linear algebra mod l") {
  std::mt19937_64 rng(11);
  for (std::uint64_t ell : {2ull, 3ull, 5ull, 13ull}) {
    for (int trial = 0; trial < 30; ++trial) {
      std::size_t r = 1 + rng() % 5, c = 1 + rng() % 6;
      IntMatrix m(r, c);
      for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < c; ++j) m(i, j) = static_cast<long>(rng() % 7) - 3;
      IntMatrix k = kernel_mod(m, ell);
      CHECK(k.rows() + rank_mod(m, ell) == c);
      IntMatrix prod = m * k.transpose();
      for (auto& x : prod.data()) CHECK(x % static_cast<unsigned long>(ell) == 0);
      CHECK(row_basis_mod(m, ell).rows() == rank_mod(m, ell));
      CHECK(rank_mod(m, ell) <= rank(m));
    }
  }
  CHECK(rank_mod(IntMatrix{{2, 0}, {0, 3}}, 2) == 1);
  CHECK(rank_mod(IntMatrix{{2, 0}, {0, 3}}, 5) == 2);
}
