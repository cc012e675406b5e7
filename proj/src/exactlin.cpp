#include "isochar/exactlin.hpp"

#include <algorithm>
#include <cassert>
#include <istream>
#include <sstream>
#include <utility>

namespace isochar {

IntMatrix::IntMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), data_(rows * cols) {}

IntMatrix::IntMatrix(std::initializer_list<std::initializer_list<long>> rows) {
  rows_ = rows.size();
  cols_ = rows_ ? rows.begin()->size() : 0;
  data_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) throw Error("ragged matrix literal");
    for (long x : r) data_.emplace_back(x);
  }
}

IntMatrix IntMatrix::identity(std::size_t n) {
  IntMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
  return m;
}

IntMatrix IntMatrix::from_rows(const std::vector<IntVector>& rows, std::size_t cols) {
  IntMatrix m(rows.size(), cols);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != cols) throw Error("row length mismatch");
    for (std::size_t j = 0; j < cols; ++j) m(i, j) = rows[i][j];
  }
  return m;
}

IntMatrix IntMatrix::diagonal(const IntVector& d) {
  IntMatrix m(d.size(), d.size());
  for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
  return m;
}

IntVector IntMatrix::row(std::size_t i) const {
  return IntVector(data_.begin() + i * cols_, data_.begin() + (i + 1) * cols_);
}

IntVector IntMatrix::col(std::size_t j) const {
  IntVector v(rows_);
  for (std::size_t i = 0; i < rows_; ++i) v[i] = (*this)(i, j);
  return v;
}

void IntMatrix::set_row(std::size_t i, const IntVector& v) {
  assert(v.size() == cols_);
  std::copy(v.begin(), v.end(), data_.begin() + i * cols_);
}

IntMatrix IntMatrix::transpose() const {
  IntMatrix t(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

IntMatrix IntMatrix::select_rows(std::size_t begin, std::size_t end) const {
  IntMatrix m(end - begin, cols_);
  std::copy(data_.begin() + begin * cols_, data_.begin() + end * cols_, m.data_.begin());
  return m;
}

bool IntMatrix::is_zero() const {
  return std::all_of(data_.begin(), data_.end(), [](const Integer& x) { return x == 0; });
}

Integer IntMatrix::trace() const {
  Integer t = 0;
  for (std::size_t i = 0; i < std::min(rows_, cols_); ++i) t += (*this)(i, i);
  return t;
}

IntMatrix IntMatrix::operator-() const {
  IntMatrix m = *this;
  for (auto& x : m.data_) x = -x;
  return m;
}

IntMatrix& IntMatrix::operator+=(const IntMatrix& o) {
  if (rows_ != o.rows_ || cols_ != o.cols_) throw Error("shape mismatch in +");
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += o.data_[k];
  return *this;
}

IntMatrix& IntMatrix::operator-=(const IntMatrix& o) {
  if (rows_ != o.rows_ || cols_ != o.cols_) throw Error("shape mismatch in -");
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= o.data_[k];
  return *this;
}

IntMatrix& IntMatrix::operator*=(const Integer& s) {
  for (auto& x : data_) x *= s;
  return *this;
}

IntMatrix operator*(const IntMatrix& a, const IntMatrix& b) {
  if (a.cols_ != b.rows_) throw Error("shape mismatch in *");
  IntMatrix c(a.rows_, b.cols_);
  for (std::size_t i = 0; i < a.rows_; ++i)
    for (std::size_t k = 0; k < a.cols_; ++k) {
      const Integer& aik = a(i, k);
      if (aik == 0) continue;
      for (std::size_t j = 0; j < b.cols_; ++j) c(i, j) += aik * b(k, j);
    }
  return c;
}

IntVector operator*(const IntMatrix& a, const IntVector& v) {
  if (a.cols_ != v.size()) throw Error("shape mismatch in matrix*vector");
  IntVector r(a.rows_);
  for (std::size_t i = 0; i < a.rows_; ++i)
    for (std::size_t k = 0; k < a.cols_; ++k) r[i] += a(i, k) * v[k];
  return r;
}

bool operator==(const IntMatrix& a, const IntMatrix& b) {
  return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
}

std::string IntMatrix::to_text() const {
  std::ostringstream os;
  os << rows_ << ' ' << cols_ << '\n';
  for (std::size_t i = 0; i < rows_; ++i) {
    for (std::size_t j = 0; j < cols_; ++j) {
      if (j) os << ' ';
      os << (*this)(i, j).get_str();
    }
    os << '\n';
  }
  return os.str();
}

IntMatrix IntMatrix::from_text(std::istream& in) {
  std::size_t r = 0, c = 0;
  if (!(in >> r >> c)) throw ParseError("matrix header: expected \"rows cols\"");
  IntMatrix m(r, c);
  std::string tok;
  for (std::size_t k = 0; k < r * c; ++k) {
    if (!(in >> tok)) throw ParseError("matrix body truncated");
    if (m.data_[k].set_str(tok, 10) != 0) throw ParseError("bad integer '" + tok + "'");
  }
  return m;
}

IntMatrix vstack(const IntMatrix& a, const IntMatrix& b) {
  if (a.rows() == 0) return b;
  if (b.rows() == 0) return a;
  if (a.cols() != b.cols()) throw Error("vstack column mismatch");
  IntMatrix m(a.rows() + b.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) m(i, j) = a(i, j);
  for (std::size_t i = 0; i < b.rows(); ++i)
    for (std::size_t j = 0; j < b.cols(); ++j) m(a.rows() + i, j) = b(i, j);
  return m;
}

IntMatrix hstack(const IntMatrix& a, const IntMatrix& b) {
  if (a.rows() != b.rows()) throw Error("hstack row mismatch");
  IntMatrix m(a.rows(), a.cols() + b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) m(i, j) = a(i, j);
    for (std::size_t j = 0; j < b.cols(); ++j) m(i, a.cols() + j) = b(i, j);
  }
  return m;
}

IntMatrix kronecker(const IntMatrix& a, const IntMatrix& b) {
  IntMatrix m(a.rows() * b.rows(), a.cols() * b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) {
      if (a(i, j) == 0) continue;
      for (std::size_t k = 0; k < b.rows(); ++k)
        for (std::size_t l = 0; l < b.cols(); ++l)
          m(i * b.rows() + k, j * b.cols() + l) = a(i, j) * b(k, l);
    }
  return m;
}

IntVector flatten(const IntMatrix& m) { return m.data(); }

IntMatrix unflatten(const IntVector& v, std::size_t rows, std::size_t cols) {
  assert(v.size() == rows * cols);
  IntMatrix m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) m(i, j) = v[i * cols + j];
  return m;
}

namespace {

// Row operations on a dense matrix kept as a vector of rows, which makes
// swapping and combining rows cheap.
using Rows = std::vector<IntVector>;

Rows to_rows(const IntMatrix& m) {
  Rows r(m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i) r[i] = m.row(i);
  return r;
}

IntMatrix from_rows(const Rows& r, std::size_t cols) { return IntMatrix::from_rows(r, cols); }

void axpy_row(IntVector& dst, const Integer& q, const IntVector& src) {
  for (std::size_t j = 0; j < dst.size(); ++j)
    if (src[j] != 0) dst[j] -= q * src[j];
}

void negate_row(IntVector& r) {
  for (auto& x : r) x = -x;
}

// Echelonizes `a` in place (optionally mirroring row operations on `u`).
std::size_t echelonize(Rows& a, std::size_t cols, Rows* u) {
  const std::size_t m = a.size();
  std::size_t r = 0;
  for (std::size_t c = 0; c < cols && r < m; ++c) {
    while (true) {
      std::size_t best = m;
      for (std::size_t i = r; i < m; ++i) {
        if (a[i][c] == 0) continue;
        if (best == m || abs(a[i][c]) < abs(a[best][c])) best = i;
      }
      if (best == m) break;
      if (best != r) {
        std::swap(a[best], a[r]);
        if (u) std::swap((*u)[best], (*u)[r]);
      }
      bool clean = true;
      for (std::size_t i = r + 1; i < m; ++i) {
        if (a[i][c] == 0) continue;
        Integer q;
        mpz_fdiv_q(q.get_mpz_t(), a[i][c].get_mpz_t(), a[r][c].get_mpz_t());
        axpy_row(a[i], q, a[r]);
        if (u) axpy_row((*u)[i], q, (*u)[r]);
        if (a[i][c] != 0) clean = false;
      }
      if (clean) break;
    }
    if (a[r][c] == 0) continue;
    if (a[r][c] < 0) {
      negate_row(a[r]);
      if (u) negate_row((*u)[r]);
    }
    for (std::size_t i = 0; i < r; ++i) {
      if (a[i][c] == 0) continue;
      Integer q;
      mpz_fdiv_q(q.get_mpz_t(), a[i][c].get_mpz_t(), a[r][c].get_mpz_t());
      if (q == 0) continue;
      axpy_row(a[i], q, a[r]);
      if (u) axpy_row((*u)[i], q, (*u)[r]);
    }
    ++r;
  }
  return r;
}

}  // namespace

HnfResult hnf_with_transform(const IntMatrix& m) {
  Rows a = to_rows(m);
  Rows u = to_rows(IntMatrix::identity(m.rows()));
  std::size_t r = echelonize(a, m.cols(), &u);
  return {from_rows(a, m.cols()), from_rows(u, m.rows()), r};
}

IntMatrix hnf(const IntMatrix& m) {
  Rows a = to_rows(m);
  std::size_t r = echelonize(a, m.cols(), nullptr);
  a.resize(r);
  return from_rows(a, m.cols());
}

std::size_t rank(const IntMatrix& m) { return hnf(m).rows(); }

IntVector SmithForm::invariants() const {
  IntVector d;
  for (std::size_t i = 0; i < std::min(diagonal.rows(), diagonal.cols()); ++i)
    if (diagonal(i, i) != 0) d.push_back(diagonal(i, i));
  return d;
}

SmithForm snf(const IntMatrix& m) {
  const std::size_t R = m.rows(), C = m.cols();
  IntMatrix a = m;
  IntMatrix left = IntMatrix::identity(R);
  IntMatrix right = IntMatrix::identity(C);

  auto swap_rows = [&](std::size_t i, std::size_t j) {
    if (i == j) return;
    for (std::size_t k = 0; k < C; ++k) std::swap(a(i, k), a(j, k));
    for (std::size_t k = 0; k < R; ++k) std::swap(left(i, k), left(j, k));
  };
  auto swap_cols = [&](std::size_t i, std::size_t j) {
    if (i == j) return;
    for (std::size_t k = 0; k < R; ++k) std::swap(a(k, i), a(k, j));
    for (std::size_t k = 0; k < C; ++k) std::swap(right(k, i), right(k, j));
  };
  // row_i -= q * row_j
  auto row_op = [&](std::size_t i, std::size_t j, const Integer& q) {
    for (std::size_t k = 0; k < C; ++k) a(i, k) -= q * a(j, k);
    for (std::size_t k = 0; k < R; ++k) left(i, k) -= q * left(j, k);
  };
  // col_i -= q * col_j
  auto col_op = [&](std::size_t i, std::size_t j, const Integer& q) {
    for (std::size_t k = 0; k < R; ++k) a(k, i) -= q * a(k, j);
    for (std::size_t k = 0; k < C; ++k) right(k, i) -= q * right(k, j);
  };

  const std::size_t n = std::min(R, C);
  for (std::size_t t = 0; t < n; ++t) {
    // smallest nonzero entry of the trailing block becomes the pivot
    std::size_t bi = R, bj = C;
    for (std::size_t i = t; i < R; ++i)
      for (std::size_t j = t; j < C; ++j)
        if (a(i, j) != 0 && (bi == R || abs(a(i, j)) < abs(a(bi, bj)))) {
          bi = i;
          bj = j;
        }
    if (bi == R) break;
    swap_rows(t, bi);
    swap_cols(t, bj);
    while (true) {
      bool changed = false;
      for (std::size_t i = t + 1; i < R; ++i) {
        if (a(i, t) == 0) continue;
        Integer q;
        mpz_fdiv_q(q.get_mpz_t(), a(i, t).get_mpz_t(), a(t, t).get_mpz_t());
        row_op(i, t, q);
        if (a(i, t) != 0) {
          swap_rows(t, i);
          changed = true;
        }
      }
      for (std::size_t j = t + 1; j < C; ++j) {
        if (a(t, j) == 0) continue;
        Integer q;
        mpz_fdiv_q(q.get_mpz_t(), a(t, j).get_mpz_t(), a(t, t).get_mpz_t());
        col_op(j, t, q);
        if (a(t, j) != 0) {
          swap_cols(t, j);
          changed = true;
        }
      }
      if (changed) continue;
      // divisibility: the pivot must divide every entry of the trailing block
      bool fixed = false;
      for (std::size_t i = t + 1; i < R && !fixed; ++i)
        for (std::size_t j = t + 1; j < C; ++j)
          if (a(i, j) % a(t, t) != 0) {
            row_op(t, i, Integer(-1));  // row_t += row_i
            fixed = true;
            break;
          }
      if (!fixed) break;
    }
    if (a(t, t) < 0) {
      for (std::size_t k = 0; k < C; ++k) a(t, k) = -a(t, k);
      for (std::size_t k = 0; k < R; ++k) left(t, k) = -left(t, k);
    }
  }
  return {a, left, right};
}

Integer determinant(const IntMatrix& m) {
  if (!m.is_square()) throw Error("determinant of non-square matrix");
  const std::size_t n = m.rows();
  if (n == 0) return 1;
  IntMatrix a = m;
  Integer prev = 1;
  int sign = 1;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (a(k, k) == 0) {
      std::size_t s = k + 1;
      while (s < n && a(s, k) == 0) ++s;
      if (s == n) return 0;
      for (std::size_t j = 0; j < n; ++j) std::swap(a(k, j), a(s, j));
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      for (std::size_t j = k + 1; j < n; ++j) {
        Integer t = a(i, j) * a(k, k) - a(i, k) * a(k, j);
        mpz_divexact(a(i, j).get_mpz_t(), t.get_mpz_t(), prev.get_mpz_t());
      }
      a(i, k) = 0;
    }
    prev = a(k, k);
  }
  return sign * a(n - 1, n - 1);
}

IntVector charpoly(const IntMatrix& m) {
  if (!m.is_square()) throw Error("charpoly of non-square matrix");
  const std::size_t n = m.rows();
  IntVector c(n + 1);
  c[n] = 1;
  IntMatrix mk(n, n);
  for (std::size_t k = 1; k <= n; ++k) {
    IntMatrix next = m * mk;
    for (std::size_t i = 0; i < n; ++i) next(i, i) += c[n - k + 1];
    mk = std::move(next);
    Integer tr = (m * mk).trace();
    Integer q;
    mpz_divexact_ui(q.get_mpz_t(), tr.get_mpz_t(), k);
    c[n - k] = -q;
  }
  return c;
}

Lattice kernel_basis(const IntMatrix& m) {
  const std::size_t n = m.cols();
  if (m.rows() == 0) return Lattice::full(n);
  HnfResult h = hnf_with_transform(m.transpose());
  IntMatrix k = h.transform.select_rows(h.rank, n);
  return Lattice(n, k);
}

Lattice::Lattice(std::size_t ambient_rank) : ambient_(ambient_rank), basis_(0, ambient_rank) {}

Lattice::Lattice(std::size_t ambient_rank, const IntMatrix& generators) : ambient_(ambient_rank) {
  if (generators.rows() == 0) {
    basis_ = IntMatrix(0, ambient_rank);
    return;
  }
  if (generators.cols() != ambient_rank) throw Error("lattice generator width mismatch");
  basis_ = hnf(generators);
}

Lattice Lattice::full(std::size_t n) {
  Lattice l(n);
  l.basis_ = IntMatrix::identity(n);
  return l;
}

std::optional<IntVector> Lattice::coordinates(const IntVector& v) const {
  if (v.size() != ambient_) throw Error("vector width mismatch");
  IntVector res = v;
  IntVector z(rank());
  std::size_t col = 0;
  for (std::size_t i = 0; i < rank(); ++i) {
    while (basis_(i, col) == 0) {
      if (res[col] != 0) return std::nullopt;
      ++col;
    }
    if (!mpz_divisible_p(res[col].get_mpz_t(), basis_(i, col).get_mpz_t())) return std::nullopt;
    mpz_divexact(z[i].get_mpz_t(), res[col].get_mpz_t(), basis_(i, col).get_mpz_t());
    if (z[i] != 0)
      for (std::size_t j = col; j < ambient_; ++j) res[j] -= z[i] * basis_(i, j);
    ++col;
  }
  for (const auto& x : res)
    if (x != 0) return std::nullopt;
  return z;
}

bool Lattice::contains(const IntVector& v) const { return coordinates(v).has_value(); }

bool Lattice::contains(const Lattice& other) const {
  for (std::size_t i = 0; i < other.rank(); ++i)
    if (!contains(other.basis().row(i))) return false;
  return true;
}

Lattice saturate(const Lattice& l) {
  const std::size_t n = l.ambient_rank();
  if (l.rank() == 0) return Lattice(n);
  Lattice perp = kernel_basis(l.basis());
  if (perp.rank() == 0) return Lattice::full(n);
  return kernel_basis(perp.basis());
}

Lattice lattice_sum(const Lattice& a, const Lattice& b) {
  return Lattice(a.ambient_rank(), vstack(a.basis(), b.basis()));
}

Lattice intersect(const Lattice& a, const Lattice& b) {
  const std::size_t n = a.ambient_rank();
  if (a.rank() == 0 || b.rank() == 0) return Lattice(n);
  IntMatrix stacked = vstack(a.basis(), -b.basis());
  Lattice k = kernel_basis(stacked.transpose());
  IntMatrix xs(k.rank(), a.rank());
  for (std::size_t i = 0; i < k.rank(); ++i)
    for (std::size_t j = 0; j < a.rank(); ++j) xs(i, j) = k.basis()(i, j);
  return Lattice(n, xs * a.basis());
}

IntMatrix coordinates_in(const Lattice& l, const IntMatrix& rows) {
  IntMatrix c(rows.rows(), l.rank());
  for (std::size_t i = 0; i < rows.rows(); ++i) {
    auto z = l.coordinates(rows.row(i));
    if (!z) throw NotSublattice("vector not contained in lattice");
    c.set_row(i, *z);
  }
  return c;
}

Integer FiniteAbelianGroup::order() const {
  Integer o = 1;
  for (const auto& d : invariant_factors) o *= d;
  return o;
}

namespace {

// Exact inverse of a unimodular matrix via rational Gauss-Jordan.
IntMatrix unimodular_inverse(const IntMatrix& u) {
  const std::size_t n = u.rows();
  std::vector<std::vector<mpq_class>> a(n, std::vector<mpq_class>(2 * n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) a[i][j] = u(i, j);
    a[i][n + i] = 1;
  }
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    while (p < n && a[p][c] == 0) ++p;
    if (p == n) throw Error("singular matrix in unimodular_inverse");
    std::swap(a[p], a[c]);
    mpq_class inv = 1 / a[c][c];
    for (auto& x : a[c]) x *= inv;
    for (std::size_t i = 0; i < n; ++i) {
      if (i == c || a[i][c] == 0) continue;
      mpq_class f = a[i][c];
      for (std::size_t j = 0; j < 2 * n; ++j) a[i][j] -= f * a[c][j];
    }
  }
  IntMatrix r(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const mpq_class& x = a[i][n + j];
      if (x.get_den() != 1) throw Error("matrix is not unimodular");
      r(i, j) = x.get_num();
    }
  return r;
}

}  // namespace

FiniteAbelianGroup quotient_group(const Lattice& outer, const Lattice& inner) {
  if (outer.ambient_rank() != inner.ambient_rank()) throw NotSublattice("ambient rank mismatch");
  IntMatrix c = coordinates_in(outer, inner.basis());
  if (inner.rank() != outer.rank()) throw InfiniteIndex("sublattice has smaller rank");
  FiniteAbelianGroup g;
  g.generator_lifts = IntMatrix(0, outer.ambient_rank());
  if (outer.rank() == 0) return g;
  SmithForm s = snf(c);
  // inner = rowspan(D * right^{-1} * O), so the rows of right^{-1} * O generate outer/inner
  IntMatrix gens = unimodular_inverse(s.right) * outer.basis();
  std::vector<IntVector> lifts;
  for (std::size_t i = 0; i < s.diagonal.rows(); ++i) {
    const Integer& d = s.diagonal(i, i);
    if (d == 0) throw InfiniteIndex("zero invariant factor");
    if (d == 1) continue;
    g.invariant_factors.push_back(d);
    lifts.push_back(gens.row(i));
  }
  g.generator_lifts = IntMatrix::from_rows(lifts, outer.ambient_rank());
  return g;
}

IntMatrix restrict_operator(const IntMatrix& op, const Lattice& sub) {
  const std::size_t r = sub.rank();
  IntMatrix images = (op * sub.basis().transpose()).transpose();  // row j = op(b_j)
  IntMatrix res(r, r);
  for (std::size_t j = 0; j < r; ++j) {
    auto z = sub.coordinates(images.row(j));
    if (!z) throw OperatorDoesNotRestrict("operator does not preserve the sublattice");
    for (std::size_t i = 0; i < r; ++i) res(i, j) = (*z)[i];
  }
  return res;
}

std::string to_string(const IntVector& v) {
  std::string s = "[";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ",";
    s += v[i].get_str();
  }
  return s + "]";
}

}  // namespace isochar

namespace isochar {

namespace {

using ModRows = std::vector<std::vector<std::uint64_t>>;

ModRows to_mod(const IntMatrix& m, std::uint64_t ell) {
  ModRows r(m.rows(), std::vector<std::uint64_t>(m.cols()));
  Integer t;
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) {
      mpz_fdiv_r_ui(t.get_mpz_t(), m(i, j).get_mpz_t(), ell);
      r[i][j] = t.get_ui();
    }
  return r;
}

std::uint64_t inv_mod(std::uint64_t a, std::uint64_t ell) {
  std::uint64_t r = 1, e = ell - 2;
  while (e) {
    if (e & 1) r = r * a % ell;
    a = a * a % ell;
    e >>= 1;
  }
  return r;
}

// in-place reduced row echelon form; returns pivot columns
std::vector<std::size_t> rref(ModRows& a, std::size_t cols, std::uint64_t ell) {
  std::vector<std::size_t> pivots;
  std::size_t row = 0;
  for (std::size_t c = 0; c < cols && row < a.size(); ++c) {
    std::size_t piv = row;
    while (piv < a.size() && a[piv][c] == 0) ++piv;
    if (piv == a.size()) continue;
    std::swap(a[piv], a[row]);
    std::uint64_t inv = inv_mod(a[row][c], ell);
    for (auto& x : a[row]) x = x * inv % ell;
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (i == row || a[i][c] == 0) continue;
      std::uint64_t f = a[i][c];
      for (std::size_t j = c; j < cols; ++j) a[i][j] = (a[i][j] + (ell - f) * a[row][j]) % ell;
    }
    pivots.push_back(c);
    ++row;
  }
  a.resize(row);
  return pivots;
}

IntMatrix from_mod(const ModRows& a, std::size_t cols) {
  IntMatrix m(a.size(), cols);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < cols; ++j) m(i, j) = static_cast<unsigned long>(a[i][j]);
  return m;
}

}  // namespace

std::size_t rank_mod(const IntMatrix& m, std::uint64_t ell) {
  ModRows a = to_mod(m, ell);
  return rref(a, m.cols(), ell).size();
}

IntMatrix row_basis_mod(const IntMatrix& m, std::uint64_t ell) {
  ModRows a = to_mod(m, ell);
  rref(a, m.cols(), ell);
  return from_mod(a, m.cols());
}

IntMatrix kernel_mod(const IntMatrix& m, std::uint64_t ell) {
  ModRows a = to_mod(m, ell);
  auto pivots = rref(a, m.cols(), ell);
  std::vector<bool> is_pivot(m.cols(), false);
  for (auto c : pivots) is_pivot[c] = true;
  ModRows out;
  for (std::size_t f = 0; f < m.cols(); ++f) {
    if (is_pivot[f]) continue;
    std::vector<std::uint64_t> v(m.cols(), 0);
    v[f] = 1;
    for (std::size_t i = 0; i < pivots.size(); ++i) v[pivots[i]] = (ell - a[i][f]) % ell;
    out.push_back(std::move(v));
  }
  return from_mod(out, m.cols());
}

}  // namespace isochar
