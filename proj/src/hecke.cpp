#include "isochar/hecke.hpp"

#include <algorithm>
#include <numeric>
#include <random>

namespace isochar {

namespace {

// Row echelon lattice basis that grows one vector at a time.
class Echelon {
 public:
  explicit Echelon(std::size_t dim) : dim_(dim) {}

  bool contains(IntVector v) const {
    for (const auto& row : rows_) {
      const Integer& piv = row.second[row.first];
      const Integer& x = v[row.first];
      if (x == 0) continue;
      if (!mpz_divisible_p(x.get_mpz_t(), piv.get_mpz_t())) return false;
      Integer f = x / piv;
      for (std::size_t j = row.first; j < dim_; ++j) v[j] -= f * row.second[j];
    }
    return std::all_of(v.begin(), v.end(), [](const Integer& x) { return x == 0; });
  }

  // true if the span grew
  bool insert(IntVector v) {
    bool grew = false;
    for (std::size_t c = 0; c < dim_; ++c) {
      if (v[c] == 0) continue;
      auto it = std::find_if(rows_.begin(), rows_.end(), [&](const auto& r) { return r.first == c; });
      if (it == rows_.end()) {
        rows_.emplace_back(c, std::move(v));
        std::sort(rows_.begin(), rows_.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
        return true;
      }
      IntVector& row = it->second;
      if (mpz_divisible_p(v[c].get_mpz_t(), row[c].get_mpz_t())) {
        Integer f = v[c] / row[c];
        for (std::size_t j = c; j < dim_; ++j) v[j] -= f * row[j];
        continue;
      }
      Integer g, s, t;
      mpz_gcdext(g.get_mpz_t(), s.get_mpz_t(), t.get_mpz_t(), row[c].get_mpz_t(), v[c].get_mpz_t());
      Integer a = row[c] / g, b = v[c] / g;
      IntVector fresh(dim_), rest(dim_);
      for (std::size_t j = c; j < dim_; ++j) {
        fresh[j] = s * row[j] + t * v[j];
        rest[j] = a * v[j] - b * row[j];
      }
      row = std::move(fresh);
      v = std::move(rest);
      grew = true;
    }
    return grew;
  }

 private:
  std::size_t dim_;
  std::vector<std::pair<std::size_t, IntVector>> rows_;
};

std::uint64_t parse_prime(const std::string& label) { return std::stoull(label.substr(1)); }

IntVector reduce_mod(IntVector v, std::uint64_t ell) {
  for (auto& x : v) mpz_fdiv_r_ui(x.get_mpz_t(), x.get_mpz_t(), ell);
  return v;
}

IntMatrix from_columns(const std::vector<IntVector>& cols, std::size_t rows) {
  IntMatrix m(rows, cols.size());
  for (std::size_t j = 0; j < cols.size(); ++j)
    for (std::size_t i = 0; i < rows; ++i) m(i, j) = cols[j][i];
  return m;
}

// inverse of an invertible square matrix mod ell
IntMatrix inverse_mod(const IntMatrix& p, std::uint64_t ell) {
  std::size_t d = p.rows();
  IntMatrix r = row_basis_mod(hstack(p, IntMatrix::identity(d)), ell);
  if (r.rows() != d) throw Error("matrix is singular mod " + std::to_string(ell));
  IntMatrix inv(d, d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) {
      if (r(i, j) != (i == j ? 1 : 0)) throw Error("matrix is singular mod " + std::to_string(ell));
      inv(i, j) = r(i, d + j);
    }
  return inv;
}

IntVector mat_vec_mod(const IntMatrix& m, const IntVector& v, std::uint64_t ell) { return reduce_mod(m * v, ell); }

}  // namespace

HeckeAlgebra algebra_from_operators(const OperatorSet& ops) {
  std::size_t n = 0;
  for (const auto& [label, m] : ops) {
    if (!m.is_square()) throw Error("operator '" + label + "' is not square");
    n = m.rows();
  }
  for (const auto& [label, m] : ops)
    if (m.rows() != n) throw Error("operators act on spaces of different rank");
  for (auto a = ops.begin(); a != ops.end(); ++a)
    for (auto b = std::next(a); b != ops.end(); ++b)
      if (!(a->second * b->second == b->second * a->second))
        throw NonCommuting("operators " + a->first + " and " + b->first + " do not commute");

  HeckeAlgebra t;
  t.n_ = n;
  t.gens_ = ops;
  if (n == 0) {
    t.span_ = Lattice(0);
    return t;
  }
  Echelon span(n * n);
  std::vector<IntMatrix> mono{IntMatrix::identity(n)};
  t.monomials_.push_back({0, ""});
  span.insert(flatten(mono[0]));
  for (std::size_t k = 0; k < mono.size(); ++k) {
    for (const auto& [label, g] : ops) {
      IntMatrix cand = g * mono[k];
      if (span.insert(flatten(cand))) {
        mono.push_back(std::move(cand));
        t.monomials_.push_back({k, label});
      }
    }
  }
  IntMatrix flat(mono.size(), n * n);
  for (std::size_t k = 0; k < mono.size(); ++k) flat.set_row(k, flatten(mono[k]));
  HnfResult h = hnf_with_transform(flat);
  t.span_ = Lattice(n * n, flat);
  if (!(t.span_.basis() == h.h.select_rows(0, h.rank))) throw Error("internal: Hermite forms disagree");
  t.basis_in_monomials_ = h.transform.select_rows(0, h.rank);
  t.relations_ = h.transform.select_rows(h.rank, mono.size());
  for (std::size_t i = 0; i < h.rank; ++i) t.basis_.push_back(unflatten(h.h.row(i), n, n));
  return t;
}

HeckeAlgebra algebra_from_operators(const OperatorSet& ops, const Lattice& reference) {
  OperatorSet restricted;
  for (const auto& [label, m] : ops) {
    try {
      restricted[label] = restrict_operator(m, reference);
    } catch (const OperatorDoesNotRestrict&) {
      throw NotStable("operator " + label + " does not preserve the reference lattice");
    }
  }
  return algebra_from_operators(restricted);
}

std::vector<std::string> HeckeAlgebra::labels() const {
  std::vector<std::string> out;
  for (const auto& [label, _] : gens_) out.push_back(label);
  return out;
}

const IntMatrix& HeckeAlgebra::generator(const std::string& label) const {
  auto it = gens_.find(label);
  if (it == gens_.end()) throw Error("algebra has no generator '" + label + "'");
  return it->second;
}

IntMatrix HeckeAlgebra::element(const IntVector& c) const {
  IntMatrix a(n_, n_);
  for (std::size_t i = 0; i < basis_.size(); ++i)
    if (c[i] != 0) a += basis_[i] * c[i];
  return a;
}

std::optional<IntVector> HeckeAlgebra::coordinates(const IntMatrix& a) const {
  if (n_ == 0) return IntVector{};
  return span_.coordinates(flatten(a));
}

IntVector HeckeAlgebra::coords(const IntMatrix& a) const {
  auto c = coordinates(a);
  if (!c) throw NotSublattice("matrix is not in the algebra");
  return *c;
}

IntVector HeckeAlgebra::one() const { return coords(IntMatrix::identity(n_)); }

IntVector HeckeAlgebra::generator_coords(const std::string& label) const { return coords(generator(label)); }

IntVector HeckeAlgebra::multiply(const IntVector& a, const IntVector& b) const {
  return coords(element(a) * element(b));
}

IntMatrix HeckeAlgebra::regular(const IntVector& a) const {
  IntMatrix ea = element(a);
  std::vector<IntVector> cols;
  for (const auto& b : basis_) cols.push_back(coords(ea * b));
  return from_columns(cols, rank());
}

std::vector<IntMatrix> HeckeAlgebra::multiplication_table() const {
  std::vector<IntMatrix> out;
  for (std::size_t i = 0; i < rank(); ++i) {
    IntVector e(rank(), 0);
    e[i] = 1;
    out.push_back(regular(e));
  }
  return out;
}

std::vector<IntMatrix> HeckeAlgebra::monomial_images(const OperatorSet& module_gens) const {
  std::size_t m = 0;
  for (const auto& [label, g] : gens_) {
    auto it = module_gens.find(label);
    if (it == module_gens.end()) throw Error("module lacks generator '" + label + "'");
    m = it->second.rows();
  }
  std::vector<IntMatrix> mono;
  mono.reserve(monomials_.size());
  for (const auto& mon : monomials_) {
    if (mon.label.empty())
      mono.push_back(IntMatrix::identity(m));
    else
      mono.push_back(module_gens.at(mon.label) * mono[mon.parent]);
  }
  return mono;
}

std::vector<IntMatrix> HeckeAlgebra::act_basis(const OperatorSet& module_gens) const {
  auto mono = monomial_images(module_gens);
  std::vector<IntMatrix> out;
  for (std::size_t i = 0; i < rank(); ++i) {
    IntMatrix a(mono.empty() ? 0 : mono[0].rows(), mono.empty() ? 0 : mono[0].cols());
    for (std::size_t k = 0; k < mono.size(); ++k)
      if (basis_in_monomials_(i, k) != 0) a += mono[k] * basis_in_monomials_(i, k);
    out.push_back(std::move(a));
  }
  return out;
}

IntMatrix HeckeAlgebra::act(const IntVector& c, const OperatorSet& module_gens) const {
  auto b = act_basis(module_gens);
  std::size_t m = b.empty() ? 0 : b[0].rows();
  IntMatrix a(m, m);
  for (std::size_t i = 0; i < b.size(); ++i)
    if (c[i] != 0) a += b[i] * c[i];
  return a;
}

bool HeckeAlgebra::relations_hold(const OperatorSet& module_gens) const {
  auto mono = monomial_images(module_gens);
  for (std::size_t r = 0; r < relations_.rows(); ++r) {
    IntMatrix s(mono[0].rows(), mono[0].cols());
    for (std::size_t k = 0; k < mono.size(); ++k)
      if (relations_(r, k) != 0) s += mono[k] * relations_(r, k);
    if (!s.is_zero()) return false;
  }
  // generators outside the algebra's label set are not checked
  for (auto a = module_gens.begin(); a != module_gens.end(); ++a)
    for (auto b = std::next(a); b != module_gens.end(); ++b)
      if (gens_.count(a->first) && gens_.count(b->first) && !(a->second * b->second == b->second * a->second))
        return false;
  return true;
}

// ---------------------------------------------------------------- ideals

Lattice ideal_generated(const HeckeAlgebra& t, const std::vector<IntVector>& elements) {
  IntMatrix rows(0, t.rank());
  for (const auto& e : elements) rows = vstack(rows, t.regular(e).transpose());
  return Lattice(t.rank(), rows);
}

bool is_ideal(const HeckeAlgebra& t, const Lattice& i) {
  for (const auto& label : t.labels()) {
    IntMatrix g = t.regular(t.generator_coords(label));
    for (std::size_t r = 0; r < i.rank(); ++r)
      if (!i.contains(g * i.basis().row(r))) return false;
  }
  return true;
}

Lattice annihilator(const HeckeAlgebra& t, const Lattice& i) {
  // a x = 0 for x in i  <=>  regular(x) a = 0
  IntMatrix system(0, t.rank());
  for (std::size_t r = 0; r < i.rank(); ++r) system = vstack(system, t.regular(i.basis().row(r)));
  if (system.rows() == 0) return Lattice::full(t.rank());
  return kernel_basis(system);
}

NewQuotient new_quotient(const HeckeAlgebra& t, const Lattice& target) {
  NewQuotient out;
  out.algebra = algebra_from_operators(t.generators(), target);
  std::vector<IntVector> cols;
  for (const auto& b : t.basis()) {
    IntMatrix r;
    try {
      r = restrict_operator(b, target);
    } catch (const OperatorDoesNotRestrict&) {
      throw NotStable("algebra element does not preserve the target lattice");
    }
    cols.push_back(out.algebra.rank() == 0 ? IntVector{} : out.algebra.coords(r));
  }
  out.projection = from_columns(cols, out.algebra.rank());
  out.kernel = out.algebra.rank() == 0 ? Lattice::full(t.rank()) : kernel_basis(out.projection);
  return out;
}

std::uint64_t sturm_generator_bound(std::uint64_t n) {
  mpq_class b(n, 6);
  for (const auto& [r, e] : factor_integer(Integer(static_cast<unsigned long>(n)))) b *= mpq_class(r + 1, r);
  b.canonicalize();
  Integer c;
  mpz_cdiv_q(c.get_mpz_t(), b.get_num_mpz_t(), b.get_den_mpz_t());
  return c.get_ui();
}

std::vector<std::string> generator_labels(std::uint64_t n, std::uint64_t bound) {
  std::vector<std::string> out;
  for (std::uint64_t l = 2; l <= bound; ++l)
    if (is_prime(l) && n % l != 0) out.push_back("T" + std::to_string(l));
  for (const auto& [r, e] : factor_integer(Integer(static_cast<unsigned long>(n)))) out.push_back("w" + r.get_str());
  return out;
}

// ---------------------------------------------------------------- maximal ideals

Elem MaximalIdeal::reduce(const IntVector& a) const {
  const auto& F = *residue_field;
  IntVector c = mat_vec_mod(power_inverse, mat_vec_mod(residue_projection, a, ell), ell);
  Elem x = 0, pw = 1;
  for (const auto& ci : c) {
    x = F.add(x, F.mul(F.from_int(ci), pw));
    pw = F.mul(pw, primitive_image);
  }
  return x;
}

std::vector<MaximalIdeal> maximal_ideals_above(const HeckeAlgebra& t, std::uint64_t ell) {
  if (!is_prime(ell)) throw Error("residue characteristic must be prime");
  const std::size_t r = t.rank();
  std::vector<MaximalIdeal> out;
  if (r == 0) return out;

  auto mul = [&](const IntVector& a, const IntVector& b) { return reduce_mod(t.multiply(a, b), ell); };
  auto power = [&](IntVector a, std::uint64_t e) {
    IntVector acc = reduce_mod(t.one(), ell);
    while (e) {
      if (e & 1) acc = mul(acc, a);
      e >>= 1;
      if (e) a = mul(a, a);
    }
    return acc;
  };
  auto unit = [&](std::size_t i) {
    IntVector e(r, 0);
    e[i] = 1;
    return e;
  };
  auto regular_mod = [&](const IntVector& a) {
    IntMatrix m = t.regular(a);
    IntMatrix red(m.rows(), m.cols());
    for (std::size_t i = 0; i < m.rows(); ++i) red.set_row(i, reduce_mod(m.row(i), ell));
    return red;
  };

  // x -> x^ell is F_ell-linear on t / ell t; its fixed points span the idempotents
  std::vector<IntVector> fcols;
  for (std::size_t i = 0; i < r; ++i) fcols.push_back(power(unit(i), ell));
  IntMatrix frob = from_columns(fcols, r);
  IntMatrix fixed = kernel_mod(frob - IntMatrix::identity(r), ell);

  const IntVector one = reduce_mod(t.one(), ell);
  std::vector<IntVector> idem{one};
  for (std::size_t k = 0; k < fixed.rows(); ++k) {
    IntVector x = fixed.row(k);
    std::vector<IntVector> next;
    for (const auto& e : idem) {
      for (std::uint64_t c = 0; c < ell; ++c) {
        IntVector f = e;
        for (std::uint64_t c2 = 0; c2 < ell && std::any_of(f.begin(), f.end(), [](const Integer& v) { return v != 0; }); ++c2) {
          if (c2 == c) continue;
          IntVector shifted = x;
          for (std::size_t i = 0; i < r; ++i) shifted[i] -= one[i] * static_cast<unsigned long>(c2);
          Integer inv;
          Integer diff = (Integer(static_cast<unsigned long>(c)) - Integer(static_cast<unsigned long>(c2)));
          Integer mod(static_cast<unsigned long>(ell));
          mpz_invert(inv.get_mpz_t(), diff.get_mpz_t(), mod.get_mpz_t());
          f = mul(f, reduce_mod(shifted, ell));
          for (auto& v : f) v *= inv;
          f = reduce_mod(f, ell);
        }
        if (std::any_of(f.begin(), f.end(), [](const Integer& v) { return v != 0; })) next.push_back(f);
      }
    }
    idem = std::move(next);
  }

  // ell^k >= r so that x^(ell^k) kills the nilradical
  std::size_t k = 1;
  for (Integer pk = ell; pk < static_cast<unsigned long>(r); pk *= static_cast<unsigned long>(ell)) ++k;
  IntMatrix phi = IntMatrix::identity(r);
  for (std::size_t i = 0; i < k; ++i) {
    phi = phi * frob;
    for (std::size_t a = 0; a < r; ++a) phi.set_row(a, reduce_mod(phi.row(a), ell));
  }

  std::mt19937_64 rng(kFactorSeed ^ ell);
  for (const auto& e : idem) {
    MaximalIdeal m;
    m.ell = ell;
    IntMatrix re = regular_mod(e);
    m.local_dimension = rank_mod(re, ell);
    IntMatrix mbar = kernel_mod(phi * re, ell);
    m.degree = static_cast<unsigned>(r - mbar.rows());
    m.lattice = Lattice(r, vstack(mbar, IntMatrix::identity(r) * Integer(static_cast<unsigned long>(ell))));
    m.residue_projection = mbar.rows() == 0 ? IntMatrix::identity(r) : kernel_mod(mbar, ell);
    const std::size_t d = m.degree;

    // primitive element of the residue field
    std::vector<IntVector> candidates;
    for (const auto& label : t.labels()) candidates.push_back(reduce_mod(t.generator_coords(label), ell));
    std::size_t ngen = candidates.size();
    for (std::size_t i = 0; i < ngen; ++i)
      for (std::size_t j = i + 1; j < ngen; ++j)
        for (std::uint64_t c = 1; c < ell; ++c) {
          IntVector s = candidates[i];
          for (std::size_t a = 0; a < r; ++a) s[a] += candidates[j][a] * static_cast<unsigned long>(c);
          candidates.push_back(reduce_mod(s, ell));
        }
    IntMatrix pw;
    IntVector top;
    bool found = false;
    for (std::size_t attempt = 0; !found; ++attempt) {
      IntVector y;
      if (attempt < candidates.size()) {
        y = candidates[attempt];
      } else {
        if (attempt > candidates.size() + 10000) throw Error("no primitive element found for residue field");
        y.resize(r);
        for (auto& v : y) v = static_cast<unsigned long>(rng() % ell);
      }
      std::vector<IntVector> cols;
      IntVector cur = one;
      for (std::size_t i = 0; i <= d; ++i) {
        cols.push_back(mat_vec_mod(m.residue_projection, cur, ell));
        cur = mul(cur, y);
      }
      top = cols.back();
      cols.pop_back();
      pw = from_columns(cols, d);
      found = rank_mod(pw, ell) == d;
    }
    m.power_inverse = inverse_mod(pw, ell);
    IntVector c = mat_vec_mod(m.power_inverse, top, ell);

    FieldTower tower(ell, std::max<unsigned>(d, 1));
    FieldPtr base = tower.level(1);
    m.residue_field = tower.level(d);
    std::vector<Elem> mu(d + 1);
    for (std::size_t i = 0; i < d; ++i) mu[i] = base->neg(base->from_int(c[i]));
    mu[d] = 1;
    auto roots = roots_in_level(FPoly(base, mu), m.residue_field, &tower);
    if (roots.empty()) throw Error("residue field minimal polynomial has no root");
    m.primitive_image = roots.front();
    for (const auto& label : t.labels()) m.images[label] = m.reduce(t.generator_coords(label));
    out.push_back(std::move(m));
  }
  std::sort(out.begin(), out.end(), [](const MaximalIdeal& a, const MaximalIdeal& b) {
    if (a.degree != b.degree) return a.degree < b.degree;
    return a.images < b.images;
  });
  return out;
}

bool is_eisenstein(const MaximalIdeal& m, const HeckeAlgebra& t, std::uint64_t n) {
  const IntVector one = t.one();
  for (const auto& label : t.labels()) {
    if (label[0] != 'T') continue;
    std::uint64_t l = parse_prime(label);
    if (n % l == 0) continue;
    IntVector x = t.generator_coords(label);
    for (std::size_t i = 0; i < x.size(); ++i) x[i] -= one[i] * static_cast<unsigned long>(l + 1);
    if (!m.contains(x)) return false;
  }
  return true;
}

bool classify_in_s(MaximalIdeal& m, const HeckeAlgebra& t, std::uint64_t n) {
  m.eisenstein = is_eisenstein(m, t, n);
  m.in_s = m.eisenstein || m.ell == 2 || m.ell == 3;
  return m.in_s;
}

}  // namespace isochar
