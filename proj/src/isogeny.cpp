#include "isochar/isogeny.hpp"

#include <algorithm>
#include <numeric>

namespace isochar {

namespace {

FPoly cubic(const Curve& e) { return FPoly(e.field, {e.b, e.a, 0, 1}); }

FPoly constant(const FieldPtr& F, long v) { return FPoly::constant(F, F->from_int(v)); }

// (num, den) with x(iP) = num/den as functions of x(P), for i >= 1.
struct Multiple {
  FPoly num, den;
};

std::vector<FPoly> division_sequence(const Curve& e, unsigned n);

std::vector<Multiple> multiples(const Curve& e, unsigned upto) {
  const auto& F = e.field;
  std::vector<Multiple> out(upto + 1);
  if (upto == 0) return out;
  FPoly x = FPoly::x(F);
  FPoly Fc = cubic(e);
  out[1] = {x, constant(F, 1)};
  std::vector<FPoly> psi = division_sequence(e, upto + 1);
  for (unsigned i = 2; i <= upto; ++i) {
    FPoly A, B;
    if (i % 2) {
      A = scale(Fc * psi[i - 1] * psi[i + 1], F->from_int(4));
      B = psi[i] * psi[i];
    } else {
      A = psi[i - 1] * psi[i + 1];
      B = scale(Fc * psi[i] * psi[i], F->from_int(4));
    }
    out[i] = {x * B - A, B};
  }
  return out;
}

unsigned lcm_u(unsigned a, unsigned b) { return a / std::gcd(a, b) * b; }

// Smallest e with c^{q^e} = c in F[x]/(g).
unsigned definition_degree(const FPoly& c, const FPoly& g) {
  if (c.degree() <= 0) return 1;
  mpz_class q = static_cast<unsigned long>(g.field->order());
  FPoly cur = powmod(c, q, g);
  unsigned e = 1;
  while (!(cur == c)) {
    cur = powmod(cur, q, g);
    ++e;
  }
  return e;
}

// Subgroups rational over the curve's field, or the extension degree needed.
std::optional<std::vector<CyclicSubgroup>> rational_subgroups(const Curve& e, unsigned n, unsigned& needed) {
  const auto& F = e.field;
  std::vector<CyclicSubgroup> out;
  needed = 1;
  if (n == 2) {
    auto fac = factor_squarefree(cubic(e));
    for (const auto& [g, m] : fac) {
      needed = lcm_u(needed, static_cast<unsigned>(g.degree()));
      if (g.degree() == 1) out.push_back({2, g});
    }
    if (needed > 1) return std::nullopt;
    return out;
  }
  FPoly f = monic(division_polynomial(e, n));
  auto fac = factor_squarefree(f);
  const unsigned half = (n - 1) / 2;
  auto mult = multiples(e, half);
  std::vector<bool> used(fac.size(), false);
  for (std::size_t gi = 0; gi < fac.size(); ++gi) {
    if (used[gi]) continue;
    const FPoly& g = fac[gi].first;
    used[gi] = true;
    // kernel polynomial prod_i (T - x(iP)) with coefficients in F[x]/(g)
    std::vector<FPoly> h{constant(F, 1) % g};
    for (unsigned i = 1; i <= half; ++i) {
      FPoly xi = mulmod(mult[i].num % g, invmod(mult[i].den % g, g), g);
      std::vector<FPoly> next(h.size() + 1, FPoly(F));
      for (std::size_t k = 0; k < h.size(); ++k) {
        next[k + 1] = next[k + 1] + h[k];
        next[k] = (next[k] - mulmod(h[k], xi, g));
      }
      h = std::move(next);
    }
    unsigned local = 1;
    for (const auto& coef : h) local = lcm_u(local, definition_degree(coef, g));
    if (local > 1) {
      needed = lcm_u(needed, local);
      continue;
    }
    std::vector<Elem> kc(h.size());
    for (std::size_t k = 0; k < h.size(); ++k) kc[k] = h[k].coeff(0);
    FPoly kernel(F, kc);
    for (std::size_t gj = gi + 1; gj < fac.size(); ++gj)
      if (!used[gj] && (kernel % fac[gj].first).is_zero()) used[gj] = true;
    out.push_back({n, kernel});
  }
  if (needed > 1) return std::nullopt;
  return out;
}

// Solves sum_i c_i v_i = target over F (columns v_i); throws if singular.
std::vector<Elem> solve_linear(const FieldPtr& F, std::vector<std::vector<Elem>> cols, std::vector<Elem> target) {
  const std::size_t n = cols.size();
  // augmented matrix rows = coordinates
  std::vector<std::vector<Elem>> m(n, std::vector<Elem>(n + 1, 0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) m[i][j] = j < cols.size() && i < cols[j].size() ? cols[j][i] : 0;
    m[i][n] = i < target.size() ? target[i] : 0;
  }
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    while (piv < n && m[piv][c] == 0) ++piv;
    if (piv == n) throw Error("singular system while pushing a subgroup");
    std::swap(m[piv], m[c]);
    Elem inv = F->inv(m[c][c]);
    for (auto& v : m[c]) v = F->mul(v, inv);
    for (std::size_t r = 0; r < n; ++r) {
      if (r == c || m[r][c] == 0) continue;
      Elem f = m[r][c];
      for (std::size_t k = c; k <= n; ++k) m[r][k] = F->sub(m[r][k], F->mul(f, m[c][k]));
    }
  }
  std::vector<Elem> sol(n);
  for (std::size_t i = 0; i < n; ++i) sol[i] = m[i][n];
  return sol;
}

}  // namespace

Curve make_curve(FieldPtr field, Elem a, Elem b) {
  const auto& F = *field;
  Elem disc = F.add(F.mul(F.from_int(4), F.pow(a, 3)), F.mul(F.from_int(27), F.mul(b, b)));
  if (disc == 0) throw Error("singular Weierstrass equation");
  return Curve{std::move(field), a, b};
}

Elem j_invariant(const Curve& e) {
  const auto& F = *e.field;
  Elem a3 = F.mul(F.from_int(4), F.pow(e.a, 3));
  Elem disc = F.add(a3, F.mul(F.from_int(27), F.mul(e.b, e.b)));
  return F.div(F.mul(F.from_int(1728), a3), disc);
}

Curve curve_from_j(FieldPtr field, Elem j) {
  const auto& F = *field;
  if (j == 0) return make_curve(field, 0, 1);
  if (j == F.from_int(1728)) return make_curve(field, 1, 0);
  Elem k = F.sub(F.from_int(1728), j);
  Elem a = F.mul(F.from_int(3), F.mul(j, k));
  Elem b = F.mul(F.from_int(2), F.mul(j, F.mul(k, k)));
  return make_curve(field, a, b);
}

Curve lift(const Curve& e, FieldTower& tower, unsigned k) {
  const unsigned d = e.field->degree();
  FieldPtr dst = tower.level(k);
  return Curve{dst, tower.embed(e.a, d, k), tower.embed(e.b, d, k)};
}

bool is_supersingular(const Curve& e) {
  if (e.field->degree() > 2) throw Error("Hasse invariant test needs a curve over F_p or F_{p^2}");
  const std::uint64_t p = e.field->characteristic();
  FPoly base = cubic(e);
  FPoly acc = constant(e.field, 1);
  std::uint64_t ex = (p - 1) / 2;
  FPoly sq = base;
  while (ex) {
    if (ex & 1) acc = acc * sq;
    ex >>= 1;
    if (ex) sq = sq * sq;
  }
  return acc.coeff(p - 1) == 0;
}

std::uint64_t point_count(const Curve& e) {
  const auto& F = *e.field;
  if (F.order() > (1u << 24)) throw Error("field too large for brute-force point count");
  const std::uint64_t half = (F.order() - 1) / 2;
  std::uint64_t count = 1;
  for (Elem x = 0; x < F.order(); ++x) {
    Elem rhs = F.add(F.mul(F.add(F.mul(x, x), e.a), x), e.b);
    if (rhs == 0)
      count += 1;
    else if (F.pow(rhs, half) == 1)
      count += 2;
  }
  return count;
}

Curve supersingular_model(FieldPtr f2, Elem j) {
  if (f2->degree() != 2) throw Error("supersingular models live on the degree-2 level");
  const std::uint64_t p = f2->characteristic();
  const std::uint64_t target = (p + 1) * (p + 1);
  Curve e = curve_from_j(f2, j);
  if (point_count(e) == target) return e;
  const auto& F = *f2;
  Elem delta = 2;
  while (F.pow(delta, (F.order() - 1) / 2) == 1) ++delta;
  Curve tw = make_curve(f2, F.mul(F.mul(delta, delta), e.a), F.mul(F.pow(delta, 3), e.b));
  if (point_count(tw) != target) throw Error("no model with Frobenius -p for j = " + F.to_string(j));
  return tw;
}

namespace {

std::vector<FPoly> division_sequence(const Curve& e, unsigned n) {
  const auto& F = e.field;
  const Elem a = e.a, b = e.b;
  const auto& K = *F;
  std::vector<FPoly> f(std::max(n + 1, 5u), FPoly(F));
  f[1] = constant(F, 1);
  f[2] = constant(F, 1);
  Elem a2 = K.mul(a, a);
  f[3] = FPoly(F, {K.neg(a2), K.mul(K.from_int(12), b), K.mul(K.from_int(6), a), 0, K.from_int(3)});
  f[4] = FPoly(F, {K.neg(K.add(K.mul(K.from_int(8), K.mul(b, b)), K.mul(a2, a))), K.neg(K.mul(K.from_int(4), K.mul(a, b))),
                   K.neg(K.mul(K.from_int(5), a2)), K.mul(K.from_int(20), b), K.mul(K.from_int(5), a), 0, 1});
  f[4] = scale(f[4], K.from_int(2));
  FPoly Fc = cubic(e);
  FPoly F16 = scale(Fc * Fc, K.from_int(16));
  for (unsigned k = 5; k <= n; ++k) {
    unsigned m = k / 2;
    if (k % 2) {
      FPoly t1 = f[m + 2] * f[m] * f[m] * f[m];
      FPoly t2 = f[m - 1] * f[m + 1] * f[m + 1] * f[m + 1];
      f[k] = (m % 2 == 0) ? F16 * t1 - t2 : t1 - F16 * t2;
    } else {
      f[k] = f[m] * (f[m + 2] * f[m - 1] * f[m - 1] - f[m - 2] * f[m + 1] * f[m + 1]);
    }
  }
  f.resize(n + 1);
  return f;
}

}  // namespace

FPoly division_polynomial(const Curve& e, unsigned n) { return division_sequence(e, n)[n]; }

std::vector<CyclicSubgroup> cyclic_subgroups(const Curve& e, unsigned n, FieldTower* tower) {
  const std::uint64_t p = e.field->characteristic();
  if (!is_prime(n) || n == p) throw Error("subgroup order must be a prime different from the characteristic");
  unsigned needed = 1;
  auto found = rational_subgroups(e, n, needed);
  if (!found) {
    const unsigned k = e.field->degree() * needed;
    if (!tower) throw DegreeCapExceeded("subgroups need the level of degree " + std::to_string(k));
    Curve up = lift(e, *tower, k);
    found = rational_subgroups(up, n, needed);
    if (!found) throw Error("subgroup field of definition not reached");
  }
  if (found->size() != n + 1)
    throw Error("found " + std::to_string(found->size()) + " subgroups of order " + std::to_string(n));
  std::sort(found->begin(), found->end(), [](const auto& x, const auto& y) { return x.kernel < y.kernel; });
  return *found;
}

Elem Isogeny::map_x(Elem x) const {
  Elem d = den.eval(x);
  return source.field->div(num.eval(x), d);
}

Isogeny Isogeny::identity(const Curve& e) {
  return Isogeny{e, e, 1, FPoly::x(e.field), constant(e.field, 1)};
}

Isogeny velu(const Curve& e, const CyclicSubgroup& c) {
  if (c.kernel.field != e.field) throw Error("kernel polynomial and curve live on different levels");
  const auto& F = e.field;
  const auto& K = *F;
  const FPoly& h = c.kernel;
  FPoly x = FPoly::x(F);
  if (c.order == 2) {
    Elem x0 = K.neg(h.coeff(0));
    Elem t = K.add(K.mul(K.from_int(3), K.mul(x0, x0)), e.a);
    Elem w = K.mul(x0, t);
    Curve tgt = make_curve(F, K.sub(e.a, K.mul(K.from_int(5), t)), K.sub(e.b, K.mul(K.from_int(7), w)));
    return Isogeny{e, tgt, 2, FPoly(F, {t, K.neg(x0), 1}), FPoly(F, {K.neg(x0), 1})};
  }
  const unsigned d = static_cast<unsigned>(h.degree());
  Elem s1 = K.neg(h.coeff(d - 1));
  Elem s2 = d >= 2 ? h.coeff(d - 2) : 0;
  Elem s3 = d >= 3 ? K.neg(h.coeff(d - 3)) : 0;
  Elem dd = K.from_int(d);
  Elem p2 = K.sub(K.mul(s1, s1), K.mul(K.from_int(2), s2));
  Elem p3 = K.add(K.sub(K.pow(s1, 3), K.mul(K.from_int(3), K.mul(s1, s2))), K.mul(K.from_int(3), s3));
  Elem t = K.add(K.mul(K.from_int(6), p2), K.mul(K.from_int(2), K.mul(e.a, dd)));
  Elem w = K.add(K.add(K.mul(K.from_int(10), p3), K.mul(K.from_int(6), K.mul(e.a, s1))), K.mul(K.from_int(4), K.mul(e.b, dd)));
  Curve tgt = make_curve(F, K.sub(e.a, K.mul(K.from_int(5), t)), K.sub(e.b, K.mul(K.from_int(7), w)));

  FPoly Fc = cubic(e);
  FPoly dF = FPoly(F, {e.a, 0, K.from_int(3)});
  FPoly h1 = derivative(h), h2 = derivative(h1);
  FPoly hh = h * h;
  FPoly lin(F, {K.neg(K.mul(K.from_int(2), s1)), K.from_int(2 * d + 1)});
  FPoly num = lin * hh - scale(dF * h1 * h, K.from_int(2)) + scale(Fc * (h1 * h1 - h * h2), K.from_int(4));
  return Isogeny{e, tgt, c.order, num, hh};
}

CyclicSubgroup push_subgroup(const Isogeny& phi, const CyclicSubgroup& c) {
  if (c.kernel.field != phi.source.field) throw Error("subgroup and isogeny live on different levels");
  if (gcd(c.kernel, phi.den).degree() > 0) throw Error("subgroup meets the isogeny kernel");
  const auto& F = c.kernel.field;
  const FPoly& h = c.kernel;
  const std::size_t d = static_cast<std::size_t>(h.degree());
  FPoly r = mulmod(phi.num % h, invmod(phi.den % h, h), h);
  std::vector<std::vector<Elem>> cols;
  FPoly pw = constant(F, 1) % h;
  for (std::size_t i = 0; i < d; ++i) {
    std::vector<Elem> v(d, 0);
    for (std::size_t k = 0; k < d; ++k) v[k] = pw.coeff(k);
    cols.push_back(v);
    pw = mulmod(pw, r, h);
  }
  std::vector<Elem> target(d, 0);
  for (std::size_t k = 0; k < d; ++k) target[k] = pw.coeff(k);
  auto coef = solve_linear(F, cols, target);
  std::vector<Elem> kc(d + 1);
  for (std::size_t i = 0; i < d; ++i) kc[i] = F->neg(coef[i]);
  kc[d] = 1;
  return CyclicSubgroup{c.order, FPoly(F, kc)};
}

FPoly transform_kernel(const FPoly& h, Elem s) {
  const auto& K = *h.field;
  const std::size_t d = h.c.size() - 1;
  std::vector<Elem> c(h.c.size());
  Elem pw = 1;
  for (std::size_t i = d + 1; i-- > 0;) {
    c[i] = K.mul(h.c[i], pw);
    pw = K.mul(pw, s);
  }
  return FPoly(h.field, c);
}

std::vector<Elem> automorphism_scalars(const Curve& e) {
  const auto& K = *e.field;
  if (e.a == 0) {
    auto r = roots_in_level(FPoly(e.field, {1, 1, 1}), e.field);
    if (r.size() != 2) throw Error("cube roots of unity are not in the curve's field");
    return {1, r[0], r[1]};
  }
  if (e.b == 0) return {1, K.neg(1)};
  return {1};
}

unsigned automorphism_count(const Curve& e, const CyclicSubgroup* c) {
  if (!c) return e.a == 0 ? 6 : (e.b == 0 ? 4 : 2);
  unsigned stab = 0;
  canonical_kernel(e, c->kernel, &stab);
  return 2 * stab;
}

FPoly canonical_kernel(const Curve& e, const FPoly& h, unsigned* stabilizer) {
  if (h.field != e.field) throw Error("kernel polynomial and curve live on different levels");
  FPoly best = h;
  unsigned stab = 0;
  for (Elem s : automorphism_scalars(e)) {
    FPoly t = transform_kernel(h, s);
    if (t == h) ++stab;
    if (t < best) best = t;
  }
  if (stabilizer) *stabilizer = stab;
  return best;
}

std::optional<Elem> isomorphism_scale(const Curve& from, const Curve& to) {
  if (from.field != to.field) throw Error("curves live on different levels");
  const auto& K = *from.field;
  if (j_invariant(from) != j_invariant(to)) return std::nullopt;
  auto check = [&](Elem s) {
    return K.mul(K.mul(s, s), from.a) == to.a && K.mul(K.pow(s, 3), from.b) == to.b;
  };
  if (from.a != 0 && from.b != 0) {
    Elem s = K.div(K.mul(to.b, from.a), K.mul(to.a, from.b));
    if (check(s)) return s;
    return std::nullopt;
  }
  FPoly eq = from.a == 0 ? FPoly(from.field, {K.neg(K.div(to.b, from.b)), 0, 0, 1})
                         : FPoly(from.field, {K.neg(K.div(to.a, from.a)), 0, 1});
  for (Elem s : roots_in_level(eq, from.field))
    if (check(s)) return s;
  return std::nullopt;
}

}  // namespace isochar
