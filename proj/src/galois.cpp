#include "isochar/galois.hpp"

#include <algorithm>
#include <cassert>
#include <limits>
#include <sstream>

namespace isochar {

namespace {

constexpr std::uint64_t kTableLimit = 1u << 20;

std::uint64_t mulmod_u64(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
  return static_cast<std::uint64_t>(static_cast<unsigned __int128>(a) * b % m);
}

}  // namespace

FiniteField::FiniteField(std::uint64_t p, unsigned k, std::vector<std::uint64_t> modulus)
    : p_(p), k_(k), modulus_(std::move(modulus)) {
  if (k == 0) throw Error("field degree must be positive");
  pow_p_.assign(k + 1, 1);
  for (unsigned i = 1; i <= k; ++i) {
    if (pow_p_[i - 1] > (std::uint64_t(1) << 62) / p) throw DegreeCapExceeded("field too large for packed elements");
    pow_p_[i] = pow_p_[i - 1] * p;
  }
  order_ = pow_p_[k];
  if (k == 1) {
    modulus_ = {0, 1};
  } else if (modulus_.size() != k + 1 || modulus_.back() != 1) {
    throw Error("field modulus must be monic of the field degree");
  }
  if (k > 1 && order_ <= kTableLimit) {
    // find a primitive element, then tabulate
    const std::uint64_t n = order_ - 1;
    std::vector<std::uint64_t> primes;
    std::uint64_t m = n;
    for (std::uint64_t d = 2; d * d <= m; ++d)
      if (m % d == 0) {
        primes.push_back(d);
        while (m % d == 0) m /= d;
      }
    if (m > 1) primes.push_back(m);
    auto slow_pow = [&](Elem a, std::uint64_t e) {
      Elem r = 1;
      while (e) {
        if (e & 1) r = mul_poly(r, a);
        a = mul_poly(a, a);
        e >>= 1;
      }
      return r;
    };
    Elem g = 0;
    for (Elem cand = 2; cand < order_; ++cand) {
      bool prim = true;
      for (auto r : primes)
        if (slow_pow(cand, n / r) == 1) {
          prim = false;
          break;
        }
      if (prim) {
        g = cand;
        break;
      }
    }
    exp_.resize(2 * n);
    log_.assign(order_, 0);
    Elem x = 1;
    for (std::uint64_t i = 0; i < n; ++i) {
      exp_[i] = exp_[i + n] = x;
      log_[x] = static_cast<std::uint32_t>(i);
      x = mul_poly(x, g);
    }
  }
}

std::vector<std::uint64_t> FiniteField::digits(Elem a) const {
  std::vector<std::uint64_t> d(k_);
  for (unsigned i = 0; i < k_; ++i) {
    d[i] = a % p_;
    a /= p_;
  }
  return d;
}

Elem FiniteField::from_digits(const std::vector<std::uint64_t>& d) const {
  Elem a = 0;
  for (unsigned i = k_; i-- > 0;) a = a * p_ + (i < d.size() ? d[i] % p_ : 0);
  return a;
}

Elem FiniteField::add(Elem a, Elem b) const {
  if (k_ == 1) {
    Elem s = a + b;
    return s >= p_ ? s - p_ : s;
  }
  Elem r = 0;
  for (unsigned i = 0; i < k_; ++i) {
    std::uint64_t s = a % p_ + b % p_;
    if (s >= p_) s -= p_;
    r += s * pow_p_[i];
    a /= p_;
    b /= p_;
  }
  return r;
}

Elem FiniteField::neg(Elem a) const {
  if (k_ == 1) return a == 0 ? 0 : p_ - a;
  Elem r = 0;
  for (unsigned i = 0; i < k_; ++i) {
    std::uint64_t d = a % p_;
    if (d) r += (p_ - d) * pow_p_[i];
    a /= p_;
  }
  return r;
}

Elem FiniteField::sub(Elem a, Elem b) const { return add(a, neg(b)); }

Elem FiniteField::mul_poly(Elem a, Elem b) const {
  if (k_ == 1) return mulmod_u64(a, b, p_);
  auto da = digits(a), db = digits(b);
  std::vector<std::uint64_t> prod(2 * k_ - 1, 0);
  for (unsigned i = 0; i < k_; ++i) {
    if (!da[i]) continue;
    for (unsigned j = 0; j < k_; ++j)
      if (db[j]) prod[i + j] = (prod[i + j] + mulmod_u64(da[i], db[j], p_)) % p_;
  }
  for (unsigned i = 2 * k_ - 2; i >= k_; --i) {
    std::uint64_t t = prod[i];
    if (!t) continue;
    for (unsigned j = 0; j < k_; ++j)
      if (modulus_[j]) prod[i - k_ + j] = (prod[i - k_ + j] + p_ - mulmod_u64(t, modulus_[j], p_)) % p_;
    prod[i] = 0;
  }
  prod.resize(k_);
  return from_digits(prod);
}

Elem FiniteField::mul(Elem a, Elem b) const {
  if (a == 0 || b == 0) return 0;
  if (!exp_.empty()) return exp_[log_[a] + log_[b]];
  return mul_poly(a, b);
}

Elem FiniteField::inv(Elem a) const {
  if (a == 0) throw Error("inverse of zero in finite field");
  if (!exp_.empty()) return exp_[(order_ - 1 - log_[a]) % (order_ - 1)];
  return pow(a, order_ - 2);
}

Elem FiniteField::pow(Elem a, std::uint64_t e) const {
  if (e == 0) return 1;
  if (a == 0) return 0;
  if (!exp_.empty()) {
    std::uint64_t n = order_ - 1;
    return exp_[mulmod_u64(log_[a], e % n, n)];
  }
  Elem r = 1;
  while (e) {
    if (e & 1) r = mul(r, a);
    a = mul(a, a);
    e >>= 1;
  }
  return r;
}

Elem FiniteField::pow(Elem a, const mpz_class& e) const {
  if (a == 0) return e == 0 ? 1 : 0;
  mpz_class n = static_cast<unsigned long>(order_ - 1);
  mpz_class r = e % n;
  if (r < 0) r += n;
  return pow(a, static_cast<std::uint64_t>(mpz_get_ui(r.get_mpz_t())));
}

Elem FiniteField::from_int(long v) const {
  long m = v % static_cast<long>(p_);
  if (m < 0) m += static_cast<long>(p_);
  return static_cast<Elem>(m);
}

Elem FiniteField::from_int(const mpz_class& v) const {
  mpz_class m = v % mpz_class(static_cast<unsigned long>(p_));
  if (m < 0) m += static_cast<unsigned long>(p_);
  return mpz_get_ui(m.get_mpz_t());
}

std::string FiniteField::to_string(Elem a) const {
  if (a == 0) return "0";
  auto d = digits(a);
  std::string s;
  for (unsigned i = k_; i-- > 0;) {
    if (!d[i]) continue;
    if (!s.empty()) s += "+";
    if (i == 0) {
      s += std::to_string(d[i]);
      continue;
    }
    if (d[i] != 1) s += std::to_string(d[i]) + "*";
    s += "g";
    if (i > 1) s += "^" + std::to_string(i);
  }
  return s;
}

Elem FiniteField::parse(const std::string& text) const {
  std::vector<std::uint64_t> d(k_, 0);
  std::stringstream ss(text);
  std::string term;
  while (std::getline(ss, term, '+')) {
    if (term.empty()) throw ParseError("empty term in field element '" + text + "'");
    std::uint64_t coef = 1;
    unsigned e = 0;
    auto star = term.find('*');
    std::string mono = term;
    if (star != std::string::npos) {
      coef = std::stoull(term.substr(0, star));
      mono = term.substr(star + 1);
    } else if (term[0] != 'g') {
      coef = std::stoull(term);
      mono.clear();
    }
    if (!mono.empty()) {
      if (mono[0] != 'g') throw ParseError("bad field element '" + text + "'");
      e = mono.size() > 1 ? static_cast<unsigned>(std::stoul(mono.substr(2))) : 1;
    }
    if (e >= k_) throw ParseError("exponent too large in '" + text + "'");
    d[e] = (d[e] + coef) % p_;
  }
  return from_digits(d);
}

// ---------------------------------------------------------------- polynomials

FPoly::FPoly(FieldPtr f, std::vector<Elem> coeffs) : field(std::move(f)), c(std::move(coeffs)) { normalize(); }

FPoly FPoly::linear(FieldPtr f, Elem a) {
  Elem na = f->neg(a);
  return FPoly(std::move(f), {na, 1});
}

void FPoly::normalize() {
  while (!c.empty() && c.back() == 0) c.pop_back();
}

Elem FPoly::eval(Elem a) const {
  Elem r = 0;
  for (std::size_t i = c.size(); i-- > 0;) r = field->add(field->mul(r, a), c[i]);
  return r;
}

bool operator<(const FPoly& a, const FPoly& b) {
  if (a.c.size() != b.c.size()) return a.c.size() < b.c.size();
  for (std::size_t i = a.c.size(); i-- > 0;)
    if (a.c[i] != b.c[i]) return a.c[i] < b.c[i];
  return false;
}

FPoly operator+(const FPoly& a, const FPoly& b) {
  const auto& F = a.field ? a.field : b.field;
  std::vector<Elem> r(std::max(a.c.size(), b.c.size()), 0);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = F->add(a.coeff(i), b.coeff(i));
  return FPoly(F, std::move(r));
}

FPoly operator-(const FPoly& a) {
  std::vector<Elem> r(a.c.size());
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = a.field->neg(a.c[i]);
  return FPoly(a.field, std::move(r));
}

FPoly operator-(const FPoly& a, const FPoly& b) {
  const auto& F = a.field ? a.field : b.field;
  std::vector<Elem> r(std::max(a.c.size(), b.c.size()), 0);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = F->sub(a.coeff(i), b.coeff(i));
  return FPoly(F, std::move(r));
}

FPoly operator*(const FPoly& a, const FPoly& b) {
  const auto& F = a.field ? a.field : b.field;
  if (a.is_zero() || b.is_zero()) return FPoly(F);
  std::vector<Elem> r(a.c.size() + b.c.size() - 1, 0);
  for (std::size_t i = 0; i < a.c.size(); ++i) {
    if (!a.c[i]) continue;
    for (std::size_t j = 0; j < b.c.size(); ++j)
      if (b.c[j]) r[i + j] = F->add(r[i + j], F->mul(a.c[i], b.c[j]));
  }
  return FPoly(F, std::move(r));
}

FPoly scale(const FPoly& a, Elem s) {
  std::vector<Elem> r(a.c.size());
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = a.field->mul(a.c[i], s);
  return FPoly(a.field, std::move(r));
}

std::pair<FPoly, FPoly> divmod(const FPoly& a, const FPoly& b) {
  if (b.is_zero()) throw Error("polynomial division by zero");
  const auto& F = b.field;
  if (a.degree() < b.degree()) return {FPoly(F), a};
  std::vector<Elem> r = a.c;
  std::vector<Elem> q(a.c.size() - b.c.size() + 1, 0);
  Elem li = F->inv(b.lead());
  const std::size_t db = b.c.size() - 1;
  for (std::size_t i = r.size(); i-- > db;) {
    if (!r[i]) continue;
    Elem t = F->mul(r[i], li);
    q[i - db] = t;
    for (std::size_t j = 0; j <= db; ++j)
      if (b.c[j]) r[i - db + j] = F->sub(r[i - db + j], F->mul(t, b.c[j]));
  }
  return {FPoly(F, std::move(q)), FPoly(F, std::move(r))};
}

FPoly operator/(const FPoly& a, const FPoly& b) { return divmod(a, b).first; }
FPoly operator%(const FPoly& a, const FPoly& b) { return divmod(a, b).second; }

FPoly monic(const FPoly& a) {
  if (a.is_zero() || a.lead() == 1) return a;
  return scale(a, a.field->inv(a.lead()));
}

FPoly gcd(const FPoly& a, const FPoly& b) {
  FPoly x = a, y = b;
  while (!y.is_zero()) {
    FPoly r = x % y;
    x = std::move(y);
    y = std::move(r);
  }
  return monic(x);
}

FPoly invmod(const FPoly& a, const FPoly& m) {
  const auto& F = m.field;
  FPoly r0 = m, r1 = a % m;
  FPoly s0(F), s1 = FPoly::constant(F, 1);
  while (!r1.is_zero()) {
    auto [q, r] = divmod(r0, r1);
    FPoly s = s0 - q * s1;
    r0 = std::move(r1);
    r1 = std::move(r);
    s0 = std::move(s1);
    s1 = std::move(s);
  }
  if (r0.degree() != 0) throw Error("polynomial not invertible modulo m");
  return scale(s0, F->inv(r0.lead())) % m;
}

FPoly mulmod(const FPoly& a, const FPoly& b, const FPoly& m) { return (a * b) % m; }

FPoly powmod(const FPoly& a, const mpz_class& e, const FPoly& m) {
  FPoly base = a % m;
  FPoly r = FPoly::constant(m.field, 1) % m;
  const long bits = static_cast<long>(mpz_sizeinbase(e.get_mpz_t(), 2));
  if (e == 0) return r;
  for (long i = bits - 1; i >= 0; --i) {
    r = mulmod(r, r, m);
    if (mpz_tstbit(e.get_mpz_t(), i)) r = mulmod(r, base, m);
  }
  return r;
}

FPoly derivative(const FPoly& a) {
  if (a.c.size() <= 1) return FPoly(a.field);
  std::vector<Elem> r(a.c.size() - 1);
  for (std::size_t i = 1; i < a.c.size(); ++i) r[i - 1] = a.field->mul(a.c[i], a.field->from_int(static_cast<long>(i % a.field->characteristic())));
  return FPoly(a.field, std::move(r));
}

FPoly compose(const FPoly& a, const FPoly& b) {
  FPoly r(b.field);
  for (std::size_t i = a.c.size(); i-- > 0;) r = r * b + FPoly::constant(b.field, a.c[i]);
  return r;
}

FPoly compose_mod(const FPoly& a, const FPoly& b, const FPoly& m) {
  FPoly r(m.field);
  FPoly bm = b % m;
  for (std::size_t i = a.c.size(); i-- > 0;) r = (r * bm + FPoly::constant(m.field, a.c[i])) % m;
  return r;
}

std::string to_string(const FPoly& f) {
  if (f.is_zero()) return "0";
  std::string s;
  for (std::size_t i = f.c.size(); i-- > 0;) {
    if (!f.c[i]) continue;
    if (!s.empty()) s += " + ";
    std::string coef = f.field->to_string(f.c[i]);
    bool compound = coef.find('+') != std::string::npos;
    if (i == 0) {
      s += compound ? "(" + coef + ")" : coef;
      continue;
    }
    if (f.c[i] != 1) s += (compound ? "(" + coef + ")" : coef) + "*";
    s += "x";
    if (i > 1) s += "^" + std::to_string(i);
  }
  return s;
}

namespace {

std::vector<std::uint64_t> prime_divisors(std::uint64_t n) {
  std::vector<std::uint64_t> r;
  for (std::uint64_t d = 2; d * d <= n; ++d)
    if (n % d == 0) {
      r.push_back(d);
      while (n % d == 0) n /= d;
    }
  if (n > 1) r.push_back(n);
  return r;
}

mpz_class field_order(const FieldPtr& F) { return mpz_class(static_cast<unsigned long>(F->order())); }

// x^{q^i} mod f for i = 0..n
std::vector<FPoly> frobenius_powers(const FPoly& f, unsigned n) {
  std::vector<FPoly> out;
  FPoly h = FPoly::x(f.field) % f;
  out.push_back(h);
  mpz_class q = field_order(f.field);
  for (unsigned i = 1; i <= n; ++i) {
    h = powmod(h, q, f);
    out.push_back(h);
  }
  return out;
}

FPoly pth_root(const FPoly& f) {
  const auto& F = f.field;
  const std::uint64_t p = F->characteristic();
  std::vector<Elem> r(f.c.size() / p + 1, 0);
  std::uint64_t e = F->order() / p;  // a^{q/p} is the p-th root
  for (std::size_t i = 0; i < f.c.size(); i += p) r[i / p] = F->pow(f.c[i], e);
  return FPoly(F, std::move(r));
}

void squarefree_parts(const FPoly& f, unsigned mult, std::vector<std::pair<FPoly, unsigned>>& out) {
  const std::uint64_t p = f.field->characteristic();
  FPoly c = gcd(f, derivative(f));
  FPoly w = f / c;
  unsigned i = 1;
  while (w.degree() > 0) {
    FPoly y = gcd(w, c);
    FPoly fac = w / y;
    if (fac.degree() > 0) out.emplace_back(monic(fac), i * mult);
    w = y;
    c = c / y;
    ++i;
  }
  if (c.degree() > 0) squarefree_parts(pth_root(monic(c)), mult * static_cast<unsigned>(p), out);
}

std::vector<std::pair<FPoly, unsigned>> distinct_degree(FPoly f) {
  std::vector<std::pair<FPoly, unsigned>> out;
  mpz_class q = field_order(f.field);
  FPoly x = FPoly::x(f.field);
  FPoly h = x % f;
  unsigned d = 0;
  while (f.degree() >= 2 * static_cast<int>(d + 1)) {
    ++d;
    h = powmod(h, q, f);
    FPoly g = gcd(h - x, f);
    if (g.degree() > 0) {
      out.emplace_back(g, d);
      f = f / g;
      h = h % f;
    }
  }
  if (f.degree() > 0) out.emplace_back(monic(f), static_cast<unsigned>(f.degree()));
  return out;
}

void equal_degree(const FPoly& f, unsigned d, std::mt19937_64& rng, std::vector<FPoly>& out) {
  if (f.degree() == static_cast<int>(d)) {
    out.push_back(monic(f));
    return;
  }
  const auto& F = f.field;
  mpz_class q = field_order(F);
  mpz_class qd;
  mpz_pow_ui(qd.get_mpz_t(), q.get_mpz_t(), d);
  mpz_class e = (qd - 1) / 2;
  FPoly one = FPoly::constant(F, 1);
  while (true) {
    std::vector<Elem> a(f.degree());
    for (auto& x : a) x = F->random(rng);
    FPoly ap(F, a);
    if (ap.degree() < 1) continue;
    FPoly g = gcd(ap, f);
    if (g.degree() <= 0 || g.degree() >= f.degree()) {
      if (F->characteristic() == 2) {
        // absolute trace a + a^2 + ... + a^(2^(kd-1))
        FPoly t = ap % f, sq = t;
        for (unsigned i = 1; i < F->degree() * d; ++i) {
          sq = mulmod(sq, sq, f);
          t = t + sq;
        }
        g = gcd(t, f);
      } else {
        g = gcd(powmod(ap, e, f) - one, f);
      }
    }
    if (g.degree() > 0 && g.degree() < f.degree()) {
      equal_degree(g, d, rng, out);
      equal_degree(f / g, d, rng, out);
      return;
    }
  }
}

}  // namespace

bool is_irreducible(const FPoly& f) {
  if (f.degree() <= 0) return false;
  if (f.degree() == 1) return true;
  const unsigned n = static_cast<unsigned>(f.degree());
  FPoly fm = monic(f);
  auto pw = frobenius_powers(fm, n);
  FPoly x = FPoly::x(f.field) % fm;
  if (!(pw[n] == x)) return false;
  for (auto r : prime_divisors(n))
    if (gcd(pw[n / r] - x, fm).degree() != 0) return false;
  return true;
}

std::vector<std::pair<FPoly, unsigned>> factor_squarefree(const FPoly& f, std::uint64_t seed) {
  if (f.is_zero()) throw Error("factorization of the zero polynomial");
  std::vector<std::pair<FPoly, unsigned>> out;
  if (f.degree() == 0) return out;
  std::vector<std::pair<FPoly, unsigned>> sqf;
  squarefree_parts(monic(f), 1, sqf);
  std::mt19937_64 rng(seed);
  for (auto& [g, m] : sqf)
    for (auto& [h, d] : distinct_degree(g)) {
      std::vector<FPoly> pieces;
      equal_degree(h, d, rng, pieces);
      for (auto& piece : pieces) out.emplace_back(piece, m);
    }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  return out;
}

std::vector<std::uint64_t> lowest_irreducible(std::uint64_t p, unsigned k) {
  if (k == 1) return {0, 1};
  auto Fp = std::make_shared<FiniteField>(p, 1, std::vector<std::uint64_t>{});
  std::vector<std::uint64_t> c(k + 1, 0);
  c[k] = 1;
  while (true) {
    FPoly f(Fp, std::vector<Elem>(c.begin(), c.end()));
    if (c[0] != 0 && is_irreducible(f)) return c;
    unsigned i = 0;
    while (i < k && c[i] == p - 1) c[i++] = 0;
    if (i == k) throw Error("no irreducible polynomial found");
    ++c[i];
  }
}

std::vector<Elem> roots_in_level(const FPoly& f, const FieldPtr& level, const FieldTower* tower, std::uint64_t seed) {
  if (f.is_zero()) throw Error("roots of the zero polynomial");
  FPoly g = f;
  if (f.field != level) {
    if (f.field->degree() == level->degree() && f.field->modulus() == level->modulus()) {
      g.field = level;
    } else {
      if (!tower) throw Error("roots_in_level needs a tower to embed coefficients");
      g = tower->embed(f, level->degree());
    }
  }
  if (g.degree() <= 0) return {};
  FPoly gm = monic(g);
  FPoly x = FPoly::x(level);
  FPoly split = gcd(powmod(x, field_order(level), gm) - x, gm);
  std::vector<FPoly> lin;
  std::mt19937_64 rng(seed);
  if (split.degree() > 0) equal_degree(split, 1, rng, lin);
  std::vector<Elem> roots;
  for (const auto& l : lin) {
    Elem r = level->neg(l.c[0]);
    FPoly rem = gm;
    while (true) {
      auto [q, rr] = divmod(rem, l);
      if (!rr.is_zero()) break;
      roots.push_back(r);
      rem = q;
    }
  }
  std::sort(roots.begin(), roots.end());
  return roots;
}

// ---------------------------------------------------------------- tower

FieldTower::FieldTower(std::uint64_t p, unsigned degree_cap) : p_(p), cap_(degree_cap) {
  if (!is_prime(p)) throw Error("field tower characteristic must be prime");
  level(1);
}

std::vector<unsigned> FieldTower::built_degrees() const {
  std::vector<unsigned> d;
  for (const auto& [k, _] : levels_) d.push_back(k);
  return d;
}

Elem FieldTower::embed(Elem a, unsigned d, unsigned k) const {
  if (d == k || d == 1) return a;
  auto it = gen_images_.find({d, k});
  if (it == gen_images_.end()) throw Error("no embedding between requested levels");
  const auto& src = *levels_.at(d);
  const auto& dst = *levels_.at(k);
  auto dg = src.digits(a);
  Elem r = 0;
  for (unsigned i = d; i-- > 0;) r = dst.add(dst.mul(r, it->second), dg[i]);
  return r;
}

FPoly FieldTower::embed(const FPoly& f, unsigned k) const {
  const unsigned d = f.field->degree();
  FieldPtr dst = levels_.at(k);
  std::vector<Elem> c(f.c.size());
  for (std::size_t i = 0; i < c.size(); ++i) c[i] = embed(f.c[i], d, k);
  return FPoly(dst, std::move(c));
}

FieldPtr FieldTower::level(unsigned k) {
  if (auto it = levels_.find(k); it != levels_.end()) return it->second;
  if (k == 0) throw Error("level degree must be positive");
  if (k > cap_) throw DegreeCapExceeded("extension degree " + std::to_string(k) + " exceeds cap " + std::to_string(cap_));
  auto field = std::make_shared<const FiniteField>(p_, k, lowest_irreducible(p_, k));
  levels_[k] = field;

  // choose the embedding d -> t compatible with every e -> d, e -> t already fixed
  auto choose = [&](unsigned d, unsigned t) {
    if (d == 1) return;
    // compose through an intermediate level when one exists
    for (const auto& [m, _] : levels_) {
      if (m == d || m == t || m % d != 0 || t % m != 0) continue;
      if (gen_images_.count({d, m}) && gen_images_.count({m, t})) {
        gen_images_[{d, t}] = embed(gen_images_[{d, m}], m, t);
        return;
      }
    }
    FieldPtr src = levels_.at(d), dst = levels_.at(t);
    std::vector<Elem> mod(src->modulus().begin(), src->modulus().end());
    FPoly md(dst, mod);
    for (Elem r : roots_in_level(md, dst)) {
      gen_images_[{d, t}] = r;
      bool ok = true;
      for (const auto& [e, _] : levels_) {
        if (e == 1 || e == d || d % e != 0 || !gen_images_.count({e, d}) || !gen_images_.count({e, t})) continue;
        if (embed(gen_images_[{e, d}], d, t) != gen_images_[{e, t}]) {
          ok = false;
          break;
        }
      }
      if (ok) return;
    }
    gen_images_.erase({d, t});
    throw Error("no compatible embedding between tower levels");
  };
  for (const auto& [d, _] : levels_)
    if (d < k && k % d == 0) choose(d, k);
  for (const auto& [t, _] : levels_)
    if (t > k && t % k == 0) choose(k, t);
  return field;
}

// ---------------------------------------------------------------- integers

bool is_prime(std::uint64_t n) {
  mpz_class m(static_cast<unsigned long>(n));
  return mpz_probab_prime_p(m.get_mpz_t(), 40) > 0;
}

namespace {

mpz_class pollard_rho(const mpz_class& n) {
  if (n % 2 == 0) return 2;
  for (unsigned long c = 1;; ++c) {
    mpz_class x = 2, y = 2, d = 1;
    auto f = [&](const mpz_class& v) { return mpz_class((v * v + c) % n); };
    while (d == 1) {
      x = f(x);
      y = f(f(y));
      mpz_class diff = abs(x - y);
      mpz_gcd(d.get_mpz_t(), diff.get_mpz_t(), n.get_mpz_t());
    }
    if (d != n) return d;
  }
}

void factor_rec(const mpz_class& n, std::map<mpz_class, unsigned>& acc) {
  if (n == 1) return;
  if (mpz_probab_prime_p(n.get_mpz_t(), 40) > 0) {
    ++acc[n];
    return;
  }
  mpz_class d = pollard_rho(n);
  factor_rec(d, acc);
  factor_rec(n / d, acc);
}

}  // namespace

std::vector<std::pair<mpz_class, unsigned>> factor_integer(const mpz_class& value) {
  mpz_class n = abs(value);
  if (n == 0) throw Error("cannot factor zero");
  std::map<mpz_class, unsigned> acc;
  for (unsigned long d = 2; d < 10000 && d * d <= n; ++d)
    while (n % d == 0) {
      ++acc[mpz_class(d)];
      n /= d;
    }
  factor_rec(n, acc);
  return {acc.begin(), acc.end()};
}

}  // namespace isochar
