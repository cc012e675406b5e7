#include "isochar/tmod.hpp"

#include <algorithm>
#include <random>
#include <sstream>

namespace isochar {

namespace {

IntMatrix columns_as_rows(const IntMatrix& m) { return m.transpose(); }

// {x in Z^r : a x in l}
Lattice preimage(const IntMatrix& a, const Lattice& l) {
  const std::size_t r = a.cols();
  if (l.rank() == 0) return kernel_basis(a);
  IntMatrix sys = hstack(a, -l.basis().transpose());
  Lattice k = kernel_basis(sys);
  IntMatrix xs(k.rank(), r);
  for (std::size_t i = 0; i < k.rank(); ++i)
    for (std::size_t j = 0; j < r; ++j) xs(i, j) = k.basis()(i, j);
  return Lattice(r, xs);
}

std::string images_string(const MaximalIdeal& m) {
  std::ostringstream os;
  bool first = true;
  for (const auto& [label, v] : m.images) {
    os << (first ? "" : " ") << label << "=" << m.residue_field->to_string(v);
    first = false;
  }
  return os.str();
}

}  // namespace

std::size_t TModule::rank() const {
  if (!action.empty()) return action.begin()->second.rows();
  return basis_action.empty() ? 0 : basis_action[0].rows();
}

IntMatrix TModule::act(const IntVector& a) const {
  IntMatrix out(rank(), rank());
  for (std::size_t i = 0; i < basis_action.size(); ++i)
    if (a[i] != 0) out += basis_action[i] * a[i];
  return out;
}

TModule make_module(AlgebraPtr t, OperatorSet action, bool rank_one) {
  if (!t->relations_hold(action)) throw NotStable("module action does not factor through the algebra");
  TModule m;
  m.basis_action = t->act_basis(action);
  m.algebra = std::move(t);
  m.action = std::move(action);
  m.rank_one = rank_one;
  return m;
}

TModule regular_module(AlgebraPtr t) {
  OperatorSet action;
  for (const auto& label : t->labels()) action[label] = t->regular(t->generator_coords(label));
  return make_module(t, std::move(action), true);
}

TModule submodule(const TModule& m, const Lattice& sub) {
  OperatorSet action;
  for (const auto& [label, g] : m.action) {
    try {
      action[label] = restrict_operator(g, sub);
    } catch (const OperatorDoesNotRestrict&) {
      throw NotStable("submodule is not stable under " + label);
    }
  }
  return make_module(m.algebra, std::move(action), m.rank_one && sub.rank() == m.rank());
}

TModule change_algebra(const TModule& m, AlgebraPtr t) {
  OperatorSet action;
  for (const auto& label : t->labels()) {
    auto it = m.action.find(label);
    if (it == m.action.end()) throw Error("module lacks generator '" + label + "'");
    action[label] = it->second;
  }
  return make_module(std::move(t), std::move(action), m.rank_one);
}

QuotientMap quotient_map(const Lattice& relations) {
  const std::size_t n = relations.ambient_rank();
  QuotientMap q;
  if (relations.rank() == 0) {
    q.projection = IntMatrix::identity(n);
    q.section = IntMatrix::identity(n);
    return q;
  }
  q.projection = kernel_basis(relations.basis()).basis();
  const std::size_t k = q.projection.rows();
  if (k == 0) {
    q.section = IntMatrix(n, 0);
    return q;
  }
  HnfResult h = hnf_with_transform(q.projection.transpose());
  if (!(h.h.select_rows(0, k) == IntMatrix::identity(k))) throw Error("internal: projection is not surjective");
  q.section = h.transform.select_rows(0, k).transpose();
  return q;
}

namespace {

Presented present(const OperatorSet& ambient_action, const Lattice& relations, AlgebraPtr t, bool rank_one) {
  QuotientMap q = quotient_map(relations);
  OperatorSet action;
  for (const auto& [label, g] : ambient_action) action[label] = q.projection * g * q.section;
  Presented p;
  p.module = make_module(std::move(t), std::move(action), rank_one);
  p.projection = std::move(q.projection);
  p.section = std::move(q.section);
  return p;
}

}  // namespace

TModule dual(const TModule& m) {
  OperatorSet action;
  for (const auto& [label, g] : m.action) action[label] = g.transpose();
  return make_module(m.algebra, std::move(action), m.rank_one);
}

Presented tensor_presentation(const TModule& m, const TModule& n) {
  const std::size_t a = m.rank(), b = n.rank();
  IntMatrix ia = IntMatrix::identity(a), ib = IntMatrix::identity(b);
  IntMatrix rel(0, a * b);
  OperatorSet ambient;
  for (const auto& [label, g] : m.action) {
    IntMatrix left = kronecker(g, ib);
    IntMatrix right = kronecker(ia, n.action.at(label));
    rel = vstack(rel, columns_as_rows(left - right));
    ambient[label] = left;
  }
  Lattice relations = rel.rows() == 0 ? Lattice(a * b) : Lattice(a * b, rel);
  return present(ambient, relations, m.algebra, m.rank_one && n.rank_one);
}

TModule tensor_mod_torsion(const TModule& m, const TModule& n) { return tensor_presentation(m, n).module; }

IntMatrix HomModule::map(const IntVector& c) const {
  IntMatrix h = maps.empty() ? IntMatrix() : IntMatrix(maps[0].rows(), maps[0].cols());
  for (std::size_t i = 0; i < maps.size(); ++i)
    if (c[i] != 0) h += maps[i] * c[i];
  return h;
}

HomModule hom_module(const TModule& m, const TModule& n) {
  const std::size_t a = m.rank(), b = n.rank();
  IntMatrix ia = IntMatrix::identity(a), ib = IntMatrix::identity(b);
  IntMatrix sys(0, a * b);
  for (const auto& [label, g] : m.action) sys = vstack(sys, kronecker(n.action.at(label), ia) - kronecker(ib, g.transpose()));
  Lattice lat = sys.rows() == 0 ? Lattice::full(a * b) : kernel_basis(sys);
  HomModule h;
  for (std::size_t i = 0; i < lat.rank(); ++i) h.maps.push_back(unflatten(lat.basis().row(i), b, a));
  OperatorSet action;
  for (const auto& [label, g] : n.action) action[label] = restrict_operator(kronecker(g, ia), lat);
  h.module = make_module(m.algebra, std::move(action), m.rank_one && n.rank_one);
  return h;
}

Lattice ideal_image(const TModule& m, const Lattice& ideal) {
  IntMatrix gens(0, m.rank());
  for (std::size_t i = 0; i < ideal.rank(); ++i) gens = vstack(gens, m.act(ideal.basis().row(i)).transpose());
  return Lattice(m.rank(), gens);
}

Sub ideal_torsion(const TModule& m, const Lattice& ideal) {
  IntMatrix sys(0, m.rank());
  for (std::size_t i = 0; i < ideal.rank(); ++i) sys = vstack(sys, m.act(ideal.basis().row(i)));
  Sub s;
  s.lattice = sys.rows() == 0 ? Lattice::full(m.rank()) : kernel_basis(sys);
  s.module = submodule(m, s.lattice);
  return s;
}

Presented ideal_quotient(const TModule& m, const Lattice& ideal) {
  return present(m.action, ideal_image(m, ideal), m.algebra, false);
}

Presented base_change_new(const TModule& x, const Lattice& k, AlgebraPtr t_new) {
  Lattice kp = annihilator(*x.algebra, k);
  Sub tors = ideal_torsion(x, kp);
  Presented p = present(x.action, tors.lattice, x.algebra, x.rank_one);
  p.module = change_algebra(p.module, std::move(t_new));
  return p;
}

// ---------------------------------------------------------------- finite modules

IdealCatalog::IdealCatalog(AlgebraPtr t, std::uint64_t level) : t_(std::move(t)), level_(level) {}

const std::vector<MaximalIdeal>& IdealCatalog::above(std::uint64_t ell) const {
  auto it = cache_.find(ell);
  if (it != cache_.end()) return it->second;
  auto ms = maximal_ideals_above(*t_, ell);
  for (auto& m : ms) classify_in_s(m, *t_, level_);
  return cache_.emplace(ell, std::move(ms)).first->second;
}

FiniteTModule finite_module(AlgebraPtr t, const OperatorSet& action, const Lattice& outer, const Lattice& inner) {
  if (!outer.contains(inner)) throw NotSublattice("inner lattice is not inside the outer one");
  if (outer.rank() != inner.rank()) throw InfiniteIndex("finite module needs lattices of equal rank");
  FiniteTModule f;
  f.algebra = std::move(t);
  f.action = action;
  f.outer = outer;
  f.inner = inner;
  f.group = quotient_group(outer, inner);
  return f;
}

FiniteTModule component_group(const TModule& y, const IntMatrix& gram) {
  OperatorSet action;
  for (const auto& [label, g] : y.action) action[label] = g.transpose();
  const std::size_t r = y.rank();
  return finite_module(y.algebra, action, Lattice::full(r), Lattice(r, gram.transpose()));
}

FiniteTModule cokernel(const TModule& target, const IntMatrix& h) {
  return finite_module(target.algebra, target.action, Lattice::full(target.rank()), Lattice(target.rank(), h.transpose()));
}

namespace {

IntMatrix act_on(const FiniteTModule& f, const std::vector<IntMatrix>& basis_action, const IntVector& a) {
  std::size_t r = f.outer.ambient_rank();
  IntMatrix out(r, r);
  for (std::size_t i = 0; i < basis_action.size(); ++i)
    if (a[i] != 0) out += basis_action[i] * a[i];
  return out;
}

// m f + inner
Lattice ideal_times(const FiniteTModule& f, const std::vector<IntMatrix>& ba, const Lattice& ideal) {
  IntMatrix gens = f.inner.basis();
  for (std::size_t i = 0; i < ideal.rank(); ++i) {
    IntMatrix a = act_on(f, ba, ideal.basis().row(i));
    gens = vstack(gens, (a * f.outer.basis().transpose()).transpose());
  }
  return Lattice(f.outer.ambient_rank(), gens);
}

std::vector<std::uint64_t> primes_of(const Integer& n) {
  std::vector<std::uint64_t> out;
  if (n == 0 || abs(n) == 1) return out;
  for (const auto& [p, e] : factor_integer(abs(n))) out.push_back(p.get_ui());
  return out;
}

}  // namespace

bool in_support(const FiniteTModule& f, const MaximalIdeal& m) {
  if (f.trivial()) return false;
  auto ba = f.algebra->act_basis(f.action);
  return !(ideal_times(f, ba, m.lattice) == f.outer);
}

std::vector<MaximalIdeal> support_of_finite(const FiniteTModule& f, const IdealCatalog& catalog) {
  std::vector<MaximalIdeal> out;
  if (f.trivial()) return out;
  auto ba = f.algebra->act_basis(f.action);
  for (auto ell : primes_of(f.order()))
    for (const auto& m : catalog.above(ell))
      if (!(ideal_times(f, ba, m.lattice) == f.outer)) out.push_back(m);
  return out;
}

std::vector<MaximalIdeal> support_outside_s(const FiniteTModule& f, const IdealCatalog& catalog) {
  std::vector<MaximalIdeal> out;
  if (f.trivial()) return out;
  auto ba = f.algebra->act_basis(f.action);
  for (auto ell : primes_of(f.order()))
    for (const auto& m : catalog.above(ell))
      if (!m.in_s && !(ideal_times(f, ba, m.lattice) == f.outer)) out.push_back(m);
  return out;
}

IntVector invariants_outside_s(const FiniteTModule& f, const IdealCatalog& catalog) {
  if (f.trivial()) return {};
  auto ba = f.algebra->act_basis(f.action);
  // J = intersection of the S-ideals over the primes of |f|; f_S = f[J^infinity]
  std::optional<Lattice> j;
  for (auto ell : primes_of(f.order()))
    for (const auto& m : catalog.above(ell))
      if (m.in_s) j = j ? intersect(*j, m.lattice) : m.lattice;
  if (!j) return f.group.invariant_factors;
  Lattice cur = f.inner;
  while (true) {
    Lattice next = f.outer;
    for (std::size_t i = 0; i < j->rank(); ++i) next = intersect(next, preimage(act_on(f, ba, j->basis().row(i)), cur));
    next = lattice_sum(next, cur);
    if (next == cur) break;
    cur = next;
  }
  return quotient_group(f.outer, cur).invariant_factors;
}

// ---------------------------------------------------------------- S-isomorphisms

namespace {

// nullopt if coker h is not supported in S, else the certificate
std::optional<Certificate> check_candidate(const TModule& n, const IntMatrix& h, const IdealCatalog& s) {
  Integer d = determinant(h);
  if (d == 0) return std::nullopt;
  Certificate c;
  c.map = h;
  c.determinant = d;
  FiniteTModule f = cokernel(n, h);
  c.cokernel_invariants = f.group.invariant_factors;
  if (f.trivial()) return c;
  auto ba = f.algebra->act_basis(f.action);
  for (auto ell : primes_of(d)) {
    for (const auto& m : s.above(ell)) {
      if (!(ideal_times(f, ba, m.lattice) == f.outer)) {
        if (!m.in_s) return std::nullopt;
        c.cokernel_support.emplace_back(ell, images_string(m));
      }
    }
  }
  return c;
}

}  // namespace

std::vector<Integer> candidate_determinants(const HomModule& hom, const std::vector<IntVector>& coords) {
  std::vector<Integer> out(coords.size());
  const long n = static_cast<long>(coords.size());
#pragma omp parallel for schedule(dynamic, 8)
  for (long i = 0; i < n; ++i) out[i] = determinant(hom.map(coords[i]));
  return out;
}

std::vector<Integer> candidate_determinants_serial(const HomModule& hom, const std::vector<IntVector>& coords) {
  std::vector<Integer> out;
  out.reserve(coords.size());
  for (const auto& c : coords) out.push_back(determinant(hom.map(c)));
  return out;
}

SearchResult s_isomorphism_search(const TModule& m, const TModule& n, const IdealCatalog& s, const SearchBudget& budget,
                                  std::uint64_t seed) {
  if (m.rank() != n.rank()) throw RankMismatch("modules have ranks " + std::to_string(m.rank()) + " and " + std::to_string(n.rank()));
  SearchResult res;
  if (budget.empty()) return res;
  HomModule hom = hom_module(m, n);
  const std::size_t k = hom.maps.size();
  if (m.rank() == 0) {
    res.status = SearchStatus::Verified;
    res.certificate = Certificate{IntMatrix(0, 0), IntVector(k, 0), Integer(1), {}, {}};
    return res;
  }
  if (k == 0) return res;

  auto attempt = [&](const IntVector& c) {
    auto cert = check_candidate(n, hom.map(c), s);
    if (!cert) return false;
    cert->hom_coords = c;
    res.status = SearchStatus::Verified;
    res.certificate = std::move(cert);
    return true;
  };
  // determinants in parallel, then candidates in their original order
  std::vector<IntVector> batch;
  auto flush = [&]() {
    auto dets = candidate_determinants(hom, batch);
    for (std::size_t i = 0; i < batch.size(); ++i) {
      ++res.candidates_tried;
      if (dets[i] != 0 && attempt(batch[i])) return true;
    }
    batch.clear();
    return false;
  };
  auto push = [&](IntVector c) {
    batch.push_back(std::move(c));
    return batch.size() >= 256 ? flush() : false;
  };

  if (m.action == n.action) {
    IntMatrix flat(k, m.rank() * n.rank());
    for (std::size_t i = 0; i < k; ++i) flat.set_row(i, flatten(hom.maps[i]));
    auto c = Lattice(flat.cols(), flat).coordinates(flatten(IntMatrix::identity(m.rank())));
    if (c) {
      ++res.candidates_tried;
      if (attempt(*c)) return res;
    }
  }
  if (budget.sweep_bound > 0 && k <= budget.sweep_max_rank) {
    for (int b = 1; b <= budget.sweep_bound; ++b) {
      // all vectors in [-b, b]^k with max norm exactly b
      std::vector<int> c(k, -b);
      while (true) {
        bool on_shell = std::any_of(c.begin(), c.end(), [&](int v) { return v == b || v == -b; });
        if (on_shell && push(IntVector(c.begin(), c.end()))) return res;
        std::size_t i = 0;
        while (i < k && c[i] == b) c[i++] = -b;
        if (i == k) break;
        ++c[i];
      }
    }
  }
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> dist(-budget.random_bound, budget.random_bound);
  for (std::size_t d = 0; d < budget.random_draws; ++d) {
    IntVector c(k);
    for (auto& v : c) v = dist(rng);
    if (push(std::move(c))) return res;
  }
  flush();
  return res;
}

bool validate_certificate(const TModule& m, const TModule& n, const Certificate& c, const IdealCatalog& s) {
  if (c.map.rows() != n.rank() || c.map.cols() != m.rank()) return false;
  for (const auto& [label, g] : m.action)
    if (!(n.action.at(label) * c.map == c.map * g)) return false;
  if (m.rank() == 0) return true;
  Integer d = determinant(c.map);
  if (d == 0 || d != c.determinant) return false;
  FiniteTModule f = cokernel(n, c.map);
  if (f.group.invariant_factors != c.cokernel_invariants) return false;
  for (const auto& mi : support_of_finite(f, s))
    if (!mi.in_s) return false;
  return true;
}

TModule build_L(AlgebraPtr t_full, AlgebraPtr t_new, const Lattice& k) {
  TModule star = dual(regular_module(t_full));
  Presented bc = base_change_new(star, k, t_new);
  TModule l = hom_module(bc.module, regular_module(t_new)).module;
  l.rank_one = true;
  return l;
}

IntMatrix old_part_action(const IntMatrix& tau, std::uint64_t r) {
  const std::size_t n = tau.rows();
  IntMatrix out(2 * n, 2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) out(i, j) = tau(i, j);
    out(i, n + i) = static_cast<unsigned long>(r);
    out(n + i, i) = -1;
  }
  return out;
}

// ---------------------------------------------------------------- canonical maps

IntMatrix evaluation_map(const TModule& m) {
  TModule t = regular_module(m.algebra);
  Presented p = tensor_presentation(t, m);
  const std::size_t r = t.rank(), a = m.rank();
  IntMatrix e(a, r * a);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < a; ++j)
      for (std::size_t x = 0; x < a; ++x) e(x, i * a + j) = m.basis_action[i](x, j);
  return e * p.section;
}

IntMatrix dual_tensor_to_hom(const TModule& m, const TModule& n) {
  Presented p = tensor_presentation(m, n);
  HomModule hom = hom_module(m, dual(n));
  const std::size_t a = m.rank(), b = n.rank();
  IntMatrix flat(hom.maps.size(), a * b);
  for (std::size_t k = 0; k < hom.maps.size(); ++k) flat.set_row(k, flatten(hom.maps[k]));
  Lattice lat(a * b, flat);
  IntMatrix out(lat.rank(), p.projection.rows());
  for (std::size_t i = 0; i < p.projection.rows(); ++i) {
    IntMatrix h(b, a);
    for (std::size_t x = 0; x < a; ++x)
      for (std::size_t y = 0; y < b; ++y) h(y, x) = p.projection(i, x * b + y);
    auto c = lat.coordinates(flatten(h));
    if (!c) throw Error("pulled-back functional is not equivariant");
    for (std::size_t k = 0; k < c->size(); ++k) out(k, i) = (*c)[k];
  }
  return out;
}

IntMatrix tensor_dual_to_dual_hom(const TModule& m, const TModule& n) {
  Presented p = tensor_presentation(m, dual(n));
  HomModule hom = hom_module(m, n);
  const std::size_t a = m.rank(), b = n.rank();
  IntMatrix e(hom.maps.size(), a * b);
  for (std::size_t k = 0; k < hom.maps.size(); ++k)
    for (std::size_t i = 0; i < a; ++i)
      for (std::size_t j = 0; j < b; ++j) e(k, i * b + j) = hom.maps[k](j, i);
  return e * p.section;
}

bool is_unimodular(const IntMatrix& m) {
  if (!m.is_square()) return false;
  if (m.rows() == 0) return true;
  return abs(determinant(m)) == 1;
}

}  // namespace isochar
