#include "isochar/shimura.hpp"

#include <algorithm>
#include <exception>
#include <sstream>

#include "isochar/errors.hpp"

namespace isochar {

namespace {

std::string ideal_string(const MaximalIdeal& m) {
  std::ostringstream os;
  os << "l=" << m.ell << " deg=" << m.degree;
  for (const auto& [label, v] : m.images) os << " " << label << "=" << m.residue_field->to_string(v);
  return os.str();
}

std::uint64_t next_prime_coprime(std::uint64_t from, std::uint64_t n) {
  std::uint64_t l = from + 1;
  while (!is_prime(l) || n % l == 0) ++l;
  return l;
}

// ambient rows of the lattice basis of `sub` (given inside `outer`)
IntMatrix ambient_rows(const Lattice& outer, const Lattice& sub) { return sub.basis() * outer.basis(); }

IntMatrix weighted_gram(const IntMatrix& rows, const IntVector& w) {
  const std::size_t r = rows.rows();
  IntMatrix g(r, r);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < r; ++j) {
      Integer s = 0;
      for (std::size_t k = 0; k < rows.cols(); ++k) s += rows(i, k) * rows(j, k) * w[k];
      g(i, j) = s;
    }
  return g;
}

GraphSide make_side(std::uint64_t p, std::uint64_t q, unsigned upto, const ModuleSource& src) {
  GraphSide s;
  s.p = p;
  s.q = q;
  s.edges = src.edges ? src.edges(p, q, upto) : build_edge_module(p, q, upto);
  s.vertices = src.vertices ? src.vertices(p, upto) : build_vertex_module(p, upto);
  s.degree_zero = degree_zero_submodule(s.edges);
  s.vertex_degree_zero = degree_zero_submodule(s.vertices);
  s.vertex_rank = s.vertex_degree_zero.lattice.rank();

  const IntMatrix& alpha = s.edges.op("alpha");
  const IntMatrix& beta = s.edges.op("beta");
  Lattice kab = kernel_basis(vstack(alpha, beta));
  s.ribet_ambient = kab;
  const Lattice& deg = s.degree_zero.lattice;
  s.ribet = Lattice(deg.rank(), coordinates_in(deg, kab.basis()));
  s.ribet_gram = weighted_gram(ambient_rows(deg, s.ribet), s.edges.weights());

  // (alpha, beta) on degree-zero parts
  const std::size_t vr = s.vertex_rank;
  if (vr > 0) {
    IntMatrix b = deg.basis();
    IntMatrix a_img = coordinates_in(s.vertex_degree_zero.lattice, (alpha * b.transpose()).transpose());
    IntMatrix b_img = coordinates_in(s.vertex_degree_zero.lattice, (beta * b.transpose()).transpose());
    Lattice img(2 * vr, hstack(a_img, b_img));
    if (img.rank() != 2 * vr) throw Error("degeneracy maps are not surjective up to finite index");
    s.surjection_cokernel = quotient_group(Lattice::full(2 * vr), img).invariant_factors;
  }
  return s;
}

OperatorSet pick(const OperatorSet& ops, const std::vector<std::string>& labels) {
  OperatorSet out;
  for (const auto& l : labels) {
    auto it = ops.find(l);
    if (it == ops.end()) throw Error("missing operator " + l);
    out[l] = it->second;
  }
  return out;
}

Verdict from_search(const TModule& m, const TModule& n, const SearchResult& r, const IdealCatalog& cat) {
  Verdict v;
  if (r.status == SearchStatus::Verified) {
    v.certificate = r.certificate;
    v.certificate_valid = validate_certificate(m, n, *r.certificate, cat);
    v.kind = v.certificate_valid ? VerdictKind::Verified : VerdictKind::Inconclusive;
    if (!v.certificate_valid) v.detail = "certificate failed re-validation";
  } else {
    v.detail = "no certificate within budget (" + std::to_string(r.candidates_tried) + " candidates)";
  }
  return v;
}

unsigned log_exact(std::size_t n, unsigned d) { return d == 0 ? 0 : static_cast<unsigned>(n / d); }

}  // namespace

std::string to_string(VerdictKind v) {
  switch (v) {
    case VerdictKind::Verified: return "Verified";
    case VerdictKind::FailsAt: return "FailsAt";
    case VerdictKind::Inconclusive: return "Inconclusive";
  }
  return "?";
}

unsigned case_hecke_bound(std::uint64_t p, std::uint64_t q, const CaseOptions& opts) {
  std::uint64_t sturm = opts.sturm_override ? opts.sturm_override : sturm_generator_bound(p * q);
  return static_cast<unsigned>(std::max<std::uint64_t>({sturm, opts.ell_max, next_prime_coprime(sturm, p * q)}));
}

CaseData build_case(std::uint64_t p, std::uint64_t q, const CaseOptions& opts, const ModuleSource& source) {
  if (p == q || p < 5 || q < 5 || !is_prime(p) || !is_prime(q)) throw Error("need distinct primes >= 5");
  CaseData c;
  c.p = p;
  c.q = q;
  c.level = p * q;
  c.sturm = opts.sturm_override ? opts.sturm_override : sturm_generator_bound(c.level);
  c.hecke_upto = case_hecke_bound(p, q, opts);
  c.generators = generator_labels(c.level, c.sturm);

  std::exception_ptr err[2];
#pragma omp parallel sections
  {
#pragma omp section
    {
      try {
        c.pside = make_side(p, q, c.hecke_upto, source);
      } catch (...) {
        err[0] = std::current_exception();
      }
    }
#pragma omp section
    {
      try {
        c.qside = make_side(q, p, c.hecke_upto, source);
      } catch (...) {
        err[1] = std::current_exception();
      }
    }
  }
  for (auto& e : err)
    if (e) std::rethrow_exception(e);

  OperatorSet gp = pick(c.pside.degree_zero.operators, c.generators);
  OperatorSet gq = pick(c.qside.degree_zero.operators, c.generators);
  c.t_full_p = std::make_shared<HeckeAlgebra>(algebra_from_operators(gp));
  c.t_full_q = std::make_shared<HeckeAlgebra>(algebra_from_operators(gq));
  c.sturm_saturated = algebra_from_operators(c.pside.degree_zero.operators) == *c.t_full_p &&
                      algebra_from_operators(c.qside.degree_zero.operators) == *c.t_full_q;

  c.x_p_full = make_module(c.t_full_p, gp, true);
  c.x_q_full = make_module(c.t_full_q, gq, true);

  NewQuotient np = new_quotient(*c.t_full_p, c.pside.ribet);
  NewQuotient nq = new_quotient(*c.t_full_q, c.qside.ribet);
  c.t_new = std::make_shared<HeckeAlgebra>(np.algebra);
  c.k_p = np.kernel;
  c.k_q = nq.kernel;

  c.y_q = change_algebra(submodule(c.x_p_full, c.pside.ribet), c.t_new);
  c.y_q.rank_one = true;
  TModule yp = submodule(c.x_q_full, c.qside.ribet);
  c.y_p_relations_hold = c.t_new->relations_hold(yp.action);
  if (!c.y_p_relations_hold) throw NotStable("q-side Ribet kernel does not factor through the new algebra");
  c.y_p = change_algebra(yp, c.t_new);
  c.y_p.rank_one = true;

  c.x_p_new = base_change_new(c.x_p_full, c.k_p, c.t_new).module;
  c.x_q_new = base_change_new(c.x_q_full, c.k_q, c.t_new).module;

  c.s_new = std::make_shared<IdealCatalog>(c.t_new, c.level);
  c.s_full_p = std::make_shared<IdealCatalog>(c.t_full_p, c.level);
  c.s_full_q = std::make_shared<IdealCatalog>(c.t_full_q, c.level);
  return c;
}

const TModule& ribet_kernel(const CaseData& c, char side) {
  if (side == 'q') return c.y_q;
  if (side == 'p') return c.y_p;
  throw Error("side must be 'p' or 'q'");
}

const IntMatrix& ribet_gram(const CaseData& c, char side) {
  if (side == 'q') return c.pside.ribet_gram;
  if (side == 'p') return c.qside.ribet_gram;
  throw Error("side must be 'p' or 'q'");
}

FiniteTModule component_group_shimura(const CaseData& c, char side) {
  return component_group(ribet_kernel(c, side), ribet_gram(c, side));
}

RankIdentity ribet_rank_identity(const CaseData& c, char side) {
  const GraphSide& g = side == 'q' ? c.pside : c.qside;
  return {g.degree_zero.lattice.rank(), g.ribet.rank(), g.vertex_rank};
}

bool JLWitness::agrees() const {
  if (!relations_hold) return false;
  for (const auto& [a, b] : charpolys)
    if (a != b) return false;
  return true;
}

JLWitness jacquet_langlands(const CaseData& c) {
  JLWitness w;
  w.relations_hold = c.y_p_relations_hold;
  for (const auto& [label, op] : c.pside.degree_zero.operators) {
    if (label == "frob") continue;
    auto it = c.qside.degree_zero.operators.find(label);
    if (it == c.qside.degree_zero.operators.end()) continue;
    w.labels.push_back(label);
    w.charpolys.emplace_back(charpoly(restrict_operator(op, c.pside.ribet)),
                             charpoly(restrict_operator(it->second, c.qside.ribet)));
  }
  return w;
}

Verdict eisenstein_support_verdict(const FiniteTModule& f, const IdealCatalog& cat) {
  Verdict v;
  for (const auto& m : support_of_finite(f, cat))
    if (!m.eisenstein) v.failing_ideals.push_back(ideal_string(m));
  v.kind = v.failing_ideals.empty() ? VerdictKind::Verified : VerdictKind::FailsAt;
  v.detail = "order " + f.order().get_str() + ", invariants " + to_string(f.group.invariant_factors);
  return v;
}

Verdict verify_component_eisenstein(const CaseData& c, char side) {
  const bool ps = side == 'p';
  const TModule& x = ps ? c.x_p_full : c.x_q_full;
  const IntMatrix& gram = ps ? c.pside.degree_zero.gram : c.qside.degree_zero.gram;
  return eisenstein_support_verdict(component_group(x, gram), ps ? *c.s_full_p : *c.s_full_q);
}

Verdict verify_chargp(const CaseData& c, const SearchBudget& budget, std::uint64_t seed) {
  TModule ys = dual(c.y_q);
  if (c.x_p_new.rank() != ys.rank()) {
    Verdict v;
    v.kind = VerdictKind::FailsAt;
    v.detail = "rank mismatch";
    return v;
  }
  return from_search(c.x_p_new, ys, s_isomorphism_search(c.x_p_new, ys, *c.s_new, budget, seed), *c.s_new);
}

RibExact2 verify_ribexact2(const CaseData& c, std::uint64_t q1) {
  if (q1 != c.p && q1 != c.q) throw Error("q1 must divide the level");
  RibExact2 r;
  r.q1 = q1;
  r.q2 = q1 == c.p ? c.q : c.p;

  FiniteTModule lhs = component_group_shimura(c, q1 == c.q ? 'q' : 'p');
  r.lhs_invariants = lhs.group.invariant_factors;
  r.lhs_outside_s = invariants_outside_s(lhs, *c.s_new);
  std::vector<std::string> failing;
  for (const auto& m : support_outside_s(lhs, *c.s_new)) failing.push_back("lhs " + ideal_string(m));

  // X_{q2}(J_0(q2))^2 with T_{q1} on the old part
  const GraphSide& g = r.q2 == c.p ? c.pside : c.qside;
  const auto& vops = g.vertex_degree_zero.operators;
  const std::size_t n = g.vertex_rank;
  if (n > 0) {
    const IntMatrix& tau = vops.at(hecke_label(q1));
    IntMatrix i2 = IntMatrix::identity(2);
    OperatorSet ops;
    for (const auto& label : c.generators) {
      if (label[0] != 'T') continue;
      ops[label] = kronecker(i2, vops.at(label));
    }
    IntMatrix t1 = old_part_action(tau, q1);
    ops[hecke_label(q1)] = t1;
    auto alg = std::make_shared<HeckeAlgebra>(algebra_from_operators(ops));
    IntMatrix rel = t1 * t1 - IntMatrix::identity(2 * n);
    FiniteTModule rhs = finite_module(alg, ops, Lattice::full(2 * n), Lattice(2 * n, rel.transpose()));
    IdealCatalog cat(alg, c.level);
    r.rhs_invariants = rhs.group.invariant_factors;
    r.rhs_outside_s = invariants_outside_s(rhs, cat);
    for (const auto& m : support_outside_s(rhs, cat)) failing.push_back("rhs " + ideal_string(m));
  }

  if (r.lhs_outside_s == r.rhs_outside_s) {
    r.verdict.kind = VerdictKind::Verified;
  } else {
    r.verdict.kind = VerdictKind::FailsAt;
    r.verdict.failing_ideals = failing;
  }
  r.verdict.detail = "lhs " + to_string(r.lhs_invariants) + " rhs " + to_string(r.rhs_invariants);
  return r;
}

Verdict verify_thm_main(const CaseData& c, char side) {
  const TModule& x = side == 'p' ? c.x_p_new : c.x_q_new;
  const TModule& y = ribet_kernel(c, side);
  Verdict v;
  HomModule h = hom_module(x, y);
  Presented p = tensor_presentation(x, h.module);
  const std::size_t a = x.rank(), k = h.maps.size();
  IntMatrix e(y.rank(), a * k);
  for (std::size_t i = 0; i < a; ++i)
    for (std::size_t j = 0; j < k; ++j)
      for (std::size_t r = 0; r < y.rank(); ++r) e(r, i * k + j) = h.maps[j](r, i);
  IntMatrix ev = e * p.section;
  if (!ev.is_square()) {
    v.kind = VerdictKind::FailsAt;
    v.detail = "evaluation map is not square (" + std::to_string(ev.rows()) + "x" + std::to_string(ev.cols()) + ")";
    return v;
  }
  if (ev.rows() > 0 && determinant(ev) == 0) {
    v.kind = VerdictKind::FailsAt;
    v.detail = "evaluation map is not injective";
    return v;
  }
  FiniteTModule coker = cokernel(y, ev);
  for (const auto& m : support_outside_s(coker, *c.s_new)) v.failing_ideals.push_back(ideal_string(m));
  v.kind = v.failing_ideals.empty() ? VerdictKind::Verified : VerdictKind::FailsAt;
  v.detail = "hom rank " + std::to_string(k) + ", cokernel " + to_string(coker.group.invariant_factors);
  return v;
}

Verdict verify_globalmult1(const CaseData& c, const SearchBudget& budget, std::uint64_t seed) {
  TModule lhs = hom_module(c.x_p_new, c.y_p).module;
  TModule l = build_L(c.t_full_p, c.t_new, c.k_p);
  TModule rhs = tensor_mod_torsion(tensor_mod_torsion(l, c.x_p_new), c.x_q_new);
  if (lhs.rank() != c.t_new->rank() || rhs.rank() != c.t_new->rank()) {
    Verdict v;
    v.kind = VerdictKind::FailsAt;
    v.detail = "ranks " + std::to_string(lhs.rank()) + " and " + std::to_string(rhs.rank()) + ", algebra rank " +
               std::to_string(c.t_new->rank());
    return v;
  }
  return from_search(lhs, rhs, s_isomorphism_search(lhs, rhs, *c.s_new, budget, seed), *c.s_new);
}

unsigned fiber_dimension(const TModule& m, const MaximalIdeal& ideal) {
  Lattice img = ideal_image(m, ideal.lattice);
  std::size_t dim = m.rank() - rank_mod(img.basis(), ideal.ell);
  return log_exact(dim, ideal.degree);
}

std::vector<IdealRecord> controllability_report(const CaseData& c, unsigned ell_max) {
  std::vector<IdealRecord> out;
  TModule h = hom_module(c.x_p_new, c.y_p).module;
  for (std::uint64_t ell = 2; ell <= ell_max; ++ell) {
    if (!is_prime(ell)) continue;
    for (const auto& m : c.s_new->above(ell)) {
      IdealRecord r;
      r.ell = ell;
      r.degree = m.degree;
      for (const auto& [label, v] : m.images) r.images += (r.images.empty() ? "" : " ") + label + "=" + m.residue_field->to_string(v);
      r.eisenstein = m.eisenstein;
      r.in_s = m.in_s;
      r.d_p = fiber_dimension(c.x_p_new, m);
      r.d_q = fiber_dimension(c.x_q_new, m);
      r.h_m = fiber_dimension(h, m);
      r.controllable_p = r.d_p == 1;
      r.controllable_q = r.d_q == 1;
      r.predicted_torsion_dim = 2 * r.h_m;
      unsigned k = (r.d_p == 2) + (r.d_q == 2);
      if (!r.in_s) r.bound_ok = r.h_m <= (1u << k);
      r.range_ok = r.d_p >= 1 && r.d_p <= 2 && r.d_q >= 1 && r.d_q <= 2;
      const bool generic = !r.eisenstein && ell >= 5;
      if (generic && r.d_p == 1 && r.d_q == 1) r.mult_one_ok = r.h_m == 1;
      if (generic) {
        if (r.d_p == 2 && c.p % ell != 1) r.congruence_ok = false;
        if (r.d_q == 2 && c.q % ell != 1) r.congruence_ok = false;
      }
      out.push_back(std::move(r));
    }
  }
  return out;
}

std::vector<MultiplicityHit> find_higher_multiplicity(const std::vector<std::pair<std::uint64_t, std::uint64_t>>& cases,
                                                      unsigned ell_max) {
  std::vector<MultiplicityHit> hits;
  for (const auto& [p, q] : cases) {
    CaseOptions o;
    o.ell_max = ell_max;
    CaseData c = build_case(p, q, o);
    for (const auto& r : controllability_report(c, ell_max))
      if (!r.eisenstein && r.ell >= 5 && r.h_m == 2) hits.push_back({p, q, r});
  }
  return hits;
}

}  // namespace isochar
