#include "isochar/ssmod.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <deque>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

namespace isochar {

namespace {

// Curves, lookup tables and the field for one characteristic, rebuilt from a
// module's basis description.
class Geometry {
 public:
  Geometry(std::uint64_t p, const std::vector<VertexPoint>& vertices, const std::vector<EdgePoint>& edges)
      : tower_(p, 2), f2_(tower_.level(2)) {
    for (std::size_t i = 0; i < vertices.size(); ++i) {
      models_.emplace(vertices[i].j, supersingular_model(f2_, vertices[i].j));
      vertex_index_[vertices[i].j] = i;
    }
    for (std::size_t i = 0; i < edges.size(); ++i) edge_index_[{edges[i].j, edges[i].kernel}] = i;
  }

  const FieldPtr& field() const { return f2_; }
  const Curve& model(Elem j) const { return models_.at(j); }

  std::size_t locate_vertex(const Curve& e) const {
    auto it = vertex_index_.find(j_invariant(e));
    if (it == vertex_index_.end()) throw Error("isogenous curve is not a known supersingular point");
    return it->second;
  }

  /// Index of the edge (E, C) for any curve E in the Frobenius -p class.
  std::size_t locate_edge(const Curve& e, const FPoly& h) const {
    Elem j = j_invariant(e);
    const Curve& m = models_.at(j);
    auto s = isomorphism_scale(e, m);
    if (!s) throw Error("no F_{p^2}-isomorphism to the model curve");
    FPoly c = canonical_kernel(m, transform_kernel(h, *s));
    auto it = edge_index_.find({j, c.c});
    if (it == edge_index_.end()) throw Error("pushed subgroup is not a known edge");
    return it->second;
  }

 private:
  FieldTower tower_;
  FieldPtr f2_;
  std::map<Elem, Curve> models_;
  std::map<Elem, std::size_t> vertex_index_;
  std::map<std::pair<Elem, std::vector<Elem>>, std::size_t> edge_index_;
};

std::vector<std::uint64_t> primes_upto(unsigned n) {
  std::vector<std::uint64_t> out;
  for (std::uint64_t l = 2; l <= n; ++l)
    if (is_prime(l)) out.push_back(l);
  return out;
}

// Column j of an operator: indices of the images of basis point j.
std::vector<std::size_t> hecke_column(const GraphModule& m, const Geometry& g, std::uint64_t ell, std::size_t col) {
  std::vector<std::size_t> rows;
  if (!m.is_edge_module()) {
    const Curve& e = g.model(m.vertices[col].j);
    for (const auto& d : cyclic_subgroups(e, static_cast<unsigned>(ell))) rows.push_back(g.locate_vertex(velu(e, d).target));
    return rows;
  }
  const EdgePoint& pt = m.edges[col];
  const Curve& e = g.model(pt.j);
  CyclicSubgroup c{static_cast<unsigned>(m.q), FPoly(g.field(), pt.kernel)};
  for (const auto& d : cyclic_subgroups(e, static_cast<unsigned>(ell))) {
    Isogeny phi = velu(e, d);
    rows.push_back(g.locate_edge(phi.target, push_subgroup(phi, c).kernel));
  }
  return rows;
}

void check_hecke_prime(const GraphModule& m, std::uint64_t ell) {
  if (!is_prime(ell)) throw Error("Hecke index must be prime");
  if (ell == m.p || (m.is_edge_module() && ell == m.q))
    throw Error("T_" + std::to_string(ell) + " is not built by correspondence at a prime dividing the level");
}

IntMatrix permutation_matrix(const std::vector<std::size_t>& image) {
  IntMatrix m(image.size(), image.size());
  for (std::size_t j = 0; j < image.size(); ++j) m(image[j], j) = 1;
  return m;
}

std::vector<Elem> frobenius_coeffs(const FiniteField& F, const std::vector<Elem>& c) {
  std::vector<Elem> r(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) r[i] = F.frobenius(c[i]);
  return r;
}

std::vector<std::size_t> frobenius_images(const GraphModule& m, const Geometry& g) {
  const auto& F = *g.field();
  std::vector<std::size_t> img;
  if (!m.is_edge_module()) {
    for (const auto& v : m.vertices) {
      const Curve& e = g.model(v.j);
      img.push_back(g.locate_vertex(Curve{g.field(), F.frobenius(e.a), F.frobenius(e.b)}));
    }
    return img;
  }
  for (const auto& pt : m.edges) {
    const Curve& e = g.model(pt.j);
    Curve ep{g.field(), F.frobenius(e.a), F.frobenius(e.b)};
    img.push_back(g.locate_edge(ep, FPoly(g.field(), frobenius_coeffs(F, pt.kernel))));
  }
  return img;
}

IntMatrix edge_reversal(const GraphModule& m, const Geometry& g) {
  std::vector<std::size_t> img(m.edges.size());
  const unsigned q = static_cast<unsigned>(m.q);
#pragma omp parallel for schedule(dynamic)
  for (std::size_t i = 0; i < m.edges.size(); ++i) {
    const EdgePoint& pt = m.edges[i];
    const Curve& e = g.model(pt.j);
    FPoly h(g.field(), pt.kernel);
    auto subs = cyclic_subgroups(e, q);
    const CyclicSubgroup* other = nullptr;
    for (const auto& s : subs)
      if (!(s.kernel == h)) {
        other = &s;
        break;
      }
    Isogeny phi = velu(e, CyclicSubgroup{q, h});
    img[i] = g.locate_edge(phi.target, push_subgroup(phi, *other).kernel);
  }
  return permutation_matrix(img);
}

Geometry geometry_of(const GraphModule& m) { return Geometry(m.p, m.vertices, m.edges); }

}  // namespace

IntVector GraphModule::weights() const {
  IntVector w;
  if (is_edge_module())
    for (const auto& e : edges) w.emplace_back(e.weight);
  else
    for (const auto& v : vertices) w.emplace_back(v.weight);
  return w;
}

const IntMatrix& GraphModule::op(const std::string& label) const {
  auto it = operators.find(label);
  if (it == operators.end()) throw Error("module has no operator '" + label + "'");
  return it->second;
}

std::vector<std::string> GraphModule::endomorphism_labels() const {
  std::vector<std::pair<std::uint64_t, std::string>> ts;
  std::vector<std::string> ws;
  bool frob = false;
  for (const auto& [label, _] : operators) {
    if (label == "alpha" || label == "beta") continue;
    if (label == "frob") {
      frob = true;
    } else if (label[0] == 'T') {
      ts.emplace_back(std::stoull(label.substr(1)), label);
    } else {
      ws.push_back(label);
    }
  }
  std::sort(ts.begin(), ts.end());
  std::vector<std::string> out;
  for (auto& t : ts) out.push_back(t.second);
  std::sort(ws.begin(), ws.end(), [](const std::string& a, const std::string& b) {
    return std::stoull(a.substr(1)) < std::stoull(b.substr(1));
  });
  out.insert(out.end(), ws.begin(), ws.end());
  if (frob) out.push_back("frob");
  return out;
}

std::string hecke_label(std::uint64_t ell) { return "T" + std::to_string(ell); }
std::string atkin_lehner_label(std::uint64_t r) { return "w" + std::to_string(r); }

std::vector<VertexPoint> enumerate_ss(std::uint64_t p) {
  if (p < 5 || !is_prime(p)) throw Error("characteristic must be a prime >= 5");
  FieldTower tower(p, 2);
  FieldPtr F2 = tower.level(2);
  Elem seed = p;
  for (Elem j = 0; j < p; ++j)
    if (is_supersingular(curve_from_j(F2, j))) {
      seed = j;
      break;
    }
  if (seed == p) throw MassFormulaViolation("no supersingular j-invariant in F_p");
  std::set<Elem> seen{seed};
  std::deque<Elem> queue{seed};
  while (!queue.empty()) {
    Elem j = queue.front();
    queue.pop_front();
    Curve e = supersingular_model(F2, j);
    for (const auto& c : cyclic_subgroups(e, 2)) {
      Elem jt = j_invariant(velu(e, c).target);
      if (seen.insert(jt).second) queue.push_back(jt);
    }
  }
  std::vector<VertexPoint> out;
  mpq_class total = 0;
  for (Elem j : seen) {
    unsigned w = automorphism_count(curve_from_j(F2, j)) / 2;
    out.push_back({j, w});
    total += mpq_class(1, w);
  }
  mpq_class expect(p - 1, 12);
  expect.canonicalize();
  if (total != expect)
    throw MassFormulaViolation("vertex mass " + total.get_str() + " != " + expect.get_str() + " for p = " + std::to_string(p));
  return out;
}

GraphModule build_vertex_module(std::uint64_t p, unsigned hecke_upto) {
  GraphModule m;
  m.p = p;
  m.hecke_upto = hecke_upto;
  m.modulus = lowest_irreducible(p, 2);
  m.vertices = enumerate_ss(p);
  Geometry g = geometry_of(m);
  for (auto ell : primes_upto(hecke_upto))
    if (ell != p) m.operators[hecke_label(ell)] = hecke_operator(m, ell);
  IntMatrix fr = permutation_matrix(frobenius_images(m, g));
  m.operators[atkin_lehner_label(p)] = -fr;
  m.operators["frob"] = fr;
  return m;
}

GraphModule build_edge_module(std::uint64_t p, std::uint64_t q, unsigned hecke_upto) {
  if (p == q) throw Error("p and q must differ");
  if (q < 5 || !is_prime(q)) throw Error("level prime must be a prime >= 5");
  GraphModule m;
  m.p = p;
  m.q = q;
  m.hecke_upto = hecke_upto;
  m.modulus = lowest_irreducible(p, 2);
  m.vertices = enumerate_ss(p);
  {
    FieldTower tower(p, 2);
    FieldPtr F2 = tower.level(2);
    std::vector<std::vector<EdgePoint>> per_vertex(m.vertices.size());
#pragma omp parallel for schedule(dynamic)
    for (std::size_t v = 0; v < m.vertices.size(); ++v) {
      Curve e = supersingular_model(F2, m.vertices[v].j);
      std::map<std::vector<Elem>, unsigned> orbits;
      for (const auto& c : cyclic_subgroups(e, static_cast<unsigned>(q))) {
        unsigned stab = 0;
        FPoly canon = canonical_kernel(e, c.kernel, &stab);
        orbits[canon.c] = stab;
      }
      for (auto& [k, w] : orbits) per_vertex[v].push_back({m.vertices[v].j, k, w});
    }
    for (auto& pv : per_vertex)
      for (auto& e : pv) m.edges.push_back(std::move(e));
  }
  mpq_class total = mass(m);
  mpq_class expect((p - 1) * (q + 1), 12);
  expect.canonicalize();
  if (total != expect)
    throw MassFormulaViolation("edge mass " + total.get_str() + " != " + expect.get_str());

  Geometry g = geometry_of(m);
  for (auto ell : primes_upto(hecke_upto))
    if (ell != p && ell != q) m.operators[hecke_label(ell)] = hecke_operator(m, ell);
  IntMatrix wq = edge_reversal(m, g);
  IntMatrix fr = permutation_matrix(frobenius_images(m, g));
  m.operators[atkin_lehner_label(q)] = wq;
  m.operators[atkin_lehner_label(p)] = -fr;
  m.operators[hecke_label(q)] = -wq;
  m.operators[hecke_label(p)] = fr;
  m.operators["frob"] = fr;

  IntMatrix alpha(m.vertices.size(), m.edges.size()), beta(m.vertices.size(), m.edges.size());
  for (std::size_t i = 0; i < m.edges.size(); ++i) {
    const Curve& e = g.model(m.edges[i].j);
    alpha(g.locate_vertex(e), i) = 1;
    Isogeny phi = velu(e, CyclicSubgroup{static_cast<unsigned>(q), FPoly(g.field(), m.edges[i].kernel)});
    beta(g.locate_vertex(phi.target), i) = 1;
  }
  m.operators["alpha"] = alpha;
  m.operators["beta"] = beta;
  return m;
}

IntMatrix hecke_operator_serial(const GraphModule& m, std::uint64_t ell) {
  check_hecke_prime(m, ell);
  Geometry g = geometry_of(m);
  IntMatrix t(m.size(), m.size());
  for (std::size_t col = 0; col < m.size(); ++col)
    for (std::size_t row : hecke_column(m, g, ell, col)) t(row, col) += 1;
  return t;
}

IntMatrix hecke_operator(const GraphModule& m, std::uint64_t ell) {
  check_hecke_prime(m, ell);
  Geometry g = geometry_of(m);
  std::vector<std::vector<std::size_t>> cols(m.size());
#pragma omp parallel for schedule(dynamic)
  for (std::size_t col = 0; col < m.size(); ++col) cols[col] = hecke_column(m, g, ell, col);
  IntMatrix t(m.size(), m.size());
  for (std::size_t col = 0; col < m.size(); ++col)
    for (std::size_t row : cols[col]) t(row, col) += 1;
  return t;
}

IntMatrix atkin_lehner(const GraphModule& m, std::uint64_t r) {
  Geometry g = geometry_of(m);
  if (r == m.p) return -permutation_matrix(frobenius_images(m, g));
  if (m.is_edge_module() && r == m.q) return edge_reversal(m, g);
  throw Error("Atkin-Lehner involution only at primes dividing the level");
}

IntMatrix frobenius_twist(const GraphModule& m) {
  Geometry g = geometry_of(m);
  return permutation_matrix(frobenius_images(m, g));
}

IntMatrix monodromy_gram(const GraphModule& m, const Lattice& sub) {
  IntMatrix b = sub.basis();
  IntMatrix wb = b;
  IntVector w = m.weights();
  for (std::size_t i = 0; i < wb.rows(); ++i)
    for (std::size_t j = 0; j < wb.cols(); ++j) wb(i, j) *= w[j];
  return wb * b.transpose();
}

RestrictedModule degree_zero_submodule(const GraphModule& m) {
  IntMatrix ones(1, m.size());
  for (std::size_t j = 0; j < m.size(); ++j) ones(0, j) = 1;
  RestrictedModule r;
  r.lattice = kernel_basis(ones);
  for (const auto& label : m.endomorphism_labels()) r.operators[label] = restrict_operator(m.op(label), r.lattice);
  r.gram = monodromy_gram(m, r.lattice);
  return r;
}

mpq_class mass(const GraphModule& m) {
  mpq_class total = 0;
  for (const auto& w : m.weights()) {
    mpq_class t(1, w);
    t.canonicalize();
    total += t;
  }
  return total;
}

// ---------------------------------------------------------------- modular polynomials

Integer ModularPolynomial::coeff(unsigned i, unsigned j) const {
  auto it = coeffs.find({i, j});
  return it == coeffs.end() ? Integer(0) : it->second;
}

unsigned ModularPolynomial::degree() const {
  unsigned d = 0;
  for (const auto& [ij, c] : coeffs)
    if (c != 0) d = std::max(d, ij.first);
  return d;
}

FPoly ModularPolynomial::specialize(const FieldPtr& field, Elem j) const {
  const auto& F = *field;
  std::vector<Elem> c(degree() + 1, 0);
  for (const auto& [ij, v] : coeffs) {
    Elem term = F.mul(F.from_int(v), F.pow(j, static_cast<std::uint64_t>(ij.first)));
    c[ij.second] = F.add(c[ij.second], term);
  }
  return FPoly(field, c);
}

ModularPolynomial load_modular_polynomial(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open modular polynomial file " + path);
  ModularPolynomial phi;
  std::string tag;
  if (!(in >> tag >> phi.ell) || tag != "ell") throw ParseError(path + ": expected header \"ell <l>\"");
  std::string line;
  std::getline(in, line);
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ls(line);
    unsigned i, j;
    std::string c;
    if (!(ls >> i)) continue;
    if (!(ls >> j >> c)) throw ParseError(path + ":" + std::to_string(lineno) + ": expected \"<i> <j> <coeff>\"");
    if (i < j) throw AsymmetryError(path + ":" + std::to_string(lineno) + ": monomial with i < j");
    Integer v;
    if (v.set_str(c, 10) != 0) throw ParseError(path + ":" + std::to_string(lineno) + ": bad coefficient");
    for (auto key : {std::pair{i, j}, std::pair{j, i}}) {
      auto it = phi.coeffs.find(key);
      if (it != phi.coeffs.end() && it->second != v) throw AsymmetryError(path + ": conflicting coefficients");
      phi.coeffs[key] = v;
    }
  }
  if (phi.degree() != phi.ell + 1 || phi.coeff(phi.ell + 1, 0) != 1)
    throw ParseError(path + ": not monic of degree l+1 in each variable");
  return phi;
}

std::size_t modular_polynomial_disagreements(const GraphModule& m, const ModularPolynomial& phi) {
  Geometry g = geometry_of(m);
  std::size_t bad = 0;
  for (std::size_t col = 0; col < m.size(); ++col) {
    Elem j = m.is_edge_module() ? m.edges[col].j : m.vertices[col].j;
    const Curve& e = g.model(j);
    std::vector<Elem> images;
    for (const auto& d : cyclic_subgroups(e, phi.ell)) images.push_back(j_invariant(velu(e, d).target));
    std::sort(images.begin(), images.end());
    if (images != roots_in_level(phi.specialize(g.field(), j), g.field())) ++bad;
  }
  return bad;
}

// ---------------------------------------------------------------- cache format

std::string sha256_hex(const std::string& data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr);
  std::ostringstream os;
  for (unsigned i = 0; i < len; ++i) os << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(md[i]);
  return os.str();
}

namespace {

constexpr const char* kCacheTag = "isochar-graph-module 1";

std::string body_of(const GraphModule& m) {
  std::ostringstream os;
  os << "p " << m.p << "\nq " << m.q << "\nhecke_upto " << m.hecke_upto << "\nfactor_seed " << kFactorSeed << "\n";
  os << "modulus " << m.modulus.size();
  for (auto c : m.modulus) os << ' ' << c;
  os << "\nvertices " << m.vertices.size() << "\n";
  for (const auto& v : m.vertices) os << v.j << ' ' << v.weight << "\n";
  os << "edges " << m.edges.size() << "\n";
  for (const auto& e : m.edges) {
    os << e.j << ' ' << e.weight << ' ' << e.kernel.size();
    for (auto c : e.kernel) os << ' ' << c;
    os << "\n";
  }
  os << "operators " << m.operators.size() << "\n";
  for (const auto& [label, mat] : m.operators) os << "op " << label << "\n" << mat.to_text();
  return os.str();
}

template <typename T>
T expect_field(std::istream& in, const std::string& key) {
  std::string k;
  T v{};
  if (!(in >> k) || k != key || !(in >> v)) throw ParseError("cache: expected field '" + key + "'");
  return v;
}

}  // namespace

std::string serialize(const GraphModule& m) {
  std::string body = body_of(m);
  return std::string(kCacheTag) + "\nsha256 " + sha256_hex(body) + "\n" + body;
}

GraphModule deserialize(const std::string& text) {
  auto nl1 = text.find('\n');
  if (nl1 == std::string::npos || text.substr(0, nl1) != kCacheTag) throw ParseError("cache: bad format tag");
  auto nl2 = text.find('\n', nl1 + 1);
  if (nl2 == std::string::npos) throw ParseError("cache: truncated header");
  std::string hash_line = text.substr(nl1 + 1, nl2 - nl1 - 1);
  std::string body = text.substr(nl2 + 1);
  if (hash_line != "sha256 " + sha256_hex(body)) throw ParseError("cache: content hash mismatch");
  std::istringstream in(body);
  GraphModule m;
  m.p = expect_field<std::uint64_t>(in, "p");
  m.q = expect_field<std::uint64_t>(in, "q");
  m.hecke_upto = expect_field<unsigned>(in, "hecke_upto");
  if (expect_field<std::uint64_t>(in, "factor_seed") != kFactorSeed) throw ParseError("cache: factorization seed differs");
  m.modulus.resize(expect_field<std::size_t>(in, "modulus"));
  for (auto& c : m.modulus) in >> c;
  m.vertices.resize(expect_field<std::size_t>(in, "vertices"));
  for (auto& v : m.vertices) in >> v.j >> v.weight;
  m.edges.resize(expect_field<std::size_t>(in, "edges"));
  for (auto& e : m.edges) {
    std::size_t n = 0;
    in >> e.j >> e.weight >> n;
    e.kernel.resize(n);
    for (auto& c : e.kernel) in >> c;
  }
  std::size_t nops = expect_field<std::size_t>(in, "operators");
  for (std::size_t i = 0; i < nops; ++i) {
    std::string label = expect_field<std::string>(in, "op");
    m.operators[label] = IntMatrix::from_text(in);
  }
  if (!in) throw ParseError("cache: truncated body");
  if (m.modulus != lowest_irreducible(m.p, 2)) throw ParseError("cache: field modulus differs from this build");
  return m;
}

}  // namespace isochar
