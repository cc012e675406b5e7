#include "cli.hpp"

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <unistd.h>

#include "isochar/errors.hpp"

namespace isochar::cli {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

json num(const Integer& v) {
  if (v.fits_slong_p()) return v.get_si();
  return v.get_str();
}

json vec(const IntVector& v) {
  json a = json::array();
  for (const auto& x : v) a.push_back(num(x));
  return a;
}

json mat(const IntMatrix& m) {
  json a = json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) a.push_back(vec(m.row(i)));
  return a;
}

std::string mass_string(const GraphModule& m) {
  // denominators over 12, the form the mass formulas are stated in
  mpq_class v = mass(m) * 12;
  std::ostringstream os;
  if (v.get_den() == 1)
    os << v.get_num().get_str() << "/12";
  else
    os << mass(m).get_str();
  return os.str();
}

json certificate_json(const Certificate& c) {
  json j;
  j["map"] = mat(c.map);
  j["hom_coords"] = vec(c.hom_coords);
  j["determinant"] = num(c.determinant);
  j["cokernel_invariants"] = vec(c.cokernel_invariants);
  json sup = json::array();
  for (const auto& [ell, images] : c.cokernel_support) sup.push_back({{"ell", ell}, {"images", images}});
  j["cokernel_support"] = sup;
  return j;
}

json verdict_json(const Verdict& v) {
  json j;
  j["verdict"] = to_string(v.kind);
  if (!v.detail.empty()) j["detail"] = v.detail;
  if (v.certificate) {
    j["certificate"] = certificate_json(*v.certificate);
    j["certificate_valid"] = v.certificate_valid;
  }
  if (!v.failing_ideals.empty()) j["failing_ideals"] = v.failing_ideals;
  return j;
}

std::string tri(bool applies, bool ok) { return applies ? (ok ? "ok" : "violated") : "n/a"; }

json budget_json(const SearchBudget& b) {
  return {{"sweep_bound", b.sweep_bound},
          {"sweep_max_rank", b.sweep_max_rank},
          {"random_draws", b.random_draws},
          {"random_bound", b.random_bound}};
}

std::string render_verify_table(const json& r) {
  std::ostringstream os;
  os << "case p=" << r["p"] << " q=" << r["q"] << " ell_max=" << r["ell_max"] << " seed=" << r["seed"] << "\n";
  os << "ranks";
  for (const auto& [k, v] : r["modules"]["ranks"].items()) os << " " << k << "=" << v;
  os << "\n";
  for (const auto& [name, c] : r["checks"].items()) {
    os << std::left << std::setw(24) << name << " " << c["verdict"].get<std::string>();
    if (c.contains("detail")) os << "  " << c["detail"].get<std::string>();
    os << "\n";
    if (c.contains("failing_ideals"))
      for (const auto& f : c["failing_ideals"]) os << "    at " << f.get<std::string>() << "\n";
  }
  for (const auto& w : r["warnings"]) os << "warning: " << w.get<std::string>() << "\n";
  return os.str();
}

bool wanted(const RunConfig& cfg, const std::string& name) {
  if (cfg.checks.empty()) return true;
  for (const auto& c : cfg.checks)
    if (c == name || c == "all" || (c == "main" && name.rfind("thm_main", 0) == 0)) return true;
  return false;
}

double ms_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

void validate_pair(std::uint64_t p, std::uint64_t q) {
  if (p == q) throw std::invalid_argument("p and q must differ");
  for (auto r : {p, q})
    if (r < 5 || !is_prime(r)) throw std::invalid_argument(std::to_string(r) + " is not a prime >= 5");
}

CaseOptions options(const RunConfig& cfg) {
  CaseOptions o;
  o.ell_max = cfg.ell_max;
  o.sturm_override = cfg.sturm_override;
  return o;
}

}  // namespace

fs::path default_cache_dir() {
  if (const char* env = std::getenv("ISOCHAR_CACHE_DIR"); env && *env) return env;
  return ".isochar-cache";
}

// ---------------------------------------------------------------- cache

GraphModule ModuleCache::fetch(const std::string& kind, std::uint64_t p, std::uint64_t q, unsigned upto) {
  std::string name = kind + "-p" + std::to_string(p) + (kind == "edge" ? "-q" + std::to_string(q) : "") + "-h" +
                     std::to_string(upto) + ".txt";
  fs::path path = dir_ / name;
  Artifact a{kind, p, q, path.string(), "", "built"};
  if (fs::exists(path)) {
    std::ifstream in(path, std::ios::binary);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    try {
      GraphModule m = deserialize(text);
      a.sha256 = sha256_hex(text);
      a.status = "cached";
      std::lock_guard lock(mu_);
      log_.push_back(a);
      return m;
    } catch (const ParseError&) {
      a.status = "rebuilt";
    }
  }
  GraphModule m = kind == "edge" ? build_edge_module(p, q, upto) : build_vertex_module(p, upto);
  std::string text = serialize(m);
  std::error_code ec;
  fs::create_directories(dir_, ec);
  if (ec) throw IoError("cannot create cache directory " + dir_.string() + ": " + ec.message());
  fs::path tmp = dir_ / (name + ".tmp." + std::to_string(::getpid()));
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + tmp.string());
    out << text;
    if (!out.flush()) throw IoError("write failed for " + tmp.string());
  }
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp);
    throw IoError("cannot move cache file into place: " + ec.message());
  }
  a.sha256 = sha256_hex(text);
  std::lock_guard lock(mu_);
  log_.push_back(a);
  return m;
}

GraphModule ModuleCache::edges(std::uint64_t p, std::uint64_t q, unsigned upto) { return fetch("edge", p, q, upto); }
GraphModule ModuleCache::vertices(std::uint64_t p, unsigned upto) { return fetch("vertex", p, 0, upto); }

ModuleSource ModuleCache::source() {
  ModuleSource s;
  s.edges = [this](std::uint64_t p, std::uint64_t q, unsigned upto) { return edges(p, q, upto); };
  s.vertices = [this](std::uint64_t p, unsigned upto) { return vertices(p, upto); };
  return s;
}

std::vector<Artifact> ModuleCache::artifacts() const {
  std::lock_guard lock(mu_);
  auto out = log_;
  std::sort(out.begin(), out.end(), [](const Artifact& a, const Artifact& b) { return a.path < b.path; });
  return out;
}

// ---------------------------------------------------------------- commands

Output guarded(const std::function<Output()>& f) {
  try {
    return f();
  } catch (const std::invalid_argument& e) {
    return {std::string("usage error: ") + e.what() + "\n", exit_code::usage};
  } catch (const MassFormulaViolation& e) {
    return {std::string("mass formula violated: ") + e.what() + "\n", exit_code::mass};
  } catch (const DegreeCapExceeded& e) {
    return {std::string("degree cap exceeded: ") + e.what() + "\n", exit_code::degree_cap};
  } catch (const IoError& e) {
    return {std::string("I/O error: ") + e.what() + "\n", exit_code::io};
  } catch (const fs::filesystem_error& e) {
    return {std::string("I/O error: ") + e.what() + "\n", exit_code::io};
  } catch (const std::exception& e) {
    return {std::string("error: ") + e.what() + "\n", exit_code::internal};
  }
}

Output cmd_enumerate(std::uint64_t p, Format f) {
  if (p < 5 || !is_prime(p)) throw std::invalid_argument(std::to_string(p) + " is not a prime >= 5");
  auto pts = enumerate_ss(p);  // throws MassFormulaViolation
  FieldTower tower(p, 2);
  FieldPtr f2 = tower.level(2);
  mpq_class total = 0;
  json rows = json::array();
  for (const auto& v : pts) {
    total += mpq_class(1, v.weight);
    rows.push_back({{"j", f2->to_string(v.j)}, {"weight", v.weight}});
  }
  mpq_class expect(static_cast<long>(p - 1), 12);
  total.canonicalize();
  expect.canonicalize();
  mpq_class twelfths = total * 12;
  std::string mass = twelfths.get_den() == 1 ? twelfths.get_num().get_str() + "/12" : total.get_str();
  bool ok = total == expect;
  Output out;
  if (f == Format::Json) {
    json j{{"schema_version", schema_version}, {"p", p}, {"points", rows}, {"mass", mass}, {"mass_ok", ok}};
    out.text = j.dump(2) + "\n";
  } else {
    std::ostringstream os;
    os << std::left << std::setw(16) << "j" << "weight\n";
    for (const auto& r : rows) os << std::setw(16) << r["j"].get<std::string>() << r["weight"] << "\n";
    os << "mass " << mass << (ok ? " OK" : " FAIL") << "\n";
    out.text = os.str();
  }
  out.code = ok ? exit_code::ok : exit_code::mass;
  return out;
}

Output cmd_build(const RunConfig& cfg) {
  validate_pair(cfg.p, cfg.q);
  unsigned upto = case_hecke_bound(cfg.p, cfg.q, options(cfg));
  ModuleCache cache(cfg.cache_dir);
  std::vector<GraphModule> built;
  built.push_back(cache.edges(cfg.p, cfg.q, upto));
  built.push_back(cache.edges(cfg.q, cfg.p, upto));
  cache.vertices(cfg.p, upto);
  cache.vertices(cfg.q, upto);

  json arts = json::array();
  for (const auto& a : cache.artifacts())
    arts.push_back({{"kind", a.kind}, {"p", a.p}, {"q", a.q}, {"path", a.path}, {"sha256", a.sha256}, {"status", a.status}});
  json j{{"schema_version", schema_version}, {"p", cfg.p},         {"q", cfg.q},
         {"ell_max", cfg.ell_max},         {"hecke_upto", upto}, {"artifacts", arts}};
  if (!cfg.modpoly_dir.empty()) {
    json mp = json::object();
    for (unsigned ell : {2u, 3u}) {
      fs::path path = fs::path(cfg.modpoly_dir) / ("phi" + std::to_string(ell) + ".txt");
      if (!fs::exists(path)) continue;
      ModularPolynomial phi = load_modular_polynomial(path.string());
      std::size_t bad = 0;
      for (const auto& m : built) bad += modular_polynomial_disagreements(m, phi);
      mp["phi" + std::to_string(ell)] = {{"disagreements", bad}};
    }
    j["modular_polynomials"] = mp;
  }
  Output out;
  if (cfg.format == Format::Json) {
    out.text = j.dump(2) + "\n";
  } else {
    std::ostringstream os;
    for (const auto& a : arts)
      os << std::left << std::setw(8) << a["status"].get<std::string>() << " " << a["sha256"].get<std::string>() << " "
         << a["path"].get<std::string>() << "\n";
    out.text = os.str();
  }
  return out;
}

json ideals_json(const std::vector<IdealRecord>& rows) {
  json a = json::array();
  for (const auto& r : rows) {
    const bool generic = !r.eisenstein && r.ell >= 5;
    json v;
    v["range"] = r.range_ok ? "ok" : "violated";
    if (r.in_s) {
      v["bound"] = v["mult_one"] = v["congruence"] = "in-S";
    } else {
      v["bound"] = tri(true, r.bound_ok);
      v["mult_one"] = tri(generic && r.d_p == 1 && r.d_q == 1, r.mult_one_ok);
      v["congruence"] = tri(generic && (r.d_p == 2 || r.d_q == 2), r.congruence_ok);
    }
    a.push_back({{"ell", r.ell},
                 {"degree", r.degree},
                 {"images", r.images},
                 {"eisenstein", r.eisenstein},
                 {"in_s", r.in_s},
                 {"d_p", r.d_p},
                 {"d_q", r.d_q},
                 {"h_m", r.h_m},
                 {"controllable_p", r.controllable_p},
                 {"controllable_q", r.controllable_q},
                 {"predicted_torsion_dim", r.predicted_torsion_dim},
                 {"verdicts", v}});
  }
  return a;
}

namespace {
const char* const table_columns[] = {"ell", "degree", "eisenstein", "in_s", "d_p", "d_q", "h_m", "torsion_dim",
                                     "ctrl_p", "ctrl_q", "bound", "mult_one", "congruence", "range", "images"};
}

std::string ideals_table(const json& ideals) {
  std::ostringstream os;
  for (const char* c : table_columns) os << c << (std::string(c) == "images" ? "\n" : "\t");
  auto yn = [](const json& b) { return b.get<bool>() ? "yes" : "no"; };
  for (const auto& r : ideals) {
    const auto& v = r["verdicts"];
    os << r["ell"] << "\t" << r["degree"] << "\t" << yn(r["eisenstein"]) << "\t" << yn(r["in_s"]) << "\t" << r["d_p"]
       << "\t" << r["d_q"] << "\t" << r["h_m"] << "\t" << r["predicted_torsion_dim"] << "\t" << yn(r["controllable_p"])
       << "\t" << yn(r["controllable_q"]) << "\t" << v["bound"].get<std::string>() << "\t"
       << v["mult_one"].get<std::string>() << "\t" << v["congruence"].get<std::string>() << "\t"
       << v["range"].get<std::string>() << "\t" << r["images"].get<std::string>() << "\n";
  }
  return os.str();
}

json parse_ideals_table(const std::string& table) {
  json a = json::array();
  std::istringstream in(table);
  std::string line;
  std::getline(in, line);  // header
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::size_t start = 0;
    for (int i = 0; i < 14; ++i) {
      std::size_t tab = line.find('\t', start);
      f.push_back(line.substr(start, tab - start));
      start = tab + 1;
    }
    f.push_back(line.substr(start));
    auto u = [](const std::string& s) { return std::stoul(s); };
    json v{{"bound", f[10]}, {"mult_one", f[11]}, {"congruence", f[12]}, {"range", f[13]}};
    a.push_back({{"ell", u(f[0])},
                 {"degree", u(f[1])},
                 {"eisenstein", f[2] == "yes"},
                 {"in_s", f[3] == "yes"},
                 {"d_p", u(f[4])},
                 {"d_q", u(f[5])},
                 {"h_m", u(f[6])},
                 {"predicted_torsion_dim", u(f[7])},
                 {"controllable_p", f[8] == "yes"},
                 {"controllable_q", f[9] == "yes"},
                 {"verdicts", v},
                 {"images", f[14]}});
  }
  return a;
}

json verify_report(const RunConfig& cfg, const CaseData& c) {
  json r;
  r["schema_version"] = schema_version;
  r["p"] = c.p;
  r["q"] = c.q;
  r["ell_max"] = cfg.ell_max;
  r["seed"] = cfg.seed;
  r["budget"] = budget_json(cfg.budget);

  json ranks{{"x_p_full", c.x_p_full.rank()}, {"x_q_full", c.x_q_full.rank()}, {"x_p_new", c.x_p_new.rank()},
             {"x_q_new", c.x_q_new.rank()},   {"y_p", c.y_p.rank()},           {"y_q", c.y_q.rank()},
             {"vertex_p", c.pside.vertex_rank}, {"vertex_q", c.qside.vertex_rank}};
  json masses{{"edge_p", mass_string(c.pside.edges)},
              {"edge_q", mass_string(c.qside.edges)},
              {"vertex_p", mass_string(c.pside.vertices)},
              {"vertex_q", mass_string(c.qside.vertices)}};
  r["modules"] = {{"ranks", ranks}, {"masses", masses}};

  JLWitness jl = jacquet_langlands(c);
  json cps = json::object();
  for (std::size_t i = 0; i < jl.labels.size(); ++i)
    cps[jl.labels[i]] = {{"y_q", vec(jl.charpolys[i].first)}, {"y_p", vec(jl.charpolys[i].second)}};
  r["hecke"] = {{"generators", c.generators},
                {"sturm_bound", c.sturm},
                {"hecke_upto", c.hecke_upto},
                {"sturm_saturated", c.sturm_saturated},
                {"algebra_rank", {{"full_p", c.t_full_p->rank()}, {"full_q", c.t_full_q->rank()}, {"new", c.t_new->rank()}}},
                {"charpolys", cps}};

  json ribet = json::object();
  for (char s : {'p', 'q'}) {
    RankIdentity ri = ribet_rank_identity(c, s);
    const GraphSide& g = s == 'q' ? c.pside : c.qside;
    ribet[std::string(1, s)] = {{"full", ri.full},
                                {"kernel", ri.kernel},
                                {"vertex", ri.vertex},
                                {"holds", ri.holds()},
                                {"surjection_cokernel", vec(g.surjection_cokernel)}};
  }
  r["ribet"] = ribet;
  r["component_groups"] = {{"shimura_p", vec(component_group_shimura(c, 'p').group.invariant_factors)},
                           {"shimura_q", vec(component_group_shimura(c, 'q').group.invariant_factors)},
                           {"j0_p", vec(component_group(c.x_p_full, c.pside.degree_zero.gram).group.invariant_factors)},
                           {"j0_q", vec(component_group(c.x_q_full, c.qside.degree_zero.gram).group.invariant_factors)}};

  json timings = json::object();
  json checks = json::object();
  auto timed = [&](const std::string& name, auto&& f) {
    if (!wanted(cfg, name)) return;
    auto t0 = std::chrono::steady_clock::now();
    checks[name] = f();
    timings[name] = ms_since(t0);
  };

  auto rows = controllability_report(c, cfg.ell_max);
  r["ideals"] = ideals_json(rows);

  timed("jacquet_langlands", [&] {
    Verdict v;
    v.kind = jl.agrees() ? VerdictKind::Verified : VerdictKind::FailsAt;
    v.detail = std::to_string(jl.labels.size()) + " operators compared";
    for (std::size_t i = 0; i < jl.labels.size(); ++i)
      if (jl.charpolys[i].first != jl.charpolys[i].second) v.failing_ideals.push_back(jl.labels[i]);
    return verdict_json(v);
  });
  timed("component_eisenstein", [&] { return verdict_json(verify_component_eisenstein(c, 'p')); });
  timed("component_eisenstein_q", [&] { return verdict_json(verify_component_eisenstein(c, 'q')); });
  timed("chargp", [&] { return verdict_json(verify_chargp(c, cfg.budget, cfg.seed)); });
  timed("ribexact2", [&] {
    json j;
    bool all = true;
    json roles = json::array();
    for (auto q1 : {c.q, c.p}) {
      RibExact2 e = verify_ribexact2(c, q1);
      all = all && e.verdict.kind == VerdictKind::Verified;
      json one = verdict_json(e.verdict);
      one["q1"] = e.q1;
      one["q2"] = e.q2;
      one["lhs_invariants"] = vec(e.lhs_invariants);
      one["rhs_invariants"] = vec(e.rhs_invariants);
      one["lhs_outside_s"] = vec(e.lhs_outside_s);
      one["rhs_outside_s"] = vec(e.rhs_outside_s);
      roles.push_back(one);
    }
    j["verdict"] = all ? "Verified" : "FailsAt";
    j["roles"] = roles;
    return j;
  });
  timed("thm_main_p", [&] { return verdict_json(verify_thm_main(c, 'p')); });
  timed("thm_main_q", [&] { return verdict_json(verify_thm_main(c, 'q')); });
  timed("globalmult1", [&] { return verdict_json(verify_globalmult1(c, cfg.budget, cfg.seed)); });
  timed("controllability", [&] {
    Verdict v;
    v.kind = VerdictKind::Verified;
    for (const auto& row : rows)
      if (!(row.bound_ok && row.mult_one_ok && row.congruence_ok && row.range_ok)) {
        v.kind = VerdictKind::FailsAt;
        v.failing_ideals.push_back("l=" + std::to_string(row.ell) + " " + row.images);
      }
    v.detail = std::to_string(rows.size()) + " maximal ideals";
    return verdict_json(v);
  });
  r["checks"] = checks;

  json warnings = json::array();
  for (const auto& [name, ch] : checks.items())
    if (ch["verdict"] == "Inconclusive") warnings.push_back(name + " is inconclusive within the search budget");
  r["warnings"] = warnings;
  if (cfg.timings) r["timings"] = timings;
  return r;
}

Output cmd_verify(const RunConfig& cfg) {
  validate_pair(cfg.p, cfg.q);
  for (const auto& ch : cfg.checks)
    if (ch != "all" && ch != "main" && std::find(all_checks.begin(), all_checks.end(), ch) == all_checks.end())
      throw std::invalid_argument("unknown check '" + ch + "'");
  auto t0 = std::chrono::steady_clock::now();
  ModuleCache cache(cfg.cache_dir);
  CaseData c = build_case(cfg.p, cfg.q, options(cfg), cache.source());
  double build_ms = ms_since(t0);
  json r = verify_report(cfg, c);
  if (cfg.timings) r["timings"]["build"] = build_ms;

  Output out;
  bool failed = false;
  for (const auto& [name, ch] : r["checks"].items())
    if (ch["verdict"] == "FailsAt") failed = true;
  out.code = failed ? exit_code::fails : exit_code::ok;
  out.text = cfg.format == Format::Json ? r.dump(2) + "\n" : render_verify_table(r);
  if (!r["warnings"].empty()) std::cerr << "warning: inconclusive checks present\n";
  return out;
}

Output cmd_report(const RunConfig& cfg) {
  validate_pair(cfg.p, cfg.q);
  ModuleCache cache(cfg.cache_dir);
  CaseData c = build_case(cfg.p, cfg.q, options(cfg), cache.source());
  json ideals = ideals_json(controllability_report(c, cfg.ell_max));
  Output out;
  if (cfg.format == Format::Json) {
    json j{{"schema_version", schema_version}, {"p", c.p}, {"q", c.q}, {"ell_max", cfg.ell_max}, {"ideals", ideals}};
    out.text = j.dump(2) + "\n";
  } else {
    out.text = ideals_table(ideals);
  }
  for (const auto& r : ideals)
    for (const auto& [k, v] : r["verdicts"].items())
      if (v == "violated") out.code = exit_code::fails;
  return out;
}

Output cmd_scan(const std::vector<std::pair<std::uint64_t, std::uint64_t>>& pairs, unsigned ell_max, Format f) {
  for (const auto& [p, q] : pairs) validate_pair(p, q);
  auto hits = find_higher_multiplicity(pairs, ell_max);
  json a = json::array();
  bool bad = false;
  for (const auto& h : hits) {
    json row = ideals_json({h.ideal})[0];
    row["p"] = h.p;
    row["q"] = h.q;
    bad = bad || !h.ideal.congruence_ok;
    a.push_back(row);
  }
  Output out;
  out.code = bad ? exit_code::fails : exit_code::ok;
  if (f == Format::Json) {
    json j{{"schema_version", schema_version}, {"ell_max", ell_max}, {"hits", a}};
    out.text = j.dump(2) + "\n";
  } else {
    std::ostringstream os;
    os << a.size() << " hits\n";
    for (const auto& r : a)
      os << "p=" << r["p"] << " q=" << r["q"] << " l=" << r["ell"] << " d_p=" << r["d_p"] << " d_q=" << r["d_q"]
         << " h_m=" << r["h_m"] << " " << r["images"].get<std::string>() << "\n";
    out.text = os.str();
  }
  return out;
}

}  // namespace isochar::cli
