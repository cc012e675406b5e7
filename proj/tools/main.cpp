#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "cli.hpp"

using namespace isochar;
using namespace isochar::cli;

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep))
    if (!item.empty()) out.push_back(item);
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Character groups of J_0(pq) and Shimura Jacobians from supersingular graphs"};
  app.require_subcommand(1);

  RunConfig cfg;
  std::string format = "json";
  std::string cache_dir;
  std::string checks = "all";
  std::size_t budget = cfg.budget.random_draws;
  std::string pairs;

  auto add_case = [&](CLI::App* sub) {
    sub->add_option("--p", cfg.p, "first prime")->required();
    sub->add_option("--q", cfg.q, "second prime")->required();
    sub->add_option("--ell-max", cfg.ell_max, "largest residue characteristic")->capture_default_str();
    sub->add_option("--sturm", cfg.sturm_override, "override the generator bound");
    sub->add_option("--cache-dir", cache_dir, "graph module cache (default $ISOCHAR_CACHE_DIR or ./.isochar-cache)");
  };
  auto add_format = [&](CLI::App* sub) {
    sub->add_option("--format", format, "json or table")->check(CLI::IsMember({"json", "table"}))->capture_default_str();
  };

  auto* enumerate = app.add_subcommand("enumerate", "supersingular points with weights and the mass check");
  enumerate->add_option("--p", cfg.p, "prime")->required();
  add_format(enumerate);

  auto* build = app.add_subcommand("build", "build and cache the graph modules for a case");
  add_case(build);
  add_format(build);
  build->add_option("--modpoly-dir", cfg.modpoly_dir, "directory with phi2.txt / phi3.txt to cross-check against");

  auto* verify = app.add_subcommand("verify", "run the verification suite");
  add_case(verify);
  add_format(verify);
  verify->add_option("--checks", checks, "comma separated, or all")->capture_default_str();
  verify->add_option("--budget", budget, "random Hom draws; 0 disables the search")->capture_default_str();
  verify->add_option("--sweep-bound", cfg.budget.sweep_bound, "max-norm of the exhaustive sweep")->capture_default_str();
  verify->add_option("--sweep-max-rank", cfg.budget.sweep_max_rank, "largest Hom rank swept")->capture_default_str();
  verify->add_option("--random-bound", cfg.budget.random_bound, "coefficient bound of random draws")->capture_default_str();
  verify->add_option("--seed", cfg.seed, "search seed")->capture_default_str();
  verify->add_flag("--timings", cfg.timings, "include wall-clock timings (breaks byte determinism)");

  auto* report = app.add_subcommand("report", "per-maximal-ideal controllability table");
  add_case(report);
  add_format(report);

  auto* scan = app.add_subcommand("scan", "look for multiplicity-two ideals over several cases");
  scan->add_option("--pairs", pairs, "list like 5:7,11:7")->required();
  scan->add_option("--ell-max", cfg.ell_max)->capture_default_str();
  add_format(scan);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : exit_code::usage;
  }

  cfg.format = format == "table" ? Format::Table : Format::Json;
  cfg.cache_dir = cache_dir.empty() ? default_cache_dir() : std::filesystem::path(cache_dir);
  if (checks != "all") cfg.checks = split(checks, ',');
  if (budget == 0) {
    cfg.budget = SearchBudget::none();
  } else {
    cfg.budget.random_draws = budget;
  }

  Output out = guarded([&]() -> Output {
    if (*enumerate) return cmd_enumerate(cfg.p, cfg.format);
    if (*build) return cmd_build(cfg);
    if (*verify) return cmd_verify(cfg);
    if (*report) return cmd_report(cfg);
    std::vector<std::pair<std::uint64_t, std::uint64_t>> ps;
    for (const auto& item : split(pairs, ',')) {
      auto pq = split(item, ':');
      if (pq.size() != 2) throw std::invalid_argument("bad pair '" + item + "'");
      ps.emplace_back(std::stoull(pq[0]), std::stoull(pq[1]));
    }
    return cmd_scan(ps, cfg.ell_max, cfg.format);
  });
  (out.code == exit_code::ok || out.code == exit_code::fails ? std::cout : std::cerr) << out.text;
  return out.code;
}
