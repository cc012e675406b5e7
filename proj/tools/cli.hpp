#pragma once

// Command implementations shared by the isochar executable and the
// acceptance runner. Each returns the rendered output and an exit code.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <mutex>
#include <string>
#include <vector>

#include "isochar/shimura.hpp"
#include "json.hpp"

namespace isochar::cli {

namespace exit_code {
constexpr int ok = 0;
constexpr int fails = 1;
constexpr int mass = 2;
constexpr int degree_cap = 3;
constexpr int io = 4;
constexpr int internal = 70;
constexpr int usage = 64;
}  // namespace exit_code

inline constexpr int schema_version = 1;

enum class Format { Json, Table };

struct RunConfig {
  std::uint64_t p = 0;
  std::uint64_t q = 0;
  unsigned ell_max = 13;
  std::uint64_t sturm_override = 0;
  std::filesystem::path cache_dir;
  std::string modpoly_dir;
  SearchBudget budget;
  std::uint64_t seed = 42;
  Format format = Format::Json;
  std::vector<std::string> checks;  // empty: all
  bool timings = false;
};

/// --cache-dir, else $ISOCHAR_CACHE_DIR, else ./.isochar-cache
std::filesystem::path default_cache_dir();

struct Artifact {
  std::string kind;
  std::uint64_t p = 0;
  std::uint64_t q = 0;
  std::string path;
  std::string sha256;
  std::string status;  // built, cached, rebuilt
};

/// Graph modules stored as hashed text files; writes go to a temporary file
/// renamed into place. Safe to call from several threads.
class ModuleCache {
 public:
  explicit ModuleCache(std::filesystem::path dir) : dir_(std::move(dir)) {}
  GraphModule edges(std::uint64_t p, std::uint64_t q, unsigned upto);
  GraphModule vertices(std::uint64_t p, unsigned upto);
  ModuleSource source();
  std::vector<Artifact> artifacts() const;

 private:
  GraphModule fetch(const std::string& kind, std::uint64_t p, std::uint64_t q, unsigned upto);
  std::filesystem::path dir_;
  mutable std::mutex mu_;
  std::vector<Artifact> log_;
};

struct Output {
  std::string text;
  int code = exit_code::ok;
};

inline const std::vector<std::string> all_checks = {"chargp", "component_eisenstein", "component_eisenstein_q",
                                                    "controllability", "globalmult1", "jacquet_langlands",
                                                    "ribexact2", "thm_main_p", "thm_main_q"};

Output cmd_enumerate(std::uint64_t p, Format f);
Output cmd_build(const RunConfig& cfg);
Output cmd_verify(const RunConfig& cfg);
Output cmd_report(const RunConfig& cfg);
Output cmd_scan(const std::vector<std::pair<std::uint64_t, std::uint64_t>>& pairs, unsigned ell_max, Format f);

/// The verify report as JSON (no rendering, no exit code).
nlohmann::json verify_report(const RunConfig& cfg, const CaseData& c);
nlohmann::json ideals_json(const std::vector<IdealRecord>& rows);
std::string ideals_table(const nlohmann::json& ideals);
/// Inverse of ideals_table.
nlohmann::json parse_ideals_table(const std::string& table);

/// Runs f and maps library errors onto exit codes.
Output guarded(const std::function<Output()>& f);

}  // namespace isochar::cli
