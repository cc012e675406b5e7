#include <filesystem>
#include <fstream>
#include <sstream>
#include <unistd.h>

#include "cli.hpp"
#include "doctest.h"

using namespace isochar;
using namespace isochar::cli;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() : path(fs::temp_directory_path() / ("isochar-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter()++))) {
    fs::remove_all(path);
  }
  ~TempDir() { fs::remove_all(path); }
  static int& counter() {
    static int n = 0;
    return n;
  }
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

RunConfig config(std::uint64_t p, std::uint64_t q, const fs::path& dir) {
  RunConfig c;
  c.p = p;
  c.q = q;
  c.cache_dir = dir;
  return c;
}

}  // namespace

TEST_CASE("enumerate") {
  Output t = guarded([] { return cmd_enumerate(11, Format::Table); });
  CHECK(t.code == 0);
  CHECK(t.text.find("mass 10/12 OK") != std::string::npos);
  Output j = guarded([] { return cmd_enumerate(13, Format::Json); });
  json r = json::parse(j.text);
  REQUIRE(r["points"].size() == 1);
  CHECK(r["points"][0]["j"] == "5");
  CHECK(r["schema_version"] == 1);
  CHECK(guarded([] { return cmd_enumerate(4, Format::Json); }).code == exit_code::usage);
  CHECK(guarded([] { return cmd_enumerate(3, Format::Json); }).code == exit_code::usage);
}

TEST_CASE("build is idempotent and repairs a corrupt cache") {
  TempDir d;
  RunConfig cfg = config(5, 7, d.path);
  json a = json::parse(guarded([&] { return cmd_build(cfg); }).text);
  json b = json::parse(guarded([&] { return cmd_build(cfg); }).text);
  REQUIRE(a["artifacts"].size() == 4);
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(a["artifacts"][i]["status"] == "built");
    CHECK(b["artifacts"][i]["status"] == "cached");
    CHECK(a["artifacts"][i]["sha256"] == b["artifacts"][i]["sha256"]);
  }
  // flip one byte of the body
  fs::path f = a["artifacts"][0]["path"].get<std::string>();
  std::string text = slurp(f);
  text[text.size() / 2] = text[text.size() / 2] == '1' ? '2' : '1';
  std::ofstream(f, std::ios::binary | std::ios::trunc) << text;
  json c = json::parse(guarded([&] { return cmd_build(cfg); }).text);
  CHECK(c["artifacts"][0]["status"] == "rebuilt");
  CHECK(c["artifacts"][0]["sha256"] == a["artifacts"][0]["sha256"]);
  for (const auto& e : fs::directory_iterator(d.path)) CHECK(e.path().string().find(".tmp.") == std::string::npos);
}

TEST_CASE("exit codes") {
  TempDir d;
  fs::create_directories(d.path);
  std::ofstream(d.path / "file") << "x";
  CHECK(guarded([&] { return cmd_build(config(5, 7, d.path / "file" / "sub")); }).code == exit_code::io);
  CHECK(guarded([&] { return cmd_build(config(5, 5, d.path)); }).code == exit_code::usage);
  CHECK(guarded([&] { return cmd_build(config(5, 9, d.path)); }).code == exit_code::usage);
  RunConfig bad = config(5, 7, d.path);
  bad.checks = {"nonsense"};
  CHECK(guarded([&] { return cmd_verify(bad); }).code == exit_code::usage);
}

TEST_CASE("verify matches the golden reports and is deterministic") {
  TempDir d;
  for (auto [p, q] : std::vector<std::pair<std::uint64_t, std::uint64_t>>{{11, 7}, {5, 7}}) {
    RunConfig cfg = config(p, q, d.path);
    Output a = cmd_verify(cfg);
    Output b = cmd_verify(cfg);
    CHECK(a.code == 0);
    CHECK(a.text == b.text);
    std::string golden = slurp("fixtures/golden/p" + std::to_string(p) + "_q" + std::to_string(q) + "_l13_s42.json");
    REQUIRE(!golden.empty());
    CHECK(json::parse(a.text) == json::parse(golden));
    json r = json::parse(a.text);
    for (const auto& [name, ch] : r["checks"].items()) {
      CAPTURE(name);
      CHECK(ch["verdict"] == "Verified");
    }
  }
}

TEST_CASE("budget zero is inconclusive, never failing") {
  TempDir d;
  RunConfig cfg = config(5, 7, d.path);
  cfg.checks = {"chargp", "main"};
  cfg.budget = SearchBudget::none();
  Output o = cmd_verify(cfg);
  CHECK(o.code == 0);
  json r = json::parse(o.text);
  CHECK(r["checks"]["chargp"]["verdict"] == "Inconclusive");
  CHECK(r["checks"]["thm_main_p"]["verdict"] == "Verified");
  CHECK(r["checks"]["thm_main_q"]["verdict"] == "Verified");
  CHECK(r["checks"].size() == 3);
  CHECK(!r["warnings"].empty());
  CHECK(!r.contains("timings"));
  cfg.timings = true;
  CHECK(json::parse(cmd_verify(cfg).text).contains("timings"));
}

TEST_CASE("report table and JSON carry the same data") {
  TempDir d;
  RunConfig cfg = config(11, 7, d.path);
  json j = json::parse(cmd_report(cfg).text);
  cfg.format = Format::Table;
  Output t = cmd_report(cfg);
  CHECK(t.code == 0);
  CHECK(parse_ideals_table(t.text) == j["ideals"]);
  for (const auto& r : j["ideals"]) {
    if (r["in_s"]) CHECK(r["verdicts"]["mult_one"] == "in-S");
    if (!r["in_s"] && r["d_p"] == 1 && r["d_q"] == 1) CHECK(r["h_m"] == 1);
  }
}
