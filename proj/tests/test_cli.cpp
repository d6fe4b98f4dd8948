#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const fs::path& work() {
  static fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / "fusionforge-cli-test";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

struct RunResult {
  int exit = -1;
  std::string out, err;
};

RunResult run(const std::string& args) {
  static int n = 0;
  const char* bin = std::getenv("FUSIONFORGE_BIN");
  REQUIRE_MESSAGE(bin != nullptr, "FUSIONFORGE_BIN must point at the built binary");
  fs::path o = work() / ("stdout." + std::to_string(n));
  fs::path e = work() / ("stderr." + std::to_string(n));
  ++n;
  std::string cmd = std::string(bin) + " " + args + " > " + o.string() + " 2> " + e.string();
  int rc = std::system(cmd.c_str());
  RunResult r;
  r.exit = rc == -1 ? -1 : WEXITSTATUS(rc);
  r.out = slurp(o);
  r.err = slurp(e);
  return r;
}

json report_at(const fs::path& p) {
  json doc = json::parse(slurp(p));
  REQUIRE(doc["schema"] == "fusionforge-report/1");
  return doc;
}

// Timing fields differ between runs; strip them before comparing reports.
void strip_ms(json& doc) {
  for (auto& s : doc["suites"]) s.erase("ms");
}

const json* find_check(const json& doc, const std::string& id) {
  for (const auto& s : doc["suites"])
    for (const auto& c : s["checks"])
      if (c["id"] == id) return &c;
  return nullptr;
}

}  // namespace

TEST_CASE("help and argument errors") {
  CHECK(run("--help").exit == 0);
  CHECK(run("").exit == 1);            // a subcommand is required
  CHECK(run("frobnicate").exit == 1);  // unknown subcommand
  CHECK(run("build --m 1").exit == 1); // --p is required
  CHECK(run("build --p 5").exit == 1); // build needs --m
}

TEST_CASE("build writes caches and a passing report") {
  fs::path c = work() / "cache-build";
  fs::path r = work() / "build.json";
  RunResult res = run("build --p 5 --m 1 --cache " + c.string() + " --out " + r.string());
  REQUIRE(res.exit == 0);

  json doc = report_at(r);
  CHECK(doc["pass"] == true);
  CHECK(doc["config"]["command"] == "build");
  CHECK(doc["config"]["p"] == 5);
  CHECK(doc["config"]["m"] == 1);

  for (const char* name : {"Q", "S", "K", "P1", "C", "D", "W"}) {
    std::string low;
    for (char ch : std::string(name)) low += static_cast<char>(std::tolower(ch));
    fs::path f = c / (low + "-p5-m1.json");
    INFO(f.string());
    CHECK(fs::exists(f));
    json cache = json::parse(slurp(f));
    CHECK(cache["schema"] == "fusionforge-cache/1");
    CHECK(cache["name"] == name);
  }
  json scache = json::parse(slurp(c / "s-p5-m1.json"));
  CHECK(scache["elements"].size() == 625);

  const json* orders = find_check(doc, "build.s-order");
  REQUIRE(orders);
  CHECK((*orders)["status"] == "pass");
  const json* rt = find_check(doc, "cache.roundtrip-s-p5-m1.json");
  REQUIRE(rt);
  CHECK((*rt)["status"] == "pass");

  // rebuilding over an existing cache is fine
  CHECK(run("build --p 5 --m 1 --cache " + c.string() + " --out " + r.string()).exit == 0);
}

TEST_CASE("build rejects a bad prime") {
  RunResult res = run("build --p 4 --m 1");
  CHECK(res.exit == 1);
  CHECK(res.err.find("invalid configuration") != std::string::npos);
}

TEST_CASE("build at p=7 m=3 skips the guarded big quotient") {
  fs::path c = work() / "cache-73";
  fs::path r = work() / "build73.json";
  RunResult res = run("build --p 7 --m 3 --cache " + c.string() + " --out " + r.string());
  REQUIRE(res.exit == 0);
  json doc = report_at(r);
  CHECK(doc["pass"] == true);
  const json* g = find_check(doc, "build.p1-guarded");
  REQUIRE(g);
  CHECK((*g)["status"] == "pass");
  CHECK(fs::exists(c / "s-p7-m3.json"));
  CHECK(!fs::exists(c / "p1-p7-m3.json"));
}

TEST_CASE("verify runs selected suites") {
  fs::path r = work() / "verify.json";
  RunResult res =
      run("verify --p 5 --m 1 --suite form,widentities --out " + r.string());
  REQUIRE(res.exit == 0);
  json doc = report_at(r);
  CHECK(doc["pass"] == true);
  REQUIRE(doc["suites"].size() == 2);
  CHECK(doc["suites"][0]["suite"] == "form");
  CHECK(doc["suites"][1]["suite"] == "widentities");
}

TEST_CASE("verify covers the order-27 exclusion at p=3") {
  fs::path r = work() / "p3.json";
  RunResult res = run("verify --p 3 --m 1 --suite p3exclusion --out " + r.string());
  REQUIRE(res.exit == 0);
  json doc = report_at(r);
  CHECK(doc["pass"] == true);
  CHECK(find_check(doc, "p3.s-is-c3wrc3") != nullptr);
}

TEST_CASE("verify with all-odd labels suites by degree") {
  fs::path r = work() / "allodd.json";
  RunResult res = run("verify --p 5 --m all-odd --suite form --out " + r.string());
  REQUIRE(res.exit == 0);
  json doc = report_at(r);
  REQUIRE(doc["suites"].size() == 2);
  CHECK(doc["suites"][0]["suite"] == "form m=1");
  CHECK(doc["suites"][1]["suite"] == "form m=3");
}

TEST_CASE("explicitly requesting an out-of-scope suite is a guard refusal") {
  RunResult res = run("verify --p 5 --m 3 --suite norm");
  CHECK(res.exit == 2);
  CHECK(res.err.find("guard refusal") != std::string::npos);
}

TEST_CASE("unknown suite names are configuration errors") {
  RunResult res = run("verify --p 5 --m 1 --suite bogus");
  CHECK(res.exit == 1);
  CHECK(res.err.find("invalid configuration") != std::string::npos);
}

TEST_CASE("reports are deterministic for a fixed configuration and seed") {
  fs::path ra = work() / "det-a.json";
  fs::path rb = work() / "det-b.json";
  std::string args = "verify --p 5 --m 1 --suite form --sample 100 --seed 9 --out ";
  REQUIRE(run(args + ra.string()).exit == 0);
  REQUIRE(run(args + rb.string()).exit == 0);
  json a = report_at(ra);
  json b = report_at(rb);
  CHECK(a["suites"][0]["note"] == "sampled with --sample 100, seed 9");
  strip_ms(a);
  strip_ms(b);
  a["config"].erase("out");
  b["config"].erase("out");
  CHECK(a == b);
}

TEST_CASE("search reports the existence verdict over the whole grid") {
  fs::path r = work() / "search.json";
  RunResult res = run("search --p 5..13 --m all-odd --out " + r.string());
  REQUIRE(res.exit == 0);
  json doc = report_at(r);
  CHECK(doc["pass"] == true);
  REQUIRE(doc["suites"].size() == 4);

  const json* e51 = find_check(doc, "exists.p5.m1");
  REQUIRE(e51);
  CHECK(std::string((*e51)["witness"]).rfind("EXISTS", 0) == 0);
  const json* e53 = find_check(doc, "exists.p5.m3");
  REQUIRE(e53);
  CHECK(std::string((*e53)["witness"]).rfind("NONE", 0) == 0);
  for (int p : {5, 7, 11, 13}) {
    const json* agg = find_check(doc, "exists.p" + std::to_string(p) + ".matches-m-p-minus-4");
    REQUIRE(agg);
    CHECK((*agg)["status"] == "pass");
  }
}

TEST_CASE("subgroup search runs at p=5 and degrades to the algebraic verdict at p=7") {
  fs::path r5 = work() / "sub5.json";
  RunResult res5 = run("search --p 5 --m 1 --subgroup-search --out " + r5.string());
  REQUIRE(res5.exit == 0);
  json doc5 = report_at(r5);
  CHECK(doc5["pass"] == true);
  const json* match = find_check(doc5, "exsearch.matches-existence");
  REQUIRE(match);
  CHECK((*match)["status"] == "pass");

  fs::path r7 = work() / "sub7.json";
  RunResult res7 = run("search --p 7 --m 3 --subgroup-search --out " + r7.string());
  REQUIRE(res7.exit == 0);
  json doc7 = report_at(r7);
  bool noted = false;
  for (const auto& s : doc7["suites"])
    if (s.contains("note") &&
        std::string(s["note"]).find("algebraic verdict only") != std::string::npos)
      noted = true;
  CHECK(noted);
}

TEST_CASE("fusion subcommand enforces its applicability guards") {
  RunResult r7 = run("fusion --p 7");
  CHECK(r7.exit == 2);
  CHECK(r7.err.find("guard refusal") != std::string::npos);
  CHECK(run("fusion --p 4").exit == 1);
  CHECK(run("fusion --p 5 --m 3").exit == 2);
}

TEST_CASE("fusion essentials check writes the system to the cache") {
  fs::path c = work() / "cache-fusion";
  fs::path r = work() / "fusion.json";
  RunResult res = run("fusion --p 5 --m 1 --check essentials --cache " + c.string() +
                      " --out " + r.string());
  REQUIRE(res.exit == 0);
  json doc = report_at(r);
  CHECK(doc["pass"] == true);
  const json* cnt = find_check(doc, "ess.main.count");
  REQUIRE(cnt);
  CHECK((*cnt)["status"] == "pass");

  fs::path f = c / "fusion-main-p5-m1.json";
  REQUIRE(fs::exists(f));
  json sys = json::parse(slurp(f));
  CHECK(sys["schema"] == "fusionforge-fusion/1");
  CHECK(sys["class_count"] == 16);
}
