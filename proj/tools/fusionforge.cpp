// fusionforge: batch driver over the library. Four subcommands share one
// option grammar; every run ends with a JSON report on stdout or --out.
// Exit codes: 0 all checks pass, 1 invalid configuration, 2 guard refusal,
// 3 at least one failed check.

#include <chrono>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "fusionforge/report.hpp"

namespace {

using namespace ff;

std::string nstr(u64 v) { return std::to_string(v); }

u64 now_ms() {
  return std::chrono::duration_cast<std::chrono::milliseconds>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

const std::vector<std::string> kAllSuites = {
    "form", "qstruct", "widentities", "norm", "prod",
    "theta", "sylowK", "treefacts", "p3exclusion"};

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ',') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

u32 parse_u32(const std::string& s, const std::string& what) {
  if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos)
    throw std::invalid_argument(what + ": expected a non-negative integer, got '" + s + "'");
  unsigned long v = std::stoul(s);
  if (v > 1'000'000) throw std::invalid_argument(what + ": value out of range: " + s);
  return static_cast<u32>(v);
}

// --p accepts a single prime, or (for search) an inclusive range "a..b" that
// selects every supported prime inside it.
std::vector<u32> parse_p(const std::string& s, bool allow_range) {
  auto dots = s.find("..");
  if (dots == std::string::npos) {
    u32 p = parse_u32(s, "--p");
    PrimeField check(p);  // validates: odd prime, 3 <= p <= 13
    return {p};
  }
  if (!allow_range)
    throw std::invalid_argument("--p: a range is only accepted by the search command");
  u32 lo = parse_u32(s.substr(0, dots), "--p");
  u32 hi = parse_u32(s.substr(dots + 2), "--p");
  if (lo > hi) throw std::invalid_argument("--p: empty range " + s);
  std::vector<u32> out;
  for (u32 p : {3u, 5u, 7u, 11u, 13u})
    if (lo <= p && p <= hi) out.push_back(p);
  if (out.empty())
    throw std::invalid_argument("--p: no supported prime in range " + s);
  return out;
}

// --m accepts a single odd value in [1, p-1] or "all-odd".
std::vector<u32> parse_m(const std::string& s, u32 p, bool* all_odd) {
  *all_odd = (s == "all-odd");
  if (*all_odd) {
    std::vector<u32> out;
    for (u32 m = 1; m <= p - 1; m += 2) out.push_back(m);
    return out;
  }
  u32 m = parse_u32(s, "--m");
  if (m % 2 == 0 || m < 1 || m > p - 1)
    throw std::invalid_argument("--m: need an odd value in [1, " + nstr(p - 1) +
                                "] or 'all-odd', got " + s);
  return {m};
}

void append(CheckList& dst, const CheckList& src) {
  dst.items.insert(dst.items.end(), src.items.begin(), src.items.end());
}

void narrate(const SuiteRun& r) {
  for (const auto& c : r.checks.items)
    std::cerr << "  [" << (c.pass ? "pass" : "FAIL") << "] " << c.id
              << (c.detail.empty() ? "" : "  (" + c.detail + ")") << "\n";
  if (!r.note.empty()) std::cerr << "  note: " << r.note << "\n";
  std::cerr << "  " << r.suite << ": " << r.ms << " ms\n";
}

int finish(const RunInfo& info, const std::vector<SuiteRun>& runs) {
  bool ok = true;
  for (const auto& r : runs) ok = ok && r.checks.all_pass();
  std::string text = render_report(info, runs);
  if (info.out_path.empty()) {
    std::cout << text << "\n";
  } else {
    write_text_file(info.out_path, text);
    std::cerr << "report written to " << info.out_path << "\n";
  }
  return ok ? 0 : 3;
}

// Shared option bundle; each subcommand registers the same grammar.
struct Opts {
  std::string p, m = "", suite = "all", system = "main", check = "all";
  std::string out, cache = "cache";
  u64 sample = 0, seed = 1;
  bool subgroup_search = false;
};

void add_common(CLI::App* sub, Opts& o, bool search) {
  sub->add_option("--p", o.p, search ? "prime in {3,5,7,11,13}, or a range a..b"
                                     : "prime in {3,5,7,11,13}")
      ->required();
  sub->add_option("--m", o.m, "odd degree in [1, p-1], or all-odd");
  sub->add_option("--suite", o.suite, "comma list of verification suites, or all");
  sub->add_option("--system", o.system, "fusion system: main or b-variant");
  sub->add_option("--check", o.check, "comma list of fusion checks, or all");
  sub->add_option("--sample", o.sample, "sample count for pair checks (0 = policy default)");
  sub->add_option("--seed", o.seed, "seed for sampled checks");
  sub->add_option("--out", o.out, "report path (default: stdout)");
  sub->add_option("--cache", o.cache, "cache directory");
  if (search)
    sub->add_flag("--subgroup-search", o.subgroup_search,
                  "also locate the distinguished subgroup class inside the lattice of S");
}

// ---------------------------------------------------------------------------
// build
// ---------------------------------------------------------------------------

int cmd_build(const Opts& o) {
  u32 p = parse_p(o.p, false)[0];
  bool all_odd = false;
  if (o.m.empty()) throw std::invalid_argument("build: --m is required");
  std::vector<u32> ms = parse_m(o.m, p, &all_odd);

  RunInfo info;
  info.command = "build";
  info.p = p;
  info.m = ms[0];
  info.m_all_odd = all_odd;
  info.out_path = o.out;
  info.cache_dir = o.cache;
  info.seed = o.seed;

  std::vector<SuiteRun> runs;
  for (u32 m : ms) {
    SuiteRun r;
    r.suite = "build m=" + nstr(m);
    u64 t0 = now_ms();
    GroupSet gs = build_groups(p, m);
    r.checks.add("build.q-order", true, nstr(gs.Q->order()));
    r.checks.add("build.s-order", true, nstr(gs.S->order()));
    r.checks.add("build.k-order", true, nstr(gs.K->order()));
    if (gs.P1)
      r.checks.add("build.p1-order", true, nstr(gs.P1->order()));
    else
      r.checks.add("build.p1-guarded", true, gs.p1_skip_reason);
    std::vector<std::string> files = write_group_caches(o.cache, gs);
    append(r.checks, verify_cache_roundtrip(o.cache, gs));
    r.ms = now_ms() - t0;
    r.note = "wrote " + nstr(files.size()) + " cache files to " + o.cache;
    narrate(r);
    runs.push_back(std::move(r));
  }
  return finish(info, runs);
}

// ---------------------------------------------------------------------------
// verify
// ---------------------------------------------------------------------------

struct LazyState {
  u32 p;
  std::map<u32, GroupSet> gs;
  std::map<u32, AmalgamData> am;

  GroupSet& group_set(u32 m) {
    auto it = gs.find(m);
    if (it == gs.end()) it = gs.emplace(m, build_groups(p, m)).first;
    return it->second;
  }
  AmalgamData& amalgam(u32 m) {
    auto it = am.find(m);
    if (it == am.end()) it = am.emplace(m, build_amalgam(group_set(m))).first;
    return it->second;
  }
};

CheckList run_suite(LazyState& st, const std::string& s, u32 m, u64 sample, u64 seed) {
  u32 p = st.p;
  if (s == "form") return verify_form(p, m, sample, seed);
  if (s == "qstruct") {
    GroupSet& gs = st.group_set(m);
    CheckList out = verify_Q_structure(gs, seed);
    append(out, verify_centralizers(gs));
    return out;
  }
  if (s == "widentities") return check_w_identities(p, m);
  if (s == "norm") return verify_normalizer(st.group_set(m), st.amalgam(m));
  if (s == "prod") return check_prod_formula(p, m, sample, seed);
  if (s == "theta") {
    CheckList out = verify_theta_struct(p, m, sample, seed);
    // Table-level checks need the enumerated P_1; keep the symbolic part when
    // the enumeration is guarded away.
    try {
      append(out, verify_theta_tables(st.group_set(m), st.amalgam(m)));
    } catch (const GuardExceeded& e) {
      out.add("theta.tables-guarded", true, e.what());
    }
    return out;
  }
  if (s == "sylowK") return sylow_structure_K(st.group_set(m));
  if (s == "treefacts") return finite_tree_facts(st.group_set(m), st.amalgam(m));
  if (s == "p3exclusion") return verify_p3_exclusion();
  throw std::invalid_argument("unknown suite: " + s);
}

int cmd_verify(const Opts& o) {
  u32 p = parse_p(o.p, false)[0];
  bool all_odd = false;
  if (o.m.empty()) throw std::invalid_argument("verify: --m is required");
  std::vector<u32> ms = parse_m(o.m, p, &all_odd);

  std::vector<std::string> sel = split_list(o.suite);
  bool explicit_sel = true;
  if (sel.empty() || std::find(sel.begin(), sel.end(), "all") != sel.end()) {
    sel = kAllSuites;
    explicit_sel = false;
  }
  for (const auto& s : sel)
    if (std::find(kAllSuites.begin(), kAllSuites.end(), s) == kAllSuites.end())
      throw std::invalid_argument("unknown suite: " + s);

  RunInfo info;
  info.command = "verify";
  info.p = p;
  info.m = ms[0];
  info.m_all_odd = all_odd;
  info.suites = explicit_sel ? o.suite : "all";
  info.sample = o.sample;
  info.seed = o.seed;
  info.out_path = o.out;
  info.cache_dir = o.cache;

  LazyState st{p, {}, {}};
  std::vector<SuiteRun> runs;
  for (u32 m : ms) {
    for (const auto& s : sel) {
      SuiteRun r;
      r.suite = ms.size() > 1 ? s + " m=" + nstr(m) : s;
      u64 t0 = now_ms();
      try {
        r.checks = run_suite(st, s, m, o.sample, o.seed);
      } catch (const GuardExceeded& e) {
        // An explicitly requested suite that cannot run is a refusal; under
        // --suite all it is recorded and skipped.
        if (explicit_sel) throw;
        r.note = std::string("skipped: ") + e.what();
      }
      r.ms = now_ms() - t0;
      if (o.sample > 0 && r.note.empty() &&
          (s == "form" || s == "prod" || s == "theta"))
        r.note = "sampled with --sample " + nstr(o.sample) + ", seed " + nstr(o.seed);
      narrate(r);
      runs.push_back(std::move(r));
    }
  }
  return finish(info, runs);
}

// ---------------------------------------------------------------------------
// search
// ---------------------------------------------------------------------------

int cmd_search(const Opts& o) {
  std::vector<u32> plist = parse_p(o.p, true);
  RunInfo info;
  info.command = "search";
  info.p = plist[0];
  info.m_all_odd = true;
  info.out_path = o.out;
  info.cache_dir = o.cache;

  std::vector<SuiteRun> runs;
  std::vector<std::pair<u32, u32>> grid;
  for (u32 p : plist) {
    bool all_odd = true;
    std::vector<u32> ms = o.m.empty() ? parse_m("all-odd", p, &all_odd)
                                      : parse_m(o.m, p, &all_odd);
    info.m_all_odd = all_odd;
    if (!all_odd) info.m = ms[0];

    SuiteRun r;
    r.suite = "search p=" + nstr(p);
    u64 t0 = now_ms();
    bool third = true, roots = true, matches = true;
    for (u32 m : ms) {
      grid.emplace_back(p, m);
      ExistenceResult er = search_existence(p, m);
      std::string detail;
      if (er.exists) {
        detail = "EXISTS, " + nstr(er.solutions) + " parameter solutions";
        if (!er.witnesses.empty()) {
          const auto& w = er.witnesses.front();
          detail += ", witness theta=" + nstr(w[0]) + " t=" + nstr(w[1]) +
                    " lambda=" + nstr(w[2]) + " mu=" + nstr(w[3]);
        }
      } else if (!er.divisibility) {
        detail = "NONE, divisibility (p-1) | (m+3) fails";
      } else if (er.excluded_p3) {
        detail = "NONE, the order-27 case is excluded";
      } else {
        detail = "NONE, " + nstr(er.unrealized.size()) + " scalars unrealized";
      }
      r.checks.add("exists.p" + nstr(p) + ".m" + nstr(m), true, detail);
      third = third && er.third_eq_consistent;
      roots = roots && er.roots_of_unity;
      bool predicted = (m + 4 == p) && !(p == 3 && m == 1);
      matches = matches && (er.exists == predicted);
      if (r.note.empty()) r.note = er.general_field_note;
    }
    r.checks.add("exists.p" + nstr(p) + ".third-eq-consistent", third);
    r.checks.add("exists.p" + nstr(p) + ".roots-of-unity", roots);
    r.checks.add("exists.p" + nstr(p) + ".matches-m-p-minus-4", matches,
                 "amalgam exists exactly at m = p - 4");
    r.ms = now_ms() - t0;
    narrate(r);
    runs.push_back(std::move(r));
  }

  if (o.subgroup_search) {
    for (auto [p, m] : grid) {
      SuiteRun r;
      r.suite = "subgroup-search p=" + nstr(p) + " m=" + nstr(m);
      u64 t0 = now_ms();
      try {
        GroupSet gs = build_groups(p, m);
        if (!gs.P1) throw GuardExceeded(gs.p1_skip_reason);
        if (gs.S->order() > 625)
          throw GuardExceeded("the subgroup search enumerates the full lattice of S; "
                              "guarded beyond |S| = 625, here " + nstr(gs.S->order()));
        Lattice lat = enumerate_subgroups(*gs.S, p);
        AmalgamData am = build_amalgam(gs);
        r.checks = existence_subgroup_search(gs, lat, am);
      } catch (const GuardExceeded& e) {
        r.note = std::string("algebraic verdict only: ") + e.what();
      }
      r.ms = now_ms() - t0;
      narrate(r);
      runs.push_back(std::move(r));
    }
  }
  return finish(info, runs);
}

// ---------------------------------------------------------------------------
// fusion
// ---------------------------------------------------------------------------

const std::vector<std::string> kAllChecks = {
    "saturation", "wcl", "containment", "idempotence", "essentials"};

CheckList fusion_block(const FusionBundle& fb, const FusionSystem& F,
                       const FusionSystem* main_sys, const std::string& block) {
  CheckList out;
  if (block == "saturation") return check_saturation(F);
  if (block == "wcl") {
    u32 wlid = fb.lat.at(fb.am.W0_S.elems);
    SubgroupStatus st = status(F, wlid);
    out.add("fusion.w-centric", st.centric);
    out.add("fusion.w-fully-normalized", st.fully_normalized);
    out.add("fusion.w-receptive", st.receptive);
    u32 wcls = F.class_of[wlid];
    out.add("fusion.aut-w-order", true,
            nstr(aut_closure(F, wcls).size()));
    return out;
  }
  if (block == "containment") {
    if (main_sys) {
      out.add("fusion.contains-k", fusion_contains(F, fb.F_K));
      out.add("fusion.contained-in-main", fusion_contains(*main_sys, F));
    } else {
      out.add("fusion.contains-inner-p1", fusion_contains(fb.F_P1, fb.F_inner));
      out.add("fusion.contains-p1-main", fusion_contains(F, fb.F_P1));
      out.add("fusion.contains-k-main", fusion_contains(F, fb.F_K));
    }
    return out;
  }
  if (block == "idempotence") {
    FusionSystem again = generate(*F.S, fb.lat, fb.gs.p, F.domain, {&F}, F.name);
    out.add("fusion.idempotent", fusion_equal(again, F));
    return out;
  }
  if (block == "essentials") return essential_report(F);
  throw std::invalid_argument("unknown fusion check: " + block);
}

int cmd_fusion(const Opts& o) {
  u32 p = parse_p(o.p, false)[0];
  bool all_odd = false;
  u32 m;
  if (o.m.empty()) {
    m = p >= 5 ? p - 4 : 1;
  } else {
    std::vector<u32> ms = parse_m(o.m, p, &all_odd);
    if (all_odd || ms.size() != 1)
      throw std::invalid_argument("fusion: --m must be a single odd value");
    m = ms[0];
  }
  if (o.system != "main" && o.system != "b-variant")
    throw std::invalid_argument("--system: expected main or b-variant, got " + o.system);

  std::vector<std::string> sel = split_list(o.check);
  bool run_all = sel.empty() || std::find(sel.begin(), sel.end(), "all") != sel.end();
  if (!run_all)
    for (const auto& s : sel)
      if (std::find(kAllChecks.begin(), kAllChecks.end(), s) == kAllChecks.end())
        throw std::invalid_argument("unknown fusion check: " + s);

  RunInfo info;
  info.command = "fusion";
  info.p = p;
  info.m = m;
  info.system = o.system;
  info.suites = run_all ? "all" : o.check;
  info.seed = o.seed;
  info.out_path = o.out;
  info.cache_dir = o.cache;

  std::cerr << "building groups, lattice, and generated fusion system at p=" << p
            << " m=" << m << " ...\n";
  std::unique_ptr<FusionBundle> fb = build_fusion_main(p, m);

  std::vector<SuiteRun> runs;
  std::optional<FusionSystem> fb_b;
  const FusionSystem* target = &fb->F;
  const FusionSystem* main_sys = nullptr;
  if (o.system == "b-variant") {
    std::cerr << "building the B-variant system ...\n";
    fb_b = build_b_variant(*fb);
    target = &*fb_b;
    main_sys = &fb->F;
  }

  if (run_all) {
    SuiteRun r;
    r.suite = o.system == "main" ? "fusion-main" : "fusion-b-variant";
    u64 t0 = now_ms();
    r.checks = o.system == "main" ? verify_fusion_main(*fb) : verify_b_variant(*fb);
    r.ms = now_ms() - t0;
    narrate(r);
    runs.push_back(std::move(r));
  } else {
    for (const auto& block : sel) {
      SuiteRun r;
      r.suite = block;
      u64 t0 = now_ms();
      r.checks = fusion_block(*fb, *target, main_sys, block);
      r.ms = now_ms() - t0;
      narrate(r);
      runs.push_back(std::move(r));
    }
  }

  std::string fpath = o.cache + "/fusion-" + o.system + "-p" + nstr(p) + "-m" + nstr(m) + ".json";
  write_text_file(fpath, fusion_to_json(*target, m));
  std::cerr << "fusion system written to " << fpath << "\n";
  return finish(info, runs);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fusionforge: group constructions, structural verification, amalgam "
               "existence search, and fusion systems over small prime fields"};
  app.require_subcommand(1);

  Opts ob, ov, os, of;
  CLI::App* cb = app.add_subcommand("build", "construct the groups at (p, m) and write caches");
  add_common(cb, ob, false);
  CLI::App* cv = app.add_subcommand("verify", "run structural verification suites");
  add_common(cv, ov, false);
  CLI::App* cs = app.add_subcommand("search", "existence verdicts over a (p, m) grid");
  add_common(cs, os, true);
  CLI::App* cf = app.add_subcommand("fusion", "compute and check fusion systems (p = 5)");
  add_common(cf, of, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (cb->parsed()) return cmd_build(ob);
    if (cv->parsed()) return cmd_verify(ov);
    if (cs->parsed()) return cmd_search(os);
    if (cf->parsed()) return cmd_fusion(of);
    return 1;
  } catch (const GuardExceeded& e) {
    std::cerr << "guard refusal: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid configuration: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
