#include "fusionforge/report.hpp"

#include <filesystem>
#include <fstream>

#include "json.hpp"

namespace ff {

using json = nlohmann::ordered_json;

namespace {

json checks_to_json(const CheckList& cl) {
  json arr = json::array();
  for (const Check& c : cl.items) {
    json e;
    e["id"] = c.id;
    e["status"] = c.pass ? "pass" : "fail";
    e["witness"] = c.detail;
    arr.push_back(std::move(e));
  }
  return arr;
}

std::string cache_file_name(const std::string& name, u32 p, u32 m) {
  std::string low;
  for (char ch : name) low += static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  return low + "-p" + std::to_string(p) + "-m" + std::to_string(m) + ".json";
}

json digits_q(const PolySpace& ps, u64 code) {
  QElement q = q_decode(ps, code);
  json d = json::array();
  for (u32 c : q.v) d.push_back(c);
  d.push_back(q.z);
  return d;
}

json digits_s(const PolySpace& ps, u64 code) {
  SElement s = s_decode(ps, code);
  json d = json::array();
  d.push_back(s.gamma);
  for (u32 c : s.v) d.push_back(c);
  d.push_back(s.z);
  return d;
}

json digits_p1(const PolySpace& ps, u64 code) {
  PElement x = p1_decode(ps, code);
  json d = json::array();
  d.push_back(x.l.t);
  for (u32 c : x.l.a) d.push_back(c);
  for (u32 c : x.q.v) d.push_back(c);
  d.push_back(x.q.z);
  return d;
}

json digits_k(const PrimeField& fp, u64 code) {
  Mat3 mt = k_decode(fp, code);
  json d = json::array();
  for (u32 c : mt) d.push_back(c);
  return d;
}

u64 code_q(const PolySpace& ps, const json& d) {
  QElement q;
  for (size_t i = 0; i + 1 < d.size(); ++i) q.v.push_back(d[i].get<u32>());
  q.z = d.back().get<u32>();
  return q_code(ps, q);
}

u64 code_s(const PolySpace& ps, const json& d) {
  SElement s;
  s.gamma = d[0].get<u32>();
  for (size_t i = 1; i + 1 < d.size(); ++i) s.v.push_back(d[i].get<u32>());
  s.z = d.back().get<u32>();
  return s_code(ps, s);
}

u64 code_p1(const PolySpace& ps, const json& d) {
  PElement x;
  x.l.t = d[0].get<u32>();
  for (size_t i = 0; i < 4; ++i) x.l.a[i] = d[1 + i].get<u32>();
  for (size_t i = 5; i + 1 < d.size(); ++i) x.q.v.push_back(d[i].get<u32>());
  x.q.z = d.back().get<u32>();
  return p1_code(ps, x);
}

u64 code_k(const PrimeField& fp, const json& d) {
  Mat3 mt;
  for (size_t i = 0; i < 9; ++i) mt[i] = d[i].get<u32>();
  return k_code(fp, mt);
}

// One cache document for a whole group table.
json group_doc(const GroupSet& gs, const GroupTable& g, const std::string& name,
               const std::function<json(u64)>& digits) {
  json doc;
  doc["schema"] = "fusionforge-cache/1";
  doc["p"] = gs.p;
  doc["m"] = gs.m;
  doc["name"] = name;
  json elems = json::array();
  for (u32 i = 0; i < g.order(); ++i) elems.push_back(digits(g.code(i)));
  doc["elements"] = std::move(elems);
  doc["generators"] = g.generators();
  return doc;
}

// One cache document for a distinguished subgroup of K, elements in matrix
// normal form and generators as positions in the element list.
json subset_doc(const GroupSet& gs, const std::vector<u32>& ids, const std::string& name) {
  const PrimeField fp(gs.p);
  json doc;
  doc["schema"] = "fusionforge-cache/1";
  doc["p"] = gs.p;
  doc["m"] = gs.m;
  doc["name"] = name;
  doc["parent"] = "K";
  json elems = json::array();
  for (u32 id : ids) elems.push_back(digits_k(fp, gs.K->code(id)));
  doc["elements"] = std::move(elems);
  Subgroup sub = subgroup_from_elems(*gs.K, ids);
  std::vector<u32> gpos;
  for (u32 g : sub.gens)
    gpos.push_back(static_cast<u32>(
        std::lower_bound(ids.begin(), ids.end(), g) - ids.begin()));
  doc["generators"] = gpos;
  return doc;
}

json load_doc(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cache file missing: " + path);
  json doc;
  in >> doc;
  return doc;
}

}  // namespace

void write_text_file(const std::string& path, const std::string& text) {
  std::filesystem::path fp(path);
  if (fp.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(fp.parent_path(), ec);
  }
  std::ofstream out(fp);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

std::string render_report(const RunInfo& info, const std::vector<SuiteRun>& suites) {
  json doc;
  doc["schema"] = "fusionforge-report/1";
  doc["version"] = kVersion;
  json cfg;
  cfg["command"] = info.command;
  cfg["p"] = info.p;
  cfg["m"] = info.m_all_odd ? json("all-odd") : json(info.m);
  cfg["suites"] = info.suites;
  cfg["system"] = info.system;
  cfg["sample"] = info.sample;
  cfg["seed"] = info.seed;
  cfg["out"] = info.out_path;
  cfg["cache"] = info.cache_dir;
  doc["config"] = std::move(cfg);
  bool all = true;
  json arr = json::array();
  for (const SuiteRun& s : suites) {
    all = all && s.checks.all_pass();
    json e;
    e["suite"] = s.suite;
    e["ms"] = s.ms;
    if (!s.note.empty()) e["note"] = s.note;
    e["checks"] = checks_to_json(s.checks);
    arr.push_back(std::move(e));
  }
  doc["pass"] = all;
  doc["suites"] = std::move(arr);
  return doc.dump(2) + "\n";
}

std::vector<std::string> write_group_caches(const std::string& dir, const GroupSet& gs) {
  const PolySpace& ps = *gs.ps;
  const PrimeField fp(gs.p);
  std::vector<std::pair<std::string, json>> docs;
  docs.emplace_back("Q", group_doc(gs, *gs.Q, "Q", [&](u64 c) { return digits_q(ps, c); }));
  docs.emplace_back("S", group_doc(gs, *gs.S, "S", [&](u64 c) { return digits_s(ps, c); }));
  docs.emplace_back("K", group_doc(gs, *gs.K, "K", [&](u64 c) { return digits_k(fp, c); }));
  if (gs.P1)
    docs.emplace_back("P1",
                      group_doc(gs, *gs.P1, "P1", [&](u64 c) { return digits_p1(ps, c); }));
  docs.emplace_back("C", subset_doc(gs, gs.C_in_K, "C"));
  docs.emplace_back("D", subset_doc(gs, gs.D_in_K, "D"));
  docs.emplace_back("W", subset_doc(gs, gs.W_in_K, "W"));

  std::vector<std::string> written;
  for (auto& [name, doc] : docs) {
    std::string file = cache_file_name(name, gs.p, gs.m);
    write_text_file(dir + "/" + file, doc.dump(2) + "\n");
    written.push_back(file);
  }
  return written;
}

CheckList verify_cache_roundtrip(const std::string& dir, const GroupSet& gs) {
  CheckList out;
  const PolySpace& ps = *gs.ps;
  const PrimeField fp(gs.p);

  struct Entry {
    std::string name;
    const GroupTable* table;
    std::function<u64(const json&)> encode;
  };
  std::vector<Entry> entries = {
      {"Q", gs.Q.get(), [&](const json& d) { return code_q(ps, d); }},
      {"S", gs.S.get(), [&](const json& d) { return code_s(ps, d); }},
      {"K", gs.K.get(), [&](const json& d) { return code_k(fp, d); }},
  };
  if (gs.P1) entries.push_back({"P1", gs.P1.get(), [&](const json& d) { return code_p1(ps, d); }});

  for (const Entry& e : entries) {
    json doc = load_doc(dir + "/" + cache_file_name(e.name, gs.p, gs.m));
    bool ok = doc["schema"] == "fusionforge-cache/1" && doc["p"] == gs.p && doc["m"] == gs.m &&
              doc["name"] == e.name && doc["elements"].size() == e.table->order();
    if (ok)
      for (u32 i = 0; i < e.table->order() && ok; ++i)
        ok = e.encode(doc["elements"][i]) == e.table->code(i);
    if (ok) {
      std::vector<u32> gens = doc["generators"].get<std::vector<u32>>();
      ok = gens == e.table->generators();
    }
    out.add("cache.roundtrip-" + cache_file_name(e.name, gs.p, gs.m), ok,
            ok ? "" : "element or generator mismatch");
  }

  for (const auto& [name, ids] : std::initializer_list<std::pair<std::string, const std::vector<u32>*>>{
           {"C", &gs.C_in_K}, {"D", &gs.D_in_K}, {"W", &gs.W_in_K}}) {
    json doc = load_doc(dir + "/" + cache_file_name(name, gs.p, gs.m));
    bool ok = doc["schema"] == "fusionforge-cache/1" && doc["elements"].size() == ids->size();
    if (ok) {
      std::vector<u32> back;
      for (const json& d : doc["elements"]) back.push_back(gs.K->at(code_k(fp, d)));
      std::sort(back.begin(), back.end());
      ok = back == *ids;
    }
    out.add("cache.roundtrip-" + cache_file_name(name, gs.p, gs.m), ok,
            ok ? "" : "subgroup element mismatch");
  }
  return out;
}

std::string fusion_to_json(const FusionSystem& F, u32 m) {
  std::vector<ClassSummary> sums = class_summaries(F);
  json doc;
  doc["schema"] = "fusionforge-fusion/1";
  doc["p"] = F.p;
  doc["m"] = m;
  doc["system"] = F.name;
  doc["domain_order"] = F.lat->subs[F.domain].elems.size();
  doc["class_count"] = F.classes.size();
  json classes = json::array();
  for (u32 cls = 0; cls < F.classes.size(); ++cls) {
    const FusionClass& c = F.classes[cls];
    const ClassSummary& cs = sums[cls];
    json e;
    e["rep"] = F.lat->subs[c.members[0]].elems;
    e["order"] = cs.order;
    e["size"] = cs.size;
    e["aut_order"] = cs.aut_order;
    e["centric"] = cs.centric;
    e["essential"] = cs.essential;
    e["rep_fully_normalized"] = cs.rep_fully_normalized;
    e["rep_fully_automized"] = cs.rep_fully_automized;
    json mem = json::array();
    for (u32 lid : c.members) mem.push_back(F.lat->subs[lid].elems);
    e["members"] = std::move(mem);
    json gens = json::array();
    for (const auto& g : c.aut_gens) gens.push_back(g);
    e["aut_gens"] = std::move(gens);
    classes.push_back(std::move(e));
  }
  doc["classes"] = std::move(classes);
  return doc.dump(2) + "\n";
}

}  // namespace ff
