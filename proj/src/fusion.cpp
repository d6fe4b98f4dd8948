#include "fusionforge/fusion.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <stdexcept>

namespace ff {

namespace {

u32 idx_in(const std::vector<u32>& elems, u32 x) {
  auto it = std::lower_bound(elems.begin(), elems.end(), x);
  if (it == elems.end() || *it != x)
    throw std::logic_error("fusion: element outside expected subgroup");
  return static_cast<u32>(it - elems.begin());
}

bool subset_of(const std::vector<u32>& inner, const std::vector<u32>& outer) {
  return std::includes(outer.begin(), outer.end(), inner.begin(), inner.end());
}

std::string nstr(u64 n) { return std::to_string(static_cast<unsigned long long>(n)); }

}  // namespace

std::vector<u32> table_compose(const std::vector<u32>& mid_elems,
                               const std::vector<u32>& first,
                               const std::vector<u32>& then) {
  std::vector<u32> out(first.size());
  for (size_t i = 0; i < first.size(); ++i) out[i] = then[idx_in(mid_elems, first[i])];
  return out;
}

std::vector<u32> table_inverse(const std::vector<u32>& src_elems,
                               const std::vector<u32>& dst_elems,
                               const std::vector<u32>& img) {
  std::vector<u32> out(img.size());
  for (size_t i = 0; i < img.size(); ++i) out[idx_in(dst_elems, img[i])] = src_elems[i];
  return out;
}

// ---------------------------------------------------------------------------
// Sides
// ---------------------------------------------------------------------------

AmbientSide make_inner_side(const GroupTable& S) {
  AmbientSide side;
  side.name = "S";
  side.A = &S;
  side.ambient_order = S.order();
  side.gens = S.generators();
  side.to_A.resize(S.order());
  std::iota(side.to_A.begin(), side.to_A.end(), 0);
  side.to_S = side.to_A;
  return side;
}

AmbientSide make_p1_side(const GroupSet& gs) {
  if (!gs.P1)
    throw GuardExceeded(gs.p1_skip_reason.empty() ? "P_1 unavailable" : gs.p1_skip_reason);
  AmbientSide side;
  side.name = "P1";
  side.A = gs.P1.get();
  side.ambient_order = gs.P1->order();
  side.gens = gs.P1->generators();
  side.to_A = gs.s_to_p1;
  side.to_S.assign(gs.P1->order(), UINT32_MAX);
  for (u32 sid = 0; sid < gs.s_to_p1.size(); ++sid) side.to_S[gs.s_to_p1[sid]] = sid;
  return side;
}

AmbientSide make_b_side(const GroupSet& gs) {
  AmbientSide side = make_p1_side(gs);
  side.name = "B";
  Subgroup b = subgroup_from_elems(*gs.P1, gs.B_in_P1);
  side.ambient_order = b.order();
  side.gens = b.gens;
  return side;
}

AmbientSide make_k_side(const GroupSet& gs, const AmalgamData& am) {
  if (!gs.P1)
    throw GuardExceeded(gs.p1_skip_reason.empty() ? "P_1 unavailable" : gs.p1_skip_reason);
  if (!am.theta_skip_reason.empty()) throw GuardExceeded(am.theta_skip_reason);
  AmbientSide side;
  side.name = "K";
  side.A = gs.K.get();
  side.ambient_order = gs.K->order();
  side.gens = gs.K->generators();
  std::vector<u32> p1_to_s(gs.P1->order(), UINT32_MAX);
  for (u32 sid = 0; sid < gs.s_to_p1.size(); ++sid) p1_to_s[gs.s_to_p1[sid]] = sid;
  side.to_A.assign(gs.S->order(), UINT32_MAX);
  for (u32 sid = 0; sid < gs.s_to_p1.size(); ++sid) {
    u32 kid = am.theta_p1_to_k[gs.s_to_p1[sid]];
    if (kid != UINT32_MAX) side.to_A[sid] = kid;
  }
  side.to_S.assign(gs.K->order(), UINT32_MAX);
  for (u32 kid = 0; kid < gs.K->order(); ++kid) {
    u32 pid = am.theta_k_to_p1[kid];
    if (pid != UINT32_MAX && p1_to_s[pid] != UINT32_MAX) side.to_S[kid] = p1_to_s[pid];
  }
  return side;
}

// ---------------------------------------------------------------------------
// Transporter systems of an ambient group
// ---------------------------------------------------------------------------

FusionSystem group_fusion(const GroupTable& S, const Lattice& lat, u32 p, u32 domain,
                          const AmbientSide& side, std::string name) {
  FusionSystem F;
  F.S = &S;
  F.lat = &lat;
  F.p = p;
  F.domain = domain;
  F.name = std::move(name);
  const Subgroup& dom = lat.subs[domain];
  if (p_part(side.ambient_order, p) != dom.order())
    throw std::invalid_argument("group_fusion: domain is not Sylow in acting group " + side.name);
  F.class_of.assign(lat.subs.size(), UINT32_MAX);

  for (u32 li = 0; li < lat.subs.size(); ++li) {
    const Subgroup& T = lat.subs[li];
    if (!subset_of(T.elems, dom.elems)) continue;
    if (F.class_of[li] != UINT32_MAX) continue;

    std::vector<u32> rootA(T.elems.size());
    for (size_t i = 0; i < T.elems.size(); ++i) rootA[i] = side.to_A[T.elems[i]];
    std::sort(rootA.begin(), rootA.end());
    SubgroupOrbit orb = orbit_subgroup(*side.A, rootA, side.gens);

    // In-domain orbit members, each with its transport back to the root.
    std::vector<std::pair<u32, std::vector<u32>>> found;
    for (size_t oi = 0; oi < orb.members.size(); ++oi) {
      const std::vector<u32>& ma = orb.members[oi];
      std::vector<u32> ms(ma.size());
      bool ok = true;
      for (size_t i = 0; i < ma.size(); ++i) {
        u32 sid = side.to_S[ma[i]];
        if (sid == UINT32_MAX) { ok = false; break; }
        ms[i] = sid;
      }
      if (!ok) continue;
      std::sort(ms.begin(), ms.end());
      if (!subset_of(ms, dom.elems)) continue;
      u32 mlid = lat.at(ms);
      u32 winv = side.A->inv(orb.witness[oi]);
      std::vector<u32> tab(ms.size());
      for (size_t i = 0; i < ms.size(); ++i)
        tab[i] = side.to_S[side.A->conj(side.to_A[ms[i]], winv)];
      found.emplace_back(mlid, std::move(tab));
    }
    std::sort(found.begin(), found.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    if (found.empty() || found.front().first != li)
      throw std::logic_error("group_fusion: orbit lost its root");

    FusionClass cls;
    for (auto& f : found) {
      F.class_of[f.first] = static_cast<u32>(F.classes.size());
      cls.members.push_back(f.first);
      cls.to_rep.push_back(std::move(f.second));
    }
    std::set<std::vector<u32>> gens;
    for (u32 s : orb.stab_gens) {
      std::vector<u32> tab(T.elems.size());
      for (size_t i = 0; i < T.elems.size(); ++i)
        tab[i] = side.to_S[side.A->conj(side.to_A[T.elems[i]], s)];
      if (tab != T.elems) gens.insert(std::move(tab));
    }
    cls.aut_gens.assign(gens.begin(), gens.end());
    F.classes.push_back(std::move(cls));
  }
  return F;
}

// ---------------------------------------------------------------------------
// Generated systems
// ---------------------------------------------------------------------------

namespace {

struct Dsu {
  std::vector<u32> parent;
  explicit Dsu(size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  u32 find(u32 x) {
    while (parent[x] != x) { parent[x] = parent[parent[x]]; x = parent[x]; }
    return x;
  }
  void unite(u32 a, u32 b) {
    a = find(a); b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

}  // namespace

FusionSystem generate(const GroupTable& S, const Lattice& lat, u32 p, u32 domain,
                      const std::vector<const FusionSystem*>& parts, std::string name) {
  const Subgroup& dom = lat.subs[domain];
  for (const FusionSystem* part : parts) {
    if (part->S != &S || part->lat != &lat)
      throw std::invalid_argument("generate: parts live on different lattices");
    if (!subset_of(lat.subs[part->domain].elems, dom.elems))
      throw std::invalid_argument("generate: part domain exceeds target domain");
  }

  // The span always includes the inner system of the domain.
  AmbientSide inner_side;
  inner_side.name = "dom";
  inner_side.A = &S;
  inner_side.ambient_order = dom.order();
  inner_side.gens = dom.gens;
  inner_side.to_A.resize(S.order());
  std::iota(inner_side.to_A.begin(), inner_side.to_A.end(), 0);
  inner_side.to_S = inner_side.to_A;
  FusionSystem inner = group_fusion(S, lat, p, domain, inner_side, name + ".dom");

  std::vector<const FusionSystem*> all;
  all.push_back(&inner);
  all.insert(all.end(), parts.begin(), parts.end());

  struct Edge {
    u32 u, v;                // lattice ids, table maps u -> v
    std::vector<u32> tab;
  };
  std::vector<Edge> edges;
  std::vector<std::pair<u32, std::vector<u32>>> loops;
  for (const FusionSystem* part : all) {
    for (const FusionClass& c : part->classes) {
      u32 rep = c.members[0];
      for (size_t i = 1; i < c.members.size(); ++i)
        edges.push_back({c.members[i], rep, c.to_rep[i]});
      for (const auto& g : c.aut_gens) loops.emplace_back(rep, g);
    }
  }

  Dsu dsu(lat.subs.size());
  for (const Edge& e : edges) dsu.unite(e.u, e.v);

  FusionSystem F;
  F.S = &S;
  F.lat = &lat;
  F.p = p;
  F.domain = domain;
  F.name = std::move(name);
  F.class_of.assign(lat.subs.size(), UINT32_MAX);

  std::map<u32, std::vector<u32>> comps;  // dsu root -> sorted member lids
  for (u32 li = 0; li < lat.subs.size(); ++li)
    if (subset_of(lat.subs[li].elems, dom.elems)) comps[dsu.find(li)].push_back(li);

  std::vector<std::vector<u32>> adj(lat.subs.size());
  for (u32 ei = 0; ei < edges.size(); ++ei) {
    adj[edges[ei].u].push_back(ei);
    adj[edges[ei].v].push_back(ei);
  }
  std::map<u32, std::vector<u32>> loops_at;
  for (u32 i = 0; i < loops.size(); ++i) loops_at[loops[i].first].push_back(i);

  for (auto& [root, members] : comps) {
    (void)root;
    u32 rep = members[0];
    const std::vector<u32>& rep_elems = lat.subs[rep].elems;

    // Spanning tree from the representative; path[v] is a table v -> rep.
    std::map<u32, std::vector<u32>> path;
    path[rep] = rep_elems;
    std::vector<u32> queue{rep};
    std::vector<bool> edge_done(edges.size(), false);
    std::set<std::vector<u32>> gens;
    for (size_t head = 0; head < queue.size(); ++head) {
      u32 x = queue[head];
      for (u32 ei : adj[x]) {
        if (edge_done[ei]) continue;
        edge_done[ei] = true;
        const Edge& e = edges[ei];
        u32 other = (e.u == x) ? e.v : e.u;
        auto it = path.find(other);
        if (it == path.end()) {
          if (e.v == x) {
            // tab: other -> x, then x -> rep
            path[other] = table_compose(lat.subs[x].elems, e.tab, path[x]);
          } else {
            // tab runs x -> other; invert it first
            std::vector<u32> back =
                table_inverse(lat.subs[x].elems, lat.subs[other].elems, e.tab);
            path[other] = table_compose(lat.subs[x].elems, back, path[x]);
          }
          queue.push_back(other);
        } else {
          // Cycle: rep -> u -> v -> rep.
          std::vector<u32> down =
              table_inverse(lat.subs[e.u].elems, rep_elems, path[e.u]);
          std::vector<u32> mid = table_compose(lat.subs[e.u].elems, down, e.tab);
          std::vector<u32> g = table_compose(lat.subs[e.v].elems, mid, path[e.v]);
          if (g != rep_elems) gens.insert(std::move(g));
        }
      }
    }
    if (path.size() != members.size())
      throw std::logic_error("generate: component not spanned");

    for (u32 v : members) {
      auto lit = loops_at.find(v);
      if (lit == loops_at.end()) continue;
      for (u32 li2 : lit->second) {
        std::vector<u32> down = table_inverse(lat.subs[v].elems, rep_elems, path[v]);
        std::vector<u32> mid = table_compose(lat.subs[v].elems, down, loops[li2].second);
        std::vector<u32> g = table_compose(lat.subs[v].elems, mid, path[v]);
        if (g != rep_elems) gens.insert(std::move(g));
      }
    }

    FusionClass cls;
    for (u32 v : members) {
      F.class_of[v] = static_cast<u32>(F.classes.size());
      cls.members.push_back(v);
      cls.to_rep.push_back(path[v]);
    }
    cls.aut_gens.assign(gens.begin(), gens.end());
    F.classes.push_back(std::move(cls));
  }
  return F;
}

// ---------------------------------------------------------------------------
// Automorphism closures and the saturation tests
// ---------------------------------------------------------------------------

std::vector<std::vector<u32>> aut_closure(const FusionSystem& F, u32 cls) {
  const FusionClass& c = F.classes[cls];
  const std::vector<u32>& elems = F.lat->subs[c.members[0]].elems;
  std::set<std::vector<u32>> seen;
  std::vector<std::vector<u32>> queue;
  seen.insert(elems);
  queue.push_back(elems);
  for (size_t head = 0; head < queue.size(); ++head) {
    for (const auto& g : c.aut_gens) {
      std::vector<u32> nxt = table_compose(elems, queue[head], g);
      if (seen.insert(nxt).second) queue.push_back(std::move(nxt));
    }
  }
  return std::vector<std::vector<u32>>(seen.begin(), seen.end());
}

namespace {

// Shared caches for the per-subgroup saturation machinery.
struct FusionCtx {
  const FusionSystem* F;
  std::map<u32, Subgroup> norm_cache, cent_cache;
  std::map<u32, std::vector<std::vector<u32>>> closure_cache;
  std::map<u32, std::set<std::vector<u32>>> autdom_cache;

  explicit FusionCtx(const FusionSystem& f) : F(&f) {}

  const Subgroup& dom() const { return F->lat->subs[F->domain]; }

  const Subgroup& norm(u32 lid) {
    auto it = norm_cache.find(lid);
    if (it == norm_cache.end())
      it = norm_cache.emplace(lid, normalizer_in(dom(), F->lat->subs[lid])).first;
    return it->second;
  }
  const Subgroup& cent(u32 lid) {
    auto it = cent_cache.find(lid);
    if (it == cent_cache.end())
      it = cent_cache.emplace(lid, centralizer_in(dom(), F->lat->subs[lid])).first;
    return it->second;
  }
  const std::vector<std::vector<u32>>& closure(u32 cls) {
    auto it = closure_cache.find(cls);
    if (it == closure_cache.end()) it = closure_cache.emplace(cls, aut_closure(*F, cls)).first;
    return it->second;
  }
  // Tables of the domain automizer N_dom(T)/C_dom(T) on T.
  const std::set<std::vector<u32>>& autdom(u32 lid) {
    auto it = autdom_cache.find(lid);
    if (it == autdom_cache.end()) {
      std::set<std::vector<u32>> tabs;
      const std::vector<u32>& te = F->lat->subs[lid].elems;
      for (u32 g : norm(lid).elems) {
        std::vector<u32> tab(te.size());
        for (size_t i = 0; i < te.size(); ++i) tab[i] = F->S->conj(te[i], g);
        tabs.insert(std::move(tab));
      }
      it = autdom_cache.emplace(lid, std::move(tabs)).first;
    }
    return it->second;
  }
};

bool member_fully_automized(FusionCtx& ctx, u32 cls, u32 mi) {
  const FusionClass& c = ctx.F->classes[cls];
  u64 aut_f = ctx.closure(cls).size();
  u64 aut_s = ctx.autdom(c.members[mi]).size();
  return p_part(aut_f, ctx.F->p) == aut_s;
}

// Every isomorphism onto members[mi] must extend to its amenable overgroup.
bool member_receptive(FusionCtx& ctx, u32 cls, u32 mi, std::string* why) {
  const FusionSystem& F = *ctx.F;
  const Lattice& lat = *F.lat;
  const FusionClass& c = F.classes[cls];
  u32 tlid = c.members[mi];
  const std::vector<u32>& te = lat.subs[tlid].elems;
  const std::vector<u32>& rep_elems = lat.subs[c.members[0]].elems;
  const std::vector<u32>& P = c.to_rep[mi];
  std::vector<u32> Pinv = table_inverse(te, rep_elems, P);
  const auto& aut_t = ctx.autdom(tlid);
  const auto& A = ctx.closure(cls);

  // Target automizer lifted to the representative.
  std::set<std::vector<u32>> ahat;
  for (const auto& s : aut_t) {
    std::vector<u32> t1 = table_compose(te, Pinv, s);
    ahat.insert(table_compose(te, t1, P));
  }

  // Left coset representatives of the lifted automizer inside Aut_F.
  std::vector<bool> used(A.size(), false);
  std::vector<u32> coset_reps;
  for (u32 i = 0; i < A.size(); ++i) {
    if (used[i]) continue;
    coset_reps.push_back(i);
    for (const auto& h : ahat) {
      std::vector<u32> prod = table_compose(rep_elems, A[i], h);
      auto it = std::lower_bound(A.begin(), A.end(), prod);
      used[it - A.begin()] = true;
    }
  }

  for (size_t ui = 0; ui < c.members.size(); ++ui) {
    u32 ulid = c.members[ui];
    const std::vector<u32>& ue = lat.subs[ulid].elems;
    for (u32 ci : coset_reps) {
      std::vector<u32> f1 = table_compose(rep_elems, c.to_rep[ui], A[ci]);
      std::vector<u32> phi = table_compose(rep_elems, f1, Pinv);  // U -> T
      std::vector<u32> phi_inv = table_inverse(ue, te, phi);

      // N_phi inside N_dom(U).
      std::vector<u32> nphi;
      for (u32 g : ctx.norm(ulid).elems) {
        std::vector<u32> tau(te.size());
        for (size_t j = 0; j < te.size(); ++j)
          tau[j] = phi[idx_in(ue, F.S->conj(phi_inv[j], g))];
        if (aut_t.count(tau)) nphi.push_back(g);
      }
      std::sort(nphi.begin(), nphi.end());
      if (nphi == ue) continue;  // nothing to extend

      u32 nlid = lat.at(nphi);
      u32 ncls = F.class_of[nlid];
      const FusionClass& nc = F.classes[ncls];
      const std::vector<u32>& nrep_elems = lat.subs[nc.members[0]].elems;
      u32 j0 = static_cast<u32>(std::lower_bound(nc.members.begin(), nc.members.end(), nlid) -
                                nc.members.begin());
      // Images of U under N_phi -> rep(N_phi), indexed into the rep ordering.
      std::vector<u32> uidx(ue.size());
      for (size_t i = 0; i < ue.size(); ++i)
        uidx[i] = idx_in(nrep_elems, nc.to_rep[j0][idx_in(nphi, ue[i])]);

      const auto& A2 = ctx.closure(ncls);
      bool extended = false;
      for (size_t mj = 0; mj < nc.members.size() && !extended; ++mj) {
        const std::vector<u32>& me = lat.subs[nc.members[mj]].elems;
        std::vector<u32> minv = table_inverse(me, nrep_elems, nc.to_rep[mj]);
        for (const auto& a2 : A2) {
          bool match = true;
          for (size_t i = 0; i < ue.size() && match; ++i)
            match = (minv[idx_in(nrep_elems, a2[uidx[i]])] == phi[i]);
          if (match) { extended = true; break; }
        }
      }
      if (!extended) {
        if (why)
          *why = "no extension of an isomorphism from subgroup " + nstr(ulid) +
                 " onto " + nstr(tlid) + " to its overgroup " + nstr(nlid);
        return false;
      }
    }
  }
  return true;
}

bool class_centric(FusionCtx& ctx, u32 cls) {
  for (u32 lid : ctx.F->classes[cls].members) {
    const Subgroup& cc = ctx.cent(lid);
    if (!subset_of(cc.elems, ctx.F->lat->subs[lid].elems)) return false;
  }
  return true;
}

u32 max_norm_order(FusionCtx& ctx, u32 cls) {
  u32 best = 0;
  for (u32 lid : ctx.F->classes[cls].members) best = std::max(best, ctx.norm(lid).order());
  return best;
}

u32 max_cent_order(FusionCtx& ctx, u32 cls) {
  u32 best = 0;
  for (u32 lid : ctx.F->classes[cls].members) best = std::max(best, ctx.cent(lid).order());
  return best;
}

// Out_F(rep) = Aut_F(rep)/Inn(rep) as an abstract table.
GroupTable out_group(FusionCtx& ctx, u32 cls) {
  const FusionSystem& F = *ctx.F;
  const FusionClass& c = F.classes[cls];
  const std::vector<u32>& re = F.lat->subs[c.members[0]].elems;
  const auto& auts = ctx.closure(cls);

  std::set<std::vector<u32>> inn;
  for (u32 x : re) {
    std::vector<u32> tab(re.size());
    for (size_t i = 0; i < re.size(); ++i) tab[i] = F.S->conj(re[i], x);
    inn.insert(std::move(tab));
  }

  auto find_aut = [&](const std::vector<u32>& t) -> u32 {
    auto it = std::lower_bound(auts.begin(), auts.end(), t);
    if (it == auts.end() || *it != t) throw std::logic_error("out_group: closure not closed");
    return static_cast<u32>(it - auts.begin());
  };

  std::vector<u32> label(auts.size(), UINT32_MAX);
  std::vector<u32> reps;
  for (u32 i = 0; i < auts.size(); ++i) {
    if (label[i] != UINT32_MAX) continue;
    u32 o = static_cast<u32>(reps.size());
    reps.push_back(i);
    for (const auto& t : inn) label[find_aut(table_compose(re, t, auts[i]))] = o;
  }

  u32 n = static_cast<u32>(reps.size());
  std::vector<u32> dense(static_cast<size_t>(n) * n);
  for (u32 a = 0; a < n; ++a)
    for (u32 b = 0; b < n; ++b)
      dense[static_cast<size_t>(a) * n + b] =
          label[find_aut(table_compose(re, auts[reps[b]], auts[reps[a]]))];
  u32 idpos = label[find_aut(re)];
  return GroupTable("Out(" + nstr(c.members[0]) + ")", n, std::move(dense), idpos);
}

bool strongly_p_embedded(const GroupTable& out, u32 p) {
  if (out.order() % p != 0) return false;
  std::vector<std::vector<u32>> syl = all_sylows(out, p);
  if (syl.size() < 2) return false;
  // Components of the graph joining Sylows with nontrivial intersection.
  std::vector<u32> comp(syl.size(), UINT32_MAX);
  u32 ncomp = 0;
  for (u32 s = 0; s < syl.size(); ++s) {
    if (comp[s] != UINT32_MAX) continue;
    comp[s] = ncomp;
    std::vector<u32> queue{s};
    for (size_t head = 0; head < queue.size(); ++head) {
      u32 x = queue[head];
      for (u32 y = 0; y < syl.size(); ++y) {
        if (comp[y] != UINT32_MAX) continue;
        std::vector<u32> meet;
        std::set_intersection(syl[x].begin(), syl[x].end(), syl[y].begin(), syl[y].end(),
                              std::back_inserter(meet));
        if (meet.size() > 1) { comp[y] = ncomp; queue.push_back(y); }
      }
    }
    ++ncomp;
  }
  return ncomp > 1;
}

}  // namespace

SubgroupStatus status(const FusionSystem& F, u32 lat_id) {
  if (lat_id >= F.class_of.size() || F.class_of[lat_id] == UINT32_MAX)
    throw std::invalid_argument("status: subgroup outside the fusion domain");
  FusionCtx ctx(F);
  u32 cls = F.class_of[lat_id];
  const FusionClass& c = F.classes[cls];
  u32 mi = static_cast<u32>(std::lower_bound(c.members.begin(), c.members.end(), lat_id) -
                            c.members.begin());
  SubgroupStatus st;
  st.fully_normalized = ctx.norm(lat_id).order() == max_norm_order(ctx, cls);
  st.fully_centralized = ctx.cent(lat_id).order() == max_cent_order(ctx, cls);
  st.fully_automized = member_fully_automized(ctx, cls, mi);
  st.receptive = member_receptive(ctx, cls, mi, nullptr);
  st.centric = class_centric(ctx, cls);
  st.essential = st.centric && st.fully_normalized;
  if (st.essential) {
    GroupTable out = out_group(ctx, cls);
    st.essential = strongly_p_embedded(out, F.p);
  }
  return st;
}

CheckList check_saturation(const FusionSystem& F) {
  CheckList out;
  const Subgroup& dom = F.lat->subs[F.domain];
  if (dom.order() > 625)
    throw GuardExceeded("check_saturation: domain order " + nstr(dom.order()) +
                        " exceeds the 5^4 guard");
  FusionCtx ctx(F);
  u32 failures = 0;
  std::string first_fail;
  for (u32 cls = 0; cls < F.classes.size(); ++cls) {
    const FusionClass& c = F.classes[cls];
    // Candidates in descending normalizer order: fully normalized members first.
    std::vector<u32> order_idx(c.members.size());
    std::iota(order_idx.begin(), order_idx.end(), 0);
    std::stable_sort(order_idx.begin(), order_idx.end(), [&](u32 a, u32 b) {
      return ctx.norm(c.members[a]).order() > ctx.norm(c.members[b]).order();
    });
    bool good = false;
    std::string why;
    for (u32 mi : order_idx) {
      if (!member_fully_automized(ctx, cls, mi)) continue;
      if (member_receptive(ctx, cls, mi, &why)) { good = true; break; }
    }
    if (!good) {
      ++failures;
      if (first_fail.empty())
        first_fail = "class of subgroup " + nstr(c.members[0]) + " (order " +
                     nstr(F.lat->subs[c.members[0]].elems.size()) + "): " +
                     (why.empty() ? "no fully automized member" : why);
    }
  }
  out.add("sat." + F.name, failures == 0,
          failures == 0 ? nstr(F.classes.size()) + " classes, each with a fully automized "
                          "receptive member"
                        : nstr(failures) + " of " + nstr(F.classes.size()) +
                          " classes fail; first: " + first_fail);
  return out;
}

std::vector<u32> essential_classes(const FusionSystem& F) {
  FusionCtx ctx(F);
  std::vector<u32> ess;
  for (u32 cls = 0; cls < F.classes.size(); ++cls) {
    if (!class_centric(ctx, cls)) continue;
    GroupTable out = out_group(ctx, cls);
    if (strongly_p_embedded(out, F.p)) ess.push_back(cls);
  }
  return ess;
}

CheckList essential_report(const FusionSystem& F) {
  CheckList out;
  FusionCtx ctx(F);
  std::vector<u32> ess = essential_classes(F);
  std::string detail;
  for (u32 cls : ess) {
    const FusionClass& c = F.classes[cls];
    GroupTable og = out_group(ctx, cls);
    if (!detail.empty()) detail += "; ";
    detail += "rep " + nstr(c.members[0]) + " order " +
              nstr(F.lat->subs[c.members[0]].elems.size()) + ", |Out| " + nstr(og.order());
  }
  out.add("ess." + F.name + ".count", true,
          nstr(ess.size()) + (detail.empty() ? "" : " (" + detail + ")"));
  return out;
}

std::vector<ClassSummary> class_summaries(const FusionSystem& F) {
  FusionCtx ctx(F);
  std::vector<ClassSummary> out;
  for (u32 cls = 0; cls < F.classes.size(); ++cls) {
    const FusionClass& c = F.classes[cls];
    ClassSummary cs;
    cs.rep = c.members[0];
    cs.order = static_cast<u32>(F.lat->subs[cs.rep].elems.size());
    cs.size = static_cast<u32>(c.members.size());
    cs.aut_order = ctx.closure(cls).size();
    cs.centric = class_centric(ctx, cls);
    cs.rep_fully_normalized = ctx.norm(cs.rep).order() == max_norm_order(ctx, cls);
    cs.rep_fully_automized = member_fully_automized(ctx, cls, 0);
    if (cs.centric) {
      GroupTable og = out_group(ctx, cls);
      cs.essential = strongly_p_embedded(og, F.p);
    }
    out.push_back(cs);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Containment and equality
// ---------------------------------------------------------------------------

bool fusion_contains(const FusionSystem& big, const FusionSystem& small) {
  if (big.S != small.S || big.lat != small.lat) return false;
  const Lattice& lat = *big.lat;
  if (!subset_of(lat.subs[small.domain].elems, lat.subs[big.domain].elems)) return false;

  std::map<u32, std::vector<std::vector<u32>>> big_closure;
  auto closure_of = [&](u32 cls) -> const std::vector<std::vector<u32>>& {
    auto it = big_closure.find(cls);
    if (it == big_closure.end()) it = big_closure.emplace(cls, aut_closure(big, cls)).first;
    return it->second;
  };
  auto in_closure = [&](u32 cls, const std::vector<u32>& t) {
    const auto& A = closure_of(cls);
    return std::binary_search(A.begin(), A.end(), t);
  };

  for (const FusionClass& c : small.classes) {
    u32 bcls = big.class_of[c.members[0]];
    if (bcls == UINT32_MAX) return false;
    const FusionClass& bc = big.classes[bcls];
    const std::vector<u32>& brep_elems = lat.subs[bc.members[0]].elems;
    // Transport from a small member into the big representative.
    auto big_path = [&](u32 lid) -> const std::vector<u32>& {
      u32 j = static_cast<u32>(std::lower_bound(bc.members.begin(), bc.members.end(), lid) -
                               bc.members.begin());
      if (j >= bc.members.size() || bc.members[j] != lid)
        throw std::logic_error("fusion_contains: member missing upstream");
      return bc.to_rep[j];
    };
    for (u32 lid : c.members)
      if (big.class_of[lid] != bcls) return false;

    u32 srep = c.members[0];
    const std::vector<u32>& sre = lat.subs[srep].elems;
    const std::vector<u32>& br = big_path(srep);
    std::vector<u32> br_inv = table_inverse(sre, brep_elems, br);
    for (const auto& g : c.aut_gens) {
      std::vector<u32> t1 = table_compose(sre, br_inv, g);
      if (!in_closure(bcls, table_compose(sre, t1, br))) return false;
    }
    for (size_t i = 0; i < c.members.size(); ++i) {
      const std::vector<u32>& me = lat.subs[c.members[i]].elems;
      std::vector<u32> down = table_inverse(me, brep_elems, big_path(c.members[i]));
      std::vector<u32> mid = table_compose(me, down, c.to_rep[i]);
      if (!in_closure(bcls, table_compose(sre, mid, br))) return false;
    }
  }
  return true;
}

bool fusion_equal(const FusionSystem& a, const FusionSystem& b) {
  if (a.S != b.S || a.lat != b.lat || a.domain != b.domain) return false;
  if (a.class_of.size() != b.class_of.size()) return false;
  for (u32 li = 0; li < a.class_of.size(); ++li) {
    bool ina = a.class_of[li] != UINT32_MAX, inb = b.class_of[li] != UINT32_MAX;
    if (ina != inb) return false;
    if (ina && a.classes[a.class_of[li]].members[0] != b.classes[b.class_of[li]].members[0])
      return false;
  }
  return fusion_contains(a, b) && fusion_contains(b, a);
}

// ---------------------------------------------------------------------------
// Tree facts
// ---------------------------------------------------------------------------

CheckList finite_tree_facts(const GroupSet& gs, const AmalgamData& am) {
  CheckList out;
  if (gs.m + 4 != gs.p)
    throw GuardExceeded("edge-stabilizer facts apply at the amalgam parameters m = p - 4");
  const PrimeField fp(gs.p);
  u64 p = gs.p;

  if (gs.P1) {
    u64 want = (p - 1);
    for (u32 i = 0; i < 3; ++i) want *= p;
    out.add("tree.n-p1-w-order", am.NW0_P1.order() == want,
            "order " + nstr(am.NW0_P1.order()));
    if (am.theta_skip_reason.empty()) {
      std::vector<u32> img;
      for (u32 id : am.NW0_P1.elems)
        if (am.theta_p1_to_k[id] != UINT32_MAX) img.push_back(am.theta_p1_to_k[id]);
      std::sort(img.begin(), img.end());
      img.erase(std::unique(img.begin(), img.end()), img.end());
      out.add("tree.n-p1-w-matches-c", img == gs.C_in_K,
              "image size " + nstr(img.size()) + " vs " + nstr(gs.C_in_K.size()));
    } else {
      out.add("tree.theta-guarded", true, am.theta_skip_reason);
    }
    out.add("tree.w-not-normal-p1",
            !is_normal_in(am.W0_P1, whole_group(*gs.P1)), "");
  } else {
    out.add("tree.p1-guarded", true, gs.p1_skip_reason);
  }

  std::vector<std::vector<u32>> syl = all_sylows(*gs.K, gs.p);
  bool pair_ok = syl.size() == p + 1;
  for (size_t i = 0; i < syl.size() && pair_ok; ++i)
    for (size_t j = i + 1; j < syl.size() && pair_ok; ++j) {
      std::vector<u32> meet;
      std::set_intersection(syl[i].begin(), syl[i].end(), syl[j].begin(), syl[j].end(),
                            std::back_inserter(meet));
      pair_ok = meet == gs.W_in_K;
    }
  out.add("tree.sylow-pairwise-w", pair_ok, nstr(syl.size()) + " Sylow subgroups");

  // Subgroups of D of order at least p^2 lying in two distinct Sylows equal W.
  SubTable dt = materialize(*gs.K, gs.D_in_K, "D");
  Lattice dlat = enumerate_subgroups(*dt.table, gs.p);
  bool two_ok = true;
  u32 candidates = 0;
  for (const Subgroup& x : dlat.subs) {
    if (x.order() < p * p) continue;
    std::vector<u32> xk(x.elems.size());
    for (size_t i = 0; i < x.elems.size(); ++i) xk[i] = dt.to_parent[x.elems[i]];
    std::sort(xk.begin(), xk.end());
    u32 homes = 0;
    for (const auto& s : syl)
      if (subset_of(xk, s)) ++homes;
    if (homes >= 2) {
      ++candidates;
      if (xk != gs.W_in_K) two_ok = false;
    }
  }
  out.add("tree.order-p2-two-sylows", two_ok && candidates == 1,
          nstr(candidates) + " subgroup(s) of order >= p^2 in two Sylows");
  return out;
}

// ---------------------------------------------------------------------------
// Main bundle
// ---------------------------------------------------------------------------

std::unique_ptr<FusionBundle> build_fusion_main(u32 p, u32 m, const BuildGuards& guards) {
  if (m + 4 != p)
    throw GuardExceeded("fusion systems are computed at the amalgam parameters m = p - 4");
  if (p != 5)
    throw GuardExceeded("fusion systems are computed at p = 5 only; larger lattices "
                        "exceed the saturation guard");
  auto fb = std::make_unique<FusionBundle>();
  fb->gs = build_groups(p, m, guards);
  fb->am = build_amalgam(fb->gs);
  fb->lat = enumerate_subgroups(*fb->gs.S, p);
  fb->domain_S = fb->lat.at(whole_group(*fb->gs.S).elems);
  fb->domain_D = fb->lat.at(fb->am.DS_S.elems);
  const GroupTable& S = *fb->gs.S;
  fb->F_inner = group_fusion(S, fb->lat, p, fb->domain_S, make_inner_side(S), "inner");
  fb->F_P1 = group_fusion(S, fb->lat, p, fb->domain_S, make_p1_side(fb->gs), "p1");
  fb->F_K = group_fusion(S, fb->lat, p, fb->domain_D, make_k_side(fb->gs, fb->am), "k");
  fb->F = generate(S, fb->lat, p, fb->domain_S, {&fb->F_P1, &fb->F_K}, "main");
  return fb;
}

FusionSystem build_b_variant(const FusionBundle& fb) {
  const GroupTable& S = *fb.gs.S;
  FusionSystem borel =
      group_fusion(S, fb.lat, fb.gs.p, fb.domain_S, make_b_side(fb.gs), "borel");
  return generate(S, fb.lat, fb.gs.p, fb.domain_S, {&borel, &fb.F_K}, "b");
}

CheckList verify_fusion_main(const FusionBundle& fb) {
  CheckList out;
  const Lattice& lat = fb.lat;
  const GroupSet& gs = fb.gs;
  u64 p = gs.p;

  for (const FusionSystem* fs : {&fb.F_inner, &fb.F_P1, &fb.F_K, &fb.F}) {
    CheckList cl = check_saturation(*fs);
    out.items.insert(out.items.end(), cl.items.begin(), cl.items.end());
  }

  u32 wlid = lat.at(fb.am.W0_S.elems);
  SubgroupStatus stw = status(fb.F, wlid);
  out.add("fusion.w-centric", stw.centric, "");
  out.add("fusion.w-fully-normalized", stw.fully_normalized,
          "|N_S(W)| = " + nstr(normalizer_in(whole_group(*gs.S), fb.am.W0_S).order()));
  out.add("fusion.w-receptive", stw.receptive, "");

  // Aut_F(W) realizes N_K(W)/C_K(W) in full.
  u32 wcls = fb.F.class_of[wlid];
  std::vector<std::vector<u32>> autw = aut_closure(fb.F, wcls);
  Subgroup w_k = subgroup_from_elems(*gs.K, gs.W_in_K);
  u64 kq = gs.K->order() / centralizer_in(whole_group(*gs.K), w_k).order();
  out.add("fusion.aut-w-order", autw.size() == kq,
          nstr(autw.size()) + " vs |K : C_K(W)| = " + nstr(kq));

  {
    // Aut_F(W) as an abstract table, compared with SL_2(p).
    u32 rep = fb.F.classes[wcls].members[0];
    const std::vector<u32>& re = lat.subs[rep].elems;
    u32 n = static_cast<u32>(autw.size());
    std::vector<u32> dense(static_cast<size_t>(n) * n);
    auto find_t = [&](const std::vector<u32>& t) {
      return static_cast<u32>(std::lower_bound(autw.begin(), autw.end(), t) - autw.begin());
    };
    for (u32 a = 0; a < n; ++a)
      for (u32 b = 0; b < n; ++b)
        dense[static_cast<size_t>(a) * n + b] = find_t(table_compose(re, autw[b], autw[a]));
    GroupTable aw("AutW", n, std::move(dense), find_t(re));

    PrimeField fp(gs.p);
    std::vector<u64> codes;
    for (u32 a = 0; a < p; ++a)
      for (u32 b = 0; b < p; ++b)
        for (u32 c = 0; c < p; ++c)
          for (u32 d = 0; d < p; ++d)
            if (mat2_det(fp, {a, b, c, d}) == 1)
              codes.push_back(((static_cast<u64>(a) * p + b) * p + c) * p + d);
    auto unpack = [pp = static_cast<u32>(p)](u64 code) {
      Mat2 mt;
      mt[3] = code % pp; code /= pp;
      mt[2] = code % pp; code /= pp;
      mt[1] = code % pp; code /= pp;
      mt[0] = static_cast<u32>(code);
      return mt;
    };
    auto pack = [pp = static_cast<u64>(p)](const Mat2& mt) {
      return ((static_cast<u64>(mt[0]) * pp + mt[1]) * pp + mt[2]) * pp + mt[3];
    };
    GroupTable sl2(
        "SL2", codes,
        [fp, unpack, pack](u64 x, u64 y) { return pack(mat2_mul(fp, unpack(x), unpack(y))); },
        [fp, unpack, pack](u64 x) { return pack(mat2_inv(fp, unpack(x))); }, pack(mat2_id()));
    out.add("fusion.aut-w-sl2", isomorphic(aw, sl2),
            "|Aut_F(W)| = " + nstr(aw.order()));
  }

  // The center: a singleton class under P_1, fused into W by the amalgam.
  u32 zlid = lat.at(gs.ZQ_in_S);
  out.add("fusion.z-singleton-p1",
          fb.F_P1.classes[fb.F_P1.class_of[zlid]].members.size() == 1, "");
  u64 zmain = fb.F.classes[fb.F.class_of[zlid]].members.size();
  out.add("fusion.z-class-grows", zmain > 1,
          "class size " + nstr(zmain));

  // Q: a singleton class whose automizer is all of P_1 over its kernel.
  u32 qlid = lat.at(gs.Q_in_S);
  u32 qcls = fb.F.class_of[qlid];
  out.add("fusion.q-singleton", fb.F.classes[qcls].members.size() == 1, "");
  std::vector<u32> q_p1(gs.Q_in_S.size());
  for (size_t i = 0; i < gs.Q_in_S.size(); ++i) q_p1[i] = gs.s_to_p1[gs.Q_in_S[i]];
  std::sort(q_p1.begin(), q_p1.end());
  Subgroup qbar = subgroup_from_elems(*gs.P1, q_p1);
  u64 qaut = gs.P1->order() / centralizer_in(whole_group(*gs.P1), qbar).order();
  out.add("fusion.aut-q-order", aut_closure(fb.F, qcls).size() == qaut,
          "|P_1 : C_P1(Q)| = " + nstr(qaut));

  out.add("fusion.contains-inner-p1", fusion_contains(fb.F_P1, fb.F_inner), "");
  out.add("fusion.contains-p1-main", fusion_contains(fb.F, fb.F_P1), "");
  out.add("fusion.contains-k-main", fusion_contains(fb.F, fb.F_K), "");

  const GroupTable& S = *gs.S;
  FusionSystem again = generate(S, lat, gs.p, fb.domain_S, {&fb.F}, "main2");
  out.add("fusion.idempotent", fusion_equal(again, fb.F), "");
  FusionSystem p1again = generate(S, lat, gs.p, fb.domain_S, {&fb.F_P1}, "p1again");
  out.add("fusion.p1-idempotent", fusion_equal(p1again, fb.F_P1), "");
  FusionSystem p1fresh =
      group_fusion(S, lat, gs.p, fb.domain_S, make_p1_side(gs), "p1fresh");
  out.add("fusion.deterministic", fusion_equal(p1fresh, fb.F_P1), "");

  {
    CheckList ess = essential_report(fb.F);
    out.items.insert(out.items.end(), ess.items.begin(), ess.items.end());
    std::vector<u32> ecls = essential_classes(fb.F);
    bool wq = false;
    for (u32 cls : ecls)
      if (cls == fb.F.class_of[wlid] || cls == qcls) wq = true;
    out.add("fusion.essential-well-formed", ecls.empty() || wq,
            "essential classes include a named subgroup: " + std::string(wq ? "yes" : "no"));
  }
  return out;
}

CheckList verify_b_variant(const FusionBundle& fb) {
  CheckList out;
  const GroupSet& gs = fb.gs;
  u64 p = gs.p;

  u64 want = (p - 1) * (p - 1);
  for (u32 i = 0; i < gs.m + 3; ++i) want *= p;
  out.add("b.order", gs.B_in_P1.size() == want,
          nstr(gs.B_in_P1.size()) + " vs (p-1)^2 p^(m+3) = " + nstr(want));

  FusionSystem fbv = build_b_variant(fb);
  CheckList sat = check_saturation(fbv);
  out.items.insert(out.items.end(), sat.items.begin(), sat.items.end());

  std::vector<u32> ess = essential_classes(fbv);
  u32 wlid = fb.lat.at(fb.am.W0_S.elems);
  std::string detail = "count " + nstr(ess.size());
  if (ess.size() == 1)
    detail += ", rep order " + nstr(fb.lat.subs[fbv.classes[ess[0]].members[0]].elems.size()) +
              (ess[0] == fbv.class_of[wlid] ? " (the W class)" : "");
  out.add("b.one-essential-class", ess.size() == 1, detail);

  out.add("b.contains-k", fusion_contains(fbv, fb.F_K), "");
  out.add("b.contained-in-main", fusion_contains(fb.F, fbv), "");
  return out;
}

}  // namespace ff
