#include "fusionforge/subgroups.hpp"

#include <algorithm>
#include <numeric>
#include <queue>
#include <set>

namespace ff {

Subgroup closure(const GroupTable& g, std::vector<u32> gens) {
  std::vector<u32> elems{g.id()};
  std::vector<char> in(g.order(), 0);
  in[g.id()] = 1;
  for (u32 x : gens)
    if (!in[x]) { in[x] = 1; elems.push_back(x); }
  for (u32 head = 0; head < elems.size(); ++head)
    for (u32 x : gens) {
      u32 nx = g.mul(elems[head], x);
      if (!in[nx]) { in[nx] = 1; elems.push_back(nx); }
    }
  std::sort(elems.begin(), elems.end());
  return {&g, std::move(elems), std::move(gens)};
}

Subgroup trivial_subgroup(const GroupTable& g) { return {&g, {g.id()}, {}}; }

Subgroup whole_group(const GroupTable& g) {
  std::vector<u32> all(g.order());
  for (u32 i = 0; i < g.order(); ++i) all[i] = i;
  return {&g, std::move(all), g.generators()};
}

Subgroup subgroup_from_elems(const GroupTable& g, std::vector<u32> elems) {
  std::sort(elems.begin(), elems.end());
  // greedy generators within the subgroup
  std::vector<u32> gens;
  Subgroup acc = trivial_subgroup(g);
  for (u32 x : elems) {
    if (acc.contains(x)) continue;
    gens.push_back(x);
    acc = closure(g, gens);
    if (acc.order() == elems.size()) break;
  }
  if (acc.elems != elems)
    throw std::logic_error("subgroup_from_elems: element set is not a subgroup of " + g.name());
  return {&g, std::move(elems), std::move(gens)};
}

Subgroup conjugate_subgroup(const Subgroup& h, u32 x) {
  const GroupTable& g = *h.g;
  std::vector<u32> elems(h.elems.size()), gens(h.gens.size());
  for (u32 i = 0; i < h.elems.size(); ++i) elems[i] = g.conj(h.elems[i], x);
  for (u32 i = 0; i < h.gens.size(); ++i) gens[i] = g.conj(h.gens[i], x);
  std::sort(elems.begin(), elems.end());
  return {&g, std::move(elems), std::move(gens)};
}

bool is_normal_in(const Subgroup& h, const Subgroup& amb) {
  const GroupTable& g = *h.g;
  for (u32 x : amb.gens.empty() ? amb.elems : amb.gens)
    for (u32 e : h.gens.empty() ? h.elems : h.gens)
      if (!h.contains(g.conj(e, x))) return false;
  return true;
}

Subgroup centralizer_in(const Subgroup& amb, const Subgroup& target) {
  const GroupTable& g = *amb.g;
  const std::vector<u32>& probe = target.gens.empty() ? target.elems : target.gens;
  std::vector<u32> elems;
  for (u32 x : amb.elems) {
    bool cen = true;
    for (u32 t : probe)
      if (g.mul(x, t) != g.mul(t, x)) { cen = false; break; }
    if (cen) elems.push_back(x);
  }
  return subgroup_from_elems(g, std::move(elems));
}

Subgroup normalizer_in(const Subgroup& amb, const Subgroup& target) {
  const GroupTable& g = *amb.g;
  const std::vector<u32>& probe = target.gens.empty() ? target.elems : target.gens;
  std::vector<u32> elems;
  for (u32 x : amb.elems) {
    bool norm = true;
    for (u32 t : probe)
      if (!target.contains(g.conj(t, x))) { norm = false; break; }
    if (norm) elems.push_back(x);
  }
  return subgroup_from_elems(g, std::move(elems));
}

Subgroup center(const Subgroup& h) { return centralizer_in(h, h); }

Subgroup intersect(const Subgroup& a, const Subgroup& b) {
  std::vector<u32> elems;
  std::set_intersection(a.elems.begin(), a.elems.end(), b.elems.begin(), b.elems.end(),
                        std::back_inserter(elems));
  return subgroup_from_elems(*a.g, std::move(elems));
}

Subgroup core_in(const Subgroup& amb, const Subgroup& target) {
  Subgroup core = target;
  bool shrunk = true;
  while (shrunk) {
    shrunk = false;
    for (u32 x : amb.gens.empty() ? amb.elems : amb.gens) {
      Subgroup cx = conjugate_subgroup(core, x);
      if (cx.elems != core.elems) {
        core = intersect(core, cx);
        shrunk = true;
      }
    }
  }
  return core;
}

Subgroup derived_subgroup(const Subgroup& h) {
  const GroupTable& g = *h.g;
  std::vector<u32> comms;
  for (u32 a : h.elems)
    for (u32 b : h.elems) comms.push_back(g.commutator(a, b));
  std::sort(comms.begin(), comms.end());
  comms.erase(std::unique(comms.begin(), comms.end()), comms.end());
  Subgroup d = closure(g, comms);
  // normal closure inside h (commutator set is h-invariant, closure suffices)
  return d;
}

u32 exponent(const Subgroup& h) {
  u32 e = 1;
  for (u32 x : h.elems) e = std::lcm(e, h.g->elem_order(x));
  return e;
}

bool is_abelian(const Subgroup& h) {
  for (u32 a : h.gens.empty() ? h.elems : h.gens)
    for (u32 b : h.gens.empty() ? h.elems : h.gens)
      if (h.g->mul(a, b) != h.g->mul(b, a)) return false;
  return true;
}

bool is_elementary_abelian(const Subgroup& h, u32 p) {
  if (!is_abelian(h)) return false;
  for (u32 x : h.elems)
    if (x != h.g->id() && h.g->elem_order(x) != p) return false;
  return true;
}

u32 Lattice::at(const std::vector<u32>& elems) const {
  auto it = index.find(elems);
  if (it == index.end()) throw std::out_of_range("Lattice: subgroup not found");
  return it->second;
}

std::optional<u32> Lattice::find(const std::vector<u32>& elems) const {
  auto it = index.find(elems);
  if (it == index.end()) return std::nullopt;
  return it->second;
}

Lattice enumerate_subgroups(const GroupTable& g, u32 p, u64 order_cap, u64 guard) {
  if (g.order() > guard)
    throw GuardExceeded("enumerate_subgroups: |G| = " + std::to_string(g.order()) +
                        " exceeds guard " + std::to_string(guard));
  if (p_part(g.order(), p) != g.order())
    throw std::invalid_argument("enumerate_subgroups: table is not a p-group");

  // Cyclic extension: every subgroup of order p^(k+1) arises from a normal
  // maximal subgroup H of order p^k as <H, x> with x in N_G(H), x^p in H.
  std::map<std::vector<u32>, u32> seen;
  std::vector<Subgroup> subs;
  auto add = [&](Subgroup s) -> bool {
    auto [it, fresh] = seen.emplace(s.elems, static_cast<u32>(subs.size()));
    if (fresh) subs.push_back(std::move(s));
    return fresh;
  };
  add(trivial_subgroup(g));

  std::vector<u32> level{0};
  while (!level.empty()) {
    std::vector<u32> next;
    for (u32 hid : level) {
      u64 target = static_cast<u64>(subs[hid].order()) * p;
      if (target > g.order()) continue;
      if (order_cap > 0 && target > order_cap) continue;
      Subgroup norm = normalizer_in(whole_group(g), subs[hid]);
      // add() grows subs and may reallocate, so work on a copy, not a reference
      Subgroup h = subs[hid];
      for (u32 x : norm.elems) {
        if (h.contains(x)) continue;
        if (!h.contains(g.pow(x, p))) continue;
        // <H, x> = union of H x^i since x normalizes H
        std::vector<u32> elems;
        elems.reserve(target);
        u32 xi = g.id();
        for (u32 i = 0; i < p; ++i) {
          for (u32 e : h.elems) elems.push_back(g.mul(e, xi));
          xi = g.mul(xi, x);
        }
        std::sort(elems.begin(), elems.end());
        elems.erase(std::unique(elems.begin(), elems.end()), elems.end());
        if (elems.size() != target)
          throw std::logic_error("enumerate_subgroups: extension size mismatch");
        std::vector<u32> gens = h.gens;
        gens.push_back(x);
        if (add({&g, std::move(elems), std::move(gens)}))
          next.push_back(static_cast<u32>(subs.size()) - 1);
      }
    }
    level = std::move(next);
  }

  Lattice lat;
  lat.g = &g;
  std::sort(subs.begin(), subs.end(), [](const Subgroup& a, const Subgroup& b) {
    if (a.elems.size() != b.elems.size()) return a.elems.size() < b.elems.size();
    return a.elems < b.elems;
  });
  lat.subs = std::move(subs);
  for (u32 i = 0; i < lat.subs.size(); ++i) lat.index[lat.subs[i].elems] = i;
  return lat;
}

SubgroupOrbit orbit_subgroup(const GroupTable& amb, const std::vector<u32>& root,
                             const std::vector<u32>& gens, u64 guard) {
  SubgroupOrbit orb;
  std::map<std::vector<u32>, u32> seen;
  orb.members.push_back(root);
  orb.witness.push_back(amb.id());
  seen[root] = 0;
  std::set<u32> stab;

  for (u32 head = 0; head < orb.members.size(); ++head) {
    for (u32 gidx : gens) {
      std::vector<u32> img(orb.members[head].size());
      u32 gi = amb.inv(gidx);
      for (u32 i = 0; i < img.size(); ++i)
        img[i] = amb.mul(amb.mul(gi, orb.members[head][i]), gidx);
      std::sort(img.begin(), img.end());
      u32 wit = amb.mul(orb.witness[head], gidx);
      auto it = seen.find(img);
      if (it == seen.end()) {
        if (orb.members.size() >= guard)
          throw GuardExceeded("orbit_subgroup: orbit exceeds guard");
        seen[img] = static_cast<u32>(orb.members.size());
        orb.members.push_back(std::move(img));
        orb.witness.push_back(wit);
      } else {
        // Schreier generator for the stabilizer of the root
        u32 n = amb.mul(wit, amb.inv(orb.witness[it->second]));
        if (n != amb.id()) stab.insert(n);
      }
    }
  }
  orb.stab_gens.assign(stab.begin(), stab.end());
  return orb;
}

u64 p_part(u64 n, u32 p) {
  u64 q = 1;
  while (n % p == 0) { n /= p; q *= p; }
  return q;
}

Subgroup find_sylow(const GroupTable& g, u32 p) {
  u64 target = p_part(g.order(), p);
  Subgroup cur = trivial_subgroup(g);
  while (cur.order() < target) {
    Subgroup n = normalizer_in(whole_group(g), cur);
    bool grown = false;
    for (u32 x : n.elems) {
      if (cur.contains(x)) continue;
      u32 ord = g.elem_order(x);
      if (p_part(ord, p) != ord) continue;
      u32 xp = g.pow(x, p);
      // replace x by a power landing in cur after p steps
      while (!cur.contains(xp)) { x = xp; xp = g.pow(x, p); }
      std::vector<u32> gens = cur.gens;
      gens.push_back(x);
      cur = closure(g, gens);
      grown = true;
      break;
    }
    if (!grown)
      throw std::logic_error("find_sylow: no extension found below Sylow order");
  }
  return cur;
}

std::vector<std::vector<u32>> all_sylows(const GroupTable& g, u32 p) {
  Subgroup syl = find_sylow(g, p);
  SubgroupOrbit orb = orbit_subgroup(g, syl.elems, g.generators());
  auto out = orb.members;
  std::sort(out.begin(), out.end());
  return out;
}

namespace {

// order-preserving backtracking over generator images
struct IsoSearch {
  const GroupTable& a;
  const GroupTable& b;
  const std::vector<u32>* from_sub;
  const std::vector<u32>* to_sub;
  std::vector<u32> agens;
  std::vector<std::vector<u32>> bcands;

  bool extend(std::vector<u32>& setgens) {
    u32 k = static_cast<u32>(setgens.size());
    if (k == agens.size()) return verify(setgens);
    for (u32 cand : bcands[k]) {
      setgens.push_back(cand);
      if (partial_ok(setgens) && extend(setgens)) return true;
      setgens.pop_back();
    }
    return false;
  }

  // builds the homomorphism determined by the generator images; false when
  // inconsistent or not bijective
  bool build_map(const std::vector<u32>& imgs, std::vector<u32>& map) const {
    map.assign(a.order(), UINT32_MAX);
    map[a.id()] = b.id();
    std::vector<u32> frontier{a.id()};
    for (u32 head = 0; head < frontier.size(); ++head) {
      u32 x = frontier[head];
      for (u32 i = 0; i < imgs.size(); ++i) {
        u32 nx = a.mul(x, agens[i]);
        u32 ny = b.mul(map[x], imgs[i]);
        if (map[nx] == UINT32_MAX) {
          map[nx] = ny;
          frontier.push_back(nx);
        } else if (map[nx] != ny) {
          return false;
        }
      }
    }
    if (frontier.size() != a.order()) return false;
    std::vector<char> hit(b.order(), 0);
    for (u32 y : map) {
      if (y == UINT32_MAX || hit[y]) return false;
      hit[y] = 1;
    }
    return true;
  }

  bool partial_ok(const std::vector<u32>& imgs) const {
    u32 k = static_cast<u32>(imgs.size());
    return b.elem_order(imgs[k - 1]) == a.elem_order(agens[k - 1]);
  }

  // Edge consistency along the full Cayley enumeration in build_map already
  // forces multiplicativity on all pairs, so a successful build is a proof.
  bool verify(const std::vector<u32>& imgs) const {
    std::vector<u32> map;
    if (!build_map(imgs, map)) return false;
    if (!from_sub) return true;
    std::vector<u32> img_sub;
    for (u32 x : *from_sub) img_sub.push_back(map[x]);
    std::sort(img_sub.begin(), img_sub.end());
    return img_sub == *to_sub;
  }
};

}  // namespace

bool isomorphic(const GroupTable& a, const GroupTable& b,
                const std::vector<u32>* from_sub, const std::vector<u32>* to_sub) {
  if (a.order() != b.order()) return false;
  IsoSearch s{a, b, from_sub, to_sub, a.generators(), {}};
  s.bcands.resize(s.agens.size());
  for (u32 i = 0; i < s.agens.size(); ++i) {
    u32 ord = a.elem_order(s.agens[i]);
    for (u32 y = 0; y < b.order(); ++y)
      if (b.elem_order(y) == ord) s.bcands[i].push_back(y);
  }
  std::vector<u32> imgs;
  return s.extend(imgs);
}

SubTable materialize(const GroupTable& g, const std::vector<u32>& elems, const std::string& name) {
  SubTable st;
  st.to_parent = elems;
  for (u32 i = 0; i < elems.size(); ++i) st.from_parent[elems[i]] = i;
  u32 n = static_cast<u32>(elems.size());
  std::vector<u32> dense(static_cast<size_t>(n) * n);
  for (u32 a = 0; a < n; ++a)
    for (u32 b = 0; b < n; ++b) {
      u32 prod = g.mul(elems[a], elems[b]);
      auto it = st.from_parent.find(prod);
      if (it == st.from_parent.end())
        throw std::logic_error("materialize: element set not closed");
      dense[static_cast<size_t>(a) * n + b] = it->second;
    }
  st.table = std::make_shared<GroupTable>(name, n, std::move(dense), st.from_parent.at(g.id()));
  return st;
}

}  // namespace ff
