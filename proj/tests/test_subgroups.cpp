#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <map>
#include <random>
#include <set>

#include "fusionforge/subgroups.hpp"

using namespace ff;

namespace {

// Shared fixture groups; built once.
const GroupSet& groups51() {
  static GroupSet gs = build_groups(5, 1);
  return gs;
}

// Brute-force subgroup test: closed under product and inverse, contains id.
bool is_subgroup(const GroupTable& g, const std::vector<u32>& elems) {
  std::set<u32> s(elems.begin(), elems.end());
  if (!s.count(g.id())) return false;
  for (u32 a : elems) {
    if (!s.count(g.inv(a))) return false;
    for (u32 b : elems)
      if (!s.count(g.mul(a, b))) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("closure produces subgroups and respects generators") {
  const GroupTable& S = *groups51().S;
  std::mt19937_64 rng(3);
  for (int i = 0; i < 25; ++i) {
    std::vector<u32> gens{static_cast<u32>(rng() % S.order()),
                          static_cast<u32>(rng() % S.order())};
    Subgroup h = closure(S, gens);
    CHECK(is_subgroup(S, h.elems));
    for (u32 x : gens) CHECK(h.contains(x));
    CHECK(S.order() % h.order() == 0);  // Lagrange
    // closure of the recomputed generators reproduces the subgroup
    Subgroup again = subgroup_from_elems(S, h.elems);
    CHECK(again.elems == h.elems);
    CHECK(closure(S, again.gens).elems == h.elems);
  }
  CHECK(trivial_subgroup(S).elems == std::vector<u32>{S.id()});
  CHECK(whole_group(S).order() == S.order());
}

TEST_CASE("centralizers, normalizers, and centers agree with brute force") {
  const GroupSet& gs = groups51();
  const GroupTable& K = *gs.K;
  Subgroup whole = whole_group(K);
  Subgroup w = subgroup_from_elems(K, gs.W_in_K);
  Subgroup d = subgroup_from_elems(K, gs.D_in_K);

  Subgroup cw = centralizer_in(whole, w);
  for (u32 g = 0; g < K.order(); ++g) {
    bool centralizes = true;
    for (u32 x : w.elems)
      if (K.conj(x, g) != x) {
        centralizes = false;
        break;
      }
    REQUIRE(cw.contains(g) == centralizes);
  }

  Subgroup nd = normalizer_in(whole, d);
  for (u32 g = 0; g < K.order(); ++g) {
    std::vector<u32> conj;
    for (u32 x : d.elems) conj.push_back(K.conj(x, g));
    std::sort(conj.begin(), conj.end());
    REQUIRE(nd.contains(g) == (conj == d.elems));
  }
  CHECK(nd.elems == gs.C_in_K);  // N_K(D) = C

  // center of S is Z(Q), order p
  Subgroup zs = center(whole_group(*gs.S));
  CHECK(zs.elems == gs.ZQ_in_S);
}

TEST_CASE("intersection, core, derived subgroup, exponent, abelianness") {
  const GroupSet& gs = groups51();
  const GroupTable& S = *gs.S;
  Subgroup q = subgroup_from_elems(S, gs.Q_in_S);
  Subgroup s0 = subgroup_from_elems(S, gs.S0_in_S);

  Subgroup meet = intersect(q, s0);
  CHECK(meet.order() == 1);

  // Q is normal in S; S_0 is not, and its S-core is trivial
  CHECK(is_normal_in(q, whole_group(S)));
  CHECK(!is_normal_in(s0, whole_group(S)));
  CHECK(core_in(whole_group(S), s0).order() == 1);
  CHECK(core_in(whole_group(S), q).elems == q.elems);

  // [Q,Q] = Z(Q); [S,S] adds the shear-moved line and has order p^2
  Subgroup der = derived_subgroup(whole_group(S));
  CHECK(der.order() == 25);
  for (u32 z : gs.ZQ_in_S) CHECK(der.contains(z));
  CHECK(derived_subgroup(q).elems == gs.ZQ_in_S);

  CHECK(exponent(whole_group(S)) == 5);
  CHECK(!is_abelian(whole_group(S)));
  CHECK(is_abelian(subgroup_from_elems(S, gs.ZQ_in_S)));
  Subgroup w0ish = subgroup_from_elems(*gs.K, gs.W_in_K);
  CHECK(is_elementary_abelian(w0ish, 5));
  CHECK(!is_elementary_abelian(q, 5));
}

TEST_CASE("conjugate subgroups and orbits carry witnesses") {
  const GroupSet& gs = groups51();
  const GroupTable& K = *gs.K;
  Subgroup d = subgroup_from_elems(K, gs.D_in_K);

  std::mt19937_64 rng(11);
  for (int i = 0; i < 20; ++i) {
    u32 x = rng() % K.order();
    Subgroup dx = conjugate_subgroup(d, x);
    CHECK(is_subgroup(K, dx.elems));
    std::vector<u32> manual;
    for (u32 e : d.elems) manual.push_back(K.conj(e, x));
    std::sort(manual.begin(), manual.end());
    CHECK(dx.elems == manual);
  }

  std::vector<u32> kgens = K.generators();
  SubgroupOrbit orb = orbit_subgroup(K, d.elems, kgens);
  CHECK(orb.members.size() == 6);  // p + 1 Sylows
  REQUIRE(orb.witness.size() == orb.members.size());
  CHECK(orb.members[0] == d.elems);
  CHECK(orb.witness[0] == K.id());
  for (size_t i = 0; i < orb.members.size(); ++i) {
    std::vector<u32> conj;
    for (u32 e : d.elems) conj.push_back(K.conj(e, orb.witness[i]));
    std::sort(conj.begin(), conj.end());
    CHECK(conj == orb.members[i]);
  }
  Subgroup nd = normalizer_in(whole_group(K), d);
  for (u32 sg : orb.stab_gens) CHECK(nd.contains(sg));
}

TEST_CASE("Sylow machinery on K") {
  const GroupSet& gs = groups51();
  const GroupTable& K = *gs.K;
  CHECK(p_part(3000, 5) == 125);
  CHECK(p_part(1, 5) == 1);
  CHECK(p_part(250, 5) == 125);
  CHECK(p_part(48, 5) == 1);

  Subgroup syl = find_sylow(K, 5);
  CHECK(syl.order() == 125);
  CHECK(is_subgroup(K, syl.elems));

  std::vector<std::vector<u32>> all = all_sylows(K, 5);
  CHECK(all.size() == 6);
  std::set<std::vector<u32>> distinct(all.begin(), all.end());
  CHECK(distinct.size() == 6);
  CHECK(distinct.count(gs.D_in_K) == 1);
  for (const auto& s : all) {
    CHECK(s.size() == 125);
    CHECK(is_subgroup(K, s));
  }
}

TEST_CASE("the lattice of D matches element-level censuses") {
  const GroupSet& gs = groups51();
  SubTable dt = materialize(*gs.K, gs.D_in_K, "D");
  const GroupTable& D = *dt.table;
  Lattice lat = enumerate_subgroups(D, 5);

  // every listed set is a subgroup; index is consistent; Lagrange holds
  std::map<u32, u32> by_order;
  for (u32 i = 0; i < lat.subs.size(); ++i) {
    const Subgroup& h = lat.subs[i];
    CHECK(is_subgroup(D, h.elems));
    CHECK(lat.at(h.elems) == i);
    CHECK(125 % h.order() == 0);
    ++by_order[h.order()];
  }

  // order-5 subgroup count equals (#order-5 elements) / 4
  u32 order5_elems = 0;
  for (u32 x = 0; x < D.order(); ++x)
    if (D.elem_order(x) == 5) ++order5_elems;
  CHECK(by_order[5] == order5_elems / 4);
  CHECK(by_order[1] == 1);
  CHECK(by_order[125] == 1);

  // exhaustive cross-check of the full census for the exponent-5 Heisenberg group
  CHECK(by_order == std::map<u32, u32>{{1, 1}, {5, 31}, {25, 6}, {125, 1}});

  // no subgroup appears twice, and every closure of a pair of elements appears
  std::set<std::vector<u32>> seen;
  for (const Subgroup& h : lat.subs) CHECK(seen.insert(h.elems).second);
  std::mt19937_64 rng(13);
  for (int i = 0; i < 40; ++i) {
    Subgroup h = closure(D, {static_cast<u32>(rng() % 125), static_cast<u32>(rng() % 125)});
    CHECK(lat.find(h.elems).has_value());
  }

  // order_cap truncates the walk
  Lattice small = enumerate_subgroups(D, 5, 25);
  CHECK(small.subs.back().order() == 25);
  CHECK(small.subs.size() == 38);  // everything except D itself
}

TEST_CASE("lattice guard and p-group validation") {
  const GroupSet& gs = groups51();
  CHECK_THROWS_AS(enumerate_subgroups(*gs.K, 5), std::invalid_argument);  // not a p-group
  CHECK_THROWS_AS(enumerate_subgroups(*gs.S, 5, 0, 100), GuardExceeded);
}

TEST_CASE("isomorphism testing separates the two order-125 types") {
  const GroupSet& gs = groups51();
  SubTable dt = materialize(*gs.K, gs.D_in_K, "D");
  SubTable qt = materialize(*gs.S, gs.Q_in_S, "Q");
  CHECK(isomorphic(*dt.table, *qt.table));  // both extraspecial p^3, exponent p
  CHECK(isomorphic(*dt.table, *dt.table));

  // cyclic group of order 5 inside S vs inside K
  SubTable zs = materialize(*gs.S, gs.ZQ_in_S, "Z");
  CHECK(zs.table->order() == 5);
  CHECK(!isomorphic(*zs.table, *dt.table));

  // an abelian order-25 group is not the nonabelian Heisenberg quotient
  SubTable wt = materialize(*gs.K, gs.W_in_K, "W");
  CHECK(is_abelian(whole_group(*wt.table)));
  CHECK(!isomorphic(*wt.table, *zs.table));

  // subgroup-pinning: Z(Q) must map onto Z(D) under some isomorphism
  Subgroup zq = center(whole_group(*qt.table));
  Subgroup zd = center(whole_group(*dt.table));
  CHECK(isomorphic(*qt.table, *dt.table, &zq.elems, &zd.elems));
}

TEST_CASE("materialized tables reproduce parent multiplication") {
  const GroupSet& gs = groups51();
  SubTable dt = materialize(*gs.K, gs.D_in_K, "D");
  const GroupTable& D = *dt.table;
  CHECK(D.order() == 125);
  std::mt19937_64 rng(17);
  for (int i = 0; i < 200; ++i) {
    u32 a = rng() % 125, b = rng() % 125;
    CHECK(dt.to_parent[D.mul(a, b)] ==
          gs.K->mul(dt.to_parent[a], dt.to_parent[b]));
    CHECK(dt.from_parent.at(dt.to_parent[a]) == a);
  }
  CHECK(dt.to_parent[D.id()] == gs.K->id());
  CHECK_THROWS_AS(materialize(*gs.K, std::vector<u32>{0, 1, 2}, "bad"),
                  std::logic_error);
}
