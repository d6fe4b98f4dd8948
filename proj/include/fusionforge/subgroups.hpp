#pragma once

#include <map>

#include "fusionforge/groups.hpp"

namespace ff {

// A subgroup of a GroupTable: sorted element ids plus a generating set.
struct Subgroup {
  const GroupTable* g = nullptr;
  std::vector<u32> elems;  // sorted ascending
  std::vector<u32> gens;

  u32 order() const { return static_cast<u32>(elems.size()); }
  bool contains(u32 x) const {
    return std::binary_search(elems.begin(), elems.end(), x);
  }
};

Subgroup closure(const GroupTable& g, std::vector<u32> gens);
Subgroup trivial_subgroup(const GroupTable& g);
Subgroup whole_group(const GroupTable& g);
Subgroup subgroup_from_elems(const GroupTable& g, std::vector<u32> elems);  // recomputes gens

Subgroup conjugate_subgroup(const Subgroup& h, u32 x);
bool is_normal_in(const Subgroup& h, const Subgroup& amb);

// Centralizer / normalizer of `target` inside `amb` (both subgroups of the
// same table). Generator tests suffice: H^g subset H forces H^g = H.
Subgroup centralizer_in(const Subgroup& amb, const Subgroup& target);
Subgroup normalizer_in(const Subgroup& amb, const Subgroup& target);
Subgroup center(const Subgroup& h);
Subgroup intersect(const Subgroup& a, const Subgroup& b);
Subgroup core_in(const Subgroup& amb, const Subgroup& target);  // largest amb-normal subgroup of target
Subgroup derived_subgroup(const Subgroup& h);

u32 exponent(const Subgroup& h);
bool is_abelian(const Subgroup& h);
bool is_elementary_abelian(const Subgroup& h, u32 p);

// All subgroups, or those of order <= order_cap when order_cap > 0. The table
// must be a p-group for the cyclic-extension walk; guard refuses large groups.
struct Lattice {
  const GroupTable* g = nullptr;
  std::vector<Subgroup> subs;  // sorted by (order, elems lexicographically)
  std::map<std::vector<u32>, u32> index;

  u32 at(const std::vector<u32>& elems) const;
  std::optional<u32> find(const std::vector<u32>& elems) const;
};

Lattice enumerate_subgroups(const GroupTable& g, u32 p, u64 order_cap = 0,
                            u64 guard = 1'000'000);

// Conjugation orbit of a subgroup under generators of an ambient group, with
// Schreier data: witness[i] conjugates the root onto member i, and every
// stabilizer generator normalizes the root.
struct SubgroupOrbit {
  std::vector<std::vector<u32>> members;  // sorted id vectors
  std::vector<u32> witness;
  std::vector<u32> stab_gens;
};

SubgroupOrbit orbit_subgroup(const GroupTable& amb, const std::vector<u32>& root,
                             const std::vector<u32>& gens, u64 guard = 2'000'000);

// One Sylow p-subgroup by normalizer climbing, then the full conjugation orbit.
Subgroup find_sylow(const GroupTable& g, u32 p);
std::vector<std::vector<u32>> all_sylows(const GroupTable& g, u32 p);

u64 p_part(u64 n, u32 p);

// Group isomorphism test by generator-image backtracking; optionally requires
// the image of subgroup `from_sub` to be exactly `to_sub`. Intended for small
// groups (a few hundred elements).
bool isomorphic(const GroupTable& a, const GroupTable& b,
                const std::vector<u32>* from_sub = nullptr,
                const std::vector<u32>* to_sub = nullptr);

// Dense subgroup table re-indexed 0..|H|-1, with the id maps to the parent.
struct SubTable {
  std::shared_ptr<GroupTable> table;
  std::vector<u32> to_parent;
  std::unordered_map<u32, u32> from_parent;
};
SubTable materialize(const GroupTable& g, const std::vector<u32>& elems, const std::string& name);

}  // namespace ff
