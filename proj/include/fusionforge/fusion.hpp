#pragma once

#include <memory>

#include "fusionforge/amalgam.hpp"

namespace ff {

// Fusion systems on the subgroup lattice of S. Morphisms are stored as image
// tables: for a morphism T -> T' the table lists, for each element of T in
// ascending id order, its image id in S. All morphisms of a generated system
// are composites of conjugation maps, so every stored table is an injective
// homomorphism by construction; verifiers re-check that from the tables alone.

// One F-conjugacy class. members are lattice ids, ascending; the class
// representative is members[0]. to_rep[i] is a morphism table members[i] ->
// rep; aut_gens are tables of generators of Aut_F(rep).
struct FusionClass {
  std::vector<u32> members;
  std::vector<std::vector<u32>> to_rep;
  std::vector<std::vector<u32>> aut_gens;
};

struct FusionSystem {
  const GroupTable* S = nullptr;
  const Lattice* lat = nullptr;
  u32 p = 0;
  u32 domain = 0;  // lattice id of the domain subgroup (all of S, or D)
  std::string name;
  std::vector<FusionClass> classes;
  std::vector<u32> class_of;  // lattice id -> class index; UINT32_MAX outside domain
};

// A group acting by conjugation through dictionaries: to_A embeds elements of
// S into the ambient table A (UINT32_MAX outside the embedded part), to_S
// maps back. gens generate the acting subgroup, whose order is ambient_order
// (the acting subgroup need not be all of A, e.g. the Borel inside P_1).
struct AmbientSide {
  std::string name;
  const GroupTable* A = nullptr;
  u64 ambient_order = 0;
  std::vector<u32> gens;
  std::vector<u32> to_A;
  std::vector<u32> to_S;
};

AmbientSide make_inner_side(const GroupTable& S);
AmbientSide make_p1_side(const GroupSet& gs);
AmbientSide make_b_side(const GroupSet& gs);
AmbientSide make_k_side(const GroupSet& gs, const AmalgamData& am);

// The fusion system of the ambient group on the subgroups of the domain:
// classes are conjugation orbits (full ambient orbits, filtered back into the
// domain), transports come from orbit witnesses, automizer generators from
// Schreier stabilizer generators. Requires the domain to be a Sylow
// p-subgroup of the acting group.
FusionSystem group_fusion(const GroupTable& S, const Lattice& lat, u32 p, u32 domain,
                          const AmbientSide& side, std::string name);

// Smallest fusion system on the first domain containing every part: merges
// the parts' classes along their transport edges and automizer loops; the
// result is independent of part order. generate({F}) reproduces F.
FusionSystem generate(const GroupTable& S, const Lattice& lat, u32 p, u32 domain,
                      const std::vector<const FusionSystem*>& parts, std::string name);

// Morphism table algebra (exposed for tests).
std::vector<u32> table_compose(const std::vector<u32>& mid_elems,
                               const std::vector<u32>& first,
                               const std::vector<u32>& then);
std::vector<u32> table_inverse(const std::vector<u32>& src_elems,
                               const std::vector<u32>& dst_elems,
                               const std::vector<u32>& img);

// Aut_F(rep) of a class, materialized by closing the generator tables under
// composition; sorted, cached per call site by the caller.
std::vector<std::vector<u32>> aut_closure(const FusionSystem& F, u32 cls);

struct SubgroupStatus {
  bool fully_normalized = false;
  bool fully_centralized = false;
  bool fully_automized = false;
  bool receptive = false;
  bool centric = false;
  bool essential = false;
};

SubgroupStatus status(const FusionSystem& F, u32 lat_id);

// Saturation via the class-wise criterion: every class has a member that is
// simultaneously fully automized and receptive. One aggregated check plus a
// class count; failures carry the first witness.
CheckList check_saturation(const FusionSystem& F);

// Indices of essential classes: centric classes whose outer automorphism
// group has order divisible by p and a disconnected Sylow-p intersection
// graph (the strongly p-embedded criterion).
std::vector<u32> essential_classes(const FusionSystem& F);
CheckList essential_report(const FusionSystem& F);

// Class-wise containment of morphism sets, and equality of systems.
bool fusion_contains(const FusionSystem& big, const FusionSystem& small);
bool fusion_equal(const FusionSystem& a, const FusionSystem& b);

// Cheap per-class facts for serialization (everything except receptivity).
struct ClassSummary {
  u32 rep = 0;          // lattice id of the representative
  u32 order = 0;        // subgroup order
  u32 size = 0;         // class size
  u64 aut_order = 0;    // |Aut_F(rep)|
  bool centric = false;
  bool rep_fully_normalized = false;
  bool rep_fully_automized = false;
  bool essential = false;
};
std::vector<ClassSummary> class_summaries(const FusionSystem& F);

// The finite facts underlying the tree argument: N_{P_1}(W_0) matches C
// through Theta with order p^3(p-1); distinct Sylow p-subgroups of K meet
// exactly in W; a subgroup of D of order at least p^2 lying in two distinct
// Sylow p-subgroups of K is W; W_0 is not normal in P_1.
CheckList finite_tree_facts(const GroupSet& gs, const AmalgamData& am);

// Everything the main fusion computation needs, built once.
struct FusionBundle {
  GroupSet gs;
  AmalgamData am;
  Lattice lat;
  u32 domain_S = 0, domain_D = 0;
  FusionSystem F_inner;  // F_S(S)
  FusionSystem F_P1;     // F_S(P_1)
  FusionSystem F_K;      // F_D(K)
  FusionSystem F;        // generate(F_P1, F_K)
};

std::unique_ptr<FusionBundle> build_fusion_main(u32 p, u32 m, const BuildGuards& guards = {});
FusionSystem build_b_variant(const FusionBundle& fb);

// Saturation of the pieces and the whole, the W_0 status facts, containments,
// idempotence, and the reported essential classes of the main system.
CheckList verify_fusion_main(const FusionBundle& fb);
// B-variant: acting-group order bookkeeping, saturation, exactly one
// essential class.
CheckList verify_b_variant(const FusionBundle& fb);

}  // namespace ff
