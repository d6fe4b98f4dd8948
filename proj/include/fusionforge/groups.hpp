#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <unordered_map>

#include "fusionforge/polyspace.hpp"

namespace ff {

// ---------------------------------------------------------------------------
// Concrete elements. All groups here are encoded into u64 codes by base-p
// digit packing (most significant digit first, so numeric order on codes is
// lexicographic order on the printed normal form).
// ---------------------------------------------------------------------------

// Element (v, z) of Q = V_m x F with product
//   (v,y)(w,z) = (v + w, y + z + beta(v, w)).
struct QElement {
  PolyVec v;
  u32 z = 0;
  bool operator==(const QElement&) const = default;
};

QElement q_id(const PolySpace& ps);
QElement q_mul(const PolySpace& ps, const QElement& x, const QElement& y);
QElement q_inv(const PolySpace& ps, const QElement& x);
QElement q_commutator(const PolySpace& ps, const QElement& x, const QElement& y);
// Right action of (t, A): (v, z) -> (t (v.A), t^2 det(A)^m z).
QElement act_on_q(const PolySpace& ps, const QElement& x, const LElement& g);

u64 q_code(const PolySpace& ps, const QElement& x);
QElement q_decode(const PolySpace& ps, u64 code);

// Element of S = S_0 Q in normal form (gamma, v, z): the lower unitriangular
// shear by gamma followed by (v, z) in Q.
struct SElement {
  u32 gamma = 0;
  PolyVec v;
  u32 z = 0;
  bool operator==(const SElement&) const = default;
};

Mat2 shear(u32 gamma);
SElement s_id(const PolySpace& ps);
SElement s_mul(const PolySpace& ps, const SElement& x, const SElement& y);
SElement s_inv(const PolySpace& ps, const SElement& x);

u64 s_code(const PolySpace& ps, const SElement& x);
SElement s_decode(const PolySpace& ps, u64 code);

// Element of P = L Q, written l * q with Q normal:
//   (l1 q1)(l2 q2) = (l1 l2) (q1^{l2} q2).
struct PElement {
  LElement l;
  QElement q;
  bool operator==(const PElement&) const = default;
};

PElement p_id(const PolySpace& ps);
PElement p_mul(const PolySpace& ps, const PElement& x, const PElement& y);
PElement p_inv(const PolySpace& ps, const PElement& x);

// P_1 = P / C_L(Q) where C_L(Q) = {(u^-m, u I)} acts trivially on Q. Elements
// are stored with the canonical coset representative of the L-part: among the
// p-1 representatives (t u^-m, u A), the one whose flattened (t, A) tuple is
// lexicographically least.
LElement canonical_l(const PolySpace& ps, const LElement& l);
PElement p1_canon(const PolySpace& ps, const PElement& x);
PElement p1_mul(const PolySpace& ps, const PElement& x, const PElement& y);
PElement p1_inv(const PolySpace& ps, const PElement& x);

u64 p1_code(const PolySpace& ps, const PElement& x);
PElement p1_decode(const PolySpace& ps, u64 code);

// Row-major 3x3 matrix over F_p; the K-family lives inside SL_3 with first
// row (1, 0, 0).
using Mat3 = std::array<u32, 9>;

Mat3 mat3_id();
Mat3 mat3_mul(const PrimeField& fp, const Mat3& x, const Mat3& y);
Mat3 mat3_inv(const PrimeField& fp, const Mat3& x);  // det-1 adjugate
u32 mat3_det(const PrimeField& fp, const Mat3& x);

u64 k_code(const PrimeField& fp, const Mat3& x);  // packs the 6 variable entries
Mat3 k_decode(const PrimeField& fp, u64 code);

// ---------------------------------------------------------------------------
// GroupTable: a finite group materialized as sorted element codes with
// multiplication by callback (hash lookup) or by dense table when small.
// ---------------------------------------------------------------------------

class GroupTable {
public:
  using MulFn = std::function<u64(u64, u64)>;
  using InvFn = std::function<u64(u64)>;

  GroupTable(std::string name, std::vector<u64> codes, MulFn mul, InvFn inv,
             u64 id_code, u64 dense_limit = 2048);

  // Abstract dense constructor: elements 0..n-1 with an explicit table.
  GroupTable(std::string name, u32 n, std::vector<u32> dense, u32 id_pos);

  const std::string& name() const noexcept { return name_; }
  u32 order() const noexcept { return static_cast<u32>(codes_.size()); }
  u32 id() const noexcept { return idpos_; }

  u32 mul(u32 a, u32 b) const;
  u32 inv(u32 a) const { return invs_[a]; }
  // conj(x, g) = g^-1 x g
  u32 conj(u32 x, u32 g) const { return mul(mul(inv(g), x), g); }
  u32 commutator(u32 a, u32 b) const { return mul(mul(inv(a), inv(b)), mul(a, b)); }
  u32 pow(u32 a, u64 e) const;
  u32 elem_order(u32 a) const;

  u64 code(u32 i) const { return codes_[i]; }
  std::optional<u32> find(u64 code) const;
  u32 at(u64 code) const;  // throws if absent

  bool dense() const noexcept { return !dense_.empty(); }

  // Deterministic small generating set (greedy over ascending codes).
  const std::vector<u32>& generators() const;

  // Permutation x -> conj(x, g) over the whole table.
  std::vector<u32> conj_perm(u32 g) const;

private:
  std::string name_;
  std::vector<u64> codes_;
  std::unordered_map<u64, u32> index_;
  std::vector<u32> invs_;
  std::vector<u32> dense_;
  MulFn mulfn_;
  u32 idpos_ = 0;
  mutable std::vector<u32> gens_;
};

// ---------------------------------------------------------------------------
// The group family at (p, m): Q, S, P_1 (guarded), K, and distinguished
// subsets, all at the fixed parameters.
// ---------------------------------------------------------------------------

struct BuildGuards {
  u64 max_group_enum = 10'000'000;   // refuse full element enumeration beyond this
  u64 max_lattice_order = 1'000'000; // refuse full subgroup enumeration beyond this
  u64 dense_limit = 2048;            // dense multiplication table cutoff
};

struct GroupSet {
  u32 p = 0, m = 0;
  std::shared_ptr<const PolySpace> ps;
  std::shared_ptr<GroupTable> Q, S, K;
  std::shared_ptr<GroupTable> P1;  // null when |P_1| exceeds the guard
  std::string p1_skip_reason;

  // Distinguished subsets as sorted id vectors in the parent tables.
  std::vector<u32> S0_in_S, Q_in_S, ZQ_in_S;
  std::vector<u32> C_in_K, D_in_K, W_in_K;
  std::vector<u32> S_in_P1, B_in_P1, ZQ_in_P1;
  std::vector<u32> s_to_p1;  // S id -> P_1 id (empty when P1 absent)

  u64 order_L() const;
  u64 order_P1_expected() const;
};

GroupSet build_groups(u32 p, u32 m, const BuildGuards& guards = {});

// Structure verdicts ---------------------------------------------------------

// Z(Q) = Q' = Phi(Q) elementary abelian of order p; exponent p; |Q| = p^(m+2);
// when m = p-4 additionally |Q| = p^(p-2) and |S| = p^(p-1) with exponent p.
// Also certifies the commutator identity [x,y] = (0, 2 beta(v_x, v_y)) over
// all vector-part pairs and z-independence on sampled pairs.
CheckList verify_Q_structure(const GroupSet& gs, u64 seed = 1);

// C_L(Q) = {(u^-m, u I)}; C_Q((v,y)) = {(w,z) : beta(v,w) = 0} (exhaustive for
// |Q| <= 20000); C_Q(S_0) = {(c X^m, z)}; fixed points of every nontrivial
// shear on Q/Z(Q) coincide with C_Q(S_0)/Z(Q).
CheckList verify_centralizers(const GroupSet& gs);

// Sylow p-subgroups of K: D is one; they number p+1; pairwise intersections
// all equal W; N_K(D) = C; torus conjugation scales the unitriangular
// coordinates as (a, d, e) -> (a/th, d th, e th^2).
CheckList sylow_structure_K(const GroupSet& gs);

}  // namespace ff
