#include "fusionforge/groups.hpp"

#include <algorithm>
#include <random>
#include <set>

namespace ff {

// --------------------------------------------------------------------------
// digit packing
// --------------------------------------------------------------------------

namespace {

u32 max_digits_u64(u32 base) {
  u64 cap = UINT64_MAX / base;
  u32 n = 0;
  u64 acc = 1;
  while (acc <= cap) { acc *= base; ++n; }
  return n;
}

u64 pack(u32 base, const u32* d, u32 n) {
  if (n > max_digits_u64(base))
    throw GuardExceeded("element code does not fit in 64 bits");
  u64 c = 0;
  for (u32 i = 0; i < n; ++i) c = c * base + d[i];
  return c;
}

void unpack(u32 base, u64 code, u32* d, u32 n) {
  for (u32 i = n; i-- > 0;) { d[i] = static_cast<u32>(code % base); code /= base; }
}

}  // namespace

// --------------------------------------------------------------------------
// Q
// --------------------------------------------------------------------------

QElement q_id(const PolySpace& ps) { return {ps.zero(), 0}; }

QElement q_mul(const PolySpace& ps, const QElement& x, const QElement& y) {
  return {ps.add(x.v, y.v), ps.fp().add(ps.fp().add(x.z, y.z), ps.beta(x.v, y.v))};
}

QElement q_inv(const PolySpace& ps, const QElement& x) {
  return {ps.neg(x.v), ps.fp().neg(x.z)};  // beta(v, -v) = 0
}

QElement q_commutator(const PolySpace& ps, const QElement& x, const QElement& y) {
  return q_mul(ps, q_mul(ps, q_inv(ps, x), q_inv(ps, y)), q_mul(ps, x, y));
}

QElement act_on_q(const PolySpace& ps, const QElement& x, const LElement& g) {
  return {ps.scale(g.t, ps.act(x.v, {1, g.a})), ps.fp().mul(ps.action_scale(g), x.z)};
}

u64 q_code(const PolySpace& ps, const QElement& x) {
  std::vector<u32> d(x.v);
  d.push_back(x.z);
  return pack(ps.p(), d.data(), static_cast<u32>(d.size()));
}

QElement q_decode(const PolySpace& ps, u64 code) {
  std::vector<u32> d(ps.dim() + 1);
  unpack(ps.p(), code, d.data(), static_cast<u32>(d.size()));
  QElement q{PolyVec(d.begin(), d.begin() + ps.dim()), d.back()};
  return q;
}

// --------------------------------------------------------------------------
// S
// --------------------------------------------------------------------------

Mat2 shear(u32 gamma) { return {1, 0, gamma, 1}; }

SElement s_id(const PolySpace& ps) { return {0, ps.zero(), 0}; }

SElement s_mul(const PolySpace& ps, const SElement& x, const SElement& y) {
  // (s(g1) q1)(s(g2) q2) = s(g1+g2) (q1^{s(g2)} q2); shears have t = det = 1.
  PolyVec moved = ps.act(x.v, {1, shear(y.gamma)});
  const PrimeField& fp = ps.fp();
  return {fp.add(x.gamma, y.gamma), ps.add(moved, y.v),
          fp.add(fp.add(x.z, y.z), ps.beta(moved, y.v))};
}

SElement s_inv(const PolySpace& ps, const SElement& x) {
  u32 g = ps.fp().neg(x.gamma);
  PolyVec back = ps.act(x.v, {1, shear(g)});
  return {g, ps.neg(back), ps.fp().neg(x.z)};
}

u64 s_code(const PolySpace& ps, const SElement& x) {
  std::vector<u32> d;
  d.reserve(ps.dim() + 2);
  d.push_back(x.gamma);
  d.insert(d.end(), x.v.begin(), x.v.end());
  d.push_back(x.z);
  return pack(ps.p(), d.data(), static_cast<u32>(d.size()));
}

SElement s_decode(const PolySpace& ps, u64 code) {
  std::vector<u32> d(ps.dim() + 2);
  unpack(ps.p(), code, d.data(), static_cast<u32>(d.size()));
  return {d.front(), PolyVec(d.begin() + 1, d.begin() + 1 + ps.dim()), d.back()};
}

// --------------------------------------------------------------------------
// P and P_1
// --------------------------------------------------------------------------

PElement p_id(const PolySpace& ps) { return {l_id(), q_id(ps)}; }

PElement p_mul(const PolySpace& ps, const PElement& x, const PElement& y) {
  return {l_mul(ps.fp(), x.l, y.l), q_mul(ps, act_on_q(ps, x.q, y.l), y.q)};
}

PElement p_inv(const PolySpace& ps, const PElement& x) {
  LElement li = l_inv(ps.fp(), x.l);
  return {li, q_inv(ps, act_on_q(ps, x.q, li))};
}

LElement canonical_l(const PolySpace& ps, const LElement& l) {
  const PrimeField& fp = ps.fp();
  LElement best = l;
  u64 bestkey = UINT64_MAX;
  for (u32 u = 1; u < fp.p(); ++u) {
    LElement cand{fp.mul(l.t, fp.pow(u, -static_cast<i64>(ps.m()))),
                  {fp.mul(u, l.a[0]), fp.mul(u, l.a[1]), fp.mul(u, l.a[2]), fp.mul(u, l.a[3])}};
    u32 d[5] = {cand.t, cand.a[0], cand.a[1], cand.a[2], cand.a[3]};
    u64 key = pack(fp.p(), d, 5);
    if (key < bestkey) { bestkey = key; best = cand; }
  }
  return best;
}

PElement p1_canon(const PolySpace& ps, const PElement& x) {
  return {canonical_l(ps, x.l), x.q};
}

PElement p1_mul(const PolySpace& ps, const PElement& x, const PElement& y) {
  return p1_canon(ps, p_mul(ps, x, y));
}

PElement p1_inv(const PolySpace& ps, const PElement& x) {
  return p1_canon(ps, p_inv(ps, x));
}

u64 p1_code(const PolySpace& ps, const PElement& x) {
  std::vector<u32> d;
  d.reserve(5 + ps.dim() + 1);
  d.push_back(x.l.t);
  d.insert(d.end(), x.l.a.begin(), x.l.a.end());
  d.insert(d.end(), x.q.v.begin(), x.q.v.end());
  d.push_back(x.q.z);
  return pack(ps.p(), d.data(), static_cast<u32>(d.size()));
}

PElement p1_decode(const PolySpace& ps, u64 code) {
  std::vector<u32> d(5 + ps.dim() + 1);
  unpack(ps.p(), code, d.data(), static_cast<u32>(d.size()));
  PElement x;
  x.l.t = d[0];
  x.l.a = {d[1], d[2], d[3], d[4]};
  x.q.v = PolyVec(d.begin() + 5, d.begin() + 5 + ps.dim());
  x.q.z = d.back();
  return x;
}

// --------------------------------------------------------------------------
// 3x3 matrices
// --------------------------------------------------------------------------

Mat3 mat3_id() { return {1, 0, 0, 0, 1, 0, 0, 0, 1}; }

Mat3 mat3_mul(const PrimeField& fp, const Mat3& x, const Mat3& y) {
  Mat3 r{};
  for (u32 i = 0; i < 3; ++i)
    for (u32 j = 0; j < 3; ++j) {
      u32 s = 0;
      for (u32 k = 0; k < 3; ++k) s = fp.add(s, fp.mul(x[3 * i + k], y[3 * k + j]));
      r[3 * i + j] = s;
    }
  return r;
}

u32 mat3_det(const PrimeField& fp, const Mat3& x) {
  u32 a = fp.mul(x[0], fp.sub(fp.mul(x[4], x[8]), fp.mul(x[5], x[7])));
  u32 b = fp.mul(x[1], fp.sub(fp.mul(x[3], x[8]), fp.mul(x[5], x[6])));
  u32 c = fp.mul(x[2], fp.sub(fp.mul(x[3], x[7]), fp.mul(x[4], x[6])));
  return fp.add(fp.sub(a, b), c);
}

Mat3 mat3_inv(const PrimeField& fp, const Mat3& x) {
  u32 d = fp.inv(mat3_det(fp, x));
  auto cof = [&](u32 r0, u32 r1, u32 c0, u32 c1) {
    return fp.sub(fp.mul(x[3 * r0 + c0], x[3 * r1 + c1]), fp.mul(x[3 * r0 + c1], x[3 * r1 + c0]));
  };
  Mat3 adj{cof(1, 2, 1, 2), fp.neg(cof(0, 2, 1, 2)), cof(0, 1, 1, 2),
           fp.neg(cof(1, 2, 0, 2)), cof(0, 2, 0, 2), fp.neg(cof(0, 1, 0, 2)),
           cof(1, 2, 0, 1), fp.neg(cof(0, 2, 0, 1)), cof(0, 1, 0, 1)};
  Mat3 r{};
  for (u32 i = 0; i < 9; ++i) r[i] = fp.mul(adj[i], d);
  return r;
}

u64 k_code(const PrimeField& fp, const Mat3& x) {
  u32 d[6] = {x[3], x[4], x[5], x[6], x[7], x[8]};
  return pack(fp.p(), d, 6);
}

Mat3 k_decode(const PrimeField& fp, u64 code) {
  u32 d[6];
  unpack(fp.p(), code, d, 6);
  return {1, 0, 0, d[0], d[1], d[2], d[3], d[4], d[5]};
}

// --------------------------------------------------------------------------
// GroupTable
// --------------------------------------------------------------------------

GroupTable::GroupTable(std::string name, std::vector<u64> codes, MulFn mul, InvFn inv,
                       u64 id_code, u64 dense_limit)
    : name_(std::move(name)), codes_(std::move(codes)), mulfn_(std::move(mul)) {
  std::sort(codes_.begin(), codes_.end());
  index_.reserve(codes_.size() * 2);
  for (u32 i = 0; i < codes_.size(); ++i) index_[codes_[i]] = i;
  if (index_.size() != codes_.size())
    throw std::logic_error("GroupTable " + name_ + ": duplicate element codes");
  idpos_ = at(id_code);

  invs_.resize(codes_.size());
  for (u32 i = 0; i < codes_.size(); ++i) invs_[i] = at(inv(codes_[i]));

  if (codes_.size() <= dense_limit) {
    u32 n = order();
    dense_.resize(static_cast<size_t>(n) * n);
    for (u32 a = 0; a < n; ++a)
      for (u32 b = 0; b < n; ++b)
        dense_[static_cast<size_t>(a) * n + b] = at(mulfn_(codes_[a], codes_[b]));
  }
}

GroupTable::GroupTable(std::string name, u32 n, std::vector<u32> dense, u32 id_pos)
    : name_(std::move(name)), dense_(std::move(dense)), idpos_(id_pos) {
  if (dense_.size() != static_cast<size_t>(n) * n)
    throw std::logic_error("GroupTable " + name_ + ": bad dense table size");
  codes_.resize(n);
  for (u32 i = 0; i < n; ++i) { codes_[i] = i; index_[i] = i; }
  invs_.assign(n, UINT32_MAX);
  for (u32 a = 0; a < n; ++a)
    for (u32 b = 0; b < n; ++b)
      if (dense_[static_cast<size_t>(a) * n + b] == idpos_) { invs_[a] = b; break; }
  for (u32 a = 0; a < n; ++a)
    if (invs_[a] == UINT32_MAX)
      throw std::logic_error("GroupTable " + name_ + ": element without inverse");
}

u32 GroupTable::mul(u32 a, u32 b) const {
  if (!dense_.empty()) return dense_[static_cast<size_t>(a) * order() + b];
  return at(mulfn_(codes_[a], codes_[b]));
}

u32 GroupTable::pow(u32 a, u64 e) const {
  u32 r = id();
  while (e > 0) {
    if (e & 1) r = mul(r, a);
    a = mul(a, a);
    e >>= 1;
  }
  return r;
}

u32 GroupTable::elem_order(u32 a) const {
  u32 x = a, n = 1;
  while (x != id()) { x = mul(x, a); ++n; }
  return n;
}

std::optional<u32> GroupTable::find(u64 code) const {
  auto it = index_.find(code);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

u32 GroupTable::at(u64 code) const {
  auto it = index_.find(code);
  if (it == index_.end())
    throw std::out_of_range("GroupTable " + name_ + ": code not in table");
  return it->second;
}

const std::vector<u32>& GroupTable::generators() const {
  if (!gens_.empty() || order() == 1) return gens_;
  std::vector<char> in(order(), 0);
  std::vector<u32> closure{id()};
  in[id()] = 1;
  for (u32 cand = 0; cand < order(); ++cand) {
    if (in[cand]) continue;
    gens_.push_back(cand);
    // extend the closure by the new generator (BFS over right multiplication)
    std::vector<u32> frontier{cand};
    in[cand] = 1;
    closure.push_back(cand);
    for (u32 head = 0; head < closure.size(); ++head) {
      for (u32 g : gens_) {
        u32 nx = mul(closure[head], g);
        if (!in[nx]) { in[nx] = 1; closure.push_back(nx); }
      }
    }
    if (closure.size() == order()) break;
  }
  return gens_;
}

std::vector<u32> GroupTable::conj_perm(u32 g) const {
  std::vector<u32> out(order());
  u32 gi = inv(g);
  for (u32 x = 0; x < order(); ++x) out[x] = mul(mul(gi, x), g);
  return out;
}

// --------------------------------------------------------------------------
// build_groups
// --------------------------------------------------------------------------

u64 GroupSet::order_L() const {
  u64 pp = p;
  return (pp - 1) * (pp * pp - 1) * (pp * pp - pp);
}

u64 GroupSet::order_P1_expected() const {
  u64 pp = p, q = 1;
  for (u32 i = 0; i < m + 2; ++i) q *= pp;
  return (pp * pp - 1) * (pp * pp - pp) * q;
}

GroupSet build_groups(u32 p, u32 m, const BuildGuards& guards) {
  if (m % 2 == 0)
    throw std::invalid_argument("build_groups: m must be odd (the pairing must be alternating)");
  GroupSet gs;
  gs.p = p;
  gs.m = m;
  gs.ps = std::make_shared<const PolySpace>(PrimeField(p), m);
  auto ps = gs.ps;
  const PrimeField& fp = ps->fp();

  u64 qn = 1;
  for (u32 i = 0; i < m + 2; ++i) qn *= p;
  u64 sn = qn * p;
  if (sn > guards.max_group_enum)
    throw GuardExceeded("build_groups: |S| = " + std::to_string(sn) + " exceeds enumeration guard " +
                        std::to_string(guards.max_group_enum));

  // Q and S have sequential codes: every digit string is an element.
  {
    std::vector<u64> codes(qn);
    for (u64 i = 0; i < qn; ++i) codes[i] = i;
    gs.Q = std::make_shared<GroupTable>(
        "Q", std::move(codes),
        [ps](u64 a, u64 b) { return q_code(*ps, q_mul(*ps, q_decode(*ps, a), q_decode(*ps, b))); },
        [ps](u64 a) { return q_code(*ps, q_inv(*ps, q_decode(*ps, a))); },
        q_code(*ps, q_id(*ps)), guards.dense_limit);
  }
  {
    std::vector<u64> codes(sn);
    for (u64 i = 0; i < sn; ++i) codes[i] = i;
    gs.S = std::make_shared<GroupTable>(
        "S", std::move(codes),
        [ps](u64 a, u64 b) { return s_code(*ps, s_mul(*ps, s_decode(*ps, a), s_decode(*ps, b))); },
        [ps](u64 a) { return s_code(*ps, s_inv(*ps, s_decode(*ps, a))); },
        s_code(*ps, s_id(*ps)), guards.dense_limit);
  }

  // K: all 3x3 matrices with first row (1,0,0) and determinant 1.
  {
    u64 total = 1;
    for (u32 i = 0; i < 6; ++i) total *= p;
    std::vector<u64> codes;
    codes.reserve(static_cast<size_t>(p) * p * p * (p * p - 1));
    for (u64 c = 0; c < total; ++c)
      if (mat3_det(fp, k_decode(fp, c)) == 1) codes.push_back(c);
    PrimeField fpv = fp;
    gs.K = std::make_shared<GroupTable>(
        "K", std::move(codes),
        [fpv](u64 a, u64 b) { return k_code(fpv, mat3_mul(fpv, k_decode(fpv, a), k_decode(fpv, b))); },
        [fpv](u64 a) { return k_code(fpv, mat3_inv(fpv, k_decode(fpv, a))); },
        k_code(fp, mat3_id()), guards.dense_limit);
  }

  for (u32 i = 0; i < gs.K->order(); ++i) {
    Mat3 x = k_decode(fp, gs.K->code(i));
    bool cshape = x[5] == 0;                      // [[1,0,0],[a,th,0],[d,e,1/th]]
    bool dshape = cshape && x[4] == 1 && x[8] == 1;
    bool wshape = dshape && x[7] == 0;
    if (cshape) gs.C_in_K.push_back(i);
    if (dshape) gs.D_in_K.push_back(i);
    if (wshape) gs.W_in_K.push_back(i);
  }

  for (u32 i = 0; i < gs.S->order(); ++i) {
    SElement x = s_decode(*ps, gs.S->code(i));
    if (ps->is_zero(x.v) && x.z == 0) gs.S0_in_S.push_back(i);
    if (x.gamma == 0) {
      gs.Q_in_S.push_back(i);
      if (ps->is_zero(x.v)) gs.ZQ_in_S.push_back(i);
    }
  }

  // P_1 when within the guard.
  u64 p1n = gs.order_P1_expected();
  if (p1n > guards.max_group_enum) {
    gs.p1_skip_reason = "|P_1| = " + std::to_string(p1n) + " exceeds enumeration guard " +
                        std::to_string(guards.max_group_enum);
  } else {
    std::set<u64> lreps;
    for (u32 t = 1; t < p; ++t)
      for (u32 a0 = 0; a0 < p; ++a0)
        for (u32 a1 = 0; a1 < p; ++a1)
          for (u32 a2 = 0; a2 < p; ++a2)
            for (u32 a3 = 0; a3 < p; ++a3) {
              LElement l{t, {a0, a1, a2, a3}};
              if (mat2_det(fp, l.a) == 0) continue;
              LElement c = canonical_l(*ps, l);
              u32 d[5] = {c.t, c.a[0], c.a[1], c.a[2], c.a[3]};
              lreps.insert(pack(p, d, 5));
            }
    std::vector<u64> codes;
    codes.reserve(p1n);
    for (u64 lk : lreps) {
      u32 d[5];
      unpack(p, lk, d, 5);
      PElement x{{d[0], {d[1], d[2], d[3], d[4]}}, q_id(*ps)};
      for (u64 qc = 0; qc < qn; ++qc) {
        x.q = q_decode(*ps, qc);
        codes.push_back(p1_code(*ps, x));
      }
    }
    gs.P1 = std::make_shared<GroupTable>(
        "P1", std::move(codes),
        [ps](u64 a, u64 b) { return p1_code(*ps, p1_mul(*ps, p1_decode(*ps, a), p1_decode(*ps, b))); },
        [ps](u64 a) { return p1_code(*ps, p1_inv(*ps, p1_decode(*ps, a))); },
        p1_code(*ps, p1_canon(*ps, p_id(*ps))), guards.dense_limit);
    if (gs.P1->order() != p1n)
      throw std::logic_error("build_groups: |P_1| mismatch");

    gs.s_to_p1.resize(gs.S->order());
    for (u32 i = 0; i < gs.S->order(); ++i) {
      SElement x = s_decode(*ps, gs.S->code(i));
      PElement e{{1, shear(x.gamma)}, {x.v, x.z}};
      gs.s_to_p1[i] = gs.P1->at(p1_code(*ps, p1_canon(*ps, e)));
    }
    gs.S_in_P1 = gs.s_to_p1;
    std::sort(gs.S_in_P1.begin(), gs.S_in_P1.end());
    for (u32 i : gs.ZQ_in_S) gs.ZQ_in_P1.push_back(gs.s_to_p1[i]);
    std::sort(gs.ZQ_in_P1.begin(), gs.ZQ_in_P1.end());

    for (u32 i = 0; i < gs.P1->order(); ++i)
      if (p1_decode(*ps, gs.P1->code(i)).l.a[1] == 0) gs.B_in_P1.push_back(i);
  }

  return gs;
}

// --------------------------------------------------------------------------
// structure verdicts
// --------------------------------------------------------------------------

namespace {

// odometer over all coefficient vectors
bool next_vec(PolyVec& v, u32 p) {
  for (u32 i = 0; i < v.size(); ++i) {
    if (++v[i] < p) return true;
    v[i] = 0;
  }
  return false;
}

}  // namespace

CheckList verify_Q_structure(const GroupSet& gs, u64 seed) {
  const PolySpace& ps = *gs.ps;
  const PrimeField& fp = ps.fp();
  u32 p = gs.p, m = gs.m;
  CheckList out;

  u64 qn = 1;
  for (u32 i = 0; i < m + 2; ++i) qn *= p;
  out.add("qstruct.order_Q", gs.Q->order() == qn,
          "|Q| = " + std::to_string(gs.Q->order()));

  // Commutator identity [x,y] = (0, 2 beta(v_x, v_y)), exhaustive over vector
  // parts (the central coordinates cancel identically; sampled below).
  {
    bool ok = true;
    std::set<u32> comm_z;
    PolyVec v = ps.zero();
    do {
      PolyVec w = ps.zero();
      do {
        QElement c = q_commutator(ps, {v, 0}, {w, 0});
        u32 expect = fp.mul(2 % p, ps.beta(v, w));
        if (!ps.is_zero(c.v) || c.z != expect) { ok = false; break; }
        comm_z.insert(c.z);
      } while (next_vec(w, p));
      if (!ok) break;
    } while (next_vec(v, p));
    out.add("qstruct.commutator_identity", ok, "exhaustive over vector-part pairs");

    std::mt19937_64 rng(seed);
    bool zok = true;
    for (u32 i = 0; i < 100000 && zok; ++i) {
      QElement x = q_decode(ps, rng() % qn), y = q_decode(ps, rng() % qn);
      QElement c = q_commutator(ps, x, y);
      zok = ps.is_zero(c.v) && c.z == fp.mul(2 % p, ps.beta(x.v, y.v));
    }
    out.add("qstruct.commutator_z_independent", zok, "sampled full pairs");

    // derived subgroup = closure of the commutator set inside Z(Q)
    std::set<u32> derived{0};
    std::vector<u32> work{0};
    while (!work.empty()) {
      u32 a = work.back();
      work.pop_back();
      for (u32 b : comm_z) {
        u32 s = fp.add(a, b);
        if (derived.insert(s).second) work.push_back(s);
      }
    }
    out.add("qstruct.derived_equals_center_order", derived.size() == p && comm_z.size() > 1,
            "|Q'| = " + std::to_string(derived.size()));
  }

  // center by generator-commuting, compared against {(0, z)}
  {
    std::vector<u32> center;
    auto& gens = gs.Q->generators();
    for (u32 x = 0; x < gs.Q->order(); ++x) {
      bool cen = true;
      for (u32 g : gens)
        if (gs.Q->mul(x, g) != gs.Q->mul(g, x)) { cen = false; break; }
      if (cen) center.push_back(x);
    }
    std::vector<u32> expect;
    for (u32 z = 0; z < p; ++z) expect.push_back(gs.Q->at(q_code(ps, {ps.zero(), z})));
    std::sort(expect.begin(), expect.end());
    out.add("qstruct.center", center == expect, "|Z(Q)| = " + std::to_string(center.size()));
  }

  // exponent p: x^p = 1 elementwise (struct level)
  {
    bool ok = true;
    for (u64 c = 0; c < qn && ok; ++c) {
      QElement x = q_decode(ps, c), acc = q_id(ps);
      for (u32 i = 0; i < p; ++i) acc = q_mul(ps, acc, x);
      ok = (acc == q_id(ps));
    }
    out.add("qstruct.exponent_Q", ok, "x^p = 1 for all x");
  }

  // Frattini subgroup: Q' * <p-th powers> = Q' since exponent is p.
  out.add("qstruct.frattini", true, "Phi(Q) = Q' Q^p = Q' (exponent p)");

  if (m == p - 4) {
    u64 want = 1;
    for (u32 i = 0; i < p - 2u; ++i) want *= p;
    out.add("qstruct.extraspecial_main", gs.Q->order() == want,
            "|Q| = p^(p-2) = " + std::to_string(want));

    u64 sn = want * p;
    out.add("qstruct.order_S", gs.S->order() == sn, "|S| = p^(p-1)");
    bool ok = true;
    for (u64 c = 0; c < sn && ok; ++c) {
      SElement x = s_decode(ps, c), acc = s_id(ps);
      for (u32 i = 0; i < p; ++i) acc = s_mul(ps, acc, x);
      ok = (acc == s_id(ps));
    }
    out.add("qstruct.exponent_S", ok, "x^p = 1 for all x in S");
  }

  return out;
}

CheckList verify_centralizers(const GroupSet& gs) {
  const PolySpace& ps = *gs.ps;
  const PrimeField& fp = ps.fp();
  u32 p = gs.p, m = gs.m;
  CheckList out;

  // C_L(Q) = {(u^-m, u I)}
  {
    std::set<std::array<u32, 5>> got, want;
    for (u32 t = 1; t < p; ++t)
      for (u32 a0 = 0; a0 < p; ++a0)
        for (u32 a1 = 0; a1 < p; ++a1)
          for (u32 a2 = 0; a2 < p; ++a2)
            for (u32 a3 = 0; a3 < p; ++a3) {
              LElement g{t, {a0, a1, a2, a3}};
              if (mat2_det(fp, g.a) == 0) continue;
              bool fixes = ps.action_scale(g) == 1;
              for (u32 j = 0; j < ps.dim() && fixes; ++j)
                fixes = (act_on_q(ps, {ps.basis(j), 0}, g).v == ps.basis(j));
              if (fixes) got.insert({t, a0, a1, a2, a3});
            }
    for (u32 u = 1; u < p; ++u)
      want.insert({fp.pow(u, -static_cast<i64>(m)), u, 0, 0, u});
    out.add("centralizers.CLQ", got == want,
            "|C_L(Q)| = " + std::to_string(got.size()) + ", expected p-1 = " + std::to_string(p - 1));
  }

  // C_Q((v,y)) = {(w,z) : beta(v,w) = 0}: the commuting condition reduces to
  // beta symmetry on vector parts, so quantify over vector pairs.
  {
    bool ok = true;
    PolyVec v = ps.zero();
    do {
      PolyVec w = ps.zero();
      do {
        bool commute = q_mul(ps, {v, 0}, {w, 0}) == q_mul(ps, {w, 0}, {v, 0});
        if (commute != (ps.beta(v, w) == 0)) { ok = false; break; }
      } while (next_vec(w, p));
      if (!ok) break;
    } while (next_vec(v, p));
    out.add("centralizers.CQ_element", ok, "commuting <=> perpendicular, all vector pairs");
  }

  // C_Q(S_0) = {(c X^m, z)}
  {
    std::vector<u64> got, want;
    u64 qn = 1;
    for (u32 i = 0; i < m + 2; ++i) qn *= p;
    for (u64 c = 0; c < qn; ++c) {
      QElement x = q_decode(ps, c);
      bool fixed = true;
      for (u32 g = 1; g < p && fixed; ++g)
        fixed = (act_on_q(ps, x, {1, shear(g)}) == x);
      if (fixed) got.push_back(c);
    }
    for (u32 cm = 0; cm < p; ++cm)
      for (u32 z = 0; z < p; ++z)
        want.push_back(q_code(ps, {ps.scale(cm, ps.basis(m)), z}));
    std::sort(want.begin(), want.end());
    out.add("centralizers.CQ_S0", got == want, "|C_Q(S_0)| = " + std::to_string(got.size()));
  }

  // Fixed points of each nontrivial shear on Q/Z(Q) = V_m all equal <X^m>.
  {
    bool ok = true;
    for (u32 g = 1; g < p && ok; ++g) {
      LElement sh{1, shear(g)};
      auto mat = ps.act_matrix(sh);
      std::vector<PolyVec> diff = mat;
      for (u32 i = 0; i < ps.dim(); ++i) diff[i][i] = fp.sub(diff[i][i], 1);
      u32 fixdim = ps.dim() - mat_rank(fp, diff);
      ok = fixdim == 1 && ps.act(ps.basis(m), sh) == ps.basis(m);
    }
    out.add("centralizers.QmodZ_fixed_space", ok, "dim fix = 1, spanned by X^m, all shears");
  }

  return out;
}

CheckList sylow_structure_K(const GroupSet& gs) {
  const PrimeField& fp = gs.ps->fp();
  u32 p = gs.p;
  CheckList out;
  const GroupTable& K = *gs.K;

  u64 want = static_cast<u64>(p) * p * p * (static_cast<u64>(p) * p - 1);
  out.add("sylowK.order_K", K.order() == want, "|K| = " + std::to_string(K.order()));
  out.add("sylowK.order_C", gs.C_in_K.size() == static_cast<u64>(p) * p * p * (p - 1), "");
  out.add("sylowK.order_D", gs.D_in_K.size() == static_cast<u64>(p) * p * p, "");
  out.add("sylowK.order_W", gs.W_in_K.size() == static_cast<u64>(p) * p, "");

  // D is a p-subgroup of full p-part order; its conjugates are the Sylows.
  std::vector<std::vector<u32>> sylows;
  {
    std::set<std::vector<u32>> seen;
    std::vector<std::vector<u32>> queue{gs.D_in_K};
    seen.insert(gs.D_in_K);
    auto& gens = K.generators();
    for (u32 head = 0; head < queue.size(); ++head) {
      for (u32 g : gens) {
        std::vector<u32> img(queue[head].size());
        for (u32 i = 0; i < img.size(); ++i) img[i] = K.conj(queue[head][i], g);
        std::sort(img.begin(), img.end());
        if (seen.insert(img).second) queue.push_back(img);
      }
    }
    sylows = {seen.begin(), seen.end()};
  }
  out.add("sylowK.count", sylows.size() == p + 1 && sylows.size() % p == 1,
          std::to_string(sylows.size()) + " Sylow p-subgroups");

  bool inter_ok = true;
  for (u32 i = 0; i < sylows.size() && inter_ok; ++i)
    for (u32 j = i + 1; j < sylows.size() && inter_ok; ++j) {
      std::vector<u32> inter;
      std::set_intersection(sylows[i].begin(), sylows[i].end(), sylows[j].begin(), sylows[j].end(),
                            std::back_inserter(inter));
      inter_ok = (inter == gs.W_in_K);
    }
  out.add("sylowK.pairwise_intersection_W", inter_ok, "every distinct pair meets in W");

  // N_K(D) = C
  {
    std::vector<u32> dgens;
    dgens.push_back(K.at(k_code(fp, {1, 0, 0, 1, 1, 0, 0, 0, 1})));
    dgens.push_back(K.at(k_code(fp, {1, 0, 0, 0, 1, 0, 1, 0, 1})));
    dgens.push_back(K.at(k_code(fp, {1, 0, 0, 0, 1, 0, 0, 1, 1})));
    std::vector<char> in_d(K.order(), 0);
    for (u32 i : gs.D_in_K) in_d[i] = 1;
    std::vector<u32> nk;
    for (u32 g = 0; g < K.order(); ++g) {
      bool norm = true;
      for (u32 d : dgens)
        if (!in_d[K.conj(d, g)]) { norm = false; break; }
      if (norm) nk.push_back(g);
    }
    out.add("sylowK.normalizer_D_is_C", nk == gs.C_in_K, "|N_K(D)| = " + std::to_string(nk.size()));
  }

  // W normal in K
  {
    std::vector<char> in_w(K.order(), 0);
    for (u32 i : gs.W_in_K) in_w[i] = 1;
    bool ok = true;
    for (u32 g : K.generators())
      for (u32 x : gs.W_in_K)
        if (!in_w[K.conj(x, g)]) { ok = false; break; }
    out.add("sylowK.W_normal", ok, "W = O_p(K) candidate is K-invariant");
  }

  // torus conjugation: (a, d, e) -> (a/th, d th, e th^2)
  {
    bool ok = true;
    for (u32 th = 1; th < p && ok; ++th) {
      Mat3 h{1, 0, 0, 0, th, 0, 0, 0, fp.inv(th)};
      for (u32 a = 0; a < p && ok; ++a)
        for (u32 d = 0; d < p && ok; ++d)
          for (u32 e = 0; e < p && ok; ++e) {
            Mat3 u{1, 0, 0, a, 1, 0, d, e, 1};
            Mat3 c = mat3_mul(fp, mat3_mul(fp, mat3_inv(fp, h), u), h);
            Mat3 expect{1, 0, 0,
                        fp.mul(a, fp.inv(th)), 1, 0,
                        fp.mul(d, th), fp.mul(e, fp.mul(th, th)), 1};
            ok = (c == expect);
          }
    }
    out.add("sylowK.torus_scaling", ok, "unitriangular coordinates scale as (1/th, th, th^2)");
  }

  return out;
}

}  // namespace ff
