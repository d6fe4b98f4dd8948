#include "fusionforge/polyspace.hpp"

#include <random>

namespace ff {

Mat2 mat2_mul(const PrimeField& fp, const Mat2& x, const Mat2& y) {
  return {fp.add(fp.mul(x[0], y[0]), fp.mul(x[1], y[2])),
          fp.add(fp.mul(x[0], y[1]), fp.mul(x[1], y[3])),
          fp.add(fp.mul(x[2], y[0]), fp.mul(x[3], y[2])),
          fp.add(fp.mul(x[2], y[1]), fp.mul(x[3], y[3]))};
}

u32 mat2_det(const PrimeField& fp, const Mat2& x) {
  return fp.sub(fp.mul(x[0], x[3]), fp.mul(x[1], x[2]));
}

Mat2 mat2_inv(const PrimeField& fp, const Mat2& x) {
  u32 d = fp.inv(mat2_det(fp, x));
  return {fp.mul(d, x[3]), fp.mul(d, fp.neg(x[1])),
          fp.mul(d, fp.neg(x[2])), fp.mul(d, x[0])};
}

LElement l_mul(const PrimeField& fp, const LElement& x, const LElement& y) {
  return {fp.mul(x.t, y.t), mat2_mul(fp, x.a, y.a)};
}

LElement l_inv(const PrimeField& fp, const LElement& x) {
  return {fp.inv(x.t), mat2_inv(fp, x.a)};
}

PolySpace::PolySpace(PrimeField fp, u32 m) : fp_(fp), m_(m) {
  if (m < 1 || m > fp_.p() - 1)
    throw std::invalid_argument("PolySpace: need 1 <= m <= p-1");
  gram_.assign(m_ + 1, 0);
  for (u32 a = 0; a <= m_; ++a) {
    u32 v = fp_.inv(fp_.binom(m_, a));
    gram_[a] = (a % 2 == 0) ? v : fp_.neg(v);
  }
}

PolyVec PolySpace::basis(u32 j) const {
  PolyVec v = zero();
  v.at(j) = 1;
  return v;
}

bool PolySpace::is_zero(const PolyVec& v) const {
  for (u32 c : v) if (c != 0) return false;
  return true;
}

PolyVec PolySpace::add(const PolyVec& v, const PolyVec& w) const {
  PolyVec r(dim());
  for (u32 j = 0; j < dim(); ++j) r[j] = fp_.add(v[j], w[j]);
  return r;
}

PolyVec PolySpace::sub(const PolyVec& v, const PolyVec& w) const {
  PolyVec r(dim());
  for (u32 j = 0; j < dim(); ++j) r[j] = fp_.sub(v[j], w[j]);
  return r;
}

PolyVec PolySpace::neg(const PolyVec& v) const {
  PolyVec r(dim());
  for (u32 j = 0; j < dim(); ++j) r[j] = fp_.neg(v[j]);
  return r;
}

PolyVec PolySpace::scale(u32 c, const PolyVec& v) const {
  PolyVec r(dim());
  for (u32 j = 0; j < dim(); ++j) r[j] = fp_.mul(c, v[j]);
  return r;
}

PolyVec PolySpace::act(const PolyVec& v, const LElement& g) const {
  // (alpha X + beta Y)^a (gamma X + delta Y)^b expanded as a convolution of
  // the two binomial expansions; e indexes the X-degree of the product.
  u32 al = g.a[0], be = g.a[1], ga = g.a[2], de = g.a[3];
  PolyVec out = zero();
  for (u32 a = 0; a <= m_; ++a) {
    if (v[a] == 0) continue;
    u32 b = m_ - a;
    u32 coef = fp_.mul(g.t, v[a]);
    for (u32 i = 0; i <= a; ++i) {
      u32 top = fp_.mul(fp_.binom(a, i), fp_.mul(fp_.pow(al, i), fp_.pow(be, a - i)));
      if (top == 0) continue;
      for (u32 k = 0; k <= b; ++k) {
        u32 bot = fp_.mul(fp_.binom(b, k), fp_.mul(fp_.pow(ga, k), fp_.pow(de, b - k)));
        if (bot == 0) continue;
        u32 e = i + k;
        out[e] = fp_.add(out[e], fp_.mul(coef, fp_.mul(top, bot)));
      }
    }
  }
  return out;
}

std::vector<PolyVec> PolySpace::act_matrix(const LElement& g) const {
  std::vector<PolyVec> rows(dim());
  for (u32 j = 0; j < dim(); ++j) rows[j] = act(basis(j), g);
  return rows;
}

u32 PolySpace::beta(const PolyVec& v, const PolyVec& w) const {
  u32 s = 0;
  for (u32 a = 0; a <= m_; ++a)
    s = fp_.add(s, fp_.mul(gram_[a], fp_.mul(v[a], w[m_ - a])));
  return s;
}

u32 PolySpace::gram(u32 a) const { return gram_.at(a); }

u32 PolySpace::action_scale(const LElement& g) const {
  return fp_.mul(fp_.mul(g.t, g.t), fp_.pow(mat2_det(fp_, g.a), m_));
}

std::vector<LElement> l_generators(const PrimeField& fp) {
  std::vector<LElement> g;
  g.push_back({1, {0, 1, fp.neg(1), 0}});
  g.push_back({1, {1, 0, 1, 1}});
  for (u32 u = 2; u < fp.p(); ++u) {
    g.push_back({1, {u, 0, 0, 1}});
    g.push_back({u, mat2_id()});
    g.push_back({1, {u, 0, 0, fp.inv(u)}});
  }
  return g;
}

std::vector<LElement> l_diagonal_family(const PrimeField& fp) {
  std::vector<LElement> g;
  for (u32 t = 1; t < fp.p(); ++t)
    for (u32 u = 1; u < fp.p(); ++u)
      for (u32 v = 1; v < fp.p(); ++v)
        g.push_back({t, {u, 0, 0, v}});
  return g;
}

u32 mat_rank(const PrimeField& fp, std::vector<PolyVec> rows) {
  if (rows.empty()) return 0;
  u32 cols = static_cast<u32>(rows[0].size());
  u32 rank = 0;
  for (u32 c = 0; c < cols && rank < rows.size(); ++c) {
    u32 piv = rank;
    while (piv < rows.size() && rows[piv][c] == 0) ++piv;
    if (piv == rows.size()) continue;
    std::swap(rows[piv], rows[rank]);
    u32 s = fp.inv(rows[rank][c]);
    for (u32 j = c; j < cols; ++j) rows[rank][j] = fp.mul(rows[rank][j], s);
    for (u32 r = 0; r < rows.size(); ++r) {
      if (r == rank || rows[r][c] == 0) continue;
      u32 f = rows[r][c];
      for (u32 j = c; j < cols; ++j)
        rows[r][j] = fp.sub(rows[r][j], fp.mul(f, rows[rank][j]));
    }
    ++rank;
  }
  return rank;
}

namespace {

bool scale_identity_holds(const PolySpace& ps, const LElement& g) {
  u32 s = ps.action_scale(g);
  auto img = ps.act_matrix(g);
  for (u32 i = 0; i < ps.dim(); ++i)
    for (u32 j = 0; j < ps.dim(); ++j) {
      u32 lhs = ps.beta(img[i], img[j]);
      u32 rhs = ps.fp().mul(s, ps.beta(ps.basis(i), ps.basis(j)));
      if (lhs != rhs) return false;
    }
  return true;
}

}  // namespace

CheckList verify_form(u32 p, u32 m, u64 scale_samples, u64 seed, u64 exhaustive_limit) {
  PrimeField fp(p);
  PolySpace ps(fp, m);
  CheckList out;

  // Alternating: beta(v,v) = 0 for every v; equivalently the Gram matrix is
  // skew with zero diagonal. Holds precisely when m is odd, so the check
  // passes when the computed verdict matches the parity prediction.
  {
    bool alt = true;
    std::string wit = "alternating";
    for (u32 a = 0; a <= m && alt; ++a) {
      u32 b = m - a;
      if (ps.beta(ps.basis(a), ps.basis(a)) != 0) {
        alt = false;
        wit = "beta(e_" + std::to_string(a) + ", e_" + std::to_string(a) + ") != 0";
      } else if (fp.add(ps.beta(ps.basis(a), ps.basis(b)), ps.beta(ps.basis(b), ps.basis(a))) != 0) {
        alt = false;
        wit = "beta(e_" + std::to_string(a) + ", e_" + std::to_string(b) + ") not skew";
      }
    }
    bool expected = (m % 2 == 1);
    out.add("form.alternating", alt == expected,
            alt ? wit : wit + (expected ? "" : " (m even, expected failure)"));
  }

  // Non-degenerate: the Gram matrix has full rank.
  {
    std::vector<PolyVec> rows(ps.dim());
    for (u32 i = 0; i < ps.dim(); ++i) {
      rows[i] = ps.zero();
      for (u32 j = 0; j < ps.dim(); ++j) rows[i][j] = ps.beta(ps.basis(i), ps.basis(j));
    }
    u32 r = mat_rank(fp, rows);
    out.add("form.nondegenerate", r == ps.dim(), "gram rank " + std::to_string(r) + "/" + std::to_string(ps.dim()));
  }

  // Scale identity beta(v.g, w.g) = t^2 det(A)^m beta(v, w) over the generator
  // and diagonal families, then exhaustively over L when small, else sampled.
  {
    bool ok = true;
    std::string wit;
    auto test = [&](const LElement& g) {
      if (ok && !scale_identity_holds(ps, g)) {
        ok = false;
        wit = "t=" + std::to_string(g.t) + " A=[" + std::to_string(g.a[0]) + "," + std::to_string(g.a[1]) + ";" +
              std::to_string(g.a[2]) + "," + std::to_string(g.a[3]) + "]";
      }
    };
    for (auto& g : l_generators(fp)) test(g);
    for (auto& g : l_diagonal_family(fp)) test(g);

    // |L| = (p-1) * |GL_2(p)| = (p-1)(p^2-1)(p^2-p)
    u64 lsize = static_cast<u64>(p - 1) * (static_cast<u64>(p) * p - 1) * (static_cast<u64>(p) * p - p);
    u64 checked = 0;
    if (lsize <= exhaustive_limit) {
      for (u32 t = 1; t < p && ok; ++t)
        for (u32 a0 = 0; a0 < p && ok; ++a0)
          for (u32 a1 = 0; a1 < p && ok; ++a1)
            for (u32 a2 = 0; a2 < p && ok; ++a2)
              for (u32 a3 = 0; a3 < p && ok; ++a3) {
                LElement g{t, {a0, a1, a2, a3}};
                if (mat2_det(fp, g.a) == 0) continue;
                test(g);
                ++checked;
              }
      out.add("form.scale", ok, ok ? "exhaustive over |L| = " + std::to_string(checked) : wit);
    } else {
      std::mt19937_64 rng(seed);
      auto unit = [&]() { return 1 + static_cast<u32>(rng() % (p - 1)); };
      auto any = [&]() { return static_cast<u32>(rng() % p); };
      for (u64 i = 0; i < scale_samples && ok; ++i) {
        Mat2 a{any(), any(), any(), any()};
        if (mat2_det(fp, a) == 0) { --i; continue; }
        test({unit(), a});
        ++checked;
      }
      out.add("form.scale", ok,
              ok ? "generator families + " + std::to_string(checked) + " sampled elements" : wit);
    }
  }
  return out;
}

bool module_irreducible(const PolySpace& ps, u64 guard) {
  const PrimeField& fp = ps.fp();
  u32 p = fp.p(), d = ps.dim();
  u64 proj = 0;
  for (u64 acc = 1, i = 0; i < d; ++i, acc *= p) proj += acc;
  if (proj > guard)
    throw GuardExceeded("module_irreducible: projective point count " + std::to_string(proj) +
                        " exceeds guard " + std::to_string(guard));

  auto gens = l_generators(fp);
  // Enumerate projective representatives: first nonzero coordinate equals 1.
  std::vector<u32> v(d, 0);
  for (u32 lead = 0; lead < d; ++lead) {
    std::fill(v.begin(), v.end(), 0);
    v[lead] = 1;
    // iterate free coordinates lead+1..d-1 over all of F_p
    u32 free = d - lead - 1;
    u64 total = 1;
    for (u32 i = 0; i < free; ++i) total *= p;
    for (u64 it = 0; it < total; ++it) {
      u64 x = it;
      for (u32 i = 0; i < free; ++i) { v[lead + 1 + i] = static_cast<u32>(x % p); x /= p; }
      // span-closure of v under the generators
      std::vector<PolyVec> basis{v};
      std::vector<PolyVec> reduced{v};
      for (u32 head = 0; head < basis.size(); ++head) {
        for (auto& g : gens) {
          PolyVec img = ps.act(basis[head], g);
          auto probe = reduced;
          probe.push_back(img);
          if (mat_rank(fp, probe) > mat_rank(fp, reduced)) {
            basis.push_back(img);
            reduced.push_back(img);
          }
        }
        if (reduced.size() == d) break;
      }
      if (mat_rank(fp, reduced) < d) return false;
    }
  }
  return true;
}

}  // namespace ff
