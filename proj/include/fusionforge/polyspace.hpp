#pragma once

#include <array>
#include <string>

#include "fusionforge/primefield.hpp"

namespace ff {

// Row-major 2x2 matrix [[a,b],[c,d]] over F_p.
using Mat2 = std::array<u32, 4>;

Mat2 mat2_mul(const PrimeField& fp, const Mat2& x, const Mat2& y);
Mat2 mat2_inv(const PrimeField& fp, const Mat2& x);
u32 mat2_det(const PrimeField& fp, const Mat2& x);
inline Mat2 mat2_id() { return {1, 0, 0, 1}; }

// Element (t, A) of L = F^x x GL_2(F).
struct LElement {
  u32 t;
  Mat2 a;
  bool operator==(const LElement&) const = default;
};

LElement l_mul(const PrimeField& fp, const LElement& x, const LElement& y);
LElement l_inv(const PrimeField& fp, const LElement& x);
inline LElement l_id() { return {1, mat2_id()}; }

// Coefficient vector of a homogeneous degree-m polynomial in X, Y:
// c[j] is the coefficient of X^j Y^(m-j), j = 0..m.
using PolyVec = std::vector<u32>;

// The (m+1)-dimensional module V_m of homogeneous degree-m polynomials with
// the right L-action  (X^a Y^b)·(t,A) = t (alpha X + beta Y)^a (gamma X + delta Y)^b
// for A = [[alpha,beta],[gamma,delta]], and the pairing
//   beta_m(X^a Y^b, X^c Y^d) = 0 unless a = d, else (-1)^a / C(m,a).
class PolySpace {
public:
  PolySpace(PrimeField fp, u32 m);  // requires 1 <= m <= p-1

  const PrimeField& fp() const noexcept { return fp_; }
  u32 p() const noexcept { return fp_.p(); }
  u32 m() const noexcept { return m_; }
  u32 dim() const noexcept { return m_ + 1; }

  PolyVec zero() const { return PolyVec(dim(), 0); }
  PolyVec basis(u32 j) const;
  bool is_zero(const PolyVec& v) const;

  PolyVec add(const PolyVec& v, const PolyVec& w) const;
  PolyVec sub(const PolyVec& v, const PolyVec& w) const;
  PolyVec neg(const PolyVec& v) const;
  PolyVec scale(u32 c, const PolyVec& v) const;

  // v acted on by (t, A); composition law: act(act(v,g),h) = act(v, l_mul(g,h)).
  PolyVec act(const PolyVec& v, const LElement& g) const;

  // Rows are the images of the basis monomials, so act(v,g) = v * act_matrix(g).
  std::vector<PolyVec> act_matrix(const LElement& g) const;

  u32 beta(const PolyVec& v, const PolyVec& w) const;
  u32 gram(u32 a) const;  // beta(e_a, e_{m-a}) = (-1)^a / C(m,a)

  // t^2 det(A)^m: the factor by which (t,A) scales the pairing.
  u32 action_scale(const LElement& g) const;

private:
  PrimeField fp_;
  u32 m_;
  std::vector<u32> gram_;
};

// Generating family for L: the two SL_2 generators, the diagonal torus family
// (1, diag(u,1)) and the scalar family (u, I) over all units u.
std::vector<LElement> l_generators(const PrimeField& fp);

// All (p-1)^3 elements (t, diag(u,v)) together with l_generators; enough to
// verify multiplicative identities that are closed under products.
std::vector<LElement> l_diagonal_family(const PrimeField& fp);

struct Check {
  std::string id;
  bool pass = false;
  std::string detail;
};

struct CheckList {
  std::vector<Check> items;
  bool all_pass() const {
    for (auto& c : items) if (!c.pass) return false;
    return true;
  }
  void add(std::string id, bool pass, std::string detail = "") {
    items.push_back({std::move(id), pass, std::move(detail)});
  }
};

// Form verification: alternating (expected to fail for even m), skew symmetry,
// non-degeneracy (Gram rank), and the scale identity over the generator and
// diagonal families. `scale_samples` additionally checks random L-elements
// (exhaustive over L instead when |L| <= exhaustive_limit).
CheckList verify_form(u32 p, u32 m, u64 scale_samples = 0, u64 seed = 1,
                      u64 exhaustive_limit = 20000);

// True if V_m has no proper nonzero subspace invariant under every l_generator.
// Walks every projective vector; guarded by the projective point count.
bool module_irreducible(const PolySpace& ps, u64 guard = 100000);

u32 mat_rank(const PrimeField& fp, std::vector<PolyVec> rows);

}  // namespace ff
