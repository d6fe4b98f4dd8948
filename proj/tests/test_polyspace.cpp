#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "fusionforge/polyspace.hpp"

using namespace ff;

namespace {

// Independent oracle for the action: substitute X -> alpha X + beta Y,
// Y -> gamma X + delta Y into X^a Y^b and expand by convolution, then scale
// by t. Works directly on integer coefficient arrays.
PolyVec naive_act_monomial(const PrimeField& fp, u32 m, u32 a, const LElement& g) {
  u32 b = m - a;
  u32 alpha = g.a[0], beta = g.a[1], gamma = g.a[2], delta = g.a[3];
  // (alpha X + beta Y)^a: coefficient of X^i Y^(a-i) is C(a,i) alpha^i beta^(a-i)
  auto binpow = [&](u32 n, u32 base_x, u32 base_y) {
    std::vector<u32> c(n + 1);
    for (u32 i = 0; i <= n; ++i)
      c[i] = fp.mul(fp.binom(n, i), fp.mul(fp.pow(base_x, i), fp.pow(base_y, n - i)));
    return c;
  };
  std::vector<u32> first = binpow(a, alpha, beta);
  std::vector<u32> second = binpow(b, gamma, delta);
  PolyVec out(m + 1, 0);
  for (u32 i = 0; i <= a; ++i)
    for (u32 j = 0; j <= b; ++j)
      out[i + j] = fp.add(out[i + j], fp.mul(first[i], second[j]));
  for (auto& c : out) c = fp.mul(c, g.t);
  return out;
}

PolyVec naive_act(const PolySpace& ps, const PolyVec& v, const LElement& g) {
  PolyVec out = ps.zero();
  for (u32 j = 0; j <= ps.m(); ++j)
    out = ps.add(out, ps.scale(v[j], naive_act_monomial(ps.fp(), ps.m(), j, g)));
  return out;
}

PolyVec random_vec(const PolySpace& ps, std::mt19937_64& rng) {
  PolyVec v = ps.zero();
  for (auto& c : v) c = rng() % ps.p();
  return v;
}

LElement random_l(const PrimeField& fp, std::mt19937_64& rng) {
  while (true) {
    Mat2 a{static_cast<u32>(rng() % fp.p()), static_cast<u32>(rng() % fp.p()),
           static_cast<u32>(rng() % fp.p()), static_cast<u32>(rng() % fp.p())};
    if (mat2_det(fp, a) == 0) continue;
    return {static_cast<u32>(1 + rng() % (fp.p() - 1)), a};
  }
}

}  // namespace

TEST_CASE("matrix helpers agree with direct formulas") {
  PrimeField fp(5);
  Mat2 x{1, 2, 3, 4};
  Mat2 y{0, 1, 4, 2};
  Mat2 xy = mat2_mul(fp, x, y);
  CHECK(xy == Mat2{3, 0, 1, 1});  // [[1*0+2*4, 1*1+2*2],[3*0+4*4, 3*1+4*2]] mod 5
  CHECK(mat2_det(fp, x) == fp.reduce(1 * 4 - 2 * 3));
  Mat2 inv = mat2_inv(fp, x);
  CHECK(mat2_mul(fp, x, inv) == mat2_id());
  CHECK(mat2_mul(fp, inv, x) == mat2_id());
  CHECK_THROWS_AS(mat2_inv(fp, Mat2{1, 2, 2, 4}), std::domain_error);
}

TEST_CASE("L element algebra") {
  PrimeField fp(7);
  std::mt19937_64 rng(11);
  for (int i = 0; i < 50; ++i) {
    LElement g = random_l(fp, rng), h = random_l(fp, rng);
    LElement gh = l_mul(fp, g, h);
    CHECK(gh.t == fp.mul(g.t, h.t));
    CHECK(gh.a == mat2_mul(fp, g.a, h.a));
    CHECK(l_mul(fp, g, l_inv(fp, g)) == l_id());
    CHECK(l_mul(fp, l_inv(fp, g), g) == l_id());
  }
}

TEST_CASE("constructor range") {
  PrimeField fp(5);
  CHECK_NOTHROW(PolySpace(fp, 1));
  CHECK_NOTHROW(PolySpace(fp, 4));
  CHECK_THROWS_AS(PolySpace(fp, 0), std::invalid_argument);
  CHECK_THROWS_AS(PolySpace(fp, 5), std::invalid_argument);
}

TEST_CASE("action matches the substitution oracle on every basis monomial") {
  for (u32 p : {5u, 7u}) {
    PrimeField fp(p);
    std::mt19937_64 rng(p);
    for (u32 m = 1; m <= p - 1; ++m) {
      PolySpace ps(fp, m);
      std::vector<LElement> family = l_generators(fp);
      for (int i = 0; i < 20; ++i) family.push_back(random_l(fp, rng));
      for (const LElement& g : family)
        for (u32 j = 0; j <= m; ++j)
          CHECK(ps.act(ps.basis(j), g) == naive_act_monomial(fp, m, j, g));
    }
  }
}

TEST_CASE("pinned action values in degree one") {
  PrimeField fp(5);
  PolySpace ps(fp, 1);
  PolyVec X = ps.basis(1), Y = ps.basis(0);
  // X under (1, [[0,1],[-1,0]]) becomes Y; Y becomes -X
  LElement rot{1, {0, 1, 4, 0}};
  CHECK(ps.act(X, rot) == Y);
  CHECK(ps.act(Y, rot) == ps.neg(X));
  // X under (1, diag(2,1)) scales to 2X
  LElement diag{1, {2, 0, 0, 1}};
  CHECK(ps.act(X, diag) == ps.scale(2, X));
  CHECK(ps.act(Y, diag) == Y);
}

TEST_CASE("action is a right action and linear") {
  for (u32 p : {5u, 7u}) {
    PrimeField fp(p);
    std::mt19937_64 rng(2 * p + 1);
    for (u32 m : {1u, 3u}) {
      PolySpace ps(fp, m);
      for (int i = 0; i < 40; ++i) {
        LElement g = random_l(fp, rng), h = random_l(fp, rng);
        PolyVec v = random_vec(ps, rng), w = random_vec(ps, rng);
        CHECK(ps.act(ps.act(v, g), h) == ps.act(v, l_mul(fp, g, h)));
        CHECK(ps.act(ps.add(v, w), g) == ps.add(ps.act(v, g), ps.act(w, g)));
        u32 c = rng() % p;
        CHECK(ps.act(ps.scale(c, v), g) == ps.scale(c, ps.act(v, g)));
        CHECK(ps.act(v, l_id()) == v);
      }
    }
  }
}

TEST_CASE("act_matrix rows are basis images") {
  PrimeField fp(5);
  PolySpace ps(fp, 3);
  std::mt19937_64 rng(9);
  for (int i = 0; i < 20; ++i) {
    LElement g = random_l(fp, rng);
    std::vector<PolyVec> mat = ps.act_matrix(g);
    REQUIRE(mat.size() == ps.dim());
    for (u32 j = 0; j < ps.dim(); ++j) CHECK(mat[j] == ps.act(ps.basis(j), g));
    // multiplying through the matrix equals acting directly
    PolyVec v = random_vec(ps, rng);
    PolyVec through = ps.zero();
    for (u32 j = 0; j < ps.dim(); ++j) through = ps.add(through, ps.scale(v[j], mat[j]));
    CHECK(through == ps.act(v, g));
  }
}

TEST_CASE("pairing values on basis monomials") {
  PrimeField fp(5);
  PolySpace ps(fp, 1);
  PolyVec X = ps.basis(1), Y = ps.basis(0);
  CHECK(ps.beta(X, Y) == 4);  // -1/C(1,1)
  CHECK(ps.beta(Y, X) == 1);
  CHECK(ps.beta(X, X) == 0);
  CHECK(ps.beta(Y, Y) == 0);

  // degree three: beta(e_a, e_{m-a}) = (-1)^a / C(3,a)
  PolySpace p3(fp, 3);
  for (u32 a = 0; a <= 3; ++a) {
    u32 want = fp.div(a % 2 ? fp.neg(1) : 1, fp.binom(3, a));
    CHECK(p3.beta(p3.basis(a), p3.basis(3 - a)) == want);
    CHECK(p3.gram(a) == want);
    for (u32 c = 0; c <= 3; ++c)
      if (a + c != 3) CHECK(p3.beta(p3.basis(a), p3.basis(c)) == 0);
  }
}

TEST_CASE("pairing is bilinear and alternating in odd degree") {
  for (u32 p : {5u, 7u}) {
    PrimeField fp(p);
    std::mt19937_64 rng(3 * p);
    for (u32 m : {1u, 3u}) {
      PolySpace ps(fp, m);
      for (int i = 0; i < 60; ++i) {
        PolyVec v = random_vec(ps, rng), w = random_vec(ps, rng), u = random_vec(ps, rng);
        CHECK(ps.beta(v, v) == 0);
        CHECK(ps.beta(v, w) == fp.neg(ps.beta(w, v)));
        CHECK(ps.beta(ps.add(v, u), w) == fp.add(ps.beta(v, w), ps.beta(u, w)));
        u32 c = rng() % p;
        CHECK(ps.beta(ps.scale(c, v), w) == fp.mul(c, ps.beta(v, w)));
      }
    }
  }
}

TEST_CASE("the action scales the pairing by t^2 det^m") {
  for (u32 p : {5u, 7u}) {
    PrimeField fp(p);
    std::mt19937_64 rng(5 * p);
    for (u32 m : {1u, 3u}) {
      PolySpace ps(fp, m);
      for (int i = 0; i < 60; ++i) {
        LElement g = random_l(fp, rng);
        PolyVec v = random_vec(ps, rng), w = random_vec(ps, rng);
        u32 scale = fp.mul(fp.mul(g.t, g.t), fp.pow(mat2_det(fp, g.a), m));
        CHECK(ps.action_scale(g) == scale);
        CHECK(ps.beta(ps.act(v, g), ps.act(w, g)) == fp.mul(scale, ps.beta(v, w)));
      }
    }
  }
}

TEST_CASE("verify_form passes across the supported grid") {
  for (u32 p : {5u, 7u, 11u, 13u})
    for (u32 m = 1; m <= p - 1; m += 2) {
      CheckList out = verify_form(p, m);
      INFO("p=", p, " m=", m);
      CHECK(out.all_pass());
    }
  // even degree: the symmetric form is reported as the expected failure
  CHECK(verify_form(5, 2).all_pass());
}

TEST_CASE("the module is irreducible at the amalgam degrees") {
  for (u32 p : {5u, 7u}) {
    PrimeField fp(p);
    CHECK(module_irreducible(PolySpace(fp, p - 4)));
  }
  PrimeField f5(5);
  CHECK(module_irreducible(PolySpace(f5, 3)));
}

TEST_CASE("generator families have the advertised shapes") {
  PrimeField fp(5);
  std::vector<LElement> gens = l_generators(fp);
  CHECK(gens.size() >= 2);
  std::vector<LElement> fam = l_diagonal_family(fp);
  // all (p-1)^3 diagonal elements are present
  u64 diag = 0;
  for (const LElement& g : fam)
    if (g.a[1] == 0 && g.a[2] == 0) ++diag;
  CHECK(diag >= 64);
}
