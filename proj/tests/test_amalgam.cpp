#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>
#include <set>

#include "fusionforge/amalgam.hpp"

using namespace ff;

namespace {

const GroupSet& groups51() {
  static GroupSet gs = build_groups(5, 1);
  return gs;
}

const AmalgamData& amalgam51() {
  static AmalgamData am = build_amalgam(groups51());
  return am;
}

}  // namespace

TEST_CASE("w vectors take their closed-form values in degree one") {
  PrimeField fp(5);
  PolySpace ps(fp, 1);
  // w(alpha) = alpha Y + (alpha^2 / 2) X; coefficients are (Y part, X part)
  CHECK(w_vector(ps, 0) == PolyVec{0, 0});
  CHECK(w_vector(ps, 1) == PolyVec{1, 3});
  CHECK(w_vector(ps, 2) == PolyVec{2, 2});
  CHECK(w_vector(ps, 3) == PolyVec{3, 2});
  CHECK(w_vector(ps, 4) == PolyVec{4, 3});
}

TEST_CASE("pairing identities against direct evaluation") {
  for (u32 p : {5u, 7u}) {
    PrimeField fp(p);
    u32 m = p - 4;
    PolySpace ps(fp, m);
    u32 denom = fp.mul(m + 1, m + 2);
    for (u32 lam = 0; lam < p; ++lam)
      for (u32 mu = 0; mu < p; ++mu) {
        // beta(lam X^m, w(mu)) = -lam mu
        PolyVec xm = ps.scale(lam, ps.basis(m));
        CHECK(ps.beta(xm, w_vector(ps, mu)) == fp.neg(fp.mul(lam, mu)));
        // beta(w(lam), w(mu)) = ((lam-mu)^(m+2) - lam^(m+2) + mu^(m+2)) / ((m+1)(m+2))
        u32 num = fp.add(fp.sub(fp.pow(fp.sub(lam, mu), m + 2), fp.pow(lam, m + 2)),
                         fp.pow(mu, m + 2));
        CHECK(ps.beta(w_vector(ps, lam), w_vector(ps, mu)) == fp.div(num, denom));
      }
  }
  // frozen sample points at (5,1)
  PrimeField f5(5);
  PolySpace ps(f5, 1);
  CHECK(ps.beta(ps.scale(2, ps.basis(1)), w_vector(ps, 3)) == 4);
  CHECK(ps.beta(w_vector(ps, 1), w_vector(ps, 2)) == 1);
}

TEST_CASE("the conjugation closed form matches the module action") {
  for (u32 p : {5u, 7u}) {
    PrimeField fp(p);
    PolySpace ps(fp, p - 4);
    for (u32 lam = 0; lam < p; ++lam)
      for (u32 a = 1; a < p; ++a)
        for (u32 b = 1; b < p; ++b)
          for (u32 mu = 0; mu < p; ++mu) {
            LElement g{1, {a, 0, mu, b}};
            CHECK(conjugate_w(ps, lam, a, b, mu) == ps.act(w_vector(ps, lam), g));
          }
  }
  // frozen: w(1) under (1, [[2,0],[0,1]]) is X + Y
  PrimeField f5(5);
  PolySpace ps(f5, 1);
  CHECK(conjugate_w(ps, 1, 2, 1, 0) == PolyVec{1, 1});
}

TEST_CASE("the W_0 element set is a subgroup of order p^2") {
  PrimeField fp(5);
  PolySpace ps(fp, 1);
  std::vector<SElement> w0 = w0_elements(ps);
  REQUIRE(w0.size() == 25);
  std::set<u64> codes;
  for (const SElement& x : w0) codes.insert(s_code(ps, x));
  CHECK(codes.size() == 25);
  for (const SElement& x : w0)
    for (const SElement& y : w0) {
      CHECK(codes.count(s_code(ps, s_mul(ps, x, y))) == 1);
      CHECK(codes.count(s_code(ps, s_inv(ps, x))) == 1);
      CHECK(s_mul(ps, x, y) == s_mul(ps, y, x));  // abelian
    }
  // matches the materialized subgroup of the build
  const GroupSet& gs = groups51();
  std::vector<u32> ids;
  for (const SElement& x : w0) ids.push_back(gs.S->at(s_code(ps, x)));
  std::sort(ids.begin(), ids.end());
  CHECK(ids == amalgam51().W0_S.elems);
}

TEST_CASE("identity suites pass where defined and guard where not") {
  CHECK(check_w_identities(5, 1).all_pass());
  CHECK(check_w_identities(7, 3).all_pass());
  CHECK(check_w_identities(7, 1).all_pass());  // formal identities hold off the amalgam degree
  CHECK(check_w_identities(11, 7).all_pass());
  // (m+1)(m+2) = 0 mod p: closed forms undefined
  CHECK_THROWS_AS(check_w_identities(5, 3), GuardExceeded);
  CHECK_THROWS_AS(check_w_identities(7, 5), GuardExceeded);
  CHECK_THROWS_AS(check_w_identities(3, 1), GuardExceeded);
}

TEST_CASE("normalizer parameters encode and decode through P") {
  PrimeField fp(5);
  PolySpace ps(fp, 1);
  std::vector<NormalizerElement> params = normalizer_parameters(fp);
  REQUIRE(params.size() == 2000);  // (p-1)^2 p^3
  std::set<std::array<u32, 5>> uniq;
  for (const NormalizerElement& x : params) {
    PElement g = normalizer_to_p(ps, x);
    NormalizerElement back;
    REQUIRE(normalizer_from_p(ps, g, &back));
    CHECK(back == x);
    uniq.insert({x.a, x.b, x.lambda, x.tau, x.theta});
    // decoding from any scalar-coset translate moves (a, b) in lockstep
    for (u32 u = 2; u < 5; ++u) {
      LElement kern{fp.pow(u, -1), {u, 0, 0, u}};
      PElement moved{l_mul(fp, g.l, kern), g.q};
      NormalizerElement tr;
      REQUIRE(normalizer_from_p(ps, moved, &tr));
      CHECK(tr.a == fp.mul(u, x.a));
      CHECK(tr.b == fp.mul(u, x.b));
      CHECK(tr.lambda == x.lambda);
      CHECK(tr.tau == x.tau);
      CHECK(tr.theta == x.theta);
    }
  }
  CHECK(uniq.size() == 2000);

  // a P element outside the parametrized shape is rejected
  PElement bad{l_id(), {PolyVec{1, 0}, 0}};  // vector part Y is not w(0) + tau X
  NormalizerElement sink;
  CHECK(!normalizer_from_p(ps, bad, &sink));
  PElement off{{1, {1, 1, 0, 1}}, q_id(ps)};  // upper-triangular L part
  CHECK(!normalizer_from_p(ps, off, &sink));
}

TEST_CASE("product and theta suites at the amalgam parameters") {
  CHECK(check_prod_formula(5, 1).all_pass());
  CHECK(check_prod_formula(7, 3, 2000, 9).all_pass());
  CHECK(verify_theta_struct(5, 1).all_pass());
  CHECK(verify_theta_struct(7, 3, 2000, 9).all_pass());
  // the map into K is only stated at m = p - 4
  CHECK_THROWS_AS(verify_theta_struct(7, 1), GuardExceeded);
  CHECK_THROWS_AS(check_prod_formula(5, 3), GuardExceeded);
}

TEST_CASE("frozen theta image") {
  PrimeField fp(5);
  PolySpace ps(fp, 1);
  NormalizerElement x{2, 1, 0, 0, 0};
  Mat3 img = theta_image(ps, x);
  CHECK(img == Mat3{1, 0, 0, 0, 3, 0, 0, 0, 2});  // diag(1, b/a, a/b) = diag(1, 3, 2)
  NormalizerElement shearish{1, 1, 2, 0, 0};
  Mat3 img2 = theta_image(ps, shearish);
  CHECK(img2[3] == 2);  // (b/a) lambda
  CHECK(img2[4] == 1);
  CHECK(img2[8] == 1);
  // kernel: scalar tuples map to the identity
  for (u32 u = 1; u < 5; ++u)
    CHECK(theta_image(ps, NormalizerElement{u, u, 0, 0, 0}) == mat3_id());
}

TEST_CASE("materialized amalgam data at (5,1)") {
  const GroupSet& gs = groups51();
  const AmalgamData& am = amalgam51();
  CHECK(am.theta_skip_reason.empty());
  CHECK(am.W0_S.order() == 25);
  CHECK(am.DS_S.order() == 125);
  CHECK(am.W0_P1.order() == 25);
  CHECK(am.NW0_P1.order() == 500);

  CHECK(verify_normalizer(gs, am).all_pass());
  CHECK(verify_theta_tables(gs, am).all_pass());

  // dictionary round trip and domain sentinels
  REQUIRE(am.theta_p1_to_k.size() == gs.P1->order());
  REQUIRE(am.theta_k_to_p1.size() == gs.K->order());
  u32 mapped = 0;
  for (u32 id = 0; id < gs.P1->order(); ++id) {
    if (am.theta_p1_to_k[id] == UINT32_MAX) continue;
    ++mapped;
    CHECK(am.NW0_P1.contains(id));
    CHECK(am.theta_k_to_p1[am.theta_p1_to_k[id]] == id);
  }
  CHECK(mapped == 500);
}

TEST_CASE("theta tables guard at vanishing denominators without losing W_0") {
  GroupSet gs = build_groups(5, 3);
  AmalgamData am = build_amalgam(gs);
  CHECK(!am.theta_skip_reason.empty());
  CHECK(am.W0_S.order() == 25);  // W_0 itself only needs the w vectors
  if (gs.P1) {
    REQUIRE(am.theta_p1_to_k.size() == gs.P1->order());
    CHECK(am.theta_p1_to_k[0] == UINT32_MAX);  // tables stay empty
  }
  // the normalizer parametrization is out of scope at m != p - 4
  CHECK_THROWS_AS(verify_theta_tables(gs, am), GuardExceeded);
  CHECK_THROWS_AS(verify_normalizer(gs, am), GuardExceeded);
}

TEST_CASE("existence search across the grid") {
  CheckList grid = check_existence_grid();
  CHECK(grid.all_pass());

  std::set<std::pair<u32, u32>> expected{{5, 1}, {7, 3}, {11, 7}, {13, 9}};
  for (u32 p : {3u, 5u, 7u, 11u, 13u})
    for (u32 m = 1; m <= p - 1; m += 2) {
      ExistenceResult er = search_existence(p, m);
      INFO("p=", p, " m=", m);
      CHECK(er.exists == (expected.count({p, m}) == 1));
      CHECK(er.third_eq_consistent);
      CHECK(er.roots_of_unity);
      CHECK(!er.general_field_note.empty());
      if (er.exists) {
        CHECK(er.divisibility);
        CHECK(er.solutions == static_cast<u64>(p - 1) * (p - 1));
        CHECK(er.witnesses.size() == p - 1);  // one per unit theta
        PrimeField fp(p);
        for (const auto& w : er.witnesses) {
          auto [theta, t, lam, mu] = w;
          // t mu^m = lambda mu^-1 = theta^-1 and t lambda^m = theta^2
          CHECK(fp.mul(t, fp.pow(mu, m)) == fp.inv(theta));
          CHECK(fp.div(lam, mu) == fp.inv(theta));
          CHECK(fp.mul(t, fp.pow(lam, m)) == fp.mul(theta, theta));
        }
      }
    }

  // (3,1) satisfies the divisibility screen but is excluded structurally
  ExistenceResult e31 = search_existence(3, 1);
  CHECK(e31.divisibility);
  CHECK(e31.excluded_p3);
  CHECK(!e31.exists);
}

TEST_CASE("the p = 3 exclusion computes its certificate") {
  CheckList out = verify_p3_exclusion();
  CHECK(out.all_pass());
  bool saw_wreath = false, saw_core = false;
  for (const Check& c : out.items) {
    if (c.id == "p3.s-is-c3wrc3") saw_wreath = true;
    if (c.id == "p3.u-core-trivial") saw_core = true;
  }
  CHECK(saw_wreath);
  CHECK(saw_core);
}

TEST_CASE("the subgroup search certifies the (5,1) amalgam inside the lattice") {
  const GroupSet& gs = groups51();
  Lattice lat = enumerate_subgroups(*gs.S, 5);
  CheckList out = existence_subgroup_search(gs, lat, amalgam51());
  CHECK(out.all_pass());
  bool matched = false;
  for (const Check& c : out.items)
    if (c.id == "exsearch.matches-existence") matched = c.pass;
  CHECK(matched);
}
