#pragma once

#include "fusionforge/subgroups.hpp"

namespace ff {

// w(alpha) = sum_{j=0}^m alpha^(j+1)/(j+1) * C(m,j) * X^j Y^(m-j).
// Defined for every odd m <= p-2 (the divisors j+1 stay below p).
PolyVec w_vector(const PolySpace& ps, u32 alpha);

// Closed form of w(lam) acted on by (1, [[a,0],[mu,b]]):
//   (b^(m+1)/a) * (w((a lam + mu)/b) - w(mu/b)).
PolyVec conjugate_w(const PolySpace& ps, u32 lam, u32 a, u32 b, u32 mu);

// The p^2 elements (gamma, w(gamma), delta) in S normal form. Closure under
// the S-product is a consequence of the conjugation formula, not an input.
std::vector<SElement> w0_elements(const PolySpace& ps);

// Parameters (a, b, lambda, tau, theta) with a, b nonzero, encoding
//   (a/b^(m+1), [[a,0],[b lambda, b]]) (w(lambda) + tau X^m, theta)
// as an element of P. These parametrize the normalizer of W_0 in P.
struct NormalizerElement {
  u32 a = 1, b = 1, lambda = 0, tau = 0, theta = 0;
  bool operator==(const NormalizerElement&) const = default;
};

PElement normalizer_to_p(const PolySpace& ps, const NormalizerElement& x);

// Recovers the parameters from a P-element of the shape above; returns false
// when the element is not of that shape. Works on any coset representative:
// scaling by the Q-centralizing scalars moves (a, b) but nothing else.
bool normalizer_from_p(const PolySpace& ps, const PElement& g, NormalizerElement* out);

// Closed-form product of two parametrized normalizer elements. Requires
// (m+1)(m+2) invertible mod p; direct multiplication is the ground truth this
// formula is verified against.
NormalizerElement norm_mul_closed(const PolySpace& ps, const NormalizerElement& x,
                                  const NormalizerElement& y);

// Image of a normalizer element in C <= SL_3:
//   [[1, 0, 0],
//    [(b/a) lambda,                                  b/a,         0  ],
//    [(a/b)(theta + lambda^(m+2)/((m+1)(m+2))
//           - lambda tau),                           -2 (a/b) tau, a/b]].
Mat3 theta_image(const PolySpace& ps, const NormalizerElement& x);

// All parameter tuples, ordered (a, b, lambda, tau, theta) ascending.
std::vector<NormalizerElement> normalizer_parameters(const PrimeField& fp);

// The two pairing identities and the conjugation closed form, exhaustively
// over their parameter tuples, plus structural facts about the W_0 element
// set at the struct level (no group tables needed). Throws GuardExceeded when
// (m+1)(m+2) = 0 mod p, where the pairing closed form is undefined.
CheckList check_w_identities(u32 p, u32 m);

// Closed-form product against direct semidirect multiplication over pairs of
// parameter tuples. Exhaustive when the pair count is small (p = 5), sampled
// otherwise; samples = 0 picks the default policy.
CheckList check_prod_formula(u32 p, u32 m, u64 samples = 0, u64 seed = 1);

// Theta at the parameter level: identity, image shape and determinant, kernel
// exactly the scalar tuples (u, u, 0, 0, 0), multiplicativity on pairs
// (exhaustive or sampled), image size p^3(p-1), and the restrictions to the
// W_0 and S-normalizer parameter slices hitting W and D bijectively.
CheckList verify_theta_struct(u32 p, u32 m, u64 samples = 0, u64 seed = 1);

// W_0 and its normalizers materialized inside the group tables of a build.
struct AmalgamData {
  Subgroup W0_S;    // W_0 as a subgroup of S
  Subgroup DS_S;    // N_S(W_0)
  Subgroup W0_P1;   // image of W_0 in P_1 (empty when P_1 was guarded off)
  Subgroup NW0_P1;  // N_{P_1}(W_0), computed by direct search
  // Theta as id dictionaries: P_1 id -> K id on N_{P_1}(W_0), K id -> P_1 id
  // on C; entries outside the domain hold UINT32_MAX.
  std::vector<u32> theta_p1_to_k;
  std::vector<u32> theta_k_to_p1;
  // Set when the closed form behind Theta is unavailable at these parameters
  // (vanishing denominators); the tables are then left empty.
  std::string theta_skip_reason;
};

AmalgamData build_amalgam(const GroupSet& gs);

// W_0 structure inside S, N_S(W_0) of order p^3, and (when P_1 is present)
// the brute-force normalizer against the parametrized set, order p^3(p-1).
CheckList verify_normalizer(const GroupSet& gs, const AmalgamData& am);

// Table-level Theta facts: multiplicativity over all pairs of N_{P_1}(W_0),
// bijectivity onto C, W_0 onto W, N_S(W_0) onto D, and round-trip dictionary
// consistency. Requires P_1.
CheckList verify_theta_tables(const GroupSet& gs, const AmalgamData& am);

// Verdict of the existence search at one (p, m).
struct ExistenceResult {
  u32 p = 0, m = 0;
  bool divisibility = false;       // (p-1) | (m+3)
  bool all_realized = false;       // every unit theta admits a solution
  bool excluded_p3 = false;        // the p=3, m=1 case is ruled out separately
  bool exists = false;             // all_realized && !excluded_p3
  bool third_eq_consistent = true; // t^2 (lambda mu)^m = theta on every solution
  bool roots_of_unity = true;      // theta^(m+3) = 1 for every realized theta
  u64 solutions = 0;
  std::vector<u32> unrealized;                 // thetas with no solution
  std::vector<std::array<u32, 4>> witnesses;   // (theta, t, lambda, mu), one per theta
  std::string general_field_note;
};

// Enumerates all (t, lambda, mu) in (F^x)^3 satisfying
//   t mu^m = lambda mu^-1 = theta^-1   and   t lambda^m = theta^2
// for each unit theta. The third constraint t^2 (lambda mu)^m = theta (from
// the action on the center) is checked to be implied by the first two.
ExistenceResult search_existence(u32 p, u32 m);

// Existence verdicts over every odd m for p in {3,5,7,11,13}: EXISTS exactly
// at m = p-4, the divisibility criterion agrees with the enumeration, and the
// derived consistency facts hold throughout.
CheckList check_existence_grid();

// The order-81 case: U of index 9 with trivial core, the elementary-abelian
// order-9 census dichotomy, the formal W_0 being cyclic of order 9, and the
// wreath-product identification of S.
CheckList verify_p3_exclusion(const BuildGuards& guards = {});

// Opt-in direct search: every order-p^2 subgroup of S containing Z(Q) whose
// P_1-normalizer is isomorphic to C by an isomorphism carrying it onto W.
// Requires P_1 and the subgroup lattice of S.
CheckList existence_subgroup_search(const GroupSet& gs, const Lattice& lat,
                                    const AmalgamData& am);

}  // namespace ff
