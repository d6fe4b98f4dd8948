#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "fusionforge/primefield.hpp"

using namespace ff;

namespace {
const u32 kPrimes[] = {3, 5, 7, 11, 13};
}

TEST_CASE("constructor accepts exactly the supported primes") {
  for (u32 p : kPrimes) CHECK_NOTHROW(PrimeField{p});
  for (u32 p : {0u, 1u, 2u, 4u, 6u, 9u, 15u, 17u})
    CHECK_THROWS_AS(PrimeField{p}, std::invalid_argument);
}

TEST_CASE("ring operations agree with signed arithmetic") {
  for (u32 p : kPrimes) {
    PrimeField fp(p);
    for (u32 a = 0; a < p; ++a) {
      CHECK(fp.neg(a) == (p - a) % p);
      for (u32 b = 0; b < p; ++b) {
        CHECK(fp.add(a, b) == (a + b) % p);
        CHECK(fp.mul(a, b) == (a * b) % p);
        CHECK(fp.sub(a, b) == (a + p - b) % p);
        CHECK(fp.add(fp.sub(a, b), b) == a);
      }
    }
  }
}

TEST_CASE("inverses match a brute-force search") {
  for (u32 p : kPrimes) {
    PrimeField fp(p);
    for (u32 a = 1; a < p; ++a) {
      u32 want = 0;
      for (u32 b = 1; b < p; ++b)
        if (a * b % p == 1) want = b;
      CHECK(fp.inv(a) == want);
      CHECK(fp.mul(a, fp.inv(a)) == 1);
      for (u32 c = 0; c < p; ++c) CHECK(fp.mul(fp.div(c, a), a) == c);
    }
    CHECK_THROWS_AS(fp.inv(0), std::domain_error);
  }
}

TEST_CASE("pow matches repeated multiplication and inverts cleanly") {
  for (u32 p : kPrimes) {
    PrimeField fp(p);
    for (u32 a = 0; a < p; ++a) {
      u32 acc = 1;
      for (i64 e = 0; e <= 2 * static_cast<i64>(p); ++e) {
        CHECK(fp.pow(a, e) == acc);
        acc = fp.mul(acc, a);
      }
      if (a != 0)
        for (i64 e = 1; e <= static_cast<i64>(p); ++e)
          CHECK(fp.pow(a, -e) == fp.inv(fp.pow(a, e)));
    }
    CHECK(fp.pow(0, 0) == 1);
    CHECK_THROWS_AS(fp.pow(0, -1), std::domain_error);
    // Fermat: a^(p-1) = 1 for units.
    for (u32 a = 1; a < p; ++a) CHECK(fp.pow(a, p - 1) == 1);
  }
}

TEST_CASE("reduce produces the canonical residue of signed integers") {
  for (u32 p : kPrimes) {
    PrimeField fp(p);
    for (i64 x = -300; x <= 300; ++x) {
      i64 r = ((x % p) + p) % p;
      CHECK(fp.reduce(x) == static_cast<u32>(r));
    }
  }
}

TEST_CASE("binomial table matches the Pascal recurrence") {
  for (u32 p : kPrimes) {
    PrimeField fp(p);
    // independent oracle: integer Pascal triangle reduced mod p
    std::vector<std::vector<u64>> pas(p);
    for (u32 n = 0; n < p; ++n) {
      pas[n].assign(n + 1, 1);
      for (u32 k = 1; k < n; ++k) pas[n][k] = pas[n - 1][k - 1] + pas[n - 1][k];
    }
    for (u32 n = 0; n < p; ++n)
      for (u32 k = 0; k <= n; ++k)
        CHECK(fp.binom(n, k) == pas[n][k] % p);
    CHECK_THROWS_AS(fp.binom(p, 0), std::out_of_range);
    CHECK_THROWS_AS(fp.binom(1, 2), std::out_of_range);
  }
}

TEST_CASE("primitive root generates the full unit group") {
  for (u32 p : kPrimes) {
    PrimeField fp(p);
    u32 g = fp.primitive_root();
    std::vector<bool> hit(p, false);
    u32 x = 1;
    for (u32 e = 1; e < p; ++e) {
      x = fp.mul(x, g);
      CHECK((x == 1) == (e == p - 1));  // order exactly p-1
      hit[x] = true;
    }
    for (u32 a = 1; a < p; ++a) CHECK(hit[a]);

    std::vector<u32> us = fp.units();
    REQUIRE(us.size() == p - 1);
    for (u32 a = 1; a < p; ++a) CHECK(us[a - 1] == a);
  }
}

TEST_CASE("guard exception is a runtime error with its message") {
  GuardExceeded e("too big");
  CHECK(std::string(e.what()) == "too big");
  const std::runtime_error& base = e;
  CHECK(std::string(base.what()) == "too big");
}
