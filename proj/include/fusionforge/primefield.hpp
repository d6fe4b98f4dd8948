#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace ff {

using u8 = std::uint8_t;
using u32 = std::uint32_t;
using u64 = std::uint64_t;
using i64 = std::int64_t;

inline constexpr const char* kVersion = "1.0.0";

// Thrown when a requested computation exceeds a configured enumeration guard.
struct GuardExceeded : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Arithmetic in F_p for a small odd prime p, 3 <= p <= 13.
// Residues are canonical: every input and output lies in [0, p).
// Inverses and binomial coefficients are table-driven; all operations are exact.
class PrimeField {
public:
  explicit PrimeField(u32 p);

  u32 p() const noexcept { return p_; }

  u32 add(u32 a, u32 b) const noexcept { u32 s = a + b; return s >= p_ ? s - p_ : s; }
  u32 sub(u32 a, u32 b) const noexcept { return a >= b ? a - b : a + p_ - b; }
  u32 neg(u32 a) const noexcept { return a == 0 ? 0 : p_ - a; }
  u32 mul(u32 a, u32 b) const noexcept { return a * b % p_; }

  // Multiplicative inverse; throws std::domain_error on zero.
  u32 inv(u32 a) const {
    if (a == 0) throw std::domain_error("PrimeField::inv: zero has no inverse");
    return inv_[a];
  }
  u32 div(u32 a, u32 b) const { return mul(a, inv(b)); }

  // a^e with e of either sign; 0^0 = 1, negative powers of zero throw.
  u32 pow(u32 a, i64 e) const;

  // Canonical residue of an arbitrary signed integer.
  u32 reduce(i64 x) const noexcept {
    i64 r = x % static_cast<i64>(p_);
    return static_cast<u32>(r < 0 ? r + p_ : r);
  }

  // C(n, k) mod p for 0 <= k <= n <= p-1 (Pascal table; throws out_of_range beyond it).
  u32 binom(u32 n, u32 k) const;

  // First generator of the multiplicative group, by exhaustive order check.
  u32 primitive_root() const noexcept { return root_; }

  std::vector<u32> units() const;  // 1..p-1

private:
  u32 p_ = 0;
  u32 root_ = 0;
  std::vector<u32> inv_;
  std::vector<std::vector<u32>> pascal_;
};

}  // namespace ff
