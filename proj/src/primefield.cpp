#include "fusionforge/primefield.hpp"

namespace ff {

namespace {
bool small_odd_prime(u32 p) {
  if (p < 3 || p > 13 || p % 2 == 0) return false;
  for (u32 d = 3; d * d <= p; d += 2)
    if (p % d == 0) return false;
  return true;
}
}  // namespace

PrimeField::PrimeField(u32 p) : p_(p) {
  if (!small_odd_prime(p))
    throw std::invalid_argument("PrimeField: p must be an odd prime with 3 <= p <= 13, got " +
                                std::to_string(p));

  inv_.assign(p_, 0);
  for (u32 a = 1; a < p_; ++a)
    for (u32 b = 1; b < p_; ++b)
      if (a * b % p_ == 1) { inv_[a] = b; break; }

  pascal_.assign(p_, {});
  for (u32 n = 0; n < p_; ++n) {
    pascal_[n].assign(n + 1, 1);
    for (u32 k = 1; k < n; ++k)
      pascal_[n][k] = add(pascal_[n - 1][k - 1], pascal_[n - 1][k]);
  }

  for (u32 g = 2; g < p_; ++g) {
    u32 x = g, ord = 1;
    while (x != 1) { x = mul(x, g); ++ord; }
    if (ord == p_ - 1) { root_ = g; break; }
  }
}

u32 PrimeField::pow(u32 a, i64 e) const {
  if (e < 0) { a = inv(a); e = -e; }
  u32 r = 1;
  while (e > 0) {
    if (e & 1) r = mul(r, a);
    a = mul(a, a);
    e >>= 1;
  }
  return r;
}

u32 PrimeField::binom(u32 n, u32 k) const {
  if (n >= p_ || k > n)
    throw std::out_of_range("PrimeField::binom: need 0 <= k <= n <= p-1");
  return pascal_[n][k];
}

std::vector<u32> PrimeField::units() const {
  std::vector<u32> u(p_ - 1);
  for (u32 a = 1; a < p_; ++a) u[a - 1] = a;
  return u;
}

}  // namespace ff
