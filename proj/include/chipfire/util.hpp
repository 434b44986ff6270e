#pragma once

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

namespace chipfire {

// Thrown when a run exceeds its firing budget; a guard against runaway
// dynamics, not an expected outcome on this graph family.
class StepBudgetExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Checked signed 64-bit arithmetic. Chip statistics are quadratic in vertex
// positions, so silent wraparound would corrupt verdicts long before anything
// else fails; every statistic and closed form funnels through these.

inline std::int64_t checked_add(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_add_overflow(a, b, &r)) throw std::overflow_error("int64 add overflow");
  return r;
}

inline std::int64_t checked_sub(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_sub_overflow(a, b, &r)) throw std::overflow_error("int64 sub overflow");
  return r;
}

inline std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_mul_overflow(a, b, &r)) throw std::overflow_error("int64 mul overflow");
  return r;
}

// C(n, k) without intermediate overflow for the sizes used here (chip counts
// per vertex). Throws if the exact value does not fit in int64.
inline std::int64_t binomial(std::int64_t n, std::int64_t k) {
  if (k < 0 || n < 0) throw std::invalid_argument("binomial: negative argument");
  if (k > n) return 0;
  if (k > n - k) k = n - k;
  std::int64_t r = 1;
  for (std::int64_t i = 1; i <= k; ++i) {
    // r * (n - k + i) is divisible by i at this point, but multiply first
    // only when safe; fall back to gcd-free exact order: r = r*(n-k+i)/i.
    r = checked_mul(r, n - k + i);
    r /= i;
  }
  return r;
}

// Total-firing budget for a run driven by `chips` chips: a generous cubic
// bound. Stabilizing n chips from one stack fires Theta(n^3) times on every
// graph treated here, so exceeding this signals a runaway, not a slow run.
inline std::int64_t default_step_budget(std::int64_t chips) {
  const std::int64_t c = chips < 1 ? 1 : chips;
  std::int64_t cube;
  if (__builtin_mul_overflow(c, c, &cube) || __builtin_mul_overflow(cube, c, &cube)) {
    return std::numeric_limits<std::int64_t>::max();
  }
  std::int64_t budget;
  if (__builtin_add_overflow(cube, std::int64_t{1} << 20, &budget)) {
    return std::numeric_limits<std::int64_t>::max();
  }
  return budget;
}

inline std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

}  // namespace chipfire
