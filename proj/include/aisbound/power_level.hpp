#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "rational.hpp"

namespace aisbound {

using Value = long long;
using IntVector = std::vector<Value>;

// Integer part with truncation toward zero, so pfloor(-x) == -pfloor(x) and
// integers map to themselves. This is the floor convention used by every
// combination and partition in the toolkit.
inline Value pfloor(double x) {
  if (!std::isfinite(x)) throw std::domain_error("pfloor: non-finite argument");
  if (std::fabs(x) >= 9.0e18) throw std::domain_error("pfloor: magnitude overflows 64-bit range");
  return static_cast<Value>(x);
}

/** Power budget with cached integer band sizes floor(P^(lambda/2)). */
class PowerContext {
 public:
  explicit PowerContext(double p) : p_(p) {
    if (!(p >= 1.0) || !std::isfinite(p))
      throw std::domain_error("PowerContext: P must be a finite real >= 1");
  }

  double P() const noexcept { return p_; }

  // floor(P^(lambda/2)), with a snap to the nearest integer n when the
  // floating evaluation lands within 1e-9*n of it. The snap keeps dyadic
  // grids exact: pow(65536, 0.75) must give 4096, not 4095.
  Value band(const Rat &level) const {
    if (level < Rat(0)) throw std::domain_error("band: negative level");
    auto it = cache_.find(level);
    if (it != cache_.end()) return it->second;
    long double exponent = static_cast<long double>(level.numerator()) /
                           (2.0L * static_cast<long double>(level.denominator()));
    long double raw = std::pow(static_cast<long double>(p_), exponent);
    if (raw >= 9.0e18L) throw std::domain_error("band: size overflows 64-bit range");
    long double nearest = std::nearbyint(raw);
    Value result;
    if (nearest >= 1.0L && std::fabs(raw - nearest) < 1e-9L * nearest)
      result = static_cast<Value>(nearest);
    else
      result = static_cast<Value>(std::floor(raw));
    cache_.emplace(level, result);
    return result;
  }

  // Alphabet {0, ..., band(level)-1} size; named for call-site readability.
  Value alphabet_size(const Rat &level) const { return band(level); }

  double log2_pbar() const { return std::log2(static_cast<double>(band(Rat(1)))); }

 private:
  double p_;
  mutable std::map<Rat, Value> cache_;
};

namespace detail {
inline void require_nonnegative(Value x, const char *op) {
  if (x < 0) throw std::domain_error(std::string(op) + ": negative signal value");
}
}  // namespace detail

// Bottom partition (X)_lambda = X - B*floor(X/B) with B = band(lambda).
inline Value part_low_raw(Value x, Value band) {
  detail::require_nonnegative(x, "part_low");
  if (band <= 0) throw std::domain_error("part_low: empty band");
  return x % band;
}

inline Value part_low(const PowerContext &ctx, Value x, const Rat &level) {
  return part_low_raw(x, ctx.band(level));
}

// Window partition (X)^hi_lo = floor((X mod band(hi)) / band(lo)).
// A window with hi <= lo carries no levels and reads as zero.
inline Value part_window_raw(Value x, Value band_lo, Value band_hi) {
  detail::require_nonnegative(x, "part_window");
  if (band_lo <= 0 || band_hi <= 0) throw std::domain_error("part_window: empty band");
  return (x % band_hi) / band_lo;
}

inline Value part_window(const PowerContext &ctx, Value x, const Rat &lo, const Rat &hi) {
  if (hi <= lo) {
    detail::require_nonnegative(x, "part_window");
    return 0;
  }
  return part_window_raw(x, ctx.band(lo), ctx.band(hi));
}

// Splits X into per-band digits under the compositional layout: band i has
// capacity band(levels[i]) and bands stack by multiplication of capacities,
// least significant first. composing the digits back (x1 + c1*(x2 + c2*(...)))
// reproduces X exactly. Matches the window partitions whenever the band
// capacities compose exactly, in particular for every two-band layout.
inline IntVector decompose(const PowerContext &ctx, Value x, const std::vector<Rat> &levels) {
  detail::require_nonnegative(x, "decompose");
  if (levels.empty()) throw std::invalid_argument("decompose: no levels");
  IntVector digits;
  digits.reserve(levels.size());
  Value rest = x;
  for (const Rat &level : levels) {
    Value cap = ctx.band(level);
    digits.push_back(rest % cap);
    rest /= cap;
  }
  if (rest != 0) throw std::domain_error("decompose: value exceeds layout capacity");
  return digits;
}

inline Value compose(const PowerContext &ctx, const IntVector &digits,
                     const std::vector<Rat> &levels) {
  if (digits.size() != levels.size())
    throw std::invalid_argument("compose: digit/level arity mismatch");
  Value x = 0;
  for (std::size_t i = digits.size(); i-- > 0;) {
    Value cap = ctx.band(levels[i]);
    if (digits[i] < 0 || digits[i] >= cap) throw std::domain_error("compose: digit out of band");
    x = x * cap + digits[i];
  }
  return x;
}

inline IntVector concat(const IntVector &a, const IntVector &b) {
  IntVector out(a);
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

// Cyclic slice [v_(m+1), ..., v_(m+n)] of a k-vector, wrapping past the end
// at most once.
inline IntVector rotate(const IntVector &v, std::size_t m, std::size_t n) {
  const std::size_t k = v.size();
  if (k == 0) throw std::invalid_argument("rotate: empty vector");
  if (m >= k || n >= k) throw std::invalid_argument("rotate: slice out of range");
  IntVector out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(v[(m + i) % k]);
  return out;
}

}  // namespace aisbound
