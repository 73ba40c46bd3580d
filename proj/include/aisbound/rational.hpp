#pragma once

#include <boost/rational.hpp>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace aisbound {

// Exact rational scalar used for power levels, trim exponents, region
// coordinates and certificate weights. Numerators and denominators in this
// domain stay small (|num|, den < 10^6), far from int64 overflow.
using Rat = boost::rational<long long>;

inline Rat rat(long long num, long long den = 1) {
  if (den == 0) throw std::invalid_argument("rational: zero denominator");
  return Rat(num, den);
}

inline double to_double(const Rat &r) {
  return static_cast<double>(r.numerator()) / static_cast<double>(r.denominator());
}

// Parses "13/9", "-3/4", "2" or "0.25"-free integer forms. Whitespace is not
// accepted; fractions must be fully reduced only on output, not input.
inline Rat parse_rat(const std::string &text) {
  if (text.empty()) throw std::invalid_argument("rational: empty string");
  std::size_t slash = text.find('/');
  try {
    if (slash == std::string::npos) {
      std::size_t used = 0;
      long long v = std::stoll(text, &used);
      if (used != text.size()) throw std::invalid_argument(text);
      return Rat(v);
    }
    std::size_t used_num = 0, used_den = 0;
    const std::string num_part = text.substr(0, slash);
    const std::string den_part = text.substr(slash + 1);
    long long num = std::stoll(num_part, &used_num);
    long long den = std::stoll(den_part, &used_den);
    if (used_num != num_part.size() || used_den != den_part.size() || den == 0)
      throw std::invalid_argument(text);
    return Rat(num, den);
  } catch (const std::exception &) {
    throw std::invalid_argument("rational: cannot parse '" + text + "'");
  }
}

inline std::string rat_to_string(const Rat &r) {
  if (r.denominator() == 1) return std::to_string(r.numerator());
  return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

// (x)+ on exact levels.
inline Rat positive_part(const Rat &r) { return r > Rat(0) ? r : Rat(0); }

inline Rat rat_min(const Rat &a, const Rat &b) { return a < b ? a : b; }
inline Rat rat_max(const Rat &a, const Rat &b) { return a < b ? b : a; }

}  // namespace aisbound
