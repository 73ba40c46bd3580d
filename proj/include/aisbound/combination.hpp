#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "power_level.hpp"
#include "rational.hpp"

namespace aisbound {

enum class CoeffKind { BoundedDensity, Fixed };

struct BandSelector {
  Rat lo, hi;  // window (x)^hi_lo of the source signal
};

struct TrimPair {
  Rat gamma, delta;  // (x)^gamma_delta inside the selected band; gamma <= delta reads as zero
};

struct CombinationTerm {
  int source = 0;
  std::optional<BandSelector> band;  // absent: the whole source signal
  std::optional<TrimPair> trim;      // absent: identity
  CoeffKind kind = CoeffKind::BoundedDensity;
  double fixed_value = 0.0;
};

/**
 * A floor linear combination sum_i pfloor(c_i * trimmed_i). Terms carry their
 * own band selection and trim; coefficients are either per-draw random or
 * frozen constants.
 */
struct CombinationSpec {
  std::vector<CombinationTerm> terms;

  std::size_t k() const noexcept { return terms.size(); }

  std::size_t bounded_term_count() const {
    std::size_t n = 0;
    for (const auto &t : terms) n += (t.kind == CoeffKind::BoundedDensity) ? 1 : 0;
    return n;
  }
};

// Applies a term's band selection and trim to a raw source value.
inline Value term_signal(const PowerContext &ctx, const CombinationTerm &term, Value raw) {
  Value v = raw;
  if (term.band) v = part_window(ctx, v, term.band->lo, term.band->hi);
  if (term.trim) v = part_window(ctx, v, term.trim->delta, term.trim->gamma);
  return v;
}

// Reference evaluation. `values` are the raw per-term source values in term
// order; `coeffs` are the realized per-term coefficients.
inline Value lincomb(const PowerContext &ctx, const CombinationSpec &spec,
                     const std::vector<Value> &values, const std::vector<double> &coeffs) {
  if (values.size() != spec.terms.size() || coeffs.size() != spec.terms.size())
    throw std::invalid_argument("lincomb: coefficient/term count mismatch");
  Value acc = 0;
  for (std::size_t i = 0; i < spec.terms.size(); ++i)
    acc += pfloor(coeffs[i] * static_cast<double>(term_signal(ctx, spec.terms[i], values[i])));
  return acc;
}

// Effective alphabet level of one term's variable: the band width when a
// window is selected, the source's full level otherwise.
inline Rat term_level(const CombinationTerm &term, const std::vector<Rat> &eta) {
  Rat level = term.band ? positive_part(term.band->hi - term.band->lo)
                        : eta.at(static_cast<std::size_t>(term.source));
  return level;
}

// T-length: max over terms of min(eta_j, (gamma_j - delta_j)+).
inline Rat t_length(const CombinationSpec &spec, const std::vector<Rat> &eta) {
  Rat best(0);
  for (const auto &term : spec.terms) {
    Rat level = term_level(term, eta);
    if (term.trim) level = rat_min(level, positive_part(term.trim->gamma - term.trim->delta));
    best = rat_max(best, level);
  }
  return best;
}

// k * delta2 * pbar^T, rounded up. Every lincomb output of the spec has
// magnitude at most this value.
inline Value range_bound(const CombinationSpec &spec, const std::vector<Rat> &eta,
                         const PowerContext &ctx, double delta2) {
  if (spec.terms.empty()) return 0;
  double bound = static_cast<double>(spec.k()) * delta2 *
                 static_cast<double>(ctx.band(t_length(spec, eta)));
  if (bound >= 9.0e18) throw std::domain_error("range_bound: overflows 64-bit range");
  return static_cast<Value>(std::ceil(bound));
}

}  // namespace aisbound
