#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "coefficients.hpp"
#include "combination.hpp"
#include "entropy.hpp"
#include "power_level.hpp"
#include "rational.hpp"
#include "rng.hpp"

namespace aisbound {

enum class InputModelKind { ProductUniform, SharedUniform, Table };

// Joint input law for the N sources of one letter. ProductUniform draws each
// source independently and uniformly on its alphabet; SharedUniform sets
// X_1 = ... = X_N uniform (the fully dependent case); Table is an explicit
// joint law whose tuples hold either N values (i.i.d. across letters) or
// N*letters values (one block row per tuple).
struct InputModel {
  InputModelKind kind = InputModelKind::ProductUniform;
  JointTable table;
};

struct TrimOverride {
  int k = 1, l = 1;     // output combination, 1-based as in instance files
  int band = 1;         // element of I_{k,l}
  int source = 1;       // 1-based source index
  TrimPair trim;
};

/** Raised when an index-set family breaks the monotone applicability shape. */
class MonotoneIndexError : public std::invalid_argument {
 public:
  MonotoneIndexError(int k, int a, int b)
      : std::invalid_argument("index sets: min I_{" + std::to_string(k) + "," +
                              std::to_string(a) + "} < min I_{" + std::to_string(k) + "," +
                              std::to_string(b) + "} with a < b"),
        k_(k), a_(a), b_(b) {}
  int k() const noexcept { return k_; }
  int a() const noexcept { return a_; }
  int b() const noexcept { return b_; }

 private:
  int k_, a_, b_;
};

/**
 * Declarative sum-set inequality instance: K floor-linear channel outputs of
 * N banded sources, the banded-and-trimmed output family Z_{k,l} they must
 * dominate, the input law, optional conditioning W, and the coefficient
 * sampler family.
 */
struct TheoremInstance {
  int sources = 2;  // N
  int outputs = 1;  // K
  int letters = 1;  // n
  std::vector<std::vector<Rat>> level_grid;              // K rows of M levels
  std::vector<std::vector<std::vector<int>>> index_sets; // per k: l_k sets, 1-based band ids
  std::vector<TrimOverride> trims;
  InputModel input;
  std::optional<CombinationSpec> conditioning;  // W over raw source signals
  SamplerConfig sampler;
  CoeffKind rhs_kind = CoeffKind::Fixed;
  std::uint64_t seed = 1;

  int bands() const { return level_grid.empty() ? 0 : static_cast<int>(level_grid[0].size()); }

  // Level prefix sums of output k's grid: prefix(k, i) = lambda_{k,1..i} summed.
  Rat prefix(int k, int i) const {
    Rat sum(0);
    for (int m = 0; m < i; ++m) sum += level_grid[static_cast<std::size_t>(k)][static_cast<std::size_t>(m)];
    return sum;
  }

  Rat total_level(int k) const { return prefix(k, bands()); }

  // Shared source alphabet level: the largest per-k total.
  Rat alphabet_level() const {
    Rat best(0);
    for (int k = 0; k < outputs; ++k) best = rat_max(best, total_level(k));
    return best;
  }

  void validate() const {
    if (sources < 1) throw std::invalid_argument("instance: need at least one source");
    if (outputs < 1) throw std::invalid_argument("instance: need at least one output");
    if (outputs > sources)
      throw std::invalid_argument("instance: more outputs than sources (K must be <= N)");
    if (letters < 1) throw std::invalid_argument("instance: letters must be >= 1");
    if (level_grid.size() != static_cast<std::size_t>(outputs))
      throw std::invalid_argument("instance: level_grid must have one row per output");
    const int m = bands();
    if (m < 1) throw std::invalid_argument("instance: empty level grid");
    for (const auto &row : level_grid) {
      if (row.size() != static_cast<std::size_t>(m))
        throw std::invalid_argument("instance: ragged level grid");
      for (const Rat &level : row)
        if (level < Rat(0)) throw std::invalid_argument("instance: negative level");
    }
    if (index_sets.size() != static_cast<std::size_t>(outputs))
      throw std::invalid_argument("instance: index_sets must have one family per output");
    for (int k = 0; k < outputs; ++k) {
      const auto &family = index_sets[static_cast<std::size_t>(k)];
      if (family.empty()) throw std::invalid_argument("instance: output with no index sets");
      for (const auto &set : family) {
        if (set.empty()) throw std::invalid_argument("instance: empty index set");
        for (int i : set)
          if (i < 1 || i > m) throw std::invalid_argument("instance: band index outside [M]");
      }
      for (std::size_t a = 0; a < family.size(); ++a)
        for (std::size_t b = a + 1; b < family.size(); ++b) {
          int ma = *std::min_element(family[a].begin(), family[a].end());
          int mb = *std::min_element(family[b].begin(), family[b].end());
          if (ma < mb)
            throw MonotoneIndexError(k + 1, static_cast<int>(a) + 1, static_cast<int>(b) + 1);
        }
    }
    for (const auto &t : trims) {
      if (t.k < 1 || t.k > outputs || t.l < 1 ||
          t.l > static_cast<int>(index_sets[static_cast<std::size_t>(t.k - 1)].size()))
        throw std::invalid_argument("instance: trim override outside declared outputs");
      const auto &set = index_sets[static_cast<std::size_t>(t.k - 1)][static_cast<std::size_t>(t.l - 1)];
      if (std::find(set.begin(), set.end(), t.band) == set.end())
        throw std::invalid_argument("instance: trim override band not in its index set");
      if (t.source < 1 || t.source > sources)
        throw std::invalid_argument("instance: trim override source outside [N]");
      Rat width = level_grid[static_cast<std::size_t>(t.k - 1)][static_cast<std::size_t>(t.band - 1)];
      if (t.trim.delta < Rat(0) || t.trim.gamma > width)
        throw std::invalid_argument("instance: trim override outside its band");
    }
    if (input.kind == InputModelKind::Table) {
      input.table.validate();
      std::size_t arity = input.table.names.size();
      if (arity != static_cast<std::size_t>(sources) &&
          arity != static_cast<std::size_t>(sources * letters))
        throw std::invalid_argument("instance: table arity must be N or N*letters");
    }
    if (conditioning) {
      for (const auto &term : conditioning->terms)
        if (term.source < 0 || term.source >= sources)
          throw std::invalid_argument("instance: conditioning term source outside [N]");
    }
  }
};

struct LevelConditionEntry {
  int k = 0, s = 0;           // 1-based, s indexes the split point
  Rat tail_t_sum{0};          // sum of T(Z_{k,s+1..l_k}) via t_length
  Rat tail_t_sum_direct{0};   // same sum from the trimmed-form expansion
  Rat level_prefix{0};        // lambda_{k,1} + ... + lambda_{k,m(k,s)-1}
  bool ok = false;
};

/** Instance compiled to concrete combination specs (level-based, P-free). */
struct InstanceMaps {
  std::vector<CombinationSpec> lhs;            // Z_k, one per output
  std::vector<std::pair<int, int>> rhs_ids;    // flat (k, l), 1-based
  std::vector<CombinationSpec> rhs;            // Z_{k,l}, flattened
  std::optional<CombinationSpec> w;
  std::vector<Rat> eta;                        // per-source alphabet levels
  Rat alphabet_level{0};

  int rhs_flat_index(int k, int l) const {
    for (std::size_t i = 0; i < rhs_ids.size(); ++i)
      if (rhs_ids[i].first == k && rhs_ids[i].second == l) return static_cast<int>(i);
    throw std::invalid_argument("rhs_flat_index: no such (k,l)");
  }
};

inline InstanceMaps build_maps(const TheoremInstance &inst) {
  inst.validate();
  InstanceMaps maps;
  maps.alphabet_level = inst.alphabet_level();
  maps.eta.assign(static_cast<std::size_t>(inst.sources), maps.alphabet_level);

  for (int k = 0; k < inst.outputs; ++k) {
    CombinationSpec z;
    for (int j = 0; j < inst.sources; ++j) {
      CombinationTerm term;
      term.source = j;
      term.kind = CoeffKind::BoundedDensity;
      z.terms.push_back(term);
    }
    maps.lhs.push_back(std::move(z));
  }

  for (int k = 0; k < inst.outputs; ++k) {
    const auto &family = inst.index_sets[static_cast<std::size_t>(k)];
    for (int l = 0; l < static_cast<int>(family.size()); ++l) {
      CombinationSpec z;
      std::vector<int> set = family[static_cast<std::size_t>(l)];
      std::sort(set.begin(), set.end());
      for (int i : set) {
        for (int j = 0; j < inst.sources; ++j) {
          CombinationTerm term;
          term.source = j;
          term.band = BandSelector{inst.prefix(k, i - 1), inst.prefix(k, i)};
          term.kind = inst.rhs_kind;
          for (const auto &ov : inst.trims)
            if (ov.k == k + 1 && ov.l == l + 1 && ov.band == i && ov.source == j + 1)
              term.trim = ov.trim;
          z.terms.push_back(term);
        }
      }
      maps.rhs_ids.emplace_back(k + 1, l + 1);
      maps.rhs.push_back(std::move(z));
    }
  }
  maps.w = inst.conditioning;
  return maps;
}

// Draws one frozen constant per fixed-kind term of the dominated outputs, in
// canonical order, and writes it into the spec. Bounded-density terms keep
// their per-draw semantics.
inline void freeze_rhs_coefficients(InstanceMaps &maps, const TheoremInstance &inst) {
  CoefficientSampler sampler(inst.sampler, derive_seed(inst.seed, 0xF12E2Eull));
  for (auto &spec : maps.rhs)
    for (auto &term : spec.terms)
      if (term.kind == CoeffKind::Fixed) term.fixed_value = sampler.draw_coefficients(1)[0];
}

// Applicability check: for every k and split s, the T-lengths of the tail
// outputs must fit under the level prefix below min I_{k,s}. Both the
// t_length route and the direct trimmed-form expansion are reported.
inline std::vector<LevelConditionEntry> check_level_condition(const TheoremInstance &inst) {
  inst.validate();
  InstanceMaps maps = build_maps(inst);
  std::vector<LevelConditionEntry> entries;
  for (int k = 0; k < inst.outputs; ++k) {
    const auto &family = inst.index_sets[static_cast<std::size_t>(k)];
    const int lk = static_cast<int>(family.size());
    for (int s = 1; s <= lk - 1; ++s) {
      LevelConditionEntry e;
      e.k = k + 1;
      e.s = s;
      for (int r = s + 1; r <= lk; ++r) {
        const CombinationSpec &spec = maps.rhs[static_cast<std::size_t>(maps.rhs_flat_index(k + 1, r))];
        e.tail_t_sum += t_length(spec, maps.eta);

        Rat direct(0);
        for (int i : family[static_cast<std::size_t>(r - 1)]) {
          Rat width = inst.level_grid[static_cast<std::size_t>(k)][static_cast<std::size_t>(i - 1)];
          for (int j = 1; j <= inst.sources; ++j) {
            Rat contribution = width;
            for (const auto &ov : inst.trims)
              if (ov.k == k + 1 && ov.l == r && ov.band == i && ov.source == j)
                contribution = rat_min(width, positive_part(ov.trim.gamma - ov.trim.delta));
            direct = rat_max(direct, contribution);
          }
        }
        e.tail_t_sum_direct += direct;
      }
      const auto &split_set = family[static_cast<std::size_t>(s - 1)];
      int m_ks = *std::min_element(split_set.begin(), split_set.end());
      e.level_prefix = inst.prefix(k, m_ks - 1);
      e.ok = e.tail_t_sum <= e.level_prefix;
      entries.push_back(e);
    }
  }
  return entries;
}

inline bool level_condition_holds(const TheoremInstance &inst) {
  for (const auto &e : check_level_condition(inst))
    if (!e.ok) return false;
  return true;
}

// The two-band, one-output special case: X_1, X_2 with levels (lambda1,
// lambda2) stacked, Z_{1,1} on the top band, Z_{1,2} on bottom then top.
inline TheoremInstance theorem1_instance(const Rat &lambda1, const Rat &lambda2) {
  if (lambda1 < Rat(0) || lambda2 < Rat(0))
    throw std::invalid_argument("theorem1_instance: negative level");
  TheoremInstance inst;
  inst.sources = 2;
  inst.outputs = 1;
  inst.letters = 1;
  inst.level_grid = {{lambda1, lambda2}};
  inst.index_sets = {{{2}, {1, 2}}};
  return inst;
}

struct RealizedOutputs {
  IntVector z;    // K values
  IntVector zkl;  // flattened Z_{k,l} values in rhs_ids order
};

// Reference per-letter evaluation used by tests and small oracles. The lhs
// coefficient block is indexed [k][j]; rhs terms use their frozen constants
// unless a bounded-density rhs draw is supplied.
inline RealizedOutputs realize_outputs(const InstanceMaps &maps, const PowerContext &ctx,
                                       const IntVector &x,
                                       const std::vector<std::vector<double>> &lhs_coeffs,
                                       const std::vector<std::vector<double>> *rhs_coeffs = nullptr) {
  if (lhs_coeffs.size() != maps.lhs.size())
    throw std::invalid_argument("realize_outputs: lhs coefficient block arity mismatch");
  RealizedOutputs out;
  for (std::size_t k = 0; k < maps.lhs.size(); ++k) {
    std::vector<Value> values;
    for (const auto &term : maps.lhs[k].terms) values.push_back(x.at(static_cast<std::size_t>(term.source)));
    out.z.push_back(lincomb(ctx, maps.lhs[k], values, lhs_coeffs[k]));
  }
  for (std::size_t r = 0; r < maps.rhs.size(); ++r) {
    const CombinationSpec &spec = maps.rhs[r];
    std::vector<Value> values;
    std::vector<double> coeffs;
    for (std::size_t t = 0; t < spec.terms.size(); ++t) {
      values.push_back(x.at(static_cast<std::size_t>(spec.terms[t].source)));
      if (spec.terms[t].kind == CoeffKind::Fixed)
        coeffs.push_back(spec.terms[t].fixed_value);
      else if (rhs_coeffs)
        coeffs.push_back(rhs_coeffs->at(r).at(t));
      else
        throw std::invalid_argument("realize_outputs: bounded rhs term without a draw");
    }
    out.zkl.push_back(lincomb(ctx, spec, values, coeffs));
  }
  return out;
}

}  // namespace aisbound
