#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "entropy.hpp"
#include "mimo.hpp"
#include "power_level.hpp"
#include "pushforward.hpp"
#include "theorem_instance.hpp"
#include "verify.hpp"

namespace aisbound {

struct Lemma1Options {
  Rat level_scale{1, 2};       // shrinks the worked channel to desk alphabets
  double det_min = 1.0 / 16;   // non-degeneracy floor for the built-in run
  int budget = 1000;
  std::uint64_t seed = 1;
  std::uint64_t cap = 1ull << 22;
  std::uint64_t dense_limit = 1ull << 24;
  bool zero_inputs = false;    // collapse every alphabet to {0}
};

// Receiver outputs must stay non-negative for the mod/div windows, so the
// numeric check draws from the positive coefficient family.
inline SamplerConfig lemma1_sampler() {
  SamplerConfig cfg;
  cfg.family = CoeffFamily::UniformPositive;
  return cfg;
}

struct Lemma1Report {
  double P = 0.0;
  Value pbar = 0;
  double lhs_bits = 0.0;        // 2 H(top halves of the three c-streams)
  double rhs_bits = 0.0;        // 2 H(Y1|g) + H(bottom of Y1 | top of Y1, g), averaged
  double gap_bits = 0.0;        // rhs - lhs
  double normalized_gap = 0.0;  // gap / log2 pbar
  double violation = 0.0;       // positive part of -normalized_gap
  int trials = 0;
  std::optional<std::string> error;
};

struct Lemma1StepReport {
  std::string step;
  bool ok = false;
  double worst = 0.0;
  std::string detail;
};

namespace detail {

// Entropy in bits of floor(U / divisor) for U uniform on {0, ..., count-1}.
inline double uniform_quotient_entropy(Value count, Value divisor) {
  if (count <= 1) return 0.0;
  const long double total = static_cast<long double>(count);
  const Value full = count / divisor;
  const Value rem = count % divisor;
  long double h = 0.0L;
  if (full > 0) {
    long double p = static_cast<long double>(divisor) / total;
    h -= static_cast<long double>(full) * p * std::log2(p);
  }
  if (rem > 0) {
    long double p = static_cast<long double>(rem) / total;
    h -= p * std::log2(p);
  }
  return static_cast<double>(h);
}

struct Lemma1Shape {
  MimoIcConfig config;
  Value alphabet = 0;     // X2 entries range over [0, alphabet)
  Value band_half = 0;    // pbar^(s/2), the c-stream half band
  Value band_low = 0;     // pbar^(2s/3), the Y1 bottom cut
};

inline Lemma1Shape lemma1_shape(const PowerContext &ctx, const Lemma1Options &opts) {
  Lemma1Shape shape;
  shape.config.level_scale = opts.level_scale;
  shape.config.require_worked_shape();
  shape.alphabet = opts.zero_inputs ? 1 : ctx.band(opts.level_scale);
  shape.band_half = ctx.band(opts.level_scale / Rat(2));
  shape.band_low = ctx.band(Rat(2) * opts.level_scale / Rat(3));
  return shape;
}

// Per-axis additive contributions of one Y1 row over the X2 alphabet,
// matching the receiver map with X1 pinned to zero.
struct RowTable {
  std::vector<std::vector<Value>> contrib;
  Value vmax = 0;
};

inline RowTable y1_row_table(const Lemma1Shape &shape, const PowerContext &ctx,
                             const Matrix &g12, int row) {
  const TrimPair ta = shape.config.rx1_a_trim();
  const TrimPair tc = shape.config.rx1_c_trim();
  RowTable table;
  table.contrib.assign(5, {});
  for (int m = 0; m < 5; ++m) {
    const TrimPair &tp = m < 2 ? ta : tc;
    auto &col = table.contrib[static_cast<std::size_t>(m)];
    col.resize(static_cast<std::size_t>(shape.alphabet));
    Value best = 0;
    for (Value x = 0; x < shape.alphabet; ++x) {
      Value w = part_window(ctx, x, tp.delta, tp.gamma);
      col[static_cast<std::size_t>(x)] = pfloor(g12[static_cast<std::size_t>(row)][static_cast<std::size_t>(m)] *
                                                static_cast<double>(w));
      best = std::max(best, col[static_cast<std::size_t>(x)]);
    }
    table.vmax += best;
  }
  return table;
}

inline MimoCoefficients lemma1_draw(const Lemma1Shape &shape, const SamplerConfig &sampler,
                                    const Lemma1Options &opts, int draw) {
  CoefficientSampler cs(sampler, 0);
  Rng rng = make_rng(opts.seed, 0x1E44A1ull, static_cast<std::uint64_t>(draw));
  return draw_mimo_coefficients(shape.config, cs, rng, opts.det_min, opts.budget);
}

}  // namespace detail

/**
 * Desk-scale check of the key submodularity bound: twice the entropy of the
 * c-stream top halves against what receiver 1 resolves, with X1 silent and
 * X2 uniform. The right side is 2 H(Y1 | g) plus the bottom-given-top
 * conditional of Y1, averaged over channel draws; the slack is o(log pbar).
 */
inline std::vector<Lemma1Report> lemma1_numeric_check(const std::vector<double> &p_values,
                                                      const SamplerConfig &sampler, int trials,
                                                      const Lemma1Options &opts = {}) {
  if (trials < 1) throw std::invalid_argument("lemma1_numeric_check: trials must be >= 1");
  if (sampler.family != CoeffFamily::UniformPositive)
    throw std::invalid_argument("lemma1_numeric_check: positive coefficient family required");

  std::vector<Lemma1Report> reports;
  for (double P : p_values) {
    PowerContext ctx(P);
    Lemma1Report r;
    r.P = P;
    r.pbar = ctx.band(Rat(1));
    r.trials = trials;
    try {
      detail::Lemma1Shape shape = detail::lemma1_shape(ctx, opts);

      double h_half = detail::uniform_quotient_entropy(shape.alphabet, shape.band_half);
      r.lhs_bits = 2.0 * 3.0 * h_half;

      long double rhs_sum = 0.0L;
      for (int d = 0; d < trials; ++d) {
        MimoCoefficients g = detail::lemma1_draw(shape, sampler, opts, d);
        PushforwardEngine engine(
            std::vector<int>(5, static_cast<int>(shape.alphabet)),
            std::vector<std::vector<double>>(5), opts.cap);
        int full[2], top[2];
        for (int row = 0; row < 2; ++row) {
          detail::RowTable table = detail::y1_row_table(shape, ctx, g.g12, row);
          full[row] = engine.add_output(table.contrib);
          top[row] = engine.add_output(table.contrib,
                                       std::make_pair(table.vmax + 1, shape.band_low));
        }
        std::vector<double> h = engine.entropies({{full[0], full[1]}, {top[0], top[1]}},
                                                 opts.dense_limit);
        // (top, bottom) is a bijection of the row value, so the bottom-given-
        // top conditional is H(Y1) - H(top pair).
        rhs_sum += 2.0L * h[0] + (h[0] - h[1]);
      }
      r.rhs_bits = static_cast<double>(rhs_sum / trials);
      r.gap_bits = r.rhs_bits - r.lhs_bits;
      r.normalized_gap = r.gap_bits / ctx.log2_pbar();
      r.violation = std::max(0.0, -r.normalized_gap);
    } catch (const CapOverflowError &e) {
      r.error = e.what();
    } catch (const NonDegeneracyError &e) {
      r.error = e.what();
    }
    reports.push_back(std::move(r));
  }
  return reports;
}

// The two-source, two-output instance behind each pairwise application: both
// sources split in half, each output dominated first on the top band alone,
// then on the bottom band.
inline TheoremInstance lemma1_theorem4_instance() {
  TheoremInstance inst;
  inst.sources = 2;
  inst.outputs = 2;
  inst.letters = 1;
  inst.level_grid = {{rat(1, 2), rat(1, 2)}, {rat(1, 2), rat(1, 2)}};
  inst.index_sets = {{{2}, {1}}, {{2}, {1}}};
  return inst;
}

/**
 * The chain behind the numeric bound, step by step: the partition chain
 * rules as exact identities, the conditional Han inequality on the three
 * half-band streams given the Y1 tops, and the pairwise sum-set instance's
 * applicability condition plus a spot verification sweep.
 */
inline std::vector<Lemma1StepReport> lemma1_submodular_steps(double P, const SamplerConfig &sampler,
                                                             int trials,
                                                             const Lemma1Options &opts = {}) {
  if (trials < 1) throw std::invalid_argument("lemma1_submodular_steps: trials must be >= 1");
  if (sampler.family != CoeffFamily::UniformPositive)
    throw std::invalid_argument("lemma1_submodular_steps: positive coefficient family required");
  PowerContext ctx(P);
  detail::Lemma1Shape shape = detail::lemma1_shape(ctx, opts);

  std::vector<Lemma1StepReport> steps;
  double worst_chain = 0.0;
  double worst_slack = 9e99;

  const IntVector x1_zero(5, 0);
  for (int d = 0; d < trials; ++d) {
    MimoCoefficients g = detail::lemma1_draw(shape, sampler, opts, d);

    // Realized joint of the three half-band streams u, the Y1 tops t, and
    // the Y1 bottoms b, under uniform X2.
    std::map<std::vector<Value>, long long> counts;
    IntVector x2(5, 0);
    while (true) {
      MimoOutputs out = mimo_ic_outputs(shape.config, ctx, g, x1_zero, x2);
      std::vector<Value> row(7);
      for (int j = 0; j < 3; ++j) row[static_cast<std::size_t>(j)] = x2[static_cast<std::size_t>(2 + j)] / shape.band_half;
      for (int rr = 0; rr < 2; ++rr) {
        row[static_cast<std::size_t>(3 + rr)] = out.y1[static_cast<std::size_t>(rr)] / shape.band_low;
        row[static_cast<std::size_t>(5 + rr)] = out.y1[static_cast<std::size_t>(rr)] % shape.band_low;
      }
      ++counts[row];
      int j = 4;
      while (j >= 0 && ++x2[static_cast<std::size_t>(j)] == shape.alphabet) {
        x2[static_cast<std::size_t>(j)] = 0;
        --j;
      }
      if (j < 0) break;
    }
    JointTable table;
    table.names = {"u1", "u2", "u3", "t0", "t1", "b0", "b1"};
    const double total = std::pow(static_cast<double>(shape.alphabet), 5);
    for (const auto &[row, c] : counts) {
      table.support.push_back(row);
      table.mass.push_back(static_cast<double>(c) / total);
    }
    table.validate();

    double h_all = exact_entropy(table, {"t0", "t1", "b0", "b1"}).value;
    double h_top = exact_entropy(table, {"t0", "t1"}).value;
    double h_cond = cond_entropy(table, {"b0", "b1"}, {"t0", "t1"});
    worst_chain = std::max(worst_chain, std::fabs(h_all - (h_top + h_cond)));
    double h_u = exact_entropy(table, {"u1", "u2", "u3"}).value;
    double h_u_chain = exact_entropy(table, {"u1"}).value + cond_entropy(table, {"u2"}, {"u1"}) +
                       cond_entropy(table, {"u3"}, {"u1", "u2"});
    worst_chain = std::max(worst_chain, std::fabs(h_u - h_u_chain));

    auto cond_pair = [&](const std::string &a, const std::string &b) {
      return cond_entropy(table, {a, b}, {"t0", "t1"});
    };
    double slack = cond_pair("u1", "u2") + cond_pair("u1", "u3") + cond_pair("u2", "u3") -
                   2.0 * cond_entropy(table, {"u1", "u2", "u3"}, {"t0", "t1"});
    worst_slack = std::min(worst_slack, slack);
  }

  Lemma1StepReport chain;
  chain.step = "chain-rule";
  chain.worst = worst_chain;
  chain.ok = worst_chain <= 1e-10;
  chain.detail = "largest chain identity deviation over " + std::to_string(trials) + " draws";
  steps.push_back(std::move(chain));

  Lemma1StepReport han;
  han.step = "han";
  han.worst = worst_slack;
  han.ok = worst_slack >= -1e-9;
  han.detail = "smallest conditional Han slack over " + std::to_string(trials) + " draws";
  steps.push_back(std::move(han));

  Lemma1StepReport t4;
  t4.step = "theorem4";
  TheoremInstance inst = lemma1_theorem4_instance();
  bool condition = level_condition_holds(inst);
  VerifyOptions vopts;
  vopts.trials = std::min(trials, 8);
  vopts.seed = opts.seed;
  vopts.cap = opts.cap;
  std::vector<GapReport> sweep = verify_sweep(inst, {P}, vopts);
  t4.ok = condition && !sweep[0].error;
  t4.worst = sweep[0].normalized_gap;
  t4.detail = "applies once per c-stream pair (three times); applicability " +
              std::string(condition ? "holds" : "fails") + ", spot gap at P=" + std::to_string(P);
  steps.push_back(std::move(t4));

  return steps;
}

}  // namespace aisbound
