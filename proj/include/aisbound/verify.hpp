#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "coefficients.hpp"
#include "combination.hpp"
#include "pushforward.hpp"
#include "theorem_instance.hpp"

namespace aisbound {

enum class OutputSide { Lhs, Rhs };

struct VerifyOptions {
  std::uint64_t cap = (1ull << 20);
  int trials = 64;
  int threads = 1;
  std::uint64_t seed = 1;
  std::uint64_t dense_limit = (1u << 24);
  bool use_plugin = false;        // opt-in empirical path for multi-letter instances
  long long plugin_samples = 1 << 16;
};

struct GapReport {
  double P = 0.0;
  Value pbar = 0;
  EntropyEstimate lhs, rhs;
  double gap = 0.0;
  double normalized_gap = 0.0;
  bool condition_ok = false;
  std::optional<double> generalized_target;  // normalized floor when the level condition fails
  std::optional<std::string> error;
};

namespace detail {

// Maps (letter, source) coordinates onto the product axes of the pushforward.
struct AxisLayout {
  std::vector<int> counts;
  std::vector<std::vector<double>> weights;
  InputModelKind kind;
  int sources = 0;
  int letters = 0;
  Value alphabet = 0;            // uniform kinds
  const JointTable *table = nullptr;
  bool block_table = false;

  std::size_t axis_of(int t, int j) const {
    switch (kind) {
      case InputModelKind::ProductUniform:
        return static_cast<std::size_t>(t * sources + j);
      case InputModelKind::SharedUniform:
        return static_cast<std::size_t>(t);
      case InputModelKind::Table:
        return block_table ? 0 : static_cast<std::size_t>(t);
    }
    throw std::logic_error("axis_of: unreachable");
  }

  Value source_value(int t, int j, int digit) const {
    switch (kind) {
      case InputModelKind::ProductUniform:
      case InputModelKind::SharedUniform:
        return digit;
      case InputModelKind::Table: {
        std::size_t col = block_table ? static_cast<std::size_t>(t * sources + j)
                                      : static_cast<std::size_t>(j);
        return table->support[static_cast<std::size_t>(digit)][col];
      }
    }
    throw std::logic_error("source_value: unreachable");
  }
};

inline AxisLayout make_axis_layout(const TheoremInstance &inst, const PowerContext &ctx) {
  AxisLayout layout;
  layout.kind = inst.input.kind;
  layout.sources = inst.sources;
  layout.letters = inst.letters;
  switch (inst.input.kind) {
    case InputModelKind::ProductUniform: {
      layout.alphabet = ctx.alphabet_size(inst.alphabet_level());
      layout.counts.assign(static_cast<std::size_t>(inst.letters * inst.sources),
                           static_cast<int>(layout.alphabet));
      break;
    }
    case InputModelKind::SharedUniform: {
      layout.alphabet = ctx.alphabet_size(inst.alphabet_level());
      layout.counts.assign(static_cast<std::size_t>(inst.letters), static_cast<int>(layout.alphabet));
      break;
    }
    case InputModelKind::Table: {
      layout.table = &inst.input.table;
      layout.block_table =
          inst.input.table.names.size() == static_cast<std::size_t>(inst.sources * inst.letters) &&
          inst.letters > 1;
      int axes = layout.block_table ? 1 : inst.letters;
      layout.counts.assign(static_cast<std::size_t>(axes),
                           static_cast<int>(inst.input.table.support.size()));
      for (int a = 0; a < axes; ++a) layout.weights.push_back(inst.input.table.mass);
      break;
    }
  }
  layout.weights.resize(layout.counts.size());
  return layout;
}

// Adds spec evaluated at letter t as an engine output; one realized
// coefficient per term.
inline int add_spec_output(PushforwardEngine &engine, const AxisLayout &layout,
                           const PowerContext &ctx, const CombinationSpec &spec, int t,
                           const std::vector<double> &coeffs) {
  std::vector<std::vector<Value>> contrib(layout.counts.size());
  for (std::size_t idx = 0; idx < spec.terms.size(); ++idx) {
    const CombinationTerm &term = spec.terms[idx];
    std::size_t a = layout.axis_of(t, term.source);
    if (contrib[a].empty()) contrib[a].assign(static_cast<std::size_t>(layout.counts[a]), 0);
    for (int digit = 0; digit < layout.counts[a]; ++digit) {
      Value raw = layout.source_value(t, term.source, digit);
      contrib[a][static_cast<std::size_t>(digit)] +=
          pfloor(coeffs[idx] * static_cast<double>(term_signal(ctx, term, raw)));
    }
  }
  return engine.add_output(std::move(contrib));
}

// Realizes one coefficient per term of each spec, letters outer, specs next,
// terms inner. Fixed terms pass their frozen constants through.
inline std::vector<std::vector<std::vector<double>>> draw_spec_coefficients(
    const std::vector<const CombinationSpec *> &specs, int letters,
    const CoefficientSampler &sampler, Rng &rng) {
  std::vector<std::vector<std::vector<double>>> out(static_cast<std::size_t>(letters));
  for (int t = 0; t < letters; ++t) {
    out[static_cast<std::size_t>(t)].resize(specs.size());
    for (std::size_t s = 0; s < specs.size(); ++s) {
      auto &dst = out[static_cast<std::size_t>(t)][s];
      dst.reserve(specs[s]->terms.size());
      for (const auto &term : specs[s]->terms)
        dst.push_back(term.kind == CoeffKind::Fixed ? term.fixed_value : sampler.sample(rng));
    }
  }
  return out;
}

inline bool any_bounded(const std::vector<const CombinationSpec *> &specs) {
  for (const auto *s : specs)
    if (s->bounded_term_count() > 0) return true;
  return false;
}

struct DrawStreams {
  static constexpr std::uint64_t kLhs = 0xA1;
  static constexpr std::uint64_t kRhs = 0xB2;
  static constexpr std::uint64_t kW = 0xC3;
  static constexpr std::uint64_t kPlugin = 0xD4;
};

// Weighted digit draw for plugin sampling; uniform tables fall back to a
// plain modulo-free draw.
inline int sample_digit(const AxisLayout &layout, std::size_t axis, Rng &rng) {
  const auto &w = layout.weights[axis];
  if (w.empty()) {
    return static_cast<int>(static_cast<std::uint64_t>(
        uniform_unit(rng) * static_cast<double>(layout.counts[axis])));
  }
  double u = uniform_unit(rng), acc = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    acc += w[i];
    if (u < acc) return static_cast<int>(i);
  }
  return layout.counts[axis] - 1;
}

}  // namespace detail

// Average over coefficient draws of the exact conditional entropy
// H(side outputs | W, coefficients = g), in bits. Sides with no random
// coefficients collapse to a single exact pass.
inline EntropyEstimate cond_entropy_given_coeffs(const TheoremInstance &inst, OutputSide side,
                                                 const PowerContext &ctx,
                                                 const VerifyOptions &opts,
                                                 std::uint64_t sweep_index = 0) {
  InstanceMaps maps = build_maps(inst);
  freeze_rhs_coefficients(maps, inst);
  detail::AxisLayout layout = detail::make_axis_layout(inst, ctx);

  std::vector<const CombinationSpec *> side_specs;
  if (side == OutputSide::Lhs)
    for (const auto &s : maps.lhs) side_specs.push_back(&s);
  else
    for (const auto &s : maps.rhs) side_specs.push_back(&s);
  std::vector<const CombinationSpec *> w_specs;
  if (maps.w) w_specs.push_back(&*maps.w);

  const bool randomized = detail::any_bounded(side_specs) || detail::any_bounded(w_specs);
  const int draws = randomized ? opts.trials : 1;
  if (draws < 1) throw std::invalid_argument("cond_entropy_given_coeffs: trials must be >= 1");

  const std::uint64_t side_stream =
      (side == OutputSide::Lhs ? detail::DrawStreams::kLhs : detail::DrawStreams::kRhs) +
      (sweep_index << 8);
  const std::uint64_t w_stream = detail::DrawStreams::kW + (sweep_index << 8);
  CoefficientSampler sampler(inst.sampler, 0);

  std::vector<double> per_draw(static_cast<std::size_t>(draws), 0.0);
  bool bias_flag = false;

  auto run_draw = [&](int d) {
    Rng rng_side = make_rng(opts.seed, side_stream, static_cast<std::uint64_t>(d));
    Rng rng_w = make_rng(opts.seed, w_stream, static_cast<std::uint64_t>(d));
    auto side_coeffs = detail::draw_spec_coefficients(side_specs, inst.letters, sampler, rng_side);
    auto w_coeffs = detail::draw_spec_coefficients(w_specs, inst.letters, sampler, rng_w);

    if (opts.use_plugin && inst.letters >= 2) {
      Rng rng_in = make_rng(opts.seed, detail::DrawStreams::kPlugin + (sweep_index << 8),
                            static_cast<std::uint64_t>(d));
      std::vector<std::vector<Value>> joint_samples, w_samples;
      std::vector<int> digits(layout.counts.size());
      for (long long s = 0; s < opts.plugin_samples; ++s) {
        for (std::size_t a = 0; a < layout.counts.size(); ++a)
          digits[a] = detail::sample_digit(layout, a, rng_in);
        std::vector<Value> joint_row, w_row;
        for (int t = 0; t < inst.letters; ++t) {
          IntVector x(static_cast<std::size_t>(inst.sources));
          for (int j = 0; j < inst.sources; ++j)
            x[static_cast<std::size_t>(j)] =
                layout.source_value(t, j, digits[layout.axis_of(t, j)]);
          for (std::size_t sp = 0; sp < side_specs.size(); ++sp) {
            std::vector<Value> values;
            for (const auto &term : side_specs[sp]->terms)
              values.push_back(x[static_cast<std::size_t>(term.source)]);
            joint_row.push_back(lincomb(ctx, *side_specs[sp], values,
                                        side_coeffs[static_cast<std::size_t>(t)][sp]));
          }
          for (std::size_t sp = 0; sp < w_specs.size(); ++sp) {
            std::vector<Value> values;
            for (const auto &term : w_specs[sp]->terms)
              values.push_back(x[static_cast<std::size_t>(term.source)]);
            Value wv = lincomb(ctx, *w_specs[sp], values,
                               w_coeffs[static_cast<std::size_t>(t)][sp]);
            joint_row.push_back(wv);
            w_row.push_back(wv);
          }
        }
        joint_samples.push_back(std::move(joint_row));
        if (!w_specs.empty()) w_samples.push_back(std::move(w_row));
      }
      EntropyEstimate joint = plugin_entropy(joint_samples);
      double h = joint.value;
      bool flagged = joint.bias_flagged;
      if (!w_samples.empty()) {
        EntropyEstimate hw = plugin_entropy(w_samples);
        h -= hw.value;
        flagged = flagged || hw.bias_flagged;
      }
      if (flagged) bias_flag = true;
      per_draw[static_cast<std::size_t>(d)] = h;
      return;
    }

    PushforwardEngine engine(layout.counts, layout.weights, opts.cap);
    std::vector<int> main_group, w_group;
    for (int t = 0; t < inst.letters; ++t) {
      for (std::size_t sp = 0; sp < side_specs.size(); ++sp)
        main_group.push_back(detail::add_spec_output(
            engine, layout, ctx, *side_specs[sp], t, side_coeffs[static_cast<std::size_t>(t)][sp]));
      for (std::size_t sp = 0; sp < w_specs.size(); ++sp) {
        int id = detail::add_spec_output(engine, layout, ctx, *w_specs[sp], t,
                                         w_coeffs[static_cast<std::size_t>(t)][sp]);
        main_group.push_back(id);
        w_group.push_back(id);
      }
    }
    if (w_group.empty()) {
      per_draw[static_cast<std::size_t>(d)] = engine.entropies({main_group}, opts.dense_limit)[0];
    } else {
      auto h = engine.entropies({main_group, w_group}, opts.dense_limit);
      per_draw[static_cast<std::size_t>(d)] = h[0] - h[1];
    }
  };

  const int workers = std::max(1, std::min(opts.threads, draws));
  if (workers == 1) {
    for (int d = 0; d < draws; ++d) run_draw(d);
  } else {
    std::vector<std::thread> pool;
    std::atomic<int> next{0};
    for (int wkr = 0; wkr < workers; ++wkr)
      pool.emplace_back([&]() {
        for (int d = next.fetch_add(1); d < draws; d = next.fetch_add(1)) run_draw(d);
      });
    for (auto &th : pool) th.join();
  }

  long double sum = 0.0L;
  for (double h : per_draw) sum += h;
  EntropyEstimate est;
  est.value = static_cast<double>(sum / draws);
  est.method = (opts.use_plugin && inst.letters >= 2) ? EntropyMethod::PluginSample
                                                      : EntropyMethod::Exact;
  est.trials = draws;
  est.normalizer = ctx.log2_pbar();
  est.bias_flagged = bias_flag;
  return est;
}

// Normalized slack floor for the two-band single-output shape when its level
// condition fails: the inequality still holds after giving back
// (lambda2 - lambda1)+ of normalized entropy.
inline std::optional<double> generalized_target(const TheoremInstance &inst) {
  if (inst.outputs != 1 || inst.bands() != 2) return std::nullopt;
  Rat shift = positive_part(inst.level_grid[0][1] - inst.level_grid[0][0]);
  return -to_double(shift);
}

inline std::vector<GapReport> verify_sweep(const TheoremInstance &inst,
                                           const std::vector<double> &p_values,
                                           const VerifyOptions &opts) {
  inst.validate();
  const bool condition_ok = level_condition_holds(inst);
  std::vector<GapReport> reports;
  for (std::size_t i = 0; i < p_values.size(); ++i) {
    GapReport r;
    r.P = p_values[i];
    r.condition_ok = condition_ok;
    if (!condition_ok) r.generalized_target = generalized_target(inst);
    try {
      PowerContext ctx(p_values[i]);
      r.pbar = ctx.band(Rat(1));
      r.lhs = cond_entropy_given_coeffs(inst, OutputSide::Lhs, ctx, opts, i);
      r.rhs = cond_entropy_given_coeffs(inst, OutputSide::Rhs, ctx, opts, i);
      r.gap = r.lhs.value - r.rhs.value;
      r.normalized_gap = r.gap / (static_cast<double>(inst.letters) * ctx.log2_pbar());
    } catch (const CapOverflowError &e) {
      r.error = e.what();
    }
    reports.push_back(std::move(r));
  }
  return reports;
}

}  // namespace aisbound
