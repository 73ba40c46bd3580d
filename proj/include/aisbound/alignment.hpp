#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "coefficients.hpp"
#include "pushforward.hpp"
#include "theorem_instance.hpp"

namespace aisbound {

struct AlignmentPartition {
  std::vector<int> class_of;             // per canonical representative
  std::vector<long long> class_sizes;    // indexed by class id
  int designated_class = 0;              // class of the lexicographically first representative
};

struct AlignmentReport {
  double expected_cardinality = 0.0;      // average |S| of the designated class
  double expected_max_cardinality = 0.0;  // average of the largest class
  double analytic_bound = 0.0;            // sum over Z' of the pairwise alignment cap
  long long distinct_zprime = 0;
  int draws = 0;
  std::vector<std::vector<long long>> per_draw_class_sizes;  // filled on request
};

struct PairwiseAlignment {
  double frequency = 0.0;
  double cap = 0.0;    // analytic alignment-probability ceiling
  double sigma = 0.0;  // binomial deviation of the cap over the draw count
  long long collisions = 0;
  int draws = 0;
};

/**
 * Exhaustive aligned-image-set oracle for one-output, one-letter instances.
 * Every input realization is enumerated; distinct dominated-output tuples Z'
 * keep their lexicographically smallest realization as canonical preimage,
 * and a coefficient draw partitions those representatives by the channel
 * output Z of their preimage.
 */
class AlignmentOracle {
 public:
  AlignmentOracle(const TheoremInstance &inst, const PowerContext &ctx,
                  std::uint64_t cap = (1ull << 16))
      : inst_(inst), ctx_(ctx) {
    inst_.validate();
    if (inst_.outputs != 1 || inst_.letters != 1)
      throw std::invalid_argument("alignment: oracle requires K=1 and a single letter");
    maps_ = build_maps(inst_);
    freeze_rhs_coefficients(maps_, inst_);
    for (const auto &spec : maps_.rhs)
      for (const auto &term : spec.terms)
        if (term.kind != CoeffKind::Fixed)
          throw std::invalid_argument("alignment: dominated outputs must use fixed coefficients");
    if (maps_.w)
      throw std::invalid_argument("alignment: conditioning must be resolved to a fixed w section");
    enumerate_states(cap);
    build_representatives();
  }

  const TheoremInstance &instance() const noexcept { return inst_; }
  const std::vector<IntVector> &representatives() const noexcept { return reps_; }
  const std::vector<std::vector<Value>> &zprime_values() const noexcept { return zprime_; }

  // Channel output of one realization under a coefficient draw (one
  // coefficient per source).
  Value channel_output(const IntVector &x, const std::vector<double> &coeffs) const {
    Value acc = 0;
    for (int j = 0; j < inst_.sources; ++j)
      acc += pfloor(coeffs[static_cast<std::size_t>(j)] *
                    static_cast<double>(x[static_cast<std::size_t>(j)]));
    return acc;
  }

  AlignmentPartition alignment_classes(const std::vector<double> &coeffs) const {
    if (coeffs.size() != static_cast<std::size_t>(inst_.sources))
      throw std::invalid_argument("alignment_classes: one coefficient per source required");
    AlignmentPartition part;
    part.class_of.resize(reps_.size());
    std::map<Value, int> by_output;
    for (std::size_t r = 0; r < reps_.size(); ++r) {
      Value z = channel_output(reps_[r], coeffs);
      auto [it, inserted] = by_output.emplace(z, static_cast<int>(part.class_sizes.size()));
      if (inserted) part.class_sizes.push_back(0);
      part.class_of[r] = it->second;
      ++part.class_sizes[static_cast<std::size_t>(it->second)];
    }
    part.designated_class = part.class_of.empty() ? 0 : part.class_of[0];
    return part;
  }

  // Band-weighted separation max_j |mu_j - nu_j| entering the alignment cap.
  // For two-band shapes this equals |top difference| * pbar^lambda1 + bottom
  // difference, which is how the cap is stated.
  double separation(const IntVector &mu, const IntVector &nu) const {
    double best = 0.0;
    for (int j = 0; j < inst_.sources; ++j)
      best = std::max(best, std::fabs(static_cast<double>(mu[static_cast<std::size_t>(j)] -
                                                          nu[static_cast<std::size_t>(j)])));
    return best;
  }

  // min(1, 2 k f_max / separation) with k the source count of the channel
  // combination; the two-source case is the 4 f_max / max(...) cap.
  double alignment_cap(const IntVector &mu, const IntVector &nu) const {
    double sep = separation(mu, nu);
    if (sep <= 0.0) return 1.0;
    double cap = 2.0 * static_cast<double>(inst_.sources) * inst_.sampler.f_max / sep;
    return std::min(1.0, cap);
  }

  double analytic_expected_cardinality_bound() const {
    const IntVector &nu = reps_.front();
    double total = 0.0;
    for (const auto &mu : reps_) total += alignment_cap(mu, nu);
    return total;
  }

  AlignmentReport expected_cardinality(int draws, std::uint64_t seed,
                                       bool keep_histogram = false) const {
    if (draws < 1) throw std::invalid_argument("expected_cardinality: draws must be >= 1");
    CoefficientSampler sampler(inst_.sampler, 0);
    AlignmentReport report;
    report.draws = draws;
    report.distinct_zprime = static_cast<long long>(reps_.size());
    report.analytic_bound = analytic_expected_cardinality_bound();
    long double sum_designated = 0.0L, sum_max = 0.0L;
    for (int d = 0; d < draws; ++d) {
      Rng rng = make_rng(seed, 0xA15Cull, static_cast<std::uint64_t>(d));
      std::vector<double> coeffs(static_cast<std::size_t>(inst_.sources));
      for (double &g : coeffs) g = sampler.sample(rng);
      AlignmentPartition part = alignment_classes(coeffs);
      sum_designated += static_cast<long double>(
          part.class_sizes[static_cast<std::size_t>(part.designated_class)]);
      sum_max += static_cast<long double>(
          *std::max_element(part.class_sizes.begin(), part.class_sizes.end()));
      if (keep_histogram) report.per_draw_class_sizes.push_back(part.class_sizes);
    }
    report.expected_cardinality = static_cast<double>(sum_designated / draws);
    report.expected_max_cardinality = static_cast<double>(sum_max / draws);
    return report;
  }

  // Quadrature replacement for the Monte Carlo average: midpoint grid over
  // the coefficient box (and sign quadrants for the signed family). Only
  // meaningful while the channel combination has at most two coefficients.
  double expected_cardinality_quadrature(double resolution) const {
    if (inst_.sources > 2)
      throw std::invalid_argument("quadrature: coefficient dimension above 2");
    const int cells = std::max(1, static_cast<int>(std::llround(1.0 / resolution)));
    const double d1 = inst_.sampler.delta1, d2 = inst_.sampler.delta2;
    const double step = (d2 - d1) / cells;
    const bool is_signed = inst_.sampler.family == CoeffFamily::UniformMagnitudeSigned;
    const int signs = is_signed ? 2 : 1;
    long double total = 0.0L;
    long double weight_total = 0.0L;
    std::vector<double> coeffs(static_cast<std::size_t>(inst_.sources));
    const int dims = inst_.sources;
    std::vector<int> cell(static_cast<std::size_t>(dims), 0);
    std::vector<int> sign(static_cast<std::size_t>(dims), 0);
    // Odometer over (cell, sign) per dimension.
    auto eval_point = [&]() {
      for (int j = 0; j < dims; ++j) {
        double magnitude = d1 + (static_cast<double>(cell[static_cast<std::size_t>(j)]) + 0.5) * step;
        coeffs[static_cast<std::size_t>(j)] =
            (is_signed && sign[static_cast<std::size_t>(j)] == 1) ? -magnitude : magnitude;
      }
      AlignmentPartition part = alignment_classes(coeffs);
      total += static_cast<long double>(
          part.class_sizes[static_cast<std::size_t>(part.designated_class)]);
      weight_total += 1.0L;
    };
    std::vector<int> radix(static_cast<std::size_t>(dims), cells * signs);
    std::vector<int> odo(static_cast<std::size_t>(dims), 0);
    while (true) {
      for (int j = 0; j < dims; ++j) {
        cell[static_cast<std::size_t>(j)] = odo[static_cast<std::size_t>(j)] % cells;
        sign[static_cast<std::size_t>(j)] = odo[static_cast<std::size_t>(j)] / cells;
      }
      eval_point();
      int j = dims - 1;
      while (j >= 0 && ++odo[static_cast<std::size_t>(j)] == radix[static_cast<std::size_t>(j)]) {
        odo[static_cast<std::size_t>(j)] = 0;
        --j;
      }
      if (j < 0) break;
    }
    return static_cast<double>(total / weight_total);
  }

  PairwiseAlignment pairwise_alignment_probability(const IntVector &mu, const IntVector &nu,
                                                   int draws, std::uint64_t seed) const {
    if (mu.size() != static_cast<std::size_t>(inst_.sources) ||
        nu.size() != static_cast<std::size_t>(inst_.sources))
      throw std::invalid_argument("pairwise: realization arity mismatch");
    if (eval_zprime(mu) == eval_zprime(nu))
      throw std::invalid_argument("pairwise: realizations share the same Z' value");
    PairwiseAlignment result;
    result.draws = draws;
    result.cap = alignment_cap(mu, nu);
    result.sigma = std::sqrt(result.cap * (1.0 - result.cap) / static_cast<double>(draws));
    CoefficientSampler sampler(inst_.sampler, 0);
    for (int d = 0; d < draws; ++d) {
      Rng rng = make_rng(seed, 0xBA12ull, static_cast<std::uint64_t>(d));
      std::vector<double> coeffs(static_cast<std::size_t>(inst_.sources));
      for (double &g : coeffs) g = sampler.sample(rng);
      if (channel_output(mu, coeffs) == channel_output(nu, coeffs)) ++result.collisions;
    }
    result.frequency = static_cast<double>(result.collisions) / static_cast<double>(draws);
    return result;
  }

  std::vector<Value> eval_zprime(const IntVector &x) const {
    std::vector<Value> out;
    out.reserve(maps_.rhs.size());
    for (const auto &spec : maps_.rhs) {
      std::vector<Value> values;
      std::vector<double> coeffs;
      for (const auto &term : spec.terms) {
        values.push_back(x.at(static_cast<std::size_t>(term.source)));
        coeffs.push_back(term.fixed_value);
      }
      out.push_back(lincomb(ctx_, spec, values, coeffs));
    }
    return out;
  }

 private:
  void enumerate_states(std::uint64_t cap) {
    switch (inst_.input.kind) {
      case InputModelKind::ProductUniform: {
        const Value a = ctx_.alphabet_size(inst_.alphabet_level());
        std::uint64_t states = 1;
        for (int j = 0; j < inst_.sources; ++j) {
          states *= static_cast<std::uint64_t>(a);
          if (states > cap) throw CapOverflowError(states, cap);
        }
        IntVector x(static_cast<std::size_t>(inst_.sources), 0);
        states_.reserve(states);
        while (true) {
          states_.push_back(x);
          int j = inst_.sources - 1;
          while (j >= 0 && ++x[static_cast<std::size_t>(j)] == a) {
            x[static_cast<std::size_t>(j)] = 0;
            --j;
          }
          if (j < 0) break;
        }
        break;
      }
      case InputModelKind::SharedUniform: {
        const Value a = ctx_.alphabet_size(inst_.alphabet_level());
        if (static_cast<std::uint64_t>(a) > cap)
          throw CapOverflowError(static_cast<std::uint64_t>(a), cap);
        for (Value v = 0; v < a; ++v)
          states_.push_back(IntVector(static_cast<std::size_t>(inst_.sources), v));
        break;
      }
      case InputModelKind::Table: {
        if (inst_.input.table.support.size() > cap)
          throw CapOverflowError(inst_.input.table.support.size(), cap);
        states_ = inst_.input.table.support;
        std::sort(states_.begin(), states_.end());
        break;
      }
    }
  }

  void build_representatives() {
    std::map<std::vector<Value>, int> seen;
    for (const auto &x : states_) {
      std::vector<Value> z = eval_zprime(x);
      if (seen.emplace(std::move(z), static_cast<int>(reps_.size())).second) {
        reps_.push_back(x);
        zprime_.push_back(eval_zprime(x));
      }
    }
  }

  TheoremInstance inst_;
  PowerContext ctx_;
  InstanceMaps maps_;
  std::vector<IntVector> states_;
  std::vector<IntVector> reps_;
  std::vector<std::vector<Value>> zprime_;
};

struct GrowthPoint {
  double P = 0.0;
  Value pbar = 0;
  double expected = 0.0;
};

struct GrowthReport {
  std::vector<GrowthPoint> points;
  double intercept = 0.0, slope = 0.0;  // fit of expected / pbar^e against log2 pbar
  double rel_residual = 0.0;
  double fitted_exponent = 0.0;  // slope of log2(expected) vs log2(pbar)
  double exponent_budget = 0.0;  // (lambda2 - lambda1)+ for two-band shapes
  double max_ratio = 0.0;        // consecutive growth ratio
  bool fit_ok = false, exponent_ok = false, ratio_ok = false;
  // On the desk ladder pbar in {4..64}, a + b log2 pbar growth reads as a
  // log-log slope of up to about 0.3; polynomial pbar^(1/2) growth reads as
  // 0.5 or more. The tolerance separates the two regimes.
  double residual_threshold = 0.2, exponent_tolerance = 0.35, ratio_threshold = 3.0;

  bool ok() const { return fit_ok && exponent_ok && ratio_ok; }
};

// Sweeps the same alignment shape across P values and fits the expected
// class cardinality against pbar^e * (a + b log2 pbar).
inline GrowthReport growth_check(const TheoremInstance &shape, const std::vector<double> &p_values,
                                 int draws, std::uint64_t seed, std::uint64_t cap = (1ull << 16)) {
  if (p_values.size() < 4)
    throw std::invalid_argument("growth_check: need at least 4 sweep points");
  GrowthReport report;
  if (shape.bands() == 2 && shape.outputs == 1)
    report.exponent_budget = to_double(positive_part(shape.level_grid[0][1] - shape.level_grid[0][0]));

  for (std::size_t i = 0; i < p_values.size(); ++i) {
    PowerContext ctx(p_values[i]);
    AlignmentOracle oracle(shape, ctx, cap);
    AlignmentReport r = oracle.expected_cardinality(draws, derive_seed(seed, 0x9807ull, i));
    report.points.push_back({p_values[i], ctx.band(Rat(1)), r.expected_cardinality});
  }

  const std::size_t n = report.points.size();
  std::vector<double> logp(n), u(n);
  for (std::size_t i = 0; i < n; ++i) {
    logp[i] = std::log2(static_cast<double>(report.points[i].pbar));
    u[i] = report.points[i].expected /
           std::pow(static_cast<double>(report.points[i].pbar), report.exponent_budget);
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sx += logp[i];
    sy += u[i];
    sxx += logp[i] * logp[i];
    sxy += logp[i] * u[i];
  }
  const double dn = static_cast<double>(n);
  const double denom = dn * sxx - sx * sx;
  report.slope = (dn * sxy - sx * sy) / denom;
  report.intercept = (sy - report.slope * sx) / dn;
  double ss_res = 0, ss_tot = 0;
  for (std::size_t i = 0; i < n; ++i) {
    double fitted = report.intercept + report.slope * logp[i];
    ss_res += (u[i] - fitted) * (u[i] - fitted);
    ss_tot += u[i] * u[i];
  }
  report.rel_residual = std::sqrt(ss_res / ss_tot);

  double lx = 0, ly = 0, lxx = 0, lxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    double yv = std::log2(std::max(report.points[i].expected, 1e-12));
    lx += logp[i];
    ly += yv;
    lxx += logp[i] * logp[i];
    lxy += logp[i] * yv;
  }
  report.fitted_exponent = (dn * lxy - lx * ly) / (dn * lxx - lx * lx);

  report.max_ratio = 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i)
    report.max_ratio = std::max(report.max_ratio,
                                report.points[i + 1].expected / report.points[i].expected);

  report.fit_ok = report.rel_residual < report.residual_threshold;
  report.exponent_ok = report.fitted_exponent <= report.exponent_budget + report.exponent_tolerance;
  report.ratio_ok = report.max_ratio < report.ratio_threshold;
  return report;
}

}  // namespace aisbound
