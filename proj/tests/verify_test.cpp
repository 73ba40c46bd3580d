#include "aisbound/verify.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <vector>

namespace aisbound {
namespace {

double table_entropy(const std::map<std::vector<Value>, double> &hist) {
  long double h = 0.0L, total = 0.0L;
  for (const auto &kv : hist) total += kv.second;
  for (const auto &kv : hist)
    if (kv.second > 0.0) {
      long double p = kv.second / total;
      h -= p * std::log2(p);
    }
  return static_cast<double>(h);
}

// Independent route for H(Z | coefficients): nested loops over the uniform
// product alphabet, then a histogram entropy.
double lhs_oracle_product_uniform(const PowerContext &ctx, Value alphabet, double g1, double g2) {
  std::map<std::vector<Value>, double> hist;
  for (Value x1 = 0; x1 < alphabet; ++x1)
    for (Value x2 = 0; x2 < alphabet; ++x2)
      hist[{pfloor(g1 * static_cast<double>(x1)) + pfloor(g2 * static_cast<double>(x2))}] += 1.0;
  return table_entropy(hist);
}

TEST(CondEntropy, LhsMatchesNestedLoopOracle) {
  TheoremInstance inst = theorem1_instance(rat(1, 2), rat(1, 2));
  inst.seed = 9;
  VerifyOptions opts;
  opts.trials = 4;
  opts.seed = 9;
  PowerContext ctx(256);
  EntropyEstimate est = cond_entropy_given_coeffs(inst, OutputSide::Lhs, ctx, opts);
  EXPECT_EQ(est.trials, 4);
  EXPECT_DOUBLE_EQ(est.normalizer, 4.0);

  CoefficientSampler sampler(inst.sampler, 0);
  long double avg = 0.0L;
  for (int d = 0; d < 4; ++d) {
    Rng rng = make_rng(opts.seed, 0xA1, static_cast<std::uint64_t>(d));
    double g1 = sampler.sample(rng);
    double g2 = sampler.sample(rng);
    avg += lhs_oracle_product_uniform(ctx, 16, g1, g2);
  }
  EXPECT_NEAR(est.value, static_cast<double>(avg / 4.0L), 1e-12);
}

TEST(CondEntropy, FrozenRhsMatchesNestedLoopOracle) {
  TheoremInstance inst = theorem1_instance(rat(1, 2), rat(1, 2));
  inst.seed = 9;
  VerifyOptions opts;
  opts.trials = 16;
  opts.seed = 9;
  PowerContext ctx(256);
  EntropyEstimate est = cond_entropy_given_coeffs(inst, OutputSide::Rhs, ctx, opts);
  // Fixed coefficients need no averaging, so a single exact pass is reported.
  EXPECT_EQ(est.trials, 1);

  InstanceMaps maps = build_maps(inst);
  freeze_rhs_coefficients(maps, inst);
  std::map<std::vector<Value>, double> hist;
  for (Value x1 = 0; x1 < 16; ++x1)
    for (Value x2 = 0; x2 < 16; ++x2) {
      RealizedOutputs out = realize_outputs(maps, ctx, {x1, x2}, {{1.0, 1.0}});
      hist[out.zkl] += 1.0;
    }
  EXPECT_NEAR(est.value, table_entropy(hist), 1e-12);
}

TEST(CondEntropy, SharedUniformTiesSources) {
  TheoremInstance inst = theorem1_instance(rat(1, 2), rat(1, 2));
  inst.seed = 4;
  inst.input.kind = InputModelKind::SharedUniform;
  VerifyOptions opts;
  opts.trials = 3;
  opts.seed = 4;
  PowerContext ctx(256);
  EntropyEstimate est = cond_entropy_given_coeffs(inst, OutputSide::Lhs, ctx, opts);

  CoefficientSampler sampler(inst.sampler, 0);
  long double avg = 0.0L;
  for (int d = 0; d < 3; ++d) {
    Rng rng = make_rng(opts.seed, 0xA1, static_cast<std::uint64_t>(d));
    double g1 = sampler.sample(rng);
    double g2 = sampler.sample(rng);
    std::map<std::vector<Value>, double> hist;
    for (Value x = 0; x < 16; ++x)
      hist[{pfloor(g1 * static_cast<double>(x)) + pfloor(g2 * static_cast<double>(x))}] += 1.0;
    avg += table_entropy(hist);
  }
  EXPECT_NEAR(est.value, static_cast<double>(avg / 3.0L), 1e-12);
}

TEST(CondEntropy, ExplicitJointTableInput) {
  TheoremInstance inst = theorem1_instance(rat(1, 2), rat(1, 2));
  inst.seed = 6;
  inst.input.kind = InputModelKind::Table;
  inst.input.table.names = {"x1", "x2"};
  inst.input.table.support = {{0, 0}, {1, 1}, {2, 3}};
  inst.input.table.mass = {0.5, 0.25, 0.25};
  VerifyOptions opts;
  opts.trials = 2;
  opts.seed = 6;
  PowerContext ctx(256);
  EntropyEstimate est = cond_entropy_given_coeffs(inst, OutputSide::Lhs, ctx, opts);

  CoefficientSampler sampler(inst.sampler, 0);
  long double avg = 0.0L;
  for (int d = 0; d < 2; ++d) {
    Rng rng = make_rng(opts.seed, 0xA1, static_cast<std::uint64_t>(d));
    double g1 = sampler.sample(rng);
    double g2 = sampler.sample(rng);
    std::map<std::vector<Value>, double> hist;
    for (std::size_t row = 0; row < 3; ++row) {
      Value z = pfloor(g1 * static_cast<double>(inst.input.table.support[row][0])) +
                pfloor(g2 * static_cast<double>(inst.input.table.support[row][1]));
      hist[{z}] += inst.input.table.mass[row];
    }
    avg += table_entropy(hist);
  }
  EXPECT_NEAR(est.value, static_cast<double>(avg / 2.0L), 1e-12);
}

TEST(CondEntropy, ConditioningSubtractsSideInformation) {
  TheoremInstance inst = theorem1_instance(rat(1, 2), rat(1, 2));
  inst.seed = 12;
  CombinationTerm wterm;
  wterm.source = 0;
  wterm.kind = CoeffKind::BoundedDensity;
  inst.conditioning = CombinationSpec{{wterm}};
  VerifyOptions opts;
  opts.trials = 3;
  opts.seed = 12;
  PowerContext ctx(256);
  EntropyEstimate est = cond_entropy_given_coeffs(inst, OutputSide::Lhs, ctx, opts);

  CoefficientSampler sampler(inst.sampler, 0);
  long double avg = 0.0L;
  for (int d = 0; d < 3; ++d) {
    Rng rng_side = make_rng(opts.seed, 0xA1, static_cast<std::uint64_t>(d));
    Rng rng_w = make_rng(opts.seed, 0xC3, static_cast<std::uint64_t>(d));
    double g1 = sampler.sample(rng_side);
    double g2 = sampler.sample(rng_side);
    double c = sampler.sample(rng_w);
    std::map<std::vector<Value>, double> joint, wonly;
    for (Value x1 = 0; x1 < 16; ++x1)
      for (Value x2 = 0; x2 < 16; ++x2) {
        Value z = pfloor(g1 * static_cast<double>(x1)) + pfloor(g2 * static_cast<double>(x2));
        Value w = pfloor(c * static_cast<double>(x1));
        joint[{z, w}] += 1.0;
        wonly[{w}] += 1.0;
      }
    avg += table_entropy(joint) - table_entropy(wonly);
  }
  EXPECT_NEAR(est.value, static_cast<double>(avg / 3.0L), 1e-12);
  // Conditioning on a function of the inputs cannot raise the entropy.
  TheoremInstance bare = theorem1_instance(rat(1, 2), rat(1, 2));
  bare.seed = 12;
  EntropyEstimate unconditioned = cond_entropy_given_coeffs(bare, OutputSide::Lhs, ctx, opts);
  EXPECT_LE(est.value, unconditioned.value + 1e-9);
}

TEST(CondEntropy, PluginPathTracksExactOnTwoLetters) {
  TheoremInstance inst = theorem1_instance(rat(1, 2), rat(1, 2));
  inst.seed = 21;
  inst.letters = 2;
  VerifyOptions opts;
  opts.trials = 2;
  opts.seed = 21;
  PowerContext ctx(256);
  EntropyEstimate exact = cond_entropy_given_coeffs(inst, OutputSide::Lhs, ctx, opts);
  EXPECT_EQ(exact.method, EntropyMethod::Exact);

  opts.use_plugin = true;
  opts.plugin_samples = 1 << 16;
  EntropyEstimate plugin = cond_entropy_given_coeffs(inst, OutputSide::Lhs, ctx, opts);
  EXPECT_EQ(plugin.method, EntropyMethod::PluginSample);
  EXPECT_NEAR(plugin.value, exact.value, 0.1);
  EXPECT_LE(plugin.value, exact.value + 1e-9);  // plug-in bias is downward
}

TEST(CondEntropy, ThreadCountDoesNotChangeValues) {
  TheoremInstance inst = theorem1_instance(rat(1, 2), rat(1, 2));
  inst.seed = 14;
  VerifyOptions serial;
  serial.trials = 8;
  serial.seed = 14;
  PowerContext ctx(1024);
  VerifyOptions threaded = serial;
  threaded.threads = 3;
  EntropyEstimate a = cond_entropy_given_coeffs(inst, OutputSide::Lhs, ctx, serial);
  EntropyEstimate b = cond_entropy_given_coeffs(inst, OutputSide::Lhs, ctx, threaded);
  EXPECT_DOUBLE_EQ(a.value, b.value);

  VerifyOptions bad = serial;
  bad.trials = 0;
  EXPECT_THROW(cond_entropy_given_coeffs(inst, OutputSide::Lhs, ctx, bad), std::invalid_argument);
}

TEST(VerifySweep, ReportsConsistentFields) {
  TheoremInstance inst = theorem1_instance(Rat(1), rat(1, 2));
  inst.seed = 3;
  VerifyOptions opts;
  opts.trials = 4;
  opts.seed = 3;
  auto reports = verify_sweep(inst, {16.0, 64.0, 256.0}, opts);
  ASSERT_EQ(reports.size(), 3u);
  EXPECT_EQ(reports[0].pbar, 4);
  EXPECT_EQ(reports[1].pbar, 8);
  EXPECT_EQ(reports[2].pbar, 16);
  for (const auto &r : reports) {
    EXPECT_FALSE(r.error.has_value());
    EXPECT_TRUE(r.condition_ok);
    EXPECT_FALSE(r.generalized_target.has_value());
    EXPECT_DOUBLE_EQ(r.gap, r.lhs.value - r.rhs.value);
    EXPECT_DOUBLE_EQ(r.normalized_gap, r.gap / std::log2(static_cast<double>(r.pbar)));
  }
}

TEST(VerifySweep, ConditionFailureCarriesGeneralizedTarget) {
  TheoremInstance inst = theorem1_instance(rat(1, 2), Rat(1));
  inst.seed = 3;
  VerifyOptions opts;
  opts.trials = 4;
  opts.seed = 3;
  auto reports = verify_sweep(inst, {256.0}, opts);
  ASSERT_EQ(reports.size(), 1u);
  EXPECT_FALSE(reports[0].condition_ok);
  ASSERT_TRUE(reports[0].generalized_target.has_value());
  EXPECT_DOUBLE_EQ(*reports[0].generalized_target, -0.5);
}

TEST(VerifySweep, CapOverflowIsPerPointData) {
  TheoremInstance inst = theorem1_instance(Rat(1), rat(1, 2));
  VerifyOptions opts;
  opts.trials = 2;
  opts.cap = 1u << 10;
  // band(3/2) = 64 at P = 256, so two sources need 4096 > cap states.
  auto reports = verify_sweep(inst, {16.0, 256.0}, opts);
  ASSERT_EQ(reports.size(), 2u);
  EXPECT_FALSE(reports[0].error.has_value());
  ASSERT_TRUE(reports[1].error.has_value());
  EXPECT_NE(reports[1].error->find("4096"), std::string::npos);
}

}  // namespace
}  // namespace aisbound
