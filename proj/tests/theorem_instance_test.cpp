#include "aisbound/theorem_instance.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <vector>

namespace aisbound {
namespace {

TheoremInstance stacked_bands_instance() {
  TheoremInstance inst;
  inst.sources = 3;
  inst.outputs = 1;
  inst.level_grid = {{rat(1, 2), rat(1, 4), rat(1, 8), rat(1, 8)}};
  inst.index_sets = {{{4}, {2, 3, 4}, {1, 2, 3, 4}}};
  return inst;
}

TheoremInstance two_output_instance() {
  TheoremInstance inst;
  inst.sources = 3;
  inst.outputs = 2;
  inst.level_grid = {{rat(1, 4), rat(1, 4), rat(1, 4), rat(1, 4)},
                     {rat(1, 4), rat(1, 4), rat(1, 4), rat(1, 4)}};
  inst.index_sets = {{{4}, {2, 4}, {1, 2, 3, 4}}, {{4}, {3, 4}, {1, 2, 3, 4}}};
  return inst;
}

TEST(TheoremOneInstance, ShapeAndLevels) {
  TheoremInstance inst = theorem1_instance(Rat(1), rat(1, 2));
  EXPECT_NO_THROW(inst.validate());
  EXPECT_EQ(inst.sources, 2);
  EXPECT_EQ(inst.outputs, 1);
  EXPECT_EQ(inst.bands(), 2);
  EXPECT_EQ(inst.alphabet_level(), rat(3, 2));
  EXPECT_EQ(inst.prefix(0, 1), Rat(1));
  EXPECT_THROW(theorem1_instance(Rat(-1), Rat(0)), std::invalid_argument);
}

TEST(LevelCondition, TheoremOneHoldsIffTopBandDominates) {
  EXPECT_TRUE(level_condition_holds(theorem1_instance(Rat(1), rat(1, 2))));
  EXPECT_TRUE(level_condition_holds(theorem1_instance(rat(1, 2), rat(1, 2))));
  EXPECT_TRUE(level_condition_holds(theorem1_instance(rat(3, 4), Rat(0))));
  EXPECT_FALSE(level_condition_holds(theorem1_instance(rat(1, 2), Rat(1))));

  auto entries = check_level_condition(theorem1_instance(Rat(1), rat(1, 2)));
  ASSERT_EQ(entries.size(), 1u);
  EXPECT_EQ(entries[0].k, 1);
  EXPECT_EQ(entries[0].s, 1);
  EXPECT_EQ(entries[0].tail_t_sum, Rat(1));
  EXPECT_EQ(entries[0].level_prefix, Rat(1));
  EXPECT_EQ(entries[0].tail_t_sum, entries[0].tail_t_sum_direct);
}

TEST(LevelCondition, StackedBandsExample) {
  TheoremInstance inst = stacked_bands_instance();
  auto entries = check_level_condition(inst);
  ASSERT_EQ(entries.size(), 2u);
  // Split below Z_{1,1}: T(Z_{1,2}) + T(Z_{1,3}) = 1/4 + 1/2 against prefix 7/8.
  EXPECT_EQ(entries[0].tail_t_sum, rat(3, 4));
  EXPECT_EQ(entries[0].level_prefix, rat(7, 8));
  EXPECT_TRUE(entries[0].ok);
  // Split below Z_{1,2}: T(Z_{1,3}) = 1/2 against prefix 1/2.
  EXPECT_EQ(entries[1].tail_t_sum, rat(1, 2));
  EXPECT_EQ(entries[1].level_prefix, rat(1, 2));
  EXPECT_TRUE(entries[1].ok);
}

TEST(LevelCondition, TwoOutputExample) {
  TheoremInstance inst = two_output_instance();
  EXPECT_TRUE(level_condition_holds(inst));
  auto entries = check_level_condition(inst);
  ASSERT_EQ(entries.size(), 4u);
  for (const auto &e : entries) {
    EXPECT_TRUE(e.ok) << "k=" << e.k << " s=" << e.s;
    EXPECT_EQ(e.tail_t_sum, e.tail_t_sum_direct);
  }
}

TEST(LevelCondition, DualRoutesAgreeUnderTrims) {
  TheoremInstance inst = stacked_bands_instance();
  TrimOverride ov;
  ov.k = 1;
  ov.l = 3;
  ov.band = 1;
  ov.source = 2;
  ov.trim = TrimPair{rat(3, 8), rat(1, 8)};
  inst.trims.push_back(ov);
  auto entries = check_level_condition(inst);
  for (const auto &e : entries) EXPECT_EQ(e.tail_t_sum, e.tail_t_sum_direct);
}

TEST(Validation, MonotoneIndexShape) {
  TheoremInstance inst = theorem1_instance(Rat(1), Rat(1));
  inst.index_sets = {{{1, 2}, {2}}};
  try {
    inst.validate();
    FAIL() << "expected MonotoneIndexError";
  } catch (const MonotoneIndexError &e) {
    EXPECT_EQ(e.k(), 1);
    EXPECT_EQ(e.a(), 1);
    EXPECT_EQ(e.b(), 2);
  }
  const std::invalid_argument *base = nullptr;
  try {
    inst.validate();
  } catch (const std::invalid_argument &e) {
    base = &e;
    EXPECT_NE(std::string(e.what()).find("I_{1,1}"), std::string::npos);
  }
  EXPECT_NE(base, nullptr);
}

TEST(Validation, RejectsMalformedInstances) {
  TheoremInstance inst = theorem1_instance(Rat(1), Rat(1));
  inst.outputs = 3;
  EXPECT_THROW(inst.validate(), std::invalid_argument);

  inst = theorem1_instance(Rat(1), Rat(1));
  inst.level_grid = {{Rat(1)}, {Rat(1)}};
  EXPECT_THROW(inst.validate(), std::invalid_argument);

  inst = theorem1_instance(Rat(1), Rat(1));
  inst.index_sets = {{{2}, {1, 3}}};
  EXPECT_THROW(inst.validate(), std::invalid_argument);

  inst = theorem1_instance(Rat(1), Rat(1));
  inst.index_sets = {{{2}, {}}};
  EXPECT_THROW(inst.validate(), std::invalid_argument);

  inst = theorem1_instance(Rat(1), Rat(1));
  inst.trims.push_back(TrimOverride{1, 2, 1, 1, TrimPair{Rat(2), Rat(0)}});
  EXPECT_THROW(inst.validate(), std::invalid_argument);

  inst = theorem1_instance(Rat(1), Rat(1));
  inst.trims.push_back(TrimOverride{1, 1, 1, 1, TrimPair{rat(1, 2), Rat(0)}});
  EXPECT_THROW(inst.validate(), std::invalid_argument);
}

TEST(BuildMaps, TheoremOneLayout) {
  TheoremInstance inst = theorem1_instance(Rat(1), rat(1, 2));
  InstanceMaps maps = build_maps(inst);
  ASSERT_EQ(maps.lhs.size(), 1u);
  EXPECT_EQ(maps.lhs[0].terms.size(), 2u);
  EXPECT_EQ(maps.lhs[0].terms[0].kind, CoeffKind::BoundedDensity);
  ASSERT_EQ(maps.rhs.size(), 2u);
  EXPECT_EQ(maps.rhs_ids[0], (std::pair<int, int>{1, 1}));
  EXPECT_EQ(maps.rhs_flat_index(1, 2), 1);
  EXPECT_THROW(maps.rhs_flat_index(2, 1), std::invalid_argument);

  ASSERT_EQ(maps.rhs[0].terms.size(), 2u);
  EXPECT_EQ(maps.rhs[0].terms[0].band->lo, Rat(1));
  EXPECT_EQ(maps.rhs[0].terms[0].band->hi, rat(3, 2));
  ASSERT_EQ(maps.rhs[1].terms.size(), 4u);
  EXPECT_EQ(maps.rhs[1].terms[0].band->lo, Rat(0));
  EXPECT_EQ(maps.rhs[1].terms[0].band->hi, Rat(1));
  EXPECT_EQ(maps.rhs[1].terms[2].band->lo, Rat(1));
  EXPECT_EQ(maps.eta, (std::vector<Rat>{rat(3, 2), rat(3, 2)}));
}

TEST(FreezeCoefficients, DeterministicPerSeed) {
  TheoremInstance inst = theorem1_instance(Rat(1), rat(1, 2));
  inst.seed = 77;
  InstanceMaps a = build_maps(inst);
  freeze_rhs_coefficients(a, inst);
  InstanceMaps b = build_maps(inst);
  freeze_rhs_coefficients(b, inst);
  inst.seed = 78;
  InstanceMaps c = build_maps(inst);
  freeze_rhs_coefficients(c, inst);

  bool any_differs = false;
  for (std::size_t r = 0; r < a.rhs.size(); ++r)
    for (std::size_t t = 0; t < a.rhs[r].terms.size(); ++t) {
      double va = a.rhs[r].terms[t].fixed_value;
      EXPECT_DOUBLE_EQ(va, b.rhs[r].terms[t].fixed_value);
      double mag = std::fabs(va);
      EXPECT_GE(mag, 1.0);
      EXPECT_LE(mag, 2.0);
      any_differs = any_differs || va != c.rhs[r].terms[t].fixed_value;
    }
  EXPECT_TRUE(any_differs);
}

TEST(RealizeOutputs, HandEvaluation) {
  TheoremInstance inst = theorem1_instance(Rat(1), rat(1, 2));
  inst.rhs_kind = CoeffKind::BoundedDensity;
  InstanceMaps maps = build_maps(inst);
  PowerContext ctx(256);  // band(1) = 16, band(3/2) = 64

  std::vector<std::vector<double>> rhs_ones = {{1.0, 1.0}, {1.0, 1.0, 1.0, 1.0}};
  RealizedOutputs out = realize_outputs(maps, ctx, {37, 11}, {{1.0, 1.0}}, &rhs_ones);
  EXPECT_EQ(out.z, (IntVector{48}));
  EXPECT_EQ(out.zkl, (IntVector{2, 18}));

  EXPECT_THROW(realize_outputs(maps, ctx, {37, 11}, {{1.0, 1.0}}), std::invalid_argument);
  EXPECT_THROW(realize_outputs(maps, ctx, {37, 11}, {}), std::invalid_argument);
}

// The stacked encoding yields the same values as evaluating the two-band
// windows directly.
TEST(RealizeOutputs, MatchesDirectWindowFormulas) {
  TheoremInstance inst = theorem1_instance(Rat(1), rat(1, 2));
  inst.seed = 5;
  InstanceMaps maps = build_maps(inst);
  freeze_rhs_coefficients(maps, inst);
  PowerContext ctx(256);
  const Value top = ctx.band(rat(3, 2));
  const double c11_1 = maps.rhs[0].terms[0].fixed_value;
  const double c11_2 = maps.rhs[0].terms[1].fixed_value;
  const double c12_1 = maps.rhs[1].terms[0].fixed_value;
  const double c12_2 = maps.rhs[1].terms[1].fixed_value;
  const double c12_3 = maps.rhs[1].terms[2].fixed_value;
  const double c12_4 = maps.rhs[1].terms[3].fixed_value;

  Rng rng = make_rng(5, 77);
  for (int i = 0; i < 10000; ++i) {
    Value x1 = static_cast<Value>(uniform_unit(rng) * static_cast<double>(top));
    Value x2 = static_cast<Value>(uniform_unit(rng) * static_cast<double>(top));
    double g1 = 1.0 + uniform_unit(rng), g2 = 1.0 + uniform_unit(rng);
    RealizedOutputs out = realize_outputs(maps, ctx, {x1, x2}, {{g1, g2}});

    Value z = pfloor(g1 * static_cast<double>(x1)) + pfloor(g2 * static_cast<double>(x2));
    Value hi1 = part_window(ctx, x1, Rat(1), rat(3, 2));
    Value hi2 = part_window(ctx, x2, Rat(1), rat(3, 2));
    Value lo1 = part_low(ctx, x1, Rat(1));
    Value lo2 = part_low(ctx, x2, Rat(1));
    Value z11 = pfloor(c11_1 * static_cast<double>(hi1)) + pfloor(c11_2 * static_cast<double>(hi2));
    Value z12 = pfloor(c12_1 * static_cast<double>(lo1)) + pfloor(c12_2 * static_cast<double>(lo2)) +
                pfloor(c12_3 * static_cast<double>(hi1)) + pfloor(c12_4 * static_cast<double>(hi2));
    ASSERT_EQ(out.z[0], z);
    ASSERT_EQ(out.zkl[0], z11);
    ASSERT_EQ(out.zkl[1], z12);
  }
}

}  // namespace
}  // namespace aisbound
