#include "aisbound/mimo.hpp"

#include <gtest/gtest.h>

#include <cmath>

namespace aisbound {
namespace {

TEST(MimoConfig, WorkedChannelTrimLevels) {
  MimoIcConfig config;
  EXPECT_EQ(config.rx1_a_trim().gamma, Rat(1));
  EXPECT_EQ(config.rx1_a_trim().delta, rat(1, 4));
  EXPECT_EQ(config.rx1_c_trim().delta, rat(1, 2));
  EXPECT_EQ(config.rx2_a_trim().delta, rat(1, 3));
  EXPECT_EQ(config.rx2_c_trim().delta, rat(2, 3));
}

TEST(MimoConfig, TrimLevelsScaleWithBandLayout) {
  MimoIcConfig config;
  config.level_scale = rat(1, 2);
  EXPECT_EQ(config.rx1_c_trim().gamma, rat(1, 2));
  EXPECT_EQ(config.rx1_c_trim().delta, rat(1, 4));
  EXPECT_EQ(config.rx2_c_trim().delta, rat(1, 3));
}

TEST(MimoConfig, Validation) {
  MimoIcConfig bad;
  bad.n1 = 0;
  EXPECT_THROW(bad.validate(), std::invalid_argument);
  bad = MimoIcConfig{};
  bad.b12 = rat(5, 4);
  EXPECT_THROW(bad.validate(), std::invalid_argument);
  bad = MimoIcConfig{};
  bad.m1 = 4;
  EXPECT_NO_THROW(bad.validate());
  EXPECT_THROW(bad.require_worked_shape(), std::invalid_argument);
}

TEST(MinAbsMinor, HandMatrices) {
  Matrix identity2 = {{1.0, 0.0}, {0.0, 1.0}};
  EXPECT_DOUBLE_EQ(detail::min_abs_minor(identity2), 1.0);
  Matrix repeated = {{1.0, 1.0, 2.0}, {1.0, 1.0, 3.0}};
  EXPECT_DOUBLE_EQ(detail::min_abs_minor(repeated), 0.0);
  Matrix row = {{-3.0, 0.5, 2.0}};
  EXPECT_DOUBLE_EQ(detail::min_abs_minor(row), 0.5);
  Matrix three = {{2.0, 0.0, 0.0, 1.0},
                  {0.0, 2.0, 0.0, 1.0},
                  {0.0, 0.0, 2.0, 1.0}};
  EXPECT_GT(detail::min_abs_minor(three), 0.0);
}

TEST(DrawMimo, AcceptedMatricesMeetMinorFloor) {
  MimoIcConfig config;
  CoefficientSampler sampler = CoefficientSampler::default_signed(3);
  Rng rng = make_rng(3, 5);
  const double floor = 1.0 / 16;
  for (int i = 0; i < 20; ++i) {
    MimoCoefficients g = draw_mimo_coefficients(config, sampler, rng, floor);
    EXPECT_GE(detail::min_abs_minor(g.g11), floor);
    EXPECT_GE(detail::min_abs_minor(g.g12), floor);
    EXPECT_GE(detail::min_abs_minor(g.g21), floor);
    EXPECT_GE(detail::min_abs_minor(g.g22), floor);
  }
}

TEST(DrawMimo, ImpossibleFloorExhaustsBudget) {
  MimoIcConfig config;
  CoefficientSampler sampler = CoefficientSampler::default_signed(3);
  Rng rng = make_rng(3, 6);
  EXPECT_THROW(draw_mimo_coefficients(config, sampler, rng, 100.0, 50), NonDegeneracyError);
}

TEST(MimoOutputs, ZeroInputsGiveZeroOutputs) {
  MimoIcConfig config;
  PowerContext ctx(256);
  CoefficientSampler sampler = CoefficientSampler::default_signed(8);
  Rng rng = make_rng(8, 1);
  MimoCoefficients g = draw_mimo_coefficients(config, sampler, rng);
  MimoOutputs out = mimo_ic_outputs(config, ctx, g, IntVector(5, 0), IntVector(5, 0));
  EXPECT_EQ(out.y1, (IntVector{0, 0}));
  EXPECT_EQ(out.y2, (IntVector{0, 0, 0}));
}

TEST(MimoOutputs, ShapeAndRangeChecks) {
  MimoIcConfig config;
  PowerContext ctx(256);
  CoefficientSampler sampler = CoefficientSampler::default_signed(8);
  Rng rng = make_rng(8, 2);
  MimoCoefficients g = draw_mimo_coefficients(config, sampler, rng);
  EXPECT_THROW(mimo_ic_outputs(config, ctx, g, IntVector(4, 0), IntVector(5, 0)),
               std::invalid_argument);
  const Value top = ctx.band(Rat(1));
  EXPECT_NO_THROW(mimo_ic_outputs(config, ctx, g, IntVector(5, top), IntVector(5, top)));
  EXPECT_THROW(mimo_ic_outputs(config, ctx, g, IntVector(5, top + 1), IntVector(5, 0)),
               std::domain_error);
  EXPECT_THROW(mimo_ic_outputs(config, ctx, g, IntVector(5, 0), IntVector(5, -1)),
               std::domain_error);
}

// Receiver 1 sees nothing of X2a below level 1/4: with band(1) = 16 and
// band(1/4) = 2, values 0 and 1 on an X2a antenna are invisible at Y1.
TEST(MimoOutputs, InterferenceBelowCsitFloorIsInvisible) {
  MimoIcConfig config;
  PowerContext ctx(65536);  // band(1) = 256, band(1/4) = 4
  CoefficientSampler sampler = CoefficientSampler::default_signed(12);
  Rng rng = make_rng(12, 3);
  MimoCoefficients g = draw_mimo_coefficients(config, sampler, rng);
  IntVector x1(5, 0);
  for (Value low = 0; low < 4; ++low) {
    IntVector x2(5, 0);
    x2[0] = low;
    MimoOutputs out = mimo_ic_outputs(config, ctx, g, x1, x2);
    EXPECT_EQ(out.y1, (IntVector{0, 0})) << "low bits leaked into Y1";
  }
  IntVector x2(5, 0);
  x2[0] = 4;  // first value with a nonzero (x)^1_{1/4} window
  MimoOutputs out = mimo_ic_outputs(config, ctx, g, x1, x2);
  EXPECT_NE(out.y1[0] * out.y1[0] + out.y1[1] * out.y1[1], 0);
}

// Own-signal bands: Y1 depends on X1 only through antennas 4..5, Y2 on X2
// only through antennas 3..5.
TEST(MimoOutputs, OwnSignalAntennaSplit) {
  MimoIcConfig config;
  PowerContext ctx(256);
  CoefficientSampler sampler = CoefficientSampler::default_signed(21);
  Rng rng = make_rng(21, 4);
  MimoCoefficients g = draw_mimo_coefficients(config, sampler, rng);
  IntVector zero(5, 0);
  for (int antenna = 0; antenna < 3; ++antenna) {
    IntVector x1(5, 0);
    x1[antenna] = 7;
    MimoOutputs out = mimo_ic_outputs(config, ctx, g, x1, zero);
    EXPECT_EQ(out.y1, (IntVector{0, 0})) << "X1a antenna " << antenna << " reached Y1";
  }
  for (int antenna = 0; antenna < 2; ++antenna) {
    IntVector x2(5, 0);
    x2[antenna] = 7;
    MimoOutputs out = mimo_ic_outputs(config, ctx, g, zero, x2);
    EXPECT_EQ(out.y2, (IntVector{0, 0, 0})) << "X2a antenna " << antenna << " reached Y2";
  }
}

}  // namespace
}  // namespace aisbound
