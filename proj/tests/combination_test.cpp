#include "aisbound/combination.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <vector>

#include "aisbound/coefficients.hpp"
#include "aisbound/rng.hpp"

namespace aisbound {
namespace {

CombinationTerm plain_term(int source) {
  CombinationTerm t;
  t.source = source;
  return t;
}

TEST(Lincomb, HandValues) {
  PowerContext ctx(100);
  CombinationSpec spec{{plain_term(0), plain_term(1)}};
  EXPECT_EQ(lincomb(ctx, spec, {3, 4}, {1.0, 1.0}), 7);
  EXPECT_EQ(lincomb(ctx, spec, {0, 0}, {1.7, -0.3}), 0);

  CombinationSpec one{{plain_term(0)}};
  EXPECT_EQ(lincomb(ctx, one, {3}, {-1.5}), -4);

  EXPECT_THROW(lincomb(ctx, spec, {3}, {1.0, 1.0}), std::invalid_argument);
  EXPECT_THROW(lincomb(ctx, spec, {3, 4}, {1.0}), std::invalid_argument);
}

TEST(TermSignal, BandThenTrim) {
  PowerContext ctx(1.0e4);  // band(1/2) = 10, band(1) = 100
  CombinationTerm t = plain_term(0);
  t.band = BandSelector{Rat(0), Rat(1)};
  EXPECT_EQ(term_signal(ctx, t, 137), 37);
  t.trim = TrimPair{Rat(1), rat(1, 2)};
  EXPECT_EQ(term_signal(ctx, t, 137), 3);
}

TEST(TermSignal, DegenerateTrimIsZero) {
  PowerContext ctx(100);
  CombinationTerm t = plain_term(0);
  t.trim = TrimPair{rat(1, 2), rat(1, 2)};
  EXPECT_EQ(term_signal(ctx, t, 99), 0);
  t.trim = TrimPair{rat(1, 4), rat(1, 2)};
  EXPECT_EQ(term_signal(ctx, t, 99), 0);
}

TEST(TLength, HandValues) {
  std::vector<Rat> eta = {Rat(1), rat(1, 2)};
  CombinationTerm a = plain_term(0);
  a.trim = TrimPair{rat(3, 4), rat(1, 4)};
  CombinationTerm b = plain_term(1);
  b.trim = TrimPair{rat(9, 10), rat(1, 5)};
  EXPECT_EQ(t_length(CombinationSpec{{a, b}}, eta), rat(1, 2));

  CombinationTerm same = plain_term(0);
  same.trim = TrimPair{rat(1, 2), rat(1, 2)};
  EXPECT_EQ(t_length(CombinationSpec{{same}}, eta), Rat(0));

  EXPECT_EQ(t_length(CombinationSpec{{plain_term(1)}}, eta), rat(1, 2));
}

TEST(TLength, MonotoneInTrimEdges) {
  std::vector<Rat> eta = {Rat(1)};
  Rng rng = make_rng(17, 4);
  for (int i = 0; i < 500; ++i) {
    long long gn = std::llround(uniform_unit(rng) * 12);
    long long dn = std::llround(uniform_unit(rng) * 12);
    CombinationTerm t = plain_term(0);
    t.trim = TrimPair{Rat(gn, 12), Rat(dn, 12)};
    Rat base = t_length(CombinationSpec{{t}}, eta);

    CombinationTerm wider = t;
    wider.trim->gamma += rat(1, 12);
    EXPECT_GE(t_length(CombinationSpec{{wider}}, eta), base);

    CombinationTerm shallower = t;
    shallower.trim->delta += rat(1, 12);
    EXPECT_LE(t_length(CombinationSpec{{shallower}}, eta), base);
  }
}

TEST(RangeBound, HandValues) {
  PowerContext ctx(100);  // band(1) = 10
  std::vector<Rat> eta = {Rat(1), Rat(1)};
  CombinationSpec spec{{plain_term(0), plain_term(1)}};
  EXPECT_EQ(range_bound(spec, eta, ctx, 2.0), 40);
  EXPECT_EQ(range_bound(CombinationSpec{}, eta, ctx, 2.0), 0);
}

TEST(RangeBound, NeverExceededOnExhaustiveScan) {
  PowerContext ctx(64);  // band(1) = 8
  std::vector<Rat> eta = {Rat(1), Rat(1)};
  CombinationSpec spec{{plain_term(0), plain_term(1)}};
  const Value bound = range_bound(spec, eta, ctx, 2.0);
  CoefficientSampler sampler = CoefficientSampler::default_signed(23);
  Rng rng = make_rng(23, 1);
  for (int d = 0; d < 1000; ++d) {
    std::vector<double> coeffs = {sampler.sample(rng), sampler.sample(rng)};
    for (Value x1 = 0; x1 < 8; ++x1)
      for (Value x2 = 0; x2 < 8; ++x2)
        ASSERT_LE(std::llabs(lincomb(ctx, spec, {x1, x2}, coeffs)), bound);
  }
}

TEST(RangeBound, CoversTrimmedTerms) {
  PowerContext ctx(256);  // band(1/2) = 4, band(1) = 16
  std::vector<Rat> eta = {Rat(1)};
  CombinationTerm t = plain_term(0);
  t.trim = TrimPair{Rat(1), rat(1, 2)};
  CombinationSpec spec{{t}};
  EXPECT_EQ(t_length(spec, eta), rat(1, 2));
  EXPECT_EQ(range_bound(spec, eta, ctx, 2.0), 8);
  for (Value x = 0; x < 16; ++x)
    ASSERT_LE(std::llabs(lincomb(ctx, spec, {x}, {-2.0})), 8);
}

TEST(CombinationSpecShape, CountsBoundedTerms) {
  CombinationTerm fixed = plain_term(0);
  fixed.kind = CoeffKind::Fixed;
  fixed.fixed_value = 1.0;
  CombinationSpec spec{{plain_term(0), fixed, plain_term(1)}};
  EXPECT_EQ(spec.k(), 3u);
  EXPECT_EQ(spec.bounded_term_count(), 2u);
}

}  // namespace
}  // namespace aisbound
