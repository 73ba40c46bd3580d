#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "coefficients.hpp"
#include "combination.hpp"
#include "power_level.hpp"
#include "rational.hpp"
#include "rng.hpp"

namespace aisbound {

/**
 * Two-user MIMO interference channel in its deterministic power-level form:
 * (M1, M2) transmit antennas, (N1, N2) receive antennas, gain exponents
 * alpha_rs and channel-knowledge exponents beta_rs. level_scale multiplies
 * every band edge, so reduced-level copies of the same channel run with
 * small alphabets.
 */
struct MimoIcConfig {
  int m1 = 5, m2 = 5, n1 = 2, n2 = 3;
  Rat a11{1}, a12{3, 4}, a21{2, 3}, a22{1};
  Rat b12{1, 4}, b21{1, 3};
  Rat level_scale{1};

  void validate() const {
    if (m1 <= 0 || m2 <= 0 || n1 <= 0 || n2 <= 0)
      throw std::invalid_argument("MimoIcConfig: antenna counts must be positive");
    for (const Rat &a : {a11, a12, a21, a22})
      if (a < Rat(0)) throw std::invalid_argument("MimoIcConfig: negative strength exponent");
    for (const Rat &b : {b12, b21})
      if (b < Rat(0) || b > Rat(1))
        throw std::invalid_argument("MimoIcConfig: csit exponent outside [0,1]");
    if (level_scale <= Rat(0)) throw std::invalid_argument("MimoIcConfig: level_scale must be positive");
  }

  // The deterministic signal map below is written for the worked channel.
  void require_worked_shape() const {
    validate();
    if (m1 != 5 || m2 != 5 || n1 != 2 || n2 != 3)
      throw std::invalid_argument("mimo: signal map requires the (5,5,2,3) antenna layout");
  }

  // Interference band edges seen by each receiver, as exact levels.
  TrimPair rx1_a_trim() const { return {level_scale, b12 * level_scale}; }
  TrimPair rx1_c_trim() const { return {level_scale, (Rat(1) - a12 + b12) * level_scale}; }
  TrimPair rx2_a_trim() const { return {level_scale, b21 * level_scale}; }
  TrimPair rx2_c_trim() const { return {level_scale, (Rat(1) - a21 + b21) * level_scale}; }
};

using Matrix = std::vector<std::vector<double>>;

struct MimoCoefficients {
  Matrix g11, g12;  // receiver 1: N1 x M1, N1 x M2
  Matrix g21, g22;  // receiver 2: N2 x M1, N2 x M2
};

namespace detail {

inline double det2(const Matrix &m, int r0, int r1, int c0, int c1) {
  return m[r0][c0] * m[r1][c1] - m[r0][c1] * m[r1][c0];
}

inline double det3(const Matrix &m, const std::array<int, 3> &c) {
  return m[0][c[0]] * (m[1][c[1]] * m[2][c[2]] - m[1][c[2]] * m[2][c[1]]) -
         m[0][c[1]] * (m[1][c[0]] * m[2][c[2]] - m[1][c[2]] * m[2][c[0]]) +
         m[0][c[2]] * (m[1][c[0]] * m[2][c[1]] - m[1][c[1]] * m[2][c[0]]);
}

// Smallest |det| over all square column selections of an N x M matrix, N in {1,2,3}.
inline double min_abs_minor(const Matrix &m) {
  const int rows = static_cast<int>(m.size());
  const int cols = static_cast<int>(m[0].size());
  double best = 9e99;
  if (rows == 1) {
    for (int c = 0; c < cols; ++c) best = std::min(best, std::fabs(m[0][c]));
  } else if (rows == 2) {
    for (int c0 = 0; c0 < cols; ++c0)
      for (int c1 = c0 + 1; c1 < cols; ++c1)
        best = std::min(best, std::fabs(det2(m, 0, 1, c0, c1)));
  } else if (rows == 3) {
    for (int c0 = 0; c0 < cols; ++c0)
      for (int c1 = c0 + 1; c1 < cols; ++c1)
        for (int c2 = c1 + 1; c2 < cols; ++c2)
          best = std::min(best, std::fabs(det3(m, {c0, c1, c2})));
  } else {
    throw std::invalid_argument("min_abs_minor: unsupported row count");
  }
  return best;
}

}  // namespace detail

/** Raised when rejection sampling cannot make every square minor non-degenerate. */
class NonDegeneracyError : public std::runtime_error {
 public:
  NonDegeneracyError(const std::string &which, int budget, double det_min)
      : std::runtime_error("mimo: matrix " + which + " stayed degenerate after " +
                           std::to_string(budget) + " resamples (|det| >= " +
                           std::to_string(det_min) + " required)") {}
};

// One channel matrix with every N_r x N_r column minor at least det_min in
// magnitude, by rejection.
inline Matrix draw_nondegenerate_matrix(int rows, int cols, const CoefficientSampler &sampler,
                                        Rng &rng, double det_min, int budget,
                                        const std::string &which) {
  Matrix m(rows, std::vector<double>(cols));
  for (int attempt = 0; attempt < budget; ++attempt) {
    for (auto &row : m)
      for (double &g : row) g = sampler.sample(rng);
    if (detail::min_abs_minor(m) >= det_min) return m;
  }
  throw NonDegeneracyError(which, budget, det_min);
}

// det_min <= 0 selects the sampler's delta1 (the non-degeneracy threshold of
// the channel definition).
inline MimoCoefficients draw_mimo_coefficients(const MimoIcConfig &config,
                                               const CoefficientSampler &sampler, Rng &rng,
                                               double det_min = 0.0, int budget = 1000) {
  config.validate();
  if (det_min <= 0.0) det_min = sampler.delta1();
  MimoCoefficients g;
  g.g11 = draw_nondegenerate_matrix(config.n1, config.m1, sampler, rng, det_min, budget, "G11");
  g.g12 = draw_nondegenerate_matrix(config.n1, config.m2, sampler, rng, det_min, budget, "G12");
  g.g21 = draw_nondegenerate_matrix(config.n2, config.m1, sampler, rng, det_min, budget, "G21");
  g.g22 = draw_nondegenerate_matrix(config.n2, config.m2, sampler, rng, det_min, budget, "G22");
  return g;
}

struct MimoOutputs {
  IntVector y1;  // N1 entries
  IntVector y2;  // N2 entries
};

// Deterministic receive signals for the worked (5,5,2,3) channel.
//   Y1 = L(own top band X1c, interfering X2a above beta12, X2c above 1-a12+b12)
//   Y2 = L(own top band X2c, interfering X1a above beta21, X1c above 1-a21+b21)
// Antenna bands: X1a = antennas 1..3 of user 1, X1c = 4..5; X2a = 1..2, X2c = 3..5.
inline MimoOutputs mimo_ic_outputs(const MimoIcConfig &config, const PowerContext &ctx,
                                   const MimoCoefficients &g, const IntVector &x1,
                                   const IntVector &x2) {
  config.require_worked_shape();
  if (x1.size() != 5 || x2.size() != 5)
    throw std::invalid_argument("mimo_ic_outputs: inputs must have 5 antenna entries");
  const Value top = ctx.band(config.level_scale);
  for (Value v : concat(x1, x2))
    if (v < 0 || v > top) throw std::domain_error("mimo_ic_outputs: entry outside {0,...,pbar}");

  auto window = [&](Value v, const TrimPair &t) {
    return part_window(ctx, v, t.delta, t.gamma);
  };
  const TrimPair t2a = config.rx1_a_trim(), t2c = config.rx1_c_trim();
  const TrimPair t1a = config.rx2_a_trim(), t1c = config.rx2_c_trim();

  MimoOutputs out;
  out.y1.resize(2);
  for (int r = 0; r < 2; ++r) {
    Value acc = 0;
    for (int m = 3; m < 5; ++m) acc += pfloor(g.g11[r][m] * static_cast<double>(x1[m]));
    for (int m = 0; m < 2; ++m)
      acc += pfloor(g.g12[r][m] * static_cast<double>(window(x2[m], t2a)));
    for (int m = 2; m < 5; ++m)
      acc += pfloor(g.g12[r][m] * static_cast<double>(window(x2[m], t2c)));
    out.y1[r] = acc;
  }
  out.y2.resize(3);
  for (int r = 0; r < 3; ++r) {
    Value acc = 0;
    for (int m = 2; m < 5; ++m) acc += pfloor(g.g22[r][m] * static_cast<double>(x2[m]));
    for (int m = 0; m < 3; ++m)
      acc += pfloor(g.g21[r][m] * static_cast<double>(window(x1[m], t1a)));
    for (int m = 3; m < 5; ++m)
      acc += pfloor(g.g21[r][m] * static_cast<double>(window(x1[m], t1c)));
    out.y2[r] = acc;
  }
  return out;
}

}  // namespace aisbound
