#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "rng.hpp"

namespace aisbound {

enum class CoeffFamily { UniformMagnitudeSigned, UniformPositive };

struct SamplerConfig {
  double delta1 = 1.0;
  double delta2 = 2.0;
  double f_max = 1.0;
  CoeffFamily family = CoeffFamily::UniformMagnitudeSigned;
};

/**
 * Draws channel coefficients with magnitude in [delta1, delta2] and density
 * bounded by f_max. The density bound is checked analytically per family at
 * construction, so a sampler that exists is always within its declaration.
 */
class CoefficientSampler {
 public:
  CoefficientSampler(double delta1, double delta2, double f_max, CoeffFamily family,
                     std::uint64_t seed)
      : delta1_(delta1), delta2_(delta2), f_max_(f_max), family_(family), seed_(seed),
        engine_(mix64(seed)) {
    if (!(delta1 > 0.0)) throw std::invalid_argument("sampler: delta1 must be positive");
    if (!(delta2 >= delta1)) throw std::invalid_argument("sampler: delta2 must be >= delta1");
    if (!(f_max > 0.0)) throw std::invalid_argument("sampler: f_max must be positive");
    if (!(delta2 > delta1))
      throw std::invalid_argument("sampler: degenerate support has unbounded density");
    if (peak_density() > f_max_)
      throw std::invalid_argument("sampler: family peak density exceeds declared f_max");
  }

  CoefficientSampler(const SamplerConfig &config, std::uint64_t seed)
      : CoefficientSampler(config.delta1, config.delta2, config.f_max, config.family, seed) {}

  static CoefficientSampler default_signed(std::uint64_t seed) {
    return CoefficientSampler(1.0, 2.0, 1.0, CoeffFamily::UniformMagnitudeSigned, seed);
  }

  SamplerConfig config() const {
    return SamplerConfig{delta1_, delta2_, f_max_, family_};
  }

  double delta1() const noexcept { return delta1_; }
  double delta2() const noexcept { return delta2_; }
  double f_max() const noexcept { return f_max_; }
  CoeffFamily family() const noexcept { return family_; }
  std::uint64_t seed() const noexcept { return seed_; }

  double peak_density() const {
    double magnitude_span = delta2_ - delta1_;
    return family_ == CoeffFamily::UniformMagnitudeSigned ? 1.0 / (2.0 * magnitude_span)
                                                          : 1.0 / magnitude_span;
  }

  // One draw from an external engine; the sampler's own engine is untouched.
  double sample(Rng &rng) const {
    double magnitude = delta1_ + uniform_unit(rng) * (delta2_ - delta1_);
    if (family_ == CoeffFamily::UniformPositive) return magnitude;
    return (rng() & 1ull) ? magnitude : -magnitude;
  }

  std::vector<double> draw_coefficients(std::size_t count) {
    if (count < 1) throw std::invalid_argument("draw_coefficients: count must be >= 1");
    std::vector<double> out(count);
    for (double &g : out) g = sample(engine_);
    return out;
  }

 private:
  double delta1_, delta2_, f_max_;
  CoeffFamily family_;
  std::uint64_t seed_;
  Rng engine_;
};

/** Arbitrary constant coefficients, magnitude-capped by the channel bound. */
class FixedCoefficients {
 public:
  FixedCoefficients(std::vector<double> values, double delta2) : values_(std::move(values)) {
    for (double h : values_)
      if (!(h >= -delta2 && h <= delta2))
        throw std::invalid_argument("FixedCoefficients: |h| exceeds delta2");
  }

  const std::vector<double> &values() const noexcept { return values_; }
  std::size_t size() const noexcept { return values_.size(); }
  double operator[](std::size_t i) const { return values_.at(i); }

 private:
  std::vector<double> values_;
};

}  // namespace aisbound
