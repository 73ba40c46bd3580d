#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "power_level.hpp"

namespace aisbound {

/** Exact finite joint distribution over named integer variables. */
struct JointTable {
  std::vector<std::string> names;
  std::vector<std::vector<Value>> support;
  std::vector<double> mass;

  void validate() const {
    if (support.size() != mass.size())
      throw std::invalid_argument("JointTable: support/mass length mismatch");
    double total = 0.0;
    for (std::size_t i = 0; i < support.size(); ++i) {
      if (support[i].size() != names.size())
        throw std::invalid_argument("JointTable: tuple arity mismatch");
      if (mass[i] < 0.0) throw std::invalid_argument("JointTable: negative mass");
      total += mass[i];
    }
    if (std::fabs(total - 1.0) > 1e-12)
      throw std::invalid_argument("JointTable: masses must sum to 1");
    auto sorted = support;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
      throw std::invalid_argument("JointTable: duplicate support tuples");
  }

  std::size_t column(const std::string &name) const {
    for (std::size_t i = 0; i < names.size(); ++i)
      if (names[i] == name) return i;
    throw std::invalid_argument("JointTable: undeclared variable '" + name + "'");
  }
};

enum class EntropyMethod { Exact, PluginSample };

struct EntropyEstimate {
  double value = 0.0;  // bits
  EntropyMethod method = EntropyMethod::Exact;
  long long trials = 0;
  double normalizer = 1.0;  // log2(pbar) where a power context applies
  double bias_estimate = 0.0;
  bool bias_flagged = false;

  double normalized() const { return value / normalizer; }
};

namespace detail {

inline double entropy_of_masses(const std::vector<double> &masses) {
  long double h = 0.0L, total = 0.0L;
  for (double m : masses) total += m;
  if (total <= 0.0L) return 0.0;
  for (double m : masses)
    if (m > 0.0) h -= static_cast<long double>(m) * std::log2(static_cast<long double>(m));
  // Masses close to but not exactly summing to 1 renormalize here.
  return static_cast<double>(h / total + std::log2(total));
}

}  // namespace detail

// Shannon entropy of the marginal over `subset`, exact given exact masses.
// The empty subset is the constant variable, H = 0.
inline EntropyEstimate exact_entropy(const JointTable &table, const std::vector<std::string> &subset) {
  std::vector<std::size_t> cols;
  cols.reserve(subset.size());
  for (const auto &name : subset) cols.push_back(table.column(name));
  EntropyEstimate est;
  est.method = EntropyMethod::Exact;
  if (cols.empty()) return est;
  std::map<std::vector<Value>, double> marginal;
  std::vector<Value> key(cols.size());
  for (std::size_t i = 0; i < table.support.size(); ++i) {
    for (std::size_t c = 0; c < cols.size(); ++c) key[c] = table.support[i][cols[c]];
    marginal[key] += table.mass[i];
  }
  std::vector<double> masses;
  masses.reserve(marginal.size());
  for (const auto &kv : marginal) masses.push_back(kv.second);
  est.value = detail::entropy_of_masses(masses);
  return est;
}

// H(targets | givens) = H(targets, givens) - H(givens).
inline double cond_entropy(const JointTable &table, const std::vector<std::string> &targets,
                           const std::vector<std::string> &givens) {
  std::vector<std::string> joint = targets;
  joint.insert(joint.end(), givens.begin(), givens.end());
  return exact_entropy(table, joint).value - exact_entropy(table, givens).value;
}

struct HanResult {
  bool ok = false;
  double slack = 0.0;  // H(A,B) + H(A,C) + H(B,C) - 2 H(A,B,C)
};

// Submodularity consequence 2H(A,B,C) <= H(A,B) + H(A,C) + H(B,C); holds on
// every distribution, so `ok` false signals a computation bug upstream.
inline HanResult han_check(const JointTable &table, const std::string &a, const std::string &b,
                           const std::string &c) {
  double hab = exact_entropy(table, {a, b}).value;
  double hac = exact_entropy(table, {a, c}).value;
  double hbc = exact_entropy(table, {b, c}).value;
  double habc = exact_entropy(table, {a, b, c}).value;
  HanResult r;
  r.slack = hab + hac + hbc - 2.0 * habc;
  r.ok = r.slack >= -1e-9;
  return r;
}

// Empirical entropy of sampled tuples. Plug-in estimates sit below the truth
// by about (support-1)/(2 n ln2) bits; the flag marks regimes where that
// bias is clearly not small.
inline EntropyEstimate plugin_entropy(const std::vector<std::vector<Value>> &samples) {
  if (samples.empty()) throw std::invalid_argument("plugin_entropy: no samples");
  std::map<std::vector<Value>, long long> counts;
  for (const auto &s : samples) ++counts[s];
  const double n = static_cast<double>(samples.size());
  long double h = 0.0L;
  for (const auto &kv : counts) {
    long double p = static_cast<long double>(kv.second) / n;
    h -= p * std::log2(p);
  }
  EntropyEstimate est;
  est.value = static_cast<double>(h);
  est.method = EntropyMethod::PluginSample;
  est.trials = static_cast<long long>(samples.size());
  const double distinct = static_cast<double>(counts.size());
  est.bias_estimate = (distinct - 1.0) / (2.0 * n * std::log(2.0));
  est.bias_flagged = distinct >= 0.5 * n && distinct > 1.0;
  return est;
}

}  // namespace aisbound
