#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "entropy.hpp"
#include "power_level.hpp"

namespace aisbound {

/** Raised when a joint input support does not fit under the enumeration cap. */
class CapOverflowError : public std::runtime_error {
 public:
  CapOverflowError(std::uint64_t required, std::uint64_t cap)
      : std::runtime_error("support of " + std::to_string(required) +
                           " states exceeds the exact-pushforward cap " + std::to_string(cap) +
                           "; rerun with a cap of at least " + std::to_string(required)),
        required_(required) {}
  std::uint64_t required_cap() const noexcept { return required_; }

 private:
  std::uint64_t required_;
};

/**
 * Exact distribution pushforward over a product state space. Each axis is one
 * independent input coordinate (a letter, a source, or a whole table row);
 * outputs are sums of per-axis contribution tables, optionally followed by a
 * modulus/divisor window. One enumeration pass yields exact entropies of any
 * requested output groups.
 */
class PushforwardEngine {
 public:
  PushforwardEngine(std::vector<int> axis_counts, std::vector<std::vector<double>> axis_weights,
                    std::uint64_t cap)
      : counts_(std::move(axis_counts)), weights_(std::move(axis_weights)) {
    if (counts_.empty()) throw std::invalid_argument("pushforward: no axes");
    if (weights_.size() != counts_.size())
      throw std::invalid_argument("pushforward: axis weight arity mismatch");
    std::uint64_t states = 1;
    for (std::size_t a = 0; a < counts_.size(); ++a) {
      if (counts_[a] < 1) throw std::invalid_argument("pushforward: empty axis");
      if (!weights_[a].empty() && weights_[a].size() != static_cast<std::size_t>(counts_[a]))
        throw std::invalid_argument("pushforward: weight table arity mismatch");
      std::uint64_t next = states * static_cast<std::uint64_t>(counts_[a]);
      if (next / static_cast<std::uint64_t>(counts_[a]) != states || next > cap)
        throw CapOverflowError(saturating_product(), cap);
      states = next;
    }
    states_ = states;
  }

  std::uint64_t states() const noexcept { return states_; }

  // contrib[axis] is a per-digit additive table (empty when the axis does not
  // feed this output). post, when set, applies (v mod first) / second after
  // summation; the summed value must then be non-negative.
  int add_output(std::vector<std::vector<Value>> contrib,
                 std::optional<std::pair<Value, Value>> post = std::nullopt) {
    if (contrib.size() != counts_.size())
      throw std::invalid_argument("pushforward: contribution table arity mismatch");
    for (std::size_t a = 0; a < contrib.size(); ++a)
      if (!contrib[a].empty() && contrib[a].size() != static_cast<std::size_t>(counts_[a]))
        throw std::invalid_argument("pushforward: contribution digit arity mismatch");
    if (post && (post->first <= 0 || post->second <= 0))
      throw std::invalid_argument("pushforward: post window needs positive modulus and divisor");
    outputs_.push_back(Output{std::move(contrib), post});
    return static_cast<int>(outputs_.size()) - 1;
  }

  // Exact entropies (bits) of each requested group of outputs, computed in a
  // single enumeration pass. Group order follows the request.
  std::vector<double> entropies(const std::vector<std::vector<int>> &groups,
                                std::uint64_t dense_limit = (1u << 24)) {
    const std::size_t axes = counts_.size();
    const std::size_t n_out = outputs_.size();
    for (const auto &group : groups)
      for (int o : group)
        if (o < 0 || o >= static_cast<int>(n_out))
          throw std::invalid_argument("pushforward: group references unknown output");

    std::vector<std::pair<Value, Value>> bounds(n_out);
    for (std::size_t o = 0; o < n_out; ++o) bounds[o] = output_bounds(outputs_[o]);

    std::vector<GroupAcc> accs;
    accs.reserve(groups.size());
    for (const auto &group : groups) accs.emplace_back(group, bounds, states_, dense_limit);

    // partial[d * n_out + o]: contribution sum of axes < d.
    std::vector<Value> partial((axes + 1) * std::max<std::size_t>(n_out, 1), 0);
    std::vector<double> wpartial(axes + 1, 1.0);
    std::vector<Value> leaf(n_out, 0);

    std::vector<int> digit(axes, 0);
    std::size_t depth = 0;
    // Iterative odometer; descend filling partials, act at full depth.
    while (true) {
      if (depth == axes) {
        for (std::size_t o = 0; o < n_out; ++o) {
          Value v = partial[axes * n_out + o];
          const auto &post = outputs_[o].post;
          if (post) {
            detail::require_nonnegative(v, "pushforward post window");
            v = (v % post->first) / post->second;
          }
          leaf[o] = v;
        }
        const double w = wpartial[axes];
        for (auto &acc : accs) acc.add(leaf, w);
        // Backtrack to the deepest axis with digits left.
        while (depth > 0 && digit[depth - 1] + 1 >= counts_[depth - 1]) --depth;
        if (depth == 0) break;
        ++digit[depth - 1];
        descend(depth - 1, digit[depth - 1], partial, wpartial, n_out);
        continue;
      }
      digit[depth] = 0;
      descend(depth, 0, partial, wpartial, n_out);
      ++depth;
    }

    std::vector<double> result;
    result.reserve(accs.size());
    for (auto &acc : accs) result.push_back(acc.entropy());
    return result;
  }

 private:
  struct Output {
    std::vector<std::vector<Value>> contrib;
    std::optional<std::pair<Value, Value>> post;
  };

  void descend(std::size_t axis, int digit, std::vector<Value> &partial,
               std::vector<double> &wpartial, std::size_t n_out) const {
    for (std::size_t o = 0; o < n_out; ++o) {
      const auto &table = outputs_[o].contrib[axis];
      partial[(axis + 1) * n_out + o] =
          partial[axis * n_out + o] + (table.empty() ? 0 : table[static_cast<std::size_t>(digit)]);
    }
    wpartial[axis + 1] =
        wpartial[axis] *
        (weights_[axis].empty() ? 1.0 : weights_[axis][static_cast<std::size_t>(digit)]);
  }

  std::pair<Value, Value> output_bounds(const Output &out) const {
    if (out.post) return {0, (out.post->first - 1) / out.post->second};
    Value lo = 0, hi = 0;
    for (std::size_t a = 0; a < counts_.size(); ++a) {
      const auto &table = out.contrib[a];
      if (table.empty()) continue;
      lo += *std::min_element(table.begin(), table.end());
      hi += *std::max_element(table.begin(), table.end());
    }
    return {lo, hi};
  }

  std::uint64_t saturating_product() const {
    long double p = 1.0L;
    for (int c : counts_) p *= static_cast<long double>(c);
    if (p > 1.8e19L) return UINT64_MAX;
    std::uint64_t states = 1;
    for (int c : counts_) states *= static_cast<std::uint64_t>(c);
    return states;
  }

  class GroupAcc {
   public:
    GroupAcc(const std::vector<int> &members, const std::vector<std::pair<Value, Value>> &bounds,
             std::uint64_t states, std::uint64_t dense_limit)
        : members_(members) {
      offsets_.reserve(members.size());
      strides_.reserve(members.size());
      bool packable = true;
      std::uint64_t span_product = 1;
      for (int o : members) {
        const auto &b = bounds[static_cast<std::size_t>(o)];
        std::uint64_t span = static_cast<std::uint64_t>(b.second - b.first) + 1;
        offsets_.push_back(b.first);
        strides_.push_back(span_product);
        if (packable && span != 0 && span_product <= UINT64_MAX / 4 / span)
          span_product *= span;
        else
          packable = false;
      }
      // Dense only pays off while the cell array stays comparable to the
      // number of states actually visited.
      std::uint64_t dense_cap =
          std::min<std::uint64_t>(dense_limit, std::max<std::uint64_t>(4096, 8 * states));
      if (members.empty()) {
        mode_ = Mode::Dense;
        cells_.assign(1, 0.0);
      } else if (packable && span_product <= dense_cap) {
        mode_ = Mode::Dense;
        cells_.assign(span_product, 0.0);
      } else if (packable) {
        mode_ = Mode::Hashed;
        hashed_.reserve(static_cast<std::size_t>(std::min<std::uint64_t>(states, 1u << 20)));
      } else {
        mode_ = Mode::Sparse;
      }
    }

    void add(const std::vector<Value> &leaf, double w) {
      switch (mode_) {
        case Mode::Dense:
        case Mode::Hashed: {
          std::uint64_t key = 0;
          for (std::size_t i = 0; i < members_.size(); ++i)
            key += static_cast<std::uint64_t>(leaf[static_cast<std::size_t>(members_[i])] -
                                              offsets_[i]) *
                   strides_[i];
          if (mode_ == Mode::Dense)
            cells_[key] += w;
          else
            hashed_[key] += w;
          break;
        }
        case Mode::Sparse: {
          std::vector<Value> key(members_.size());
          for (std::size_t i = 0; i < members_.size(); ++i)
            key[i] = leaf[static_cast<std::size_t>(members_[i])];
          sparse_[key] += w;
          break;
        }
      }
    }

    double entropy() {
      long double h = 0.0L, total = 0.0L;
      auto fold = [&](double w) {
        if (w > 0.0) {
          total += w;
          h -= static_cast<long double>(w) * std::log2(static_cast<long double>(w));
        }
      };
      if (mode_ == Mode::Dense) {
        for (double w : cells_) fold(w);
      } else if (mode_ == Mode::Hashed) {
        std::vector<std::pair<std::uint64_t, double>> items(hashed_.begin(), hashed_.end());
        std::sort(items.begin(), items.end());
        for (const auto &kv : items) fold(kv.second);
      } else {
        for (const auto &kv : sparse_) fold(kv.second);
      }
      if (total <= 0.0L) return 0.0;
      return static_cast<double>(h / total + std::log2(total));
    }

   private:
    enum class Mode { Dense, Hashed, Sparse };
    std::vector<int> members_;
    std::vector<Value> offsets_;
    std::vector<std::uint64_t> strides_;
    Mode mode_ = Mode::Dense;
    std::vector<double> cells_;
    std::unordered_map<std::uint64_t, double> hashed_;
    std::map<std::vector<Value>, double> sparse_;
  };

  std::vector<int> counts_;
  std::vector<std::vector<double>> weights_;
  std::vector<Output> outputs_;
  std::uint64_t states_ = 0;
};

}  // namespace aisbound
