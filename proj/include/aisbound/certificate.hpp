#pragma once

#include <initializer_list>
#include <iterator>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "rational.hpp"

namespace aisbound {

/**
 * Interning dictionary for entropy-expression symbols. Ledger arithmetic
 * never interprets a symbol; equality of interned ids is the only relation
 * the checker uses.
 */
class SymbolTable {
 public:
  int intern(const std::string &name) {
    auto [it, inserted] = ids_.emplace(name, static_cast<int>(names_.size()));
    if (inserted) names_.push_back(name);
    return it->second;
  }

  const std::string &name(int id) const { return names_.at(static_cast<std::size_t>(id)); }
  std::size_t size() const noexcept { return names_.size(); }

 private:
  std::vector<std::string> names_;
  std::map<std::string, int> ids_;
};

using SymbolTablePtr = std::shared_ptr<SymbolTable>;

/**
 * Exact linear expression sum_i w_i * term_i + c * (n log Pbar). The n log
 * Pbar coefficient is kept apart from the symbol terms: it is the one
 * quantity the dominance check may relax, since n log Pbar >= 0.
 */
struct Ledger {
  SymbolTablePtr dict;
  std::map<int, Rat> terms;
  Rat nlogp{0};

  explicit Ledger(SymbolTablePtr d = nullptr) : dict(std::move(d)) {}

  Ledger &add(const std::string &symbol, const Rat &w) {
    if (!dict) throw std::invalid_argument("ledger: no symbol dictionary attached");
    terms[dict->intern(symbol)] += w;
    return *this;
  }

  Ledger &add_nlogp(const Rat &c) {
    nlogp += c;
    return *this;
  }

  void prune() {
    for (auto it = terms.begin(); it != terms.end();)
      it = (it->second == Rat(0)) ? terms.erase(it) : std::next(it);
  }

  bool is_zero() const {
    if (nlogp != Rat(0)) return false;
    for (const auto &[id, w] : terms)
      if (w != Rat(0)) return false;
    return true;
  }
};

inline Ledger ledger_scale(const Ledger &a, const Rat &s) {
  Ledger out = a;
  for (auto &[id, w] : out.terms) w *= s;
  out.nlogp *= s;
  return out;
}

inline Ledger ledger_sub(const Ledger &a, const Ledger &b) {
  if (a.dict != b.dict) throw std::invalid_argument("ledger arithmetic: dictionary mismatch");
  Ledger out = a;
  for (const auto &[id, w] : b.terms) out.terms[id] -= w;
  out.nlogp -= b.nlogp;
  out.prune();
  return out;
}

// lhs <= rhs over a shared dictionary.
struct Inequality {
  Ledger lhs, rhs;

  // rhs - lhs; the inequality asserts this is >= 0.
  Ledger gap() const { return ledger_sub(rhs, lhs); }
};

struct Premise {
  std::string name;
  Inequality ineq;
  Rat weight{1};
};

struct Certificate {
  std::string name;
  SymbolTablePtr dict;
  std::vector<Premise> premises;
  Inequality target;

  void validate() const {
    if (!dict) throw std::invalid_argument("certificate: missing dictionary");
    for (const auto &p : premises) {
      if (p.weight < Rat(0)) throw std::invalid_argument("certificate: negative premise weight");
      if (p.ineq.lhs.dict != dict || p.ineq.rhs.dict != dict)
        throw std::invalid_argument("certificate: premise dictionary mismatch");
    }
    if (target.lhs.dict != dict || target.rhs.dict != dict)
      throw std::invalid_argument("certificate: target dictionary mismatch");
  }
};

struct CertificateResult {
  bool ok = false;
  Ledger residual;  // target gap minus the weighted premise combination
  std::string detail;
};

/**
 * The weighted premise sum gives 0 <= sum_i w_i (rhs_i - lhs_i). The target
 * follows when its own gap equals that combination up to a non-negative
 * multiple of n log Pbar, so every symbol coefficient of the residual must
 * cancel exactly and the leftover n log Pbar weight must be >= 0.
 */
inline CertificateResult check_certificate(const Certificate &cert) {
  cert.validate();
  Ledger combined(cert.dict);
  for (const auto &p : cert.premises)
    combined = ledger_sub(combined, ledger_scale(ledger_sub(p.ineq.lhs, p.ineq.rhs), p.weight));

  CertificateResult result;
  result.residual = ledger_sub(cert.target.gap(), combined);
  result.ok = result.residual.terms.empty() && result.residual.nlogp >= Rat(0);
  if (result.ok) {
    result.detail = "verified";
  } else if (!result.residual.terms.empty()) {
    const auto &[id, w] = *result.residual.terms.begin();
    result.detail = "coefficient mismatch at " + cert.dict->name(id) + " (off by " +
                    rat_to_string(w) + ")";
  } else {
    result.detail = "constant deficit of " + rat_to_string(result.residual.nlogp) + " n log P";
  }
  return result;
}

namespace detail {

inline Ledger make_ledger(const SymbolTablePtr &dict,
                          std::initializer_list<std::pair<const char *, Rat>> symbols,
                          Rat nlogp = Rat(0)) {
  Ledger led(dict);
  for (const auto &[name, w] : symbols) led.add(name, w);
  led.nlogp = nlogp;
  return led;
}

}  // namespace detail

// Chain conclusion pair for the sum rate: the two receiver chains close to
// 3nR1 + 3nR2 <= 34/3 n log Pbar because their entropy terms cancel exactly.
inline Certificate builtin_sum_rate_certificate() {
  auto dict = std::make_shared<SymbolTable>();
  Certificate cert;
  cert.name = "sum-rate";
  cert.dict = dict;

  const char *kTop = "H((X2c)^1_(1/2))";
  const char *kCross = "H((Y1)^1_(2/3)|X2,G)";

  Premise p1;
  p1.name = "rate1-chain";
  p1.ineq.lhs = detail::make_ledger(dict, {{"nR1", Rat(3)}});
  p1.ineq.rhs = detail::make_ledger(dict, {{kTop, Rat(-2)}, {kCross, Rat(1)}}, rat(16, 3));
  cert.premises.push_back(std::move(p1));

  Premise p2;
  p2.name = "rate2-chain";
  p2.ineq.lhs = detail::make_ledger(dict, {{"nR2", Rat(3)}});
  p2.ineq.rhs = detail::make_ledger(dict, {{kTop, Rat(2)}, {kCross, Rat(-1)}}, Rat(6));
  cert.premises.push_back(std::move(p2));

  cert.target.lhs = detail::make_ledger(dict, {{"nR1", Rat(3)}, {"nR2", Rat(3)}});
  cert.target.rhs = detail::make_ledger(dict, {}, rat(34, 3));
  return cert;
}

// Weighted bound 3nR1 + 2nR2 <= 9 n log Pbar: rate bounds, the single-user
// output bound, a Han split of 2H(Y2|X1,G) into the three pairwise
// entropies, and one cross bound per pair.
inline Certificate builtin_weighted_rate_certificate() {
  auto dict = std::make_shared<SymbolTable>();
  Certificate cert;
  cert.name = "weighted-rate";
  cert.dict = dict;

  const char *kY1 = "H(Y1|G)";
  const char *kY1x = "H(Y1|X1,G)";
  const char *kY2 = "H(Y2|X1,G)";
  const char *kPair[3] = {"H(Y2_1,Y2_2|X1,G)", "H(Y2_1,Y2_3|X1,G)", "H(Y2_2,Y2_3|X1,G)"};

  Premise q1;
  q1.name = "rate1-fano";
  q1.weight = Rat(3);
  q1.ineq.lhs = detail::make_ledger(dict, {{"nR1", Rat(1)}});
  q1.ineq.rhs = detail::make_ledger(dict, {{kY1, Rat(1)}, {kY1x, Rat(-1)}});
  cert.premises.push_back(std::move(q1));

  Premise q2;
  q2.name = "rate2-fano";
  q2.weight = Rat(2);
  q2.ineq.lhs = detail::make_ledger(dict, {{"nR2", Rat(1)}});
  q2.ineq.rhs = detail::make_ledger(dict, {{kY2, Rat(1)}});
  cert.premises.push_back(std::move(q2));

  Premise q3;
  q3.name = "output-bound";
  q3.weight = Rat(3);
  q3.ineq.lhs = detail::make_ledger(dict, {{kY1, Rat(1)}});
  q3.ineq.rhs = detail::make_ledger(dict, {}, Rat(2));
  cert.premises.push_back(std::move(q3));

  Premise q4;
  q4.name = "han-split";
  q4.ineq.lhs = detail::make_ledger(dict, {{kY2, Rat(2)}});
  q4.ineq.rhs = detail::make_ledger(
      dict, {{kPair[0], Rat(1)}, {kPair[1], Rat(1)}, {kPair[2], Rat(1)}});
  cert.premises.push_back(std::move(q4));

  for (int i = 0; i < 3; ++i) {
    Premise q;
    q.name = std::string("pair-bound-") + std::to_string(i + 1);
    q.ineq.lhs = detail::make_ledger(dict, {{kPair[i], Rat(1)}});
    q.ineq.rhs = detail::make_ledger(dict, {{kY1x, Rat(1)}}, Rat(1));
    cert.premises.push_back(std::move(q));
  }

  cert.target.lhs = detail::make_ledger(dict, {{"nR1", Rat(3)}, {"nR2", Rat(2)}});
  cert.target.rhs = detail::make_ledger(dict, {}, Rat(9));
  return cert;
}

inline std::vector<std::string> builtin_certificate_names() {
  return {"sum-rate", "weighted-rate"};
}

inline Certificate builtin_certificate(const std::string &name) {
  if (name == "sum-rate") return builtin_sum_rate_certificate();
  if (name == "weighted-rate") return builtin_weighted_rate_certificate();
  throw std::invalid_argument("unknown built-in certificate: " + name);
}

}  // namespace aisbound
