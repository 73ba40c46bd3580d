#pragma once

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iterator>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "certificate.hpp"
#include "coefficients.hpp"
#include "lemma1.hpp"
#include "rational.hpp"
#include "region.hpp"
#include "theorem_instance.hpp"
#include "verify.hpp"

namespace aisbound {

using Json = nlohmann::json;

inline constexpr const char *kToolVersion = "aisbound 1.0.0";
inline constexpr int kSchemaVersion = 1;

/** Raised for malformed instance files; the CLI maps it to exit code 2. */
class InputError : public std::runtime_error {
 public:
  explicit InputError(const std::string &what) : std::runtime_error(what) {}
};

inline std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xCBF29CE484222325ull;
  for (unsigned char c : bytes) {
    h ^= static_cast<std::uint64_t>(c);
    h *= 0x00000100000001B3ull;
  }
  return h;
}

struct TaskStatus {
  std::string name;
  std::string status;
};

struct RunManifest {
  std::uint64_t input_hash = 0;
  std::uint64_t seed = 0;
  std::string tool_version = kToolVersion;
  double wall_seconds = 0.0;
  std::vector<TaskStatus> tasks;

  Json to_json() const {
    char hex[19];
    std::snprintf(hex, sizeof hex, "0x%016llx", static_cast<unsigned long long>(input_hash));
    Json tasks_json = Json::array();
    for (const auto &t : tasks) tasks_json.push_back({{"name", t.name}, {"status", t.status}});
    return Json{{"input_hash", hex},
                {"seed", seed},
                {"tool_version", tool_version},
                {"wall_seconds", wall_seconds},
                {"tasks", tasks_json}};
  }
};

// Shortest round-trip decimal form, so reruns print identical bytes.
inline std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  double back = std::strtod(buf, nullptr);
  for (int prec = 1; prec < 17; ++prec) {
    char probe[64];
    std::snprintf(probe, sizeof probe, "%.*g", prec, v);
    if (std::strtod(probe, nullptr) == back) return probe;
  }
  return buf;
}

// Comma separated, LF line endings, no quoting. Callers only pass numeric or
// bare-word fields.
inline void write_csv(std::ostream &os, const std::vector<std::string> &header,
                      const std::vector<std::vector<std::string>> &rows) {
  auto write_row = [&os](const std::vector<std::string> &row) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) os << ',';
      os << row[i];
    }
    os << '\n';
  };
  write_row(header);
  for (const auto &row : rows) write_row(row);
}

namespace detail {

inline void check_keys(const Json &obj, std::initializer_list<const char *> allowed, bool strict,
                       const std::string &where) {
  if (!strict) return;
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool known = false;
    for (const char *key : allowed)
      if (it.key() == key) {
        known = true;
        break;
      }
    if (!known) throw InputError(where + ": unknown field \"" + it.key() + "\"");
  }
}

inline Rat parse_rat_json(const Json &j, const std::string &where) {
  try {
    if (j.is_string()) return parse_rat(j.get<std::string>());
    if (j.is_number_integer()) return Rat(j.get<long long>());
  } catch (const std::exception &e) {
    throw InputError(where + ": " + e.what());
  }
  throw InputError(where + ": expected an integer or a rational string like \"13/9\"");
}

inline double parse_number(const Json &j, const std::string &where) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) return to_double(parse_rat(j.get<std::string>()));
  throw InputError(where + ": expected a number");
}

template <typename T>
T get_or(const Json &body, const char *key, T fallback) {
  return body.contains(key) ? body.at(key).get<T>() : fallback;
}

}  // namespace detail

enum class InstanceKind { PartitionDemo, TheoremVerify, AisOracle, Region, Certificate, Lemma1 };

inline InstanceKind parse_kind(const std::string &kind) {
  if (kind == "partition-demo") return InstanceKind::PartitionDemo;
  if (kind == "theorem-verify") return InstanceKind::TheoremVerify;
  if (kind == "ais-oracle") return InstanceKind::AisOracle;
  if (kind == "region") return InstanceKind::Region;
  if (kind == "certificate") return InstanceKind::Certificate;
  if (kind == "lemma1") return InstanceKind::Lemma1;
  throw InputError("unknown instance kind \"" + kind + "\"");
}

struct InstanceFile {
  int schema_version = kSchemaVersion;
  InstanceKind kind = InstanceKind::Region;
  Json body;
};

inline InstanceFile parse_instance_file(const std::string &text, bool strict) {
  Json root;
  try {
    root = Json::parse(text);
  } catch (const Json::parse_error &e) {
    throw InputError(std::string("malformed JSON: ") + e.what());
  }
  if (!root.is_object()) throw InputError("instance file: top level must be an object");
  detail::check_keys(root, {"schema_version", "kind", "body"}, strict, "instance file");
  if (!root.contains("schema_version") || !root.contains("kind") || !root.contains("body"))
    throw InputError("instance file: schema_version, kind, and body are required");
  InstanceFile file;
  file.schema_version = root.at("schema_version").get<int>();
  if (file.schema_version != kSchemaVersion)
    throw InputError("instance file: unsupported schema_version " +
                     std::to_string(file.schema_version));
  file.kind = parse_kind(root.at("kind").get<std::string>());
  file.body = root.at("body");
  if (!file.body.is_object()) throw InputError("instance file: body must be an object");
  return file;
}

inline SamplerConfig parse_sampler(const Json &j, bool strict) {
  detail::check_keys(j, {"delta1", "delta2", "f_max", "family"}, strict, "sampler");
  SamplerConfig cfg;
  if (j.contains("delta1")) cfg.delta1 = detail::parse_number(j.at("delta1"), "sampler.delta1");
  if (j.contains("delta2")) cfg.delta2 = detail::parse_number(j.at("delta2"), "sampler.delta2");
  if (j.contains("f_max")) cfg.f_max = detail::parse_number(j.at("f_max"), "sampler.f_max");
  if (j.contains("family")) {
    std::string family = j.at("family").get<std::string>();
    if (family == "signed")
      cfg.family = CoeffFamily::UniformMagnitudeSigned;
    else if (family == "positive")
      cfg.family = CoeffFamily::UniformPositive;
    else
      throw InputError("sampler.family: expected \"signed\" or \"positive\"");
  }
  return cfg;
}

inline InputModel parse_input_model(const Json &j, bool strict) {
  detail::check_keys(j, {"kind", "names", "support", "mass"}, strict, "input");
  InputModel model;
  std::string kind = j.contains("kind") ? j.at("kind").get<std::string>() : "product-uniform";
  if (kind == "product-uniform") {
    model.kind = InputModelKind::ProductUniform;
  } else if (kind == "shared-uniform") {
    model.kind = InputModelKind::SharedUniform;
  } else if (kind == "table") {
    model.kind = InputModelKind::Table;
    if (!j.contains("names") || !j.contains("support") || !j.contains("mass"))
      throw InputError("input: a table needs names, support, and mass");
    model.table.names = j.at("names").get<std::vector<std::string>>();
    for (const auto &row : j.at("support"))
      model.table.support.push_back(row.get<std::vector<Value>>());
    for (const auto &m : j.at("mass"))
      model.table.mass.push_back(detail::parse_number(m, "input.mass"));
  } else {
    throw InputError("input.kind: expected product-uniform, shared-uniform, or table");
  }
  return model;
}

inline CombinationSpec parse_combination(const Json &j, bool strict, const std::string &where) {
  detail::check_keys(j, {"terms"}, strict, where);
  if (!j.contains("terms")) throw InputError(where + ": terms required");
  CombinationSpec spec;
  for (const auto &tj : j.at("terms")) {
    detail::check_keys(tj, {"source", "band", "trim", "kind", "value"}, strict, where + ".term");
    CombinationTerm term;
    term.source = tj.at("source").get<int>();
    if (tj.contains("band")) {
      const auto &b = tj.at("band");
      if (!b.is_array() || b.size() != 2) throw InputError(where + ": band must be [lo, hi]");
      term.band = BandSelector{detail::parse_rat_json(b[0], where + ".band.lo"),
                               detail::parse_rat_json(b[1], where + ".band.hi")};
    }
    if (tj.contains("trim")) {
      const auto &t = tj.at("trim");
      if (!t.is_array() || t.size() != 2)
        throw InputError(where + ": trim must be [gamma, delta]");
      term.trim = TrimPair{detail::parse_rat_json(t[0], where + ".trim.gamma"),
                           detail::parse_rat_json(t[1], where + ".trim.delta")};
    }
    if (tj.contains("kind")) {
      std::string kind = tj.at("kind").get<std::string>();
      if (kind == "bounded")
        term.kind = CoeffKind::BoundedDensity;
      else if (kind == "fixed")
        term.kind = CoeffKind::Fixed;
      else
        throw InputError(where + ".term.kind: expected bounded or fixed");
    }
    if (tj.contains("value"))
      term.fixed_value = detail::parse_number(tj.at("value"), where + ".term.value");
    spec.terms.push_back(std::move(term));
  }
  return spec;
}

inline TheoremInstance parse_theorem_instance(const Json &body, bool strict) {
  detail::check_keys(body,
                     {"sources", "outputs", "letters", "level_grid", "index_sets", "trims",
                      "input", "conditioning", "sampler", "rhs_kind", "seed", "P", "trials",
                      "cap", "threads", "use_plugin"},
                     strict, "theorem-verify body");
  TheoremInstance inst;
  if (!body.contains("level_grid") || !body.contains("index_sets"))
    throw InputError("theorem-verify: level_grid and index_sets are required");
  inst.sources = detail::get_or(body, "sources", 2);
  inst.outputs = detail::get_or(body, "outputs", 1);
  inst.letters = detail::get_or(body, "letters", 1);
  for (const auto &row : body.at("level_grid")) {
    std::vector<Rat> levels;
    for (const auto &cell : row) levels.push_back(detail::parse_rat_json(cell, "level_grid"));
    inst.level_grid.push_back(std::move(levels));
  }
  for (const auto &family : body.at("index_sets")) {
    std::vector<std::vector<int>> sets;
    for (const auto &set : family) sets.push_back(set.get<std::vector<int>>());
    inst.index_sets.push_back(std::move(sets));
  }
  if (body.contains("trims"))
    for (const auto &tj : body.at("trims")) {
      detail::check_keys(tj, {"k", "l", "band", "source", "gamma", "delta"}, strict, "trim");
      TrimOverride ov;
      ov.k = tj.at("k").get<int>();
      ov.l = tj.at("l").get<int>();
      ov.band = tj.at("band").get<int>();
      ov.source = tj.at("source").get<int>();
      ov.trim = TrimPair{detail::parse_rat_json(tj.at("gamma"), "trim.gamma"),
                         detail::parse_rat_json(tj.at("delta"), "trim.delta")};
      inst.trims.push_back(ov);
    }
  if (body.contains("input")) inst.input = parse_input_model(body.at("input"), strict);
  if (body.contains("conditioning"))
    inst.conditioning = parse_combination(body.at("conditioning"), strict, "conditioning");
  if (body.contains("sampler")) inst.sampler = parse_sampler(body.at("sampler"), strict);
  if (body.contains("rhs_kind")) {
    std::string kind = body.at("rhs_kind").get<std::string>();
    if (kind == "fixed")
      inst.rhs_kind = CoeffKind::Fixed;
    else if (kind == "bounded")
      inst.rhs_kind = CoeffKind::BoundedDensity;
    else
      throw InputError("rhs_kind: expected fixed or bounded");
  }
  inst.seed = detail::get_or<std::uint64_t>(body, "seed", 1);
  return inst;
}

inline std::vector<double> parse_p_values(const Json &body, const std::string &where) {
  if (!body.contains("P")) throw InputError(where + ": P sweep list required");
  std::vector<double> p_values;
  for (const auto &p : body.at("P")) p_values.push_back(detail::parse_number(p, where + ".P"));
  if (p_values.empty()) throw InputError(where + ": P sweep list is empty");
  return p_values;
}

inline Ledger parse_ledger(const Json &j, const SymbolTablePtr &dict, bool strict,
                           const std::string &where) {
  detail::check_keys(j, {"terms", "nlogp"}, strict, where);
  Ledger led(dict);
  if (j.contains("terms")) {
    if (!j.at("terms").is_object()) throw InputError(where + ": terms must be an object");
    for (auto it = j.at("terms").begin(); it != j.at("terms").end(); ++it)
      led.add(it.key(), detail::parse_rat_json(it.value(), where + ".terms"));
  }
  if (j.contains("nlogp")) led.nlogp = detail::parse_rat_json(j.at("nlogp"), where + ".nlogp");
  return led;
}

inline Certificate parse_certificate(const Json &body, bool strict) {
  detail::check_keys(body, {"builtin", "premises", "target"}, strict, "certificate body");
  if (body.contains("builtin")) {
    std::string name = body.at("builtin").get<std::string>();
    try {
      return builtin_certificate(name);
    } catch (const std::invalid_argument &e) {
      throw InputError(e.what());
    }
  }
  if (!body.contains("premises") || !body.contains("target"))
    throw InputError("certificate: either builtin or premises+target required");
  Certificate cert;
  cert.name = "user";
  cert.dict = std::make_shared<SymbolTable>();
  for (const auto &pj : body.at("premises")) {
    detail::check_keys(pj, {"name", "weight", "lhs", "rhs"}, strict, "premise");
    Premise p;
    p.name = pj.contains("name") ? pj.at("name").get<std::string>() : "premise";
    if (pj.contains("weight")) p.weight = detail::parse_rat_json(pj.at("weight"), "premise.weight");
    p.ineq.lhs = parse_ledger(pj.at("lhs"), cert.dict, strict, "premise.lhs");
    p.ineq.rhs = parse_ledger(pj.at("rhs"), cert.dict, strict, "premise.rhs");
    cert.premises.push_back(std::move(p));
  }
  const auto &tj = body.at("target");
  detail::check_keys(tj, {"lhs", "rhs"}, strict, "target");
  cert.target.lhs = parse_ledger(tj.at("lhs"), cert.dict, strict, "target.lhs");
  cert.target.rhs = parse_ledger(tj.at("rhs"), cert.dict, strict, "target.rhs");
  return cert;
}

inline std::vector<HalfPlane> parse_region(const Json &body, bool strict) {
  detail::check_keys(body, {"builtin", "halfplanes", "format"}, strict, "region body");
  if (body.contains("builtin")) {
    std::string name = body.at("builtin").get<std::string>();
    if (name != "theorem5") throw InputError("region: unknown builtin \"" + name + "\"");
    return theorem5_region();
  }
  if (!body.contains("halfplanes"))
    throw InputError("region: either builtin or halfplanes required");
  std::vector<HalfPlane> planes;
  for (const auto &hj : body.at("halfplanes")) {
    detail::check_keys(hj, {"a1", "a2", "b"}, strict, "halfplane");
    try {
      planes.emplace_back(detail::parse_rat_json(hj.at("a1"), "halfplane.a1"),
                          detail::parse_rat_json(hj.at("a2"), "halfplane.a2"),
                          detail::parse_rat_json(hj.at("b"), "halfplane.b"));
    } catch (const std::invalid_argument &e) {
      throw InputError(std::string("halfplane: ") + e.what());
    }
  }
  return planes;
}

inline std::string read_text_file(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return text;
}

inline void write_text_file(const std::string &path, const std::string &text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path);
  out << text;
}

}  // namespace aisbound
