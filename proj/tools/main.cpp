#include <algorithm>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "aisbound/alignment.hpp"
#include "aisbound/certificate.hpp"
#include "aisbound/instance_io.hpp"
#include "aisbound/lemma1.hpp"
#include "aisbound/region.hpp"
#include "aisbound/theorem_instance.hpp"
#include "aisbound/verify.hpp"

namespace {

using namespace aisbound;

constexpr int kExitOk = 0;
constexpr int kExitVerificationFailure = 1;
constexpr int kExitInputError = 2;

struct CommonFlags {
  std::string file;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<int> trials;
  std::optional<std::uint64_t> cap;
  int threads = 1;
  bool strict = false;
};

void add_common_flags(CLI::App *cmd, CommonFlags &flags, bool with_file) {
  if (with_file)
    cmd->add_option("file", flags.file, "JSON instance file");
  cmd->add_option("--out", flags.out, "artifact path (default: stdout)");
  cmd->add_option("--seed", flags.seed, "master seed (overrides AISBOUND_SEED and the file)");
  cmd->add_option("--trials", flags.trials, "coefficient draw count");
  cmd->add_option("--cap", flags.cap, "support cap for exact enumeration");
  cmd->add_option("--threads", flags.threads, "worker count for the enumeration engines");
  cmd->add_flag("--strict", flags.strict, "reject unknown fields in the instance file");
}

// Flag beats environment beats instance file.
std::uint64_t effective_seed(const std::optional<std::uint64_t> &flag, std::uint64_t file_seed) {
  if (flag) return *flag;
  if (const char *env = std::getenv("AISBOUND_SEED")) {
    char *end = nullptr;
    unsigned long long v = std::strtoull(env, &end, 10);
    if (end == env || *end != '\0')
      throw InputError("AISBOUND_SEED: expected an unsigned integer");
    return static_cast<std::uint64_t>(v);
  }
  return file_seed;
}

RunManifest make_manifest(const std::string &input_bytes, std::uint64_t seed) {
  RunManifest manifest;
  manifest.input_hash = fnv1a64(input_bytes);
  manifest.seed = seed;
  return manifest;
}

// CSV artifacts carry the manifest in a sidecar so the CSV bytes depend only
// on the manifest inputs.
void emit_csv(const CommonFlags &flags, const std::vector<std::string> &header,
              const std::vector<std::vector<std::string>> &rows, const RunManifest &manifest) {
  std::ostringstream csv;
  write_csv(csv, header, rows);
  if (flags.out.empty()) {
    std::cout << csv.str();
  } else {
    write_text_file(flags.out, csv.str());
    write_text_file(flags.out + ".manifest.json", manifest.to_json().dump(2) + "\n");
  }
}

void emit_json(const CommonFlags &flags, const Json &artifact) {
  std::string text = artifact.dump(2) + "\n";
  if (flags.out.empty())
    std::cout << text;
  else
    write_text_file(flags.out, text);
}

Json load_body(const CommonFlags &flags, InstanceKind expected, std::string &input_bytes) {
  if (flags.file.empty()) {
    input_bytes = "builtin";
    return Json::object();
  }
  input_bytes = read_text_file(flags.file);
  InstanceFile file = parse_instance_file(input_bytes, flags.strict);
  if (file.kind != expected) throw InputError("instance file has the wrong kind for this subcommand");
  return file.body;
}

int run_partition(const CommonFlags &flags, double P, Value x, const std::string &levels_arg) {
  std::string input_bytes;
  Json body = Json::object();
  if (!flags.file.empty()) {
    body = load_body(flags, InstanceKind::PartitionDemo, input_bytes);
    detail::check_keys(body, {"P", "x", "levels"}, flags.strict, "partition-demo body");
    if (body.contains("P")) P = detail::parse_number(body.at("P"), "partition.P");
    if (body.contains("x")) x = body.at("x").get<Value>();
  } else {
    input_bytes = "partition:" + fmt_double(P) + ":" + std::to_string(x) + ":" + levels_arg;
  }

  std::vector<Rat> cuts;
  if (body.contains("levels")) {
    for (const auto &cell : body.at("levels"))
      cuts.push_back(detail::parse_rat_json(cell, "partition.levels"));
  } else {
    std::stringstream ss(levels_arg);
    std::string piece;
    while (std::getline(ss, piece, ','))
      if (!piece.empty()) cuts.push_back(parse_rat(piece));
  }
  if (cuts.empty()) throw InputError("partition: at least one level cut required");
  for (std::size_t i = 1; i < cuts.size(); ++i)
    if (!(cuts[i - 1] < cuts[i])) throw InputError("partition: levels must be strictly increasing");

  PowerContext ctx(P);
  if (x < 0 || x >= ctx.band(cuts.back()))
    throw InputError("partition: x outside the alphabet of the top level");

  std::vector<Rat> widths;
  Rat lo(0);
  for (const Rat &cut : cuts) {
    widths.push_back(cut - lo);
    lo = cut;
  }
  IntVector digits = decompose(ctx, x, widths);

  std::vector<std::vector<std::string>> rows;
  lo = Rat(0);
  for (std::size_t i = 0; i < cuts.size(); ++i) {
    Value window = part_window(ctx, x, lo, cuts[i]);
    rows.push_back({std::to_string(i + 1), rat_to_string(lo), rat_to_string(cuts[i]),
                    std::to_string(digits[i]), std::to_string(window)});
    lo = cuts[i];
  }
  RunManifest manifest = make_manifest(input_bytes, 0);
  manifest.tasks.push_back({"partition", "ok"});
  emit_csv(flags, {"band", "level_lo", "level_hi", "digit", "window"}, rows, manifest);
  return kExitOk;
}

int run_verify(const CommonFlags &flags) {
  if (flags.file.empty()) throw InputError("verify: an instance file is required");
  std::string input_bytes;
  Json body = load_body(flags, InstanceKind::TheoremVerify, input_bytes);

  TheoremInstance inst = parse_theorem_instance(body, flags.strict);
  std::vector<double> p_values = parse_p_values(body, "theorem-verify");
  inst.seed = effective_seed(flags.seed, inst.seed);

  VerifyOptions opts;
  opts.seed = inst.seed;
  opts.trials = flags.trials ? *flags.trials : detail::get_or(body, "trials", 64);
  opts.cap = flags.cap ? *flags.cap : detail::get_or<std::uint64_t>(body, "cap", opts.cap);
  opts.threads = flags.threads;
  opts.use_plugin = detail::get_or(body, "use_plugin", false);

  std::vector<GapReport> reports = verify_sweep(inst, p_values, opts);

  RunManifest manifest = make_manifest(input_bytes, inst.seed);
  std::vector<std::vector<std::string>> rows;
  bool failed = false;
  for (const GapReport &r : reports) {
    std::string task = "P=" + fmt_double(r.P);
    if (r.error) {
      failed = true;
      manifest.tasks.push_back({task, "error: " + *r.error});
      std::cerr << "verify: " << task << ": " << *r.error << "\n";
      continue;
    }
    manifest.tasks.push_back({task, "ok"});
    rows.push_back({fmt_double(r.P), std::to_string(r.pbar), fmt_double(r.lhs.value),
                    fmt_double(r.rhs.value), fmt_double(r.gap), fmt_double(r.normalized_gap),
                    r.condition_ok ? "1" : "0"});
  }
  emit_csv(flags, {"P", "pbar", "lhs_bits", "rhs_bits", "gap_bits", "normalized_gap", "condition_ok"},
           rows, manifest);
  return failed ? kExitVerificationFailure : kExitOk;
}

int run_ais(const CommonFlags &flags, const std::string &lambda1_arg, const std::string &lambda2_arg) {
  std::string input_bytes;
  Json body = load_body(flags, InstanceKind::AisOracle, input_bytes);
  detail::check_keys(body,
                     {"lambda1", "lambda2", "P", "draws", "cap", "growth", "pairwise_draws", "seed"},
                     flags.strict, "ais-oracle body");

  Rat lambda1 = body.contains("lambda1")
                    ? detail::parse_rat_json(body.at("lambda1"), "ais.lambda1")
                    : parse_rat(lambda1_arg);
  Rat lambda2 = body.contains("lambda2")
                    ? detail::parse_rat_json(body.at("lambda2"), "ais.lambda2")
                    : parse_rat(lambda2_arg);
  std::vector<double> p_values =
      body.contains("P") ? parse_p_values(body, "ais-oracle")
                         : std::vector<double>{16, 64, 256, 1024, 4096};
  int draws = flags.trials ? *flags.trials : detail::get_or(body, "draws", 64);
  std::uint64_t cap = flags.cap ? *flags.cap : detail::get_or<std::uint64_t>(body, "cap", 1ull << 16);
  bool growth = detail::get_or(body, "growth", true);
  int pairwise_draws = detail::get_or(body, "pairwise_draws", 0);
  std::uint64_t seed = effective_seed(flags.seed, detail::get_or<std::uint64_t>(body, "seed", 1));

  TheoremInstance shape = theorem1_instance(lambda1, lambda2);
  shape.seed = seed;

  RunManifest manifest = make_manifest(input_bytes, seed);
  Json points = Json::array();
  bool failed = false;
  for (std::size_t i = 0; i < p_values.size(); ++i) {
    std::string task = "expected-cardinality P=" + fmt_double(p_values[i]);
    try {
      PowerContext ctx(p_values[i]);
      AlignmentOracle oracle(shape, ctx, cap);
      AlignmentReport r = oracle.expected_cardinality(draws, derive_seed(seed, 0x9807ull, i));
      points.push_back({{"P", p_values[i]},
                        {"pbar", ctx.band(Rat(1))},
                        {"expected_cardinality", r.expected_cardinality},
                        {"expected_max_cardinality", r.expected_max_cardinality},
                        {"analytic_bound", r.analytic_bound},
                        {"distinct_zprime", r.distinct_zprime}});
      manifest.tasks.push_back({task, "ok"});
    } catch (const CapOverflowError &e) {
      manifest.tasks.push_back({task, std::string("error: ") + e.what()});
      std::cerr << "ais: " << task << ": " << e.what() << "\n";
      failed = true;
    }
  }

  Json artifact;
  artifact["points"] = points;

  if (growth && p_values.size() >= 4 && !failed) {
    GrowthReport g = growth_check(shape, p_values, draws, seed, cap);
    artifact["growth"] = {{"intercept", g.intercept},
                          {"slope", g.slope},
                          {"rel_residual", g.rel_residual},
                          {"fitted_exponent", g.fitted_exponent},
                          {"exponent_budget", g.exponent_budget},
                          {"max_ratio", g.max_ratio},
                          {"ok", g.ok()}};
    manifest.tasks.push_back({"growth-check", g.ok() ? "ok" : "failed"});
    if (!g.ok()) failed = true;
  }

  if (pairwise_draws > 0 && !failed) {
    PowerContext ctx(p_values.front());
    AlignmentOracle oracle(shape, ctx, cap);
    const auto &reps = oracle.representatives();
    double worst_excess = -1e9;
    long long pairs = 0;
    bool pairwise_ok = true;
    for (std::size_t a = 0; a < reps.size(); ++a)
      for (std::size_t b = a + 1; b < reps.size(); ++b) {
        PairwiseAlignment pa = oracle.pairwise_alignment_probability(
            reps[a], reps[b], pairwise_draws, derive_seed(seed, 0x9A12ull, pairs));
        worst_excess = std::max(worst_excess, pa.frequency - (pa.cap + 3.0 * pa.sigma));
        pairwise_ok = pairwise_ok && pa.frequency <= pa.cap + 3.0 * pa.sigma;
        ++pairs;
      }
    artifact["pairwise"] = {{"P", p_values.front()},
                            {"pairs", pairs},
                            {"draws", pairwise_draws},
                            {"worst_excess", worst_excess},
                            {"ok", pairwise_ok}};
    manifest.tasks.push_back({"pairwise-alignment", pairwise_ok ? "ok" : "failed"});
    if (!pairwise_ok) failed = true;
  }

  artifact["manifest"] = manifest.to_json();
  emit_json(flags, artifact);
  return failed ? kExitVerificationFailure : kExitOk;
}

int run_region(const CommonFlags &flags, std::string format) {
  std::string input_bytes;
  Json body = load_body(flags, InstanceKind::Region, input_bytes);
  std::vector<HalfPlane> planes =
      flags.file.empty() ? theorem5_region() : parse_region(body, flags.strict);
  if (body.contains("format")) format = body.at("format").get<std::string>();
  if (format != "csv" && format != "json")
    throw InputError("region: format must be csv or json");

  RunManifest manifest = make_manifest(input_bytes, 0);
  std::vector<RatPoint> verts;
  try {
    verts = vertices(planes);
  } catch (const std::domain_error &e) {
    manifest.tasks.push_back({"vertices", std::string("error: ") + e.what()});
    std::cerr << "region: " << e.what() << "\n";
    return kExitVerificationFailure;
  }
  manifest.tasks.push_back({"vertices", "ok"});
  std::vector<int> redundant = redundant_constraints(planes, verts);

  if (format == "csv") {
    std::vector<std::vector<std::string>> rows;
    for (const auto &p : verts) rows.push_back({rat_to_string(p.x), rat_to_string(p.y)});
    emit_csv(flags, {"d1", "d2"}, rows, manifest);
  } else {
    Json verts_json = Json::array();
    for (const auto &p : verts)
      verts_json.push_back({rat_to_string(p.x), rat_to_string(p.y)});
    Json artifact;
    artifact["vertices"] = verts_json;
    artifact["redundant_constraints"] = redundant;
    artifact["manifest"] = manifest.to_json();
    emit_json(flags, artifact);
  }
  return kExitOk;
}

int run_certificate(const CommonFlags &flags, const std::string &builtin) {
  Certificate cert;
  std::string input_bytes;
  if (!flags.file.empty()) {
    Json body = load_body(flags, InstanceKind::Certificate, input_bytes);
    cert = parse_certificate(body, flags.strict);
  } else {
    input_bytes = "certificate:" + builtin;
    try {
      cert = builtin_certificate(builtin);
    } catch (const std::invalid_argument &e) {
      throw InputError(e.what());
    }
  }

  CertificateResult result = check_certificate(cert);
  RunManifest manifest = make_manifest(input_bytes, 0);
  manifest.tasks.push_back({cert.name, result.ok ? "ok" : "failed"});

  Json residual_terms = Json::object();
  for (const auto &[id, w] : result.residual.terms)
    residual_terms[cert.dict->name(id)] = rat_to_string(w);
  Json artifact;
  artifact["certificate"] = cert.name;
  artifact["verified"] = result.ok;
  artifact["detail"] = result.detail;
  artifact["residual"] = {{"terms", residual_terms},
                          {"nlogp", rat_to_string(result.residual.nlogp)}};
  artifact["manifest"] = manifest.to_json();
  emit_json(flags, artifact);
  return result.ok ? kExitOk : kExitVerificationFailure;
}

int run_lemma1(const CommonFlags &flags) {
  std::string input_bytes;
  Json body = load_body(flags, InstanceKind::Lemma1, input_bytes);
  detail::check_keys(body,
                     {"P", "trials", "level_scale", "det_min", "seed", "zero_inputs", "sampler"},
                     flags.strict, "lemma1 body");

  std::vector<double> p_values = body.contains("P")
                                     ? parse_p_values(body, "lemma1")
                                     : std::vector<double>{256, 1024, 4096, 16384, 65536};
  int trials = flags.trials ? *flags.trials : detail::get_or(body, "trials", 16);
  Lemma1Options opts;
  opts.seed = effective_seed(flags.seed, detail::get_or<std::uint64_t>(body, "seed", 1));
  if (flags.cap) opts.cap = *flags.cap;
  if (body.contains("level_scale"))
    opts.level_scale = detail::parse_rat_json(body.at("level_scale"), "lemma1.level_scale");
  if (body.contains("det_min")) opts.det_min = detail::parse_number(body.at("det_min"), "lemma1.det_min");
  opts.zero_inputs = detail::get_or(body, "zero_inputs", false);
  SamplerConfig sampler =
      body.contains("sampler") ? parse_sampler(body.at("sampler"), flags.strict) : lemma1_sampler();

  std::vector<Lemma1Report> reports;
  try {
    reports = lemma1_numeric_check(p_values, sampler, trials, opts);
  } catch (const std::invalid_argument &e) {
    throw InputError(e.what());
  }

  RunManifest manifest = make_manifest(input_bytes, opts.seed);
  std::vector<std::vector<std::string>> rows;
  bool failed = false;
  for (const Lemma1Report &r : reports) {
    std::string task = "P=" + fmt_double(r.P);
    if (r.error) {
      failed = true;
      manifest.tasks.push_back({task, "error: " + *r.error});
      std::cerr << "lemma1: " << task << ": " << *r.error << "\n";
      continue;
    }
    manifest.tasks.push_back({task, "ok"});
    rows.push_back({fmt_double(r.P), std::to_string(r.pbar), fmt_double(r.lhs_bits),
                    fmt_double(r.rhs_bits), fmt_double(r.gap_bits), fmt_double(r.normalized_gap),
                    fmt_double(r.violation)});
  }
  emit_csv(flags,
           {"P", "pbar", "lhs_bits", "rhs_bits", "gap_bits", "normalized_gap", "violation"},
           rows, manifest);
  return failed ? kExitVerificationFailure : kExitOk;
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"power-level partition and sum-set entropy verification toolkit"};
  app.set_version_flag("--version", aisbound::kToolVersion);
  app.require_subcommand(1);

  CommonFlags partition_flags;
  double partition_P = 65536;
  Value partition_x = 0;
  std::string partition_levels = "1/2,1";
  CLI::App *partition = app.add_subcommand("partition", "band table of one value");
  add_common_flags(partition, partition_flags, true);
  partition->add_option("--P", partition_P, "power");
  partition->add_option("--x", partition_x, "signal value");
  partition->add_option("--levels", partition_levels, "comma-separated level cuts, e.g. 1/2,1");

  CommonFlags verify_flags;
  CLI::App *verify = app.add_subcommand("verify", "sum-set inequality sweep to CSV");
  add_common_flags(verify, verify_flags, true);

  CommonFlags ais_flags;
  std::string ais_lambda1 = "1/2", ais_lambda2 = "1/2";
  CLI::App *ais = app.add_subcommand("ais", "aligned-image-set oracle to JSON");
  add_common_flags(ais, ais_flags, true);
  ais->add_option("--lambda1", ais_lambda1, "bottom band level");
  ais->add_option("--lambda2", ais_lambda2, "top band level");

  CommonFlags region_flags;
  std::string region_format = "csv";
  CLI::App *region = app.add_subcommand("region", "GDoF region vertices");
  add_common_flags(region, region_flags, true);
  region->add_option("--format", region_format, "csv or json");

  CommonFlags cert_flags;
  std::string cert_builtin = "sum-rate";
  CLI::App *certificate = app.add_subcommand("certificate", "check an inequality certificate");
  add_common_flags(certificate, cert_flags, true);
  certificate->add_option("--builtin", cert_builtin, "built-in certificate name");

  CommonFlags lemma1_flags;
  CLI::App *lemma1 = app.add_subcommand("lemma1", "desk-scale submodularity sweep to CSV");
  add_common_flags(lemma1, lemma1_flags, true);

  CLI11_PARSE(app, argc, argv);

  try {
    if (partition->parsed())
      return run_partition(partition_flags, partition_P, partition_x, partition_levels);
    if (verify->parsed()) return run_verify(verify_flags);
    if (ais->parsed()) return run_ais(ais_flags, ais_lambda1, ais_lambda2);
    if (region->parsed()) return run_region(region_flags, region_format);
    if (certificate->parsed()) return run_certificate(cert_flags, cert_builtin);
    if (lemma1->parsed()) return run_lemma1(lemma1_flags);
  } catch (const aisbound::InputError &e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const std::invalid_argument &e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const std::domain_error &e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitVerificationFailure;
  }
  return kExitInputError;
}
