/*
 * Copyright 2026 The cotypelab Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <cmath>
#include <cstdint>
#include <iomanip>
#include <iostream>
#include <limits>
#include <numeric>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cotypelab.hpp"

namespace {

using cotypelab::io::json;
namespace cl = cotypelab;

// Thrown for failed verdicts after the report is written.
struct VerdictFailure {};

struct InputOptions {
  std::string input;
  std::string gen;
  double tolerance = cl::kDefaultTolerance;
};

void add_input(CLI::App* cmd, InputOptions& in) {
  auto* file = cmd->add_option("-i,--input", in.input, "space file (.json or .csv)");
  auto* gen = cmd->add_option("--gen", in.gen, "generator, e.g. cantor-level=2 or random-ultrametric=8,seed=7");
  file->excludes(gen);
  cmd->add_option("--tolerance", in.tolerance, "relative tolerance for axiom checks")->check(CLI::NonNegativeNumber);
}

cl::FiniteMetricSpace load_space(const InputOptions& in) {
  if (in.input.empty() == in.gen.empty()) throw CLI::ValidationError("exactly one of --input or --gen is required");
  if (!in.gen.empty()) return cl::generate(cl::parse_generator_spec(in.gen)).with_tolerance(in.tolerance);
  return cl::io::read_space(in.input, in.tolerance);
}

json number_or_inf(double v) {
  if (std::isinf(v)) return "inf";
  return v;
}

void emit(const json& j, bool as_json, const std::string& table) {
  if (as_json)
    std::cout << j.dump(2) << '\n';
  else
    std::cout << table;
}

std::string join(const std::vector<std::size_t>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
  return s;
}

// ---- analyze

void run_analyze(const InputOptions& in, const std::string& mode, bool as_json, unsigned threads) {
  const auto x = load_space(in);
  json j;
  j["points"] = x.size();
  j["metric"] = true;
  const auto um = cl::check_ultrametric(x);
  j["ultrametric"] = um.holds;
  if (um.witness) j["ultrametric_witness"] = *um.witness;
  std::ostringstream t;
  t << std::setprecision(10);
  t << "points:           " << x.size() << "\nmetric:           valid\n";
  t << "ultrametric:      " << (um.holds ? "yes" : "no");
  if (um.witness) t << " (witness " << (*um.witness)[0] << "," << (*um.witness)[1] << "," << (*um.witness)[2] << ")";
  t << '\n';
  bool ok = true;
  if (x.size() >= 2) {
    const auto ls = cl::ls_metric_exponent(x);
    j["ls_exponent"] = number_or_inf(ls.value);
    j["ls_capped"] = ls.capped;
    t << "L^s exponent:     " << ls.value << (ls.capped ? " (capped)" : "") << '\n';

    cl::SeparationMode sm = x.size() <= cl::kExactSeparationLimit ? cl::SeparationMode::Exact
                                                                    : cl::SeparationMode::Dendrogram;
    if (mode == "exact") sm = cl::SeparationMode::Exact;
    if (mode == "dendrogram") sm = cl::SeparationMode::Dendrogram;
    const auto sep = cl::separation_constant(x, sm, cl::kExactSeparationLimit, threads);
    const auto sub = cl::subdominant_ultrametric(x);
    const double L = sub.distortion;
    const double tol = x.tolerance();
    const bool lower = L <= sep.c_sep * (1 + tol);
    const bool upper = sep.c_sep <= 2 * L * L * (1 + tol);
    ok = lower && upper;
    j["c_sep"] = sep.c_sep;
    j["c_sep_mode"] = std::string(cl::to_string(sep.mode));
    j["c_sep_witness"] = sep.witness_subset;
    j["distortion"] = L;
    j["distortion_witness"] = sub.witness;
    j["sandwich"] = {{"lower", L}, {"c_sep", sep.c_sep}, {"upper", 2 * L * L}, {"holds", ok}};
    j["cotype_q"] = 1;
    j["cotype_constant"] = sep.c_sep;
    t << "C_sep:            " << sep.c_sep << " (" << cl::to_string(sep.mode) << ", witness {" << join(sep.witness_subset)
      << "})\n";
    t << "distortion L:     " << L << '\n';
    t << "sandwich:         " << L << " <= " << sep.c_sep << " <= " << 2 * L * L << (ok ? "  ok" : "  FAIL") << '\n';
    t << "note:             finite, so bi-Lipschitz to an ultrametric; metric cotype q for every q > 1 (q_X = 1), "
         "constant C_sep\n";
  }
  emit(j, as_json, t.str());
  if (!ok) throw VerdictFailure{};
}

// ---- tree

void run_tree(const InputOptions& in, std::optional<double> c, const std::string& format, const std::string& output) {
  const auto x = load_space(in);
  const double cc = c ? *c : (x.size() >= 2 ? cl::separation_constant(x).c_sep : 1.0);
  const auto tree = cl::build_tree_structure(x, cc);
  const auto check = cl::validate_tree_structure(x, tree);
  const std::string text = format == "dot" ? cl::tree_to_dot(x, tree) : cl::io::tree_to_json(tree).dump(2) + "\n";
  if (output.empty())
    std::cout << text;
  else
    cl::io::write_file(output, text);
  if (!check.all_ok()) {
    std::cerr << "tree failed validation\n";
    throw VerdictFailure{};
  }
}

// ---- isoperimetry

void run_isoperimetry(std::size_t n, std::size_t m, bool exhaustive, std::size_t samples, std::optional<std::uint64_t> seed,
                      bool as_json, unsigned threads) {
  const cl::TorusShape shape(n, m);
  const std::size_t v = shape.vertex_count();
  if (exhaustive && v > cl::kBruteForceVertexLimit)
    throw cl::Error(cl::ErrorCode::TooLarge, "exhaustive mode needs m^n <= 16", {v});
  if (!exhaustive && !seed) throw CLI::ValidationError("sampled mode requires --seed");
  const bool applies = m >= 4;  // the simple graphs lose the wrap-around edges at m = 2
  json rows = json::array();
  std::ostringstream t;
  t << "n,m,size,min_boundary_r,min_boundary_t,linfty_bound,bl_bound,verdict\n";
  bool ok = true;
  for (std::size_t a = 0; a <= v / 2; ++a) {
    std::size_t br = 0, bt = 0;
    if (exhaustive) {
      br = cl::brute_force_min_boundary(n, m, a, cl::TorusGraph::R, cl::kBruteForceVertexLimit, threads).min_count;
      bt = cl::brute_force_min_boundary(n, m, a, cl::TorusGraph::T, cl::kBruteForceVertexLimit, threads).min_count;
    } else {
      br = bt = std::numeric_limits<std::size_t>::max();
      for (std::size_t s = 0; s < samples; ++s) {
        auto rng = cl::detail::sample_rng(*seed, a * samples + s);
        std::vector<std::size_t> perm(v);
        std::iota(perm.begin(), perm.end(), std::size_t{0});
        for (std::size_t i = 0; i < a; ++i) std::swap(perm[i], perm[i + rng() % (v - i)]);
        perm.resize(a);
        const auto sub = cl::TorusSubset::from_indices(shape, perm);
        br = std::min(br, cl::edge_boundary(sub, cl::TorusGraph::R));
        bt = std::min(bt, cl::edge_boundary(sub, cl::TorusGraph::T));
      }
    }
    const auto b = cl::isoperimetric_bounds(a, n, m);
    const bool row_ok = static_cast<double>(br) >= b.linfty * (1 - 1e-12) &&
                        static_cast<double>(bt) >= b.bollobas_leader * (1 - 1e-12);
    const std::string verdict = !applies ? "n/a" : (row_ok ? "pass" : "fail");
    if (applies && !row_ok) ok = false;
    rows.push_back({{"n", n}, {"m", m}, {"size", a}, {"min_boundary_r", br}, {"min_boundary_t", bt},
                    {"linfty_bound", b.linfty}, {"bl_bound", b.bollobas_leader}, {"verdict", verdict}});
    t << n << ',' << m << ',' << a << ',' << br << ',' << bt << ',' << cl::io::format_double(b.linfty) << ','
      << cl::io::format_double(b.bollobas_leader) << ',' << verdict << '\n';
  }
  json j;
  j["mode"] = exhaustive ? "exhaustive" : "sampled";
  j["rows"] = std::move(rows);
  j["all_pass"] = ok;
  emit(j, as_json, t.str());
  if (!ok) throw VerdictFailure{};
}

// ---- cotype

struct CotypeOptions {
  double p = 0, q = 2;
  std::size_t n = 1;
  std::optional<std::size_t> m;
  std::string strategy = "random";
  std::size_t budget = 1000;
  std::optional<std::uint64_t> seed;
  std::optional<double> bound;
  double gamma = 1;
  bool certify = false;
};

void run_cotype(const InputOptions& in, const CotypeOptions& o, bool as_json, unsigned threads) {
  const auto x = load_space(in);
  cl::CotypeParams params;
  params.q = o.q;
  params.p = o.p > 0 ? o.p : o.q;
  params.n = o.n;
  if (o.m) {
    params.m = *o.m;
    if (params.m % 2 != 0) throw CLI::ValidationError("-m must be even");
    const double floor_m = cl::scaling_lower_bound(o.gamma, params.q, params.n);
    if (static_cast<double>(params.m) < floor_m)
      std::cerr << "warning: m = " << params.m << " is below Gamma^-1 n^(1/q) = " << floor_m << '\n';
  } else {
    if (params.p != params.q) throw CLI::ValidationError("-m is required when p < q");
    params.m = cl::mn_scaling_function(params.q, params.n);
  }
  cl::SearchStrategy strategy = cl::SearchStrategy::Random;
  if (o.strategy == "exhaustive") strategy = cl::SearchStrategy::Exhaustive;
  else if (o.strategy == "local") strategy = cl::SearchStrategy::Local;
  if (strategy != cl::SearchStrategy::Exhaustive && !o.seed)
    throw CLI::ValidationError("--seed is required for randomized strategies");
  const auto result = cl::gamma_search(x, params, strategy, o.budget, o.seed.value_or(0), threads);

  json j;
  j["p"] = params.p;
  j["q"] = params.q;
  j["n"] = params.n;
  j["m"] = params.m;
  j["strategy"] = o.strategy;
  j["budget"] = o.budget;
  if (o.seed) j["seed"] = *o.seed;
  j["evaluated"] = result.evaluated;
  j["best_gamma"] = result.best_gamma;
  j["best_index"] = result.best_index;
  j["lhs"] = result.evaluation.lhs;
  j["rhs"] = result.evaluation.rhs;
  j["best_f"] = result.best.values;
  std::ostringstream t;
  t << std::setprecision(12);
  t << "p = " << params.p << ", q = " << params.q << ", n = " << params.n << ", m = " << params.m << '\n';
  t << "strategy " << o.strategy << ", evaluated " << result.evaluated << '\n';
  t << "best implied gamma: " << result.best_gamma << "  (lhs " << result.evaluation.lhs << ", rhs "
    << result.evaluation.rhs << ")\n";
  t << "best f: " << join(result.best.values) << '\n';

  bool ok = true;
  if (o.bound) {
    const bool within = result.best_gamma <= *o.bound + 1e-9;
    j["bound"] = *o.bound;
    j["within_bound"] = within;
    t << "bound " << *o.bound << ": " << (within ? "ok" : "EXCEEDED") << '\n';
    ok = ok && within;
  }
  if (o.certify) {
    const auto cert = cl::sts_certificate(x, result.best, params.q);
    j["certificate"] = cl::io::certificate_to_json(cert);
    t << '\n' << cl::io::certificate_table(cert);
    ok = ok && cert.passed();
  }
  emit(j, as_json, t.str());
  if (!ok) throw VerdictFailure{};
}

// ---- transfer

struct TransferOptions {
  std::string map_file;
  std::string construct;
  std::string kind = "bilip";
  std::optional<double> scale, L, K, additive;
  double alpha = 1;
  double perturb = 0.1;
  bool verify = false;
  double p = 0, q = 2, gamma = 1, scaling_k = 1;
  std::size_t n = 1, m = 4, samples = 100;
  std::optional<std::uint64_t> seed;
};

cl::MapKind parse_kind(const std::string& k) {
  if (k == "bilip") return cl::MapKind::BiLipschitz;
  if (k == "snowflake") return cl::MapKind::Snowflake;
  if (k == "linear_qs") return cl::MapKind::LinearQuasisymmetric;
  if (k == "rough_isometry") return cl::MapKind::RoughIsometry;
  throw CLI::ValidationError("unknown map kind " + k);
}

// Builds (source, target) for --construct from the input space.
cl::io::StoredMap construct_map(const cl::FiniteMetricSpace& base, TransferOptions& o) {
  const std::size_t k = base.size();
  std::vector<std::size_t> id(k);
  std::iota(id.begin(), id.end(), std::size_t{0});
  if (o.construct == "snowflake") {
    o.kind = "snowflake";
    return {base, cl::snowflake_transform(base, o.alpha), id};
  }
  if (o.construct == "bilip") {
    o.kind = "bilip";
    return {base, cl::subdominant_ultrametric(base).ultrametric, id};
  }
  if (o.construct == "rough") {
    if (!o.seed) throw CLI::ValidationError("--construct rough requires --seed");
    o.kind = "rough_isometry";
    // Raising every off-diagonal distance by u in [c/2, c] keeps the triangle
    // inequality: d(x,z) + u_xz <= d(x,y) + d(y,z) + c <= ... + u_xy + u_yz.
    auto rng = cl::detail::sample_rng(*o.seed, 0);
    std::uniform_real_distribution<double> u(o.perturb / 2, o.perturb);
    auto m = base.matrix();
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = i + 1; j < k; ++j) m[i][j] = m[j][i] = m[i][j] + u(rng);
    return {base, cl::validate_metric(m, base.labels(), base.tolerance()), id};
  }
  throw CLI::ValidationError("--construct must be snowflake, bilip or rough");
}

void run_transfer(const InputOptions& in, TransferOptions o, bool as_json) {
  cl::io::StoredMap stored;
  if (!o.map_file.empty()) {
    const auto dir = o.map_file.find('/') == std::string::npos ? std::string{} : o.map_file.substr(0, o.map_file.rfind('/'));
    stored = cl::io::map_from_json(cl::io::parse_json(cl::io::read_file(o.map_file)), dir, in.tolerance);
  } else {
    if (o.construct.empty()) throw CLI::ValidationError("give --map or --construct");
    stored = construct_map(load_space(in), o);
  }
  const auto map = stored.view();
  const auto kind = parse_kind(o.kind);
  cl::MapParams declared;
  declared.scale = o.scale;
  declared.L = o.L;
  declared.alpha = o.alpha;
  declared.K = o.K;
  declared.additive = o.additive;
  const auto report = cl::check_map(map, kind, declared);

  json j;
  j["kind"] = std::string(cl::to_string(kind));
  j["passes"] = report.passes;
  switch (kind) {
    case cl::MapKind::BiLipschitz:
    case cl::MapKind::Snowflake:
      j["fitted_scale"] = report.fitted_scale;
      j["fitted_L"] = number_or_inf(report.fitted_L);
      j["alpha"] = report.alpha;
      break;
    case cl::MapKind::LinearQuasisymmetric: j["fitted_K"] = number_or_inf(report.fitted_K); break;
    case cl::MapKind::RoughIsometry: j["fitted_additive"] = report.fitted_additive; break;
  }
  j["witness"] = report.witness;
  std::ostringstream t;
  t << std::setprecision(12);
  t << "map kind: " << cl::to_string(kind) << "  verdict: " << (report.passes ? "pass" : "fail") << '\n';
  t << "fitted: scale " << report.fitted_scale << ", L " << report.fitted_L << ", K " << report.fitted_K
    << ", additive " << report.fitted_additive << "  (witness " << join(report.witness) << ")\n";
  if (!report.detail.empty()) t << report.detail << '\n';
  bool ok = report.passes;

  if (o.verify && ok) {
    if (!o.seed) throw CLI::ValidationError("--verify requires --seed");
    cl::CotypeParams params;
    params.q = o.q;
    params.p = o.p > 0 ? o.p : o.q;
    params.n = o.n;
    params.m = o.m;
    params.gamma = o.gamma;
    const auto v = cl::empirical_transfer_verify(map, kind, declared, params, o.samples, *o.seed, o.scaling_k);
    json jv;
    jv["exponent"] = v.exponent;
    jv["constant"] = v.constant;
    jv["slack"] = v.slack;
    jv["samples"] = v.samples;
    jv["violations"] = v.violations;
    jv["max_violation"] = v.max_violation;
    jv["worst_sample"] = v.worst_sample;
    jv["premise_violations"] = v.premise_violations;
    jv["max_premise_violation"] = v.max_premise_violation;
    jv["passed"] = v.passed();
    j["verification"] = std::move(jv);
    t << "transferred inequality: p = " << v.exponent << ", Gamma = " << v.constant << ", slack = " << v.slack << '\n';
    t << "samples " << v.samples << ", violations " << v.violations << " (max relative " << v.max_violation
      << "), premise violations " << v.premise_violations << '\n';
    ok = v.passed();
  }
  emit(j, as_json, t.str());
  if (!ok) throw VerdictFailure{};
}

// ---- chain

void run_chain(const InputOptions& in, std::optional<std::size_t> a, std::optional<std::size_t> b,
               std::optional<double> epsilon, std::optional<double> c, bool as_json) {
  const auto x = load_space(in);
  json j;
  std::ostringstream t;
  if (c) {
    const auto w = cl::unseparated_chain(x, *c);
    j["C"] = *c;
    j["separated"] = !w.has_value();
    if (w) {
      j["subset"] = w->subset;
      j["chain"] = w->chain.points;
      j["epsilon"] = w->chain.epsilon;
      t << "subset {" << join(w->subset) << "} has no " << *c << "-split; chain " << join(w->chain.points)
        << " with steps < " << w->chain.epsilon << '\n';
    } else {
      t << "every subset has a " << *c << "-split\n";
    }
    emit(j, as_json, t.str());
    return;
  }
  if (!a || !b || !epsilon) throw CLI::ValidationError("give --from, --to and --epsilon, or -C");
  if (*a >= x.size() || *b >= x.size()) throw CLI::ValidationError("endpoint out of range");
  const auto chain = cl::find_chain(x, *a, *b, *epsilon);
  j["found"] = chain.has_value();
  j["epsilon"] = *epsilon;
  if (chain) {
    j["chain"] = chain->points;
    t << "chain: " << join(chain->points) << '\n';
  } else {
    t << "no chain with steps < " << *epsilon << '\n';
  }
  emit(j, as_json, t.str());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Finite metric spaces, separated trees and metric cotype inequalities"};
  app.require_subcommand(1);
  app.fallthrough();
  bool as_json = false;
  unsigned threads = cl::default_threads();
  app.add_flag("--json", as_json, "emit JSON")->configurable(false);
  app.add_option("--threads", threads, "worker threads (default: COTYPELAB_THREADS or 1)")->check(CLI::PositiveNumber);

  InputOptions in;

  auto* analyze = app.add_subcommand("analyze", "metric diagnostics and separation constant");
  add_input(analyze, in);
  std::string mode = "auto";
  analyze->add_option("--mode", mode, "separation mode")->check(CLI::IsMember({"auto", "exact", "dendrogram"}));

  auto* tree = app.add_subcommand("tree", "C-separated tree structure as DOT or JSON");
  add_input(tree, in);
  std::optional<double> tree_c;
  std::string format = "json", output;
  tree->add_option("-C", tree_c, "separation constant (default: C_sep)");
  tree->add_option("--format", format)->check(CLI::IsMember({"json", "dot"}));
  tree->add_option("-o,--output", output);

  auto* iso = app.add_subcommand("isoperimetry", "edge boundaries on the discrete torus");
  std::size_t iso_n = 1, iso_m = 4, iso_samples = 1000;
  bool exhaustive = false;
  std::optional<std::uint64_t> iso_seed;
  iso->add_option("-n", iso_n)->required()->check(CLI::PositiveNumber);
  iso->add_option("-m", iso_m)->required()->check(CLI::PositiveNumber);
  iso->add_flag("--exhaustive", exhaustive);
  iso->add_option("--samples", iso_samples, "random subsets per size in sampled mode");
  iso->add_option("--seed", iso_seed);

  auto* cotype = app.add_subcommand("cotype", "estimate the metric cotype constant");
  add_input(cotype, in);
  CotypeOptions co;
  cotype->add_option("-p", co.p, "default: q");
  cotype->add_option("-q", co.q)->required();
  cotype->add_option("-n", co.n)->check(CLI::PositiveNumber);
  cotype->add_option("-m", co.m, "default: scaling function when p = q");
  cotype->add_option("--strategy", co.strategy)->check(CLI::IsMember({"exhaustive", "random", "local"}));
  cotype->add_option("--budget", co.budget);
  cotype->add_option("--seed", co.seed);
  cotype->add_option("--bound", co.bound, "fail if the best gamma exceeds this");
  cotype->add_option("--gamma", co.gamma, "Gamma for the m >= Gamma^-1 n^(1/q) gate");
  cotype->add_flag("--certify", co.certify, "replay the level certificate on the best f");

  auto* transfer = app.add_subcommand("transfer", "check a map and verify transferred cotype");
  add_input(transfer, in);
  TransferOptions to;
  transfer->add_option("--map", to.map_file, "map JSON");
  transfer->add_option("--construct", to.construct, "build the map from the input")
      ->check(CLI::IsMember({"snowflake", "bilip", "rough"}));
  transfer->add_option("--kind", to.kind)->check(CLI::IsMember({"bilip", "snowflake", "linear_qs", "rough_isometry"}));
  transfer->add_option("--scale", to.scale);
  transfer->add_option("-L", to.L);
  transfer->add_option("--alpha", to.alpha);
  transfer->add_option("-K", to.K, "linear quasisymmetry constant");
  transfer->add_option("--additive", to.additive);
  transfer->add_option("--perturb", to.perturb, "c for --construct rough");
  transfer->add_flag("--verify", to.verify);
  transfer->add_option("-p", to.p);
  transfer->add_option("-q", to.q);
  transfer->add_option("-n", to.n);
  transfer->add_option("-m", to.m);
  transfer->add_option("--gamma", to.gamma, "cotype constant of the base space");
  transfer->add_option("--scaling-k", to.scaling_k, "K with m <= K n^(1/q)");
  transfer->add_option("--samples", to.samples);
  transfer->add_option("--seed", to.seed);

  auto* chain = app.add_subcommand("chain", "epsilon-chains");
  add_input(chain, in);
  std::optional<std::size_t> from, to_pt;
  std::optional<double> epsilon, chain_c;
  chain->add_option("--from", from);
  chain->add_option("--to", to_pt);
  chain->add_option("--epsilon", epsilon);
  chain->add_option("-C", chain_c, "find a subset with no C-split and its chain");

  auto* gen = app.add_subcommand("gen", "write a generated space");
  std::string gen_spec, gen_out;
  gen->add_option("spec", gen_spec)->required();
  gen->add_option("-o,--output", gen_out, ".json or .csv");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*analyze) run_analyze(in, mode, as_json, threads);
    else if (*tree) run_tree(in, tree_c, format, output);
    else if (*iso) {
      if (iso_m % 2 != 0) throw CLI::ValidationError("-m must be even");
      run_isoperimetry(iso_n, iso_m, exhaustive, iso_samples, iso_seed, as_json, threads);
    } else if (*cotype) run_cotype(in, co, as_json, threads);
    else if (*transfer) run_transfer(in, to, as_json);
    else if (*chain) run_chain(in, from, to_pt, epsilon, chain_c, as_json);
    else if (*gen) {
      const auto x = cl::generate(cl::parse_generator_spec(gen_spec));
      if (gen_out.empty())
        std::cout << cl::io::space_to_json(x).dump(2) << '\n';
      else
        cl::io::write_space(x, gen_out);
    }
  } catch (const VerdictFailure&) {
    return 1;
  } catch (const CLI::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const cl::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.code() == cl::ErrorCode::NoValidSplit ? 1 : 2;
  }
  return 0;
}
