// Copyright 2026 The locc-geometry Authors.

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at

//     http://www.apache.org/licenses/LICENSE-2.0

// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

/**
 * @file cli.hpp
 * @brief Command-line front end: loads POVMs and ensembles (files or
 * `builtin:<name>`), dispatches to the analysis modules and writes one JSON
 * report per invocation.
 *
 * Report envelope: {"tool", "version", "command", "config", "result"} with
 * sorted keys, plus "timing" only under --timing, so that a fixed
 * configuration yields byte-identical output. The thread count is not
 * echoed: results do not depend on it.
 */
#pragma once

#include <chrono>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "locc/json_io.hpp"

namespace locc::cli {

inline constexpr const char *kToolName = "locc-geometry";
inline constexpr const char *kToolVersion = "0.1.0";

enum ExitCode : int {
    kExitOk = 0,
    kExitInternal = 1,
    kExitUsage = 64,
    kExitMalformedJson = 65,
    kExitMissingFile = 66,
    kExitDimensionMismatch = 67,
    kExitUnknownBuiltin = 68,
};

/// A usage problem detected after argument parsing (bad combination, wrong input kind).
class UsageError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

/// Every option of every subcommand; unset optionals fall back to per-command defaults.
struct RunConfig {
    std::string command;
    std::string povm;
    std::string other;
    std::string ensemble;
    std::string tree;
    std::string op;
    std::string target;
    std::string coefficients;
    std::string space = "2,2";
    std::string out;
    std::string norm = "trace";
    std::string method = "vertex";
    std::string name;
    std::uint64_t seed = 0;
    std::optional<std::size_t> samples;
    double epsilon = 0.05;
    double scale = 1.0;
    double grid_step = 0.0;
    std::size_t ap_seeds = 0;
    std::size_t max_stored_hits = 64;
    std::size_t restarts = 4;
    double s_step = 0.0;
    double max_relative_jump = 0.1;
    std::size_t rounds = 2;
    std::size_t branching = 2;
    std::size_t samples_per_segment = kDefaultSamplesPerSegment;
    std::size_t threads = 1;
    bool emit_path = false;
    bool emit_tree = false;
    bool emit_sweep = false;
    bool timing = false;
    std::optional<double> tol_membership;
    std::optional<double> tol_product;
    std::optional<double> tol_psd;
    std::optional<double> tol_completeness;
    std::optional<double> tol_endpoint;
    std::optional<double> tol_on_segment;
    std::optional<double> tol_lipschitz;
};

namespace detail {

using io::Json;

inline std::string builtin_name(const std::string &source) {
    static const std::string prefix = "builtin:";
    return source.compare(0, prefix.size(), prefix) == 0 ? source.substr(prefix.size()) : "";
}

/// A POVM from a file or builtin URI; ensembles are rejected as a usage error.
inline Povm load_povm(const std::string &source) {
    if (source.empty()) {
        throw UsageError("a --povm source is required");
    }
    const std::string b = builtin_name(source);
    if (!b.empty()) {
        Builtin v = builtin(b);
        if (auto *p = std::get_if<Povm>(&v)) {
            return *p;
        }
        throw UsageError("builtin:" + b + " is an ensemble, not a POVM");
    }
    return io::povm_from_json(io::read_json_file(source));
}

inline Ensemble load_ensemble(const std::string &source) {
    if (source.empty()) {
        throw UsageError("an --ensemble source is required");
    }
    const std::string b = builtin_name(source);
    if (!b.empty()) {
        Builtin v = builtin(b);
        if (auto *e = std::get_if<Ensemble>(&v)) {
            return *e;
        }
        throw UsageError("builtin:" + b + " is a POVM, not an ensemble");
    }
    return io::ensemble_from_json(io::read_json_file(source));
}

/// Candidate operators with labels: POVM elements or ensemble states.
inline std::pair<std::vector<HermitianOperator>, std::vector<std::string>>
load_candidates(const RunConfig &c) {
    std::vector<std::string> labels;
    if (!c.ensemble.empty()) {
        const Ensemble e = load_ensemble(c.ensemble);
        for (std::size_t m = 0; m < e.size(); ++m) {
            labels.push_back(e.name(m));
        }
        return {e.states(), labels};
    }
    const std::string b = builtin_name(c.povm);
    if (!b.empty()) {
        Builtin v = builtin(b);
        if (auto *e = std::get_if<Ensemble>(&v)) {
            for (std::size_t m = 0; m < e->size(); ++m) {
                labels.push_back(e->name(m));
            }
            return {e->states(), labels};
        }
    }
    const Povm p = load_povm(c.povm);
    for (std::size_t j = 0; j < p.size(); ++j) {
        labels.push_back(p.label(j));
    }
    return {p.elements(), labels};
}

inline std::size_t resolve_target(const Povm &p, const std::string &name) {
    const auto j = p.find(name);
    if (!j) {
        throw UsageError("unknown target '" + name + "'");
    }
    return *j;
}

/// All outcome indices for "all" (or an empty target), else the one named.
inline std::vector<std::size_t> resolve_targets(const Povm &p, const std::string &name) {
    std::vector<std::size_t> out;
    if (name.empty() || name == "all") {
        for (std::size_t j = 0; j < p.size(); ++j) {
            out.push_back(j);
        }
        return out;
    }
    return {resolve_target(p, name)};
}

inline std::vector<std::size_t> parse_dims(const std::string &s) {
    std::vector<std::size_t> dims;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        try {
            std::size_t used = 0;
            const unsigned long v = std::stoul(tok, &used);
            if (used != tok.size()) {
                throw std::invalid_argument(tok);
            }
            dims.push_back(v);
        } catch (const std::logic_error &) {
            throw UsageError("--space expects comma-separated party dimensions, got '" + s + "'");
        }
    }
    return dims;
}

inline std::vector<double> parse_list(const std::string &s, const std::string &what) {
    std::vector<double> v;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        try {
            std::size_t used = 0;
            v.push_back(std::stod(tok, &used));
            if (used != tok.size()) {
                throw std::invalid_argument(tok);
            }
        } catch (const std::logic_error &) {
            throw UsageError(what + " expects comma-separated numbers, got '" + s + "'");
        }
    }
    return v;
}

inline Json labels_json(const Povm &p) {
    Json a = Json::array();
    for (std::size_t j = 0; j < p.size(); ++j) {
        a.push_back(p.label(j));
    }
    return a;
}

inline Json inputs_json(const RunConfig &c) {
    Json in = Json::object();
    auto put = [&](const char *k, const std::string &v) {
        if (!v.empty()) {
            in[k] = v;
        }
    };
    put("povm", c.povm);
    put("other", c.other);
    put("ensemble", c.ensemble);
    put("tree", c.tree);
    put("operator", c.op);
    return in;
}

inline double tol_or(const std::optional<double> &t, double fallback) { return t ? *t : fallback; }

// ---------------------------------------------------------------------------
// Commands: each returns {config, result}
// ---------------------------------------------------------------------------

struct Outcome {
    Json config;
    Json result;
};

inline Outcome cmd_validate(const RunConfig &c) {
    const Povm p = load_povm(c.povm);
    const double ct = tol_or(c.tol_completeness, kCompletenessTol);
    const double pt = tol_or(c.tol_psd, kPsdTol);
    Json result = io::report_json(validate(p, ct, pt));
    result["elements"] = p.size();
    result["labels"] = labels_json(p);
    result["space"] = io::space_json(p.space());
    const Povm merged = merge_proportional(p);
    result["distinct_directions"] = merged.size();
    return {Json{{"tolerances", {{"completeness", ct}, {"psd", pt}}}}, result};
}

inline Outcome cmd_weights(const RunConfig &c) {
    const auto [ops, labels] = load_candidates(c);
    WeightOptions o;
    o.feasibility_tol = tol_or(c.tol_completeness, o.feasibility_tol);
    o.threads = c.threads;
    const WeightSolution w = completeness_weights(ops, o);
    Json result = io::report_json(w, labels);
    if (w.feasible) {
        const Povm m = weighted_povm(ops, w, labels);
        result["measurement"] = Json{{"labels", labels_json(m)},
                                     {"validation", io::report_json(validate(m))}};
    }
    return {Json{{"tolerances", {{"feasibility", o.feasibility_tol}}}}, result};
}

inline Outcome cmd_member(const RunConfig &c) {
    const Povm p = load_povm(c.povm);
    const Zonotope z(p);
    const double tol = tol_or(c.tol_membership, kMembershipTol);
    const int given = (!c.op.empty() ? 1 : 0) + (!c.target.empty() ? 1 : 0) +
                      (!c.coefficients.empty() ? 1 : 0);
    if (given != 1) {
        throw UsageError("member needs exactly one of --operator, --target, --coefficients");
    }
    std::optional<HermitianOperator> x;
    Json cfg{{"tolerances", {{"membership", tol}}}};
    if (!c.op.empty()) {
        x = io::operator_from_json(io::read_json_file(c.op), p.space());
    } else if (!c.target.empty()) {
        HermitianOperator e = p[resolve_target(p, c.target)];
        e *= c.scale;
        x = e;
        cfg["target"] = c.target;
        cfg["scale"] = c.scale;
    } else {
        const auto v = parse_list(c.coefficients, "--coefficients");
        if (v.size() != p.size()) {
            throw DimensionError("--coefficients has " + std::to_string(v.size()) +
                                 " entries for " + std::to_string(p.size()) + " outcomes");
        }
        HermitianOperator s = HermitianOperator::zero(p.space());
        for (std::size_t j = 0; j < v.size(); ++j) {
            s += v[j] * p[j];
        }
        x = s;
        cfg["coefficients"] = v;
    }
    Json result = io::report_json(contains(z, *x, tol), tol);
    result["trace"] = io::number(x->trace());
    result["product_residual"] = io::number(nearest_product(*x).residual);
    return {cfg, result};
}

inline DistanceOptions distance_options(const RunConfig &c) {
    DistanceOptions o;
    if (c.norm == "trace") {
        o.norm = DistanceNorm::Trace;
    } else if (c.norm == "frobenius") {
        o.norm = DistanceNorm::Frobenius;
    } else {
        throw UsageError("--norm must be trace or frobenius");
    }
    if (c.method == "vertex") {
        o.method = DistanceMethod::Vertex;
    } else if (c.method == "sampled") {
        o.method = DistanceMethod::Sampled;
    } else {
        throw UsageError("--method must be vertex or sampled");
    }
    if (c.samples) {
        o.samples = *c.samples;
    }
    o.seed = c.seed;
    o.threads = c.threads;
    return o;
}

inline Outcome cmd_hausdorff(const RunConfig &c) {
    if (c.other.empty()) {
        throw UsageError("hausdorff needs --povm and --other");
    }
    const Povm a = load_povm(c.povm);
    const Povm b = load_povm(c.other);
    if (!(a.space() == b.space())) {
        throw DimensionError("POVMs live on " + a.space().to_string() + " and " +
                             b.space().to_string());
    }
    const DistanceOptions o = distance_options(c);
    HausdorffReport h;
    try {
        h = hausdorff(Zonotope(a), Zonotope(b), o);
    } catch (const VertexCapError &e) {
        throw UsageError(std::string(e.what()));
    }
    Json cfg{{"norm", c.norm}, {"method", c.method}};
    if (o.method == DistanceMethod::Sampled) {
        cfg["samples"] = o.samples;
        cfg["subset_size"] = o.subset_size;
        cfg["seed"] = c.seed;
    }
    return {cfg, io::report_json(h)};
}

inline PathSearchOptions path_options(const RunConfig &c) {
    PathSearchOptions o;
    o.seed = c.seed;
    o.restarts = c.restarts;
    o.s_step = c.s_step;
    o.max_relative_jump = c.max_relative_jump;
    o.product_tol = tol_or(c.tol_product, o.product_tol);
    o.membership_tol = tol_or(c.tol_membership, o.membership_tol);
    o.endpoint_tol = tol_or(c.tol_endpoint, o.endpoint_tol);
    o.threads = c.threads;
    return o;
}

inline Json path_config(const RunConfig &c, const PathSearchOptions &o) {
    return Json{{"seed", c.seed},
                {"target", c.target.empty() ? "all" : c.target},
                {"restarts", o.restarts},
                {"s_step", o.s_step},
                {"max_relative_jump", o.max_relative_jump},
                {"tolerances",
                 {{"product", o.product_tol},
                  {"membership", o.membership_tol},
                  {"endpoint", o.endpoint_tol}}}};
}

inline Outcome cmd_path_search(const RunConfig &c) {
    const Povm p = load_povm(c.povm);
    const Zonotope z(p);
    const PathSearchOptions o = path_options(c);
    Json targets = Json::array();
    std::size_t found = 0;
    const auto ids = resolve_targets(p, c.target);
    for (std::size_t j : ids) {
        if (p[j].frobenius_norm() == 0.0) {
            targets.push_back(Json{{"label", p.label(j)}, {"index", j}, {"found", false},
                                   {"skipped", "zero element"}});
            continue;
        }
        const auto r = find_monotonic_product_path(z, j, o, p.label(j));
        Json t = io::report_json(r, c.emit_path);
        t["label"] = p.label(j);
        t["index"] = j;
        found += r.found ? 1 : 0;
        targets.push_back(std::move(t));
    }
    Json cfg = path_config(c, o);
    cfg["emit_path"] = c.emit_path;
    return {cfg, Json{{"targets", std::move(targets)},
                      {"found_count", found},
                      {"target_count", ids.size()},
                      {"dimension", p.space().dim()}}};
}

inline Outcome cmd_isolate(const RunConfig &c) {
    const Povm p = load_povm(c.povm);
    if (c.target.empty()) {
        throw UsageError("isolate needs --target");
    }
    const Zonotope z(p);
    IsolationOptions o;
    o.epsilon = c.epsilon;
    o.samples = c.samples.value_or(o.samples);
    o.ap_seeds = c.ap_seeds;
    o.grid_step = c.grid_step;
    o.seed = c.seed;
    o.threads = c.threads;
    o.max_stored_hits = c.max_stored_hits;
    o.product_tol = tol_or(c.tol_product, o.product_tol);
    o.membership_tol = tol_or(c.tol_membership, o.membership_tol);
    o.on_segment_tol = tol_or(c.tol_on_segment, o.on_segment_tol);
    Json results = Json::array();
    bool all_on = true;
    for (std::size_t j : resolve_targets(p, c.target)) {
        const auto r = isolation_probe(z, j, o, p.label(j));
        all_on = all_on && r.all_hits_on_segment;
        results.push_back(io::report_json(r));
    }
    Json cfg{{"seed", c.seed},
             {"target", c.target},
             {"epsilon", o.epsilon},
             {"samples", o.samples},
             {"ap_seeds", o.ap_seeds},
             {"ap_iterations", o.ap_iterations},
             {"grid_step", o.grid_step},
             {"max_stored_hits", o.max_stored_hits},
             {"tolerances",
              {{"product", o.product_tol},
               {"membership", o.membership_tol},
               {"on_segment", o.on_segment_tol}}}};
    Json result = results.size() == 1 ? results[0] : Json{{"targets", results}};
    result["all_hits_on_segment"] = all_on;
    return {cfg, result};
}

inline Outcome cmd_simulate(const RunConfig &c) {
    std::optional<LoccTree> loaded;
    Json cfg{{"samples_per_segment", c.samples_per_segment}};
    if (!c.tree.empty()) {
        loaded = io::tree_from_json(io::read_json_file(c.tree));
    } else {
        if (c.rounds > 0 && c.branching < 2) {
            throw UsageError("--branching must be at least 2");
        }
        const PartitionedSpace s(parse_dims(c.space));
        loaded = random_protocol(s, c.rounds, c.branching, c.seed);
        cfg["space"] = s.dims();
        cfg["rounds"] = c.rounds;
        cfg["branching"] = c.branching;
        cfg["seed"] = c.seed;
    }
    const LoccTree &tree = *loaded;
    const double lemma_tol = 1e-10;
    VerifyOptions vo;
    vo.membership_tol = tol_or(c.tol_membership, vo.membership_tol);
    vo.product_tol = tol_or(c.tol_product, vo.product_tol);
    vo.lipschitz_tol = tol_or(c.tol_lipschitz, vo.lipschitz_tol);
    cfg["tolerances"] = Json{{"lemma4", lemma_tol},
                             {"membership", vo.membership_tol},
                             {"product", vo.product_tol},
                             {"lipschitz", vo.lipschitz_tol}};
    cfg["emit_tree"] = c.emit_tree;

    const Povm leaves = leaf_povm(tree);
    const Zonotope z(leaves);
    Json branches = Json::array();
    bool all_ok = true;
    for (std::size_t leaf : tree.leaves()) {
        VerifyOptions o = vo;
        o.target = tree.node(leaf).op;
        const OperatorPath path = branch_path(tree, leaf, c.samples_per_segment);
        const PathReport r = verify_path(path, z, o);
        all_ok = all_ok && r.passed();
        branches.push_back(Json{{"leaf", tree.node(leaf).label.empty() ? "root" : tree.node(leaf).label},
                                {"points", r.points},
                                {"passed", r.passed()},
                                {"max_membership_residual", io::number(r.max_membership_residual)},
                                {"max_product_residual", io::number(r.max_product_residual)},
                                {"max_lipschitz_gap", io::number(r.max_lipschitz_gap)},
                                {"monotone", r.monotone_failures.empty()}});
    }
    // nesting of successive truncations: Z(r rounds) within Z(r + 1 rounds)
    Json nesting = Json::array();
    bool nested = true;
    for (std::size_t r = 0; r < tree.round_count(); ++r) {
        const LoccTree a = truncate(tree, r);
        const LoccTree b = truncate(tree, r + 1);
        const RealMatrix emb = refinement_embedding(a, b);
        const NestingReport n = zonotope_nested(Zonotope(leaf_povm(a)), Zonotope(leaf_povm(b)),
                                                &emb, c.seed, 12, 1024, vo.membership_tol);
        nested = nested && n.nested;
        Json nj = io::report_json(n);
        nj["rounds"] = r;
        nesting.push_back(std::move(nj));
    }
    Json result{{"nodes", tree.size()},
                {"leaves", tree.leaves().size()},
                {"rounds", tree.round_count()},
                {"space", io::space_json(tree.space())},
                {"lemma4", io::report_json(check_lemma4(tree, lemma_tol))},
                {"leaf_povm", io::report_json(validate(leaves))},
                {"branches", std::move(branches)},
                {"all_branches_passed", all_ok},
                {"truncation_nesting", std::move(nesting)},
                {"all_nested", nested}};
    if (c.emit_tree) {
        result["tree"] = io::tree_json(tree);
    }
    return {cfg, result};
}

inline Outcome cmd_prop1(const RunConfig &c) {
    const Povm p = load_povm(c.povm);
    const Ensemble e = load_ensemble(c.ensemble);
    if (!(p.space() == e.space())) {
        throw DimensionError("POVM on " + p.space().to_string() + ", ensemble on " +
                             e.space().to_string());
    }
    const Zonotope z(p);
    const PathSearchOptions o = path_options(c);
    Prop1Options po;
    po.product_tol = tol_or(c.tol_product, po.product_tol);
    po.psd_tol = tol_or(c.tol_psd, po.psd_tol);
    po.endpoint_tol = tol_or(c.tol_endpoint, po.endpoint_tol);
    Json targets = Json::array();
    bool all_passed = true;
    for (std::size_t j : resolve_targets(p, c.target)) {
        const auto r = find_monotonic_product_path(z, j, o, p.label(j));
        Json t{{"label", p.label(j)}, {"index", j}, {"path_found", r.found}};
        if (r.found) {
            const auto cert = prop1_certificate(r.path, e, po);
            t["certificate"] = io::report_json(cert, c.emit_sweep);
            all_passed = all_passed && cert.passed();
        } else {
            all_passed = false;
        }
        targets.push_back(std::move(t));
    }
    Json cfg = path_config(c, o);
    cfg["prop1_tolerances"] = Json{{"normalization", po.normalization_tol},
                                   {"orthogonality", po.orthogonality_tol},
                                   {"product", po.product_tol},
                                   {"psd", po.psd_tol},
                                   {"endpoint", po.endpoint_tol},
                                   {"continuity", po.continuity_tol}};
    cfg["emit_sweep"] = c.emit_sweep;
    return {cfg, Json{{"targets", std::move(targets)},
                      {"partition", io::report_json(discrimination_partition(p, e), p, e)},
                      {"all_passed", all_passed}}};
}

inline Outcome cmd_ensembles(const RunConfig &c) {
    if (c.name.empty() && c.ensemble.empty()) {
        Json list = Json::array();
        for (const auto &n : builtin_names()) {
            const Builtin b = builtin(n);
            if (const auto *e = std::get_if<Ensemble>(&b)) {
                list.push_back(Json{{"name", n}, {"kind", "ensemble"}, {"size", e->size()},
                                    {"space", io::space_json(e->space())}});
            } else {
                const auto &p = std::get<Povm>(b);
                list.push_back(Json{{"name", n}, {"kind", "povm"}, {"size", p.size()},
                                    {"space", io::space_json(p.space())}});
            }
        }
        return {Json::object(), Json{{"builtins", std::move(list)}}};
    }
    const std::string source = !c.ensemble.empty() ? c.ensemble : "builtin:" + c.name;
    const std::string b = builtin_name(source);
    if (!b.empty()) {
        const Builtin v = builtin(b);
        if (const auto *p = std::get_if<Povm>(&v)) {
            return {Json{{"name", b}},
                    Json{{"kind", "povm"},
                         {"definition", io::povm_json(*p)},
                         {"validation", io::report_json(validate(*p))}}};
        }
    }
    const Ensemble e = load_ensemble(source);
    KernelProductOptions ko;
    const auto k = orthocomplement(e);
    Json kernel = Json::array();
    for (const auto &v : k) {
        kernel.push_back(io::vector_json(v));
    }
    Json result{{"kind", "ensemble"},
                {"definition", io::ensemble_json(e)},
                {"orthocomplement", std::move(kernel)},
                {"kernel_product_search", io::report_json(kernel_product_search(k, e.space(), c.seed, ko))}};
    Json cfg{{"seed", c.seed}, {"kernel_starts", ko.starts}, {"found_tol", ko.found_tol}};
    if (!c.povm.empty()) {
        const Povm p = load_povm(c.povm);
        result["partition"] = io::report_json(discrimination_partition(p, e), p, e);
    }
    if (!c.name.empty()) {
        cfg["name"] = c.name;
    }
    return {cfg, result};
}

inline Outcome dispatch(const RunConfig &c) {
    if (c.command == "validate") return cmd_validate(c);
    if (c.command == "weights") return cmd_weights(c);
    if (c.command == "member") return cmd_member(c);
    if (c.command == "hausdorff") return cmd_hausdorff(c);
    if (c.command == "path-search") return cmd_path_search(c);
    if (c.command == "isolate") return cmd_isolate(c);
    if (c.command == "simulate") return cmd_simulate(c);
    if (c.command == "prop1") return cmd_prop1(c);
    if (c.command == "ensembles") return cmd_ensembles(c);
    throw UsageError("unknown command " + c.command);
}

inline void add_common(CLI::App *s, RunConfig &c) {
    s->add_option("--seed", c.seed, "Master seed");
    s->add_option("--out", c.out, "Write the report to this file instead of stdout");
    s->add_option("--threads", c.threads, "Worker threads (0 = all cores); results do not depend on it");
    s->add_flag("--timing", c.timing, "Add wall-clock timing to the report (breaks byte-identity)");
    s->add_option("--tol-membership", c.tol_membership, "Zonotope membership residual tolerance");
    s->add_option("--tol-product", c.tol_product, "Product residual tolerance");
    s->add_option("--tol-psd", c.tol_psd, "PSD eigenvalue tolerance");
    s->add_option("--tol-completeness", c.tol_completeness, "Completeness tolerance");
    s->add_option("--tol-endpoint", c.tol_endpoint, "Relative path endpoint tolerance");
    s->add_option("--tol-on-segment", c.tol_on_segment, "Absolute on-segment tolerance");
    s->add_option("--tol-lipschitz", c.tol_lipschitz, "Lipschitz equality tolerance");
}

} // namespace detail

/**
 * @brief Runs one CLI invocation. args excludes the program name. The
 * report goes to `out` (or --out), diagnostics to `err`.
 */
inline int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err) {
    RunConfig c;
    CLI::App app{"Geometry of LOCC-implementable measurements: zonotopes, product paths, protocol trees",
                 kToolName};
    app.require_subcommand(1);
    app.set_version_flag("--version", kToolVersion);

    auto sub = [&](const char *name, const char *desc) {
        CLI::App *s = app.add_subcommand(name, desc);
        detail::add_common(s, c);
        return s;
    };
    CLI::App *validate_cmd = sub("validate", "Check PSD and completeness of a POVM");
    validate_cmd->add_option("--povm", c.povm, "POVM file or builtin:<name>")->required();

    CLI::App *weights_cmd = sub("weights", "Nonnegative completeness weights over candidate operators");
    weights_cmd->add_option("--povm", c.povm, "Candidate operators (POVM or ensemble builtin, or file)");
    weights_cmd->add_option("--ensemble", c.ensemble, "Candidate states (ensemble file or builtin)");

    CLI::App *member_cmd = sub("member", "Zonotope membership of an operator");
    member_cmd->add_option("--povm", c.povm, "POVM generating the zonotope")->required();
    member_cmd->add_option("--operator", c.op, "Operator JSON file");
    member_cmd->add_option("--target", c.target, "Use a multiple of this outcome");
    member_cmd->add_option("--scale", c.scale, "Multiple of --target");
    member_cmd->add_option("--coefficients", c.coefficients, "Comma-separated combination of outcomes");

    CLI::App *hausdorff_cmd = sub("hausdorff", "Hausdorff distance between two measurement zonotopes");
    hausdorff_cmd->add_option("--povm", c.povm, "First POVM")->required();
    hausdorff_cmd->add_option("--other", c.other, "Second POVM")->required();
    hausdorff_cmd->add_option("--norm", c.norm, "trace or frobenius");
    hausdorff_cmd->add_option("--method", c.method, "vertex or sampled");
    hausdorff_cmd->add_option("--samples", c.samples, "Random points (sampled method)");

    CLI::App *path_cmd = sub("path-search", "Monotone product path from I toward an outcome");
    path_cmd->add_option("--povm", c.povm, "POVM")->required();
    path_cmd->add_option("--target", c.target, "Outcome label or index, or all");
    path_cmd->add_option("--restarts", c.restarts, "Perturbed restarts");
    path_cmd->add_option("--s-step", c.s_step, "Trace decrement per step (0 = D/200)");
    path_cmd->add_option("--max-relative-jump", c.max_relative_jump,
                         "Largest per-step change of relative distance to the target ray");
    path_cmd->add_flag("--emit-path", c.emit_path, "Include every path sample");

    CLI::App *isolate_cmd = sub("isolate", "Probe products of the zonotope near an outcome ray");
    isolate_cmd->add_option("--povm", c.povm, "POVM")->required();
    isolate_cmd->add_option("--target", c.target, "Outcome label or index, or all")->required();
    isolate_cmd->add_option("--epsilon", c.epsilon, "Relative trace-norm radius");
    isolate_cmd->add_option("--samples", c.samples, "Random product samples");
    isolate_cmd->add_option("--grid-step", c.grid_step, "Coefficient grid spacing (0 = no grid)");
    isolate_cmd->add_option("--ap-seeds", c.ap_seeds, "Local searches (0 = max(64, samples/1000))");
    isolate_cmd->add_option("--max-stored-hits", c.max_stored_hits, "On-segment hits kept in the report");

    CLI::App *sim_cmd = sub("simulate", "Random or loaded LOCC tree: node consistency, branch paths, nesting");
    sim_cmd->add_option("--space", c.space, "Party dimensions, e.g. 2,2");
    sim_cmd->add_option("--rounds", c.rounds, "Measurement rounds");
    sim_cmd->add_option("--branching", c.branching, "Outcomes per local measurement");
    sim_cmd->add_option("--tree", c.tree, "Tree JSON file instead of a random protocol");
    sim_cmd->add_option("--samples-per-segment", c.samples_per_segment, "Branch path resolution");
    sim_cmd->add_flag("--emit-tree", c.emit_tree, "Include the tree in the report");

    CLI::App *prop1_cmd = sub("prop1", "Normalized-path certificate along found product paths");
    prop1_cmd->add_option("--povm", c.povm, "POVM")->required();
    prop1_cmd->add_option("--ensemble", c.ensemble, "States to discriminate")->required();
    prop1_cmd->add_option("--target", c.target, "Outcome label or index, or all");
    prop1_cmd->add_option("--restarts", c.restarts, "Perturbed restarts");
    prop1_cmd->add_option("--s-step", c.s_step, "Trace decrement per step (0 = D/200)");
    prop1_cmd->add_flag("--emit-sweep", c.emit_sweep, "Include every certificate sample");

    CLI::App *ens_cmd = sub("ensembles", "List builtins or analyse one ensemble");
    ens_cmd->add_option("--name", c.name, "Builtin name");
    ens_cmd->add_option("--ensemble", c.ensemble, "Ensemble file or builtin");
    ens_cmd->add_option("--povm", c.povm, "Also report the discrimination partition of this POVM");

    std::vector<std::string> rev(args.rbegin(), args.rend());
    try {
        app.parse(rev);
    } catch (const CLI::CallForHelp &) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp &) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::CallForVersion &) {
        out << kToolVersion << "\n";
        return kExitOk;
    } catch (const CLI::ParseError &e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    for (CLI::App *s : app.get_subcommands()) {
        c.command = s->get_name();
    }

    try {
        const auto t0 = std::chrono::steady_clock::now();
        detail::Outcome o = detail::dispatch(c);
        const auto t1 = std::chrono::steady_clock::now();
        o.config["command"] = c.command;
        o.config["inputs"] = detail::inputs_json(c);
        io::Json report{{"tool", kToolName},
                        {"version", kToolVersion},
                        {"command", c.command},
                        {"config", std::move(o.config)},
                        {"result", std::move(o.result)}};
        if (c.timing) {
            report["timing"] = io::Json{{"seconds", std::chrono::duration<double>(t1 - t0).count()}};
        }
        const std::string text = report.dump(2) + "\n";
        if (!c.out.empty()) {
            std::ofstream f(c.out);
            if (!f) {
                err << "error: cannot write " << c.out << "\n";
                return kExitMissingFile;
            }
            f << text;
        } else {
            out << text;
        }
        return kExitOk;
    } catch (const UsageError &e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const PathTargetError &e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const io::MalformedInputError &e) {
        err << "error: malformed input: " << e.what() << "\n";
        return kExitMalformedJson;
    } catch (const io::Json::exception &e) {
        err << "error: malformed input: " << e.what() << "\n";
        return kExitMalformedJson;
    } catch (const io::MissingFileError &e) {
        err << "error: " << e.what() << "\n";
        return kExitMissingFile;
    } catch (const HermiticityError &e) {
        err << "error: malformed input: " << e.what() << "\n";
        return kExitMalformedJson;
    } catch (const DimensionError &e) {
        err << "error: dimension mismatch: " << e.what() << "\n";
        return kExitDimensionMismatch;
    } catch (const UnknownBuiltinError &e) {
        err << "error: " << e.what() << "\n";
        return kExitUnknownBuiltin;
    } catch (const std::exception &e) {
        err << "error: " << e.what() << "\n";
        return kExitInternal;
    }
}

inline int run(int argc, const char *const *argv, std::ostream &out = std::cout,
               std::ostream &err = std::cerr) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) {
        args.emplace_back(argv[i]);
    }
    return run(args, out, err);
}

} // namespace locc::cli
