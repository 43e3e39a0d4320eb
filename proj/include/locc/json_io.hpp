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
 * @file json_io.hpp
 * @brief JSON reading of POVMs, ensembles, operators and protocol trees, and
 * JSON serialization of analysis reports.
 *
 * Complex matrices are written as {"re": [[...]], "im": [[...]]}; on input a
 * plain nested array of reals is accepted too, and "im" may be omitted.
 * Non-finite numbers are written as null. Object keys are emitted sorted.
 */
#pragma once

#include <cmath>
#include <fstream>
#include <functional>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "locc/ensembles.hpp"
#include "locc/locc_tree.hpp"
#include "locc/product_path.hpp"

namespace locc::io {

using Json = nlohmann::json;

/// Input that parses as JSON but does not have the expected shape (or does not parse).
class MalformedInputError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

class MissingFileError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Primitive conversions
// ---------------------------------------------------------------------------

/// Finite values as numbers (negative zero folded to zero), others as null.
inline Json number(double v) {
    if (!std::isfinite(v)) {
        return Json(nullptr);
    }
    return Json(v == 0.0 ? 0.0 : v);
}

inline Json numbers(const std::vector<double> &v) {
    Json a = Json::array();
    for (double x : v) {
        a.push_back(number(x));
    }
    return a;
}

inline Json numbers(const RealVector &v) {
    Json a = Json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        a.push_back(number(v(i)));
    }
    return a;
}

inline Json matrix_json(const Matrix &m) {
    Json re = Json::array();
    Json im = Json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        Json rr = Json::array();
        Json ir = Json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            rr.push_back(number(m(i, j).real()));
            ir.push_back(number(m(i, j).imag()));
        }
        re.push_back(std::move(rr));
        im.push_back(std::move(ir));
    }
    return Json{{"re", std::move(re)}, {"im", std::move(im)}};
}

inline Json vector_json(const Vector &v) {
    Json re = Json::array();
    Json im = Json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        re.push_back(number(v(i).real()));
        im.push_back(number(v(i).imag()));
    }
    return Json{{"re", std::move(re)}, {"im", std::move(im)}};
}

namespace detail {

inline double real_number(const Json &j, const std::string &what) {
    if (!j.is_number()) {
        throw MalformedInputError(what + ": expected a number");
    }
    return j.get<double>();
}

inline const Json &member(const Json &j, const std::string &key, const std::string &what) {
    if (!j.is_object() || !j.contains(key)) {
        throw MalformedInputError(what + ": missing \"" + key + "\"");
    }
    return j.at(key);
}

inline std::vector<std::vector<double>> real_rows(const Json &j, const std::string &what) {
    if (!j.is_array()) {
        throw MalformedInputError(what + ": expected an array of rows");
    }
    std::vector<std::vector<double>> rows;
    for (const auto &r : j) {
        if (!r.is_array()) {
            throw MalformedInputError(what + ": expected an array of rows");
        }
        std::vector<double> row;
        for (const auto &x : r) {
            row.push_back(real_number(x, what));
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

inline std::vector<double> real_list(const Json &j, const std::string &what) {
    if (!j.is_array()) {
        throw MalformedInputError(what + ": expected an array");
    }
    std::vector<double> out;
    for (const auto &x : j) {
        out.push_back(real_number(x, what));
    }
    return out;
}

} // namespace detail

/// Square complex matrix of size dim (checked; throws DimensionError on mismatch).
inline Matrix matrix_from_json(const Json &j, std::size_t dim, const std::string &what) {
    std::vector<std::vector<double>> re;
    std::vector<std::vector<double>> im;
    if (j.is_array()) {
        re = detail::real_rows(j, what);
    } else if (j.is_object()) {
        re = detail::real_rows(detail::member(j, "re", what), what);
        if (j.contains("im")) {
            im = detail::real_rows(j.at("im"), what);
        }
    } else {
        throw MalformedInputError(what + ": expected a matrix");
    }
    const auto d = static_cast<Eigen::Index>(dim);
    auto check = [&](const std::vector<std::vector<double>> &rows) {
        if (rows.size() != dim) {
            throw DimensionError(what + ": " + std::to_string(rows.size()) + " rows, expected " +
                                 std::to_string(dim));
        }
        for (const auto &r : rows) {
            if (r.size() != dim) {
                throw DimensionError(what + ": row of length " + std::to_string(r.size()) +
                                     ", expected " + std::to_string(dim));
            }
        }
    };
    check(re);
    if (!im.empty()) {
        check(im);
    }
    Matrix m(d, d);
    for (Eigen::Index a = 0; a < d; ++a) {
        for (Eigen::Index b = 0; b < d; ++b) {
            const auto ua = static_cast<std::size_t>(a);
            const auto ub = static_cast<std::size_t>(b);
            m(a, b) = Complex(re[ua][ub], im.empty() ? 0.0 : im[ua][ub]);
        }
    }
    return m;
}

inline Vector vector_from_json(const Json &j, std::size_t dim, const std::string &what) {
    std::vector<double> re;
    std::vector<double> im;
    if (j.is_array()) {
        re = detail::real_list(j, what);
    } else if (j.is_object()) {
        re = detail::real_list(detail::member(j, "re", what), what);
        if (j.contains("im")) {
            im = detail::real_list(j.at("im"), what);
        }
    } else {
        throw MalformedInputError(what + ": expected a vector");
    }
    if (re.size() != dim || (!im.empty() && im.size() != dim)) {
        throw DimensionError(what + ": vector of length " + std::to_string(re.size()) +
                             ", expected " + std::to_string(dim));
    }
    Vector v(static_cast<Eigen::Index>(dim));
    for (std::size_t i = 0; i < dim; ++i) {
        v(static_cast<Eigen::Index>(i)) = Complex(re[i], im.empty() ? 0.0 : im[i]);
    }
    if (v.norm() == 0.0) {
        throw MalformedInputError(what + ": zero vector");
    }
    return v;
}

inline PartitionedSpace space_from_json(const Json &j) {
    const Json &p = detail::member(j, "parties", "space");
    if (!p.is_array()) {
        throw MalformedInputError("space: \"parties\" must be an array of dimensions");
    }
    std::vector<std::size_t> dims;
    for (const auto &d : p) {
        if (!d.is_number_integer() || d.get<long long>() < 0) {
            throw MalformedInputError("space: party dimensions must be nonnegative integers");
        }
        dims.push_back(d.get<std::size_t>());
    }
    return PartitionedSpace(std::move(dims));
}

inline Json space_json(const PartitionedSpace &s) { return Json{{"parties", s.dims()}}; }

// ---------------------------------------------------------------------------
// POVMs, ensembles, operators
// ---------------------------------------------------------------------------

/**
 * @brief {"parties": [...], "elements": [{"label"?, "matrix": M} |
 * {"label"?, "vector": v, "weight"?}]}; a vector element is weight * |v><v|/<v|v>.
 */
inline Povm povm_from_json(const Json &j) {
    const PartitionedSpace space = space_from_json(j);
    const Json &els = detail::member(j, "elements", "povm");
    if (!els.is_array() || els.empty()) {
        throw MalformedInputError("povm: \"elements\" must be a nonempty array");
    }
    std::vector<HermitianOperator> ops;
    std::vector<std::string> labels;
    bool labelled = false;
    for (std::size_t k = 0; k < els.size(); ++k) {
        const Json &e = els[k];
        const std::string what = "povm element " + std::to_string(k);
        if (!e.is_object()) {
            throw MalformedInputError(what + ": expected an object");
        }
        if (e.contains("matrix")) {
            ops.emplace_back(space, matrix_from_json(e.at("matrix"), space.dim(), what));
        } else if (e.contains("vector")) {
            HermitianOperator p =
                HermitianOperator::projector(space, vector_from_json(e.at("vector"), space.dim(), what));
            if (e.contains("weight")) {
                p *= detail::real_number(e.at("weight"), what);
            }
            ops.push_back(std::move(p));
        } else {
            throw MalformedInputError(what + ": needs \"matrix\" or \"vector\"");
        }
        if (e.contains("label")) {
            if (!e.at("label").is_string()) {
                throw MalformedInputError(what + ": label must be a string");
            }
            labelled = true;
            labels.push_back(e.at("label").get<std::string>());
        } else {
            labels.push_back(std::to_string(k));
        }
    }
    return {space, std::move(ops), labelled ? std::move(labels) : std::vector<std::string>{}};
}

inline Json povm_json(const Povm &p) {
    Json els = Json::array();
    for (std::size_t j = 0; j < p.size(); ++j) {
        els.push_back(Json{{"label", p.label(j)}, {"matrix", matrix_json(p[j].matrix())}});
    }
    return Json{{"parties", p.space().dims()}, {"elements", std::move(els)}};
}

/// {"parties": [...], "states": [{"name"?, "vector": v} | {"name"?, "matrix": rho}]}.
inline Ensemble ensemble_from_json(const Json &j) {
    const PartitionedSpace space = space_from_json(j);
    const Json &st = detail::member(j, "states", "ensemble");
    if (!st.is_array() || st.empty()) {
        throw MalformedInputError("ensemble: \"states\" must be a nonempty array");
    }
    std::vector<HermitianOperator> states;
    std::vector<std::string> names;
    std::vector<Vector> vectors;
    bool all_pure = true;
    bool named = false;
    for (std::size_t k = 0; k < st.size(); ++k) {
        const Json &e = st[k];
        const std::string what = "ensemble state " + std::to_string(k);
        if (!e.is_object()) {
            throw MalformedInputError(what + ": expected an object");
        }
        if (e.contains("vector")) {
            const Vector v = vector_from_json(e.at("vector"), space.dim(), what);
            states.push_back(HermitianOperator::projector(space, v));
            vectors.push_back(v / v.norm());
        } else if (e.contains("matrix")) {
            states.emplace_back(space, matrix_from_json(e.at("matrix"), space.dim(), what));
            all_pure = false;
        } else {
            throw MalformedInputError(what + ": needs \"vector\" or \"matrix\"");
        }
        if (e.contains("name")) {
            if (!e.at("name").is_string()) {
                throw MalformedInputError(what + ": name must be a string");
            }
            named = true;
            names.push_back(e.at("name").get<std::string>());
        } else {
            names.push_back(std::to_string(k));
        }
    }
    return {space, std::move(states), named ? std::move(names) : std::vector<std::string>{},
            all_pure ? std::move(vectors) : std::vector<Vector>{}};
}

inline Json ensemble_json(const Ensemble &e) {
    Json st = Json::array();
    for (std::size_t m = 0; m < e.size(); ++m) {
        Json s{{"name", e.name(m)}};
        if (!e.vectors().empty()) {
            s["vector"] = vector_json(e.vectors()[m]);
        } else {
            s["matrix"] = matrix_json(e.states()[m].matrix());
        }
        st.push_back(std::move(s));
    }
    return Json{{"parties", e.space().dims()}, {"states", std::move(st)}};
}

/// {"parties": [...], "matrix": M} or a bare matrix on `space`.
inline HermitianOperator operator_from_json(const Json &j, const PartitionedSpace &space) {
    if (j.is_object() && j.contains("parties")) {
        const PartitionedSpace s = space_from_json(j);
        if (!(s == space)) {
            throw DimensionError("operator lives on " + s.to_string() + ", expected " +
                                 space.to_string());
        }
        return {space, matrix_from_json(detail::member(j, "matrix", "operator"), space.dim(),
                                        "operator")};
    }
    return {space, matrix_from_json(j, space.dim(), "operator")};
}

// ---------------------------------------------------------------------------
// Protocol trees: nested {"party": p | null, "local_ops": [...], "children": [...]}
// ---------------------------------------------------------------------------

inline Json tree_json(const LoccTree &tree) {
    std::function<Json(std::size_t)> node = [&](std::size_t i) {
        const auto &n = tree.node(i);
        Json ops = Json::array();
        for (const auto &m : n.local_ops) {
            ops.push_back(matrix_json(m));
        }
        Json kids = Json::array();
        for (std::size_t c : n.children) {
            kids.push_back(node(c));
        }
        return Json{{"party", n.acting_party ? Json(*n.acting_party) : Json(nullptr)},
                    {"label", n.label},
                    {"local_ops", std::move(ops)},
                    {"children", std::move(kids)}};
    };
    return Json{{"parties", tree.space().dims()}, {"root", node(0)}};
}

/**
 * @brief Rebuilds a tree from JSON. Children of one node must share an acting
 * party; their local factors are attached verbatim (and must sum to the
 * parent's factor), so a dumped tree reloads exactly.
 */
inline LoccTree tree_from_json(const Json &j) {
    const PartitionedSpace space = space_from_json(j);
    LoccTree tree(space);
    const Json &root = detail::member(j, "root", "tree");
    std::function<void(const Json &, std::size_t)> grow = [&](const Json &n, std::size_t id) {
        if (!n.is_object()) {
            throw MalformedInputError("tree: node must be an object");
        }
        if (!n.contains("children")) {
            return;
        }
        const Json &kids = n.at("children");
        if (!kids.is_array()) {
            throw MalformedInputError("tree: \"children\" must be an array");
        }
        if (kids.empty()) {
            return;
        }
        std::optional<std::size_t> party;
        std::vector<Matrix> factors;
        for (const auto &c : kids) {
            const Json &p = detail::member(c, "party", "tree child");
            if (!p.is_number_integer() || p.get<long long>() < 0) {
                throw MalformedInputError("tree: child \"party\" must be a party index");
            }
            const auto q = p.get<std::size_t>();
            if (party && *party != q) {
                throw MalformedInputError("tree: siblings must share one acting party");
            }
            if (q >= space.parties()) {
                throw DimensionError("tree: party " + std::to_string(q) + " out of range");
            }
            party = q;
            const Json &ops = detail::member(c, "local_ops", "tree child");
            if (!ops.is_array() || ops.size() != space.parties()) {
                throw DimensionError("tree: a node needs one local operator per party");
            }
            factors.push_back(matrix_from_json(ops[q], space.party_dim(q), "tree local operator"));
        }
        const auto ids = tree.add_children(id, *party, factors);
        for (std::size_t k = 0; k < ids.size(); ++k) {
            grow(kids[k], ids[k]);
        }
    };
    grow(root, 0);
    return tree;
}

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

inline Json report_json(const ValidationReport &r) {
    return Json{{"psd_margins", numbers(r.psd_margins)},
                {"completeness_residual", number(r.completeness_residual)},
                {"max_entry_deviation", number(r.max_entry_deviation)},
                {"psd_tol", number(r.psd_tol)},
                {"completeness_tol", number(r.completeness_tol)},
                {"all_psd", r.all_psd},
                {"complete", r.complete},
                {"valid", r.valid()}};
}

inline Json report_json(const WeightSolution &w, const std::vector<std::string> &labels) {
    Json iv = Json::array();
    for (std::size_t k = 0; k < w.intervals.size(); ++k) {
        iv.push_back(Json{{"label", labels.at(k)},
                          {"min", number(w.intervals[k].min)},
                          {"max", number(w.intervals[k].max)},
                          {"forced_zero", w.forced_zero(k)}});
    }
    return Json{{"feasible", w.feasible},
                {"weights", numbers(w.weights)},
                {"intervals", std::move(iv)},
                {"residual", number(w.residual)}};
}

inline Json report_json(const MembershipResult &m, double tol) {
    return Json{{"feasible", m.feasible},
                {"residual", number(m.residual)},
                {"coefficients", numbers(m.coefficients)},
                {"tol", number(tol)}};
}

inline Json report_json(const DirectedDistance &d) {
    return Json{{"value", number(d.value)},
                {"frobenius", number(d.frobenius)},
                {"trace_upper_bound", number(d.trace_upper_bound)},
                {"certified", d.certified},
                {"points_examined", d.points_examined}};
}

inline Json report_json(const HausdorffReport &h) {
    return Json{{"hausdorff", number(h.hausdorff)},
                {"d12", report_json(h.d12)},
                {"d21", report_json(h.d21)},
                {"norm", to_string(h.norm)},
                {"method", to_string(h.method)},
                {"certified", h.certified}};
}

inline Json indices_json(const std::vector<std::size_t> &v) { return Json(v); }

inline Json report_json(const PathReport &r) {
    Json j{{"points", r.points},
           {"psd_failures", indices_json(r.psd_failures)},
           {"product_failures", indices_json(r.product_failures)},
           {"membership_failures", indices_json(r.membership_failures)},
           {"monotone_failures", indices_json(r.monotone_failures)},
           {"step_failures", indices_json(r.step_failures)},
           {"lipschitz_failures", indices_json(r.lipschitz_failures)},
           {"relative_jump_failures", indices_json(r.relative_jump_failures)},
           {"min_eigenvalue", number(r.min_eigenvalue)},
           {"max_product_residual", number(r.max_product_residual)},
           {"max_membership_residual", number(r.max_membership_residual)},
           {"max_step", number(r.max_step)},
           {"max_lipschitz_gap", number(r.max_lipschitz_gap)},
           {"max_relative_jump", number(r.max_relative_jump)},
           {"endpoint_checked", r.endpoint_checked},
           {"endpoint_ok", r.endpoint_ok},
           {"endpoint_relative_distance", number(r.endpoint_relative_distance)},
           {"endpoint_scale", number(r.endpoint_scale)},
           {"passed", r.passed()}};
    return j;
}

/// Path samples: trace parameter, operator, and factors when known.
inline Json path_points_json(const OperatorPath &p) {
    Json pts = Json::array();
    for (const auto &pt : p.points) {
        Json f = Json::array();
        for (const auto &m : pt.factors) {
            f.push_back(matrix_json(m));
        }
        pts.push_back(Json{{"s", number(pt.s)},
                           {"operator", matrix_json(pt.op.matrix())},
                           {"coefficients", numbers(pt.coefficients)},
                           {"factors", std::move(f)},
                           {"acting_party", pt.has_acting_party ? Json(pt.acting_party)
                                                                : Json(nullptr)}});
    }
    return pts;
}

/// Compact description of a path: trace range, length and where the acting party switches.
inline Json path_summary_json(const OperatorPath &p) {
    Json switches = Json::array();
    std::optional<std::size_t> last;
    for (std::size_t i = 0; i < p.points.size(); ++i) {
        const auto &pt = p.points[i];
        if (!pt.has_acting_party) {
            continue;
        }
        if (last && *last != pt.acting_party) {
            switches.push_back(Json{{"index", i}, {"s", number(pt.s)}, {"party", pt.acting_party}});
        }
        last = pt.acting_party;
    }
    return Json{{"points", p.points.size()},
                {"s_start", number(p.points.empty() ? 0.0 : p.points.front().s)},
                {"s_end", number(p.points.empty() ? 0.0 : p.points.back().s)},
                {"endpoint_scale", number(p.endpoint_scale)},
                {"party_switches", std::move(switches)}};
}

inline Json report_json(const ObstructionReport &o) {
    return Json{{"target_index", o.target_index},
                {"target_label", o.target_label},
                {"lowest_s_per_restart", numbers(o.lowest_s_per_restart)},
                {"best_relative_distance_per_restart", numbers(o.best_relative_distance_per_restart)},
                {"stall_neighborhood_hits", o.stall_neighborhood_hits},
                {"stall_samples", o.stall_samples},
                {"stall_radius", number(o.stall_radius)},
                {"heuristic", o.heuristic}};
}

inline Json report_json(const PathSearchResult &r, bool emit_points) {
    Json j{{"found", r.found}, {"restarts_used", r.restarts_used}};
    if (r.found) {
        j["path"] = path_summary_json(r.path);
        j["verification"] = report_json(r.verification);
        if (emit_points) {
            j["path"]["samples"] = path_points_json(r.path);
        }
    } else {
        j["obstruction"] = report_json(r.obstruction);
    }
    return j;
}

inline Json report_json(const IsolationHit &h) {
    return Json{{"operator", matrix_json(h.op.matrix())},
                {"coefficients", numbers(h.coefficients)},
                {"product_residual", number(h.product_residual)},
                {"membership_residual", number(h.membership_residual)},
                {"segment_distance", number(h.segment_distance)},
                {"relative_distance", number(h.relative_distance)},
                {"q", number(h.q)},
                {"on_segment", h.on_segment},
                {"source", h.source}};
}

inline Json report_json(const IsolationProbeReport &r) {
    Json hits = Json::array();
    for (const auto &h : r.hits) {
        hits.push_back(report_json(h));
    }
    return Json{{"target_index", r.target_index},
                {"target_label", r.target_label},
                {"epsilon", number(r.epsilon)},
                {"random_samples", r.random_samples},
                {"local_seeds", r.local_seeds},
                {"grid_points", r.grid_points},
                {"samples_tested", r.samples_tested},
                {"hit_count", r.hit_count},
                {"on_segment_hits", r.on_segment_hits},
                {"off_segment_hits", r.off_segment_hits},
                {"max_on_segment_distance", number(r.max_on_segment_distance)},
                {"hits", std::move(hits)},
                {"all_hits_on_segment", r.all_hits_on_segment}};
}

inline Json report_json(const Lemma4Report &r) {
    return Json{{"max_residual", number(r.max_residual)},
                {"max_children_residual", number(r.max_children_residual)},
                {"max_factor_residual", number(r.max_factor_residual)},
                {"local_violations", r.local_violations},
                {"root_is_identity", r.root_is_identity},
                {"tol", number(r.tol)},
                {"passed", r.passed()}};
}

inline Json report_json(const NestingReport &r) {
    return Json{{"nested", r.nested},
                {"max_residual", number(r.max_residual)},
                {"vertices_checked", r.vertices_checked},
                {"exhaustive", r.exhaustive}};
}

inline Json report_json(const Prop1Certificate &c, bool emit_sweep) {
    Json j{{"states", c.states},
           {"samples", c.sweep.size()},
           {"normalized", c.normalized},
           {"orthogonal", c.orthogonal},
           {"product", c.product},
           {"psd", c.psd},
           {"f_start_ok", c.f_start_ok},
           {"f_end_ok", c.f_end_ok},
           {"continuous", c.continuous},
           {"f_start", number(c.f_start)},
           {"f_end", number(c.f_end)},
           {"max_f_gap", number(c.max_f_gap)},
           {"max_cross_overlap", number(c.max_cross_overlap)},
           {"max_product_residual", number(c.max_product_residual)},
           {"passed", c.passed()}};
    if (emit_sweep) {
        Json sw = Json::array();
        for (const auto &s : c.sweep) {
            sw.push_back(Json{{"s", number(s.s)},
                              {"f", number(s.f)},
                              {"normalization", number(s.normalization)},
                              {"max_cross_overlap", number(s.max_cross_overlap)},
                              {"product_residual", number(s.product_residual)},
                              {"min_eigenvalue", number(s.min_eigenvalue)}});
        }
        j["sweep"] = std::move(sw);
    }
    return j;
}

inline Json report_json(const KernelProductResult &r) {
    Json f = Json::array();
    for (const auto &v : r.factors) {
        f.push_back(vector_json(v));
    }
    return Json{{"kernel_dimension", r.kernel_dimension},
                {"found", r.found},
                {"residual", number(r.residual)},
                {"starts", r.starts},
                {"factors", std::move(f)}};
}

inline Json report_json(const DiscriminationPartition &p, const Povm &povm, const Ensemble &e) {
    Json sets = Json::object();
    for (std::size_t m = 0; m < p.sets.size(); ++m) {
        Json s = Json::array();
        for (std::size_t j : p.sets[m]) {
            s.push_back(povm.label(j));
        }
        sets[e.name(m)] = std::move(s);
    }
    Json j{{"ok", p.ok}, {"sets", std::move(sets)}};
    if (p.conflict) {
        j["conflict"] = Json{{"outcome", povm.label(p.conflict->outcome)},
                             {"first", e.name(p.conflict->first)},
                             {"second", e.name(p.conflict->second)}};
    }
    return j;
}

// ---------------------------------------------------------------------------
// Files
// ---------------------------------------------------------------------------

inline Json read_json_file(const std::string &path) {
    std::ifstream in(path);
    if (!in) {
        throw MissingFileError("cannot open " + path);
    }
    std::stringstream ss;
    ss << in.rdbuf();
    try {
        return Json::parse(ss.str());
    } catch (const Json::parse_error &e) {
        throw MalformedInputError(path + ": " + e.what());
    }
}

} // namespace locc::io
