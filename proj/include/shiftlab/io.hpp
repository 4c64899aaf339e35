#pragma once

/**
 * @file io.hpp
 * @brief JSON and CSV forms of vectors, configuration blocks and reports.
 *
 * Config readers raise ConfigError with a JSON-pointer style path, e.g.
 * "config /operator/weights/1/w: weight must be a positive number".
 */

#include <cmath>
#include <cstdio>
#include <optional>
#include <regex>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "constructor.hpp"
#include "criteria.hpp"
#include "errors.hpp"
#include "orbitlab.hpp"
#include "seqspace.hpp"
#include "shiftops.hpp"
#include "subspace.hpp"

namespace shiftlab::io {

using nlohmann::json;

[[noreturn]] inline void fail(const std::string& path, const std::string& what) {
    throw ConfigError("config " + (path.empty() ? std::string("/") : path) + ": " + what);
}

inline const json& require(const json& j, const std::string& key, const std::string& path) {
    if (!j.is_object() || !j.contains(key)) {
        fail(path + "/" + key, "missing field");
    }
    return j.at(key);
}

template <class T>
T read(const json& j, const std::string& path) {
    try {
        return j.get<T>();
    } catch (const json::exception&) {
        if constexpr (std::is_same_v<T, bool>) {
            fail(path, "expected a boolean");
        } else if constexpr (std::is_arithmetic_v<T>) {
            fail(path, "expected a number");
        } else {
            fail(path, "unexpected type");
        }
    }
}

template <class T>
T read_or(const json& j, const std::string& key, T fallback, const std::string& path) {
    if (!j.is_object() || !j.contains(key)) {
        return fallback;
    }
    return read<T>(j.at(key), path + "/" + key);
}

// ---------------------------------------------------------------------------
// Scalars and vectors

inline json to_json(Scalar z) { return json::array({z.real(), z.imag()}); }

/// [re, im] or a bare real number.
inline Scalar scalar_from_json(const json& j, const std::string& path) {
    if (j.is_number()) {
        return {j.get<double>(), 0.0};
    }
    if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number()) {
        return {j[0].get<double>(), j[1].get<double>()};
    }
    fail(path, "expected a number or [re, im]");
}

inline json to_json(const LatticeVector& v) {
    json coeffs = json::array();
    for (const Scalar c : v.coeffs()) {
        coeffs.push_back(to_json(c));
    }
    json out{{"lo", v.lo()}, {"coeffs", coeffs}};
    if (v.one_sided()) {
        out["one_sided"] = true;
    }
    return out;
}

/// {"lo": int, "coeffs": [[re, im], ...], "one_sided": bool (optional)}
inline LatticeVector vector_from_json(const json& j, const std::string& path) {
    const Index lo = read<Index>(require(j, "lo", path), path + "/lo");
    const json& cs = require(j, "coeffs", path);
    if (!cs.is_array() || cs.empty()) {
        fail(path + "/coeffs", "expected a non-empty array");
    }
    std::vector<Scalar> coeffs;
    for (std::size_t i = 0; i < cs.size(); ++i) {
        coeffs.push_back(scalar_from_json(cs[i], path + "/coeffs/" + std::to_string(i)));
    }
    try {
        return LatticeVector(lo, std::move(coeffs), read_or<bool>(j, "one_sided", false, path));
    } catch (const DomainError& e) {
        fail(path, e.what());
    }
}

inline json to_json(Window w) { return json{{"lo", w.lo}, {"hi", w.hi}}; }

// ---------------------------------------------------------------------------
// Weight rules

inline std::string describe(const Predicate& p) {
    struct Visitor {
        std::string operator()(const AtLeast& a) const { return "n>=" + std::to_string(a.bound); }
        std::string operator()(const Below& b) const { return "n<" + std::to_string(b.bound); }
        std::string operator()(const InRange& r) const {
            return "range [" + std::to_string(r.first) + "," + std::to_string(r.last) + "]";
        }
        std::string operator()(const Residue& r) const {
            std::string s = "mod " + std::to_string(r.modulus) + " in [";
            for (std::size_t i = 0; i < r.residues.size(); ++i) {
                s += (i ? "," : "") + std::to_string(r.residues[i]);
            }
            return s + "]";
        }
        std::string operator()(const Listed& l) const {
            std::string s = "in [";
            for (std::size_t i = 0; i < l.indices.size(); ++i) {
                s += (i ? "," : "") + std::to_string(l.indices[i]);
            }
            return s + "]";
        }
        std::string operator()(const Otherwise&) const { return "default"; }
    };
    return std::visit(Visitor{}, p);
}

namespace detail {

inline std::vector<Index> parse_index_list(const std::string& body, const std::string& path) {
    std::vector<Index> out;
    std::stringstream ss(body);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto first = item.find_first_not_of(" \t");
        if (first == std::string::npos) {
            continue;
        }
        try {
            std::size_t used = 0;
            out.push_back(std::stoll(item.substr(first), &used));
        } catch (const std::exception&) {
            fail(path, "bad integer '" + item + "'");
        }
    }
    return out;
}

} // namespace detail

/// Parses "n>=c", "n<c", "range [a,b]", "mod q in [r,...]", "in [i,...]", "default".
inline Predicate predicate_from_string(const std::string& text, const std::string& path) {
    static const std::regex ge(R"(^\s*<?n>?\s*>=\s*(-?\d+)\s*$)");
    static const std::regex lt(R"(^\s*<?n>?\s*<\s*(-?\d+)\s*$)");
    static const std::regex range(R"(^\s*range\s*\[\s*(-?\d+)\s*,\s*(-?\d+)\s*\]\s*$)");
    static const std::regex mod(R"(^\s*mod\s+(\d+)\s+in\s*\[([^\]]*)\]\s*$)");
    static const std::regex listed(R"(^\s*in\s*\[([^\]]*)\]\s*$)");
    std::smatch m;
    if (std::regex_match(text, m, ge)) {
        return AtLeast{std::stoll(m[1])};
    }
    if (std::regex_match(text, m, lt)) {
        return Below{std::stoll(m[1])};
    }
    if (std::regex_match(text, m, range)) {
        const Index a = std::stoll(m[1]);
        const Index b = std::stoll(m[2]);
        if (a > b) {
            fail(path, "empty range '" + text + "'");
        }
        return InRange{a, b};
    }
    if (std::regex_match(text, m, mod)) {
        const Index q = std::stoll(m[1]);
        if (q < 1) {
            fail(path, "modulus must be >= 1");
        }
        auto residues = detail::parse_index_list(m[2], path);
        for (auto& r : residues) {
            r = floor_mod(r, q);
        }
        return Residue{q, residues};
    }
    if (std::regex_match(text, m, listed)) {
        return Listed{detail::parse_index_list(m[1], path)};
    }
    if (std::regex_match(text, std::regex(R"(^\s*default\s*$)"))) {
        return Otherwise{};
    }
    fail(path, "unrecognized weight predicate '" + text + "'");
}

/// List of {"if": predicate, "w": positive number}; the last rule must be "default".
inline WeightSequence weights_from_json(const json& j, const std::string& path) {
    if (!j.is_array() || j.empty()) {
        fail(path, "expected a non-empty list of weight rules");
    }
    std::vector<WeightRule> rules;
    for (std::size_t i = 0; i < j.size(); ++i) {
        const std::string p = path + "/" + std::to_string(i);
        const auto text = read<std::string>(require(j[i], "if", p), p + "/if");
        const double w = read<double>(require(j[i], "w", p), p + "/w");
        if (!(w > 0.0) || !std::isfinite(w)) {
            fail(p + "/w", "weight must be a positive number");
        }
        rules.push_back({predicate_from_string(text, p + "/if"), w});
    }
    if (!std::holds_alternative<Otherwise>(rules.back().when)) {
        fail(path, "the last weight rule must be \"default\"");
    }
    return WeightSequence(std::move(rules));
}

inline json to_json(const WeightSequence& w) {
    json out = json::array();
    for (const auto& r : w.rules()) {
        out.push_back({{"if", describe(r.when)}, {"w", r.weight}});
    }
    return out;
}

/// {"direction": "forward"|"backward", "weights": [...], "invertible": bool,
///  "invertibility_floor": x, "max_power": n}
inline ShiftOperator shift_from_json(const json& j, const std::string& path) {
    const auto dir = read_or<std::string>(j, "direction", "forward", path);
    if (dir != "forward" && dir != "backward") {
        fail(path + "/direction", "expected \"forward\" or \"backward\"");
    }
    const auto floor = read_or<double>(j, "invertibility_floor", ShiftOperator::kDefaultFloor, path);
    if (!(floor > 0.0)) {
        fail(path + "/invertibility_floor", "must be positive");
    }
    const auto max_power = read_or<std::uint64_t>(j, "max_power", ShiftOperator::kDefaultMaxPower, path);
    return ShiftOperator(dir == "forward" ? Direction::forward : Direction::backward,
                         weights_from_json(require(j, "weights", path), path + "/weights"),
                         read_or<bool>(j, "invertible", true, path), floor, max_power);
}

inline json to_json(const ShiftOperator& t) {
    return json{{"direction", to_string(t.direction())},
                {"weights", to_json(t.weights())},
                {"invertible", t.invertible()},
                {"invertibility_floor", t.invertibility_floor()},
                {"max_power", t.max_power()}};
}

/// {"eigenpairs": [{"index": n, "eigenvalue": [re, im]}, ...]}
inline DiagonalOperator diagonal_from_json(const json& j, const std::string& path) {
    const json& pairs = require(j, "eigenpairs", path);
    if (!pairs.is_array()) {
        fail(path + "/eigenpairs", "expected a list");
    }
    std::vector<Eigenpair> out;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        const std::string p = path + "/eigenpairs/" + std::to_string(i);
        out.push_back({read<Index>(require(pairs[i], "index", p), p + "/index"),
                       scalar_from_json(require(pairs[i], "eigenvalue", p), p + "/eigenvalue")});
    }
    try {
        return DiagonalOperator(std::move(out));
    } catch (const DomainError& e) {
        fail(path, e.what());
    }
}

// ---------------------------------------------------------------------------
// Subspaces and schedules

/// {"mod": q, "residues": [...], "extra_indices": [...], "excluded_indices": [...], "one_sided": bool}
inline PatternSubspace subspace_from_json(const json& j, const std::string& path) {
    const auto q = read_or<Index>(j, "mod", 1, path);
    if (q < 1) {
        fail(path + "/mod", "modulus must be >= 1");
    }
    auto residues = read_or<std::vector<Index>>(j, "residues", std::vector<Index>{0}, path);
    for (auto& r : residues) {
        r = floor_mod(r, q);
    }
    try {
        return PatternSubspace(q, residues, read_or<std::vector<Index>>(j, "extra_indices", {}, path),
                               read_or<std::vector<Index>>(j, "excluded_indices", {}, path),
                               read_or<bool>(j, "one_sided", false, path));
    } catch (const ConfigError& e) {
        fail(path, e.what());
    }
}

inline json to_json(const PatternSubspace& m) {
    return json{{"mod", m.modulus()},
                {"residues", m.residues()},
                {"extra_indices", m.extra_indices()},
                {"excluded_indices", m.excluded_indices()},
                {"one_sided", m.one_sided()}};
}

/// {"a": step, "b": offset, "k_max": n} or {"explicit": [n_1, n_2, ...]}
inline PowerSchedule schedule_from_json(const json& j, const std::string& path) {
    try {
        if (j.is_object() && j.contains("explicit")) {
            return PowerSchedule(read<std::vector<std::uint64_t>>(j.at("explicit"), path + "/explicit"));
        }
        const auto a = read_or<std::int64_t>(j, "a", 1, path);
        const auto b = read_or<std::int64_t>(j, "b", 0, path);
        const auto k_max = read_or<std::int64_t>(j, "k_max", 20, path);
        if (a < 1) {
            fail(path + "/a", "step must be >= 1");
        }
        if (b < 0) {
            fail(path + "/b", "offset must be >= 0");
        }
        if (k_max < 1) {
            fail(path + "/k_max", "must be positive");
        }
        return PowerSchedule::arithmetic(static_cast<std::uint64_t>(a), static_cast<std::uint64_t>(b),
                                         static_cast<std::size_t>(k_max));
    } catch (const ConfigError& e) {
        if (std::string(e.what()).rfind("config ", 0) == 0) {
            throw;
        }
        fail(path, e.what());
    }
}

// ---------------------------------------------------------------------------
// Reports

inline json to_json(const CriterionReport& r) {
    json rows = json::array();
    for (const auto& row : r.per_k) {
        json jr{{"k", row.k}, {"n", row.n}, {"invariance", row.invariance}};
        if (!std::isnan(row.forward_product)) {
            jr["forward_product"] = row.forward_product;
        }
        if (!std::isnan(row.inverse_product)) {
            jr["inverse_product"] = row.inverse_product;
        }
        if (!row.metrics.empty()) {
            jr["metrics"] = row.metrics;
        }
        rows.push_back(jr);
    }
    json out{{"checker", r.checker},
             {"verdict", to_string(r.verdict)},
             {"per_k", rows},
             {"tolerances", r.tolerances},
             {"notes", r.notes},
             {"saturated", r.saturated}};
    if (r.invariance_violation) {
        const auto& [n, i, j] = *r.invariance_violation;
        out["invariance_violation"] = {{"n", n}, {"index", i}, {"image", j}};
    }
    return out;
}

inline json to_json(const InvarianceResult& r) {
    json out{{"pass", r.pass}, {"power", r.power}, {"checked_window", to_json(r.checked)}};
    if (r.violation) {
        out["violation"] = {{"index", r.violation->first}, {"image", r.violation->second}};
    }
    return out;
}

inline json to_json(const WitnessResult& w) {
    return json{{"p", w.p},
                {"n", w.n},
                {"z", to_json(w.z)},
                {"residual", w.residual},
                {"decay_norm", w.decay_norm},
                {"decay_bound", w.decay_bound},
                {"z_norm", w.z_norm},
                {"z_bound", w.z_bound}};
}

inline json to_json(const SpanDensity& d) {
    return json{{"window", to_json(d.window)},
                {"small", d.small_dense ? "dense-at-truncation" : "not-dense"},
                {"large", d.large_dense ? "dense-at-truncation" : "not-dense"},
                {"small_uncovered", d.small_uncovered},
                {"large_uncovered", d.large_uncovered}};
}

inline json to_json(const EigenScanReport& r) {
    json results = json::array();
    for (const auto& e : r.results) {
        json norms = json::array();
        for (const auto& n : e.norms) {
            norms.push_back({{"half_width", n.half_width}, {"l2", n.l2}, {"l1", n.l1}});
        }
        json near = json::array();
        for (const auto& [i, c] : e.near_anchor) {
            near.push_back({{"index", i}, {"coeff", to_json(c)}});
        }
        results.push_back({{"lambda", to_json(e.lambda)},
                           {"right_ratio", to_json(e.right_ratio)},
                           {"left_ratio", to_json(e.left_ratio)},
                           {"norms", norms},
                           {"verdict", to_string(e.verdict)},
                           {"l1_verdict", to_string(e.l1_verdict)},
                           {"near_anchor", near}});
    }
    return json{{"p", r.p},
                {"anchor", r.anchor},
                {"thresholds",
                 {{"growth_factor", r.thresholds.growth_factor},
                  {"sustained", r.thresholds.sustained},
                  {"stable_relative", r.thresholds.stable_relative}}},
                {"results", results},
                {"notes", r.notes}};
}

inline json to_json(const OrbitTrace& tr, const PatternSubspace& m, double tol) {
    json rows = json::array();
    for (std::size_t j = 0; j < tr.size(); ++j) {
        rows.push_back({{"power", tr.powers[j]},
                        {"norm", norm(tr.points[j])},
                        {"member", membership(tr.points[j], m, tol).member},
                        {"leakage", tr.leakage[j]},
                        {"trusted", static_cast<bool>(tr.trusted[j])}});
    }
    json out{{"base_point", to_json(tr.base_point)},
             {"points", rows},
             {"overflow", tr.overflow},
             {"leakage_tolerance", tr.leakage_tolerance}};
    if (tr.bound) {
        out["window"] = to_json(*tr.bound);
    }
    return out;
}

inline json to_json(const InclusionReport& r) {
    json rows = json::array();
    for (const auto& row : r.rows) {
        rows.push_back({{"power", row.power},
                        {"member", row.member},
                        {"projected_norm", row.projected_norm},
                        {"gap", row.gap},
                        {"holds", row.holds}});
    }
    return json{{"holds", r.holds}, {"tolerance", r.tolerance}, {"rows", rows}};
}

inline json to_json(const CoverageReport& r) {
    json hits = json::array();
    for (const auto& h : r.hits) {
        json jh{{"best_distance", h.best_distance}};
        if (h.best_power) {
            jh["best_power"] = *h.best_power;
        }
        hits.push_back(jh);
    }
    json out{{"epsilon", r.epsilon},
             {"orbit_length", r.orbit_length},
             {"projected", r.projected},
             {"targets", r.targets.size()},
             {"hits", hits},
             {"score", r.score}};
    if (r.window) {
        out["window"] = to_json(*r.window);
    }
    return out;
}

inline json to_json(const IdentityReport& r) {
    json rows = json::array();
    for (const auto& [n, d] : r.rows) {
        rows.push_back({{"power", n}, {"difference", d}});
    }
    return json{{"holds", r.holds},
                {"tolerance", r.tolerance},
                {"max_relative_difference", r.max_difference},
                {"rows", rows}};
}

inline json to_json(const BlockPlan& p) {
    json targets = json::array();
    for (const auto& t : p.targets) {
        targets.push_back(to_json(t));
    }
    json out{{"targets", targets}, {"powers", p.powers}, {"lambda", p.lambda}, {"span", p.span}};
    if (p.parity) {
        out["parity"] = {{"modulus", p.parity->modulus}, {"residue", p.parity->residue}};
    }
    return out;
}

inline BlockPlan plan_from_json(const json& j, const std::string& path) {
    BlockPlan p;
    const json& ts = require(j, "targets", path);
    for (std::size_t i = 0; i < ts.size(); ++i) {
        p.targets.push_back(vector_from_json(ts[i], path + "/targets/" + std::to_string(i)));
    }
    p.powers = read<std::vector<std::uint64_t>>(require(j, "powers", path), path + "/powers");
    p.lambda = read<double>(require(j, "lambda", path), path + "/lambda");
    p.span = read<Index>(require(j, "span", path), path + "/span");
    if (j.contains("parity")) {
        p.parity = ParityConstraint{read<Index>(require(j["parity"], "modulus", path + "/parity"), path + "/parity/modulus"),
                                    read<Index>(require(j["parity"], "residue", path + "/parity"), path + "/parity/residue")};
    }
    return p;
}

// ---------------------------------------------------------------------------
// CSV

inline std::string format_number(double x) {
    if (std::isnan(x)) {
        return "nan";
    }
    if (std::isinf(x)) {
        return x > 0 ? "inf" : "-inf";
    }
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

/// Small CSV builder: a header row and numeric rows.
class Csv {
public:
    explicit Csv(std::vector<std::string> header) : columns_(header.size()) { line(header); }

    void row(const std::vector<double>& values) {
        if (values.size() != columns_) {
            throw Error("csv: row width does not match header");
        }
        std::vector<std::string> cells;
        for (const double v : values) {
            cells.push_back(format_number(v));
        }
        line(cells);
    }

    const std::string& str() const { return text_; }

private:
    void line(const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            text_ += (i ? "," : "") + cells[i];
        }
        text_ += '\n';
    }

    std::size_t columns_;
    std::string text_;
};

inline Csv product_csv(const CriterionReport& r) {
    Csv csv({"k", "n", "forward_product", "inverse_product"});
    for (const auto& row : r.per_k) {
        csv.row({static_cast<double>(row.k), static_cast<double>(row.n), row.forward_product, row.inverse_product});
    }
    return csv;
}

inline Csv orbit_csv(const OrbitTrace& tr, const PatternSubspace& m, double tol) {
    Csv csv({"power", "norm", "membership", "leakage"});
    for (std::size_t j = 0; j < tr.size(); ++j) {
        csv.row({static_cast<double>(tr.powers[j]), norm(tr.points[j]),
                 membership(tr.points[j], m, tol).member ? 1.0 : 0.0, tr.leakage[j]});
    }
    return csv;
}

inline Csv eigen_csv(const EigenScanReport& r) {
    Csv csv({"lambda_re", "lambda_im", "half_width", "l2_norm", "l1_sum"});
    for (const auto& e : r.results) {
        for (const auto& n : e.norms) {
            csv.row({e.lambda.real(), e.lambda.imag(), static_cast<double>(n.half_width), n.l2, n.l1});
        }
    }
    return csv;
}

inline Csv eigen_ratio_csv(const EigenScanReport& r) {
    Csv csv({"lambda_re", "lambda_im", "right_ratio_re", "right_ratio_im", "left_ratio_re", "left_ratio_im"});
    for (const auto& e : r.results) {
        csv.row({e.lambda.real(), e.lambda.imag(), e.right_ratio.real(), e.right_ratio.imag(), e.left_ratio.real(),
                 e.left_ratio.imag()});
    }
    return csv;
}

} // namespace shiftlab::io
