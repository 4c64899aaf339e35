#pragma once

/**
 * @file scenario.hpp
 * @brief Config-driven task runner behind the `shiftlab` command line tool.
 *
 * A scenario is one JSON object: operator, subspace and schedule blocks plus
 * task-specific blocks. Every task has a built-in default config (the
 * weighted shift with w_n = 1/2 for n >= 0 and 3 for n < 0 on the
 * odd-support subspace unless stated otherwise); a user config is merged
 * over it field by field.
 *
 * Exit codes: 0 satisfied/pass, 2 violated, 3 inconclusive, 1 error.
 */

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <regex>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "constructor.hpp"
#include "criteria.hpp"
#include "errors.hpp"
#include "io.hpp"
#include "orbitlab.hpp"
#include "shiftops.hpp"
#include "subspace.hpp"

namespace shiftlab::scenario {

using nlohmann::json;

enum ExitCode : int { kPass = 0, kError = 1, kViolated = 2, kInconclusive = 3 };

inline int exit_code(Verdict v) {
    switch (v) {
    case Verdict::satisfied: return kPass;
    case Verdict::violated: return kViolated;
    case Verdict::inconclusive: return kInconclusive;
    }
    return kError;
}

struct OutputFile {
    std::string name;
    std::string content;
};

struct Outcome {
    int exit_code = kError;
    json report;
    std::vector<OutputFile> files;
};

/// Task name plus the merged configuration it runs with.
struct ScenarioConfig {
    std::string task;
    json body;
};

inline const std::vector<std::string>& task_names() {
    static const std::vector<std::string> names{"criterion", "lemma5",   "mhc",      "witness",  "eigen-scan",
                                                "orbit",     "coverage", "compression", "quotient", "example1",
                                                "example3",  "adjoint-pair"};
    return names;
}

// ---------------------------------------------------------------------------
// Built-in configs

namespace detail {

inline json example3_operator() {
    return json::parse(R"({"direction": "forward",
                           "weights": [{"if": "n>=0", "w": 0.5}, {"if": "default", "w": 3}]})");
}

inline json odd_support() { return json{{"mod", 2}, {"residues", {1}}}; }

inline json adjoint_weights() {
    // Alternating blocks of lengths 8, 16, 32, ... on the right, and their
    // reciprocal mirror image (w_{-1-j} = 1 / w_j) on the left. Partial
    // products swing between 2^{-a} and 2^{+b} with a, b growing.
    json rules = json::array();
    Index lo = 0;
    Index len = 8;
    for (int b = 0; b < 10; ++b) {
        const Index hi = lo + len - 1;
        const double w = (b % 2 == 0) ? 0.5 : 2.0;
        rules.push_back({{"if", "range [" + std::to_string(lo) + "," + std::to_string(hi) + "]"}, {"w", w}});
        rules.push_back({{"if", "range [" + std::to_string(-1 - hi) + "," + std::to_string(-1 - lo) + "]"},
                         {"w", 1.0 / w}});
        lo = hi + 1;
        len *= 2;
    }
    rules.push_back({{"if", "default"}, {"w", 1.0}});
    return rules;
}

} // namespace detail

/// Default configuration for a task or named scenario.
inline json builtin_config(std::string_view task) {
    json base{{"task", std::string(task)},
              {"seed", 20240611},
              {"operator", detail::example3_operator()},
              {"subspace", detail::odd_support()},
              {"schedule", {{"a", 2}, {"b", 0}, {"k_max", 20}}},
              {"window", {{"half_width", 64}, {"leakage_tolerance", 1e-12}}},
              {"tolerances", {{"limit", 1e-6}, {"membership", 1e-9}, {"trend_window", 5}}},
              {"criterion", {{"i_index", 1}, {"other_indices", {3, -1, 5}}}},
              {"eigen_scan",
               {{"p", 2}, {"grid", "annulus(0.1,16,24)"}, {"half_widths", {50, 100, 200, 400}}, {"anchor", -1}}},
              {"orbit", {{"power", 1}, {"N", 30}}},
              {"coverage", {{"lambda", 2.0}, {"epsilon", 1e-3}, {"random_targets", {{"count", 10}, {"span", 8}}}}}};

    base["criterion"]["dense_set"] = json::array(
        {io::to_json(LatticeVector::basis(1)), io::to_json(LatticeVector::basis(3)), io::to_json(LatticeVector::basis(-1))});
    base["orbit"]["x"] = io::to_json(LatticeVector::basis(1));

    if (task == "witness") {
        base["operator"] = json::parse(R"({"type": "diagonal", "eigenpairs": [
            {"index": 0, "eigenvalue": 0.3}, {"index": 1, "eigenvalue": 0.7},
            {"index": 2, "eigenvalue": 1.5}, {"index": 3, "eigenvalue": 4.0}]})");
        base["subspace"] = json{{"mod", 1}, {"residues", {0}}};
        base["witness"] = json::parse(R"({"p": 1, "n_max": 40,
            "x_terms": [{"coef": 1.0, "eigenvalue": 0.3, "index": 0}, {"coef": [0.5, -0.25], "eigenvalue": 0.7, "index": 1}],
            "y_terms": [{"coef": 2.0, "eigenvalue": 1.5, "index": 2}, {"coef": [-1.0, 0.5], "eigenvalue": 4.0, "index": 3}]})");
    } else if (task == "compression" || task == "quotient") {
        base["orbit"] = json{{"power", 2}, {"N", 30}, {"random", {{"count", 50}, {"span", 12}}}};
    } else if (task == "coverage" || task == "example1") {
        base["operator"] = json::parse(R"({"direction": "backward", "weights": [{"if": "default", "w": 2}]})");
        base["subspace"] = json{{"mod", 2}, {"residues", {1}}, {"one_sided", true}};
    } else if (task == "adjoint-pair") {
        base["operator"] = json{{"direction", "forward"}, {"weights", detail::adjoint_weights()}};
        base["schedule"] = json{{"explicit", {8, 56, 248, 1016}}};
        base["criterion"] = json{{"i_index", 1}};
        base["adjoint"] = json{{"subspace", {{"mod", 2}, {"residues", {0}}}},
                               {"schedule", {{"explicit", {24, 120, 504, 2040}}}},
                               {"i_index", 0}};
    }
    return base;
}

/// Recursive merge: objects merge key by key, everything else replaces.
inline void merge_into(json& base, const json& overlay) {
    if (!overlay.is_object()) {
        base = overlay;
        return;
    }
    for (auto it = overlay.begin(); it != overlay.end(); ++it) {
        if (it.value().is_object() && base.contains(it.key()) && base[it.key()].is_object()) {
            merge_into(base[it.key()], it.value());
        } else {
            base[it.key()] = it.value();
        }
    }
}

/// Command-line overrides applied on top of the merged config.
struct Overrides {
    std::optional<std::int64_t> k_max;
    std::optional<double> tol;
    std::optional<std::uint64_t> seed;
    std::optional<std::int64_t> p;
    std::optional<std::string> grid;
};

inline ScenarioConfig make_config(const std::string& task, const std::optional<json>& user, const Overrides& o) {
    const auto& names = task_names();
    if (std::find(names.begin(), names.end(), task) == names.end()) {
        throw ConfigError("unknown task or scenario '" + task + "'");
    }
    json body = builtin_config(task);
    if (user) {
        if (!user->is_object()) {
            throw ConfigError("config /: expected a JSON object");
        }
        merge_into(body, *user);
    }
    body["task"] = task;
    if (o.k_max) {
        if (body["schedule"].contains("explicit")) {
            auto& ex = body["schedule"]["explicit"];
            if (*o.k_max < 1) {
                throw ConfigError("--kmax must be positive");
            }
            while (static_cast<std::int64_t>(ex.size()) > *o.k_max) {
                ex.erase(ex.size() - 1);
            }
        } else {
            body["schedule"]["k_max"] = *o.k_max;
        }
    }
    if (o.tol) {
        body["tolerances"]["limit"] = *o.tol;
    }
    if (o.seed) {
        body["seed"] = *o.seed;
    }
    if (o.p) {
        body["eigen_scan"]["p"] = *o.p;
        if (body.contains("witness")) {
            body["witness"]["p"] = *o.p;
        }
    }
    if (o.grid) {
        body["eigen_scan"]["grid"] = *o.grid;
    }
    return {task, body};
}

// ---------------------------------------------------------------------------
// Shared block readers

namespace detail {

using io::fail;
using io::read;
using io::read_or;
using io::require;

struct Common {
    PatternSubspace subspace;
    PowerSchedule schedule;
    double tol = 1e-6;
    double membership_tol = kDefaultMembershipTol;
    std::size_t trend_window = kTrendWindow;
    Window window;
    double leakage_tol = 1e-12;
    std::uint64_t seed = 0;
};

inline Common read_common(const json& c) {
    Common out;
    out.subspace = io::subspace_from_json(c.value("subspace", json::object()), "/subspace");
    out.schedule = io::schedule_from_json(c.value("schedule", json::object()), "/schedule");
    const json& tol = c.value("tolerances", json::object());
    out.tol = read_or<double>(tol, "limit", 1e-6, "/tolerances");
    if (!(out.tol > 0.0)) {
        fail("/tolerances/limit", "must be positive");
    }
    out.membership_tol = read_or<double>(tol, "membership", kDefaultMembershipTol, "/tolerances");
    if (out.membership_tol < 0.0) {
        fail("/tolerances/membership", "must be >= 0");
    }
    const auto tw = read_or<std::int64_t>(tol, "trend_window", 5, "/tolerances");
    if (tw < 1) {
        fail("/tolerances/trend_window", "must be positive");
    }
    out.trend_window = static_cast<std::size_t>(tw);
    const json& win = c.value("window", json::object());
    const auto hw = read_or<Index>(win, "half_width", 64, "/window");
    if (hw < 1) {
        fail("/window/half_width", "must be positive");
    }
    out.window = Window::centered(hw);
    out.leakage_tol = read_or<double>(win, "leakage_tolerance", 1e-12, "/window");
    if (out.leakage_tol < 0.0) {
        fail("/window/leakage_tolerance", "must be >= 0");
    }
    out.seed = read_or<std::uint64_t>(c, "seed", 0, "");
    return out;
}

inline ShiftOperator read_shift(const json& c) {
    const json& op = require(c, "operator", "");
    if (op.value("type", "shift") != "shift") {
        fail("/operator/type", "this task needs a weighted shift");
    }
    return io::shift_from_json(op, "/operator");
}

using AnyOperator = std::variant<ShiftOperator, DiagonalOperator>;

inline AnyOperator read_any_operator(const json& c) {
    const json& op = require(c, "operator", "");
    const auto type = op.value("type", "shift");
    if (type == "diagonal") {
        return io::diagonal_from_json(op, "/operator");
    }
    if (type != "shift") {
        fail("/operator/type", "expected \"shift\" or \"diagonal\"");
    }
    return io::shift_from_json(op, "/operator");
}

/// "annulus(rmin,rmax,count)": log-spaced radii, golden-angle phases.
inline std::vector<Scalar> parse_grid(const json& g, const std::string& path) {
    std::vector<Scalar> out;
    if (g.is_array()) {
        for (std::size_t i = 0; i < g.size(); ++i) {
            out.push_back(io::scalar_from_json(g[i], path + "/" + std::to_string(i)));
        }
        return out;
    }
    const auto text = read<std::string>(g, path);
    static const std::regex annulus(R"(^\s*annulus\(\s*([0-9.eE+-]+)\s*,\s*([0-9.eE+-]+)\s*,\s*(\d+)(\s*points)?\s*\)\s*$)");
    std::smatch m;
    if (!std::regex_match(text, m, annulus)) {
        fail(path, "expected annulus(rmin, rmax, count) or a list of [re, im]");
    }
    double rmin = 0.0;
    double rmax = 0.0;
    try {
        rmin = std::stod(m[1]);
        rmax = std::stod(m[2]);
    } catch (const std::exception&) {
        fail(path, "bad radius in '" + text + "'");
    }
    const auto count = std::stoul(m[3]);
    if (!(rmin > 0.0) || !(rmax >= rmin) || count < 1) {
        fail(path, "need 0 < rmin <= rmax and count >= 1");
    }
    const double golden = 0.5 * (std::sqrt(5.0) - 1.0);
    for (std::size_t i = 0; i < count; ++i) {
        const double t = count == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(count - 1);
        const double r = rmin * std::pow(rmax / rmin, t);
        const double phase = 2.0 * std::numbers::pi * std::fmod(static_cast<double>(i) * golden, 1.0);
        out.push_back(std::polar(r, phase));
    }
    return out;
}

/// Unit-norm random vectors supported on admissible indices of [lo, hi].
inline std::vector<LatticeVector> random_vectors(std::mt19937_64& rng, std::size_t count, const PatternSubspace& m,
                                                 Window w) {
    const auto idx = m.admissible_in(w);
    if (idx.empty()) {
        throw ConfigError("no admissible index available for random vectors in [" + std::to_string(w.lo) + ", " +
                          std::to_string(w.hi) + "]");
    }
    std::uniform_real_distribution<double> coef(-1.0, 1.0);
    std::vector<LatticeVector> out;
    for (std::size_t c = 0; c < count; ++c) {
        LatticeVector v = LatticeVector::zeros({idx.front(), idx.back()}, m.one_sided());
        for (const Index i : idx) {
            v.set(i, coef(rng));
        }
        const double n = norm(v);
        out.push_back((1.0 / (n > 0.0 ? n : 1.0)) * v);
    }
    return out;
}

inline std::vector<SpectralTerm> read_terms(const json& j, const std::string& path) {
    std::vector<SpectralTerm> out;
    if (!j.is_array()) {
        fail(path, "expected a list of terms");
    }
    for (std::size_t i = 0; i < j.size(); ++i) {
        const std::string p = path + "/" + std::to_string(i);
        out.push_back({io::scalar_from_json(require(j[i], "coef", p), p + "/coef"),
                       io::scalar_from_json(require(j[i], "eigenvalue", p), p + "/eigenvalue"),
                       read<Index>(require(j[i], "index", p), p + "/index")});
    }
    return out;
}

inline std::vector<LatticeVector> read_vectors(const json& j, const std::string& path) {
    std::vector<LatticeVector> out;
    if (!j.is_array()) {
        fail(path, "expected a list of vectors");
    }
    for (std::size_t i = 0; i < j.size(); ++i) {
        out.push_back(io::vector_from_json(j[i], path + "/" + std::to_string(i)));
    }
    return out;
}

inline std::vector<LatticeVector> read_targets(const json& cov, const PatternSubspace& m, std::mt19937_64& rng) {
    if (cov.contains("targets")) {
        return read_vectors(cov["targets"], "/coverage/targets");
    }
    const json& rt = cov.value("random_targets", json::object());
    const auto count = read_or<std::int64_t>(rt, "count", 10, "/coverage/random_targets");
    const auto span = read_or<Index>(rt, "span", 8, "/coverage/random_targets");
    if (count < 1 || span < 0) {
        fail("/coverage/random_targets", "count must be positive and span >= 0");
    }
    return random_vectors(rng, static_cast<std::size_t>(count), m, {0, span});
}

// Runs fn on the operator (or its p-th power) selected by the config.
template <class Fn>
auto with_operator(const json& c, std::uint64_t power, Fn&& fn) {
    return std::visit(
        [&](const auto& op) {
            using Op = std::decay_t<decltype(op)>;
            return fn(OperatorPower<Op>{op, power});
        },
        read_any_operator(c));
}

inline json echo_common(const Common& c) {
    return json{{"subspace", io::to_json(c.subspace)},
                {"schedule", c.schedule.powers()},
                {"tolerances",
                 {{"limit", c.tol}, {"membership", c.membership_tol}, {"trend_window", c.trend_window}}},
                {"window", io::to_json(c.window)},
                {"seed", c.seed}};
}

struct CoverageRun {
    BlockPlan plan;
    BuiltVector built;
    OrbitTrace trace;
    CoverageReport coverage;
    InclusionReport inclusion;
    Membership x_membership;
    io::Csv curve{{"N", "score"}};
};

inline CoverageRun run_coverage(const json& c, const Common& com) {
    const auto t = read_shift(c);
    const json& cov = c.value("coverage", json::object());
    const double lambda = read_or<double>(cov, "lambda", 2.0, "/coverage");
    const double eps = read_or<double>(cov, "epsilon", 1e-3, "/coverage");
    if (!(eps > 0.0)) {
        fail("/coverage/epsilon", "must be positive");
    }
    if (t.direction() != Direction::backward || t.weights().rules().size() != 1 ||
        t.weights().weight(0) != lambda) {
        fail("/operator", "coverage needs the scaled backward shift with constant weight /coverage/lambda");
    }
    if (!com.subspace.one_sided()) {
        fail("/subspace/one_sided", "coverage runs on l2(N); set one_sided");
    }
    std::mt19937_64 rng(com.seed);
    CoverageRun r;
    const auto targets = read_targets(cov, com.subspace, rng);
    r.plan = cov.contains("plan") ? io::plan_from_json(cov["plan"], "/coverage/plan")
                                  : plan_for_coverage(targets, com.subspace, lambda, eps);
    r.built = build_vector(r.plan);
    r.trace = orbit(t, r.built.x, std::max<std::uint64_t>(1, r.plan.powers.back()));
    r.coverage = coverage(r.trace, com.subspace, r.plan.targets, eps);
    r.inclusion = projected_orbit_inclusion(r.trace, com.subspace, com.membership_tol);
    r.x_membership = membership(r.built.x, com.subspace, 0.0);
    for (const auto n : r.plan.powers) {
        const auto partial = coverage(r.trace, com.subspace, r.plan.targets, eps, false, n);
        r.curve.row({static_cast<double>(n), partial.score});
    }
    return r;
}

} // namespace detail

// ---------------------------------------------------------------------------
// Tasks

namespace tasks {

using detail::Common;
using io::fail;
using io::read_or;
using io::require;

inline Outcome criterion(const json& c) {
    const auto com = detail::read_common(c);
    const auto t = detail::read_shift(c);
    const json& cr = c.value("criterion", json::object());
    const auto i = read_or<Index>(cr, "i_index", 1, "/criterion");
    const auto r = shift_criterion_check(t, com.subspace, com.schedule, i, com.tol, com.trend_window, com.window);
    Outcome out;
    out.report = io::to_json(r);
    out.report["operator"] = io::to_json(t);
    out.report["i_index"] = i;
    out.files.push_back({"product_vs_k.csv", io::product_csv(r).str()});
    out.exit_code = exit_code(r.verdict);
    return out;
}

inline Outcome lemma5(const json& c) {
    const auto com = detail::read_common(c);
    const auto t = detail::read_shift(c);
    const json& cr = c.value("criterion", json::object());
    const auto i = read_or<Index>(cr, "i_index", 1, "/criterion");
    const auto others = read_or<std::vector<Index>>(cr, "other_indices", {}, "/criterion");
    const auto r = lemma5_propagation(t, com.subspace, com.schedule, i, others, com.tol, com.trend_window, com.window);
    Outcome out;
    out.report = io::to_json(r);
    std::vector<std::string> header{"k", "n"};
    std::vector<Index> all{i};
    all.insert(all.end(), others.begin(), others.end());
    for (const Index idx : all) {
        header.push_back("norm_e" + std::to_string(idx));
    }
    io::Csv csv(header);
    for (const auto& row : r.per_k) {
        std::vector<double> vals{static_cast<double>(row.k), static_cast<double>(row.n)};
        for (const Index idx : all) {
            vals.push_back(row.metrics.at("norm_e" + std::to_string(idx)));
        }
        csv.row(vals);
    }
    out.files.push_back({"norms_vs_k.csv", csv.str()});
    out.exit_code = exit_code(r.verdict);
    return out;
}

inline Outcome mhc(const json& c) {
    const auto com = detail::read_common(c);
    const auto t = detail::read_shift(c);
    const json& cr = c.value("criterion", json::object());
    const auto dense = detail::read_vectors(require(cr, "dense_set", "/criterion"), "/criterion/dense_set");
    const auto r = mhc_criterion_conditions(t, com.subspace, com.schedule, dense, com.tol, com.trend_window, com.window);
    Outcome out;
    out.report = io::to_json(r);
    io::Csv csv({"k", "n", "c1_max", "c2_max", "c3_max_relative"});
    for (const auto& row : r.per_k) {
        double c1 = 0.0;
        double c2 = 0.0;
        for (std::size_t d = 0; d < dense.size(); ++d) {
            c1 = std::max(c1, row.metrics.at("c1_d" + std::to_string(d)));
            c2 = std::max(c2, row.metrics.at("c2_d" + std::to_string(d)));
        }
        csv.row({static_cast<double>(row.k), static_cast<double>(row.n), c1, c2, row.metrics.at("c3_max_relative")});
    }
    out.files.push_back({"conditions_vs_k.csv", csv.str()});
    out.exit_code = exit_code(r.verdict);
    return out;
}

inline Outcome witness(const json& c) {
    const auto com = detail::read_common(c);
    const json& op = require(c, "operator", "");
    if (op.value("type", "shift") != "diagonal") {
        fail("/operator/type", "the witness task needs a diagonal operator");
    }
    const auto base = io::diagonal_from_json(op, "/operator");
    const json& w = require(c, "witness", "");
    const auto p = read_or<std::int64_t>(w, "p", 1, "/witness");
    const auto n_max = read_or<std::int64_t>(w, "n_max", 40, "/witness");
    if (p < 1 || n_max < 0) {
        fail("/witness", "need p >= 1 and n_max >= 0");
    }
    const auto xs = detail::read_terms(require(w, "x_terms", "/witness"), "/witness/x_terms");
    const auto ys = detail::read_terms(require(w, "y_terms", "/witness"), "/witness/y_terms");
    const auto t_p = diagonal_power(base, static_cast<std::uint64_t>(p));

    Outcome out;
    json rows = json::array();
    io::Csv csv({"n", "residual", "decay_norm", "decay_bound", "z_norm", "z_bound"});
    bool ok = true;
    for (std::int64_t n = 0; n <= n_max; ++n) {
        const auto r = spectrum_witness(xs, ys, static_cast<std::uint64_t>(p), static_cast<std::uint64_t>(n), t_p);
        ok &= r.residual <= kIdentityTol;
        ok &= r.decay_norm <= r.decay_bound * (1.0 + 1e-12);
        ok &= r.z_norm <= r.z_bound * (1.0 + 1e-12);
        rows.push_back(io::to_json(r));
        csv.row({static_cast<double>(n), r.residual, r.decay_norm, r.decay_bound, r.z_norm, r.z_bound});
    }
    std::vector<Index> small;
    std::vector<Index> large;
    for (const auto& s : xs) {
        small.push_back(s.index);
    }
    for (const auto& s : ys) {
        large.push_back(s.index);
    }
    Index lo = 0;
    Index hi = 0;
    if (!base.eigenpairs().empty()) {
        lo = base.eigenpairs().front().index;
        hi = base.eigenpairs().back().index;
    }
    out.report = json{{"checker", "spectrum_witness"},
                      {"verdict", ok ? "satisfied" : "violated"},
                      {"rows", rows},
                      {"identity_tolerance", kIdentityTol},
                      {"span_density", io::to_json(eigen_span_density(small, large, com.subspace, {lo, hi}))},
                      {"notes",
                       {"the map applied is (T^p)^n, acting as lambda_k^n on x-eigenvectors and mu_k^n on "
                        "y-eigenvectors"}}};
    out.files.push_back({"witness_vs_n.csv", csv.str()});
    out.exit_code = ok ? kPass : kViolated;
    return out;
}

inline EigenScanReport run_scan(const json& c, const Common& com, const ShiftOperator& t) {
    const json& es = c.value("eigen_scan", json::object());
    const auto p = read_or<std::int64_t>(es, "p", 2, "/eigen_scan");
    if (p < 1) {
        fail("/eigen_scan/p", "must be >= 1");
    }
    const auto grid = detail::parse_grid(es.value("grid", json("annulus(0.1,16,24)")), "/eigen_scan/grid");
    const auto widths = read_or<std::vector<Index>>(es, "half_widths", {50, 100, 200, 400}, "/eigen_scan");
    if (widths.empty() || *std::min_element(widths.begin(), widths.end()) < 1) {
        fail("/eigen_scan/half_widths", "need positive half-widths");
    }
    std::optional<Index> anchor;
    if (es.contains("anchor") && !es["anchor"].is_null()) {
        anchor = io::read<Index>(es["anchor"], "/eigen_scan/anchor");
    }
    return eigen_scan(t, static_cast<std::uint64_t>(p), grid, com.subspace, widths, anchor);
}

inline Outcome eigen_scan_task(const json& c) {
    const auto com = detail::read_common(c);
    const auto t = detail::read_shift(c);
    const auto r = run_scan(c, com, t);
    Outcome out;
    out.report = io::to_json(r);
    out.report["verdict"] = "pass";
    out.files.push_back({"eigen_scan.csv", io::eigen_csv(r).str()});
    out.files.push_back({"eigen_ratios.csv", io::eigen_ratio_csv(r).str()});
    out.exit_code = kPass;
    return out;
}

inline Outcome orbit_task(const json& c) {
    const auto com = detail::read_common(c);
    const json& ob = c.value("orbit", json::object());
    const auto power = read_or<std::uint64_t>(ob, "power", 1, "/orbit");
    const auto n = read_or<std::uint64_t>(ob, "N", 30, "/orbit");
    if (power < 1 || n < 1) {
        fail("/orbit", "need power >= 1 and N >= 1");
    }
    const auto x = io::vector_from_json(require(ob, "x", "/orbit"), "/orbit/x");
    return detail::with_operator(c, power, [&](const auto& op) {
        const auto tr = orbit(op, x, n, com.window, com.leakage_tol);
        const auto in_m = orbit_in_M(tr, com.subspace, com.membership_tol);
        const auto inc = projected_orbit_inclusion(tr, com.subspace, com.membership_tol);
        Outcome out;
        out.report = json{{"orbit", io::to_json(tr, com.subspace, com.membership_tol)},
                          {"powers_in_M", in_m.powers},
                          {"inclusion", io::to_json(inc)},
                          {"verdict", tr.overflow ? "inconclusive" : (inc.holds ? "pass" : "violated")}};
        out.files.push_back({"orbit.csv", io::orbit_csv(tr, com.subspace, com.membership_tol).str()});
        out.exit_code = tr.overflow ? kInconclusive : (inc.holds ? kPass : kViolated);
        return out;
    });
}

inline Outcome coverage_task(const json& c) {
    const auto com = detail::read_common(c);
    auto r = detail::run_coverage(c, com);
    Outcome out;
    const bool ok = r.coverage.score == 1.0;
    out.report = json{{"plan", io::to_json(r.plan)},
                      {"tail_bounds", r.built.tail_bounds},
                      {"x", io::to_json(r.built.x)},
                      {"x_in_M", r.x_membership.member},
                      {"coverage", io::to_json(r.coverage)},
                      {"inclusion", io::to_json(r.inclusion)},
                      {"verdict", ok ? "pass" : "inconclusive"}};
    out.files.push_back({"coverage_vs_N.csv", r.curve.str()});
    out.files.push_back({"orbit.csv", io::orbit_csv(r.trace, com.subspace, com.membership_tol).str()});
    out.exit_code = ok ? kPass : kInconclusive;
    return out;
}

inline std::vector<LatticeVector> orbit_inputs(const json& c, const Common& com, const PatternSubspace& target) {
    const json& ob = c.value("orbit", json::object());
    if (ob.contains("x")) {
        return {io::vector_from_json(ob["x"], "/orbit/x")};
    }
    const json& rnd = ob.value("random", json::object());
    const auto count = read_or<std::int64_t>(rnd, "count", 50, "/orbit/random");
    const auto span = read_or<Index>(rnd, "span", 12, "/orbit/random");
    if (count < 1 || span < 0) {
        fail("/orbit/random", "count must be positive and span >= 0");
    }
    std::mt19937_64 rng(com.seed);
    return detail::random_vectors(rng, static_cast<std::size_t>(count), target, Window::centered(span));
}

inline Outcome compression(const json& c) {
    const auto com = detail::read_common(c);
    const PatternSubspace m_perp = com.subspace.complement();
    const json& ob = c.value("orbit", json::object());
    const auto power = read_or<std::uint64_t>(ob, "power", 2, "/orbit");
    const auto n = read_or<std::uint64_t>(ob, "N", 30, "/orbit");
    const auto xs = orbit_inputs(c, com, m_perp);
    return detail::with_operator(c, power, [&](const auto& op) {
        Outcome out;
        json rows = json::array();
        io::Csv csv({"sample", "max_relative_difference"});
        bool ok = true;
        for (std::size_t s = 0; s < xs.size(); ++s) {
            const auto r = compression_orbit_identity(op, xs[s], m_perp, n, com.membership_tol);
            ok &= r.holds;
            rows.push_back(io::to_json(r));
            csv.row({static_cast<double>(s), r.max_difference});
        }
        out.report = json{{"m_perp", io::to_json(m_perp)}, {"samples", rows}, {"verdict", ok ? "pass" : "violated"}};
        out.files.push_back({"compression.csv", csv.str()});
        out.exit_code = ok ? kPass : kViolated;
        return out;
    });
}

inline Outcome quotient(const json& c) {
    const auto com = detail::read_common(c);
    const PatternSubspace m_perp = com.subspace.complement();
    const json& ob = c.value("orbit", json::object());
    const auto power = read_or<std::uint64_t>(ob, "power", 2, "/orbit");
    const auto n = read_or<std::uint64_t>(ob, "N", 30, "/orbit");
    const auto xs = orbit_inputs(c, com, m_perp);
    return detail::with_operator(c, power, [&](const auto& op) {
        Outcome out;
        io::Csv csv({"sample", "power", "class_norm", "difference_vs_compression"});
        bool ok = true;
        double worst = 0.0;
        for (std::size_t s = 0; s < xs.size(); ++s) {
            const auto q = quotient_orbit(op, xs[s], com.subspace, n);
            const auto comp = compression_orbit_identity(op, project(m_perp, xs[s]), m_perp, n, com.membership_tol);
            for (std::size_t j = 0; j < q.size(); ++j) {
                const double d = distance(q.points[j], comp.left[j]) / std::max(1.0, norm(comp.left[j]));
                worst = std::max(worst, d);
                ok &= d <= kIdentityTol;
                csv.row({static_cast<double>(s), static_cast<double>(j), norm(q.points[j]), d});
            }
        }
        out.report = json{{"m", io::to_json(com.subspace)},
                          {"m_perp", io::to_json(m_perp)},
                          {"samples", xs.size()},
                          {"max_relative_difference", worst},
                          {"tolerance", kIdentityTol},
                          {"verdict", ok ? "pass" : "violated"}};
        out.files.push_back({"quotient.csv", csv.str()});
        out.exit_code = ok ? kPass : kViolated;
        return out;
    });
}

inline Outcome example1(const json& c) {
    const auto com = detail::read_common(c);
    auto r = detail::run_coverage(c, com);
    const auto in_m = orbit_in_M(r.trace, com.subspace, com.membership_tol);

    bool even_only = true;
    for (const auto n : in_m.powers) {
        even_only &= n % 2 == 0;
    }
    bool plan_powers_kept = true;
    for (const auto n : r.plan.powers) {
        plan_powers_kept &= std::find(in_m.powers.begin(), in_m.powers.end(), n) != in_m.powers.end();
    }
    bool odd_project_to_zero = true;
    for (const auto& row : r.inclusion.rows) {
        if (row.power % 2 == 1) {
            odd_project_to_zero &= row.projected_norm == 0.0;
        }
    }
    const bool ok = r.coverage.score == 1.0 && r.inclusion.holds && r.x_membership.member && even_only &&
                    plan_powers_kept && odd_project_to_zero;
    Outcome out;
    out.report = json{{"scenario", "example1"},
                      {"plan", io::to_json(r.plan)},
                      {"tail_bounds", r.built.tail_bounds},
                      {"x_in_M", r.x_membership.member},
                      {"powers_in_M", in_m.powers},
                      {"orbit_in_M_even_powers_only", even_only},
                      {"odd_powers_project_to_zero", odd_project_to_zero},
                      {"coverage", io::to_json(r.coverage)},
                      {"inclusion", io::to_json(r.inclusion)},
                      {"verdict", ok ? "pass" : "violated"}};
    out.files.push_back({"coverage_vs_N.csv", r.curve.str()});
    out.files.push_back({"orbit.csv", io::orbit_csv(r.trace, com.subspace, com.membership_tol).str()});
    out.exit_code = ok ? kPass : kViolated;
    return out;
}

inline Outcome example3(const json& c) {
    const auto com = detail::read_common(c);
    const auto t = detail::read_shift(c);
    const json& cr = c.value("criterion", json::object());
    const auto i = read_or<Index>(cr, "i_index", 1, "/criterion");
    const auto others = read_or<std::vector<Index>>(cr, "other_indices", {}, "/criterion");
    const auto dense = detail::read_vectors(require(cr, "dense_set", "/criterion"), "/criterion/dense_set");

    const auto crit = shift_criterion_check(t, com.subspace, com.schedule, i, com.tol, com.trend_window, com.window);
    const auto odd_step = invariance_check(t, 1, com.subspace, com.window);
    const auto conds = mhc_criterion_conditions(t, com.subspace, com.schedule, dense, com.tol, com.trend_window,
                                                com.window);
    const auto prop = lemma5_propagation(t, com.subspace, com.schedule, i, others, com.tol, com.trend_window,
                                         com.window);
    const auto scan = run_scan(c, com, t);

    const Verdict v = combine({crit.verdict, conds.verdict, prop.verdict});
    Outcome out;
    out.report = json{{"scenario", "example3"},
                      {"operator", io::to_json(t)},
                      {"config", detail::echo_common(com)},
                      {"criterion", io::to_json(crit)},
                      {"invariance_n1", io::to_json(odd_step)},
                      {"mhc_conditions", io::to_json(conds)},
                      {"propagation", io::to_json(prop)},
                      {"eigen_scan", io::to_json(scan)},
                      {"verdict", to_string(v)}};
    out.files.push_back({"product_vs_k.csv", io::product_csv(crit).str()});
    out.files.push_back({"eigen_scan.csv", io::eigen_csv(scan).str()});
    out.files.push_back({"eigen_ratios.csv", io::eigen_ratio_csv(scan).str()});
    out.exit_code = exit_code(v);
    return out;
}

inline Outcome adjoint_pair(const json& c) {
    const auto com = detail::read_common(c);
    const auto t = detail::read_shift(c);
    const auto t_star = adjoint(t);
    const json& cr = c.value("criterion", json::object());
    const auto i = read_or<Index>(cr, "i_index", 1, "/criterion");
    const json& adj = require(c, "adjoint", "");
    const auto m2 = io::subspace_from_json(adj.value("subspace", json::object()), "/adjoint/subspace");
    const auto sched2 = io::schedule_from_json(adj.value("schedule", json::object()), "/adjoint/schedule");
    const auto i2 = read_or<Index>(adj, "i_index", 0, "/adjoint");

    const auto r1 = shift_criterion_check(t, com.subspace, com.schedule, i, com.tol, com.trend_window, com.window);
    const auto r2 = shift_criterion_check(t_star, m2, sched2, i2, com.tol, com.trend_window, com.window);

    // <T u, v> = <u, T* v> on random vectors.
    std::mt19937_64 rng(com.seed);
    const auto us = detail::random_vectors(rng, 8, PatternSubspace::whole(), Window::centered(16));
    const auto vs = detail::random_vectors(rng, 8, PatternSubspace::whole(), Window::centered(16));
    double worst = 0.0;
    for (std::size_t k = 0; k < us.size(); ++k) {
        const Scalar lhs = inner(apply(t, us[k]), vs[k]);
        const Scalar rhs = inner(us[k], apply(t_star, vs[k]));
        worst = std::max(worst, std::abs(lhs - rhs));
    }
    const bool adjoint_ok = worst <= kIdentityTol;

    const Verdict v = adjoint_ok ? combine({r1.verdict, r2.verdict}) : Verdict::violated;
    Outcome out;
    out.report = json{{"scenario", "adjoint-pair"},
                      {"operator", io::to_json(t)},
                      {"adjoint_operator", io::to_json(t_star)},
                      {"adjoint_identity_max_error", worst},
                      {"T", io::to_json(r1)},
                      {"T_star", io::to_json(r2)},
                      {"m1", io::to_json(com.subspace)},
                      {"m2", io::to_json(m2)},
                      {"notes",
                       {"the relation between M1 and M2 is not decided here; the two subspaces are reported side by "
                        "side only"}},
                      {"verdict", to_string(v)}};
    out.files.push_back({"product_vs_k_T.csv", io::product_csv(r1).str()});
    out.files.push_back({"product_vs_k_adjoint.csv", io::product_csv(r2).str()});
    out.exit_code = exit_code(v);
    return out;
}

} // namespace tasks

/// Runs a merged scenario. Errors surface as exceptions; `run_safely` maps them to exit 1.
inline Outcome run(const ScenarioConfig& cfg) {
    const json& c = cfg.body;
    const std::string& t = cfg.task;
    Outcome out;
    if (t == "criterion") out = tasks::criterion(c);
    else if (t == "lemma5") out = tasks::lemma5(c);
    else if (t == "mhc") out = tasks::mhc(c);
    else if (t == "witness") out = tasks::witness(c);
    else if (t == "eigen-scan") out = tasks::eigen_scan_task(c);
    else if (t == "orbit") out = tasks::orbit_task(c);
    else if (t == "coverage") out = tasks::coverage_task(c);
    else if (t == "compression") out = tasks::compression(c);
    else if (t == "quotient") out = tasks::quotient(c);
    else if (t == "example1") out = tasks::example1(c);
    else if (t == "example3") out = tasks::example3(c);
    else if (t == "adjoint-pair") out = tasks::adjoint_pair(c);
    else throw ConfigError("unknown task '" + t + "'");
    out.report["task"] = t;
    out.report["exit_code"] = out.exit_code;
    return out;
}

inline Outcome run_safely(const ScenarioConfig& cfg) {
    try {
        return run(cfg);
    } catch (const Error& e) {
        Outcome out;
        out.exit_code = kError;
        out.report = json{{"task", cfg.task}, {"exit_code", kError}, {"error", e.what()}};
        return out;
    }
}

/// report.json plus every CSV, written into dir.
inline void write_outputs(const Outcome& o, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    auto write = [&](const std::string& name, const std::string& text) {
        std::ofstream f(dir / name, std::ios::binary);
        if (!f) {
            throw Error("cannot write " + (dir / name).string());
        }
        f << text;
    };
    write("report.json", o.report.dump(2) + "\n");
    for (const auto& f : o.files) {
        write(f.name, f.content);
    }
}

} // namespace shiftlab::scenario
