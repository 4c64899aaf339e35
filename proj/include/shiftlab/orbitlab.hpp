#pragma once

/**
 * @file orbitlab.hpp
 * @brief Orbits, orbit ∩ M, projected orbits, and epsilon-coverage of targets.
 *
 * Density cannot be decided from finitely many points. It is replaced by
 * epsilon-coverage of a finite target set, and every coverage report carries
 * the orbit length, epsilon and window it was computed with.
 */

#include <cmath>
#include <concepts>
#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "errors.hpp"
#include "seqspace.hpp"
#include "shiftops.hpp"
#include "subspace.hpp"

namespace shiftlab {

/// Anything with closed-form powers and a structural invariance test.
template <class Op>
concept LatticeOperator = requires(const Op& op, std::uint64_t k, const LatticeVector& v, const PatternSubspace& m) {
    { apply_power(op, k, v) } -> std::same_as<LatticeVector>;
    { invariance_check(op, k, m) } -> std::same_as<InvarianceResult>;
};

constexpr double kOverflowModulus = 1e300;

struct OrbitTrace {
    LatticeVector base_point;
    std::vector<std::uint64_t> powers;
    std::vector<LatticeVector> points;
    /// l2 mass pushed outside the bounding window, per point.
    std::vector<double> leakage;
    std::vector<bool> trusted;
    std::optional<Window> bound;
    double leakage_tolerance = WindowPolicy{}.leakage_tolerance;
    bool overflow = false;

    std::size_t size() const { return points.size(); }
};

namespace detail {

inline double leaked_mass(const LatticeVector& v, Window w) {
    double sq = 0.0;
    for (Index n = v.lo(); n <= v.hi(); ++n) {
        if (!w.contains(n)) {
            sq += std::norm(v[n]);
        }
    }
    return std::sqrt(sq);
}

inline bool overflowed(const LatticeVector& v) {
    for (const Scalar c : v.coeffs()) {
        if (!std::isfinite(c.real()) || !std::isfinite(c.imag()) || std::abs(c) > kOverflowModulus) {
            return true;
        }
    }
    return false;
}

} // namespace detail

/// x, Tx, ..., T^N x. With a bound, mass leaving the window is cut and
/// recorded as leakage; points leaking more than the tolerance are untrusted.
template <LatticeOperator Op>
OrbitTrace orbit(const Op& op, const LatticeVector& x, std::uint64_t n, std::optional<Window> bound = std::nullopt,
                 double leakage_tolerance = WindowPolicy{}.leakage_tolerance) {
    if (n < 1) {
        throw DomainError("orbit: N must be >= 1");
    }
    OrbitTrace tr;
    tr.base_point = x;
    tr.bound = bound;
    tr.leakage_tolerance = leakage_tolerance;
    for (std::uint64_t j = 0; j <= n; ++j) {
        LatticeVector p = apply_power(op, j, x);
        double leak = 0.0;
        if (bound) {
            leak = detail::leaked_mass(p, *bound);
            p = p.restricted(*bound);
        }
        tr.overflow |= detail::overflowed(p);
        tr.powers.push_back(j);
        tr.points.push_back(std::move(p));
        tr.leakage.push_back(leak);
        tr.trusted.push_back(leak <= leakage_tolerance);
    }
    return tr;
}

/// Keeps exactly the points lying in M at tolerance tol.
inline OrbitTrace orbit_in_M(const OrbitTrace& tr, const PatternSubspace& m, double tol = kDefaultMembershipTol) {
    OrbitTrace out;
    out.base_point = tr.base_point;
    out.bound = tr.bound;
    out.leakage_tolerance = tr.leakage_tolerance;
    out.overflow = tr.overflow;
    for (std::size_t j = 0; j < tr.size(); ++j) {
        if (membership(tr.points[j], m, tol).member) {
            out.powers.push_back(tr.powers[j]);
            out.points.push_back(tr.points[j]);
            out.leakage.push_back(tr.leakage[j]);
            out.trusted.push_back(tr.trusted[j]);
        }
    }
    return out;
}

struct InclusionRow {
    std::uint64_t power = 0;
    bool member = false;
    double projected_norm = 0.0;
    /// |T^n x - P T^n x|, meaningful for members.
    double gap = 0.0;
    bool holds = true;
};

struct InclusionReport {
    bool holds = true;
    double tolerance = 0.0;
    std::vector<InclusionRow> rows;
};

/// Checks Orb(T,x) ∩ M ⊆ P(Orb(T,x)) ∩ M pointwise: each member point must
/// coincide with its own projection.
inline InclusionReport projected_orbit_inclusion(const OrbitTrace& tr, const PatternSubspace& m,
                                                 double tol = kDefaultMembershipTol) {
    InclusionReport out;
    out.tolerance = tol;
    for (std::size_t j = 0; j < tr.size(); ++j) {
        const auto& pt = tr.points[j];
        const auto proj = project(m, pt);
        InclusionRow row;
        row.power = tr.powers[j];
        row.member = membership(pt, m, tol).member;
        row.projected_norm = norm(proj);
        row.gap = distance(pt, proj);
        if (row.member) {
            const double allowed = std::max(kIdentityTol, tol * std::sqrt(static_cast<double>(pt.size())));
            row.holds = row.gap <= allowed;
        }
        out.holds &= row.holds;
        out.rows.push_back(row);
    }
    return out;
}

struct CoverageHit {
    double best_distance = std::numeric_limits<double>::infinity();
    std::optional<std::uint64_t> best_power;
};

struct CoverageReport {
    std::vector<LatticeVector> targets;
    double epsilon = 0.0;
    std::uint64_t orbit_length = 0;
    std::optional<Window> window;
    bool projected = false;
    std::vector<CoverageHit> hits;
    double score = 0.0;
};

/// Best l2 distance from each target to a trusted orbit point of power <= max_power
/// (all points when unset), optionally after projecting the points onto M.
inline CoverageReport coverage(const OrbitTrace& tr, const PatternSubspace& m, const std::vector<LatticeVector>& targets,
                               double epsilon, bool use_projected = false,
                               std::optional<std::uint64_t> max_power = std::nullopt) {
    if (!(epsilon > 0.0)) {
        throw DomainError("coverage: epsilon must be positive");
    }
    if (targets.empty()) {
        throw PreconditionError("coverage: target set is empty");
    }
    for (std::size_t i = 0; i < targets.size(); ++i) {
        if (!membership(targets[i], m, 0.0).member) {
            throw PreconditionError("coverage: target " + std::to_string(i) + " is not in M");
        }
    }
    CoverageReport out;
    out.targets = targets;
    out.epsilon = epsilon;
    out.window = tr.bound;
    out.projected = use_projected;
    out.hits.resize(targets.size());
    for (std::size_t j = 0; j < tr.size(); ++j) {
        if (!tr.trusted[j] || (max_power && tr.powers[j] > *max_power)) {
            continue;
        }
        out.orbit_length = std::max(out.orbit_length, tr.powers[j]);
        const LatticeVector pt = use_projected ? project(m, tr.points[j]) : tr.points[j];
        for (std::size_t i = 0; i < targets.size(); ++i) {
            const double d = distance(pt, targets[i]);
            if (d < out.hits[i].best_distance) {
                out.hits[i] = {d, tr.powers[j]};
            }
        }
    }
    std::size_t covered = 0;
    for (const auto& h : out.hits) {
        covered += h.best_distance <= epsilon ? 1 : 0;
    }
    out.score = static_cast<double>(covered) / static_cast<double>(targets.size());
    return out;
}

struct IdentityReport {
    bool holds = true;
    double tolerance = kIdentityTol;
    double max_difference = 0.0;
    /// (power, |left - right|)
    std::vector<std::pair<std::uint64_t, double>> rows;
    std::vector<LatticeVector> left;
    std::vector<LatticeVector> right;
};

/// Orbit of the compression PT on M⊥ versus the projected plain orbit:
/// (PT)^n x against P T^n x for n = 0..N.
template <LatticeOperator Op>
IdentityReport compression_orbit_identity(const Op& op, const LatticeVector& x, const PatternSubspace& m_perp,
                                          std::uint64_t n, double tol = kDefaultMembershipTol) {
    if (const auto inv = invariance_check(op, 1, m_perp); !inv.pass) {
        throw PreconditionError("compression_orbit_identity: M⊥ is not invariant (index " +
                                std::to_string(inv.violation->first) + " -> " +
                                std::to_string(inv.violation->second) + ")");
    }
    if (!membership(x, m_perp, tol).member) {
        throw PreconditionError("compression_orbit_identity: x is not in M⊥");
    }
    IdentityReport out;
    LatticeVector v = project(m_perp, x);
    for (std::uint64_t j = 0; j <= n; ++j) {
        if (j > 0) {
            v = project(m_perp, apply_power(op, 1, v));
        }
        const LatticeVector r = project(m_perp, apply_power(op, j, x));
        const double d = distance(v, r);
        const double scale = std::max(1.0, norm(r));
        out.max_difference = std::max(out.max_difference, d / scale);
        out.rows.emplace_back(j, d);
        out.left.push_back(v);
        out.right.push_back(r);
    }
    out.holds = out.max_difference <= out.tolerance;
    return out;
}

/// Classes T^n x + M, n = 0..N, represented by their M⊥ components.
template <LatticeOperator Op>
OrbitTrace quotient_orbit(const Op& op, const LatticeVector& x, const PatternSubspace& m, std::uint64_t n) {
    const QuotientMap q = complement_and_quotient(m);
    if (const auto inv = invariance_check(op, 1, q.complement); !inv.pass) {
        throw PreconditionError("quotient_orbit: M⊥ is not invariant (index " + std::to_string(inv.violation->first) +
                                " -> " + std::to_string(inv.violation->second) + ")");
    }
    OrbitTrace tr = orbit(op, x, n);
    for (auto& p : tr.points) {
        p = q.class_of(p);
    }
    return tr;
}

} // namespace shiftlab
