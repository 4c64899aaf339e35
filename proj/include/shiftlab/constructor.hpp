#pragma once

/**
 * @file constructor.hpp
 * @brief Block construction of vectors whose (lambda B)-orbit visits given targets.
 *
 * For targets t_1..t_m supported in [0, s] and powers n_1 < ... < n_m with
 * gaps larger than s,
 *
 *     x = sum_j lambda^{-n_j} R^{n_j} t_j        (R = right shift on l2(N))
 *
 * satisfies (lambda B)^{n_j} x = t_j + tail_j: blocks before j fall off the
 * left edge, block j lands exactly on t_j, and later blocks shrink by
 * |lambda|^{n_j - n_l}.
 */

#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "errors.hpp"
#include "seqspace.hpp"
#include "subspace.hpp"

namespace shiftlab {

/// Powers must satisfy n ≡ residue (mod modulus).
struct ParityConstraint {
    Index modulus = 1;
    Index residue = 0;

    bool allows(std::uint64_t n) const { return floor_mod(static_cast<Index>(n), modulus) == residue; }
};

struct BlockPlan {
    std::vector<LatticeVector> targets;
    std::vector<std::uint64_t> powers;
    double lambda = 2.0;
    /// Targets are supported in [0, span].
    Index span = 0;
    std::optional<ParityConstraint> parity;
};

struct BuiltVector {
    LatticeVector x;
    /// Certified bound on |(lambda B)^{n_j} x - t_j|, per target.
    std::vector<double> tail_bounds;
};

inline Index support_span(const std::vector<LatticeVector>& targets) {
    Index s = 0;
    for (const auto& t : targets) {
        const auto sup = t.support();
        if (!sup.empty()) {
            if (sup.front() < 0) {
                throw PreconditionError("block plan: targets must be supported on n >= 0");
            }
            s = std::max(s, sup.back());
        }
    }
    return s;
}

inline void validate(const BlockPlan& plan) {
    if (!(std::abs(plan.lambda) > 1.0)) {
        throw DomainError("block plan: |lambda| must exceed 1");
    }
    if (plan.targets.empty() || plan.targets.size() != plan.powers.size()) {
        throw DomainError("block plan: need one power per target");
    }
    if (support_span(plan.targets) > plan.span) {
        throw PreconditionError("block plan: a target reaches beyond the declared span");
    }
    for (std::size_t j = 0; j < plan.powers.size(); ++j) {
        if (j > 0 && plan.powers[j] <= plan.powers[j - 1] + static_cast<std::uint64_t>(plan.span)) {
            throw DomainError("block plan: blocks " + std::to_string(j - 1) + " and " + std::to_string(j) +
                              " overlap (gap must exceed the span)");
        }
        if (plan.parity && !plan.parity->allows(plan.powers[j])) {
            throw DomainError("block plan: power " + std::to_string(plan.powers[j]) + " breaks the parity constraint");
        }
    }
}

inline BuiltVector build_vector(const BlockPlan& plan) {
    validate(plan);
    BuiltVector out;
    out.x = LatticeVector::zeros({0, 0}, true);
    for (std::size_t j = 0; j < plan.targets.size(); ++j) {
        const auto& t = plan.targets[j];
        const Index shift = static_cast<Index>(plan.powers[j]);
        const double scale = std::pow(plan.lambda, -static_cast<double>(plan.powers[j]));
        for (const Index i : t.support()) {
            out.x.add(i + shift, scale * t[i]);
        }
    }
    for (std::size_t j = 0; j < plan.targets.size(); ++j) {
        double bound = 0.0;
        for (std::size_t l = j + 1; l < plan.targets.size(); ++l) {
            const double gap = static_cast<double>(plan.powers[l] - plan.powers[j]);
            bound += std::pow(std::abs(plan.lambda), -gap) * norm(plan.targets[l]);
        }
        out.tail_bounds.push_back(bound);
    }
    return out;
}

/// Smallest g >= 1 with |lambda|^{-g} <= epsilon / 2.
inline std::uint64_t leading_gap(double lambda, double epsilon) {
    const double g = std::ceil(std::log(2.0 / epsilon) / std::log(std::abs(lambda)));
    return static_cast<std::uint64_t>(std::max(1.0, g));
}

/// Uniformly spaced powers n_j = j * d, d = span + g rounded up to the parity
/// modulus of M, with g large enough that every tail stays within epsilon / 2.
inline BlockPlan plan_for_coverage(const std::vector<LatticeVector>& targets, const PatternSubspace& m, double lambda,
                                   double epsilon) {
    if (!(epsilon > 0.0)) {
        throw DomainError("plan_for_coverage: epsilon must be positive");
    }
    if (!(std::abs(lambda) > 1.0)) {
        throw DomainError("plan_for_coverage: |lambda| must exceed 1");
    }
    if (targets.empty()) {
        throw DomainError("plan_for_coverage: no targets");
    }
    double max_norm = 0.0;
    for (std::size_t i = 0; i < targets.size(); ++i) {
        if (!membership(targets[i], m, 0.0).member) {
            throw PreconditionError("plan_for_coverage: target " + std::to_string(i) + " is not in M");
        }
        max_norm = std::max(max_norm, norm(targets[i]));
    }

    BlockPlan plan;
    plan.targets = targets;
    plan.lambda = lambda;
    plan.span = support_span(targets);
    plan.parity = ParityConstraint{m.modulus(), 0};

    const double scaled_eps = max_norm > 0.0 ? epsilon / max_norm : epsilon;
    std::uint64_t g = leading_gap(lambda, scaled_eps);
    const auto q = static_cast<std::uint64_t>(m.modulus());
    auto spacing = [&](std::uint64_t gap) {
        const std::uint64_t d = static_cast<std::uint64_t>(plan.span) + gap;
        return (d + q - 1) / q * q;
    };
    // Full geometric tail: max_norm * r / (1 - r), r = |lambda|^{-d}.
    while (true) {
        const double r = std::pow(std::abs(lambda), -static_cast<double>(spacing(g)));
        if (max_norm * r / (1.0 - r) <= epsilon / 2.0) {
            break;
        }
        ++g;
    }
    const std::uint64_t d = spacing(g);
    for (std::size_t j = 0; j < targets.size(); ++j) {
        plan.powers.push_back(j * d);
    }
    return plan;
}

} // namespace shiftlab
