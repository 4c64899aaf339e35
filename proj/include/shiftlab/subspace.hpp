#pragma once

/**
 * @file subspace.hpp
 * @brief Coordinate subspaces spanned by basis vectors, and their projections.
 *
 * An index n is admissible when it is in extra_indices, or when n mod q is a
 * listed residue and n is not in excluded_indices. The excluded list exists so
 * that the orthogonal complement of any pattern is again a pattern.
 */

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "seqspace.hpp"
#include "shiftops.hpp"

namespace shiftlab {

class PatternSubspace {
public:
    /// The whole space.
    PatternSubspace() : PatternSubspace(1, {0}) {}

    PatternSubspace(Index modulus, std::vector<Index> residues, std::vector<Index> extra_indices = {},
                    std::vector<Index> excluded_indices = {}, bool one_sided = false)
        : modulus_(modulus),
          residues_(std::move(residues)),
          extra_(std::move(extra_indices)),
          excluded_(std::move(excluded_indices)),
          one_sided_(one_sided) {
        if (modulus_ < 1) {
            throw ConfigError("subspace: modulus must be >= 1");
        }
        for (auto& r : residues_) {
            if (r < 0 || r >= modulus_) {
                throw ConfigError("subspace: residue " + std::to_string(r) + " outside [0, " +
                                  std::to_string(modulus_ - 1) + "]");
            }
        }
        normalize(residues_);
        normalize(extra_);
        normalize(excluded_);
        for (const Index n : extra_) {
            if (std::binary_search(excluded_.begin(), excluded_.end(), n)) {
                throw ConfigError("subspace: index " + std::to_string(n) + " both added and excluded");
            }
        }
    }

    static PatternSubspace whole(bool one_sided = false) { return {1, {0}, {}, {}, one_sided}; }
    static PatternSubspace zero(bool one_sided = false) { return {1, {}, {}, {}, one_sided}; }

    /// Sequences vanishing on even indices: span of e_n for odd n.
    static PatternSubspace even_zero(bool one_sided = false) { return {2, {1}, {}, {}, one_sided}; }
    /// Span of e_n for even n.
    static PatternSubspace even_support(bool one_sided = false) { return {2, {0}, {}, {}, one_sided}; }

    /// Span of the listed basis vectors only.
    static PatternSubspace from_indices(std::vector<Index> indices, bool one_sided = false) {
        return {1, {}, std::move(indices), {}, one_sided};
    }

    Index modulus() const { return modulus_; }
    const std::vector<Index>& residues() const { return residues_; }
    const std::vector<Index>& extra_indices() const { return extra_; }
    const std::vector<Index>& excluded_indices() const { return excluded_; }
    bool one_sided() const { return one_sided_; }

    /// True when membership is decided by residues alone.
    bool is_periodic() const { return extra_.empty() && excluded_.empty(); }

    bool admissible(Index n) const {
        if (one_sided_ && n < 0) {
            return false;
        }
        if (std::binary_search(extra_.begin(), extra_.end(), n)) {
            return true;
        }
        return std::binary_search(residues_.begin(), residues_.end(), floor_mod(n, modulus_)) &&
               !std::binary_search(excluded_.begin(), excluded_.end(), n);
    }

    /// Orthogonal complement within the same ambient space.
    PatternSubspace complement() const {
        std::vector<Index> other;
        for (Index r = 0; r < modulus_; ++r) {
            if (!std::binary_search(residues_.begin(), residues_.end(), r)) {
                other.push_back(r);
            }
        }
        return {modulus_, std::move(other), excluded_, extra_, one_sided_};
    }

    std::vector<Index> admissible_in(Window w) const {
        std::vector<Index> out;
        for (Index n = w.lo; n <= w.hi; ++n) {
            if (admissible(n)) {
                out.push_back(n);
            }
        }
        return out;
    }

    friend bool operator==(const PatternSubspace&, const PatternSubspace&) = default;

private:
    static void normalize(std::vector<Index>& v) {
        std::sort(v.begin(), v.end());
        v.erase(std::unique(v.begin(), v.end()), v.end());
    }

    Index modulus_;
    std::vector<Index> residues_;
    std::vector<Index> extra_;
    std::vector<Index> excluded_;
    bool one_sided_;
};

/// Orthogonal projection onto target, or onto its complement.
struct Projection {
    PatternSubspace target;
    bool complement = false;

    bool keeps(Index n) const { return target.admissible(n) != complement; }
};

/// Zeroes the coefficients the projection discards; the window is unchanged.
inline LatticeVector project(const Projection& p, const LatticeVector& v) {
    LatticeVector out = LatticeVector::zeros(v.window(), v.one_sided());
    for (Index n = v.lo(); n <= v.hi(); ++n) {
        if (p.keeps(n)) {
            out.set(n, v[n]);
        }
    }
    return out;
}

inline LatticeVector project(const PatternSubspace& m, const LatticeVector& v) { return project(Projection{m}, v); }

constexpr double kDefaultMembershipTol = 1e-9;

struct Membership {
    bool member = true;
    double max_off_pattern = 0.0;
};

inline Membership membership(const LatticeVector& v, const PatternSubspace& m, double tol = kDefaultMembershipTol) {
    if (tol < 0.0) {
        throw DomainError("membership: tolerance must be >= 0");
    }
    Membership out;
    for (Index n = v.lo(); n <= v.hi(); ++n) {
        if (!m.admissible(n)) {
            out.max_off_pattern = std::max(out.max_off_pattern, std::abs(v[n]));
        }
    }
    out.member = out.max_off_pattern <= tol;
    return out;
}

struct InvarianceResult {
    bool pass = true;
    std::uint64_t power = 0;
    Window checked;
    /// First admissible index whose image is off-pattern, and that image.
    std::optional<std::pair<Index, Index>> violation;
};

/// Indices of w ordered by distance from 0, positives first on ties.
inline std::vector<Index> center_out_order(Window w) {
    std::vector<Index> out;
    out.reserve(w.size());
    for (Index n = w.lo; n <= w.hi; ++n) {
        out.push_back(n);
    }
    std::stable_sort(out.begin(), out.end(), [](Index a, Index b) {
        const Index aa = a < 0 ? -a : a;
        const Index bb = b < 0 ? -b : b;
        return aa != bb ? aa < bb : a > b;
    });
    return out;
}

/// Structural test of T^n M ⊆ M: every admissible index of the window must
/// move to an admissible index (or fall off the edge of l2(N)). For periodic
/// patterns the window is widened to a full period, which makes the verdict exact.
inline InvarianceResult invariance_check(const ShiftOperator& t, std::uint64_t n, const PatternSubspace& m,
                                         Window window = WindowPolicy{}.default_window()) {
    if (n < 1) {
        throw DomainError("invariance_check: power must be >= 1");
    }
    if (m.is_periodic()) {
        window = hull(window, {0, m.modulus() - 1});
    }
    InvarianceResult out{true, n, window, std::nullopt};
    const Index offset = t.step() * static_cast<Index>(n);
    for (const Index i : center_out_order(window)) {
        if (!m.admissible(i)) {
            continue;
        }
        const Index j = i + offset;
        if (m.one_sided() && j < 0) {
            continue;
        }
        if (!m.admissible(j)) {
            out.pass = false;
            out.violation = std::pair{i, j};
            return out;
        }
    }
    return out;
}

/// Diagonal operators preserve every coordinate subspace.
inline InvarianceResult invariance_check(const DiagonalOperator&, std::uint64_t n, const PatternSubspace&,
                                         Window window = WindowPolicy{}.default_window()) {
    return {true, n, window, std::nullopt};
}

template <class Op>
InvarianceResult invariance_check(const OperatorPower<Op>& t, std::uint64_t n, const PatternSubspace& m,
                                  Window window = WindowPolicy{}.default_window()) {
    auto r = invariance_check(t.base, t.exponent * n, m, window);
    r.power = n;
    return r;
}

/// H/M represented through M⊥: the class of v is its M⊥ component.
struct QuotientMap {
    PatternSubspace subspace;
    PatternSubspace complement;

    LatticeVector class_of(const LatticeVector& v) const { return project(complement, v); }
};

inline QuotientMap complement_and_quotient(const PatternSubspace& m) { return {m, m.complement()}; }

} // namespace shiftlab
