#pragma once

/**
 * @file shiftops.hpp
 * @brief Weighted shifts on l2(Z), their right inverses, and diagonal stand-ins.
 *
 * A forward shift acts by T e_n = w_n e_{n+1}, a backward shift by
 * T e_n = w_n e_{n-1}. Powers are evaluated in closed form: the coefficient
 * at index n is carried k steps and multiplied by the product of the k
 * weights on its path, so no k-fold loop over the vector is needed.
 *
 * Weight products are evaluated segment by segment. Between breakpoints of
 * the rule list the weights are periodic (period = lcm of the residue-rule
 * moduli), so a long product reduces to one period product raised to a
 * power plus a remainder.
 */

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "detail/scaled_real.hpp"
#include "errors.hpp"
#include "seqspace.hpp"

namespace shiftlab {

// ---------------------------------------------------------------------------
// Weight rules

struct AtLeast {
    Index bound;  // n >= bound
};
struct Below {
    Index bound;  // n < bound
};
struct InRange {
    Index first;
    Index last;
};
struct Residue {
    Index modulus;
    std::vector<Index> residues;
};
struct Listed {
    std::vector<Index> indices;
};
struct Otherwise {};

using Predicate = std::variant<AtLeast, Below, InRange, Residue, Listed, Otherwise>;

inline Index floor_mod(Index n, Index q) {
    const Index r = n % q;
    return r < 0 ? r + q : r;
}

inline bool matches(const Predicate& pred, Index n) {
    struct Visitor {
        Index n;
        bool operator()(const AtLeast& p) const { return n >= p.bound; }
        bool operator()(const Below& p) const { return n < p.bound; }
        bool operator()(const InRange& p) const { return p.first <= n && n <= p.last; }
        bool operator()(const Residue& p) const {
            const Index r = floor_mod(n, p.modulus);
            return std::find(p.residues.begin(), p.residues.end(), r) != p.residues.end();
        }
        bool operator()(const Listed& p) const {
            return std::find(p.indices.begin(), p.indices.end(), n) != p.indices.end();
        }
        bool operator()(const Otherwise&) const { return true; }
    };
    return std::visit(Visitor{n}, pred);
}

struct WeightRule {
    Predicate when;
    double weight;
};

/// Piecewise weight sequence, first matching rule wins.
///
/// A sequence without a trailing `Otherwise` rule is accepted; querying an
/// index no rule covers raises ConfigError. The config loader is stricter
/// and demands the trailing default.
class WeightSequence {
public:
    WeightSequence() : WeightSequence({WeightRule{Otherwise{}, 1.0}}) {}

    explicit WeightSequence(std::vector<WeightRule> rules) : rules_(std::move(rules)) {
        if (rules_.empty()) {
            throw ConfigError("weight sequence needs at least one rule");
        }
        Index period = 1;
        for (std::size_t i = 0; i < rules_.size(); ++i) {
            const auto& r = rules_[i];
            if (!(r.weight > 0.0) || !std::isfinite(r.weight)) {
                throw ConfigError("weight rule " + std::to_string(i) + ": weight must be positive and finite");
            }
            if (const auto* res = std::get_if<Residue>(&r.when)) {
                if (res->modulus < 1) {
                    throw ConfigError("weight rule " + std::to_string(i) + ": modulus must be >= 1");
                }
                if (period != 0) {
                    period = std::lcm(period, res->modulus);
                    if (period > kMaxPeriod) {
                        period = 0;
                    }
                }
            }
            if (const auto* rg = std::get_if<InRange>(&r.when); rg != nullptr && rg->first > rg->last) {
                throw ConfigError("weight rule " + std::to_string(i) + ": empty range");
            }
            collect_breakpoints(r.when);
        }
        period_ = period;
        std::sort(breaks_.begin(), breaks_.end());
        breaks_.erase(std::unique(breaks_.begin(), breaks_.end()), breaks_.end());
    }

    static WeightSequence constant(double w) { return WeightSequence({WeightRule{Otherwise{}, w}}); }

    /// w_n = at_or_above for n >= split, below otherwise.
    static WeightSequence split(Index split, double at_or_above, double below) {
        return WeightSequence({WeightRule{AtLeast{split}, at_or_above}, WeightRule{Otherwise{}, below}});
    }

    const std::vector<WeightRule>& rules() const { return rules_; }

    bool has_default() const {
        return std::any_of(rules_.begin(), rules_.end(),
                           [](const WeightRule& r) { return std::holds_alternative<Otherwise>(r.when); });
    }

    double weight(Index n) const {
        for (const auto& r : rules_) {
            if (matches(r.when, n)) {
                return r.weight;
            }
        }
        throw ConfigError("no weight rule matches index " + std::to_string(n));
    }

    /// prod_{j=first}^{last} w_j; empty (first > last) gives 1.
    detail::ScaledReal product(Index first, Index last) const {
        detail::ScaledReal acc;
        for_each_segment(first, last, [&](Index lo, Index hi) {
            const Index len = hi - lo + 1;
            if (period_ == 0 || len <= 2 * period_) {
                for (Index j = lo; j <= hi; ++j) {
                    acc *= detail::ScaledReal(weight(j));
                }
                return;
            }
            detail::ScaledReal cycle;
            for (Index j = lo; j < lo + period_; ++j) {
                cycle *= detail::ScaledReal(weight(j));
            }
            const Index reps = len / period_;
            acc *= cycle.pow(static_cast<std::uint64_t>(reps));
            for (Index j = lo + reps * period_; j <= hi; ++j) {
                acc *= detail::ScaledReal(weight(j));
            }
        });
        return acc;
    }

    /// min_{first <= j <= last} w_j; +inf for an empty range.
    double min_weight(Index first, Index last) const {
        double m = std::numeric_limits<double>::infinity();
        for_each_segment(first, last, [&](Index lo, Index hi) {
            const Index end = (period_ == 0) ? hi : std::min(hi, lo + period_ - 1);
            for (Index j = lo; j <= end; ++j) {
                m = std::min(m, weight(j));
            }
        });
        return m;
    }

    /// Sequence with w'_n = w_{n - offset}.
    WeightSequence shifted(Index offset) const {
        std::vector<WeightRule> out;
        for (const auto& r : rules_) {
            out.push_back({transform(r.when, [offset](Index n) { return n + offset; }, false), r.weight});
        }
        return WeightSequence(std::move(out));
    }

    /// Sequence with w'_n = w_{-n}.
    WeightSequence reflected() const {
        std::vector<WeightRule> out;
        for (const auto& r : rules_) {
            out.push_back({transform(r.when, [](Index n) { return -n; }, true), r.weight});
        }
        return WeightSequence(std::move(out));
    }

private:
    static constexpr Index kMaxPeriod = 4096;

    template <class Fn>
    void for_each_segment(Index first, Index last, Fn&& fn) const {
        Index lo = first;
        while (lo <= last) {
            const auto it = std::upper_bound(breaks_.begin(), breaks_.end(), lo);
            const Index hi = (it == breaks_.end()) ? last : std::min(last, *it - 1);
            fn(lo, hi);
            lo = hi + 1;
        }
    }

    void collect_breakpoints(const Predicate& p) {
        if (const auto* a = std::get_if<AtLeast>(&p)) {
            breaks_.push_back(a->bound);
        } else if (const auto* b = std::get_if<Below>(&p)) {
            breaks_.push_back(b->bound);
        } else if (const auto* r = std::get_if<InRange>(&p)) {
            breaks_.push_back(r->first);
            breaks_.push_back(r->last + 1);
        } else if (const auto* l = std::get_if<Listed>(&p)) {
            for (const Index i : l->indices) {
                breaks_.push_back(i);
                breaks_.push_back(i + 1);
            }
        }
    }

    // Rewrites a predicate under the index map n -> f(n), f = shift or negation.
    template <class F>
    static Predicate transform(const Predicate& p, F f, bool negate) {
        if (const auto* a = std::get_if<AtLeast>(&p)) {
            return negate ? Predicate{Below{-a->bound + 1}} : Predicate{AtLeast{f(a->bound)}};
        }
        if (const auto* b = std::get_if<Below>(&p)) {
            return negate ? Predicate{AtLeast{-b->bound + 1}} : Predicate{Below{f(b->bound)}};
        }
        if (const auto* r = std::get_if<InRange>(&p)) {
            const Index x = f(r->first);
            const Index y = f(r->last);
            return InRange{std::min(x, y), std::max(x, y)};
        }
        if (const auto* res = std::get_if<Residue>(&p)) {
            Residue out{res->modulus, {}};
            for (const Index r : res->residues) {
                out.residues.push_back(floor_mod(f(r), res->modulus));
            }
            return out;
        }
        if (const auto* l = std::get_if<Listed>(&p)) {
            Listed out;
            for (const Index i : l->indices) {
                out.indices.push_back(f(i));
            }
            return out;
        }
        return Otherwise{};
    }

    std::vector<WeightRule> rules_;
    std::vector<Index> breaks_;
    Index period_ = 1;
};

// ---------------------------------------------------------------------------
// Shift operators

enum class Direction { forward, backward };

inline const char* to_string(Direction d) { return d == Direction::forward ? "forward" : "backward"; }

class ShiftOperator {
public:
    static constexpr double kDefaultFloor = 1e-9;
    static constexpr std::uint64_t kDefaultMaxPower = 10000;

    ShiftOperator(Direction direction, WeightSequence weights, bool invertible = true,
                  double invertibility_floor = kDefaultFloor, std::uint64_t max_power = kDefaultMaxPower)
        : direction_(direction),
          weights_(std::move(weights)),
          invertible_(invertible),
          floor_(invertibility_floor),
          max_power_(max_power) {
        if (!(floor_ > 0.0)) {
            throw ConfigError("invertibility_floor must be positive");
        }
    }

    static ShiftOperator forward(WeightSequence w) { return {Direction::forward, std::move(w)}; }
    static ShiftOperator backward(WeightSequence w) { return {Direction::backward, std::move(w)}; }

    /// lambda * B, the unweighted backward shift scaled by lambda > 0.
    static ShiftOperator scaled_backward(double lambda) {
        return {Direction::backward, WeightSequence::constant(lambda)};
    }

    Direction direction() const { return direction_; }
    const WeightSequence& weights() const { return weights_; }
    bool invertible() const { return invertible_; }
    double invertibility_floor() const { return floor_; }
    std::uint64_t max_power() const { return max_power_; }

    /// +1 for forward, -1 for backward.
    Index step() const { return direction_ == Direction::forward ? 1 : -1; }

    void check_power(std::uint64_t k) const {
        if (k > max_power_) {
            throw DomainError("power " + std::to_string(k) + " exceeds max_power " + std::to_string(max_power_));
        }
    }

private:
    Direction direction_;
    WeightSequence weights_;
    bool invertible_;
    double floor_;
    std::uint64_t max_power_;
};

namespace detail {

// Weight indices on the path of T^k e_start (inverse=false) or S^k e_start.
inline std::pair<Index, Index> product_range(const ShiftOperator& t, Index start, Index k, bool inverse) {
    if (t.direction() == Direction::forward) {
        return inverse ? std::pair{start - k, start - 1} : std::pair{start, start + k - 1};
    }
    return inverse ? std::pair{start + 1, start + k} : std::pair{start - k + 1, start};
}

inline ScaledReal scaled_weight_product(const ShiftOperator& t, Index start, std::uint64_t k, bool inverse) {
    t.check_power(k);
    if (k == 0) {
        return {};
    }
    const auto [first, last] = product_range(t, start, static_cast<Index>(k), inverse);
    if (!inverse) {
        return t.weights().product(first, last);
    }
    const double m = t.weights().min_weight(first, last);
    if (m < t.invertibility_floor()) {
        throw NoninvertibleError("weight " + std::to_string(m) + " below invertibility floor on [" +
                                 std::to_string(first) + ", " + std::to_string(last) + "]");
    }
    return t.weights().product(first, last).reciprocal();
}

} // namespace detail

/// Product of the weights met by T^k e_start (inverse=false) or by S^k e_start
/// (inverse=true, reciprocals). Saturates to 0 or +inf outside double range.
inline double weight_product(const ShiftOperator& t, Index start, std::uint64_t k, bool inverse) {
    return detail::scaled_weight_product(t, start, k, inverse).value();
}

namespace detail {

inline LatticeVector move_coefficients(const ShiftOperator& t, std::uint64_t k, const LatticeVector& v,
                                       bool inverse) {
    t.check_power(k);
    if (k == 0) {
        return v;
    }
    const Index offset = (inverse ? -t.step() : t.step()) * static_cast<Index>(k);
    if (inverse && v.one_sided()) {
        for (const Index n : v.support()) {
            if (n + offset < 0) {
                throw DomainError("right inverse of a forward shift leaves l2(N) at index " + std::to_string(n));
            }
        }
    }
    Window w{v.lo() + offset, v.hi() + offset};
    if (v.one_sided()) {
        if (w.hi < 0) {
            return LatticeVector::zeros({0, 0}, true);
        }
        w.lo = std::max<Index>(w.lo, 0);
    }
    LatticeVector out = LatticeVector::zeros(w, v.one_sided());
    for (Index n = v.lo(); n <= v.hi(); ++n) {
        const Scalar c = v[n];
        if (c == Scalar{}) {
            continue;
        }
        const Index target = n + offset;
        if (v.one_sided() && target < 0) {
            continue;  // B e_0 = 0 on l2(N)
        }
        out.set(target, c * scaled_weight_product(t, n, k, inverse).value());
    }
    return out;
}

} // namespace detail

/// T^k v through the closed-form path products.
inline LatticeVector apply_power(const ShiftOperator& t, std::uint64_t k, const LatticeVector& v) {
    return detail::move_coefficients(t, k, v, false);
}

inline LatticeVector apply(const ShiftOperator& t, const LatticeVector& v) { return apply_power(t, 1, v); }

/// S^k v, S the right inverse: forward S e_m = e_{m-1} / w_{m-1},
/// backward S e_m = e_{m+1} / w_{m+1}.
inline LatticeVector right_inverse_power(const ShiftOperator& t, std::uint64_t k, const LatticeVector& v) {
    if (!t.invertible()) {
        throw NoninvertibleError("right inverse requested for an operator marked non-invertible");
    }
    return detail::move_coefficients(t, k, v, true);
}

inline LatticeVector right_inverse_apply(const ShiftOperator& t, const LatticeVector& v) {
    return right_inverse_power(t, 1, v);
}

/// Hilbert adjoint: forward(w)* is backward with w'_m = w_{m-1}, and vice versa.
inline ShiftOperator adjoint(const ShiftOperator& t) {
    const bool fwd = t.direction() == Direction::forward;
    return {fwd ? Direction::backward : Direction::forward, t.weights().shifted(fwd ? 1 : -1), t.invertible(),
            t.invertibility_floor(), t.max_power()};
}

/// U T U with U e_n = e_{-n}: reverses the direction and reflects the weights.
inline ShiftOperator flip_conjugate(const ShiftOperator& t) {
    const bool fwd = t.direction() == Direction::forward;
    return {fwd ? Direction::backward : Direction::forward, t.weights().reflected(), t.invertible(),
            t.invertibility_floor(), t.max_power()};
}

/// (U v)_n = v_{-n}.
inline LatticeVector flip(const LatticeVector& v) {
    LatticeVector out = LatticeVector::zeros({-v.hi(), -v.lo()});
    for (Index n = v.lo(); n <= v.hi(); ++n) {
        out.set(-n, v[n]);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Diagonal stand-ins for operators with explicit eigenstructure

inline Scalar ipow(Scalar z, std::uint64_t k) {
    Scalar result{1.0, 0.0};
    while (k != 0) {
        if ((k & 1U) != 0) {
            result *= z;
        }
        z *= z;
        k >>= 1U;
    }
    return result;
}

struct Eigenpair {
    Index index;
    Scalar eigenvalue;
};

/// D e_k = lambda_k e_k on the listed indices, zero elsewhere.
class DiagonalOperator {
public:
    DiagonalOperator() = default;

    explicit DiagonalOperator(std::vector<Eigenpair> pairs) : pairs_(std::move(pairs)) {
        std::sort(pairs_.begin(), pairs_.end(), [](const auto& a, const auto& b) { return a.index < b.index; });
        for (std::size_t i = 1; i < pairs_.size(); ++i) {
            if (pairs_[i].index == pairs_[i - 1].index) {
                throw DomainError("diagonal operator: duplicate index " + std::to_string(pairs_[i].index));
            }
        }
    }

    const std::vector<Eigenpair>& eigenpairs() const { return pairs_; }

    std::optional<Scalar> eigenvalue(Index n) const {
        const auto it = std::lower_bound(pairs_.begin(), pairs_.end(), n,
                                         [](const Eigenpair& p, Index i) { return p.index < i; });
        if (it == pairs_.end() || it->index != n) {
            return std::nullopt;
        }
        return it->eigenvalue;
    }

private:
    std::vector<Eigenpair> pairs_;
};

/// D^k v; coefficients at unlisted indices are annihilated for k >= 1.
inline LatticeVector apply_power(const DiagonalOperator& d, std::uint64_t k, const LatticeVector& v) {
    if (k == 0) {
        return v;
    }
    LatticeVector out = LatticeVector::zeros(v.window(), v.one_sided());
    for (Index n = v.lo(); n <= v.hi(); ++n) {
        const Scalar c = v[n];
        if (c == Scalar{}) {
            continue;
        }
        if (const auto lambda = d.eigenvalue(n)) {
            out.set(n, c * ipow(*lambda, k));
        }
    }
    return out;
}

inline LatticeVector apply(const DiagonalOperator& d, const LatticeVector& v) { return apply_power(d, 1, v); }

/// Strict form of apply_power: the support of v must lie on listed indices.
inline LatticeVector diagonal_power_apply(const DiagonalOperator& d, std::uint64_t k, const LatticeVector& v) {
    for (const Index n : v.support()) {
        if (!d.eigenvalue(n)) {
            throw DomainError("diagonal_power_apply: index " + std::to_string(n) + " is not an eigenvector index");
        }
    }
    return apply_power(d, k, v);
}

/// D^p as a diagonal operator.
inline DiagonalOperator diagonal_power(const DiagonalOperator& d, std::uint64_t p) {
    std::vector<Eigenpair> out;
    for (const auto& e : d.eigenpairs()) {
        out.push_back({e.index, ipow(e.eigenvalue, p)});
    }
    return DiagonalOperator(std::move(out));
}

// ---------------------------------------------------------------------------

/// Op^p treated as an operator in its own right (e.g. T^2 for parity-preserving orbits).
template <class Op>
struct OperatorPower {
    Op base;
    std::uint64_t exponent = 1;
};

template <class Op>
LatticeVector apply_power(const OperatorPower<Op>& t, std::uint64_t k, const LatticeVector& v) {
    return apply_power(t.base, t.exponent * k, v);
}

} // namespace shiftlab
