#pragma once

// Independent reference implementations for the test suites. Nothing here
// calls into the closed-form product code: weights are looked up from the
// test's own rule list and operators are applied one step at a time.

#include <cmath>
#include <complex>
#include <functional>
#include <random>
#include <vector>

#include "shiftlab/shiftops.hpp"

namespace oracle {

using shiftlab::Index;
using shiftlab::LatticeVector;
using shiftlab::Scalar;

struct Rule {
    std::function<bool(Index)> when;
    double weight;
    shiftlab::Predicate pred;
};

struct Weights {
    std::vector<Rule> rules;
    double fallback = 1.0;

    double operator()(Index n) const {
        for (const auto& r : rules) {
            if (r.when(n)) {
                return r.weight;
            }
        }
        return fallback;
    }

    shiftlab::WeightSequence sequence() const {
        std::vector<shiftlab::WeightRule> out;
        for (const auto& r : rules) {
            out.push_back({r.pred, r.weight});
        }
        out.push_back({shiftlab::Otherwise{}, fallback});
        return shiftlab::WeightSequence(out);
    }
};

inline Index fmod_pos(Index n, Index q) { return ((n % q) + q) % q; }

/// Up to four rules drawn from every predicate kind, weights log-uniform in [lo, hi].
inline Weights random_weights(std::mt19937_64& rng, double lo = 0.1, double hi = 10.0) {
    std::uniform_real_distribution<double> logw(std::log(lo), std::log(hi));
    std::uniform_int_distribution<int> kind(0, 4);
    std::uniform_int_distribution<int> count(0, 4);
    std::uniform_int_distribution<Index> point(-30, 30);
    std::uniform_int_distribution<Index> mod(2, 5);
    Weights w;
    w.fallback = std::exp(logw(rng));
    const int n = count(rng);
    for (int i = 0; i < n; ++i) {
        const double wt = std::exp(logw(rng));
        switch (kind(rng)) {
        case 0: {
            const Index c = point(rng);
            w.rules.push_back({[c](Index m) { return m >= c; }, wt, shiftlab::AtLeast{c}});
            break;
        }
        case 1: {
            const Index c = point(rng);
            w.rules.push_back({[c](Index m) { return m < c; }, wt, shiftlab::Below{c}});
            break;
        }
        case 2: {
            Index a = point(rng);
            Index b = point(rng);
            if (a > b) {
                std::swap(a, b);
            }
            w.rules.push_back({[a, b](Index m) { return a <= m && m <= b; }, wt, shiftlab::InRange{a, b}});
            break;
        }
        case 3: {
            const Index q = mod(rng);
            const Index r = std::uniform_int_distribution<Index>(0, q - 1)(rng);
            w.rules.push_back({[q, r](Index m) { return fmod_pos(m, q) == r; }, wt, shiftlab::Residue{q, {r}}});
            break;
        }
        default: {
            std::vector<Index> idx{point(rng), point(rng), point(rng)};
            w.rules.push_back({[idx](Index m) { return std::find(idx.begin(), idx.end(), m) != idx.end(); }, wt,
                               shiftlab::Listed{idx}});
            break;
        }
        }
    }
    return w;
}

/// Random complex vector with a few nonzero entries near the origin.
inline LatticeVector random_vector(std::mt19937_64& rng, bool one_sided = false, Index reach = 12) {
    std::uniform_int_distribution<Index> pos(one_sided ? 0 : -reach, reach);
    std::uniform_int_distribution<int> count(1, 6);
    std::uniform_real_distribution<double> c(-1.0, 1.0);
    LatticeVector v = LatticeVector::basis(pos(rng), 0.0, one_sided);
    const int n = count(rng);
    for (int i = 0; i < n; ++i) {
        v.set(pos(rng), Scalar(c(rng), c(rng)));
    }
    return v;
}

/// One application of the weighted shift, from T e_n = w_n e_{n +- 1}.
inline LatticeVector step(const Weights& w, bool forward, const LatticeVector& v, bool one_sided) {
    LatticeVector out = LatticeVector::basis(one_sided ? 0 : v.lo(), 0.0, one_sided);
    for (Index n = v.lo(); n <= v.hi(); ++n) {
        if (v[n] == Scalar{}) {
            continue;
        }
        const Index to = forward ? n + 1 : n - 1;
        if (one_sided && to < 0) {
            continue;
        }
        out.add(to, w(n) * v[n]);
    }
    return out;
}

inline LatticeVector steps(const Weights& w, bool forward, LatticeVector v, std::uint64_t k, bool one_sided) {
    for (std::uint64_t i = 0; i < k; ++i) {
        v = step(w, forward, v, one_sided);
    }
    return v;
}

/// One application of the right inverse: e_m -> e_{m-1} / w_{m-1} (forward T).
inline LatticeVector inverse_step(const Weights& w, bool forward, const LatticeVector& v) {
    LatticeVector out = LatticeVector::basis(v.lo(), 0.0);
    for (Index m = v.lo(); m <= v.hi(); ++m) {
        if (v[m] == Scalar{}) {
            continue;
        }
        const Index to = forward ? m - 1 : m + 1;
        out.add(to, v[m] / w(to));
    }
    return out;
}

/// prod_{j=first}^{last} w_j by direct multiplication in long double.
inline long double product(const Weights& w, Index first, Index last) {
    long double p = 1.0L;
    for (Index j = first; j <= last; ++j) {
        p *= static_cast<long double>(w(j));
    }
    return p;
}

/// max_n |x_n - y_n| / max(|y_n|, tiny) over both windows.
inline double coefficient_error(const LatticeVector& x, const LatticeVector& y) {
    return shiftlab::max_relative_difference(x, y, 1e-300);
}

} // namespace oracle
