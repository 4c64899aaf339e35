#pragma once

/**
 * @file seqspace.hpp
 * @brief Truncated l2(Z) and l2(N) vectors.
 *
 * A LatticeVector stores complex coefficients on a closed integer window
 * [lo, hi]. Indices outside the window read as zero, so vectors with
 * different windows combine freely. One-sided vectors model l2(N): they
 * refuse writes at negative indices.
 */

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "errors.hpp"

namespace shiftlab {

using Scalar = std::complex<double>;
using Index = std::int64_t;

/// Tolerance for identities that hold exactly up to rounding.
constexpr double kIdentityTol = 1e-12;

/// Closed integer interval [lo, hi].
struct Window {
    Index lo = 0;
    Index hi = 0;

    static Window centered(Index half_width) { return {-half_width, half_width}; }

    bool contains(Index n) const { return lo <= n && n <= hi; }
    std::size_t size() const { return static_cast<std::size_t>(hi - lo + 1); }

    friend bool operator==(const Window&, const Window&) = default;
};

inline Window hull(const Window& a, const Window& b) {
    return {std::min(a.lo, b.lo), std::max(a.hi, b.hi)};
}

struct WindowPolicy {
    Index default_half_width = 64;
    double leakage_tolerance = 1e-12;

    Window default_window() const { return Window::centered(default_half_width); }
};

class LatticeVector {
public:
    /// The zero vector on the window [0, 0].
    LatticeVector() : coeffs_(1, Scalar{}) {}

    LatticeVector(Index lo, std::vector<Scalar> coeffs, bool one_sided = false)
        : lo_(lo), coeffs_(std::move(coeffs)), one_sided_(one_sided) {
        if (coeffs_.empty()) {
            throw DomainError("LatticeVector: coefficient list must be non-empty");
        }
        if (one_sided_ && lo_ < 0) {
            throw DomainError("LatticeVector: one-sided vector cannot start at a negative index");
        }
    }

    static LatticeVector zeros(Window w, bool one_sided = false) {
        if (w.hi < w.lo) {
            throw DomainError("LatticeVector: window_lo must not exceed window_hi");
        }
        return LatticeVector(w.lo, std::vector<Scalar>(w.size(), Scalar{}), one_sided);
    }

    /// c * e_n.
    static LatticeVector basis(Index n, Scalar c = 1.0, bool one_sided = false) {
        return LatticeVector(n, {c}, one_sided);
    }

    Index lo() const { return lo_; }
    Index hi() const { return lo_ + static_cast<Index>(coeffs_.size()) - 1; }
    Window window() const { return {lo(), hi()}; }
    std::size_t size() const { return coeffs_.size(); }
    bool one_sided() const { return one_sided_; }
    std::span<const Scalar> coeffs() const { return coeffs_; }

    Scalar operator[](Index n) const {
        if (n < lo() || n > hi()) {
            return Scalar{};
        }
        return coeffs_[static_cast<std::size_t>(n - lo_)];
    }

    /// Writes coefficient n, growing the window when n falls outside it.
    void set(Index n, Scalar c) {
        if (one_sided_ && n < 0) {
            throw DomainError("LatticeVector: negative index " + std::to_string(n) +
                              " written to a one-sided vector");
        }
        grow_to(hull(window(), {n, n}));
        coeffs_[static_cast<std::size_t>(n - lo_)] = c;
    }

    void add(Index n, Scalar c) { set(n, (*this)[n] + c); }

    /// Same vector on a window covering both the current window and w.
    LatticeVector extended(Window w) const {
        LatticeVector out = *this;
        out.grow_to(hull(window(), w));
        return out;
    }

    /// Coefficients inside w only (clipped to n >= 0 for one-sided vectors).
    /// An empty intersection yields zero on w.
    LatticeVector restricted(Window w) const {
        if (one_sided_) {
            w.lo = std::max<Index>(w.lo, 0);
            w.hi = std::max<Index>(w.hi, 0);
        }
        LatticeVector out = zeros(w, one_sided_);
        const Index from = std::max(w.lo, lo());
        const Index to = std::min(w.hi, hi());
        for (Index n = from; n <= to; ++n) {
            out.coeffs_[static_cast<std::size_t>(n - w.lo)] = (*this)[n];
        }
        return out;
    }

    bool is_zero() const {
        return std::all_of(coeffs_.begin(), coeffs_.end(), [](Scalar c) { return c == Scalar{}; });
    }

    /// Indices carrying a nonzero coefficient, ascending.
    std::vector<Index> support() const {
        std::vector<Index> out;
        for (std::size_t i = 0; i < coeffs_.size(); ++i) {
            if (coeffs_[i] != Scalar{}) {
                out.push_back(lo_ + static_cast<Index>(i));
            }
        }
        return out;
    }

    /// Value equality; windows may differ.
    friend bool operator==(const LatticeVector& a, const LatticeVector& b) {
        const Window w = hull(a.window(), b.window());
        for (Index n = w.lo; n <= w.hi; ++n) {
            if (a[n] != b[n]) {
                return false;
            }
        }
        return true;
    }

    LatticeVector& operator*=(Scalar a) {
        for (auto& c : coeffs_) {
            c *= a;
        }
        return *this;
    }

private:
    void grow_to(Window w) {
        if (w.lo == lo() && w.hi == hi()) {
            return;
        }
        if (one_sided_ && w.lo < 0) {
            throw DomainError("LatticeVector: one-sided window cannot extend below 0");
        }
        std::vector<Scalar> grown(w.size(), Scalar{});
        std::copy(coeffs_.begin(), coeffs_.end(),
                  grown.begin() + static_cast<std::ptrdiff_t>(lo_ - w.lo));
        coeffs_ = std::move(grown);
        lo_ = w.lo;
    }

    Index lo_ = 0;
    std::vector<Scalar> coeffs_;
    bool one_sided_ = false;
};

/// <u, v> = sum u_n conj(v_n); linear in the first argument.
inline Scalar inner(const LatticeVector& u, const LatticeVector& v) {
    const Index from = std::max(u.lo(), v.lo());
    const Index to = std::min(u.hi(), v.hi());
    Scalar acc{};
    for (Index n = from; n <= to; ++n) {
        acc += u[n] * std::conj(v[n]);
    }
    return acc;
}

/// l2 norm, accumulated with scaling so that huge or tiny coefficients
/// do not overflow or flush to zero when squared.
inline double norm(const LatticeVector& v) {
    double scale = 0.0;
    for (const Scalar c : v.coeffs()) {
        scale = std::max(scale, std::abs(c));
    }
    if (scale == 0.0 || !std::isfinite(scale)) {
        return scale;
    }
    double sum = 0.0;
    for (const Scalar c : v.coeffs()) {
        const double r = std::abs(c) / scale;
        sum += r * r;
    }
    return scale * std::sqrt(sum);
}

/// Sum of coefficient moduli.
inline double norm_l1(const LatticeVector& v) {
    double sum = 0.0;
    for (const Scalar c : v.coeffs()) {
        sum += std::abs(c);
    }
    return sum;
}

/// a*x + y on the union of both windows.
inline LatticeVector axpy(Scalar a, const LatticeVector& x, const LatticeVector& y) {
    const Window w = hull(x.window(), y.window());
    LatticeVector out = LatticeVector::zeros(w, x.one_sided() && y.one_sided());
    for (Index n = w.lo; n <= w.hi; ++n) {
        out.set(n, a * x[n] + y[n]);
    }
    return out;
}

inline LatticeVector operator+(const LatticeVector& x, const LatticeVector& y) { return axpy(1.0, x, y); }
inline LatticeVector operator-(const LatticeVector& x, const LatticeVector& y) { return axpy(-1.0, y, x); }

inline LatticeVector operator*(Scalar a, LatticeVector v) {
    v *= a;
    return v;
}

inline double distance(const LatticeVector& x, const LatticeVector& y) { return norm(x - y); }

/// Largest coefficientwise |x_n - y_n| relative to max(|y_n|, floor).
inline double max_relative_difference(const LatticeVector& x, const LatticeVector& y, double floor = 1e-300) {
    const Window w = hull(x.window(), y.window());
    double worst = 0.0;
    for (Index n = w.lo; n <= w.hi; ++n) {
        const double scale = std::max(std::abs(y[n]), floor);
        worst = std::max(worst, std::abs(x[n] - y[n]) / scale);
    }
    return worst;
}

} // namespace shiftlab
