#pragma once

#include <cmath>
#include <cstdint>

namespace shiftlab::detail {

// Positive real held as mantissa * 2^exponent, mantissa in [0.5, 1).
// Long weight products leave the double range long before the true value
// stops mattering; keeping the exponent separately lets a product like
// 2^5000 * 2^-5001 come out as 0.5 instead of inf * 0.
class ScaledReal {
public:
    ScaledReal() = default;

    explicit ScaledReal(double x) {
        int e = 0;
        mant_ = std::frexp(x, &e);
        exp_ = e;
    }

    ScaledReal& operator*=(const ScaledReal& o) {
        int e = 0;
        mant_ = std::frexp(mant_ * o.mant_, &e);
        exp_ += o.exp_ + e;
        return *this;
    }

    friend ScaledReal operator*(ScaledReal a, const ScaledReal& b) { return a *= b; }

    ScaledReal reciprocal() const {
        ScaledReal r(1.0 / mant_);
        r.exp_ -= exp_;
        return r;
    }

    // Square-and-multiply, renormalizing at every step.
    ScaledReal pow(std::uint64_t k) const {
        ScaledReal result;
        ScaledReal base = *this;
        while (k != 0) {
            if ((k & 1U) != 0) {
                result *= base;
            }
            base *= base;
            k >>= 1U;
        }
        return result;
    }

    // Saturates to 0 or +inf outside the double range.
    double value() const {
        if (exp_ > 4096) {
            return HUGE_VAL;
        }
        if (exp_ < -4096) {
            return 0.0;
        }
        return std::ldexp(mant_, static_cast<int>(exp_));
    }

    std::int64_t exponent() const { return exp_; }

private:
    double mant_ = 0.5;
    std::int64_t exp_ = 1;
};

} // namespace shiftlab::detail
