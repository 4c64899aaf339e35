#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "oracle.hpp"
#include "shiftlab/criteria.hpp"

using namespace shiftlab;

namespace {

// w_n = 1/2 for n >= 0 and 3 for n < 0.
ShiftOperator half_and_three() { return ShiftOperator::forward(WeightSequence::split(0, 0.5, 3.0)); }

const PowerSchedule even20 = PowerSchedule::arithmetic(2, 0, 20);

} // namespace

TEST(Schedule, ArithmeticAndValidation) {
    EXPECT_EQ(PowerSchedule::arithmetic(2, 0, 3).powers(), (std::vector<std::uint64_t>{2, 4, 6}));
    EXPECT_EQ(PowerSchedule::arithmetic(3, 1, 2).powers(), (std::vector<std::uint64_t>{4, 7}));
    EXPECT_THROW(PowerSchedule({2, 2}), ConfigError);
    EXPECT_THROW(PowerSchedule({0, 1}), ConfigError);
    EXPECT_THROW(PowerSchedule(std::vector<std::uint64_t>{}), ConfigError);
    EXPECT_THROW(PowerSchedule::arithmetic(0, 1, 3), ConfigError);
}

TEST(CertifyLimit, Cases) {
    const std::vector<double> decay{1, 0.5, 0.25, 0.1, 1e-7};
    EXPECT_EQ(certify_limit(decay, 1e-6), Verdict::satisfied);
    const std::vector<double> flat{1, 1, 1, 1, 1};
    EXPECT_EQ(certify_limit(flat, 1e-6), Verdict::violated);
    const std::vector<double> slow{1, 0.9, 0.8, 0.7, 0.6};
    EXPECT_EQ(certify_limit(slow, 1e-6), Verdict::inconclusive);
    const std::vector<double> bumpy{1e-8, 1e-7, 1e-8, 1e-9, 1e-10};
    EXPECT_EQ(certify_limit(bumpy, 1e-6), Verdict::inconclusive);
    const std::vector<double> short_up{1, 2};
    EXPECT_EQ(certify_limit(short_up, 1e-6), Verdict::inconclusive);
    EXPECT_EQ(certify_limit(std::vector<double>{}, 1e-6), Verdict::inconclusive);
}

TEST(Combine, ViolatedDominates) {
    EXPECT_EQ(combine({Verdict::satisfied, Verdict::satisfied}), Verdict::satisfied);
    EXPECT_EQ(combine({Verdict::satisfied, Verdict::inconclusive}), Verdict::inconclusive);
    EXPECT_EQ(combine({Verdict::inconclusive, Verdict::violated}), Verdict::violated);
}

TEST(ShiftCriterion, HalfAndThreeProducts) {
    const auto r = shift_criterion_check(half_and_three(), PatternSubspace::even_zero(), even20, 1, 1e-6);
    EXPECT_EQ(r.verdict, Verdict::satisfied);
    ASSERT_EQ(r.per_k.size(), 20u);
    for (const auto& row : r.per_k) {
        const double k = static_cast<double>(row.k);
        EXPECT_EQ(row.n, 2 * row.k);
        EXPECT_NEAR(row.forward_product / std::pow(2.0, -2 * k), 1.0, 1e-12);
        // Path of S^{2k} e_1: indices 0, -1, ..., 1-2k, i.e. 1/w_0 = 2 times 2k-1 factors of 1/3.
        EXPECT_NEAR(row.inverse_product / (2.0 * std::pow(3.0, 1 - 2 * k)), 1.0, 1e-12);
        EXPECT_TRUE(row.invariance);
    }
    EXPECT_FALSE(r.invariance_violation);
}

TEST(ShiftCriterion, OddScheduleBreaksInvariance) {
    const auto r = shift_criterion_check(half_and_three(), PatternSubspace::even_zero(), PowerSchedule::arithmetic(1, 0, 10),
                                         1, 1e-6);
    EXPECT_EQ(r.verdict, Verdict::violated);
    ASSERT_TRUE(r.invariance_violation);
    EXPECT_EQ(std::get<0>(*r.invariance_violation), 1u);
}

TEST(ShiftCriterion, UnweightedShiftIsViolated) {
    const auto t = ShiftOperator::forward(WeightSequence::constant(1.0));
    const auto r = shift_criterion_check(t, PatternSubspace::whole(), even20, 0, 1e-6);
    EXPECT_EQ(r.verdict, Verdict::violated);
}

TEST(ShiftCriterion, Preconditions) {
    EXPECT_THROW(shift_criterion_check(half_and_three(), PatternSubspace::even_zero(), even20, 0, 1e-6), PreconditionError);
    const ShiftOperator flagged(Direction::forward, WeightSequence::constant(0.5), false);
    EXPECT_THROW(shift_criterion_check(flagged, PatternSubspace::whole(), even20, 0, 1e-6), NoninvertibleError);
}

TEST(ShiftCriterion, BackwardShiftMirrorsForward) {
    // Flip conjugation carries a forward shift at m to a backward shift at -m.
    const auto f = half_and_three();
    const auto b = flip_conjugate(f);
    const auto rf = shift_criterion_check(f, PatternSubspace::whole(), even20, 1, 1e-6);
    const auto rb = shift_criterion_check(b, PatternSubspace::whole(), even20, -1, 1e-6);
    EXPECT_EQ(rb.verdict, rf.verdict);
    for (std::size_t k = 0; k < rf.per_k.size(); ++k) {
        EXPECT_NEAR(rb.per_k[k].forward_product / rf.per_k[k].forward_product, 1.0, 1e-12);
        EXPECT_NEAR(rb.per_k[k].inverse_product / rf.per_k[k].inverse_product, 1.0, 1e-12);
    }
}

TEST(Propagation, PropagatesToOtherOddIndices) {
    const auto r = lemma5_propagation(half_and_three(), PatternSubspace::even_zero(), even20, 1, {3, -1, 5}, 1e-6);
    EXPECT_EQ(r.verdict, Verdict::satisfied);
    for (const auto& row : r.per_k) {
        // Oracle: |T^n e_r| = product of weights along the path, multiplied directly.
        double p = 1.0;
        for (Index j = -1; j < -1 + static_cast<Index>(row.n); ++j) {
            p *= j >= 0 ? 0.5 : 3.0;
        }
        EXPECT_NEAR(row.metrics.at("norm_e-1") / p, 1.0, 1e-12);
    }
}

TEST(Propagation, InvarianceFailureIsAPreconditionError) {
    EXPECT_THROW(lemma5_propagation(half_and_three(), PatternSubspace::even_zero(), PowerSchedule::arithmetic(1, 0, 6), 1,
                                    {3}, 1e-6),
                 PreconditionError);
}

TEST(MhcConditions, HalfAndThreeDenseSet) {
    const std::vector<LatticeVector> dense{LatticeVector::basis(1), LatticeVector::basis(3), LatticeVector::basis(-1),
                                           LatticeVector(-3, {1.0, 0.0, Scalar(0, 2), 0.0, 0.0, 0.0, -1.0})};
    const auto r = mhc_criterion_conditions(half_and_three(), PatternSubspace::even_zero(), even20, dense, 1e-6);
    EXPECT_EQ(r.verdict, Verdict::satisfied);
    for (const auto& row : r.per_k) {
        EXPECT_LE(row.metrics.at("c3_max_relative"), 1e-12);
    }
    EXPECT_THROW(mhc_criterion_conditions(half_and_three(), PatternSubspace::even_zero(), even20,
                                          {LatticeVector::basis(2)}, 1e-6),
                 PreconditionError);
}

TEST(Witness, IdentityAndBounds) {
    const DiagonalOperator t({{0, 0.3}, {1, 0.7}, {2, 1.5}, {3, 4.0}});
    const std::vector<SpectralTerm> xs{{1.0, 0.3, 0}, {Scalar(0.5, -0.25), 0.7, 1}};
    const std::vector<SpectralTerm> ys{{2.0, 1.5, 2}, {Scalar(-1.0, 0.5), 4.0, 3}};
    for (std::uint64_t n = 0; n <= 40; ++n) {
        const auto r = spectrum_witness(xs, ys, 1, n, t);
        EXPECT_LE(r.residual, 1e-12);
        EXPECT_LE(r.decay_norm, norm(r.x) * std::pow(0.7, n) * (1 + 1e-12));
        const double c = 2.0 + std::abs(Scalar(-1.0, 0.5));
        EXPECT_LE(r.z_norm, c * std::pow(1.5, -static_cast<double>(n)) * (1 + 1e-12));
        // Oracle: coefficientwise (T)^n (x + z) computed by hand.
        EXPECT_NEAR(std::abs(r.image[2] - 2.0), 0.0, 1e-12);
        EXPECT_NEAR(std::abs(r.image[0] - std::pow(0.3, n)), 0.0, 1e-15);
    }
}

TEST(Witness, Preconditions) {
    const DiagonalOperator t({{0, 0.3}, {1, 1.0}, {2, 1.5}});
    const std::vector<SpectralTerm> unit{{1.0, 1.0, 1}};
    const std::vector<SpectralTerm> inside{{1.0, 0.3, 0}};
    const std::vector<SpectralTerm> outside{{1.0, 1.5, 2}};
    EXPECT_THROW(spectrum_witness(unit, outside, 1, 3, t), PreconditionError);
    EXPECT_THROW(spectrum_witness(outside, inside, 1, 3, t), PreconditionError);
    EXPECT_THROW(spectrum_witness(inside, inside, 1, 3, t), PreconditionError);
    const std::vector<SpectralTerm> wrong{{1.0, 0.4, 0}};
    EXPECT_THROW(spectrum_witness(wrong, outside, 1, 3, t), PreconditionError);
}

TEST(Witness, PowerPRepresentsTp) {
    const DiagonalOperator base({{0, 0.5}, {1, 2.0}});
    const auto t2 = diagonal_power(base, 2);
    const std::vector<SpectralTerm> xs{{1.0, 0.25, 0}};
    const std::vector<SpectralTerm> ys{{1.0, 4.0, 1}};
    const auto r = spectrum_witness(xs, ys, 2, 3, t2);
    EXPECT_NEAR(r.decay_norm, std::pow(0.25, 3), 1e-15);
    EXPECT_LE(r.residual, 1e-12);
}

TEST(SpanDensity, CoverageOfAdmissibleIndices) {
    const auto d = eigen_span_density({1, 3}, {-1, 1, 3}, PatternSubspace::even_zero(), {-2, 4});
    EXPECT_FALSE(d.small_dense);
    EXPECT_EQ(d.small_uncovered, (std::vector<Index>{-1}));
    EXPECT_TRUE(d.large_dense);
}

TEST(EigenScan, HalfAndThreeRecurrenceCoefficients) {
    const auto t = half_and_three();
    const auto x = eigen_candidate(t, 2, 1.0, -1, Window::centered(10));
    EXPECT_NEAR(std::abs(x[-1] - 1.0), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(x[1] - 1.5), 0.0, 1e-12);
    EXPECT_NEAR(std::abs(x[3] - 0.375), 0.0, 1e-12);
    EXPECT_NEAR(std::abs(x[-3] - 1.0 / 9.0), 0.0, 1e-12);
    EXPECT_EQ(x[0], Scalar{});
    // The candidate solves T^2 x = x away from the window edges.
    const auto tx = apply_power(t, 2, x);
    for (Index n = -8; n <= 8; ++n) {
        EXPECT_NEAR(std::abs(tx[n] - x[n]), 0.0, 1e-12 * (1 + std::abs(x[n])));
    }
}

TEST(EigenScan, DefaultAnchorAndRatios) {
    EXPECT_EQ(default_anchor(PatternSubspace::even_zero(), Window::centered(5)), -1);
    EXPECT_EQ(default_anchor(PatternSubspace::whole(), Window::centered(5)), 0);
    const std::vector<Scalar> grid{0.1, Scalar(0, 2), 20.0};
    const auto r = eigen_scan(half_and_three(), 2, grid, PatternSubspace::even_zero(), {50, 100, 200, 400});
    EXPECT_EQ(r.anchor, -1);
    for (const auto& res : r.results) {
        EXPECT_NEAR(std::abs(res.right_ratio - 1.0 / (4.0 * res.lambda)), 0.0, 1e-12);
        EXPECT_NEAR(std::abs(res.left_ratio - res.lambda / 9.0), 0.0, 1e-12);
    }
    EXPECT_EQ(r.results[0].verdict, ScanVerdict::norm_diverging);
    EXPECT_EQ(r.results[1].verdict, ScanVerdict::norm_bounded);
    EXPECT_EQ(r.results[2].verdict, ScanVerdict::norm_diverging);
    EXPECT_THROW(eigen_scan(half_and_three(), 2, grid, PatternSubspace::even_zero(), {50}, Index{0}), PreconditionError);
    EXPECT_THROW(eigen_scan(half_and_three(), 2, {Scalar{}}, PatternSubspace::even_zero(), {50}), PreconditionError);
}

TEST(EigenScan, BoundedVerdictMatchesClosedFormNorm) {
    // For 1/4 < |lambda| < 9 the candidate is a pair of geometric series; its
    // full l2 norm follows from the ratios.
    const Scalar lambda(0, 2);
    const auto r = eigen_scan(half_and_three(), 2, {lambda}, PatternSubspace::even_zero(), {50, 100, 200, 400});
    const double right = std::norm(1.0 / (4.0 * lambda));
    const double left = std::norm(lambda / 9.0);
    const double x1 = std::norm(1.5 / lambda);
    const double exact = std::sqrt(1.0 + x1 / (1.0 - right) + left / (1.0 - left));
    EXPECT_NEAR(r.results[0].norms.back().l2 / exact, 1.0, 1e-12);
}

TEST(EigenScan, ForwardShiftRequired) {
    EXPECT_THROW(eigen_candidate(ShiftOperator::scaled_backward(2.0), 1, 1.0, 0, Window::centered(3)),
                 PreconditionError);
}
