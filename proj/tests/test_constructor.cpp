#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "shiftlab/constructor.hpp"
#include "shiftlab/orbitlab.hpp"

using namespace shiftlab;

namespace {

std::vector<LatticeVector> even_targets(std::mt19937_64& rng, std::size_t count, Index span) {
    std::uniform_real_distribution<double> c(-1.0, 1.0);
    std::vector<LatticeVector> out;
    for (std::size_t i = 0; i < count; ++i) {
        LatticeVector v = LatticeVector::zeros({0, span}, true);
        for (Index n = 0; n <= span; n += 2) {
            v.set(n, c(rng));
        }
        out.push_back((1.0 / norm(v)) * v);
    }
    return out;
}

} // namespace

TEST(Gap, LeadingGapValues) {
    EXPECT_EQ(leading_gap(2.0, 1e-3), 11u);
    // log(2000) / log(1.01) = 763.89...
    EXPECT_EQ(leading_gap(1.01, 1e-3), 764u);
    EXPECT_LE(std::pow(1.01, -764.0), 0.5e-3);
    EXPECT_GT(std::pow(1.01, -763.0), 0.5e-3);
}

TEST(Build, SingleBlockLandsExactly) {
    BlockPlan plan;
    plan.targets = {LatticeVector(0, {1.0, 0.0, 2.0}, true)};
    plan.powers = {5};
    plan.span = 2;
    plan.lambda = 2.0;
    const auto b = build_vector(plan);
    EXPECT_DOUBLE_EQ(b.x[5].real(), 1.0 / 32.0);
    EXPECT_DOUBLE_EQ(b.x[7].real(), 2.0 / 32.0);
    const auto t = ShiftOperator::scaled_backward(2.0);
    EXPECT_EQ(apply_power(t, 5, b.x), plan.targets[0]);
    EXPECT_EQ(b.tail_bounds, (std::vector<double>{0.0}));
}

TEST(Build, TailBoundsAreCertified) {
    std::mt19937_64 rng(1);
    const auto targets = even_targets(rng, 6, 6);
    const auto m = PatternSubspace::even_support(true);
    for (const double lambda : {1.5, 2.0, 3.0}) {
        const auto plan = plan_for_coverage(targets, m, lambda, 1e-3);
        const auto b = build_vector(plan);
        const auto t = ShiftOperator::scaled_backward(lambda);
        for (std::size_t j = 0; j < targets.size(); ++j) {
            const double err = distance(apply_power(t, plan.powers[j], b.x), targets[j]);
            EXPECT_LE(err, b.tail_bounds[j] * (1 + 1e-9) + 1e-15);
            EXPECT_LE(err, 0.5e-3);
            EXPECT_EQ(plan.powers[j] % 2, 0u);
        }
        EXPECT_TRUE(membership(b.x, m, 0.0).member);
    }
}

TEST(Build, Validation) {
    BlockPlan plan;
    plan.targets = {LatticeVector::basis(0, 1.0, true), LatticeVector::basis(3, 1.0, true)};
    plan.powers = {0, 3};
    plan.span = 3;
    EXPECT_THROW(build_vector(plan), DomainError);  // overlap
    plan.powers = {0, 10};
    plan.span = 1;
    EXPECT_THROW(build_vector(plan), PreconditionError);  // span too small
    plan.span = 3;
    plan.parity = ParityConstraint{2, 0};
    plan.powers = {0, 11};
    EXPECT_THROW(build_vector(plan), DomainError);
    plan.powers = {0, 10};
    EXPECT_NO_THROW(build_vector(plan));
    plan.lambda = 1.0;
    EXPECT_THROW(build_vector(plan), DomainError);
}

TEST(Plan, RejectsTargetsOutsideM) {
    EXPECT_THROW(plan_for_coverage({LatticeVector::basis(1, 1.0, true)}, PatternSubspace::even_support(true), 2.0,
                                   1e-3),
                 PreconditionError);
    EXPECT_THROW(plan_for_coverage({}, PatternSubspace::even_support(true), 2.0, 1e-3), DomainError);
}

TEST(Plan, SlowGrowthNeedsLongGaps) {
    const std::vector<LatticeVector> t{LatticeVector::basis(0, 1.0, true), LatticeVector::basis(2, 1.0, true)};
    const auto plan = plan_for_coverage(t, PatternSubspace::even_support(true), 1.01, 1e-3);
    EXPECT_GE(plan.powers[1] - plan.powers[0], 764u + 2u);
    const auto b = build_vector(plan);
    EXPECT_LE(b.tail_bounds[0], 0.5e-3);
}
