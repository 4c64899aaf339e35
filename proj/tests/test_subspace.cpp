#include <random>

#include <gtest/gtest.h>

#include "oracle.hpp"
#include "shiftlab/subspace.hpp"

using namespace shiftlab;

namespace {

// w_n = 1/2 for n >= 0 and 3 for n < 0.
ShiftOperator half_and_three() { return ShiftOperator::forward(WeightSequence::split(0, 0.5, 3.0)); }

} // namespace

TEST(Pattern, AdmissibleIndices) {
    const auto odd = PatternSubspace::even_zero();
    EXPECT_TRUE(odd.admissible(-3));
    EXPECT_FALSE(odd.admissible(0));
    const PatternSubspace mixed(3, {0}, {1}, {6});
    EXPECT_TRUE(mixed.admissible(1));
    EXPECT_TRUE(mixed.admissible(-3));
    EXPECT_FALSE(mixed.admissible(6));
    EXPECT_FALSE(mixed.is_periodic());
    EXPECT_FALSE(PatternSubspace::even_support(true).admissible(-2));
    EXPECT_TRUE(PatternSubspace::whole().admissible(12345));
    EXPECT_FALSE(PatternSubspace::zero().admissible(0));
}

TEST(Pattern, ValidationErrors) {
    EXPECT_THROW(PatternSubspace(0, {0}), ConfigError);
    EXPECT_THROW(PatternSubspace(2, {2}), ConfigError);
    EXPECT_THROW(PatternSubspace(2, {0}, {3}, {3}), ConfigError);
}

TEST(Pattern, ComplementPartitionsIndices) {
    const PatternSubspace m(4, {1, 2}, {0}, {5}, false);
    const auto c = m.complement();
    for (Index n = -20; n <= 20; ++n) {
        EXPECT_NE(m.admissible(n), c.admissible(n)) << n;
    }
    EXPECT_EQ(c.complement(), m);
    EXPECT_EQ(PatternSubspace::even_zero().complement(), PatternSubspace::even_support());
}

TEST(Projection, KeepsAdmissibleCoefficients) {
    const LatticeVector v(-2, {1.0, 2.0, 3.0, 4.0, 5.0});
    const auto p = project(PatternSubspace::even_zero(), v);
    EXPECT_EQ(p, LatticeVector(-1, {2.0, 0.0, 4.0}));
    const auto q = project(Projection{PatternSubspace::even_zero(), true}, v);
    EXPECT_EQ(p + q, v);
}

TEST(Projection, IdempotentAndOrthogonal) {
    std::mt19937_64 rng(21);
    const PatternSubspace m(3, {0, 2}, {1}, {-3});
    for (int trial = 0; trial < 200; ++trial) {
        const auto v = oracle::random_vector(rng);
        const auto p = project(m, v);
        EXPECT_EQ(project(m, p), p);
        EXPECT_LE(std::abs(inner(v - p, p)), 1e-15);
        EXPECT_LE(norm(p), norm(v) * (1 + 1e-15));
        EXPECT_TRUE(membership(p, m, 0.0).member);
    }
}

TEST(Membership, ToleranceOnOffPatternMass) {
    auto v = LatticeVector::basis(1);
    v.set(2, 1e-10);
    const auto odd = PatternSubspace::even_zero();
    EXPECT_TRUE(membership(v, odd).member);
    EXPECT_FALSE(membership(v, odd, 0.0).member);
    EXPECT_DOUBLE_EQ(membership(v, odd, 0.0).max_off_pattern, 1e-10);
    EXPECT_THROW(membership(v, odd, -1.0), DomainError);
}

TEST(Invariance, HalfAndThreeOddSupportEvenPowersOnly) {
    const auto t = half_and_three();
    const auto m = PatternSubspace::even_zero();
    const auto one = invariance_check(t, 1, m);
    EXPECT_FALSE(one.pass);
    ASSERT_TRUE(one.violation);
    EXPECT_EQ(one.violation->first, 1);
    EXPECT_EQ(one.violation->second, 2);
    for (std::uint64_t n = 2; n <= 40; n += 2) {
        EXPECT_TRUE(invariance_check(t, n, m).pass) << n;
    }
    EXPECT_FALSE(invariance_check(t, 3, m).pass);
    EXPECT_THROW(invariance_check(t, 0, m), DomainError);
}

TEST(Invariance, StructuralCheckAgreesWithApplyingT) {
    // Oracle: push every admissible basis vector through T^n and test membership.
    std::mt19937_64 rng(4);
    std::uniform_int_distribution<Index> mod(1, 4);
    std::uniform_int_distribution<std::uint64_t> pw(1, 6);
    std::bernoulli_distribution coin(0.5);
    const auto t = half_and_three();
    for (int trial = 0; trial < 100; ++trial) {
        const Index q = mod(rng);
        std::vector<Index> res;
        for (Index r = 0; r < q; ++r) {
            if (coin(rng)) {
                res.push_back(r);
            }
        }
        const PatternSubspace m(q, res);
        const auto n = pw(rng);
        bool oracle_pass = true;
        for (Index i = -12; i <= 12; ++i) {
            if (m.admissible(i)) {
                oracle_pass &= membership(apply_power(t, n, LatticeVector::basis(i)), m, 0.0).member;
            }
        }
        EXPECT_EQ(invariance_check(t, n, m, Window::centered(12)).pass, oracle_pass);
    }
}

TEST(Invariance, BackwardShiftOnHalfLineDropsOffTheEdge) {
    const auto b = ShiftOperator::scaled_backward(2.0);
    EXPECT_TRUE(invariance_check(b, 2, PatternSubspace::even_support(true)).pass);
    EXPECT_FALSE(invariance_check(b, 1, PatternSubspace::even_support(true)).pass);
    EXPECT_TRUE(invariance_check(b, 1, PatternSubspace::from_indices({0}, true)).pass);
}

TEST(Invariance, PowerWrapperAndDiagonal) {
    const OperatorPower<ShiftOperator> t2{half_and_three(), 2};
    EXPECT_TRUE(invariance_check(t2, 1, PatternSubspace::even_zero()).pass);
    EXPECT_TRUE(invariance_check(DiagonalOperator({{0, 2.0}}), 3, PatternSubspace::even_zero()).pass);
}

TEST(Quotient, ClassRepresentativeIsTheComplementPart) {
    const auto q = complement_and_quotient(PatternSubspace::even_zero());
    const LatticeVector v(0, {1.0, 2.0, 3.0});
    EXPECT_EQ(q.class_of(v), LatticeVector(0, {1.0, 0.0, 3.0}));
    EXPECT_EQ(q.class_of(v + LatticeVector::basis(5, 7.0)), q.class_of(v));
}

TEST(CenterOut, PositivesFirstOnTies) {
    EXPECT_EQ(center_out_order({-2, 2}), (std::vector<Index>{0, 1, -1, 2, -2}));
}
