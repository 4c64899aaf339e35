#include <random>

#include <gtest/gtest.h>

#include "oracle.hpp"
#include "shiftlab/orbitlab.hpp"

using namespace shiftlab;

namespace {

// w_n = 1/2 for n >= 0 and 3 for n < 0.
ShiftOperator half_and_three() { return ShiftOperator::forward(WeightSequence::split(0, 0.5, 3.0)); }

LatticeVector random_in(std::mt19937_64& rng, const PatternSubspace& m) {
    return project(m, oracle::random_vector(rng));
}

} // namespace

TEST(Orbit, PointsArePowers) {
    const auto t = half_and_three();
    const auto x = LatticeVector(-2, {1.0, 2.0, 3.0});
    const auto tr = orbit(t, x, 6);
    ASSERT_EQ(tr.size(), 7u);
    EXPECT_EQ(tr.points[0], x);
    for (std::size_t j = 1; j < tr.size(); ++j) {
        EXPECT_LE(oracle::coefficient_error(tr.points[j], apply(t, tr.points[j - 1])), 1e-12);
    }
    EXPECT_FALSE(tr.overflow);
    EXPECT_THROW(orbit(t, x, 0), DomainError);
}

TEST(Orbit, LeakageMarksUntrustedPoints) {
    const auto t = ShiftOperator::forward(WeightSequence::constant(1.0));
    const auto tr = orbit(t, LatticeVector::basis(3), 4, Window{-5, 5});
    EXPECT_TRUE(tr.trusted[2]);
    EXPECT_FALSE(tr.trusted[3]);
    EXPECT_DOUBLE_EQ(tr.leakage[4], 1.0);
    EXPECT_TRUE(tr.points[4].is_zero());
}

TEST(Orbit, OverflowIsFlagged) {
    const auto t = ShiftOperator::forward(WeightSequence::constant(1e10));
    EXPECT_TRUE(orbit(t, LatticeVector::basis(0), 40).overflow);
}

TEST(OrbitInM, HalfAndThreeKeepsEvenPowersFromOddStart) {
    const auto tr = orbit(half_and_three(), LatticeVector::basis(1), 10);
    const auto in = orbit_in_M(tr, PatternSubspace::even_zero());
    EXPECT_EQ(in.powers, (std::vector<std::uint64_t>{0, 2, 4, 6, 8, 10}));
}

TEST(Inclusion, MemberPointsEqualTheirProjections) {
    std::mt19937_64 rng(2);
    const auto m = PatternSubspace::even_zero();
    for (int trial = 0; trial < 50; ++trial) {
        const auto tr = orbit(half_and_three(), oracle::random_vector(rng), 12);
        const auto r = projected_orbit_inclusion(tr, m);
        EXPECT_TRUE(r.holds);
        for (const auto& row : r.rows) {
            if (row.member) {
                EXPECT_LE(row.gap, 1e-9);
            }
        }
    }
}

TEST(Coverage, ExactHitsAndScore) {
    const auto t = ShiftOperator::forward(WeightSequence::constant(1.0));
    const auto tr = orbit(t, LatticeVector::basis(0), 5);
    const std::vector<LatticeVector> targets{LatticeVector::basis(3), LatticeVector::basis(9)};
    const auto r = coverage(tr, PatternSubspace::whole(), targets, 1e-3);
    EXPECT_DOUBLE_EQ(r.score, 0.5);
    EXPECT_EQ(r.hits[0].best_power, 3u);
    EXPECT_EQ(r.hits[0].best_distance, 0.0);
    const auto early = coverage(tr, PatternSubspace::whole(), targets, 1e-3, false, 2);
    EXPECT_EQ(early.score, 0.0);
    EXPECT_THROW(coverage(tr, PatternSubspace::whole(), {}, 1e-3), PreconditionError);
    EXPECT_THROW(coverage(tr, PatternSubspace::even_zero(), {LatticeVector::basis(2)}, 1e-3), PreconditionError);
    EXPECT_THROW(coverage(tr, PatternSubspace::whole(), targets, 0.0), DomainError);
}

TEST(Compression, AgreesWithProjectedOrbit) {
    std::mt19937_64 rng(9);
    const OperatorPower<ShiftOperator> t2{half_and_three(), 2};
    const auto m_perp = PatternSubspace::even_support();
    for (int trial = 0; trial < 50; ++trial) {
        const auto x = random_in(rng, m_perp);
        const auto r = compression_orbit_identity(t2, x, m_perp, 30);
        EXPECT_TRUE(r.holds);
        EXPECT_LE(r.max_difference, 1e-12);
    }
}

TEST(Compression, Preconditions) {
    EXPECT_THROW(compression_orbit_identity(half_and_three(), LatticeVector::basis(0), PatternSubspace::even_support(), 5),
                 PreconditionError);
    const OperatorPower<ShiftOperator> t2{half_and_three(), 2};
    EXPECT_THROW(compression_orbit_identity(t2, LatticeVector::basis(1), PatternSubspace::even_support(), 5),
                 PreconditionError);
}

TEST(Quotient, ClassesMatchCompression) {
    std::mt19937_64 rng(10);
    const OperatorPower<ShiftOperator> t2{half_and_three(), 2};
    const auto m = PatternSubspace::even_zero();
    for (int trial = 0; trial < 50; ++trial) {
        const auto x = oracle::random_vector(rng);
        const auto q = quotient_orbit(t2, x, m, 30);
        const auto c = compression_orbit_identity(t2, project(m.complement(), x), m.complement(), 30);
        for (std::size_t j = 0; j < q.size(); ++j) {
            EXPECT_LE(distance(q.points[j], c.left[j]), 1e-12 * std::max(1.0, norm(c.left[j])));
        }
    }
    EXPECT_THROW(quotient_orbit(half_and_three(), LatticeVector::basis(0), m, 3), PreconditionError);
}

TEST(Quotient, DiagonalOperatorsPreserveEverything) {
    const DiagonalOperator d({{0, 0.5}, {1, 2.0}});
    const auto q = quotient_orbit(d, LatticeVector(0, {1.0, 1.0}), PatternSubspace::even_zero(), 3);
    EXPECT_EQ(q.points[3], LatticeVector::basis(0, 0.125));
}
