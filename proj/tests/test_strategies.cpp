#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "maxconf/ensembles.hpp"
#include "maxconf/strategies.hpp"
#include "test_support.hpp"

using namespace maxconf;

namespace {

Ensemble pure(double c) { return make_pure_pair({c}); }
Ensemble noisy(double c, double p) { return make_pair({c, p, 0.5, 0.5}); }

/// Best projective guess over a Bloch-sphere grid; independent of the eigen route.
double grid_guess(const Ensemble &e) {
    double best = 0.0;
    for (int i = 0; i <= 200; ++i) {
        for (int j = 0; j < 200; ++j) {
            const double th = M_PI * i / 200.0, ph = 2.0 * M_PI * j / 200.0;
            const ComplexMatrix m = bloch_projector({std::sin(th) * std::cos(ph), std::sin(th) * std::sin(ph),
                                                     std::cos(th)});
            const Povm p{{m, ComplexMatrix::identity(2) - m}, ComplexMatrix::zero(2)};
            best = std::max(best, guessing_probability(e, p));
        }
    }
    return best;
}

}  // namespace

TEST(Helstrom, OrthogonalPairIsPerfect) { EXPECT_NEAR(helstrom(pure(0.0)).value, 1.0, 1e-12); }

TEST(Helstrom, HalfConfusability) {
    const auto r = helstrom(pure(0.5));
    EXPECT_NEAR(r.value, 0.5 + std::sqrt(0.5) / 2.0, 1e-12);
    EXPECT_NEAR(r.value, 0.85355, 1e-5);
    EXPECT_NEAR(grid_guess(pure(0.5)), r.value, 1e-3);
    ASSERT_TRUE(r.measurement.has_value());
    EXPECT_TRUE(r.measurement->is_valid());
    EXPECT_NEAR(guessing_probability(pure(0.5), *r.measurement), r.value, 1e-12);
}

TEST(Helstrom, IdenticalStatesGuessLikelierPrior) {
    const Ensemble e = make_pure_pair({1.0, 0.0, 0.3, 0.7});
    EXPECT_NEAR(helstrom(e).value, 0.7, 1e-12);
}

TEST(Helstrom, MeasurementAchievesValue) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 200; ++i) {
        const double q = 0.2 + 0.6 * u(rng);
        const Ensemble e = depolarize(make_pure_pair({u(rng), 0.0, q, 1.0 - q}), u(rng));
        const auto r = helstrom(e);
        ASSERT_NEAR(guessing_probability(e, *r.measurement), r.value, 1e-12);
    }
}

TEST(Helstrom, WrongArity) {
    const auto mixed = DensityMatrix::maximally_mixed(2);
    test::expect_error(ErrorKind::WrongArity, [&] { helstrom(Ensemble({{1.0, mixed}})); });
}

TEST(GuessNc, Examples) {
    EXPECT_DOUBLE_EQ(guess_nc(0.0).value, 1.0);
    EXPECT_DOUBLE_EQ(guess_nc(1.0).value, 0.5);
    EXPECT_DOUBLE_EQ(guess_nc(0.5).value, 0.75);
    EXPECT_LT(guess_nc(0.5).value, helstrom(pure(0.5)).value);
    EXPECT_FALSE(guess_nc(0.5).measurement.has_value());
    test::expect_error(ErrorKind::OutOfRange, [] { guess_nc(-0.01); });
}

TEST(UdQuantum, Examples) {
    EXPECT_NEAR(ud_quantum(0.0).value, 0.0, 1e-15);
    EXPECT_NEAR(ud_quantum(1.0).value, 1.0, 1e-15);
    const auto r = ud_quantum(0.5);
    EXPECT_NEAR(r.value, std::sqrt(0.5), 1e-12);
    const Ensemble e = pure(0.5);
    const Povm &m = *r.measurement;
    EXPECT_TRUE(m.is_valid());
    EXPECT_LE(std::abs(outcome_probability(e, m, 1, 1)), 1e-12);
    EXPECT_LE(std::abs(outcome_probability(e, m, 0, 2)), 1e-12);
    EXPECT_NEAR(inconclusive_rate(e, m), std::sqrt(0.5), 1e-12);
    test::expect_error(ErrorKind::OutOfRange, [] { ud_quantum(2.0); });
}

TEST(UdQuantum, InconclusiveRateAcrossRange) {
    for (int i = 0; i <= 100; ++i) {
        const double c = i / 100.0;
        const auto r = ud_quantum(c);
        ASSERT_TRUE(r.measurement->is_valid());
        ASSERT_NEAR(inconclusive_rate(pure(c), *r.measurement), std::sqrt(c), 1e-12);
    }
}

TEST(UdNoncontextual, Discontinuity) {
    EXPECT_EQ(ud_noncontextual(0.0).value, 0.0);
    EXPECT_DOUBLE_EQ(ud_noncontextual(0.5).value, 0.75);
    EXPECT_NEAR(ud_noncontextual(1e-6).value, 0.5000005, 1e-15);
}

TEST(McmQuantum, Examples) {
    EXPECT_NEAR(mcm_quantum(0.5, 0.0).value, 1.0, 1e-12);
    EXPECT_NEAR(mcm_quantum(0.5, 1.0).value, 0.5, 1e-12);
    EXPECT_NEAR(mcm_quantum(0.5, 0.5).value, 0.68899, 1e-5);
    test::expect_error(ErrorKind::OutOfRange, [] { mcm_quantum(0.5, 1.5); });
}

TEST(McmQuantum, PovmAchievesValueAndAgreesWithOperatorNorm) {
    for (int i = 1; i < 20; ++i) {
        for (int j = 0; j < 20; ++j) {
            const double c = i / 20.0, p = j / 20.0;
            const auto r = mcm_quantum(c, p);
            const Ensemble e = noisy(c, p);
            ASSERT_TRUE(r.measurement->is_valid());
            ASSERT_NEAR(confidence(e, *r.measurement, 1), r.value, 1e-10);
            ASSERT_NEAR(confidence(e, *r.measurement, 2), r.value, 1e-10);
            ASSERT_NEAR(mcm_quantum_general(e, 1).value, r.value, 1e-10);
        }
    }
}

TEST(McmQuantumGeneral, MeasurementAchievesValue) {
    const Ensemble e = noisy(0.3, 0.2);
    const auto r = mcm_quantum_general(e, 2);
    EXPECT_NEAR(confidence(e, *r.measurement, 2), r.value, 1e-10);
    EXPECT_TRUE(r.measurement->is_valid());
}

TEST(McmQuantumGeneral, RankDeficientAverageUsesSupport) {
    const std::array<Complex, 2> zero{1.0, 0.0};
    const Ensemble e({{0.5, DensityMatrix::pure(zero)}, {0.5, DensityMatrix::pure(zero)}});
    EXPECT_NEAR(mcm_quantum_general(e, 1).value, 0.5, 1e-12);
}

TEST(McmQuantumGeneral, AmbiguousRankIsRejected) {
    const double d1[] = {1.0 - 2e-10, 2e-10};
    const DensityMatrix s(ComplexMatrix::diagonal(d1));
    const Ensemble e({{0.5, s}, {0.5, s}});
    test::expect_error(ErrorKind::SingularEnsemble, [&] { mcm_quantum_general(e, 1); });
}

TEST(McmNoncontextual, Examples) {
    EXPECT_NEAR(mcm_noncontextual(0.5, 0.0).value, 1.0, 1e-15);
    EXPECT_NEAR(mcm_noncontextual(0.5, 1.0).value, 0.5, 1e-15);
    EXPECT_NEAR(mcm_noncontextual(0.5, 0.5).value, 2.0 / 3.0, 1e-12);
}

TEST(McmNoncontextual, NeverAboveQuantum) {
    for (int i = 0; i <= 50; ++i) {
        for (int j = 0; j <= 50; ++j) {
            const double c = i / 50.0, p = j / 50.0;
            ASSERT_LE(mcm_noncontextual(c, p).value, mcm_quantum(c, p).value + 1e-12);
        }
    }
}

TEST(Confidence, ZeroRateIsAnError) {
    const Ensemble e = pure(0.5);
    const Povm p = Povm::complete({ComplexMatrix::zero(2), ComplexMatrix::zero(2)});
    test::expect_error(ErrorKind::ZeroRate, [&] { confidence(e, p, 1); });
}
