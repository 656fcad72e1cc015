#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "maxconf/certify.hpp"
#include "test_support.hpp"

using namespace maxconf;

namespace {

KktReport check(double c, double p, double eta, const CertReport &r) {
    return verify_kkt(make_pair({c, p, 0.5, 0.5}), WeightVector{{1.0}}, OutcomeRates::complete({eta}), r.povm,
                      r.dual);
}

/// Reference value written directly from the three branch formulas.
double reference(double c, double p, double eta) {
    const double pbar = 1.0 - p, b2 = pbar * pbar * c, a = pbar * std::sqrt(1.0 - c);
    const double lo = 0.5 * (1.0 - b2), hi = 0.5 * (1.0 + b2);
    if (eta <= lo) return 0.5 * (1.0 + a / std::sqrt(1.0 - b2));
    if (eta >= hi) return 0.5 * (1.0 + a / std::sqrt(1.0 - b2) * (1.0 / eta - 1.0));
    const double t = 1.0 - 2.0 * eta;
    return 0.5 + std::sqrt((1.0 - c) / c) / (4.0 * eta) * std::sqrt(b2 - t * t);
}

}  // namespace

TEST(CertifyQubit, WorkedExample) {
    const auto low = certify_qubit(0.5, 0.0, 0.2);
    EXPECT_NEAR(low.value, 1.0, 1e-12);
    EXPECT_EQ(low.branch, Region::LowRate);
    EXPECT_NEAR(certify_qubit(0.5, 0.0, 0.75).value, 2.0 / 3.0, 1e-12);
    const auto top = certify_qubit(0.5, 0.0, 1.0);
    EXPECT_NEAR(top.value, 0.5, 1e-12);
    EXPECT_EQ(top.branch, Region::HighRate);
    EXPECT_TRUE(top.rank_two_certified);
    EXPECT_NEAR(certify_qubit(0.5, 0.5, 0.5).value, 0.5 + 0.5 * std::sqrt(0.125), 1e-12);
    EXPECT_NEAR(certify_qubit(0.5, 0.5, 0.5).value, 0.67678, 1e-5);
}

TEST(CertifyQubit, PovmReproducesValueAndRate) {
    for (int i = 1; i < 10; ++i) {
        for (int j = 0; j < 10; ++j) {
            for (int k = 1; k <= 20; ++k) {
                const double c = i / 10.0, p = j / 10.0, eta = k / 20.0;
                const auto r = certify_qubit(c, p, eta);
                const Ensemble e = make_pair({c, p, 0.5, 0.5});
                ASSERT_TRUE(r.povm.is_valid());
                ASSERT_NEAR(outcome_rate(e, r.povm, 1), eta, 1e-10);
                ASSERT_NEAR(confidence(e, r.povm, 1), r.value, 1e-10);
                ASSERT_NEAR(r.value, reference(c, p, eta), 1e-12);
                const auto &q = *r.dual.qubit;
                const ComplexMatrix lhs = q.x1 - q.x2;
                const ComplexMatrix rhs = average_state(e).matrix() * q.lambda - e.state(0) / (2.0 * eta);
                ASSERT_LE((lhs - rhs).frobenius_norm(), 1e-10);
            }
        }
    }
}

TEST(CertifyQubit, ZeroGapOnDenseGrid) {
    double worst_gap = 0.0;
    for (int i = 1; i < 100; ++i) {
        for (int j = 0; j < 100; ++j) {
            for (int k = 1; k <= 100; ++k) {
                const double c = i / 100.0, p = j / 100.0, eta = k / 100.0;
                const auto r = certify_qubit(c, p, eta);
                ASSERT_GE(r.gap, 0.0) << c << " " << p << " " << eta;
                worst_gap = std::max(worst_gap, r.gap);
            }
        }
    }
    EXPECT_LE(worst_gap, 1e-9);
}

TEST(CertifyQubit, BranchesAgreeAtBoundaries) {
    for (int i = 1; i < 50; ++i) {
        for (int j = 0; j < 50; ++j) {
            ASSERT_LE(quantum_boundary_mismatch(i / 50.0, j / 50.0), 1e-10);
        }
    }
}

TEST(CertifyQubit, MonotoneAndDominant) {
    for (int i = 1; i < 20; ++i) {
        for (int j = 0; j < 20; ++j) {
            const double c = i / 20.0, p = j / 20.0;
            double prev = 2.0;
            const auto [lo, hi] = nc_boundaries(c, p);
            for (int k = 1; k <= 200; ++k) {
                const double eta = k / 200.0;
                const double q = certify_qubit(c, p, eta).value;
                const double nc = nc_certified(c, p, eta).value;
                ASSERT_LE(q, prev + 1e-12);
                prev = q;
                ASSERT_GE(q, nc - 1e-12);
                if (p > 0.0 && eta < 1.0) {
                    ASSERT_GT(q, nc) << c << " " << p << " " << eta;
                }
                if (p == 0.0 && eta > lo + 1e-9 && eta < hi - 1e-9) {
                    ASSERT_GT(q, nc);
                }
                if (p == 0.0 && (eta <= lo || eta >= hi)) {
                    ASSERT_NEAR(q, nc, 1e-10);
                }
            }
        }
    }
}

TEST(CertifyQubit, NoiselessReduction) {
    for (int i = 1; i < 20; ++i) {
        const double c = i / 20.0;
        for (int k = 1; k <= 100; ++k) {
            const double eta = k / 100.0;
            const double v = certify_qubit(c, 0.0, eta).value;
            if (eta <= 0.5 * (1.0 - c)) {
                EXPECT_NEAR(v, 1.0, 1e-12);
            } else if (eta >= 0.5 * (1.0 + c)) {
                EXPECT_NEAR(v, 1.0 / (2.0 * eta), 1e-12);
            } else {
                const double t = 1.0 - 2.0 * eta;
                EXPECT_NEAR(v, 0.5 + std::sqrt((1.0 - c) / c) * std::sqrt(c - t * t) / (4.0 * eta), 1e-12);
            }
        }
    }
}

TEST(CertifyQubit, Errors) {
    test::expect_error(ErrorKind::DegenerateEnsemble, [] { certify_qubit(0.0, 0.0, 0.5); });
    test::expect_error(ErrorKind::DegenerateEnsemble, [] { certify_qubit(1.0, 0.0, 0.5); });
    test::expect_error(ErrorKind::OutOfRange, [] { certify_qubit(0.5, 0.0, 0.0); });
    test::expect_error(ErrorKind::OutOfRange, [] { certify_qubit(0.5, 1.0, 0.5); });
    test::expect_error(ErrorKind::UnequalPriors, [] { certify_qubit(PairSpec{0.5, 0.0, 0.3, 0.7}, 0.5); });
}

TEST(VerifyKkt, AnalyticCertificatePasses) {
    const auto r = certify_qubit(0.5, 0.0, 0.5);
    const auto k = check(0.5, 0.0, 0.5, r);
    EXPECT_TRUE(k.ok);
    EXPECT_LE(k.max_residual(), 1e-10);
}

TEST(VerifyKkt, PassesAcrossAllBranches) {
    for (int i = 1; i < 20; ++i) {
        for (int j = 0; j < 20; ++j) {
            for (int k = 1; k <= 20; ++k) {
                const double c = i / 20.0, p = j / 20.0, eta = k / 20.0;
                const auto rep = check(c, p, eta, certify_qubit(c, p, eta));
                ASSERT_TRUE(rep.ok) << c << " " << p << " " << eta << " max " << rep.max_residual();
            }
        }
    }
}

TEST(VerifyKkt, DetectsPerturbedPovm) {
    auto r = certify_qubit(0.5, 0.0, 0.5);
    r.povm.elements[0] += ComplexMatrix::identity(2) * 1e-3;
    const auto k = check(0.5, 0.0, 0.5, r);
    EXPECT_FALSE(k.ok);
    EXPECT_NEAR(k.residual("primal_rate"), 1e-3, 1e-9);
}

TEST(VerifyKkt, TrivialMeasurementIsNotOptimal) {
    const double eta = 0.5;
    auto r = certify_qubit(0.5, 0.0, eta);
    r.povm = Povm::complete({ComplexMatrix::identity(2) * eta});
    const auto k = check(0.5, 0.0, eta, r);
    EXPECT_FALSE(k.ok);
    EXPECT_LE(k.residual("primal_rate"), 1e-12);
    EXPECT_LE(k.residual("primal_psd"), 1e-12);
    EXPECT_GT(k.residual("duality_gap"), 1e-3);
}

TEST(VerifyKkt, DimensionMismatch) {
    const auto r = certify_qubit(0.5, 0.0, 0.5);
    test::expect_error(ErrorKind::DimensionMismatch, [&] {
        verify_kkt(make_pair({0.5, 0.0, 0.5, 0.5}), WeightVector{{1.0, 0.0}}, OutcomeRates::complete({0.5}), r.povm,
                   r.dual);
    });
}

TEST(CertifyGeneral, BracketsAnalyticValue) {
    const Ensemble e = make_pure_pair({0.5});
    const auto g = certify_general(e, WeightVector{{1.0, 0.0}}, OutcomeRates::complete({0.5, 0.5}));
    const double exact = certify_qubit(0.5, 0.0, 0.5).value;
    EXPECT_NEAR(exact, 0.85355, 1e-5);
    EXPECT_LE(g.lower, exact + 1e-9);
    EXPECT_GE(g.upper, exact - 1e-9);
    EXPECT_LE(g.width(), 1e-4);
    EXPECT_TRUE(g.povm.is_valid(1e-9));
}

TEST(CertifyGeneral, SingleDetectorAgreesWithQubitEngine) {
    for (double c : {0.2, 0.5, 0.8}) {
        for (double p : {0.0, 0.4}) {
            for (double eta : {0.1, 0.5, 0.7, 0.95}) {
                const auto g = certify_general(make_pair({c, p, 0.5, 0.5}), WeightVector{{1.0}},
                                               OutcomeRates::complete({eta}));
                const double exact = certify_qubit(c, p, eta).value;
                EXPECT_LE(g.lower, exact + 1e-9);
                EXPECT_GE(g.upper, exact - 1e-9);
                EXPECT_LE(g.width(), 1e-6) << c << " " << p << " " << eta;
            }
        }
    }
}

TEST(CertifyGeneral, SinglePureStateFullRate) {
    const std::array<Complex, 2> zero{1.0, 0.0};
    const Ensemble e({{1.0, DensityMatrix::pure(zero)}});
    const auto g = certify_general(e, WeightVector{{1.0}}, OutcomeRates::complete({1.0}));
    EXPECT_NEAR(g.lower, 1.0, 1e-9);
    EXPECT_NEAR(g.upper, 1.0, 1e-9);
}

TEST(CertifyGeneral, SuccessWeightingBeatsHelstromAtItsRates) {
    const Ensemble e = make_pure_pair({0.5});
    const auto h = helstrom(e);
    const double e1 = outcome_rate(e, *h.measurement, 1), e2 = outcome_rate(e, *h.measurement, 2);
    const auto g = certify_general(e, WeightVector{{e1, e2}}, OutcomeRates::complete({e1, e2}));
    EXPECT_GE(g.lower, h.value - 1e-9);
    EXPECT_GE(g.upper, g.lower - 1e-9);
}

TEST(CertifyGeneral, QutritEnsemble) {
    const std::array<Complex, 3> a{1.0, 0.0, 0.0}, b{std::sqrt(0.5), std::sqrt(0.5), 0.0}, c{0.0, std::sqrt(0.3),
                                                                                           std::sqrt(0.7)};
    const Ensemble e({{0.3, DensityMatrix::pure(a)}, {0.3, DensityMatrix::pure(b)}, {0.4, DensityMatrix::pure(c)}});
    const auto g = certify_general(e, WeightVector{{1.0, 0.5, 0.0}}, OutcomeRates::complete({0.2, 0.3, 0.1}));
    EXPECT_GE(g.upper, g.lower - 1e-9);
    EXPECT_LE(g.width(), 1e-6);
    EXPECT_TRUE(g.povm.is_valid(1e-9));
}

TEST(CertifyGeneral, InfeasibleRates) {
    const Ensemble e = make_pure_pair({0.5});
    test::expect_error(ErrorKind::InfeasibleRates,
                       [&] { certify_general(e, WeightVector{{1.0, 0.0}}, OutcomeRates::complete({0.7, 0.6})); });
    test::expect_error(ErrorKind::InfeasibleRates,
                       [&] { certify_general(e, WeightVector{{1.0, 0.0}}, OutcomeRates::complete({-0.2, 0.6})); });
}

TEST(DeltaGap, NoiselessLowRegionIsZero) {
    for (double c : {0.2, 0.5, 0.8}) {
        const auto d = delta_gap(c, 0.0, 0.05);
        EXPECT_EQ(d.region, Region::LowRate);
        EXPECT_NEAR(d.delta, 0.0, 1e-12);
    }
}

TEST(DeltaGap, HighRegionScalesLowGap) {
    const auto d = delta_gap(0.5, 0.5, 0.9);
    EXPECT_EQ(d.region, Region::HighRate);
    EXPECT_GT(d.delta_low, 0.0);
    EXPECT_NEAR(d.delta, (1.0 / 0.9 - 1.0) * d.delta_low, 1e-10);
    EXPECT_NEAR(delta_gap(0.5, 0.0, 1.0).delta, 0.0, 1e-12);
}

TEST(DeltaGap, SharpRangeRejected) {
    test::expect_error(ErrorKind::WrongRegion, [] { delta_gap(0.5, 0.5, 0.5); });
}
