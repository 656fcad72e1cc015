#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "maxconf/simulator.hpp"
#include "test_support.hpp"

using namespace maxconf;

namespace {

ExperimentSpec mcm_experiment(double c, double p, std::uint64_t trials, std::uint64_t seed, double loss = 0.0) {
    return {make_pair({c, p, 0.5, 0.5}), *mcm_quantum(c, p).measurement, loss, trials, seed};
}

Tally tally_with_rate(std::uint64_t clicks, std::uint64_t trials) {
    // Preparation split evenly; detector 1 fires mostly on preparation 1.
    const std::uint64_t half = trials / 2;
    const std::uint64_t on1 = std::min(half, clicks - clicks / 4);
    return {trials, {{half - on1, on1, 0}, {trials - half - (clicks - on1), clicks - on1, 0}}};
}

}  // namespace

TEST(Wilson, KnownValues) {
    const auto w = wilson_interval(50, 100);
    EXPECT_NEAR(w.lo, 0.4038, 1e-4);
    EXPECT_NEAR(w.hi, 0.5962, 1e-4);
    const auto z = wilson_interval(0, 100);
    EXPECT_EQ(z.lo, 0.0);
    EXPECT_GT(z.hi, 0.0);
}

TEST(Run, TotalLossGoesToOutcomeZero) {
    const Tally t = run(mcm_experiment(0.5, 0.5, 10000, 1, 1.0));
    EXPECT_EQ(t.outcome_count(0), 10000u);
    EXPECT_EQ(t.outcome_count(1), 0u);
    EXPECT_FALSE(t.confidence(1).has_value());
}

TEST(Run, OrthogonalProjectiveIsPerfect) {
    const Ensemble e = make_pure_pair({0.0});
    const Povm p{{e.state(0), e.state(1)}, ComplexMatrix::zero(2)};
    const Tally t = run({e, p, 0.0, 1000000, 3});
    EXPECT_EQ(t.counts[0][2], 0u);
    EXPECT_EQ(t.counts[1][1], 0u);
    EXPECT_EQ(*t.confidence(1), 1.0);
    EXPECT_EQ(*t.confidence(2), 1.0);
}

TEST(Run, McmConfidenceWithinThreeSigma) {
    const Tally t = run(mcm_experiment(0.5, 0.5, 1000000, 7));
    const double expected = mcm_quantum(0.5, 0.5).value;
    EXPECT_LE(std::abs(*t.confidence(1) - expected), 3.0 * *t.confidence_sigma(1));
}

TEST(Run, RatesFollowBornRuleWithLoss) {
    const double loss = 0.3;
    const auto spec = mcm_experiment(0.4, 0.2, 200000, 11, loss);
    const Tally t = run(spec);
    for (std::size_t y = 1; y <= 2; ++y) {
        const double expected = (1.0 - loss) * outcome_rate(spec.ensemble, spec.povm, y);
        const double sigma = std::sqrt(expected * (1.0 - expected) / 200000.0);
        EXPECT_LE(std::abs(t.rate(y) - expected), 5.0 * sigma);
    }
}

TEST(Run, Reproducible) {
    const auto spec = mcm_experiment(0.5, 0.5, 50000, 123);
    EXPECT_EQ(run(spec).counts, run(spec).counts);
    auto other = spec;
    other.seed = 124;
    EXPECT_NE(run(spec).counts, run(other).counts);
}

TEST(Run, PartitionInvariant) {
    const auto spec = mcm_experiment(0.3, 0.2, 100003, 5, 0.1);
    const auto one = run(spec, 1).counts;
    for (unsigned w : {2u, 3u, 7u, 64u}) {
        EXPECT_EQ(run(spec, w).counts, one) << w;
    }
}

TEST(Run, RejectsMismatchedDimensions) {
    const Povm p = Povm::complete({ComplexMatrix::identity(3) * 0.5});
    test::expect_error(ErrorKind::DimensionMismatch, [&] { run({make_pure_pair({0.5}), p, 0.0, 10, 0}); });
}

TEST(TallyJson, RoundTrip) {
    const Tally t = run(mcm_experiment(0.5, 0.5, 1000, 5));
    const Json j = tally_to_json(t);
    EXPECT_EQ(j.at("trials").get<std::uint64_t>(), 1000u);
    EXPECT_EQ(j.at("wilson").size(), 3u);
    EXPECT_EQ(tally_from_json(j).counts, t.counts);
}

TEST(CertifyFromTally, LowRateOnZeroPlus) {
    const auto c = certify_from_tally(tally_with_rate(2000, 10000), zero_plus_ensemble());
    EXPECT_TRUE(c.closed_form);
    EXPECT_NEAR(c.eta_hat, 0.2, 1e-15);
    EXPECT_NEAR(c.point.value, 1.0, 1e-12);
}

TEST(CertifyFromTally, FullRateGivesPrior) {
    const auto c = certify_from_tally(tally_with_rate(10000, 10000), zero_plus_ensemble());
    EXPECT_NEAR(c.point.value, 0.5, 1e-12);
}

TEST(CertifyFromTally, RotatedPovmKeepsRateAndConfidence) {
    const Ensemble e = zero_plus_ensemble();
    const auto c = certify_from_tally(tally_with_rate(3500, 10000), e);
    EXPECT_NEAR(outcome_rate(e, c.point.povm, 1), 0.35, 1e-10);
    EXPECT_NEAR(confidence(e, c.point.povm, 1), c.point.value, 1e-10);
    const auto k = verify_kkt(e, WeightVector{{1.0}}, OutcomeRates::complete({0.35}), c.point.povm, c.point.dual);
    EXPECT_TRUE(k.ok) << k.max_residual();
}

TEST(CertifyFromTally, UdMeasurementCertifiesUnitConfidence) {
    const auto spec = mcm_experiment(0.5, 0.0, 200000, 17);
    const Tally t = run(spec);
    const auto c = certify_from_tally(t, spec.ensemble);
    EXPECT_NEAR(c.eta_hat, 0.5 * (1.0 - std::sqrt(0.5)), 5e-3);
    EXPECT_NEAR(c.point.value, 1.0, 1e-12);
    EXPECT_LE(*t.confidence(1), c.value_interval.hi + 3.0 * t.confidence_sigma(1).value_or(0.0));
}

TEST(CertifyFromTally, HalfRateMidBranch) {
    const auto c = certify_from_tally(tally_with_rate(5000, 10000), make_pure_pair({0.5}));
    EXPECT_NEAR(c.point.value, 0.5 + std::sqrt(0.5) / 2.0, 1e-12);
    EXPECT_LE(c.value_interval.lo, c.point.value);
    EXPECT_GE(c.value_interval.hi, c.point.value);
}

TEST(CertifyFromTally, GeneralPathForUnequalPriors) {
    const Ensemble e = make_pure_pair({0.5, 0.0, 0.4, 0.6});
    const auto c = certify_from_tally(tally_with_rate(3000, 10000), e);
    EXPECT_FALSE(c.closed_form);
    EXPECT_GE(c.point.value, c.point.primal - 1e-9);
}

TEST(CertifyFromTally, NeverClickedIsRejected) {
    test::expect_error(ErrorKind::OutOfRange,
                       [] { certify_from_tally(Tally{10, {{5, 0, 0}, {5, 0, 0}}}, zero_plus_ensemble()); });
}

TEST(ExperimentJson, Parses) {
    const Json j = {{"ensemble", ensemble_to_json(make_pair({0.5, 0.5, 0.5, 0.5}))},
                    {"povm", povm_to_json(*mcm_quantum(0.5, 0.5).measurement)},
                    {"loss", 0.1},
                    {"trials", 100},
                    {"seed", 9}};
    const auto spec = experiment_from_json(j);
    EXPECT_EQ(spec.trials, 100u);
    EXPECT_EQ(spec.seed, 9u);
    EXPECT_DOUBLE_EQ(spec.loss, 0.1);
    test::expect_error(ErrorKind::ParseError, [] { experiment_from_json(Json::object()); });
}
