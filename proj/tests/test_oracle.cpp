#include <gtest/gtest.h>

#include <cmath>

#include "maxconf/certify.hpp"
#include "maxconf/oracle.hpp"
#include "maxconf/oracle_suite.hpp"
#include "maxconf/random.hpp"
#include "test_support.hpp"

using namespace maxconf;

TEST(Philox, KnownAnswers) {
    const auto zero = Philox4x32::block({0, 0, 0, 0}, {0, 0});
    EXPECT_EQ(zero, (Philox4x32::Counter{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u}));
    const auto ones = Philox4x32::block({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu},
                                        {0xffffffffu, 0xffffffffu});
    EXPECT_EQ(ones, (Philox4x32::Counter{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu}));
    const auto pi = Philox4x32::block({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u},
                                      {0xa4093822u, 0x299f31d0u});
    EXPECT_EQ(pi, (Philox4x32::Counter{0xd16cfe09u, 0x94fdcceb, 0x5001e420u, 0x24126ea1u}));
}

TEST(Philox, UniformsInOpenInterval) {
    for (std::uint64_t i = 0; i < 1000; ++i) {
        for (double u : Philox4x32::uniforms(42, i)) {
            ASSERT_GT(u, 0.0);
            ASSERT_LT(u, 1.0);
        }
    }
}

TEST(SearchConfig, Validation) {
    SearchConfig cfg;
    cfg.restarts = 0;
    test::expect_error(ErrorKind::InvalidSpec, [&] { cfg.validate(); });
    cfg.restarts = 1;
    cfg.grid_resolution = 0.2;
    test::expect_error(ErrorKind::InvalidSpec, [&] { cfg.validate(); });
}

TEST(BruteGuess, Examples) {
    EXPECT_NEAR(brute_guess(make_pure_pair({0.0})), 1.0, 1e-6);
    EXPECT_NEAR(brute_guess(make_pure_pair({0.5})), 0.85355, 1e-3);
    EXPECT_NEAR(brute_guess(make_pure_pair({1.0, 0.0, 0.3, 0.7})), 0.7, 1e-12);
}

TEST(BruteConfidence, Examples) {
    EXPECT_NEAR(brute_confidence(make_pure_pair({0.5})), 1.0, 1e-6);
    EXPECT_NEAR(brute_confidence(make_pair({0.5, 0.5, 0.5, 0.5})), 0.68899, 1e-3);
    EXPECT_NEAR(brute_confidence(make_pure_pair({0.5}), 0.75), 2.0 / 3.0, 1e-3);
    test::expect_error(ErrorKind::InfeasibleRate, [] { brute_confidence(make_pure_pair({0.5}), 1.5); });
}

TEST(BruteUd, Examples) {
    EXPECT_NEAR(brute_ud(make_pure_pair({0.0})), 0.0, 1e-6);
    EXPECT_NEAR(brute_ud(make_pure_pair({0.5})), std::sqrt(0.5), 1e-3);
    EXPECT_NEAR(brute_ud(make_pure_pair({0.81})), 0.9, 1e-3);
}

TEST(Oracle, DeterministicForSeed) {
    SearchConfig cfg;
    cfg.seed = 99;
    const Ensemble e = make_pair({0.3, 0.2, 0.5, 0.5});
    EXPECT_EQ(brute_confidence(e, 0.4, cfg), brute_confidence(e, 0.4, cfg));
    EXPECT_EQ(brute_guess(e, cfg), brute_guess(e, cfg));
}

TEST(Oracle, AgreesWithClosedForms) {
    const auto a = oracle_agreement(10, 5);
    EXPECT_LE(a.worst(), kAgreementTol);
    EXPECT_LE(a.overshoot, kOvershootTol);
    EXPECT_TRUE(a.ok());
}
