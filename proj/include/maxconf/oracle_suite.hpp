#pragma once

// Seeded comparison of the brute-force oracles against the closed forms.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "maxconf/certify.hpp"
#include "maxconf/ensembles.hpp"
#include "maxconf/oracle.hpp"
#include "maxconf/random.hpp"
#include "maxconf/strategies.hpp"

namespace maxconf {

struct OracleInstance {
    double c;
    double p;
    double eta1;
};

/// Instance i of a seeded family: c in [0.05, 0.95], p in [0, 0.9], eta1 in [0.05, 1].
inline OracleInstance oracle_instance(std::uint64_t seed, std::uint64_t i) {
    const auto u = Philox4x32::uniforms(seed, i, 0x0AC1E);
    return {0.05 + 0.9 * u[0], 0.9 * u[1], 0.05 + 0.95 * u[2]};
}

inline constexpr double kAgreementTol = 1e-3;
/// A conclusive direction tilted by d leaks only d^2/4, so directions are resolved to about sqrt(eps)
/// and the unambiguous search can undercut its closed form by a few 1e-8.
inline constexpr double kOvershootTol = 1e-7;

struct OracleAgreement {
    double guess = 0.0;
    double confidence = 0.0;
    double rate_confidence = 0.0;
    double ud = 0.0;
    /// Largest amount by which an oracle beat its closed form (soundness).
    double overshoot = 0.0;

    double worst() const { return std::max({guess, confidence, rate_confidence, ud}); }
    bool ok() const { return worst() <= kAgreementTol && overshoot <= kOvershootTol; }
};

inline OracleAgreement oracle_agreement(std::size_t samples, std::uint64_t seed, const SearchConfig &cfg = {}) {
    OracleAgreement a;
    for (std::size_t i = 0; i < samples; ++i) {
        const auto [c, p, eta] = oracle_instance(seed, i);
        const Ensemble pure = make_pure_pair({c, 0.0, 0.5, 0.5});
        const Ensemble noisy = make_pair({c, p, 0.5, 0.5});

        const double g = brute_guess(pure, cfg), g0 = helstrom(pure).value;
        const double m = brute_confidence(noisy, std::nullopt, cfg), m0 = mcm_quantum(c, p).value;
        const double r = brute_confidence(noisy, eta, cfg), r0 = certify_qubit(c, p, eta).value;
        const double u = brute_ud(pure, cfg), u0 = ud_quantum(c).value;

        a.guess = std::max(a.guess, std::abs(g - g0));
        a.confidence = std::max(a.confidence, std::abs(m - m0));
        a.rate_confidence = std::max(a.rate_confidence, std::abs(r - r0));
        a.ud = std::max(a.ud, std::abs(u - u0));
        a.overshoot = std::max({a.overshoot, g - g0, m - m0, r - r0, u0 - u});
    }
    return a;
}

}  // namespace maxconf
