#pragma once

// Four-region ontic model of a preparation-noncontextual theory for a pair of
// states with confusability c, its response-function families, and the
// certified noncontextual confidence.

#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "maxconf/error.hpp"
#include "maxconf/strategies.hpp"

namespace maxconf {

/// Region order: R12 (shared), R1, R2, R0 (outside both pure supports).
using RegionVector = std::array<double, 4>;

enum class Epistemic { Psi1, Psi2, Mirror1, Mirror2, Mixed };

inline std::string_view to_string(Epistemic e) {
    switch (e) {
        case Epistemic::Psi1: return "psi1";
        case Epistemic::Psi2: return "psi2";
        case Epistemic::Mirror1: return "mirror1";
        case Epistemic::Mirror2: return "mirror2";
        case Epistemic::Mixed: return "mixed";
    }
    return "?";
}

inline double dot(const RegionVector &a, const RegionVector &b) {
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2] + a[3] * b[3];
}

inline RegionVector combine(double wa, const RegionVector &a, double wb, const RegionVector &b) {
    return {wa * a[0] + wb * b[0], wa * a[1] + wb * b[1], wa * a[2] + wb * b[2], wa * a[3] + wb * b[3]};
}

class OnticModel {
   public:
    explicit OnticModel(double c) : c_(c) {
        require(std::isfinite(c) && c >= 0.0 && c <= 1.0, ErrorKind::OutOfRange,
                "confusability must lie in [0, 1], got " + std::to_string(c));
    }

    double c() const noexcept { return c_; }

    RegionVector weights(Epistemic e) const {
        const double c = c_;
        switch (e) {
            case Epistemic::Psi1: return {c, 1.0 - c, 0.0, 0.0};
            case Epistemic::Psi2: return {c, 0.0, 1.0 - c, 0.0};
            case Epistemic::Mirror1: return {0.0, 0.0, 1.0 - c, c};
            case Epistemic::Mirror2: return {0.0, 1.0 - c, 0.0, c};
            case Epistemic::Mixed: return {0.5 * c, 0.5 * (1.0 - c), 0.5 * (1.0 - c), 0.5 * c};
        }
        return {};
    }

    /// (1 - p) mu_x + p mu_mixed for x in {Psi1, Psi2}.
    RegionVector noisy(Epistemic e, double p) const { return combine(1.0 - p, weights(e), p, weights(Epistemic::Mixed)); }

    /// Ensemble average of the two noisy preparations with equal priors.
    RegionVector noisy_average(double p) const {
        return combine(0.5, noisy(Epistemic::Psi1, p), 0.5, noisy(Epistemic::Psi2, p));
    }

   private:
    double c_;
};

inline OnticModel build_model(double c) { return OnticModel(c); }

/// Indicator of the regions a pure (or mirrored) preparation occupies; a sharp
/// measurement for that preparation responds deterministically there.
inline RegionVector support_of(Epistemic target) {
    switch (target) {
        case Epistemic::Psi1: return {1, 1, 0, 0};
        case Epistemic::Psi2: return {1, 0, 1, 0};
        case Epistemic::Mirror1: return {0, 0, 1, 1};
        case Epistemic::Mirror2: return {0, 1, 0, 1};
        case Epistemic::Mixed: break;
    }
    fail(ErrorKind::OutOfRange, "the mixed preparation has no sharp measurement");
}

inline Epistemic mirror_of(Epistemic target) {
    switch (target) {
        case Epistemic::Psi1: return Epistemic::Mirror1;
        case Epistemic::Psi2: return Epistemic::Mirror2;
        case Epistemic::Mirror1: return Epistemic::Psi1;
        case Epistemic::Mirror2: return Epistemic::Psi2;
        case Epistemic::Mixed: break;
    }
    fail(ErrorKind::OutOfRange, "the mixed preparation has no mirror");
}

enum class ResponseFamily { Sharp, WeightedSharp, Path, Rank2, Custom };

struct ResponseFunction {
    RegionVector weights{};
    ResponseFamily family = ResponseFamily::Custom;
    std::string description;
    double parameter = 0.0;

    static ResponseFunction constant(double v) {
        return {{v, v, v, v}, ResponseFamily::Custom, "constant(" + std::to_string(v) + ")", v};
    }

    static ResponseFunction sharp(Epistemic target) {
        return {support_of(target), ResponseFamily::Sharp, "sharp(" + std::string(to_string(target)) + ")", 1.0};
    }

    /// q times the sharp response of the target.
    static ResponseFunction weighted_sharp(double q, Epistemic target) {
        const RegionVector s = support_of(target);
        return {combine(q, s, 0.0, s), ResponseFamily::WeightedSharp,
                "weighted-sharp(" + std::to_string(q) + ", " + std::string(to_string(target)) + ")", q};
    }

    /// w sharp(to) + (1 - w) sharp(from): mixing two neighbouring sharp responses.
    static ResponseFunction path(double w, Epistemic from, Epistemic to) {
        return {combine(w, support_of(to), 1.0 - w, support_of(from)), ResponseFamily::Path,
                "path(" + std::to_string(w) + ", " + std::string(to_string(from)) + "->" +
                    std::string(to_string(to)) + ")",
                w};
    }

    /// sharp(target) + a sharp(mirror of target); a = 1 is the trivial response.
    static ResponseFunction rank2(double a, Epistemic target) {
        return {combine(1.0, support_of(target), a, support_of(mirror_of(target))), ResponseFamily::Rank2,
                "rank2(" + std::to_string(a) + ", " + std::string(to_string(target)) + ")", a};
    }

    bool is_valid(double tol = 1e-12) const {
        for (double w : weights) {
            if (!(w >= -tol && w <= 1.0 + tol)) {
                return false;
            }
        }
        return true;
    }
};

inline double prob(const OnticModel &m, Epistemic state, const ResponseFunction &xi) {
    return dot(m.weights(state), xi.weights);
}

struct NcConfidence {
    double confidence;
    double eta;
};

/// Confidence of the first detector on the noisy equal-prior pair and its click rate.
inline NcConfidence nc_confidence(const OnticModel &m, double p, const ResponseFunction &xi) {
    check_unit_interval(p, "noise");
    const double eta = dot(m.noisy_average(p), xi.weights);
    require(eta > kMinRate, ErrorKind::ZeroRate, "response never fires on the ensemble");
    return {0.5 * dot(m.noisy(Epistemic::Psi1, p), xi.weights) / eta, eta};
}

// ---- certified noncontextual confidence ----

inline constexpr std::string_view kLowRate = "LowRate";
inline constexpr std::string_view kSharpRange = "Sharp";
inline constexpr std::string_view kHighRate = "HighRate";

struct NcBoundaries {
    double lower;
    double upper;
};

/// Rate interval reachable by sharp measurements: (1 -/+ (1 - p) c)/2.
inline NcBoundaries nc_boundaries(double c, double p) {
    const double k = (1.0 - p) * c;
    return {0.5 * (1.0 - k), 0.5 * (1.0 + k)};
}

namespace detail {

inline double nc_low(double c, double p) { return 1.0 - p / (2.0 * (1.0 - (1.0 - p) * c)); }
inline double nc_mid(double c, double p, double eta) { return 0.5 + (1.0 - p) * (1.0 - c) / (4.0 * eta); }
inline double nc_high(double c, double p, double eta) {
    return (1.0 - p * (1.0 - eta) / (1.0 - (1.0 - p) * c)) / (2.0 * eta);
}

inline void check_nc_domain(double c, double p, double eta1) {
    check_unit_interval(c, "confusability");
    check_unit_interval(p, "noise");
    require(std::isfinite(eta1) && eta1 > 0.0 && eta1 <= 1.0, ErrorKind::OutOfRange,
            "outcome rate must lie in (0, 1], got " + std::to_string(eta1));
    require(c > kZeroConfusability, ErrorKind::UnsupportedZeroC,
            "noncontextual certification is undefined for disjoint supports (c = 0)");
}

}  // namespace detail

/// Piecewise bound; at a boundary the lower-rate branch label is reported.
inline BoundResult nc_certified(double c, double p, double eta1) {
    detail::check_nc_domain(c, p, eta1);
    const auto [lo, hi] = nc_boundaries(c, p);
    if (eta1 <= lo) {
        return {detail::nc_low(c, p), Theory::Noncontextual, Task::MCM, std::nullopt, std::string(kLowRate)};
    }
    if (eta1 <= hi) {
        return {detail::nc_mid(c, p, eta1), Theory::Noncontextual, Task::MCM, std::nullopt, std::string(kSharpRange)};
    }
    return {detail::nc_high(c, p, eta1), Theory::Noncontextual, Task::MCM, std::nullopt, std::string(kHighRate)};
}

/// Largest disagreement between neighbouring branch formulas at the two boundaries.
inline double nc_boundary_mismatch(double c, double p) {
    const auto [lo, hi] = nc_boundaries(c, p);
    double worst = 0.0;
    if (lo > 0.0) {
        worst = std::max(worst, std::abs(detail::nc_low(c, p) - detail::nc_mid(c, p, lo)));
    }
    if (hi > 0.0 && hi <= 1.0) {
        worst = std::max(worst, std::abs(detail::nc_mid(c, p, hi) - detail::nc_high(c, p, hi)));
    }
    return worst;
}

// ---- achievability inside the model ----

struct NcCandidate {
    ResponseFunction response;
    double confidence;
};

namespace detail {

inline constexpr double kRateMatchTol = 1e-9;

/// Members of a one-parameter family xi(s) = base + s * slope, s in [0, 1], with
/// a click rate equal to eta1. The rate is affine in s, so the match is solved exactly.
template <class Make>
std::optional<double> solve_family(const OnticModel &m, double p, double eta1, Make make) {
    const RegionVector avg = m.noisy_average(p);
    const double e0 = dot(avg, make(0.0).weights);
    const double e1 = dot(avg, make(1.0).weights);
    if (std::abs(e1 - e0) <= 1e-15) {
        if (std::abs(e0 - eta1) <= kRateMatchTol) {
            return 1.0;
        }
        return std::nullopt;
    }
    const double s = (eta1 - e0) / (e1 - e0);
    if (s < -kRateMatchTol || s > 1.0 + kRateMatchTol) {
        return std::nullopt;
    }
    return std::clamp(s, 0.0, 1.0);
}

}  // namespace detail

/// Best response among the sharp, weighted-sharp, sharp-path and rank-2 families
/// whose click rate equals eta1. Earlier families win ties.
inline ResponseFunction nc_achievability_search(const OnticModel &m, double p, double eta1) {
    check_unit_interval(p, "noise");
    require(std::isfinite(eta1) && eta1 > 0.0 && eta1 <= 1.0, ErrorKind::OutOfRange,
            "outcome rate must lie in (0, 1], got " + std::to_string(eta1));

    constexpr std::array<Epistemic, 4> targets{Epistemic::Psi1, Epistemic::Psi2, Epistemic::Mirror1,
                                               Epistemic::Mirror2};
    // Neighbouring supports around the Bloch circle.
    constexpr std::array<std::pair<Epistemic, Epistemic>, 4> arcs{{{Epistemic::Psi2, Epistemic::Psi1},
                                                                   {Epistemic::Psi1, Epistemic::Mirror2},
                                                                   {Epistemic::Mirror2, Epistemic::Mirror1},
                                                                   {Epistemic::Mirror1, Epistemic::Psi2}}};

    std::optional<NcCandidate> best;
    const auto consider = [&](const ResponseFunction &xi) {
        const auto [conf, eta] = nc_confidence(m, p, xi);
        if (std::abs(eta - eta1) > detail::kRateMatchTol) {
            return;
        }
        if (!best || conf > best->confidence + 1e-12) {
            best = NcCandidate{xi, conf};
        }
    };

    for (auto t : targets) {
        if (std::abs(dot(m.noisy_average(p), support_of(t)) - eta1) <= detail::kRateMatchTol) {
            consider(ResponseFunction::sharp(t));
        }
    }
    for (auto t : targets) {
        const auto make = [t](double q) { return ResponseFunction::weighted_sharp(q, t); };
        if (auto s = detail::solve_family(m, p, eta1, make); s && *s > 0.0) {
            consider(make(*s));
        }
    }
    for (auto [from, to] : arcs) {
        const auto make = [from = from, to = to](double w) { return ResponseFunction::path(w, from, to); };
        if (auto s = detail::solve_family(m, p, eta1, make)) {
            consider(make(*s));
        }
    }
    for (auto t : targets) {
        const auto make = [t](double a) { return ResponseFunction::rank2(a, t); };
        if (auto s = detail::solve_family(m, p, eta1, make)) {
            consider(make(*s));
        }
    }
    require(best.has_value(), ErrorKind::Infeasible,
            "no response in the searched families fires at rate " + std::to_string(eta1));
    return best->response;
}

}  // namespace maxconf
