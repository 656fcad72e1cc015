#pragma once

// Monte-Carlo prepare-and-measure runs with state-independent loss, Wilson
// intervals on the observed rates, and certification from the tallies.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "maxconf/certify.hpp"
#include "maxconf/ensembles.hpp"
#include "maxconf/error.hpp"
#include "maxconf/json_io.hpp"
#include "maxconf/parallel.hpp"
#include "maxconf/random.hpp"
#include "maxconf/strategies.hpp"

namespace maxconf {

inline constexpr double kWilsonZ = 1.959963984540054;

struct ExperimentSpec {
    Ensemble ensemble;
    Povm povm;
    double loss = 0.0;
    std::uint64_t trials = 1;
    std::uint64_t seed = 0;

    void validate() const {
        require(std::isfinite(loss) && loss >= 0.0 && loss <= 1.0, ErrorKind::InvalidSpec, "loss must lie in [0, 1]");
        require(trials >= 1, ErrorKind::InvalidSpec, "at least one trial required");
        require(povm.dim() == ensemble.dim(), ErrorKind::DimensionMismatch, "POVM and states differ in dimension");
        require(povm.is_valid(), ErrorKind::InvalidSpec, "POVM elements must be PSD and sum to the identity");
    }
};

struct Interval {
    double lo;
    double hi;
};

/// Wilson score interval for k successes in n trials.
inline Interval wilson_interval(std::uint64_t k, std::uint64_t n, double z = kWilsonZ) {
    require(n > 0, ErrorKind::OutOfRange, "Wilson interval needs at least one trial");
    const double nn = static_cast<double>(n);
    const double ph = static_cast<double>(k) / nn;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / nn;
    const double centre = (ph + z2 / (2.0 * nn)) / denom;
    const double half = z * std::sqrt(ph * (1.0 - ph) / nn + z2 / (4.0 * nn * nn)) / denom;
    return {k == 0 ? 0.0 : std::max(0.0, centre - half), k == n ? 1.0 : std::min(1.0, centre + half)};
}

/// counts[x][y]: preparation x (0-based), outcome y (0 = undetected / inconclusive).
struct Tally {
    std::uint64_t trials = 0;
    std::vector<std::vector<std::uint64_t>> counts;

    std::size_t outcomes() const { return counts.empty() ? 0 : counts.front().size(); }

    std::uint64_t outcome_count(std::size_t y) const {
        std::uint64_t s = 0;
        for (const auto &row : counts) {
            s += row.at(y);
        }
        return s;
    }

    double rate(std::size_t y) const { return static_cast<double>(outcome_count(y)) / static_cast<double>(trials); }

    std::vector<double> rates() const {
        std::vector<double> r(outcomes());
        for (std::size_t y = 0; y < r.size(); ++y) {
            r[y] = rate(y);
        }
        return r;
    }

    Interval rate_interval(std::size_t y) const { return wilson_interval(outcome_count(y), trials); }

    /// Fraction of outcome-y clicks that came from preparation y; empty if y never fired.
    std::optional<double> confidence(std::size_t y) const {
        require(y >= 1 && y <= counts.size() && y < outcomes(), ErrorKind::OutOfRange, "confidence needs a detector");
        const auto n = outcome_count(y);
        if (n == 0) {
            return std::nullopt;
        }
        return static_cast<double>(counts[y - 1][y]) / static_cast<double>(n);
    }

    /// Wilson half-width over z for the confidence estimate.
    std::optional<double> confidence_sigma(std::size_t y) const {
        const auto n = outcome_count(y);
        if (n == 0) {
            return std::nullopt;
        }
        const Interval w = wilson_interval(counts[y - 1][y], n);
        return 0.5 * (w.hi - w.lo) / kWilsonZ;
    }

    void validate() const {
        require(trials > 0 && !counts.empty(), ErrorKind::InvalidSpec, "empty tally");
        std::uint64_t total = 0;
        for (const auto &row : counts) {
            require(row.size() == outcomes(), ErrorKind::InvalidSpec, "ragged count table");
            for (auto v : row) {
                total += v;
            }
        }
        require(total == trials, ErrorKind::InvalidSpec, "counts do not sum to the number of trials");
    }
};

/// Deterministic in spec.seed: trial i always uses counter i, whatever the partition.
/// Counts depend only on the experiment; `workers` changes the partition, never the result.
inline Tally run(const ExperimentSpec &spec, unsigned workers = thread_count()) {
    spec.validate();
    workers = std::max(1u, workers);
    const Ensemble &e = spec.ensemble;
    const std::size_t nx = e.size();
    const std::size_t ny = spec.povm.size() + 1;

    std::vector<double> prior_cdf(nx);
    double acc = 0.0;
    for (std::size_t x = 0; x < nx; ++x) {
        acc += e.prior(x);
        prior_cdf[x] = acc;
    }
    std::vector<std::vector<double>> born_cdf(nx, std::vector<double>(ny));
    for (std::size_t x = 0; x < nx; ++x) {
        double total = 0.0;
        std::vector<double> pr(ny);
        for (std::size_t y = 0; y < ny; ++y) {
            pr[y] = std::max(0.0, outcome_probability(e, spec.povm, x, y));
            total += pr[y];
        }
        double run_sum = 0.0;
        for (std::size_t y = 0; y < ny; ++y) {
            run_sum += pr[y] / total;
            born_cdf[x][y] = run_sum;
        }
    }
    const auto pick = [](const std::vector<double> &cdf, double u) {
        for (std::size_t i = 0; i + 1 < cdf.size(); ++i) {
            if (u < cdf[i]) {
                return i;
            }
        }
        return cdf.size() - 1;
    };

    const std::uint64_t chunk = (spec.trials + workers - 1) / workers;
    std::vector<std::vector<std::vector<std::uint64_t>>> partial(
        workers, std::vector<std::vector<std::uint64_t>>(nx, std::vector<std::uint64_t>(ny, 0)));
    parallel_for(
        workers,
        [&](std::size_t w) {
            const std::uint64_t begin = w * chunk;
            const std::uint64_t end = std::min<std::uint64_t>(spec.trials, begin + chunk);
            auto &local = partial[w];
            for (std::uint64_t i = begin; i < end; ++i) {
                const auto u = Philox4x32::uniforms(spec.seed, i);
                const std::size_t x = pick(prior_cdf, u[0]);
                const std::size_t y = u[1] < spec.loss ? 0 : pick(born_cdf[x], u[2]);
                ++local[x][y];
            }
        },
        workers);

    Tally t{spec.trials, std::vector<std::vector<std::uint64_t>>(nx, std::vector<std::uint64_t>(ny, 0))};
    for (const auto &local : partial) {
        for (std::size_t x = 0; x < nx; ++x) {
            for (std::size_t y = 0; y < ny; ++y) {
                t.counts[x][y] += local[x][y];
            }
        }
    }
    return t;
}

inline Json tally_to_json(const Tally &t) {
    Json wilson = Json::array();
    Json conf = Json::array();
    for (std::size_t y = 0; y < t.outcomes(); ++y) {
        const Interval w = t.rate_interval(y);
        wilson.push_back({w.lo, w.hi});
        if (y >= 1 && y <= t.counts.size()) {
            const auto c = t.confidence(y);
            conf.push_back(c ? Json(*c) : Json(nullptr));
        }
    }
    return {{"trials", t.trials}, {"counts", t.counts}, {"rates", t.rates()}, {"wilson", wilson}, {"confidence", conf}};
}

inline Tally tally_from_json(const Json &j) {
    require(j.is_object() && j.contains("trials") && j.contains("counts"), ErrorKind::ParseError,
            "tally needs \"trials\" and \"counts\"");
    Tally t{j.at("trials").get<std::uint64_t>(), j.at("counts").get<std::vector<std::vector<std::uint64_t>>>()};
    t.validate();
    return t;
}

/// {"ensemble": {...}, "povm": {"elements": [...]}, "loss": l, "trials": n, "seed": s}
inline ExperimentSpec experiment_from_json(const Json &j) {
    require(j.is_object() && j.contains("ensemble") && j.contains("povm"), ErrorKind::ParseError,
            "experiment needs \"ensemble\" and \"povm\"");
    Ensemble e = ensemble_from_json(j.at("ensemble"));
    Povm p = povm_from_json(j.at("povm"), e.dim());
    ExperimentSpec spec{std::move(e), std::move(p), j.value("loss", 0.0), j.value<std::uint64_t>("trials", 1),
                        j.value<std::uint64_t>("seed", 0)};
    spec.validate();
    return spec;
}

// ---- certification from observed data ----

struct PairParameters {
    double c;
    double p;
    /// Orthonormal frame: bisector of the two Bloch vectors, their difference, and the normal.
    std::array<Bloch, 3> frame;
};

/// Recognizes an equal-prior qubit pair of depolarized pure states and extracts (c, p).
inline std::optional<PairParameters> pair_parameters(const Ensemble &e) {
    if (e.dim() != 2 || e.size() != 2 || std::abs(e.prior(0) - e.prior(1)) > kPriorTol) {
        return std::nullopt;
    }
    const Bloch n1 = e[0].state.bloch_vector();
    const Bloch n2 = e[1].state.bloch_vector();
    const double l1 = norm3(n1), l2 = norm3(n2);
    if (std::abs(l1 - l2) > 1e-9 || l1 <= 1e-9) {
        return std::nullopt;
    }
    const double c = std::clamp(0.5 * (1.0 + dot3(n1, n2) / (l1 * l2)), 0.0, 1.0);
    if (c <= 1e-9 || c >= 1.0 - 1e-9) {
        return std::nullopt;
    }
    Bloch s{n1[0] + n2[0], n1[1] + n2[1], n1[2] + n2[2]};
    Bloch d{n1[0] - n2[0], n1[1] - n2[1], n1[2] - n2[2]};
    const double ls = norm3(s), ld = norm3(d);
    for (auto &v : s) v /= ls;
    for (auto &v : d) v /= ld;
    const Bloch nrm{s[1] * d[2] - s[2] * d[1], s[2] * d[0] - s[0] * d[2], s[0] * d[1] - s[1] * d[0]};
    return PairParameters{c, std::clamp(1.0 - l1, 0.0, 1.0), {s, d, nrm}};
}

/// Maps an operator written in the canonical pair frame (bisector = z, difference = x)
/// into the frame of the observed pair.
inline ComplexMatrix rotate_from_canonical(const ComplexMatrix &m, const std::array<Bloch, 3> &frame) {
    const auto [t, v] = bloch_coefficients(m);
    Bloch out{};
    for (int k = 0; k < 3; ++k) {
        out[k] = v[2] * frame[0][k] + v[0] * frame[1][k] + v[1] * frame[2][k];
    }
    return from_bloch(t, out);
}

struct TallyCertification {
    CertReport point;
    double eta_hat;
    Interval eta_interval;
    /// Certified values at the two Wilson endpoints (the value falls as the rate rises).
    Interval value_interval;
    bool closed_form;
};

namespace detail {

inline CertReport general_point(const Ensemble &e, double eta) {
    const auto g = certify_general(e, WeightVector{{1.0}}, OutcomeRates::complete({eta}));
    CertReport r;
    r.value = g.upper;
    r.primal = g.lower;
    r.dual_objective = g.upper;
    r.gap = g.upper - g.lower;
    r.povm = g.povm;
    r.dual = g.dual;
    r.branch = Region::Sharp;
    return r;
}

}  // namespace detail

/// Certifies detector 1 at the observed rate and at both ends of its Wilson interval.
inline TallyCertification certify_from_tally(const Tally &t, const Ensemble &e) {
    t.validate();
    require(t.counts.size() == e.size(), ErrorKind::DimensionMismatch, "tally and ensemble differ in preparations");
    require(t.outcomes() >= 2, ErrorKind::DimensionMismatch, "tally has no detector outcomes");
    const double eta = t.rate(1);
    require(eta > 0.0 && eta <= 1.0, ErrorKind::OutOfRange, "detector 1 never clicked");
    const Interval ci = t.rate_interval(1);
    const double lo = std::max(ci.lo, 1e-12);
    const double hi = std::min(ci.hi, 1.0);

    TallyCertification out{};
    out.eta_hat = eta;
    out.eta_interval = {lo, hi};
    if (const auto pp = pair_parameters(e); pp && pp->p < 1.0) {
        out.closed_form = true;
        out.point = certify_qubit(pp->c, pp->p, eta);
        for (auto &m : out.point.povm.elements) {
            m = rotate_from_canonical(m, pp->frame);
        }
        out.point.povm.inconclusive = rotate_from_canonical(out.point.povm.inconclusive, pp->frame);
        DualCertificate &d = out.point.dual;
        d.K = rotate_from_canonical(d.K, pp->frame);
        d.sigma0 = rotate_from_canonical(d.sigma0, pp->frame);
        for (auto &s : d.sigma) {
            s = rotate_from_canonical(s, pp->frame);
        }
        if (d.qubit) {
            d.qubit->x1 = rotate_from_canonical(d.qubit->x1, pp->frame);
            d.qubit->x2 = rotate_from_canonical(d.qubit->x2, pp->frame);
        }
        out.value_interval = {certify_qubit(pp->c, pp->p, hi).value, certify_qubit(pp->c, pp->p, lo).value};
    } else {
        out.closed_form = false;
        out.point = detail::general_point(e, eta);
        out.value_interval = {detail::general_point(e, hi).value, detail::general_point(e, lo).value};
    }
    return out;
}

inline Json tally_certification_to_json(const TallyCertification &c) {
    return {{"eta_hat", c.eta_hat},
            {"eta_interval", {c.eta_interval.lo, c.eta_interval.hi}},
            {"value", c.point.value},
            {"value_interval", {c.value_interval.lo, c.value_interval.hi}},
            {"closed_form", c.closed_form},
            {"report", report_to_json(c.point)}};
}

}  // namespace maxconf
