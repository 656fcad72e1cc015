#pragma once

// Brute-force search over qubit measurements. Used as an independent check on
// every closed-form bound: grid seeding, seeded random restarts, compass refinement.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <vector>

#include "maxconf/ensembles.hpp"
#include "maxconf/error.hpp"
#include "maxconf/parallel.hpp"
#include "maxconf/qmath.hpp"
#include "maxconf/random.hpp"

namespace maxconf {

struct SearchConfig {
    std::size_t restarts = 32;
    double grid_resolution = 0.1;
    double refine_tolerance = 1e-10;
    std::uint64_t seed = 0xC0FFEE;

    void validate() const {
        require(restarts >= 1, ErrorKind::InvalidSpec, "at least one restart required");
        require(grid_resolution > 0.0 && grid_resolution <= 0.1, ErrorKind::InvalidSpec,
                "grid resolution must lie in (0, 0.1]");
        require(refine_tolerance > 0.0, ErrorKind::InvalidSpec, "refine tolerance must be positive");
    }
};

namespace detail {

using BoxObjective = std::function<double(const std::vector<double> &)>;

/// Compass search inside [0, 1]^k: halve the step whenever no axis move improves.
inline double compass_refine(const BoxObjective &f, std::vector<double> &x, double step, double tol) {
    double best = f(x);
    std::vector<double> trial = x;
    while (step > tol) {
        bool improved = false;
        for (std::size_t i = 0; i < x.size(); ++i) {
            for (double dir : {1.0, -1.0}) {
                trial = x;
                trial[i] = std::clamp(x[i] + dir * step, 0.0, 1.0);
                if (trial[i] == x[i]) {
                    continue;
                }
                const double v = f(trial);
                if (v > best) {
                    best = v;
                    x = trial;
                    improved = true;
                }
            }
        }
        if (!improved) {
            step *= 0.5;
        }
    }
    return best;
}

/// Maximizes f over [0, 1]^k. Seeds: the best grid points plus cfg.restarts random
/// points, each restart drawing from its own (seed, index) stream.
inline double maximize_box(const BoxObjective &f, std::size_t k, const SearchConfig &cfg,
                           std::vector<double> *argmax = nullptr) {
    cfg.validate();
    const auto per_axis = static_cast<std::size_t>(std::llround(1.0 / cfg.grid_resolution)) + 1;
    std::vector<std::pair<double, std::vector<double>>> seeds;
    std::vector<std::size_t> idx(k, 0);
    constexpr std::size_t kKeep = 4;
    while (true) {
        std::vector<double> x(k);
        for (std::size_t i = 0; i < k; ++i) {
            x[i] = std::min(1.0, static_cast<double>(idx[i]) * cfg.grid_resolution);
        }
        const double v = f(x);
        if (std::isfinite(v)) {
            seeds.emplace_back(v, std::move(x));
            std::stable_sort(seeds.begin(), seeds.end(), [](const auto &a, const auto &b) { return a.first > b.first; });
            if (seeds.size() > kKeep) {
                seeds.pop_back();
            }
        }
        std::size_t i = 0;
        while (i < k && ++idx[i] == per_axis) {
            idx[i++] = 0;
        }
        if (i == k) {
            break;
        }
    }
    for (std::size_t r = 0; r < cfg.restarts; ++r) {
        UniformStream rng(cfg.seed, r);
        std::vector<double> x(k);
        for (auto &v : x) {
            v = rng.next();
        }
        seeds.emplace_back(f(x), std::move(x));
    }

    std::vector<double> values(seeds.size(), -std::numeric_limits<double>::infinity());
    std::vector<std::vector<double>> points(seeds.size());
    parallel_for(seeds.size(), [&](std::size_t s) {
        points[s] = seeds[s].second;
        values[s] = compass_refine(f, points[s], 0.5 * cfg.grid_resolution, cfg.refine_tolerance);
    });
    std::size_t best = 0;
    for (std::size_t s = 1; s < values.size(); ++s) {
        if (values[s] > values[best]) {
            best = s;
        }
    }
    if (argmax) {
        *argmax = points[best];
    }
    return values[best];
}

inline Bloch unit_direction(double u_polar, double u_azimuth) {
    const double th = std::numbers::pi * u_polar;
    const double ph = 2.0 * std::numbers::pi * u_azimuth;
    return {std::sin(th) * std::cos(ph), std::sin(th) * std::sin(ph), std::cos(th)};
}

inline void require_qubit(const Ensemble &e) {
    require(e.dim() == 2, ErrorKind::DimensionMismatch, "brute-force search is implemented for qubits");
}

inline Bloch average_bloch(const Ensemble &e) { return average_state(e).bloch_vector(); }

}  // namespace detail

/// max over two-outcome POVMs of q1 tr[M rho1] + q2 tr[(I - M) rho2].
inline double brute_guess(const Ensemble &e, const SearchConfig &cfg = {}) {
    detail::require_qubit(e);
    require(e.size() == 2, ErrorKind::WrongArity, "guessing search needs two states");
    const Bloch r1 = e[0].state.bloch_vector();
    const Bloch r2 = e[1].state.bloch_vector();
    const double q1 = e.prior(0), q2 = e.prior(1);
    // M = t I + v.sigma with |v| <= min(t, 1 - t), so both eigenvalues stay inside [0, 1].
    const auto f = [&](const std::vector<double> &u) {
        const double t = u[0];
        const double len = u[1] * std::min(t, 1.0 - t);
        const Bloch d = detail::unit_direction(u[2], u[3]);
        const Bloch v{len * d[0], len * d[1], len * d[2]};
        return q1 * (t + dot3(v, r1)) + q2 * (1.0 - t - dot3(v, r2));
    };
    return detail::maximize_box(f, 4, cfg);
}

/// Largest confidence of the first detector; with eta1 set, only elements with
/// tr[M rho] = eta1 are searched (the rate constraint is solved exactly).
inline double brute_confidence(const Ensemble &e, std::optional<double> eta1 = std::nullopt,
                               const SearchConfig &cfg = {}) {
    detail::require_qubit(e);
    const Bloch r1 = e[0].state.bloch_vector();
    const Bloch r = detail::average_bloch(e);
    const double q1 = e.prior(0);
    if (!eta1) {
        // Confidence is invariant under scaling M, so M = (I + s d.sigma)/2 covers every element.
        const auto f = [&](const std::vector<double> &u) {
            const Bloch d = detail::unit_direction(u[1], u[2]);
            const double rate = 1.0 + u[0] * dot3(d, r);
            if (rate <= 1e-14) {
                return -std::numeric_limits<double>::infinity();
            }
            return q1 * (1.0 + u[0] * dot3(d, r1)) / rate;
        };
        return detail::maximize_box(f, 3, cfg);
    }
    const double eta = *eta1;
    require(std::isfinite(eta) && eta > 0.0 && eta <= 1.0, ErrorKind::InfeasibleRate,
            "rate must lie in (0, 1], got " + std::to_string(eta));
    // M = t I + v.sigma with t = eta - v.r; |v| bounded so both eigenvalues stay in [0, 1].
    const auto f = [&](const std::vector<double> &u) {
        const Bloch d = detail::unit_direction(u[1], u[2]);
        const double dr = dot3(d, r);
        double vmax = std::numeric_limits<double>::infinity();
        if (1.0 + dr > 0.0) {
            vmax = std::min(vmax, eta / (1.0 + dr));
        }
        if (1.0 - dr > 0.0) {
            vmax = std::min(vmax, (1.0 - eta) / (1.0 - dr));
        }
        if (!std::isfinite(vmax)) {
            vmax = 0.0;
        }
        const double len = u[0] * vmax;
        const double t = eta - len * dr;
        return q1 * (t + len * dot3(d, r1)) / eta;
    };
    return detail::maximize_box(f, 3, cfg);
}

/// Smallest inconclusive rate over three-outcome POVMs whose conclusive outcomes
/// never fire on the wrong state (cross-click probability at most 1e-9).
inline double brute_ud(const Ensemble &e, const SearchConfig &cfg = {}) {
    detail::require_qubit(e);
    require(e.size() == 2, ErrorKind::WrongArity, "unambiguous search needs two states");
    const ComplexMatrix rho = average_state(e).matrix();
    constexpr double kCross = 1e-9;

    // Direction of each conclusive element: least response on the other state.
    const auto quietest = [&](const ComplexMatrix &other) {
        const auto f = [&](const std::vector<double> &u) {
            return -real_trace_product(bloch_projector(detail::unit_direction(u[0], u[1])), other);
        };
        std::vector<double> arg;
        const double v = detail::maximize_box(f, 2, cfg, &arg);
        return std::pair{bloch_projector(detail::unit_direction(arg[0], arg[1])), -v};
    };
    const auto [p1, leak1] = quietest(e.state(1));
    const auto [p2, leak2] = quietest(e.state(0));

    // Largest a2 keeping I - a1 P1 - a2 P2 >= 0, by bisection.
    const auto max_a2 = [&](double a1) {
        double lo = 0.0, hi = 1.0;
        if (min_eigenvalue(ComplexMatrix::identity(2) - p1 * a1 - p2) >= 0.0) {
            return 1.0;
        }
        for (int i = 0; i < 80; ++i) {
            const double mid = 0.5 * (lo + hi);
            (min_eigenvalue(ComplexMatrix::identity(2) - p1 * a1 - p2 * mid) >= 0.0 ? lo : hi) = mid;
        }
        return lo;
    };
    const double t1 = real_trace_product(p1, rho);
    const double t2 = real_trace_product(p2, rho);
    const auto f = [&](const std::vector<double> &u) {
        const double a1 = u[0];
        const double a2 = max_a2(a1);
        if (a1 * leak1 > kCross || a2 * leak2 > kCross) {
            return -std::numeric_limits<double>::infinity();
        }
        return -(1.0 - a1 * t1 - a2 * t2);
    };
    SearchConfig line = cfg;
    line.restarts = std::min<std::size_t>(cfg.restarts, 8);
    const double best = detail::maximize_box(f, 1, line);
    require(std::isfinite(best), ErrorKind::Infeasible, "no unambiguous measurement found");
    return std::max(0.0, -best);
}

}  // namespace maxconf
