#pragma once

// Closed-form discrimination bounds (minimum-error, unambiguous, maximum
// confidence) for quantum states and for the preparation-noncontextual model,
// together with the quantum measurements that attain them.

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "maxconf/ensembles.hpp"
#include "maxconf/error.hpp"
#include "maxconf/qmath.hpp"

namespace maxconf {

inline constexpr double kZeroConfusability = 1e-12;
inline constexpr double kMinRate = 1e-15;

/// Outcomes are 1-based: element(y) for y = 1..n is a detector, element(0) is
/// the inconclusive / undetected arm.
struct Povm {
    std::vector<ComplexMatrix> elements;
    ComplexMatrix inconclusive;

    /// Fills the inconclusive arm with I - sum(elements).
    static Povm complete(std::vector<ComplexMatrix> elements) {
        require(!elements.empty(), ErrorKind::WrongArity, "POVM needs at least one detector element");
        ComplexMatrix rest = ComplexMatrix::identity(elements.front().dim());
        for (const auto &m : elements) {
            rest -= m;
        }
        return Povm{std::move(elements), rest};
    }

    std::size_t size() const noexcept { return elements.size(); }
    std::size_t dim() const noexcept { return inconclusive.dim(); }

    const ComplexMatrix &element(std::size_t y) const {
        require(y <= elements.size(), ErrorKind::OutOfRange, "outcome index " + std::to_string(y));
        return y == 0 ? inconclusive : elements[y - 1];
    }

    double completeness_defect() const {
        ComplexMatrix sum = inconclusive;
        for (const auto &m : elements) {
            sum += m;
        }
        return (sum - ComplexMatrix::identity(dim())).frobenius_norm();
    }

    double min_eigenvalue() const {
        double lo = maxconf::min_eigenvalue(inconclusive);
        for (const auto &m : elements) {
            lo = std::min(lo, maxconf::min_eigenvalue(m));
        }
        return lo;
    }

    bool is_valid(double tol = kPsdTol) const { return min_eigenvalue() >= -tol && completeness_defect() <= tol; }
};

enum class Theory { Quantum, Noncontextual };
enum class Task { MED, UD, MCM };

inline std::string_view to_string(Theory t) { return t == Theory::Quantum ? "quantum" : "noncontextual"; }
inline std::string_view to_string(Task t) {
    switch (t) {
        case Task::MED: return "med";
        case Task::UD: return "ud";
        case Task::MCM: return "mcm";
    }
    return "?";
}

struct BoundResult {
    double value = 0.0;
    Theory theory = Theory::Quantum;
    Task task = Task::MED;
    std::optional<Povm> measurement;
    std::string branch;
};

// ---- figures of merit evaluated on a concrete measurement ----

/// P(y | x) = tr[M_y rho_x]; x is 0-based over ensemble members, y is an outcome index.
inline double outcome_probability(const Ensemble &e, const Povm &m, std::size_t x, std::size_t y) {
    return real_trace_product(m.element(y), e.state(x));
}

/// eta_y = tr[M_y rho] for the ensemble average rho.
inline double outcome_rate(const Ensemble &e, const Povm &m, std::size_t y) {
    return real_trace_product(m.element(y), average_state(e).matrix());
}

/// sum_x q_x tr[M_x rho_x]; detector y targets member y - 1.
inline double guessing_probability(const Ensemble &e, const Povm &m) {
    require(m.size() <= e.size(), ErrorKind::DimensionMismatch, "more detectors than ensemble members");
    double s = 0.0;
    for (std::size_t y = 1; y <= m.size(); ++y) {
        s += e.prior(y - 1) * outcome_probability(e, m, y - 1, y);
    }
    return s;
}

/// Bayes confidence q_y tr[M_y rho_y] / tr[M_y rho].
inline double confidence(const Ensemble &e, const Povm &m, std::size_t y) {
    require(y >= 1 && y <= m.size() && y <= e.size(), ErrorKind::OutOfRange, "confidence needs a detector index");
    const double rate = outcome_rate(e, m, y);
    require(rate > kMinRate, ErrorKind::ZeroRate, "detector " + std::to_string(y) + " never clicks");
    return e.prior(y - 1) * outcome_probability(e, m, y - 1, y) / rate;
}

inline double inconclusive_rate(const Ensemble &e, const Povm &m) { return outcome_rate(e, m, 0); }

// ---- minimum-error discrimination ----

/// Helstrom measurement: projectors onto the positive / non-positive eigenspaces of q1 rho1 - q2 rho2.
inline BoundResult helstrom(const Ensemble &e) {
    require(e.size() == 2, ErrorKind::WrongArity, "Helstrom bound needs exactly two states");
    const ComplexMatrix gamma = e.state(0) * e.prior(0) - e.state(1) * e.prior(1);
    const auto eig = eig_hermitian(gamma);
    const ComplexMatrix m1 = eig.apply([](double x) { return x > 0.0 ? 1.0 : 0.0; });
    const ComplexMatrix m2 = ComplexMatrix::identity(e.dim()) - m1;
    double norm1 = 0.0;
    for (double x : eig.values) {
        norm1 += std::abs(x);
    }
    return BoundResult{0.5 + 0.5 * norm1, Theory::Quantum, Task::MED,
                       Povm{{m1, m2}, ComplexMatrix::zero(e.dim())}, "helstrom"};
}

inline void check_unit_interval(double v, const char *name) {
    require(std::isfinite(v) && v >= 0.0 && v <= 1.0, ErrorKind::OutOfRange,
            std::string(name) + " must lie in [0, 1], got " + std::to_string(v));
}

inline BoundResult guess_nc(double c) {
    check_unit_interval(c, "confusability");
    return BoundResult{1.0 - 0.5 * c, Theory::Noncontextual, Task::MED, std::nullopt, "sharp"};
}

// ---- unambiguous discrimination ----

/// Minimum inconclusive rate sqrt(c) for the canonical equal-prior pure pair.
/// M1 and M2 are projectors onto the states orthogonal to psi2 and psi1, both
/// scaled by 1/(1 + sqrt(c)), the largest common factor keeping M0 >= 0.
inline BoundResult ud_quantum(double c) {
    check_unit_interval(c, "confusability");
    const auto [perp1, perp2] = mirrored_pair_vectors(c);
    const double scale = 1.0 / (1.0 + std::sqrt(c));
    const ComplexMatrix m1 = ComplexMatrix::outer(perp2) * scale;
    const ComplexMatrix m2 = ComplexMatrix::outer(perp1) * scale;
    return BoundResult{std::sqrt(c), Theory::Quantum, Task::UD, Povm::complete({m1, m2}), "ud"};
}

/// (1 + c)/2 for overlapping supports; zero once the supports are disjoint.
inline BoundResult ud_noncontextual(double c) {
    check_unit_interval(c, "confusability");
    if (c <= kZeroConfusability) {
        return BoundResult{0.0, Theory::Noncontextual, Task::UD, std::nullopt, "disjoint"};
    }
    return BoundResult{0.5 * (1.0 + c), Theory::Noncontextual, Task::UD, std::nullopt, "weighted-sharp"};
}

// ---- maximum confidence ----

/// Rank-one MCM for the noisy canonical pair: M_y proportional to |phi_y><phi_y| with
/// phi_y = sqrt((1 - k)/2)|0> +/- sqrt((1 + k)/2)|1>, k = (1 - p) sqrt(c).
inline Povm mcm_pair_povm(double c, double p) {
    const double k = (1.0 - p) * std::sqrt(c);
    const double a0 = std::sqrt(std::max(0.0, 0.5 * (1.0 - k)));
    const double a1 = std::sqrt(0.5 * (1.0 + k));
    const std::array<Complex, 2> phi1{a0, a1};
    const std::array<Complex, 2> phi2{a0, -a1};
    // |<phi1|phi2>| = k, so the sum of the two projectors has top eigenvalue 1 + k.
    const double scale = 1.0 / (1.0 + k);
    return Povm::complete({ComplexMatrix::outer(phi1) * scale, ComplexMatrix::outer(phi2) * scale});
}

inline BoundResult mcm_quantum(double c, double p) {
    check_unit_interval(c, "confusability");
    check_unit_interval(p, "noise");
    const double pbar = 1.0 - p;
    const double denom = 1.0 - pbar * pbar * c;
    if (denom <= kMinRate) {
        // Identical pure states: every detector reports the prior.
        const ComplexMatrix half = ComplexMatrix::identity(2) * 0.5;
        return BoundResult{0.5, Theory::Quantum, Task::MCM, Povm::complete({half, half}), "identical"};
    }
    const double value = 0.5 * (1.0 + pbar * std::sqrt(1.0 - c) / std::sqrt(denom));
    return BoundResult{value, Theory::Quantum, Task::MCM, mcm_pair_povm(c, p), "rank-one"};
}

inline BoundResult mcm_noncontextual(double c, double p) {
    check_unit_interval(c, "confusability");
    check_unit_interval(p, "noise");
    const double pbar = 1.0 - p;
    const double denom = 1.0 - pbar * c;
    if (denom <= kMinRate) {
        return BoundResult{0.5, Theory::Noncontextual, Task::MCM, std::nullopt, "identical"};
    }
    return BoundResult{0.5 * (1.0 + pbar * (1.0 - c) / denom), Theory::Noncontextual, Task::MCM, std::nullopt,
                       "sharp"};
}

/// max C(y) = || rho^{-1/2} q_y rho_y rho^{-1/2} ||_inf for any ensemble, with the
/// inverse square root taken on the support of rho. Detector y is 1-based.
inline BoundResult mcm_quantum_general(const Ensemble &e, std::size_t y) {
    require(y >= 1 && y <= e.size(), ErrorKind::OutOfRange, "detector index " + std::to_string(y));
    const ComplexMatrix rho = average_state(e).matrix();
    const auto rho_eig = eig_hermitian(rho);
    for (double x : rho_eig.values) {
        require(!(x > kSupportEps && x <= 1e-9), ErrorKind::SingularEnsemble,
                "ensemble average has an eigenvalue " + std::to_string(x) + " of ambiguous numerical rank");
    }
    const ComplexMatrix r = rho_eig.apply([](double x) { return x > kSupportEps ? 1.0 / std::sqrt(x) : 0.0; });
    const ComplexMatrix target = r * (e.state(y - 1) * e.prior(y - 1)) * r;
    const auto top = eig_hermitian(target);
    const double value = top.values.back();

    const auto v = top.vector(top.dim() - 1);
    std::vector<Complex> w(e.dim(), 0.0);
    for (std::size_t i = 0; i < e.dim(); ++i) {
        for (std::size_t j = 0; j < e.dim(); ++j) {
            w[i] += r(i, j) * v[j];
        }
    }
    double wn = 0.0;
    for (const auto &a : w) {
        wn += std::norm(a);
    }
    require(wn > kSupportEps, ErrorKind::SingularEnsemble, "optimal direction lies outside the support");
    std::vector<ComplexMatrix> elements(e.size(), ComplexMatrix::zero(e.dim()));
    elements[y - 1] = ComplexMatrix::outer(w) / wn;
    return BoundResult{value, Theory::Quantum, Task::MCM, Povm::complete(std::move(elements)), "operator-norm"};
}

}  // namespace maxconf
