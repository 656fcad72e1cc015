#pragma once

#include <cmath>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "maxconf/error.hpp"
#include "maxconf/qmath.hpp"

namespace maxconf {

inline constexpr double kPriorTol = 1e-12;
inline constexpr double kPurityTol = 1e-8;

/// Hermitian, unit-trace, positive semidefinite operator (validated on construction).
class DensityMatrix {
   public:
    explicit DensityMatrix(const ComplexMatrix &m) : matrix_(m) {
        require(m.is_finite(), ErrorKind::InvalidState, "state has non-finite entries");
        require(hermiticity_defect(m) <= kHermitianTol, ErrorKind::InvalidState, "state is not Hermitian");
        const Complex tr = m.trace();
        require(std::abs(tr.real() - 1.0) <= 1e-10 && std::abs(tr.imag()) <= 1e-10, ErrorKind::InvalidState,
                "state trace is " + std::to_string(tr.real()));
        require(min_eigenvalue(m) >= -kPsdTol, ErrorKind::InvalidState, "state has a negative eigenvalue");
        matrix_ = hermitian_part(m);
    }

    static DensityMatrix pure(std::span<const Complex> psi) {
        double n = 0.0;
        for (const auto &a : psi) {
            n += std::norm(a);
        }
        require(n > 0.0, ErrorKind::InvalidState, "zero state vector");
        return DensityMatrix(ComplexMatrix::outer(psi) / n);
    }

    static DensityMatrix maximally_mixed(std::size_t dim) {
        return DensityMatrix(ComplexMatrix::identity(dim) / static_cast<double>(dim));
    }

    const ComplexMatrix &matrix() const noexcept { return matrix_; }
    std::size_t dim() const noexcept { return matrix_.dim(); }

    double purity() const { return real_trace_product(matrix_, matrix_); }
    bool is_pure(double tol = kPurityTol) const { return max_eigenvalue(matrix_) >= 1.0 - tol; }

    Bloch bloch_vector() const {
        const auto [t, v] = bloch_coefficients(matrix_);
        return {2.0 * v[0], 2.0 * v[1], 2.0 * v[2]};
    }

   private:
    ComplexMatrix matrix_;
};

struct EnsembleMember {
    double prior;
    DensityMatrix state;
};

class Ensemble {
   public:
    explicit Ensemble(std::vector<EnsembleMember> members) : members_(std::move(members)) {
        require(!members_.empty(), ErrorKind::InvalidSpec, "ensemble has no members");
        double total = 0.0;
        for (const auto &m : members_) {
            require(m.prior >= 0.0 && std::isfinite(m.prior), ErrorKind::InvalidSpec, "negative prior");
            require(m.state.dim() == members_.front().state.dim(), ErrorKind::DimensionMismatch,
                    "ensemble states have different dimensions");
            total += m.prior;
        }
        require(std::abs(total - 1.0) <= kPriorTol, ErrorKind::InvalidSpec,
                "priors sum to " + std::to_string(total));
    }

    std::size_t size() const noexcept { return members_.size(); }
    std::size_t dim() const noexcept { return members_.front().state.dim(); }
    const EnsembleMember &operator[](std::size_t i) const { return members_.at(i); }
    const std::vector<EnsembleMember> &members() const noexcept { return members_; }

    double prior(std::size_t i) const { return members_.at(i).prior; }
    const ComplexMatrix &state(std::size_t i) const { return members_.at(i).state.matrix(); }

   private:
    std::vector<EnsembleMember> members_;
};

/// Two-state problem parameters: confusability c = |<psi1|psi2>|^2, depolarising noise p, priors.
struct PairSpec {
    double c = 0.5;
    double p = 0.0;
    double q1 = 0.5;
    double q2 = 0.5;

    /// Angle with cos(theta) = sqrt(c).
    double theta() const { return std::acos(std::sqrt(std::clamp(c, 0.0, 1.0))); }

    bool equal_priors() const { return std::abs(q1 - q2) <= kPriorTol; }

    void validate() const {
        require(std::isfinite(c) && c >= 0.0 && c <= 1.0, ErrorKind::InvalidSpec,
                "confusability must lie in [0, 1], got " + std::to_string(c));
        require(std::isfinite(p) && p >= 0.0 && p <= 1.0, ErrorKind::InvalidSpec,
                "noise must lie in [0, 1], got " + std::to_string(p));
        require(q1 >= 0.0 && q2 >= 0.0 && std::abs(q1 + q2 - 1.0) <= kPriorTol, ErrorKind::InvalidSpec,
                "priors must form a probability pair");
    }
};

/// Canonical pair cos(theta/2)|0> +/- sin(theta/2)|1>, symmetric about |0>.
inline std::pair<std::array<Complex, 2>, std::array<Complex, 2>> canonical_pair_vectors(double c) {
    const double theta = std::acos(std::sqrt(std::clamp(c, 0.0, 1.0)));
    const double cs = std::cos(0.5 * theta);
    const double sn = std::sin(0.5 * theta);
    return {{Complex(cs), Complex(sn)}, {Complex(cs), Complex(-sn)}};
}

/// States orthogonal to the canonical pair; (|psi_x><psi_x| + |mirror_x><mirror_x|)/2 = I/2.
inline std::pair<std::array<Complex, 2>, std::array<Complex, 2>> mirrored_pair_vectors(double c) {
    const double theta = std::acos(std::sqrt(std::clamp(c, 0.0, 1.0)));
    const double cs = std::cos(0.5 * theta);
    const double sn = std::sin(0.5 * theta);
    return {{Complex(sn), Complex(-cs)}, {Complex(sn), Complex(cs)}};
}

inline Ensemble make_pure_pair(const PairSpec &spec) {
    spec.validate();
    require(spec.p == 0.0, ErrorKind::InvalidSpec, "make_pure_pair needs p = 0; use make_pair for noisy pairs");
    const auto [psi1, psi2] = canonical_pair_vectors(spec.c);
    return Ensemble({{spec.q1, DensityMatrix::pure(psi1)}, {spec.q2, DensityMatrix::pure(psi2)}});
}

inline Ensemble make_mirrored_pair(const PairSpec &spec) {
    spec.validate();
    const auto [m1, m2] = mirrored_pair_vectors(spec.c);
    return Ensemble({{spec.q1, DensityMatrix::pure(m1)}, {spec.q2, DensityMatrix::pure(m2)}});
}

/// |0> and |+> with equal priors.
inline Ensemble zero_plus_ensemble() {
    const std::array<Complex, 2> zero{1.0, 0.0};
    const std::array<Complex, 2> plus{std::numbers::sqrt2 / 2.0, std::numbers::sqrt2 / 2.0};
    return Ensemble({{0.5, DensityMatrix::pure(zero)}, {0.5, DensityMatrix::pure(plus)}});
}

inline DensityMatrix depolarize(const DensityMatrix &rho, double p) {
    require(std::isfinite(p) && p >= 0.0 && p <= 1.0, ErrorKind::InvalidNoise,
            "noise must lie in [0, 1], got " + std::to_string(p));
    const double d = static_cast<double>(rho.dim());
    return DensityMatrix(rho.matrix() * (1.0 - p) + ComplexMatrix::identity(rho.dim()) * (p / d));
}

/// rho -> (1 - p) rho + p I/d on every member; priors unchanged.
inline Ensemble depolarize(const Ensemble &e, double p) {
    std::vector<EnsembleMember> out;
    out.reserve(e.size());
    for (const auto &m : e.members()) {
        out.push_back({m.prior, depolarize(m.state, p)});
    }
    return Ensemble(std::move(out));
}

/// Pure pair of confusability c, then depolarised by p.
inline Ensemble make_pair(const PairSpec &spec) {
    spec.validate();
    PairSpec pure = spec;
    pure.p = 0.0;
    return depolarize(make_pure_pair(pure), spec.p);
}

/// tr[s1 s2] for pure states; the overlap |<psi1|psi2>|^2.
inline double confusability(const DensityMatrix &s1, const DensityMatrix &s2) {
    require(s1.dim() == s2.dim(), ErrorKind::DimensionMismatch, "states have different dimensions");
    require(s1.is_pure() && s2.is_pure(), ErrorKind::NotPure, "confusability is defined for pure states only");
    return std::clamp(real_trace_product(s1.matrix(), s2.matrix()), 0.0, 1.0);
}

inline DensityMatrix average_state(const Ensemble &e) {
    ComplexMatrix rho(e.dim());
    for (const auto &m : e.members()) {
        rho += m.state.matrix() * m.prior;
    }
    return DensityMatrix(rho);
}

}  // namespace maxconf
