#pragma once

// Certification of the maximum confidence of an untrusted detector from its
// observed click rate: closed-form qubit engine with dual certificates, a
// KKT checker, and a primal/dual interval for arbitrary small ensembles.

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "maxconf/detail/barrier.hpp"
#include "maxconf/ensembles.hpp"
#include "maxconf/error.hpp"
#include "maxconf/ncmodel.hpp"
#include "maxconf/qmath.hpp"
#include "maxconf/strategies.hpp"

namespace maxconf {

inline constexpr double kRateTol = 1e-9;
inline constexpr double kKktTol = 1e-9;

struct OutcomeRates {
    std::vector<double> eta;
    double eta0 = 0.0;

    /// Undetected rate filled in as 1 - sum(eta).
    static OutcomeRates complete(std::vector<double> eta) {
        double total = 0.0;
        for (double v : eta) {
            total += v;
        }
        return {std::move(eta), 1.0 - total};
    }

    double total() const {
        double s = eta0;
        for (double v : eta) {
            s += v;
        }
        return s;
    }

    void validate() const {
        for (double v : eta) {
            require(std::isfinite(v) && v >= -kRateTol && v <= 1.0 + kRateTol, ErrorKind::InfeasibleRates,
                    "outcome rate " + std::to_string(v) + " outside [0, 1]");
        }
        require(std::isfinite(eta0) && eta0 >= -kRateTol, ErrorKind::InfeasibleRates,
                "outcome rates sum to more than one");
        require(std::abs(total() - 1.0) <= kRateTol, ErrorKind::InvalidSpec,
                "outcome rates and undetected rate do not sum to one");
    }
};

struct WeightVector {
    std::vector<double> alpha;
};

enum class Region { LowRate, Sharp, HighRate };

inline std::string_view to_string(Region r) {
    switch (r) {
        case Region::LowRate: return kLowRate;
        case Region::Sharp: return kSharpRange;
        case Region::HighRate: return kHighRate;
    }
    return "?";
}

/// Two-state form: X1 - X2 = lambda rho - rho1 / (2 eta1).
struct QubitDual {
    double lambda = 0.0;
    ComplexMatrix x1;
    ComplexMatrix x2;
};

/// Dual variables: K for completeness, s_y for the rate constraints, r_y sigma_y
/// and r0 sigma0 for positivity of M_y and M_0.
struct DualCertificate {
    ComplexMatrix K;
    std::vector<double> s;
    std::vector<double> r;
    std::vector<ComplexMatrix> sigma;
    double r0 = 0.0;
    ComplexMatrix sigma0;
    std::optional<QubitDual> qubit;

    double objective(const OutcomeRates &rates) const {
        double v = K.trace().real();
        for (std::size_t y = 0; y < s.size() && y < rates.eta.size(); ++y) {
            v += s[y] * rates.eta[y];
        }
        return v;
    }
};

struct CertReport {
    double value = 0.0;
    Region branch = Region::LowRate;
    Povm povm;
    DualCertificate dual;
    double gap = 0.0;
    double primal = 0.0;
    double dual_objective = 0.0;
    /// Above the upper boundary no rank-one element reaches the optimum.
    bool rank_two_certified = false;
};

struct QuantumBoundaries {
    double lower;
    double upper;
};

/// (1 -/+ (1 - p)^2 c)/2.
inline QuantumBoundaries quantum_boundaries(double c, double p) {
    const double b2 = (1.0 - p) * (1.0 - p) * c;
    return {0.5 * (1.0 - b2), 0.5 * (1.0 + b2)};
}

namespace detail {

inline ComplexMatrix normalized_or_mixed(const ComplexMatrix &m, double tr) {
    return tr > kSupportEps ? m / tr : ComplexMatrix::identity(m.dim()) / static_cast<double>(m.dim());
}

inline double clamp_gap(double g) { return (g < 0.0 && g > -1e-12) ? 0.0 : g; }

}  // namespace detail

inline CertReport certify_qubit(const PairSpec &spec, double eta1) {
    require(std::isfinite(spec.c) && spec.c >= 0.0 && spec.c <= 1.0, ErrorKind::OutOfRange,
            "confusability must lie in [0, 1], got " + std::to_string(spec.c));
    require(std::isfinite(spec.p) && spec.p >= 0.0 && spec.p < 1.0, ErrorKind::OutOfRange,
            "noise must lie in [0, 1), got " + std::to_string(spec.p));
    require(std::isfinite(eta1) && eta1 > 0.0 && eta1 <= 1.0, ErrorKind::OutOfRange,
            "outcome rate must lie in (0, 1], got " + std::to_string(eta1));
    spec.validate();
    require(spec.equal_priors(), ErrorKind::UnequalPriors, "closed-form certification needs equal priors");
    require(spec.c > kZeroConfusability && spec.c < 1.0 - kZeroConfusability, ErrorKind::DegenerateEnsemble,
            "closed-form certification needs 0 < c < 1");

    const double c = spec.c;
    const double pbar = 1.0 - spec.p;
    const double b = pbar * std::sqrt(c);
    const double a = pbar * std::sqrt(1.0 - c);
    const double b2 = b * b;
    const double tan_theta = std::sqrt((1.0 - c) / c);
    const double t = 1.0 - 2.0 * eta1;
    const double root = std::sqrt(1.0 - b2);
    const auto [eta_lo, eta_hi] = quantum_boundaries(c, spec.p);

    CertReport rep;
    ComplexMatrix m1(2);
    double gamma = 0.0;
    if (eta1 <= eta_lo) {
        rep.branch = Region::LowRate;
        rep.value = 0.5 * (1.0 + a / root);
        m1 = bloch_projector({root, 0.0, -b}) * (2.0 * eta1 / (1.0 - b2));
    } else if (eta1 <= eta_hi) {
        rep.branch = Region::Sharp;
        const double w = std::sqrt(std::max(0.0, b2 - t * t));
        rep.value = 0.5 + tan_theta * w / (4.0 * eta1);
        m1 = bloch_projector({w / b, 0.0, -t / b});
        gamma = t / w;
    } else {
        rep.branch = Region::HighRate;
        rep.value = 0.5 * (1.0 + (a / root) * (1.0 / eta1 - 1.0));
        const double alpha = (2.0 * eta1 - 1.0 - b2) / (1.0 - b2);
        m1 = ComplexMatrix::identity(2) * alpha + bloch_projector({root, 0.0, b}) * (1.0 - alpha);
        gamma = -b / root;
        rep.rank_two_certified = true;
    }
    rep.povm = Povm::complete({m1});

    const Ensemble e = make_pair(spec);
    const ComplexMatrix rho = average_state(e).matrix();
    const ComplexMatrix &rho1 = e.state(0);

    const double lambda = rep.branch == Region::LowRate ? rep.value / eta1 : (1.0 + gamma * tan_theta) / (2.0 * eta1);
    const ComplexMatrix x = rho * lambda - rho1 / (2.0 * eta1);
    QubitDual q{lambda, positive_part(x), negative_part(x)};

    DualCertificate &d = rep.dual;
    d.K = q.x2;
    d.s = {lambda};
    const double tr1 = q.x1.trace().real();
    const double tr2 = q.x2.trace().real();
    d.r = {tr1};
    d.sigma = {detail::normalized_or_mixed(q.x1, tr1)};
    d.r0 = tr2;
    d.sigma0 = detail::normalized_or_mixed(q.x2, tr2);
    d.qubit = std::move(q);

    rep.primal = confidence(e, rep.povm, 1);
    rep.dual_objective = lambda * eta1 + tr2;
    rep.gap = detail::clamp_gap(rep.dual_objective - rep.primal);
    return rep;
}

inline CertReport certify_qubit(double c, double p, double eta1) {
    return certify_qubit(PairSpec{c, p, 0.5, 0.5}, eta1);
}

/// Largest disagreement of neighbouring closed-form branches at the two boundaries.
inline double quantum_boundary_mismatch(double c, double p) {
    const double pbar = 1.0 - p;
    const double b2 = pbar * pbar * c;
    const double a = pbar * std::sqrt(1.0 - c);
    const double tan_theta = std::sqrt((1.0 - c) / c);
    const auto [lo, hi] = quantum_boundaries(c, p);
    const auto mid = [&](double eta) {
        const double t = 1.0 - 2.0 * eta;
        return 0.5 + tan_theta * std::sqrt(std::max(0.0, b2 - t * t)) / (4.0 * eta);
    };
    const double low = 0.5 * (1.0 + a / std::sqrt(1.0 - b2));
    const double high_at = 0.5 * (1.0 + (a / std::sqrt(1.0 - b2)) * (1.0 / hi - 1.0));
    return std::max(std::abs(low - mid(lo)), std::abs(mid(hi) - high_at));
}

// ---- optimality conditions ----

struct KktReport {
    bool ok = false;
    std::vector<std::pair<std::string, double>> residuals;

    double max_residual() const {
        double m = 0.0;
        for (const auto &r : residuals) {
            m = std::max(m, r.second);
        }
        return m;
    }

    double residual(std::string_view name) const {
        for (const auto &r : residuals) {
            if (r.first == name) {
                return r.second;
            }
        }
        fail(ErrorKind::OutOfRange, "no residual named " + std::string(name));
    }
};

namespace detail {

inline double psd_violation(const ComplexMatrix &m) { return std::max(0.0, -min_eigenvalue(hermitian_part(m))); }

/// B_y = alpha_y q_y / eta_y rho_y; detector y (1-based) targets member y - 1.
inline ComplexMatrix objective_operator(const Ensemble &e, double alpha, double eta, std::size_t y) {
    if (alpha == 0.0) {
        return ComplexMatrix::zero(e.dim());
    }
    require(eta > kMinRate, ErrorKind::OutOfRange, "positive weight on a detector that never clicks");
    return e.state(y - 1) * (alpha * e.prior(y - 1) / eta);
}

inline double weighted_confidence(const Ensemble &e, const WeightVector &w, const OutcomeRates &rates,
                                  const Povm &povm) {
    double v = 0.0;
    for (std::size_t y = 1; y <= povm.size(); ++y) {
        v += real_trace_product(povm.element(y), objective_operator(e, w.alpha[y - 1], rates.eta[y - 1], y));
    }
    return v;
}

}  // namespace detail

/// Primal feasibility, dual feasibility, stationarity, complementary slackness and zero gap.
inline KktReport verify_kkt(const Ensemble &e, const WeightVector &w, const OutcomeRates &rates, const Povm &povm,
                            const DualCertificate &dual) {
    const std::size_t n = povm.size();
    require(n >= 1 && n <= e.size() && w.alpha.size() == n && rates.eta.size() == n && dual.s.size() == n &&
                dual.r.size() == n && dual.sigma.size() == n,
            ErrorKind::DimensionMismatch, "certificate, rates, weights and POVM disagree on the number of outcomes");
    require(povm.dim() == e.dim() && dual.K.dim() == e.dim() && dual.sigma0.dim() == e.dim(),
            ErrorKind::DimensionMismatch, "operator dimensions disagree with the ensemble");
    for (const auto &s : dual.sigma) {
        require(s.dim() == e.dim(), ErrorKind::DimensionMismatch, "sigma dimension disagrees with the ensemble");
    }

    const ComplexMatrix rho = average_state(e).matrix();
    const bool has_m0 = rates.eta0 > kRateTol;
    double rate_res = 0.0, dual_psd = 0.0, stat = 0.0, slack = 0.0, r_neg = 0.0, sigma_psd = 0.0;
    for (std::size_t y = 1; y <= n; ++y) {
        const ComplexMatrix &m = povm.element(y);
        rate_res = std::max(rate_res, std::abs(real_trace_product(m, rho) - rates.eta[y - 1]));
        const ComplexMatrix b = detail::objective_operator(e, w.alpha[y - 1], rates.eta[y - 1], y);
        dual_psd = std::max(dual_psd, detail::psd_violation(dual.K + rho * dual.s[y - 1] - b));
        const ComplexMatrix rs = dual.sigma[y - 1] * dual.r[y - 1];
        stat = std::max(stat, (dual.K - (b - rho * dual.s[y - 1] + rs)).frobenius_norm());
        slack = std::max(slack, std::abs(real_trace_product(m, rs)));
        r_neg = std::max(r_neg, -dual.r[y - 1]);
        sigma_psd = std::max(sigma_psd, detail::psd_violation(dual.sigma[y - 1]));
    }
    double k_psd = 0.0;
    if (has_m0) {
        k_psd = detail::psd_violation(dual.K);
        const ComplexMatrix rs0 = dual.sigma0 * dual.r0;
        stat = std::max(stat, (dual.K - rs0).frobenius_norm());
        slack = std::max(slack, std::abs(real_trace_product(povm.inconclusive, rs0)));
        r_neg = std::max(r_neg, -dual.r0);
        sigma_psd = std::max(sigma_psd, detail::psd_violation(dual.sigma0));
    }
    const double primal = detail::weighted_confidence(e, w, rates, povm);
    const double gap = std::abs(dual.objective(rates) - primal);

    KktReport rep;
    rep.residuals = {
        {"primal_psd", std::max(0.0, -povm.min_eigenvalue())},
        {"primal_completeness", povm.completeness_defect()},
        {"primal_rate", rate_res},
        {"dual_K_psd", k_psd},
        {"dual_constraint_psd", dual_psd},
        {"dual_r_nonnegative", std::max(0.0, r_neg)},
        {"dual_sigma_psd", sigma_psd},
        {"stationarity", stat},
        {"complementary_slackness", slack},
        {"duality_gap", gap},
    };
    rep.ok = rep.max_residual() <= kKktTol;
    return rep;
}

// ---- general ensembles ----

struct GeneralCertReport {
    double lower = 0.0;
    double upper = 0.0;
    Povm povm;
    DualCertificate dual;
    int newton_steps = 0;

    double width() const { return upper - lower; }
};

struct GeneralCertOptions {
    detail::BarrierOptions barrier{};
};

/// Interval [lower, upper] on max sum_y alpha_y C(y) over all POVMs with the given rates.
/// lower comes from an explicit feasible POVM, upper from a dual-feasible certificate.
inline GeneralCertReport certify_general(const Ensemble &e, const WeightVector &w, const OutcomeRates &rates,
                                         const GeneralCertOptions &opt = {}) {
    const std::size_t n = w.alpha.size();
    require(n >= 1 && n <= e.size(), ErrorKind::WrongArity, "need between 1 and |ensemble| detectors");
    require(rates.eta.size() == n, ErrorKind::DimensionMismatch, "one rate per detector required");
    rates.validate();
    for (double a : w.alpha) {
        require(std::isfinite(a) && a >= 0.0, ErrorKind::InvalidSpec, "weights must be nonnegative");
    }

    const std::size_t d = e.dim();
    const ComplexMatrix I = ComplexMatrix::identity(d);
    const ComplexMatrix rho = average_state(e).matrix();
    std::vector<double> eta(n);
    std::vector<std::size_t> active;
    for (std::size_t y = 1; y <= n; ++y) {
        eta[y - 1] = std::max(0.0, rates.eta[y - 1]);
        if (eta[y - 1] > kSupportEps) {
            active.push_back(y);
        } else {
            require(w.alpha[y - 1] == 0.0, ErrorKind::OutOfRange,
                    "confidence of detector " + std::to_string(y) + " is undefined at zero rate");
        }
    }
    std::vector<ComplexMatrix> B(n, ComplexMatrix::zero(d));
    for (std::size_t y : active) {
        B[y - 1] = detail::objective_operator(e, w.alpha[y - 1], eta[y - 1], y);
    }

    GeneralCertReport rep;
    rep.dual.s.assign(n, 0.0);
    rep.dual.r.assign(n, 0.0);
    rep.dual.sigma.assign(n, I / static_cast<double>(d));
    rep.dual.sigma0 = I / static_cast<double>(d);
    if (active.empty()) {
        rep.povm = Povm::complete(std::vector<ComplexMatrix>(n, ComplexMatrix::zero(d)));
        rep.dual.K = ComplexMatrix::zero(d);
        return rep;
    }

    double eta0 = 1.0;
    for (double v : eta) {
        eta0 -= v;
    }
    eta0 = std::max(0.0, eta0);
    const bool eliminate = eta0 <= kSupportEps;

    const auto basis = detail::traceless_basis(d);
    const std::size_t m = basis.size();
    std::vector<ComplexMatrix> H;
    H.reserve(m);
    for (const auto &T : basis) {
        H.push_back(T - I * real_trace_product(T, rho));
    }

    // Primal: M_y = eta_y I + sum_j z_{y,j} H_j keeps tr[M_y rho] = eta_y for every z.
    std::vector<std::size_t> free_y(active.begin(), active.end() - (eliminate ? 1 : 0));
    const std::size_t last = active.back();
    detail::LmiProblem primal;
    primal.num_vars = free_y.size() * m;
    primal.cost.assign(primal.num_vars, 0.0);
    for (std::size_t f = 0; f < free_y.size(); ++f) {
        detail::LmiBlock blk{I * eta[free_y[f] - 1], {}};
        for (std::size_t j = 0; j < m; ++j) {
            const std::size_t idx = f * m + j;
            primal.cost[idx] = -real_trace_product(H[j], B[free_y[f] - 1]);
            if (eliminate) {
                primal.cost[idx] += real_trace_product(H[j], B[last - 1]);
            }
            blk.terms.emplace_back(idx, H[j]);
        }
        primal.blocks.push_back(std::move(blk));
    }
    detail::LmiBlock rest{I * (eliminate ? eta[last - 1] : eta0), {}};
    for (std::size_t idx = 0; idx < primal.num_vars; ++idx) {
        rest.terms.emplace_back(idx, -H[idx % m]);
    }
    primal.blocks.push_back(std::move(rest));

    const auto pres = detail::solve_barrier(primal, std::vector<double>(primal.num_vars, 0.0), opt.barrier);
    std::vector<ComplexMatrix> elements(n, ComplexMatrix::zero(d));
    ComplexMatrix used = ComplexMatrix::zero(d);
    for (std::size_t f = 0; f < free_y.size(); ++f) {
        ComplexMatrix my = I * eta[free_y[f] - 1];
        for (std::size_t j = 0; j < m; ++j) {
            my += H[j] * pres.x[f * m + j];
        }
        elements[free_y[f] - 1] = hermitian_part(my);
        used += elements[free_y[f] - 1];
    }
    if (eliminate) {
        elements[last - 1] = I - used;
    }
    rep.povm = Povm::complete(std::move(elements));
    if (eliminate) {
        rep.povm.inconclusive = ComplexMatrix::zero(d);
    }
    OutcomeRates used_rates{eta, eta0};
    rep.lower = detail::weighted_confidence(e, w, used_rates, rep.povm);

    // Dual: minimize tr K + sum_y s_y eta_y with K + s_y rho - B_y >= 0 (and K >= 0 if M_0 is free).
    detail::LmiProblem dual;
    const std::size_t kvars = m + 1;
    std::vector<long> s_index(n, -1);
    std::size_t nv = kvars;
    for (std::size_t y : active) {
        if (eliminate && y == last) {
            continue;  // s is fixed up to a common shift when M_0 vanishes
        }
        s_index[y - 1] = static_cast<long>(nv++);
    }
    dual.num_vars = nv;
    dual.cost.assign(nv, 0.0);
    dual.cost[0] = static_cast<double>(d);
    for (std::size_t y : active) {
        if (s_index[y - 1] >= 0) {
            dual.cost[static_cast<std::size_t>(s_index[y - 1])] = eta[y - 1];
        }
    }
    const auto k_terms = [&] {
        std::vector<std::pair<std::size_t, ComplexMatrix>> t{{0, I}};
        for (std::size_t j = 0; j < m; ++j) {
            t.emplace_back(j + 1, basis[j]);
        }
        return t;
    };
    if (!eliminate) {
        dual.blocks.push_back({ComplexMatrix::zero(d), k_terms()});
    }
    double bmax = 0.0;
    for (std::size_t y : active) {
        detail::LmiBlock blk{-B[y - 1], k_terms()};
        if (s_index[y - 1] >= 0) {
            blk.terms.emplace_back(static_cast<std::size_t>(s_index[y - 1]), rho);
        }
        dual.blocks.push_back(std::move(blk));
        bmax = std::max(bmax, max_eigenvalue(B[y - 1]));
    }
    std::vector<double> x0(nv, 0.0);
    x0[0] = 1.0 + bmax;
    const auto dres = detail::solve_barrier(dual, std::move(x0), opt.barrier);
    rep.newton_steps = pres.newton_steps + dres.newton_steps;

    ComplexMatrix K = I * dres.x[0];
    for (std::size_t j = 0; j < m; ++j) {
        K += basis[j] * dres.x[j + 1];
    }
    for (std::size_t y : active) {
        if (s_index[y - 1] >= 0) {
            rep.dual.s[y - 1] = dres.x[static_cast<std::size_t>(s_index[y - 1])];
        }
    }
    // Shift K so every dual block is PSD; the bound stays valid after rounding.
    double shift = 0.0;
    for (std::size_t k = 0; k < dual.blocks.size(); ++k) {
        shift = std::max(shift, -min_eigenvalue(hermitian_part(dual.blocks[k].at(dres.x))));
    }
    rep.dual.K = hermitian_part(K + I * shift);
    for (std::size_t y : active) {
        const ComplexMatrix rs = hermitian_part(rep.dual.K + rho * rep.dual.s[y - 1] - B[y - 1]);
        const double tr = rs.trace().real();
        rep.dual.r[y - 1] = tr;
        rep.dual.sigma[y - 1] = detail::normalized_or_mixed(rs, tr);
    }
    if (!eliminate) {
        const double tr = rep.dual.K.trace().real();
        rep.dual.r0 = tr;
        rep.dual.sigma0 = detail::normalized_or_mixed(rep.dual.K, tr);
    }
    rep.upper = rep.dual.objective(used_rates);
    return rep;
}

// ---- quantum / noncontextual gap ----

struct DeltaGap {
    double delta;
    Region region;
    /// The low-rate gap, constant in eta1.
    double delta_low;
};

/// Quantum minus noncontextual certified confidence outside the noncontextual sharp range.
inline DeltaGap delta_gap(double c, double p, double eta1) {
    detail::check_nc_domain(c, p, eta1);
    const auto [lo, hi] = nc_boundaries(c, p);
    require(eta1 <= lo || eta1 > hi, ErrorKind::WrongRegion,
            "rate " + std::to_string(eta1) + " lies inside the sharp range");
    const double delta = certify_qubit(c, p, eta1).value - nc_certified(c, p, eta1).value;
    const double lo_rate = 0.5 * std::min(lo, quantum_boundaries(c, p).lower);
    const double delta_low = certify_qubit(c, p, lo_rate).value - nc_certified(c, p, lo_rate).value;
    return {delta, eta1 <= lo ? Region::LowRate : Region::HighRate, delta_low};
}

}  // namespace maxconf
