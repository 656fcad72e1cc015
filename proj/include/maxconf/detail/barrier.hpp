#pragma once

// Log-barrier interior-point method for small linear matrix inequality problems:
//   minimize cost . x  subject to  G_k(x) = C_k + sum_i x_i A_{k,i} > 0.

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <utility>
#include <vector>

#include "maxconf/qmath.hpp"

namespace maxconf::detail {

/// Traceless Hermitian basis (generalized Gell-Mann), normalized to tr[T_i T_j] = 2 delta_ij.
inline std::vector<ComplexMatrix> traceless_basis(std::size_t d) {
    std::vector<ComplexMatrix> out;
    for (std::size_t j = 0; j < d; ++j) {
        for (std::size_t k = j + 1; k < d; ++k) {
            ComplexMatrix s(d), a(d);
            s(j, k) = s(k, j) = 1.0;
            a(j, k) = Complex(0.0, -1.0);
            a(k, j) = Complex(0.0, 1.0);
            out.push_back(s);
            out.push_back(a);
        }
    }
    for (std::size_t l = 1; l < d; ++l) {
        ComplexMatrix z(d);
        const double norm = std::sqrt(2.0 / static_cast<double>(l * (l + 1)));
        for (std::size_t m = 0; m < l; ++m) {
            z(m, m) = norm;
        }
        z(l, l) = -norm * static_cast<double>(l);
        out.push_back(z);
    }
    return out;
}

struct LmiBlock {
    ComplexMatrix constant;
    std::vector<std::pair<std::size_t, ComplexMatrix>> terms;

    ComplexMatrix at(const std::vector<double> &x) const {
        ComplexMatrix g = constant;
        for (const auto &[i, a] : terms) {
            g += a * x[i];
        }
        return g;
    }
};

struct LmiProblem {
    std::size_t num_vars = 0;
    std::vector<double> cost;
    std::vector<LmiBlock> blocks;

    double objective(const std::vector<double> &x) const {
        double v = 0.0;
        for (std::size_t i = 0; i < num_vars; ++i) {
            v += cost[i] * x[i];
        }
        return v;
    }

    std::size_t barrier_degree() const {
        std::size_t m = 0;
        for (const auto &b : blocks) {
            m += b.constant.dim();
        }
        return m;
    }
};

struct BarrierOptions {
    double t0 = 1.0;
    double growth = 8.0;
    double target_gap = 1e-11;
    int max_newton = 60;
    double newton_tol = 1e-12;
};

struct BarrierResult {
    std::vector<double> x;
    double objective = 0.0;
    int newton_steps = 0;
    double final_t = 0.0;
};

namespace barrier_impl {

struct BlockState {
    EigenDecomposition eig;
    ComplexMatrix inverse;
    double logdet;
};

inline bool evaluate(const LmiBlock &b, const std::vector<double> &x, BlockState &out) {
    out.eig = eig_hermitian(hermitian_part(b.at(x)));
    if (!(out.eig.values.front() > 0.0)) {
        return false;
    }
    out.logdet = 0.0;
    for (double v : out.eig.values) {
        out.logdet += std::log(v);
    }
    out.inverse = out.eig.apply([](double v) { return 1.0 / v; });
    return true;
}

/// t * cost . x - sum log det G_k, or +inf outside the feasible cone.
inline double merit(const LmiProblem &p, const std::vector<double> &x, double t) {
    double f = t * p.objective(x);
    BlockState st;
    for (const auto &b : p.blocks) {
        if (!evaluate(b, x, st)) {
            return std::numeric_limits<double>::infinity();
        }
        f -= st.logdet;
    }
    return f;
}

}  // namespace barrier_impl

/// x0 must be strictly feasible.
inline BarrierResult solve_barrier(const LmiProblem &p, std::vector<double> x0, const BarrierOptions &opt = {}) {
    using barrier_impl::BlockState;
    BarrierResult res;
    res.x = std::move(x0);
    const std::size_t n = p.num_vars;
    if (n == 0) {
        res.objective = 0.0;
        return res;
    }
    const double degree = static_cast<double>(p.barrier_degree());
    double t = opt.t0;
    Eigen::VectorXd grad(n);
    Eigen::MatrixXd hess(n, n);
    std::vector<std::vector<std::pair<std::size_t, ComplexMatrix>>> scaled(p.blocks.size());
    BlockState st;

    while (true) {
        for (int it = 0; it < opt.max_newton; ++it) {
            grad.setZero();
            hess.setZero();
            for (std::size_t i = 0; i < n; ++i) {
                grad(static_cast<Eigen::Index>(i)) = t * p.cost[i];
            }
            for (std::size_t k = 0; k < p.blocks.size(); ++k) {
                const auto &b = p.blocks[k];
                if (!barrier_impl::evaluate(b, res.x, st)) {
                    return res;  // unreachable for a strictly feasible iterate
                }
                auto &ys = scaled[k];
                ys.clear();
                for (const auto &[i, a] : b.terms) {
                    ys.emplace_back(i, st.inverse * a);
                }
                for (std::size_t u = 0; u < ys.size(); ++u) {
                    const auto iu = static_cast<Eigen::Index>(ys[u].first);
                    grad(iu) -= ys[u].second.trace().real();
                    for (std::size_t v = u; v < ys.size(); ++v) {
                        const auto iv = static_cast<Eigen::Index>(ys[v].first);
                        const double h = real_trace_product(ys[u].second, ys[v].second);
                        hess(iu, iv) += h;
                        if (iu != iv) {
                            hess(iv, iu) += h;
                        }
                    }
                }
            }
            const double ridge = 1e-14 * std::max(1.0, hess.diagonal().cwiseAbs().maxCoeff());
            hess.diagonal().array() += ridge;
            const Eigen::VectorXd step = -hess.ldlt().solve(grad);
            const double decrement = -grad.dot(step);
            ++res.newton_steps;
            if (!std::isfinite(decrement) || decrement / 2.0 <= opt.newton_tol) {
                break;
            }
            const double f0 = barrier_impl::merit(p, res.x, t);
            double s = 1.0;
            std::vector<double> trial(n);
            bool moved = false;
            while (s > 1e-20) {
                for (std::size_t i = 0; i < n; ++i) {
                    trial[i] = res.x[i] + s * step(static_cast<Eigen::Index>(i));
                }
                const double f1 = barrier_impl::merit(p, trial, t);
                if (f1 <= f0 - 0.25 * s * decrement) {
                    res.x = trial;
                    moved = true;
                    break;
                }
                s *= 0.5;
            }
            if (!moved) {
                break;
            }
        }
        if (degree / t <= opt.target_gap) {
            break;
        }
        t *= opt.growth;
    }
    res.final_t = t;
    res.objective = p.objective(res.x);
    return res;
}

}  // namespace maxconf::detail
