#pragma once

// Small-dimension (2..4) complex Hermitian linear algebra.
//
// Qubit operators are diagonalised through their Bloch form t*I + v.sigma,
// whose eigenvalues are t -/+ |v|; qutrit and ququart operators go through a
// cyclic complex Jacobi sweep. Both paths are deterministic.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

#include "maxconf/error.hpp"

namespace maxconf {

using Complex = std::complex<double>;

inline constexpr double kHermitianTol = 1e-10;
inline constexpr double kPsdTol = 1e-10;
inline constexpr double kSupportEps = 1e-12;

class ComplexMatrix {
   public:
    static constexpr std::size_t kMaxDim = 4;

    ComplexMatrix() : ComplexMatrix(2) {}

    explicit ComplexMatrix(std::size_t dim) : dim_(dim), data_{} {
        require(dim >= 1 && dim <= kMaxDim, ErrorKind::DimensionMismatch,
                "matrix dimension must be in [1, 4], got " + std::to_string(dim));
    }

    ComplexMatrix(std::size_t dim, std::initializer_list<Complex> row_major) : ComplexMatrix(dim) {
        require(row_major.size() == dim * dim, ErrorKind::DimensionMismatch, "initializer has wrong entry count");
        std::copy(row_major.begin(), row_major.end(), data_.begin());
    }

    static ComplexMatrix identity(std::size_t dim) {
        ComplexMatrix m(dim);
        for (std::size_t i = 0; i < dim; ++i) {
            m(i, i) = 1.0;
        }
        return m;
    }

    static ComplexMatrix zero(std::size_t dim) { return ComplexMatrix(dim); }

    static ComplexMatrix diagonal(std::span<const double> values) {
        ComplexMatrix m(values.size());
        for (std::size_t i = 0; i < values.size(); ++i) {
            m(i, i) = values[i];
        }
        return m;
    }

    /// |v><v| for an arbitrary (not necessarily normalised) vector.
    static ComplexMatrix outer(std::span<const Complex> v) {
        ComplexMatrix m(v.size());
        for (std::size_t i = 0; i < v.size(); ++i) {
            for (std::size_t j = 0; j < v.size(); ++j) {
                m(i, j) = v[i] * std::conj(v[j]);
            }
        }
        return m;
    }

    std::size_t dim() const noexcept { return dim_; }

    Complex &operator()(std::size_t row, std::size_t col) { return data_[row * dim_ + col]; }
    const Complex &operator()(std::size_t row, std::size_t col) const { return data_[row * dim_ + col]; }

    ComplexMatrix adjoint() const {
        ComplexMatrix m(dim_);
        for (std::size_t i = 0; i < dim_; ++i) {
            for (std::size_t j = 0; j < dim_; ++j) {
                m(i, j) = std::conj((*this)(j, i));
            }
        }
        return m;
    }

    Complex trace() const {
        Complex t = 0.0;
        for (std::size_t i = 0; i < dim_; ++i) {
            t += (*this)(i, i);
        }
        return t;
    }

    double frobenius_norm() const {
        double s = 0.0;
        for (std::size_t k = 0; k < dim_ * dim_; ++k) {
            s += std::norm(data_[k]);
        }
        return std::sqrt(s);
    }

    bool is_finite() const {
        for (std::size_t k = 0; k < dim_ * dim_; ++k) {
            if (!std::isfinite(data_[k].real()) || !std::isfinite(data_[k].imag())) {
                return false;
            }
        }
        return true;
    }

    ComplexMatrix &operator+=(const ComplexMatrix &o) {
        check_same_dim(o);
        for (std::size_t k = 0; k < dim_ * dim_; ++k) {
            data_[k] += o.data_[k];
        }
        return *this;
    }

    ComplexMatrix &operator-=(const ComplexMatrix &o) {
        check_same_dim(o);
        for (std::size_t k = 0; k < dim_ * dim_; ++k) {
            data_[k] -= o.data_[k];
        }
        return *this;
    }

    ComplexMatrix &operator*=(Complex s) {
        for (std::size_t k = 0; k < dim_ * dim_; ++k) {
            data_[k] *= s;
        }
        return *this;
    }

    friend ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix &b) { return a += b; }
    friend ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix &b) { return a -= b; }
    friend ComplexMatrix operator*(ComplexMatrix a, Complex s) { return a *= s; }
    friend ComplexMatrix operator*(Complex s, ComplexMatrix a) { return a *= s; }
    friend ComplexMatrix operator*(ComplexMatrix a, double s) { return a *= Complex(s, 0.0); }
    friend ComplexMatrix operator*(double s, ComplexMatrix a) { return a *= Complex(s, 0.0); }
    friend ComplexMatrix operator/(ComplexMatrix a, double s) { return a *= Complex(1.0 / s, 0.0); }
    friend ComplexMatrix operator-(ComplexMatrix a) { return a *= Complex(-1.0, 0.0); }

    friend ComplexMatrix operator*(const ComplexMatrix &a, const ComplexMatrix &b) {
        a.check_same_dim(b);
        ComplexMatrix m(a.dim_);
        for (std::size_t i = 0; i < a.dim_; ++i) {
            for (std::size_t k = 0; k < a.dim_; ++k) {
                const Complex aik = a(i, k);
                for (std::size_t j = 0; j < a.dim_; ++j) {
                    m(i, j) += aik * b(k, j);
                }
            }
        }
        return m;
    }

    friend bool operator==(const ComplexMatrix &a, const ComplexMatrix &b) {
        return a.dim_ == b.dim_ && std::equal(a.data_.begin(), a.data_.begin() + a.dim_ * a.dim_, b.data_.begin());
    }

   private:
    void check_same_dim(const ComplexMatrix &o) const {
        require(dim_ == o.dim_, ErrorKind::DimensionMismatch,
                "operand dimensions differ: " + std::to_string(dim_) + " vs " + std::to_string(o.dim_));
    }

    std::size_t dim_;
    std::array<Complex, kMaxDim * kMaxDim> data_;
};

/// tr[A B] without forming the product.
inline Complex trace_product(const ComplexMatrix &a, const ComplexMatrix &b) {
    require(a.dim() == b.dim(), ErrorKind::DimensionMismatch, "trace_product dimension mismatch");
    Complex t = 0.0;
    for (std::size_t i = 0; i < a.dim(); ++i) {
        for (std::size_t k = 0; k < a.dim(); ++k) {
            t += a(i, k) * b(k, i);
        }
    }
    return t;
}

/// Real part of tr[A B]; exact for Hermitian A, B.
inline double real_trace_product(const ComplexMatrix &a, const ComplexMatrix &b) { return trace_product(a, b).real(); }

inline double hermiticity_defect(const ComplexMatrix &a) { return (a - a.adjoint()).frobenius_norm(); }

inline ComplexMatrix hermitian_part(const ComplexMatrix &a) { return (a + a.adjoint()) * 0.5; }

// ---- Pauli / Bloch helpers (qubit only) ----

using Bloch = std::array<double, 3>;

inline ComplexMatrix pauli_x() { return ComplexMatrix(2, {0.0, 1.0, 1.0, 0.0}); }
inline ComplexMatrix pauli_y() { return ComplexMatrix(2, {0.0, Complex(0.0, -1.0), Complex(0.0, 1.0), 0.0}); }
inline ComplexMatrix pauli_z() { return ComplexMatrix(2, {1.0, 0.0, 0.0, -1.0}); }

/// t*I + v.sigma
inline ComplexMatrix from_bloch(double t, const Bloch &v) {
    return ComplexMatrix(2, {t + v[2], Complex(v[0], -v[1]), Complex(v[0], v[1]), t - v[2]});
}

/// Inverse of from_bloch for a Hermitian qubit operator: returns (t, v).
inline std::pair<double, Bloch> bloch_coefficients(const ComplexMatrix &a) {
    require(a.dim() == 2, ErrorKind::DimensionMismatch, "Bloch coefficients need a qubit operator");
    const double t = 0.5 * (a(0, 0).real() + a(1, 1).real());
    const Complex off = 0.5 * (a(1, 0) + std::conj(a(0, 1)));
    return {t, Bloch{off.real(), off.imag(), 0.5 * (a(0, 0).real() - a(1, 1).real())}};
}

/// Projector onto the pure qubit state with unit Bloch vector n.
inline ComplexMatrix bloch_projector(const Bloch &n) { return from_bloch(0.5, {0.5 * n[0], 0.5 * n[1], 0.5 * n[2]}); }

inline double norm3(const Bloch &v) { return std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]); }
inline double dot3(const Bloch &a, const Bloch &b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

// ---- Eigendecomposition ----

struct EigenDecomposition {
    std::vector<double> values;  // ascending
    ComplexMatrix vectors;       // column k is the eigenvector of values[k]

    std::size_t dim() const { return values.size(); }

    std::vector<Complex> vector(std::size_t k) const {
        std::vector<Complex> v(dim());
        for (std::size_t i = 0; i < dim(); ++i) {
            v[i] = vectors(i, k);
        }
        return v;
    }

    ComplexMatrix projector(std::size_t k) const { return ComplexMatrix::outer(vector(k)); }

    /// V f(Lambda) V^dagger
    ComplexMatrix apply(const std::function<double(double)> &f) const {
        ComplexMatrix m(dim());
        for (std::size_t k = 0; k < dim(); ++k) {
            const double fk = f(values[k]);
            if (fk == 0.0) {
                continue;
            }
            for (std::size_t i = 0; i < dim(); ++i) {
                const Complex vik = vectors(i, k) * fk;
                for (std::size_t j = 0; j < dim(); ++j) {
                    m(i, j) += vik * std::conj(vectors(j, k));
                }
            }
        }
        return m;
    }

    ComplexMatrix reconstruct() const {
        return apply([](double x) { return x; });
    }
};

namespace detail {

inline EigenDecomposition eig_qubit(const ComplexMatrix &a) {
    const auto [t, v] = bloch_coefficients(a);
    const double r = norm3(v);
    EigenDecomposition out{{t - r, t + r}, ComplexMatrix::identity(2)};
    if (r == 0.0) {
        return out;
    }
    const double nx = v[0] / r;
    const double ny = v[1] / r;
    const double nz = v[2] / r;
    // +1 eigenvector of n.sigma, built from whichever pole is farther away.
    std::array<Complex, 2> up;
    if (nz >= 0.0) {
        up = {Complex(1.0 + nz, 0.0), Complex(nx, ny)};
    } else {
        up = {Complex(nx, -ny), Complex(1.0 - nz, 0.0)};
    }
    const double norm = std::sqrt(std::norm(up[0]) + std::norm(up[1]));
    up[0] /= norm;
    up[1] /= norm;
    const std::array<Complex, 2> down = {-std::conj(up[1]), std::conj(up[0])};
    out.vectors(0, 0) = down[0];
    out.vectors(1, 0) = down[1];
    out.vectors(0, 1) = up[0];
    out.vectors(1, 1) = up[1];
    return out;
}

inline double off_diagonal_norm(const ComplexMatrix &a) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.dim(); ++i) {
        for (std::size_t j = 0; j < a.dim(); ++j) {
            if (i != j) {
                s += std::norm(a(i, j));
            }
        }
    }
    return std::sqrt(s);
}

inline EigenDecomposition eig_jacobi(ComplexMatrix a) {
    const std::size_t n = a.dim();
    ComplexMatrix v = ComplexMatrix::identity(n);
    const double scale = std::max(a.frobenius_norm(), 1e-300);
    for (int sweep = 0; sweep < 64; ++sweep) {
        if (off_diagonal_norm(a) <= 1e-16 * scale) {
            break;
        }
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const Complex g = a(p, q);
                const double mag = std::abs(g);
                if (mag <= 1e-300) {
                    continue;
                }
                const Complex phase = g / mag;
                const double app = a(p, p).real();
                const double aqq = a(q, q).real();
                const double tau = (aqq - app) / (2.0 * mag);
                const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;
                // Unitary acting on the (p, q) plane: diag(1, conj(phase)) followed by a real rotation.
                ComplexMatrix u = ComplexMatrix::identity(n);
                u(p, p) = c;
                u(p, q) = s;
                u(q, p) = -s * std::conj(phase);
                u(q, q) = c * std::conj(phase);
                a = u.adjoint() * a * u;
                a(p, q) = 0.0;
                a(q, p) = 0.0;
                v = v * u;
            }
        }
    }
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) {
        order[i] = i;
    }
    std::sort(order.begin(), order.end(),
              [&](std::size_t x, std::size_t y) { return a(x, x).real() < a(y, y).real(); });
    EigenDecomposition out{std::vector<double>(n), ComplexMatrix(n)};
    for (std::size_t k = 0; k < n; ++k) {
        out.values[k] = a(order[k], order[k]).real();
        for (std::size_t i = 0; i < n; ++i) {
            out.vectors(i, k) = v(i, order[k]);
        }
    }
    return out;
}

}  // namespace detail

inline EigenDecomposition eig_hermitian(const ComplexMatrix &a) {
    require(a.is_finite(), ErrorKind::NonHermitian, "matrix has non-finite entries");
    const double defect = hermiticity_defect(a);
    require(defect <= kHermitianTol, ErrorKind::NonHermitian,
            "||A - A^dagger||_F = " + std::to_string(defect) + " exceeds tolerance");
    const ComplexMatrix h = hermitian_part(a);
    if (h.dim() == 1) {
        return EigenDecomposition{{h(0, 0).real()}, ComplexMatrix::identity(1)};
    }
    if (h.dim() == 2) {
        return detail::eig_qubit(h);
    }
    return detail::eig_jacobi(h);
}

inline double min_eigenvalue(const ComplexMatrix &a) { return eig_hermitian(a).values.front(); }
inline double max_eigenvalue(const ComplexMatrix &a) { return eig_hermitian(a).values.back(); }

inline double trace_norm(const ComplexMatrix &a) {
    double s = 0.0;
    for (double x : eig_hermitian(a).values) {
        s += std::abs(x);
    }
    return s;
}

inline double op_norm(const ComplexMatrix &a) {
    const auto e = eig_hermitian(a);
    return std::max(std::abs(e.values.front()), std::abs(e.values.back()));
}

inline bool is_psd(const ComplexMatrix &a, double tol = kPsdTol) {
    return hermiticity_defect(a) <= kHermitianTol && min_eigenvalue(a) >= -tol;
}

/// Raises every eigenvalue below eps to eps.
inline ComplexMatrix psd_floor(const ComplexMatrix &a, double eps = kSupportEps) {
    return eig_hermitian(a).apply([eps](double x) { return std::max(x, eps); });
}

/// Positive part sum_{lambda > 0} lambda |v><v|.
inline ComplexMatrix positive_part(const ComplexMatrix &a) {
    return eig_hermitian(a).apply([](double x) { return x > 0.0 ? x : 0.0; });
}

/// Negated negative part, so that a = positive_part(a) - negative_part(a).
inline ComplexMatrix negative_part(const ComplexMatrix &a) {
    return eig_hermitian(a).apply([](double x) { return x < 0.0 ? -x : 0.0; });
}

inline ComplexMatrix sqrt_psd(const ComplexMatrix &a) {
    const auto e = eig_hermitian(a);
    require(e.values.front() >= -kPsdTol, ErrorKind::NotPsd,
            "sqrt of matrix with eigenvalue " + std::to_string(e.values.front()));
    return e.apply([](double x) { return x > 0.0 ? std::sqrt(x) : 0.0; });
}

/// Pseudo-inverse square root on the support (eigenvalues above eps).
inline ComplexMatrix inv_sqrt(const ComplexMatrix &a, double eps = kSupportEps) {
    const auto e = eig_hermitian(a);
    require(e.values.front() >= -kPsdTol, ErrorKind::NotPsd,
            "inverse sqrt of matrix with eigenvalue " + std::to_string(e.values.front()));
    return e.apply([eps](double x) { return x > eps ? 1.0 / std::sqrt(x) : 0.0; });
}

/// Projector onto the eigenspace with eigenvalues above eps.
inline ComplexMatrix support_projector(const ComplexMatrix &a, double eps = kSupportEps) {
    return eig_hermitian(a).apply([eps](double x) { return x > eps ? 1.0 : 0.0; });
}

}  // namespace maxconf
