#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ugi/errors.hpp"

namespace ugi {

using cplx = std::complex<double>;

/// Dense row-major complex matrix. Entries are always finite.
class ComplexMatrix {
public:
    ComplexMatrix() = default;

    ComplexMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {
        if (rows == 0 || cols == 0) throw InputError("matrix dimensions must be positive");
    }

    ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<cplx> entries)
        : rows_(rows), cols_(cols), data_(std::move(entries)) {
        if (rows == 0 || cols == 0) throw InputError("matrix dimensions must be positive");
        if (data_.size() != rows * cols) throw InputError("entry count does not match rows*cols");
        require_finite();
    }

    ComplexMatrix(std::initializer_list<std::initializer_list<cplx>> rows) {
        rows_ = rows.size();
        cols_ = rows_ ? rows.begin()->size() : 0;
        if (rows_ == 0 || cols_ == 0) throw InputError("matrix dimensions must be positive");
        data_.reserve(rows_ * cols_);
        for (const auto& r : rows) {
            if (r.size() != cols_) throw InputError("ragged matrix literal");
            data_.insert(data_.end(), r.begin(), r.end());
        }
        require_finite();
    }

    static ComplexMatrix identity(std::size_t n) {
        ComplexMatrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    static ComplexMatrix diagonal(std::span<const cplx> d) {
        ComplexMatrix m(d.size(), d.size());
        for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
        return m;
    }

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    bool square() const noexcept { return rows_ == cols_; }

    cplx& operator()(std::size_t i, std::size_t j) noexcept { return data_[i * cols_ + j]; }
    const cplx& operator()(std::size_t i, std::size_t j) const noexcept { return data_[i * cols_ + j]; }

    std::span<const cplx> entries() const noexcept { return data_; }

    bool all_finite() const noexcept {
        return std::all_of(data_.begin(), data_.end(),
                           [](cplx z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); });
    }

    void require_finite() const {
        if (!all_finite()) throw InputError("matrix has non-finite entries");
    }

    friend bool operator==(const ComplexMatrix&, const ComplexMatrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<cplx> data_;
};

inline ComplexMatrix matmul(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.cols() != b.rows())
        throw InputError("matmul: inner dimensions differ (" + std::to_string(a.cols()) + " vs " +
                         std::to_string(b.rows()) + ")");
    ComplexMatrix c(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const cplx aik = a(i, k);
            for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
        }
    return c;
}

inline ComplexMatrix adjoint(const ComplexMatrix& m) {
    ComplexMatrix t(m.cols(), m.rows());
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) t(j, i) = std::conj(m(i, j));
    return t;
}

inline ComplexMatrix scaled(const ComplexMatrix& m, cplx factor) {
    ComplexMatrix s(m.rows(), m.cols());
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) s(i, j) = factor * m(i, j);
    return s;
}

inline cplx trace(const ComplexMatrix& m) {
    if (!m.square()) throw InputError("trace of non-square matrix");
    cplx t = 0.0;
    for (std::size_t i = 0; i < m.rows(); ++i) t += m(i, i);
    return t;
}

/// tr(a*b) without forming the product.
inline cplx trace_of_product(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.cols() != b.rows() || a.rows() != b.cols()) throw InputError("trace_of_product: shapes do not close");
    cplx t = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t k = 0; k < a.cols(); ++k) t += a(i, k) * b(k, i);
    return t;
}

inline double frobenius_norm(const ComplexMatrix& m) {
    double s = 0.0;
    for (cplx z : m.entries()) s += std::norm(z);
    return std::sqrt(s);
}

/// Determinant of a row-major n*n buffer by LU with partial pivoting. The buffer is consumed.
/// Backward error is O(n * eps * growth) in the usual Wilkinson sense.
template <typename T>
std::complex<T> lu_determinant(std::vector<std::complex<T>> a, std::size_t n) {
    std::complex<T> det = T(1);
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t piv = k;
        T best = std::abs(a[k * n + k]);
        for (std::size_t i = k + 1; i < n; ++i) {
            T v = std::abs(a[i * n + k]);
            if (v > best) {
                best = v;
                piv = i;
            }
        }
        if (best == T(0)) return T(0);
        if (piv != k) {
            for (std::size_t j = 0; j < n; ++j) std::swap(a[k * n + j], a[piv * n + j]);
            det = -det;
        }
        const std::complex<T> pivot = a[k * n + k];
        det *= pivot;
        for (std::size_t i = k + 1; i < n; ++i) {
            const std::complex<T> f = a[i * n + k] / pivot;
            if (f == std::complex<T>(0)) continue;
            for (std::size_t j = k + 1; j < n; ++j) a[i * n + j] -= f * a[k * n + j];
        }
    }
    return det;
}

inline cplx determinant(const ComplexMatrix& m) {
    if (!m.square()) throw InputError("determinant of non-square matrix");
    m.require_finite();
    const auto e = m.entries();
    return lu_determinant<double>(std::vector<cplx>(e.begin(), e.end()), m.rows());
}

/// z^n for small non-negative integer n by repeated multiplication (no branch cut).
template <typename T>
std::complex<T> int_power(std::complex<T> z, int n) {
    std::complex<T> r = T(1);
    for (int i = 0; i < n; ++i) r *= z;
    return r;
}

/// prod_{i<j} (x_i - x_j).
template <typename T>
std::complex<T> vandermonde(std::span<const std::complex<T>> x) {
    std::complex<T> v = T(1);
    for (std::size_t i = 0; i < x.size(); ++i)
        for (std::size_t j = i + 1; j < x.size(); ++j) v *= x[i] - x[j];
    return v;
}

inline cplx vandermonde(std::span<const cplx> x) { return vandermonde<double>(x); }

/// Eigenvalues of a square matrix as an unordered multiset.
struct Spectrum {
    std::vector<cplx> values;
    std::size_t source_dim = 0;
    /// Smallest pairwise distance; +inf when there are fewer than two values.
    double min_gap = std::numeric_limits<double>::infinity();

    static Spectrum from_values(std::vector<cplx> v) {
        Spectrum s;
        s.source_dim = v.size();
        s.values = std::move(v);
        s.min_gap = pairwise_min_gap(s.values);
        return s;
    }

    std::size_t size() const noexcept { return values.size(); }

    double max_abs() const noexcept {
        double m = 0.0;
        for (cplx z : values) m = std::max(m, std::abs(z));
        return m;
    }

    static double pairwise_min_gap(std::span<const cplx> v) {
        double g = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < v.size(); ++i)
            for (std::size_t j = i + 1; j < v.size(); ++j) g = std::min(g, std::abs(v[i] - v[j]));
        return g;
    }
};

namespace detail {

// Householder reduction to upper Hessenberg form, in place.
inline void hessenberg_reduce(std::vector<cplx>& h, std::size_t n) {
    for (std::size_t k = 0; k + 2 < n; ++k) {
        double xnorm2 = 0.0;
        for (std::size_t i = k + 1; i < n; ++i) xnorm2 += std::norm(h[i * n + k]);
        const double xnorm = std::sqrt(xnorm2);
        const cplx x0 = h[(k + 1) * n + k];
        double tail = xnorm2 - std::norm(x0);
        if (xnorm == 0.0 || tail <= 0.0) continue;

        const cplx phase = std::abs(x0) == 0.0 ? cplx(1.0) : x0 / std::abs(x0);
        const cplx alpha = -phase * xnorm;
        std::vector<cplx> v(n - k - 1);
        for (std::size_t i = k + 1; i < n; ++i) v[i - k - 1] = h[i * n + k];
        v[0] -= alpha;
        double vnorm2 = 0.0;
        for (cplx z : v) vnorm2 += std::norm(z);
        if (vnorm2 == 0.0) continue;

        // H <- P H P with P = I - 2 v v^H / (v^H v), acting on indices k+1..n-1.
        for (std::size_t j = 0; j < n; ++j) {
            cplx s = 0.0;
            for (std::size_t i = k + 1; i < n; ++i) s += std::conj(v[i - k - 1]) * h[i * n + j];
            s *= 2.0 / vnorm2;
            for (std::size_t i = k + 1; i < n; ++i) h[i * n + j] -= v[i - k - 1] * s;
        }
        for (std::size_t i = 0; i < n; ++i) {
            cplx s = 0.0;
            for (std::size_t j = k + 1; j < n; ++j) s += h[i * n + j] * v[j - k - 1];
            s *= 2.0 / vnorm2;
            for (std::size_t j = k + 1; j < n; ++j) h[i * n + j] -= s * std::conj(v[j - k - 1]);
        }
        for (std::size_t i = k + 2; i < n; ++i) h[i * n + k] = 0.0;
    }
}

inline std::pair<cplx, cplx> eig2x2(cplx a, cplx b, cplx c, cplx d) {
    const cplx m = 0.5 * (a + d);
    const cplx disc = std::sqrt(0.25 * (a - d) * (a - d) + b * c);
    cplx big = m + disc;
    cplx other = m - disc;
    if (std::abs(other) > std::abs(big)) std::swap(big, other);
    if (big != 0.0) other = (a * d - b * c) / big;
    return {big, other};
}

} // namespace detail

/// All eigenvalues of a general complex matrix: Householder reduction to Hessenberg form, then
/// single-shift QR with Wilkinson shifts and deflation. A subdiagonal entry is treated as zero
/// once it falls below eps*||H||_F (or eps times its diagonal neighbours). Throws
/// NumericalFailure after 100*N QR sweeps.
inline Spectrum eigenvalues(const ComplexMatrix& m) {
    if (!m.square()) throw InputError("eigenvalues of non-square matrix");
    m.require_finite();
    const std::size_t n = m.rows();
    const auto e = m.entries();
    std::vector<cplx> h(e.begin(), e.end());
    detail::hessenberg_reduce(h, n);

    const double eps = std::numeric_limits<double>::epsilon();
    double hnorm = 0.0;
    for (cplx z : h) hnorm += std::norm(z);
    hnorm = std::sqrt(hnorm);
    auto H = [&](std::size_t i, std::size_t j) -> cplx& { return h[i * n + j]; };

    std::vector<cplx> eig(n);
    const std::size_t max_sweeps = 100 * n;
    std::size_t sweeps = 0;
    std::size_t since_deflation = 0;
    std::ptrdiff_t hi = static_cast<std::ptrdiff_t>(n) - 1;

    while (hi >= 0) {
        if (hi == 0) {
            eig[0] = H(0, 0);
            break;
        }
        std::ptrdiff_t lo = hi;
        while (lo > 0) {
            const double sub = std::abs(H(lo, lo - 1));
            const double local = std::abs(H(lo, lo)) + std::abs(H(lo - 1, lo - 1));
            if (sub <= eps * hnorm || sub <= eps * local) {
                H(lo, lo - 1) = 0.0;
                break;
            }
            --lo;
        }
        if (lo == hi) {
            eig[hi] = H(hi, hi);
            --hi;
            since_deflation = 0;
            continue;
        }
        if (lo == hi - 1) {
            auto [l1, l2] = detail::eig2x2(H(hi - 1, hi - 1), H(hi - 1, hi), H(hi, hi - 1), H(hi, hi));
            eig[hi - 1] = l1;
            eig[hi] = l2;
            hi -= 2;
            since_deflation = 0;
            continue;
        }
        if (++sweeps > max_sweeps)
            throw NumericalFailure("eigenvalues: QR iteration did not converge in " + std::to_string(max_sweeps) +
                                   " sweeps");
        ++since_deflation;

        cplx shift;
        if (since_deflation % 10 == 0) {
            // exceptional shift to break cycles
            shift = H(hi, hi) + cplx(0.75 * std::abs(H(hi, hi - 1)), 0.25 * std::abs(H(hi - 1, hi - 2)));
        } else {
            auto [l1, l2] = detail::eig2x2(H(hi - 1, hi - 1), H(hi - 1, hi), H(hi, hi - 1), H(hi, hi));
            shift = std::abs(l1 - H(hi, hi)) < std::abs(l2 - H(hi, hi)) ? l1 : l2;
        }

        const auto ulo = static_cast<std::size_t>(lo);
        const auto uhi = static_cast<std::size_t>(hi);
        for (std::size_t i = ulo; i <= uhi; ++i) H(i, i) -= shift;

        struct Rot {
            cplx g00, g01, g10, g11;
        };
        std::vector<Rot> rots(uhi - ulo);
        for (std::size_t k = ulo; k < uhi; ++k) {
            const cplx x = H(k, k);
            const cplx y = H(k + 1, k);
            const double r = std::hypot(std::abs(x), std::abs(y));
            Rot g{1.0, 0.0, 0.0, 1.0};
            if (r != 0.0) g = {std::conj(x) / r, std::conj(y) / r, -y / r, x / r};
            rots[k - ulo] = g;
            for (std::size_t j = k; j <= uhi; ++j) {
                const cplx p = H(k, j);
                const cplx q = H(k + 1, j);
                H(k, j) = g.g00 * p + g.g01 * q;
                H(k + 1, j) = g.g10 * p + g.g11 * q;
            }
            H(k + 1, k) = 0.0;
        }
        for (std::size_t k = ulo; k < uhi; ++k) {
            const Rot& g = rots[k - ulo];
            const std::size_t last = std::min(k + 1, uhi);
            for (std::size_t i = ulo; i <= last; ++i) {
                const cplx p = H(i, k);
                const cplx q = H(i, k + 1);
                H(i, k) = p * std::conj(g.g00) + q * std::conj(g.g01);
                H(i, k + 1) = p * std::conj(g.g10) + q * std::conj(g.g11);
            }
        }
        for (std::size_t i = ulo; i <= uhi; ++i) H(i, i) += shift;
    }
    return Spectrum::from_values(std::move(eig));
}

} // namespace ugi
