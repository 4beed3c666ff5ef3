#pragma once

#include <algorithm>
#include <cstddef>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "ugi/det_ratio.hpp"
#include "ugi/errors.hpp"
#include "ugi/linalg.hpp"
#include "ugi/special_functions.hpp"

namespace ugi {

using ExactRational = boost::multiprecision::cpp_rational;

/// Highest weight n_1 >= ... >= n_N >= 0 of a polynomial Gl(N) irrep, trailing zeros included.
class Partition {
public:
    Partition(std::vector<int> parts) : parts_(std::move(parts)) {
        if (parts_.empty()) throw InputError("partition needs at least one slot");
        for (std::size_t i = 0; i < parts_.size(); ++i) {
            if (parts_[i] < 0) throw InputError("partition parts must be non-negative");
            if (i > 0 && parts_[i] > parts_[i - 1]) throw InputError("partition parts must be non-increasing");
        }
    }

    static Partition trivial(std::size_t rank) { return Partition(std::vector<int>(rank, 0)); }

    std::size_t ambient_rank() const noexcept { return parts_.size(); }
    const std::vector<int>& parts() const noexcept { return parts_; }
    int part(std::size_t i) const { return parts_.at(i); }

    int weight() const noexcept {
        int w = 0;
        for (int p : parts_) w += p;
        return w;
    }

    /// k_i = N + n_i - i with 1-based i; strictly decreasing, k_N = n_N.
    int k(std::size_t i) const { return static_cast<int>(parts_.size()) + parts_.at(i) - static_cast<int>(i) - 1; }

    /// Subtracts nu from every part (det^-nu). Requires n_N >= nu.
    Partition shifted_down(int nu) const {
        std::vector<int> p = parts_;
        for (int& x : p) x -= nu;
        return Partition(std::move(p));
    }

    friend bool operator==(const Partition&, const Partition&) = default;

    std::string to_string() const {
        std::string s = "(";
        for (std::size_t i = 0; i < parts_.size(); ++i) s += (i ? "," : "") + std::to_string(parts_[i]);
        return s + ")";
    }

private:
    std::vector<int> parts_;
};

/// All partitions with at most `rank` parts and weight <= max_weight, ordered by weight and then
/// lexicographically descending within a weight.
inline std::vector<Partition> enumerate_partitions(std::size_t rank, int max_weight) {
    if (rank < 1) throw InputError("enumerate_partitions: rank must be >= 1");
    if (max_weight < 0) throw InputError("enumerate_partitions: max_weight must be >= 0");
    std::vector<Partition> out;
    std::vector<int> cur(rank, 0);
    std::function<void(std::size_t, int, int)> fill = [&](std::size_t slot, int remaining, int cap) {
        if (remaining == 0) {
            std::fill(cur.begin() + static_cast<std::ptrdiff_t>(slot), cur.end(), 0);
            out.emplace_back(cur);
            return;
        }
        if (slot == rank) return;
        for (int p = std::min(remaining, cap); p >= 1; --p) {
            cur[slot] = p;
            fill(slot + 1, remaining - p, p);
        }
    };
    for (int w = 0; w <= max_weight; ++w) fill(0, w, w);
    return out;
}

namespace detail {

inline ExactRational reciprocal_factorial_exact(int m) {
    if (m < 0) return 0;
    return ExactRational(BigInt(1), factorial_exact(static_cast<unsigned>(m)));
}

inline ExactRational rational_determinant(std::vector<ExactRational> a, std::size_t n) {
    ExactRational det = 1;
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t piv = k;
        while (piv < n && a[piv * n + k] == 0) ++piv;
        if (piv == n) return 0;
        if (piv != k) {
            for (std::size_t j = 0; j < n; ++j) std::swap(a[k * n + j], a[piv * n + j]);
            det = -det;
        }
        det *= a[k * n + k];
        for (std::size_t i = k + 1; i < n; ++i) {
            if (a[i * n + k] == 0) continue;
            const ExactRational f = a[i * n + k] / a[k * n + k];
            for (std::size_t j = k; j < n; ++j) a[i * n + j] -= f * a[k * n + j];
        }
    }
    return det;
}

} // namespace detail

/// Character-expansion coefficient of det^nu(X) e^{tr X}: det[1/(n_j - nu + i - j)!], 1/m! = 0 for m < 0.
inline ExactRational alpha(const Partition& r, int nu) {
    const std::size_t n = r.ambient_rank();
    std::vector<ExactRational> a(n * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            a[i * n + j] = detail::reciprocal_factorial_exact(r.part(j) - nu + static_cast<int>(i) - static_cast<int>(j));
    return detail::rational_determinant(std::move(a), n);
}

/// d_r = prod_{i<j} (k_i - k_j) / prod_i (N-i)!.
inline BigInt dimension(const Partition& r) {
    const std::size_t n = r.ambient_rank();
    BigInt num = 1;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) num *= r.k(i) - r.k(j);
    BigInt den = 1;
    for (std::size_t i = 1; i < n; ++i) den *= factorial_exact(static_cast<unsigned>(i));
    BigInt q, rem;
    boost::multiprecision::divide_qr(num, den, q, rem);
    if (rem != 0) throw std::logic_error("dimension: inexact division for " + r.to_string());
    return q;
}

/// alpha_r^(nu) / d_r = prod_i (N-i)! / (k_i - nu)!, zero when any k_i < nu.
inline ExactRational alpha_over_dim(const Partition& r, int nu) {
    const std::size_t n = r.ambient_rank();
    BigInt num = 1, den = 1;
    for (std::size_t i = 0; i < n; ++i) {
        const int m = r.k(i) - nu;
        if (m < 0) return 0;
        num *= factorial_exact(static_cast<unsigned>(n - 1 - i));
        den *= factorial_exact(static_cast<unsigned>(m));
    }
    return ExactRational(num, den);
}

inline long double to_long_double(const ExactRational& q) { return q.convert_to<long double>(); }

/// Kernels whose determinant ratio is the Schur function s_r: column j carries lambda^(k_{N-j}).
inline std::vector<SeriesKernel> character_kernels(const Partition& r) {
    const std::size_t n = r.ambient_rank();
    std::vector<SeriesKernel> kernels(n);
    for (std::size_t j = 0; j < n; ++j) {
        const int p = r.k(n - 1 - j);
        kernels[j].min_power = p;
        kernels[j].label = "x^" + std::to_string(p);
        kernels[j].domain = std::numeric_limits<double>::infinity();
        kernels[j].real_coefficient = [p](int k) { return k == p ? 1.0L : 0.0L; };
    }
    return kernels;
}

/// Characters of many irreps at one spectrum. Power (or complete-homogeneous) tables are built once;
/// each character is then a single N x N determinant. Same direct/confluent switch as
/// confluent_det_ratio, so character(r, s) equals the ratio of character_kernels(r).
class CharacterTable {
public:
    explicit CharacterTable(Spectrum s) : spectrum_(std::move(s)), confluent_(is_clustered(spectrum_)) {
        if (!confluent_) inv_vandermonde_ = 1.0L / detail::standard_vandermonde(spectrum_.values);
    }

    const Spectrum& spectrum() const noexcept { return spectrum_; }
    bool confluent() const noexcept { return confluent_; }

    cplx operator()(const Partition& r) {
        const std::size_t n = spectrum_.size();
        if (r.ambient_rank() != n) throw InputError("character: spectrum size differs from partition rank");
        if (r.weight() == 0) return 1.0; // exact, rather than a ratio that rounds to 1
        ensure(r.k(0));
        std::vector<lcplx> m(n * n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                const int p = r.k(n - 1 - j);
                const int idx = confluent_ ? p - static_cast<int>(i) : p;
                m[i * n + j] = idx < 0 ? lcplx(0.0L) : table_[i][static_cast<std::size_t>(idx)];
            }
        lcplx det = lu_determinant<long double>(std::move(m), n);
        if (!confluent_) det *= inv_vandermonde_;
        return detail::to_d(det);
    }

private:
    void ensure(int max_power) {
        if (max_power <= built_) return;
        const int target = std::max(max_power, 2 * built_ + 8);
        table_ = confluent_ ? detail::homogeneous_table(spectrum_.values, target)
                            : detail::power_table(spectrum_.values, target);
        built_ = target;
    }

    Spectrum spectrum_;
    bool confluent_;
    lcplx inv_vandermonde_ = 1.0L;
    std::vector<std::vector<lcplx>> table_;
    int built_ = -1;
};

/// Weyl character chi_r at the eigenvalues s, finite and continuous through coincident eigenvalues.
inline cplx character(const Partition& r, const Spectrum& s) {
    if (s.size() != r.ambient_rank()) throw InputError("character: spectrum size differs from partition rank");
    return CharacterTable(s)(r);
}

} // namespace ugi
