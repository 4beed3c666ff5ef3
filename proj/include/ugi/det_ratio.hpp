#pragma once

// Determinant ratios det[f_j(lambda_i)] / V(lambda) with V(lambda) = det[lambda_i^(j-1)], including
// the limits where eigenvalues coincide.
//
// Away from coincidences the ratio is formed directly. Once any pair of eigenvalues is closer than
// the clustering tolerance, every row is replaced by a Newton divided difference:
//
//   det[f_j(lambda_i)] / V(lambda) = det[ f_j[lambda_1, ..., lambda_i] ]
//
// and a divided difference of a power series is sum_k c_k h_{k-i+1}(lambda_1..lambda_i), with h_m
// the complete homogeneous symmetric polynomial. Both sides are exact at coincidence.
//
// V(lambda) = prod_{i<j} (lambda_j - lambda_i) differs from vandermonde() by (-1)^(N(N-1)/2).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "ugi/linalg.hpp"
#include "ugi/special_functions.hpp"

namespace ugi {

struct DetRatio {
    cplx value;
    bool confluent = false;
    /// Largest number of series terms summed for any entry.
    int truncation = 0;
};

/// Clustering tolerance for a spectrum: 1e-6 * (1 + max |lambda|).
inline double clustering_tolerance(const Spectrum& s) { return 1e-6 * (1.0 + s.max_abs()); }

inline bool is_clustered(const Spectrum& s) { return s.min_gap <= clustering_tolerance(s); }

namespace detail {

inline lcplx to_l(cplx z) { return {z.real(), z.imag()}; }
inline cplx to_d(lcplx z) { return {static_cast<double>(z.real()), static_cast<double>(z.imag())}; }

/// Row-major table T[i][m] = h_m(x_0..x_i) for m = 0..max_m.
inline std::vector<std::vector<lcplx>> homogeneous_table(std::span<const cplx> x, int max_m) {
    std::vector<std::vector<lcplx>> t(x.size(), std::vector<lcplx>(static_cast<std::size_t>(max_m) + 1));
    for (std::size_t i = 0; i < x.size(); ++i) {
        const lcplx xi = to_l(x[i]);
        auto& row = t[i];
        row[0] = 1.0L;
        for (int m = 1; m <= max_m; ++m) {
            const lcplx prev = i == 0 ? (m == 0 ? 1.0L : 0.0L) : t[i - 1][static_cast<std::size_t>(m)];
            row[static_cast<std::size_t>(m)] = prev + xi * row[static_cast<std::size_t>(m) - 1];
        }
    }
    return t;
}

/// Row-major table T[i][k] = x_i^k.
inline std::vector<std::vector<lcplx>> power_table(std::span<const cplx> x, int max_k) {
    std::vector<std::vector<lcplx>> t(x.size(), std::vector<lcplx>(static_cast<std::size_t>(max_k) + 1));
    for (std::size_t i = 0; i < x.size(); ++i) {
        t[i][0] = 1.0L;
        for (int k = 1; k <= max_k; ++k)
            t[i][static_cast<std::size_t>(k)] = t[i][static_cast<std::size_t>(k) - 1] * to_l(x[i]);
    }
    return t;
}

/// prod_{i<j} (x_j - x_i) in long double.
inline lcplx standard_vandermonde(std::span<const cplx> x) {
    lcplx v = 1.0L;
    for (std::size_t i = 0; i < x.size(); ++i)
        for (std::size_t j = i + 1; j < x.size(); ++j) v *= to_l(x[j]) - to_l(x[i]);
    return v;
}

} // namespace detail

/// Which evaluation path a determinant ratio takes.
enum class ConfluencePolicy {
    automatic,       ///< divided differences only when some gap is within the clustering tolerance
    always_direct,   ///< plain det / Vandermonde (undefined at coincident eigenvalues)
    always_confluent ///< divided differences regardless of gaps
};

namespace detail {

inline void check_kernels(std::span<const SeriesKernel> kernels, const Spectrum& s) {
    if (kernels.size() != s.size()) throw InputError("confluent_det_ratio: need one kernel per eigenvalue");
    if (s.size() == 0) throw InputError("confluent_det_ratio: empty spectrum");
    const double max_abs = s.max_abs();
    for (const auto& k : kernels) k.check_domain(max_abs);
}

inline DetRatio direct_det_ratio(std::span<const SeriesKernel> kernels, const Spectrum& s) {
    const std::size_t n = s.size();
    DetRatio out;
    std::vector<lcplx> m(n * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            int used = 0;
            m[i * n + j] = kernels[j].evaluate(to_l(s.values[i]), &used);
            out.truncation = std::max(out.truncation, used);
        }
    const lcplx det = lu_determinant<long double>(std::move(m), n);
    out.value = to_d(det / standard_vandermonde(s.values));
    return out;
}

inline DetRatio divided_difference_det(std::span<const SeriesKernel> kernels, const Spectrum& s) {
    const std::size_t n = s.size();
    DetRatio out;
    out.confluent = true;
    int max_power = 0;
    for (const auto& k : kernels) max_power = std::max(max_power, k.min_power);
    const int max_m = max_power + kMaxSeriesTerms;
    const auto h = homogeneous_table(s.values, max_m);
    std::vector<lcplx> m(n * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            const SeriesKernel& f = kernels[j];
            const int start = std::max(f.min_power, static_cast<int>(i));
            SeriesAccumulator acc;
            for (int k = start; k < start + kMaxSeriesTerms; ++k) {
                const int idx = k - static_cast<int>(i);
                if (idx > max_m) break;
                if (acc.add(f.coefficient(k) * h[i][static_cast<std::size_t>(idx)])) break;
            }
            m[i * n + j] = acc.sum();
            out.truncation = std::max(out.truncation, acc.terms());
        }
    out.value = to_d(lu_determinant<long double>(std::move(m), n));
    return out;
}

} // namespace detail

/// det[f_j(lambda_i)] / V(lambda), with f_j = kernels[j].
inline DetRatio confluent_det_ratio(std::span<const SeriesKernel> kernels, const Spectrum& s,
                                    ConfluencePolicy policy = ConfluencePolicy::automatic) {
    detail::check_kernels(kernels, s);
    const bool confluent = policy == ConfluencePolicy::always_confluent ||
                           (policy == ConfluencePolicy::automatic && is_clustered(s));
    return confluent ? detail::divided_difference_det(kernels, s) : detail::direct_det_ratio(kernels, s);
}

/// Result of a two-spectrum ratio; flags record which index needed the confluent treatment.
struct BilinearDetRatio {
    cplx value;
    bool rows_confluent = false;
    bool cols_confluent = false;
    int truncation = 0;
};

/// det[F(lambda_i * kappa_j)] / (V(lambda) V(kappa)) for F(w) = sum_k a_k w^k. Coincident values in
/// either spectrum are resolved by divided differences in that index (rows, then columns).
/// `domain` bounds max|lambda| * max|kappa|.
inline BilinearDetRatio bilinear_det_ratio(const std::function<long double(int)>& a, const Spectrum& lambda,
                                           const Spectrum& kappa, double domain, const std::string& label,
                                           ConfluencePolicy policy = ConfluencePolicy::automatic) {
    const std::size_t n = lambda.size();
    if (kappa.size() != n || n == 0) throw InputError("bilinear_det_ratio: spectra must have equal nonzero size");
    const double arg = lambda.max_abs() * kappa.max_abs();
    if (!(arg <= domain))
        throw NumericalFailure("kernel " + label + ": |argument| " + std::to_string(arg) + " exceeds series domain " +
                               std::to_string(domain));

    BilinearDetRatio out;
    auto pick = [policy](const Spectrum& sp) {
        return policy == ConfluencePolicy::always_confluent ||
               (policy == ConfluencePolicy::automatic && is_clustered(sp));
    };
    out.rows_confluent = pick(lambda);
    out.cols_confluent = pick(kappa);
    const int max_k = kMaxSeriesTerms + static_cast<int>(n);
    const auto p = out.rows_confluent ? detail::homogeneous_table(lambda.values, max_k)
                                      : detail::power_table(lambda.values, max_k);
    const auto q = out.cols_confluent ? detail::homogeneous_table(kappa.values, max_k)
                                      : detail::power_table(kappa.values, max_k);
    // In the confluent case row i holds h_{k-i}, which vanishes for k < i.
    auto factor = [](const std::vector<std::vector<lcplx>>& t, bool confluent, std::size_t i, int k) -> lcplx {
        const int idx = confluent ? k - static_cast<int>(i) : k;
        return idx < 0 ? lcplx(0.0L) : t[i][static_cast<std::size_t>(idx)];
    };

    std::vector<lcplx> m(n * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            const int start = std::max(out.rows_confluent ? static_cast<int>(i) : 0,
                                       out.cols_confluent ? static_cast<int>(j) : 0);
            SeriesAccumulator acc;
            for (int k = start; k < start + kMaxSeriesTerms && k <= max_k - static_cast<int>(n); ++k)
                if (acc.add(a(k) * factor(p, out.rows_confluent, i, k) * factor(q, out.cols_confluent, j, k))) break;
            m[i * n + j] = acc.sum();
            out.truncation = std::max(out.truncation, acc.terms());
        }
    lcplx value = lu_determinant<long double>(std::move(m), n);
    if (!out.rows_confluent) value /= detail::standard_vandermonde(lambda.values);
    if (!out.cols_confluent) value /= detail::standard_vandermonde(kappa.values);
    out.value = detail::to_d(value);
    return out;
}

} // namespace ugi
