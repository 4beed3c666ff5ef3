#pragma once

// Closed forms of unitary-group integrals over general complex matrices.
//
// Every result is written as  prefactor * (integer power of determinants) * det[F] / Vandermondes
// with entire kernels of the squared eigenvalues, so no square root or fractional power is taken
// and the value is single-valued:
//
//   I1 = int dU det^nu U exp(tr(A U + B U^+)/2)
//      = 2^(N(N-1)/2) prod_{n<N} n!  (det B)^nu  det[G_j(lambda_i)] / V(lambda),   lambda = eig(AB)
//   I2 = int dU dV det^nu(UV) exp(tr(U A V B + C V^+ D U^+)/2)
//      = 2^(N(N-1)) (prod_{n<N} n!)^2  (det C det D)^nu  det[H_nu(lambda_i kappa_j)] / (V(lambda) V(kappa)),
//        lambda = eig(AD), kappa = eig(BC)
//   I3 = int dU exp(tr(A U B U^+)) = prod_{n<N} n!  det[exp(x_i y_j)] / (V(x) V(y)),  x = eig(A), y = eig(B)
//
// The factor 1/2 in the exponents is carried by the kernel constants (G_j and H_nu are the
// Bessel functions at the unscaled eigenvalues), so spectra are taken of the matrices as given.

#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "ugi/characters.hpp"
#include "ugi/det_ratio.hpp"
#include "ugi/errors.hpp"
#include "ugi/linalg.hpp"
#include "ugi/special_functions.hpp"

namespace ugi {

struct IntegralResult {
    cplx value;
    std::vector<Spectrum> spectra_used;
    bool confluent_path = false;
    double min_gap_seen = std::numeric_limits<double>::infinity();
    int kernel_truncation = 0;
    /// Set for the rectangular two-group formula, which is conjectural.
    bool conjecture = false;
};

namespace detail {

inline void require_square(const ComplexMatrix& m, std::size_t n, const char* what) {
    if (m.rows() != n || m.cols() != n)
        throw InputError(std::string(what) + " must be " + std::to_string(n) + "x" + std::to_string(n) + ", got " +
                         std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
    m.require_finite();
}

inline void require_shape(const ComplexMatrix& m, std::size_t rows, std::size_t cols, const char* what) {
    if (m.rows() != rows || m.cols() != cols)
        throw InputError(std::string(what) + " must be " + std::to_string(rows) + "x" + std::to_string(cols) +
                         ", got " + std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
    m.require_finite();
}

/// prod_{n=lo}^{hi} n! as a double (empty product = 1).
inline double factorial_product(int lo, int hi) {
    BigInt p = 1;
    for (int n = std::max(lo, 0); n <= hi; ++n) p *= factorial_exact(static_cast<unsigned>(n));
    return p.convert_to<double>();
}

inline void record_spectrum(IntegralResult& r, const Spectrum& s) {
    r.min_gap_seen = std::min(r.min_gap_seen, s.min_gap);
    r.spectra_used.push_back(s);
}

inline IntegralResult bilinear_result(const std::function<long double(int)>& coeff, const Spectrum& lambda,
                                      const Spectrum& kappa, double domain, const std::string& label,
                                      cplx prefactor) {
    IntegralResult r;
    record_spectrum(r, lambda);
    record_spectrum(r, kappa);
    const auto ratio = bilinear_det_ratio(coeff, lambda, kappa, domain, label);
    r.value = prefactor * ratio.value;
    r.confluent_path = ratio.rows_confluent || ratio.cols_confluent;
    r.kernel_truncation = ratio.truncation;
    return r;
}

} // namespace detail

/// 2^(N(N-1)/2) prod_{n=1}^{N-1} n!
inline double i1_prefactor(int n) { return std::ldexp(detail::factorial_product(1, n - 1), n * (n - 1) / 2); }

/// 2^(N(N-1)) (prod_{n=1}^{N-1} n!)^2
inline double i2_prefactor(int n) {
    const double fp = detail::factorial_product(1, n - 1);
    return std::ldexp(fp * fp, n * (n - 1));
}

/// 2^(M(N-1)) prod_{n=N-M}^{N-1} n! prod_{m=N-M}^{M-1} m!; equals i2_prefactor(N) at M = N.
inline double i2_rect_prefactor(int n, int m) {
    return std::ldexp(detail::factorial_product(n - m, n - 1) * detail::factorial_product(n - m, m - 1), m * (n - 1));
}

/// I1 from lambda = eig(AB) and det B.
inline IntegralResult i1_from_spectrum(const Spectrum& lambda, cplx det_b, int nu,
                                       ConfluencePolicy policy = ConfluencePolicy::automatic) {
    if (nu < 0) throw InputError("eval_i1: nu must be non-negative");
    const std::size_t n = lambda.size();
    IntegralResult r;
    detail::record_spectrum(r, lambda);
    std::vector<SeriesKernel> kernels;
    kernels.reserve(n);
    for (std::size_t j = 1; j <= n; ++j) kernels.push_back(make_kernel_g(static_cast<int>(j), nu));
    const DetRatio ratio = confluent_det_ratio(kernels, lambda, policy);
    r.value = i1_prefactor(static_cast<int>(n)) * int_power(det_b, nu) * ratio.value;
    r.confluent_path = ratio.confluent;
    r.kernel_truncation = ratio.truncation;
    return r;
}

/// int_{U(N)} dU det^nu U exp(tr(A U + B U^+) / 2).
inline IntegralResult eval_i1(const ComplexMatrix& a, const ComplexMatrix& b, int nu) {
    if (nu < 0) throw InputError("eval_i1: nu must be non-negative");
    const std::size_t n = a.rows();
    detail::require_square(a, n, "A");
    detail::require_square(b, n, "B");
    return i1_from_spectrum(eigenvalues(matmul(a, b)), determinant(b), nu);
}

/// int_{U(N)} dU int_{U(N)} dV det^nu(UV) exp(tr(U A V B + C V^+ D U^+) / 2).
inline IntegralResult eval_i2(const ComplexMatrix& a, const ComplexMatrix& b, const ComplexMatrix& c,
                              const ComplexMatrix& d, int nu) {
    if (nu < 0) throw InputError("eval_i2: nu must be non-negative");
    const std::size_t n = a.rows();
    detail::require_square(a, n, "A");
    detail::require_square(b, n, "B");
    detail::require_square(c, n, "C");
    detail::require_square(d, n, "D");

    const Spectrum lambda = eigenvalues(matmul(a, d));
    const Spectrum kappa = eigenvalues(matmul(b, c));
    const cplx prefactor = i2_prefactor(static_cast<int>(n)) * int_power(determinant(c) * determinant(d), nu);
    return detail::bilinear_result([nu](int k) { return kernel_h_coefficient(nu, k); }, lambda, kappa,
                                   kSeriesDomain * kSeriesDomain, "H_" + std::to_string(nu), prefactor);
}

/// Rectangular two-group integral, U in U(N), V in U(M), M < N, A and C are N x M, B and D are M x N:
///   int dU dV exp(tr(U A V B + C V^+ D U^+) / 2)
///   = 2^(M(N-1)) prod_{n=N-M}^{N-1} n! prod_{m=N-M}^{M-1} m!  det[H_{N-M}(lambda_i kappa_j)] / (V(lambda) V(kappa))
/// over the M x M spectra lambda = eig(DA), kappa = eig(BC). This formula is a conjecture; the
/// result is flagged accordingly.
inline IntegralResult eval_i2_rect(const ComplexMatrix& a, const ComplexMatrix& b, const ComplexMatrix& c,
                                   const ComplexMatrix& d) {
    const std::size_t n = a.rows();
    const std::size_t m = a.cols();
    if (m >= n) throw InputError("eval_i2_rect: need M < N (A is N x M), got N=" + std::to_string(n) +
                                 ", M=" + std::to_string(m));
    detail::require_shape(a, n, m, "A");
    detail::require_shape(b, m, n, "B");
    detail::require_shape(c, n, m, "C");
    detail::require_shape(d, m, n, "D");

    const Spectrum lambda = eigenvalues(matmul(d, a));
    const Spectrum kappa = eigenvalues(matmul(b, c));
    const int order = static_cast<int>(n - m);
    const double prefactor = i2_rect_prefactor(static_cast<int>(n), static_cast<int>(m));
    auto r = detail::bilinear_result([order](int k) { return kernel_h_coefficient(order, k); }, lambda, kappa,
                                     kSeriesDomain * kSeriesDomain, "H_" + std::to_string(order), prefactor);
    r.conjecture = true;
    return r;
}

/// int_{U(N)} dU exp(tr(A U B U^+)), no factor 1/2 in the exponent.
inline IntegralResult eval_i3(const ComplexMatrix& a, const ComplexMatrix& b) {
    const std::size_t n = a.rows();
    detail::require_square(a, n, "A");
    detail::require_square(b, n, "B");
    const Spectrum x = eigenvalues(a);
    const Spectrum y = eigenvalues(b);
    const double prefactor = detail::factorial_product(1, static_cast<int>(n) - 1);
    return detail::bilinear_result([](int k) { return reciprocal_factorial(k); }, x, y, kSeriesDomain, "exp",
                                   prefactor);
}

} // namespace ugi
