#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "ugi/errors.hpp"
#include "ugi/linalg.hpp"

namespace ugi {

using BigInt = boost::multiprecision::cpp_int;
using lcplx = std::complex<long double>;

/// Largest |z| accepted by the power-series evaluators.
inline constexpr double kSeriesDomain = 50.0;
/// Hard cap on summed terms.
inline constexpr int kMaxSeriesTerms = 400;
/// A term counts as negligible below this fraction of the running sum.
inline constexpr long double kSeriesRelTol = 1e-17L;
/// Consecutive negligible terms required before stopping.
inline constexpr int kSeriesQuietTerms = 3;

inline BigInt factorial_exact(unsigned n) {
    BigInt f = 1;
    for (unsigned i = 2; i <= n; ++i) f *= i;
    return f;
}

namespace detail {

inline const std::vector<long double>& reciprocal_factorial_table() {
    // 2 * cap + headroom for orders; 1000! still fits in long double range.
    static const std::vector<long double> table = [] {
        constexpr unsigned size = 2 * kMaxSeriesTerms + 200;
        std::vector<long double> t(size);
        BigInt f = 1;
        for (unsigned n = 0; n < size; ++n) {
            if (n > 1) f *= n;
            t[n] = 1.0L / f.convert_to<long double>();
        }
        return t;
    }();
    return table;
}

} // namespace detail

/// 1/n! in long double, 0 for negative n. Values come from exact factorials converted once.
inline long double reciprocal_factorial(int n) {
    if (n < 0) return 0.0L;
    const auto& t = detail::reciprocal_factorial_table();
    if (static_cast<std::size_t>(n) >= t.size()) return 0.0L;
    return t[static_cast<std::size_t>(n)];
}

/// Stopping rule shared by every power series in the library.
class SeriesAccumulator {
public:
    /// Adds a term; returns true once the series may stop.
    bool add(lcplx term) {
        sum_ += term;
        ++terms_;
        if (std::abs(term) <= kSeriesRelTol * std::abs(sum_))
            ++quiet_;
        else
            quiet_ = 0;
        return quiet_ >= kSeriesQuietTerms;
    }
    lcplx sum() const noexcept { return sum_; }
    int terms() const noexcept { return terms_; }

private:
    lcplx sum_ = 0.0L;
    int terms_ = 0;
    int quiet_ = 0;
};

/// Entire function given by its Taylor coefficients c_k (k >= min_power) in a variable lambda.
struct SeriesKernel {
    std::function<long double(int)> real_coefficient; // c_k for real-coefficient kernels
    int min_power = 0;
    /// Largest |lambda| for which the series is trusted.
    double domain = kSeriesDomain;
    std::string label;

    long double coefficient(int k) const { return k < min_power ? 0.0L : real_coefficient(k); }

    void check_domain(double abs_arg) const {
        if (!(abs_arg <= domain))
            throw NumericalFailure("kernel " + label + ": |argument| " + std::to_string(abs_arg) +
                                   " exceeds series domain " + std::to_string(domain));
    }

    /// Value at lambda; truncation order reported through `terms_used` when non-null.
    lcplx evaluate(lcplx lambda, int* terms_used = nullptr) const {
        check_domain(static_cast<double>(std::abs(lambda)));
        SeriesAccumulator acc;
        lcplx power = 1.0L;
        for (int k = 0; k < min_power; ++k) power *= lambda;
        for (int k = min_power; k < min_power + kMaxSeriesTerms; ++k) {
            if (acc.add(coefficient(k) * power)) break;
            power *= lambda;
        }
        if (terms_used) *terms_used = acc.terms();
        return acc.sum();
    }
};

/// Modified Bessel function I_n(z) of non-negative integer order by its power series.
/// Accurate to ~1e-13 relative where the series does not cancel (|arg z| well away from pi/2);
/// |z| beyond the series domain is rejected.
inline cplx bessel_i(int order, cplx z) {
    if (order < 0) throw InputError("bessel_i: order must be non-negative (use I_n = I_-n)");
    if (!(std::abs(z) <= kSeriesDomain))
        throw NumericalFailure("bessel_i: |z| = " + std::to_string(std::abs(z)) + " outside series domain");
    const lcplx half = lcplx(z) / 2.0L;
    const lcplx w = half * half;
    SeriesAccumulator acc;
    lcplx wk = 1.0L;
    for (int k = 0; k < kMaxSeriesTerms; ++k) {
        if (acc.add(wk * reciprocal_factorial(k) * reciprocal_factorial(k + order))) break;
        wk *= w;
    }
    const lcplx value = acc.sum() * int_power(half, order);
    return {static_cast<double>(value.real()), static_cast<double>(value.imag())};
}

/// Column kernel of the single-group integral:
/// G_j(lambda) = 2^-(nu+j-1) lambda^(j-1) sum_k (lambda/4)^k / (k! (k+nu+j-1)!),
/// so that mu^(j-1) I_{nu+j-1}(mu) = mu^nu G_j(mu^2). Entire in lambda.
inline SeriesKernel make_kernel_g(int j, int nu) {
    if (j < 1 || nu < 0) throw InputError("kernel_G: need j >= 1 and nu >= 0");
    SeriesKernel kern;
    kern.min_power = j - 1;
    kern.domain = kSeriesDomain * kSeriesDomain;
    kern.label = "G_" + std::to_string(j) + "(nu=" + std::to_string(nu) + ")";
    kern.real_coefficient = [j, nu](int m) {
        const int k = m - (j - 1);
        return std::ldexp(reciprocal_factorial(k) * reciprocal_factorial(m + nu), -(nu + j - 1) - 2 * k);
    };
    return kern;
}

/// Diagonal coefficients a_k of H~_nu(w) = 2^-nu sum_k (w/4)^k / (k! (k+nu)!),
/// with I_nu(x y) = (x y)^nu H~_nu(x^2 y^2).
inline long double kernel_h_coefficient(int nu, int k) {
    return std::ldexp(reciprocal_factorial(k) * reciprocal_factorial(k + nu), -nu - 2 * k);
}

inline SeriesKernel make_kernel_h(int nu) {
    if (nu < 0) throw InputError("kernel_H: need nu >= 0");
    SeriesKernel kern;
    kern.domain = kSeriesDomain * kSeriesDomain;
    kern.label = "H_" + std::to_string(nu);
    kern.real_coefficient = [nu](int k) { return kernel_h_coefficient(nu, k); };
    return kern;
}

/// exp(z) as a series kernel (coefficients 1/k!).
inline SeriesKernel make_kernel_exp() {
    SeriesKernel kern;
    kern.label = "exp";
    kern.real_coefficient = [](int k) { return reciprocal_factorial(k); };
    return kern;
}

inline cplx kernel_g(int j, int nu, cplx lambda) {
    const lcplx v = make_kernel_g(j, nu).evaluate(lcplx(lambda));
    return {static_cast<double>(v.real()), static_cast<double>(v.imag())};
}

inline cplx kernel_h(int nu, cplx w) {
    const lcplx v = make_kernel_h(nu).evaluate(lcplx(w));
    return {static_cast<double>(v.real()), static_cast<double>(v.imag())};
}

} // namespace ugi
