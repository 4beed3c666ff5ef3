#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "ugi/oracles.hpp"
#include "ugi/special_functions.hpp"

namespace {

using ugi::cplx;

/// Miller's backward recurrence I_{n-1} = (2n/z) I_n + I_{n+1} from a high order, normalized with
/// e^z = I_0 + 2 sum_{k>=1} I_k. Independent of the power series.
std::vector<cplx> bessel_backward(cplx z, int max_order) {
    const int start = max_order + 60;
    std::vector<cplx> v(static_cast<std::size_t>(start) + 2, 0.0);
    v[static_cast<std::size_t>(start)] = 1e-30;
    for (int n = start; n >= 1; --n)
        v[static_cast<std::size_t>(n) - 1] =
            (2.0 * n / z) * v[static_cast<std::size_t>(n)] + v[static_cast<std::size_t>(n) + 1];
    cplx norm = v[0];
    for (int k = 1; k <= start; ++k) norm += 2.0 * v[static_cast<std::size_t>(k)];
    const cplx scale = std::exp(z) / norm;
    std::vector<cplx> out(static_cast<std::size_t>(max_order) + 1);
    for (int n = 0; n <= max_order; ++n) out[static_cast<std::size_t>(n)] = v[static_cast<std::size_t>(n)] * scale;
    return out;
}

double rel(cplx a, cplx b) { return std::abs(a - b) / std::abs(b); }

TEST(BesselI, ValuesAtZero) {
    EXPECT_EQ(ugi::bessel_i(0, 0.0), cplx(1.0));
    EXPECT_EQ(ugi::bessel_i(3, 0.0), cplx(0.0));
}

TEST(BesselI, AgreesWithBackwardRecurrence) {
    const auto ref = bessel_backward(1.0, 6);
    EXPECT_LT(rel(ugi::bessel_i(0, 1.0), ref[0]), 1e-12);
    for (cplx z : {cplx(0.3, 0.2), cplx(-2.0, 1.5), cplx(4.0, -3.0), cplx(0.0, 2.0)}) {
        const auto r = bessel_backward(z, 8);
        for (int n = 0; n <= 8; ++n) EXPECT_LT(rel(ugi::bessel_i(n, z), r[static_cast<std::size_t>(n)]), 1e-12);
    }
}

TEST(BesselI, Parity) {
    ugi::Rng rng(1);
    for (int n = 0; n <= 12; ++n)
        for (int t = 0; t < 5; ++t) {
            const cplx z = rng.uniform_disk(10.0);
            const cplx lhs = ugi::bessel_i(n, -z);
            const cplx rhs = (n % 2 ? -1.0 : 1.0) * ugi::bessel_i(n, z);
            EXPECT_LE(std::abs(lhs - rhs), 1e-13 * std::abs(rhs));
        }
}

TEST(BesselI, ThreeTermRecurrenceResidual) {
    ugi::Rng rng(2);
    for (int t = 0; t < 20; ++t) {
        const cplx z = rng.uniform_disk(5.0);
        for (int n = 1; n <= 10; ++n) {
            const cplx lo = ugi::bessel_i(n - 1, z);
            const cplx residual = lo - ugi::bessel_i(n + 1, z) - (2.0 * n / z) * ugi::bessel_i(n, z);
            EXPECT_LT(std::abs(residual), 1e-12 * std::abs(lo)) << "z=" << z << " n=" << n;
        }
    }
}

TEST(BesselI, RejectsOutOfDomain) {
    EXPECT_THROW(ugi::bessel_i(-1, 1.0), ugi::InputError);
    EXPECT_THROW(ugi::bessel_i(0, 51.0), ugi::NumericalFailure);
}

TEST(KernelG, ValuesAtZero) {
    EXPECT_EQ(ugi::kernel_g(1, 0, 0.0), cplx(1.0));
    for (int j = 2; j <= 5; ++j)
        for (int nu = 0; nu <= 3; ++nu) EXPECT_EQ(ugi::kernel_g(j, nu, 0.0), cplx(0.0));
}

TEST(KernelG, BesselIdentity) {
    ugi::Rng rng(3);
    for (int t = 0; t < 30; ++t) {
        const cplx mu = rng.uniform_disk(6.0);
        const cplx lambda = mu * mu;
        for (int j = 1; j <= 4; ++j)
            for (int nu = 0; nu <= 3; ++nu) {
                const cplx lhs = std::pow(mu, j - 1) * ugi::bessel_i(nu + j - 1, mu);
                const cplx rhs = std::pow(mu, nu) * ugi::kernel_g(j, nu, lambda);
                EXPECT_LT(rel(lhs, rhs), 1e-12) << "mu=" << mu << " j=" << j << " nu=" << nu;
            }
    }
}

TEST(KernelH, ValuesAtZero) {
    EXPECT_EQ(ugi::kernel_h(0, 0.0), cplx(1.0));
    EXPECT_EQ(ugi::kernel_h(2, 0.0), cplx(0.125));
}

TEST(KernelH, BesselIdentity) {
    ugi::Rng rng(4);
    for (int t = 0; t < 30; ++t) {
        const cplx x = rng.uniform_disk(2.5);
        const cplx y = rng.uniform_disk(2.5);
        for (int nu = 0; nu <= 4; ++nu) {
            const cplx lhs = ugi::bessel_i(nu, x * y);
            const cplx rhs = std::pow(x * y, nu) * ugi::kernel_h(nu, x * x * y * y);
            EXPECT_LT(rel(lhs, rhs), 1e-12);
        }
    }
}

TEST(Kernels, ConjugateSymmetry) {
    ugi::Rng rng(5);
    for (int t = 0; t < 20; ++t) {
        const cplx w = rng.uniform_disk(20.0);
        for (int nu = 0; nu <= 3; ++nu) {
            const cplx h = ugi::kernel_h(nu, w);
            EXPECT_LE(std::abs(ugi::kernel_h(nu, std::conj(w)) - std::conj(h)), 1e-14 * std::abs(h));
            const cplx g = ugi::kernel_g(2, nu, w);
            EXPECT_LE(std::abs(ugi::kernel_g(2, nu, std::conj(w)) - std::conj(g)), 1e-14 * std::abs(g));
        }
    }
}

TEST(Kernels, CoefficientsDecayFactorially) {
    for (const auto& kern : {ugi::make_kernel_g(1, 0), ugi::make_kernel_g(3, 2), ugi::make_kernel_h(1),
                             ugi::make_kernel_exp()}) {
        const int k0 = kern.min_power;
        double prev_ratio = std::numeric_limits<double>::infinity();
        for (int k = k0 + 5; k < k0 + 60; k += 5) {
            const double ratio = static_cast<double>(kern.coefficient(k + 1) / kern.coefficient(k));
            EXPECT_LT(ratio, prev_ratio) << kern.label;
            prev_ratio = ratio;
        }
        EXPECT_LT(prev_ratio, 0.02) << kern.label;
    }
}

TEST(Kernels, TruncationStopsOnNegligibleTerms) {
    const auto kern = ugi::make_kernel_h(0);
    int used = 0;
    kern.evaluate(0.5L, &used);
    EXPECT_GT(used, 3);
    EXPECT_LT(used, 30);
    // the first omitted term is below 1e-17 of the sum
    const long double next = kern.coefficient(used) * std::pow(0.5L, used);
    EXPECT_LT(next, 1e-17L * std::abs(kern.evaluate(0.5L)));
}

TEST(Kernels, DomainViolationIsNumericalFailure) {
    EXPECT_THROW(ugi::kernel_h(0, 1e4), ugi::NumericalFailure);
    EXPECT_NO_THROW(ugi::kernel_h(0, 2000.0));
}

TEST(Factorial, ExactValues) {
    EXPECT_EQ(ugi::factorial_exact(0), 1);
    EXPECT_EQ(ugi::factorial_exact(5), 120);
    unsigned __int128 f = 1;
    for (unsigned i = 2; i <= 25; ++i) f *= i;
    ugi::BigInt expected = static_cast<unsigned long long>(f >> 64);
    expected <<= 64;
    expected += static_cast<unsigned long long>(f);
    EXPECT_EQ(ugi::factorial_exact(25), expected);
    EXPECT_EQ(ugi::factorial_exact(25).str(), "15511210043330985984000000");
}

TEST(Factorial, ReciprocalTable) {
    EXPECT_EQ(ugi::reciprocal_factorial(-1), 0.0L);
    EXPECT_EQ(ugi::reciprocal_factorial(0), 1.0L);
    EXPECT_NEAR(static_cast<double>(ugi::reciprocal_factorial(10) * 3628800.0L), 1.0, 1e-18);
    EXPECT_GT(ugi::reciprocal_factorial(900), 0.0L);
}

} // namespace
