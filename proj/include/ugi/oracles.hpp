#pragma once

// Independent ground truth for the closed forms: Monte Carlo over Haar-random unitaries and
// truncated character-expansion sums.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <functional>
#include <map>
#include <mutex>
#include <numbers>
#include <random>
#include <thread>
#include <tuple>
#include <vector>

#include "ugi/characters.hpp"
#include "ugi/errors.hpp"
#include "ugi/integrals.hpp"
#include "ugi/linalg.hpp"

namespace ugi {

// ---------------------------------------------------------------------------------------------
// Random numbers

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Seed of stream `index` derived from a master seed.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
    return splitmix64(splitmix64(seed) ^ splitmix64(index + 0x632be59bd9b4e019ULL));
}

/// mt19937_64 plus bit-exact uniforms and Box-Muller normals (no library distributions, whose
/// output is implementation-defined).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(splitmix64(seed)) {}

    /// Uniform on the open interval (0, 1).
    double uniform() { return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53; }

    /// Standard complex normal (real and imaginary parts N(0, 1/2)).
    cplx complex_normal() {
        const double r = std::sqrt(-std::log(uniform()));
        const double theta = 2.0 * std::numbers::pi * uniform();
        return {r * std::cos(theta), r * std::sin(theta)};
    }

    /// Uniform on the complex disk of the given radius.
    cplx uniform_disk(double radius) {
        const double r = radius * std::sqrt(uniform());
        const double theta = 2.0 * std::numbers::pi * uniform();
        return {r * std::cos(theta), r * std::sin(theta)};
    }

private:
    std::mt19937_64 engine_;
};

/// i.i.d. entries uniform on the disk of the given radius.
inline ComplexMatrix random_disk_matrix(std::size_t rows, std::size_t cols, double radius, Rng& rng) {
    ComplexMatrix m(rows, cols);
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j) m(i, j) = rng.uniform_disk(radius);
    return m;
}

// ---------------------------------------------------------------------------------------------
// Haar sampling

/// max |(U^+ U - I)_ij|.
inline double unitarity_defect(const ComplexMatrix& u) {
    double worst = 0.0;
    for (std::size_t i = 0; i < u.cols(); ++i)
        for (std::size_t j = 0; j < u.cols(); ++j) {
            cplx s = 0.0;
            for (std::size_t k = 0; k < u.rows(); ++k) s += std::conj(u(k, i)) * u(k, j);
            worst = std::max(worst, std::abs(s - (i == j ? 1.0 : 0.0)));
        }
    return worst;
}

/// Haar-distributed U(n) matrix: orthonormalize the columns of a complex Ginibre matrix by
/// Gram-Schmidt with one reorthogonalization pass. The implied triangular factor has a positive
/// real diagonal, which is the phase convention that makes Q exactly Haar.
inline ComplexMatrix sample_haar(std::size_t n, Rng& rng) {
    if (n < 1) throw InputError("sample_haar: n must be >= 1");
    ComplexMatrix q(n, n);
    std::vector<cplx> v(n);
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t i = 0; i < n; ++i) v[i] = rng.complex_normal();
        for (int pass = 0; pass < 2; ++pass)
            for (std::size_t k = 0; k < j; ++k) {
                cplx proj = 0.0;
                for (std::size_t i = 0; i < n; ++i) proj += std::conj(q(i, k)) * v[i];
                for (std::size_t i = 0; i < n; ++i) v[i] -= proj * q(i, k);
            }
        double norm = 0.0;
        for (cplx z : v) norm += std::norm(z);
        norm = std::sqrt(norm);
        for (std::size_t i = 0; i < n; ++i) q(i, j) = v[i] / norm;
    }
#ifdef UGI_CHECK_UNITARITY
    if (unitarity_defect(q) > 1e-12) throw NumericalFailure("sample_haar: sample not unitary to 1e-12");
#endif
    return q;
}

// ---------------------------------------------------------------------------------------------
// Monte Carlo

struct MCEstimate {
    cplx mean;
    double stderr_real = 0.0;
    double stderr_imag = 0.0;
    std::size_t samples = 0;
    std::uint64_t seed = 0;
    /// Some input has Frobenius norm above kNormGuard; error bars may be unreliable.
    bool norm_warning = false;
};

/// Frobenius-norm level above which MC variance is considered untrustworthy.
inline constexpr double kNormGuard = 2.0;
/// Samples per shard. Part of the reproducibility contract: changing it changes the estimates.
inline constexpr std::size_t kShardSize = 4096;
inline constexpr std::size_t kMinSamples = 100;

struct MCOptions {
    std::size_t samples = 200000;
    std::uint64_t seed = 0;
    /// Worker threads; 0 means hardware concurrency. Results do not depend on this.
    unsigned threads = 0;
};

namespace detail {

// Welford accumulator over real and imaginary parts; merged with Chan's formula.
struct Moments {
    std::size_t n = 0;
    cplx mean = 0.0;
    double m2_re = 0.0;
    double m2_im = 0.0;

    void add(cplx x) {
        ++n;
        const cplx delta = x - mean;
        mean += delta / static_cast<double>(n);
        m2_re += delta.real() * (x.real() - mean.real());
        m2_im += delta.imag() * (x.imag() - mean.imag());
    }

    void merge(const Moments& o) {
        if (o.n == 0) return;
        if (n == 0) {
            *this = o;
            return;
        }
        const double total = static_cast<double>(n + o.n);
        const cplx delta = o.mean - mean;
        const double w = static_cast<double>(n) * static_cast<double>(o.n) / total;
        mean += delta * (static_cast<double>(o.n) / total);
        m2_re += o.m2_re + delta.real() * delta.real() * w;
        m2_im += o.m2_im + delta.imag() * delta.imag() * w;
        n += o.n;
    }
};

inline bool exceeds_norm_guard(std::initializer_list<const ComplexMatrix*> ms) {
    for (const auto* m : ms)
        if (frobenius_norm(*m) > kNormGuard) return true;
    return false;
}

/// Runs `integrand(rng)` over sharded sample streams and reduces the shards in index order.
inline MCEstimate run_sharded(const std::function<cplx(Rng&)>& integrand, const MCOptions& opt) {
    if (opt.samples < kMinSamples) throw InputError("Monte Carlo needs at least 100 samples");
    const std::size_t shards = (opt.samples + kShardSize - 1) / kShardSize;
    std::vector<Moments> partial(shards);
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mu;
    auto worker = [&] {
        try {
            for (std::size_t s = next++; s < shards; s = next++) {
                Rng rng(derive_seed(opt.seed, s));
                const std::size_t count = std::min(kShardSize, opt.samples - s * kShardSize);
                Moments m;
                for (std::size_t i = 0; i < count; ++i) m.add(integrand(rng));
                partial[s] = m;
            }
        } catch (...) {
            const std::lock_guard lock(failure_mu);
            if (!failure) failure = std::current_exception();
            next = shards;
        }
    };
    unsigned threads = opt.threads ? opt.threads : std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, shards));
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    }
    if (failure) std::rethrow_exception(failure);

    Moments total;
    for (const auto& m : partial) total.merge(m);
    MCEstimate est;
    est.mean = total.mean;
    est.samples = total.n;
    est.seed = opt.seed;
    const double n = static_cast<double>(total.n);
    est.stderr_real = std::sqrt(total.m2_re / (n - 1.0)) / std::sqrt(n);
    est.stderr_imag = std::sqrt(total.m2_im / (n - 1.0)) / std::sqrt(n);
    return est;
}

/// det(U)^p for an integer p (negative powers allowed since |det U| = 1).
inline cplx unitary_det_power(const ComplexMatrix& u, int p) {
    if (p == 0) return 1.0;
    cplx d = determinant(u);
    if (p < 0) {
        d = std::conj(d);
        p = -p;
    }
    return int_power(d, p);
}

} // namespace detail

/// Average of det^nu U exp(tr(A U + B U^+) / 2) over Haar U.
inline MCEstimate mc_i1(const ComplexMatrix& a, const ComplexMatrix& b, int nu, const MCOptions& opt) {
    const std::size_t n = a.rows();
    detail::require_square(a, n, "A");
    detail::require_square(b, n, "B");
    auto est = detail::run_sharded(
        [&](Rng& rng) {
            const ComplexMatrix u = sample_haar(n, rng);
            cplx t = trace_of_product(a, u);
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j) t += b(i, j) * std::conj(u(i, j));
            return detail::unitary_det_power(u, nu) * std::exp(0.5 * t);
        },
        opt);
    est.norm_warning = detail::exceeds_norm_guard({&a, &b});
    return est;
}

/// Average of det^nu U det^eta V exp(tr(U A V B + C V^+ D U^+) / 2) over Haar U in U(N), V in U(M),
/// with A, C of shape N x M and B, D of shape M x N. M may equal N.
inline MCEstimate mc_i2_general(const ComplexMatrix& a, const ComplexMatrix& b, const ComplexMatrix& c,
                                const ComplexMatrix& d, int nu, int eta, const MCOptions& opt) {
    const std::size_t n = a.rows();
    const std::size_t m = a.cols();
    detail::require_shape(a, n, m, "A");
    detail::require_shape(b, m, n, "B");
    detail::require_shape(c, n, m, "C");
    detail::require_shape(d, m, n, "D");
    auto est = detail::run_sharded(
        [&](Rng& rng) {
            const ComplexMatrix u = sample_haar(n, rng);
            const ComplexMatrix v = sample_haar(m, rng);
            const cplx t = trace_of_product(matmul(u, a), matmul(v, b)) +
                           trace_of_product(matmul(c, adjoint(v)), matmul(d, adjoint(u)));
            return detail::unitary_det_power(u, nu) * detail::unitary_det_power(v, eta) * std::exp(0.5 * t);
        },
        opt);
    est.norm_warning = detail::exceeds_norm_guard({&a, &b, &c, &d});
    return est;
}

/// Average of det^nu(UV) exp(tr(U A V B + C V^+ D U^+) / 2) over independent Haar U, V in U(N).
inline MCEstimate mc_i2(const ComplexMatrix& a, const ComplexMatrix& b, const ComplexMatrix& c,
                        const ComplexMatrix& d, int nu, const MCOptions& opt) {
    const std::size_t n = a.rows();
    detail::require_square(a, n, "A");
    detail::require_square(b, n, "B");
    detail::require_square(c, n, "C");
    detail::require_square(d, n, "D");
    return mc_i2_general(a, b, c, d, nu, nu, opt);
}

/// Rectangular two-group average with det^nu U det^eta V inserted; requires M < N.
inline MCEstimate mc_i2_rect_det(const ComplexMatrix& a, const ComplexMatrix& b, const ComplexMatrix& c,
                                 const ComplexMatrix& d, int nu, int eta, const MCOptions& opt) {
    if (a.cols() >= a.rows()) throw InputError("mc_i2_rect_det: need M < N (A is N x M)");
    return mc_i2_general(a, b, c, d, nu, eta, opt);
}

/// Average of exp(tr(A U B U^+)) over Haar U.
inline MCEstimate mc_i3(const ComplexMatrix& a, const ComplexMatrix& b, const MCOptions& opt) {
    const std::size_t n = a.rows();
    detail::require_square(a, n, "A");
    detail::require_square(b, n, "B");
    auto est = detail::run_sharded(
        [&](Rng& rng) {
            const ComplexMatrix u = sample_haar(n, rng);
            return std::exp(trace_of_product(a, matmul(matmul(u, b), adjoint(u))));
        },
        opt);
    est.norm_warning = detail::exceeds_norm_guard({&a, &b});
    return est;
}

/// True when `value` lies within k standard errors of the estimate in both components, with an
/// absolute slack of 1e-12 * max(1, |value|) for rounding when a standard error is zero.
inline bool within_sigma(const MCEstimate& est, cplx value, double k) {
    const double slack = 1e-12 * std::max(1.0, std::abs(value));
    return std::abs(est.mean.real() - value.real()) <= k * est.stderr_real + slack &&
           std::abs(est.mean.imag() - value.imag()) <= k * est.stderr_imag + slack;
}

/// Largest per-component |mean - value| / stderr (0/0 counts as 0, x/0 as +inf).
inline double z_score(const MCEstimate& est, cplx value) {
    auto z = [](double diff, double se) {
        diff = std::abs(diff);
        if (diff == 0.0) return 0.0;
        return se == 0.0 ? std::numeric_limits<double>::infinity() : diff / se;
    };
    return std::max(z(est.mean.real() - value.real(), est.stderr_real),
                    z(est.mean.imag() - value.imag(), est.stderr_imag));
}

// ---------------------------------------------------------------------------------------------
// Character series

struct SeriesEstimate {
    cplx value;
    int max_weight = 0;
    /// Sum of |term| over partitions of weight exactly max_weight.
    double last_shell_magnitude = 0.0;
    std::size_t terms = 0;
};

namespace detail {

struct SeriesTerm {
    Partition r;
    long double coefficient;
};

/// Partitions of weight <= max_weight with n_N >= nu and their exact coefficients
/// (alpha^(0)/d)(alpha^(nu)/d), times d when dim_power == 1, converted to long double once. Cached.
inline const std::vector<SeriesTerm>& series_terms(std::size_t rank, int nu, int max_weight, int dim_power) {
    static std::mutex mu;
    static std::map<std::tuple<std::size_t, int, int, int>, std::vector<SeriesTerm>> cache;
    const std::lock_guard lock(mu);
    auto key = std::make_tuple(rank, nu, max_weight, dim_power);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    std::vector<SeriesTerm> terms;
    for (const Partition& r : enumerate_partitions(rank, max_weight)) {
        if (r.part(rank - 1) < nu) continue;
        ExactRational c = alpha_over_dim(r, 0) * alpha_over_dim(r, nu);
        if (c == 0) continue;
        if (dim_power == 1) c *= ExactRational(dimension(r));
        terms.push_back({r, to_long_double(c)});
    }
    return cache.emplace(key, std::move(terms)).first->second;
}

} // namespace detail

/// Partial sum over |r| <= max_weight of (alpha_r^(0)/d_r) alpha_r^(nu) chi_r(A'B') / det^nu A' with
/// A' = A/2, B' = B/2. Using chi_r = det^nu * chi_{r - nu} this is
/// det^nu(B') sum_r (alpha_r^(0)/d_r) alpha_r^(nu) chi_{r-nu}(A'B'), which needs no inverse of A.
inline SeriesEstimate series_i1(const ComplexMatrix& a, const ComplexMatrix& b, int nu, int max_weight) {
    if (nu < 0) throw InputError("series_i1: nu must be non-negative");
    if (max_weight < 0) throw InputError("series_i1: max_weight must be non-negative");
    const std::size_t n = a.rows();
    detail::require_square(a, n, "A");
    detail::require_square(b, n, "B");
    const ComplexMatrix ah = scaled(a, 0.5);
    const ComplexMatrix bh = scaled(b, 0.5);
    CharacterTable chi(eigenvalues(matmul(ah, bh)));

    SeriesEstimate out;
    out.max_weight = max_weight;
    lcplx sum = 0.0L;
    for (const auto& t : detail::series_terms(n, nu, max_weight, 1)) {
        const lcplx term = t.coefficient * detail::to_l(chi(t.r.shifted_down(nu)));
        sum += term;
        ++out.terms;
        if (t.r.weight() == max_weight) out.last_shell_magnitude += static_cast<double>(std::abs(term));
    }
    const cplx det_power = int_power(determinant(bh), nu);
    out.value = det_power * detail::to_d(sum);
    out.last_shell_magnitude *= std::abs(det_power);
    return out;
}

/// Partial sum over |r| <= max_weight of (alpha_r^(nu) alpha_r^(0) / d_r^2) chi_r(A'D') chi_r(B'C') /
/// det^nu(A'B') with all four matrices scaled by 1/sqrt(2), rewritten as
/// det^nu(C'D') sum_r (...) chi_{r-nu}(A'D') chi_{r-nu}(B'C').
inline SeriesEstimate series_i2(const ComplexMatrix& a, const ComplexMatrix& b, const ComplexMatrix& c,
                                const ComplexMatrix& d, int nu, int max_weight) {
    if (nu < 0) throw InputError("series_i2: nu must be non-negative");
    if (max_weight < 0) throw InputError("series_i2: max_weight must be non-negative");
    const std::size_t n = a.rows();
    detail::require_square(a, n, "A");
    detail::require_square(b, n, "B");
    detail::require_square(c, n, "C");
    detail::require_square(d, n, "D");
    const double s = 1.0 / std::sqrt(2.0);
    const ComplexMatrix as = scaled(a, s), bs = scaled(b, s), cs = scaled(c, s), ds = scaled(d, s);
    CharacterTable chi_ad(eigenvalues(matmul(as, ds)));
    CharacterTable chi_bc(eigenvalues(matmul(bs, cs)));

    SeriesEstimate out;
    out.max_weight = max_weight;
    lcplx sum = 0.0L;
    for (const auto& t : detail::series_terms(n, nu, max_weight, 0)) {
        const Partition rs = t.r.shifted_down(nu);
        const lcplx term = t.coefficient * detail::to_l(chi_ad(rs)) * detail::to_l(chi_bc(rs));
        sum += term;
        ++out.terms;
        if (t.r.weight() == max_weight) out.last_shell_magnitude += static_cast<double>(std::abs(term));
    }
    const cplx det_power = int_power(determinant(cs) * determinant(ds), nu);
    out.value = det_power * detail::to_d(sum);
    out.last_shell_magnitude *= std::abs(det_power);
    return out;
}

} // namespace ugi
