#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "qng/errors.hpp"

namespace qng {

/// Counter-based deterministic generator: each (seed, stream) pair owns an
/// independent substream, and the n-th output depends only on
/// (seed, stream, n). This keeps sharded simulations bit-reproducible.
class CounterRng {
  public:
    CounterRng(std::uint64_t seed, std::uint64_t stream = 0)
        : key_(mix(seed ^ mix(stream + 0x9e3779b97f4a7c15ULL))), counter_(0) {}

    std::uint64_t next_u64() { return mix(key_ + mix(counter_++ ^ key_)); }

    /// Uniform double in [0, 1).
    double next_double() {
        return double(next_u64() >> 11) * 0x1.0p-53;
    }

  private:
    // splitmix64 finalizer
    static std::uint64_t mix(std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    std::uint64_t key_;
    std::uint64_t counter_;
};

namespace detail {

/// Regularized incomplete beta function I_x(a, b) via the Lentz continued
/// fraction expansion.
inline double betacf(double a, double b, double x) {
    constexpr int max_iter = 300;
    constexpr double eps = 3e-16, fpmin = 1e-300;
    const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::abs(d) < fpmin) d = fpmin;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= max_iter; ++m) {
        const int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < fpmin) d = fpmin;
        c = 1.0 + aa / c;
        if (std::abs(c) < fpmin) c = fpmin;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < fpmin) d = fpmin;
        c = 1.0 + aa / c;
        if (std::abs(c) < fpmin) c = fpmin;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < eps) break;
    }
    return h;
}

inline double betainc(double a, double b, double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double lnbeta = std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
    const double front =
        std::exp(a * std::log(x) + b * std::log1p(-x) - lnbeta);
    if (x < (a + 1.0) / (a + b + 2.0))
        return front * betacf(a, b, x) / a;
    return 1.0 - std::exp(b * std::log1p(-x) + a * std::log(x) - lnbeta) *
                     betacf(b, a, 1.0 - x) / b;
}

/// P(X <= k) for X ~ Binomial(n, p), exact via the incomplete beta identity.
inline double binomial_cdf(std::int64_t k, std::int64_t n, double p) {
    if (k < 0) return 0.0;
    if (k >= n) return 1.0;
    return betainc(double(n - k), double(k) + 1.0, 1.0 - p);
}

inline double binomial_log_pmf(std::int64_t k, std::int64_t n, double p) {
    return std::lgamma(double(n) + 1.0) - std::lgamma(double(k) + 1.0) -
           std::lgamma(double(n - k) + 1.0) + double(k) * std::log(p) +
           double(n - k) * std::log1p(-p);
}

}  // namespace detail

/// Exact binomial sampling from one uniform: CDF inversion from 0 when
/// n*p <= 30, otherwise inversion started at the mode (the CDF there is
/// evaluated through the incomplete beta function, then the pmf recurrence
/// walks outward until the uniform is bracketed).
inline std::int64_t sample_binomial(std::int64_t n, double p, CounterRng& rng) {
    if (n < 0) throw invalid_input("binomial trials must be >= 0");
    if (!(p >= 0.0 && p <= 1.0))
        throw invalid_input("binomial p must lie in [0,1]");
    if (n == 0 || p == 0.0) return 0;
    if (p == 1.0) return n;
    // Sample the rarer side for a short inversion walk.
    if (p > 0.5) return n - sample_binomial(n, 1.0 - p, rng);

    const double u = rng.next_double();
    const double np = double(n) * p;
    if (np <= 30.0) {
        double pmf = std::exp(double(n) * std::log1p(-p));
        double cdf = pmf;
        std::int64_t k = 0;
        while (u >= cdf && k < n) {
            pmf *= double(n - k) / double(k + 1) * p / (1.0 - p);
            ++k;
            cdf += pmf;
        }
        return k;
    }

    std::int64_t k = std::int64_t(std::floor(double(n + 1) * p));
    if (k > n) k = n;
    double cdf = detail::binomial_cdf(k, n, p);
    double pmf = std::exp(detail::binomial_log_pmf(k, n, p));
    if (u < cdf) {
        // walk down: cdf currently P(X <= k)
        while (k > 0) {
            if (u >= cdf - pmf) return k;
            cdf -= pmf;
            pmf *= double(k) / double(n - k + 1) * (1.0 - p) / p;
            --k;
        }
        return 0;
    }
    while (k < n) {
        pmf *= double(n - k) / double(k + 1) * p / (1.0 - p);
        ++k;
        cdf += pmf;
        if (u < cdf) return k;
    }
    return n;
}

/// Multinomial draw via sequential conditional binomials.
inline std::vector<std::int64_t> sample_multinomial(
    std::int64_t n, const std::vector<double>& probs, CounterRng& rng) {
    std::vector<std::int64_t> counts(probs.size(), 0);
    double remaining_mass = 0.0;
    for (double p : probs) {
        if (!(p >= 0.0)) throw invalid_input("multinomial p must be >= 0");
        remaining_mass += p;
    }
    std::int64_t remaining = n;
    for (std::size_t i = 0; i + 1 < probs.size(); ++i) {
        if (remaining == 0) break;
        double cond = remaining_mass > 0.0 ? probs[i] / remaining_mass : 0.0;
        if (cond > 1.0) cond = 1.0;
        counts[i] = sample_binomial(remaining, cond, rng);
        remaining -= counts[i];
        remaining_mass -= probs[i];
    }
    if (!probs.empty()) counts.back() = remaining;
    return counts;
}

}  // namespace qng
