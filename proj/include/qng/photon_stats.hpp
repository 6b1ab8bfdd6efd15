#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "qng/errors.hpp"

namespace qng {

/// Diagonal photon-number statistics of a state, truncated at n_max with a
/// guaranteed bound on the omitted mass.
struct PhotonNumberDistribution {
    std::vector<double> probs;  ///< probs[n] = p_n, n = 0..n_max
    double tail_bound = 0.0;    ///< upper bound on mass beyond n_max

    std::size_t n_max() const { return probs.empty() ? 0 : probs.size() - 1; }
    double p0() const { return probs.empty() ? 0.0 : probs.front(); }
};

namespace detail {

inline constexpr double kNormTolerance = 1e-9;

inline void check_transmittance(double T) {
    if (!(T >= 0.0 && T <= 1.0))
        throw invalid_input("transmittance T must lie in [0,1]");
}

/// log C(n, k), safe for large n.
inline double log_binomial(std::size_t n, std::size_t k) {
    return std::lgamma(double(n) + 1.0) - std::lgamma(double(k) + 1.0) -
           std::lgamma(double(n - k) + 1.0);
}

inline double binomial_coeff(std::size_t n, std::size_t k) {
    if (k > n) return 0.0;
    if (n <= 50) {
        double c = 1.0;
        for (std::size_t i = 0; i < k; ++i)
            c = c * double(n - i) / double(i + 1);
        return c;
    }
    return std::exp(log_binomial(n, k));
}

}  // namespace detail

inline void validate(const PhotonNumberDistribution& dist) {
    if (dist.probs.empty())
        throw invalid_distribution("empty photon number distribution");
    double sum = 0.0;
    for (double p : dist.probs) {
        if (!(p >= 0.0))
            throw invalid_distribution("negative probability entry");
        sum += p;
    }
    if (!(dist.tail_bound >= 0.0))
        throw invalid_distribution("negative tail bound");
    const double total = sum + dist.tail_bound;
    if (std::abs(total - 1.0) > detail::kNormTolerance)
        throw invalid_distribution("distribution not normalized");
}

/// Vacuum probability after a lossy channel of transmittance T:
/// q0(T) = sum_n p_n (1-T)^n.
inline double vacuum_after_loss(const PhotonNumberDistribution& dist, double T) {
    validate(dist);
    detail::check_transmittance(T);
    double q0 = 0.0;
    double w = 1.0;  // (1-T)^n
    for (double p : dist.probs) {
        q0 += p * w;
        w *= (1.0 - T);
    }
    return q0;
}

/// Mean photon number n̄ = sum_n n p_n. The truncation error is bounded by
/// n_max * tail_bound only if the tail is concentrated just above n_max; we
/// report the sum and leave the (tiny) tail to the factories' 1e-12 rule.
inline double mean_photon(const PhotonNumberDistribution& dist) {
    validate(dist);
    double nbar = 0.0;
    for (std::size_t n = 1; n < dist.probs.size(); ++n)
        nbar += double(n) * dist.probs[n];
    return nbar;
}

/// Binomial loss map: each photon survives independently with probability T.
inline PhotonNumberDistribution attenuate(const PhotonNumberDistribution& dist,
                                          double T) {
    validate(dist);
    detail::check_transmittance(T);
    PhotonNumberDistribution out;
    out.probs.assign(dist.probs.size(), 0.0);
    out.tail_bound = dist.tail_bound;
    const std::size_t n_max = dist.probs.size() - 1;
    for (std::size_t n = 0; n <= n_max; ++n) {
        const double pn = dist.probs[n];
        if (pn == 0.0) continue;
        for (std::size_t m = 0; m <= n; ++m) {
            out.probs[m] += pn * detail::binomial_coeff(n, m) *
                            std::pow(T, double(m)) *
                            std::pow(1.0 - T, double(n - m));
        }
    }
    // Attenuation can only move mass downward; drop now-empty top entries.
    while (out.probs.size() > 1 && out.probs.back() == 0.0) out.probs.pop_back();
    return out;
}

/// Poisson photon statistics with mean nbar, truncated at tail mass < 1e-12.
inline PhotonNumberDistribution poisson_distribution(double nbar) {
    if (!(nbar >= 0.0)) throw invalid_input("Poisson mean must be >= 0");
    PhotonNumberDistribution dist;
    if (nbar == 0.0) {
        dist.probs = {1.0};
        return dist;
    }
    double term = std::exp(-nbar);
    double cumulative = 0.0;
    std::size_t n = 0;
    while (true) {
        dist.probs.push_back(term);
        cumulative += term;
        if (1.0 - cumulative < 1e-12 && double(n) > nbar) break;
        ++n;
        term *= nbar / double(n);
        if (n > 100000)
            throw invalid_input("Poisson truncation did not converge");
    }
    dist.tail_bound = std::max(0.0, 1.0 - cumulative);
    return dist;
}

}  // namespace qng
