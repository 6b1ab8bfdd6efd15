#pragma once

#include <cmath>
#include <complex>
#include <optional>
#include <utility>
#include <vector>

#include "qng/errors.hpp"
#include "qng/gaussian_boundary.hpp"
#include "qng/photon_stats.hpp"

namespace qng {

/// Mixture of vacuum and single photon with fraction eta, tensored with a
/// Poissonian background mode of mean photon number nbar.
struct NoisySinglePhotonModel {
    double eta = 1.0;
    double nbar = 0.0;
};

namespace detail {

inline void check_noisy_model(const NoisySinglePhotonModel& m) {
    if (!(m.eta >= 0.0 && m.eta <= 1.0))
        throw invalid_input("single-photon fraction eta must lie in [0,1]");
    if (!(m.nbar >= 0.0)) throw invalid_input("noise mean nbar must be >= 0");
}

}  // namespace detail

/// Closed-form (p0, q0(T)) of the noisy single-photon model:
/// p0 = (1-eta) e^{-nbar}, q0 = (1-eta T) e^{-nbar T}.
inline std::pair<double, double> noisy_single_photon_vacuum_pair(
    const NoisySinglePhotonModel& m, double T) {
    detail::check_noisy_model(m);
    detail::check_open_T(T);
    return {(1.0 - m.eta) * std::exp(-m.nbar),
            (1.0 - m.eta * T) * std::exp(-m.nbar * T)};
}

/// Photon statistics of the noisy single-photon model: the tensor product
/// convolves the {1-eta, eta} statistics with Poisson(nbar),
/// p_n = (1-eta) Pois(n) + eta Pois(n-1).
inline PhotonNumberDistribution noisy_single_photon_distribution(
    const NoisySinglePhotonModel& m) {
    detail::check_noisy_model(m);
    const PhotonNumberDistribution pois = poisson_distribution(m.nbar);
    PhotonNumberDistribution dist;
    dist.probs.assign(pois.probs.size() + 1, 0.0);
    for (std::size_t n = 0; n < pois.probs.size(); ++n) {
        dist.probs[n] += (1.0 - m.eta) * pois.probs[n];
        dist.probs[n + 1] += m.eta * pois.probs[n];
    }
    dist.tail_bound = pois.tail_bound;
    return dist;
}

/// Mixture of Fock states with the given diagonal probabilities.
inline PhotonNumberDistribution fock_mixture(std::vector<double> probs) {
    PhotonNumberDistribution dist;
    dist.probs = std::move(probs);
    validate(dist);
    return dist;
}

/// Fock expansion of a pure squeezed coherent state via the Bogoliubov
/// eigenvalue recurrence: with mu = (sqrt(V)+1/sqrt(V))/2,
/// nu = (1/sqrt(V)-sqrt(V))/2 and gamma = mu*alpha + nu*conj(alpha),
/// the amplitudes obey mu sqrt(n+1) c_{n+1} = gamma c_n - nu sqrt(n) c_{n-1}.
inline PhotonNumberDistribution squeezed_coherent_distribution(
    const GaussianStateParams& s, std::size_t max_terms = 4096) {
    detail::check_variance(s.V);
    const double sv = std::sqrt(s.V);
    const double mu = 0.5 * (sv + 1.0 / sv);
    const double nu = 0.5 * (1.0 / sv - sv);
    const std::complex<double> alpha(s.d_x / std::sqrt(2.0),
                                     s.d_p / std::sqrt(2.0));
    const std::complex<double> gamma = mu * alpha + nu * std::conj(alpha);

    std::vector<double> w;  // unnormalized |c_n|^2
    std::complex<double> c_prev = 0.0, c_cur = 1.0;
    double sum = 0.0;
    for (std::size_t n = 0; n < max_terms; ++n) {
        const double wn = std::norm(c_cur);
        w.push_back(wn);
        sum += wn;
        if (n > 4 && wn < sum * 1e-16 && std::norm(c_prev) < sum * 1e-16)
            break;
        std::complex<double> c_next =
            (gamma * c_cur - nu * std::sqrt(double(n)) * c_prev) /
            (mu * std::sqrt(double(n) + 1.0));
        c_prev = c_cur;
        c_cur = c_next;
        if (sum > 1e200) {  // rescale to avoid overflow
            for (double& x : w) x /= sum;
            c_prev /= std::sqrt(sum);
            c_cur /= std::sqrt(sum);
            sum = 1.0;
        }
    }
    PhotonNumberDistribution dist;
    dist.probs.reserve(w.size());
    for (double x : w) dist.probs.push_back(x / sum);
    dist.tail_bound = 1e-13;
    // Renormalize the truncated vector so the invariant holds exactly.
    double s2 = 0.0;
    for (double x : dist.probs) s2 += x;
    for (double& x : dist.probs) x *= (1.0 - dist.tail_bound) / s2;
    return dist;
}

/// Independent product of single-mode distributions; p0 and q0 multiply
/// across modes.
struct MultimodeProductState {
    std::vector<PhotonNumberDistribution> modes;

    double p0() const {
        double p = 1.0;
        for (const auto& m : modes) p *= m.p0();
        return p;
    }
    double q0(double T) const {
        double q = 1.0;
        for (const auto& m : modes) q *= vacuum_after_loss(m, T);
        return q;
    }
};

/// Smallest single-photon fraction eta for which the noisy single-photon
/// model is certified at (nbar, T); nullopt when even eta = 1 is not.
inline std::optional<double> eta_threshold(double nbar, double T) {
    if (!(nbar >= 0.0)) throw invalid_input("nbar must be >= 0");
    detail::check_open_T(T);
    auto certified = [&](double eta) {
        auto [p0, q0] = noisy_single_photon_vacuum_pair({eta, nbar}, T);
        if (p0 >= 1.0) return false;
        // The Gaussian threshold tends to 0 as p0 -> 0, so any q0 > 0 wins.
        if (p0 <= 0.0) return q0 > 0.0;
        return q0 > q0_threshold(p0, T);
    };
    if (!certified(1.0)) return std::nullopt;
    double lo = 0.0, hi = 1.0;
    while (hi - lo > 1e-8) {
        const double mid = 0.5 * (lo + hi);
        if (certified(mid))
            hi = mid;
        else
            lo = mid;
    }
    return hi;
}

}  // namespace qng
