#pragma once

#include <cmath>
#include <utility>

#include "qng/errors.hpp"

namespace qng {

/// Pure single-mode Gaussian state with diagonal covariance diag(V, 1/V)
/// and coherent displacement (d_x, d_p). V = 1 is vacuum / coherent.
struct GaussianStateParams {
    double V = 1.0;
    double d_x = 0.0;
    double d_p = 0.0;
};

/// One point of the parametric Gaussian boundary at transmittance T,
/// together with the tangent witness (lambda, W_G).
struct BoundaryPoint {
    double V;
    double T;
    double p0;
    double q0;
    double lambda;
    double W_G;
};

namespace detail {

inline void check_open_T(double T) {
    if (!(T > 0.0 && T < 1.0))
        throw invalid_input("transmittance T must lie in (0,1)");
}

inline void check_variance(double V) {
    if (!(V > 0.0)) throw invalid_input("quadrature variance V must be > 0");
}

}  // namespace detail

/// Vacuum probability of a pure squeezed coherent state.
inline double p0_gaussian(const GaussianStateParams& s) {
    detail::check_variance(s.V);
    return 2.0 * std::sqrt(s.V) / (s.V + 1.0) *
           std::exp(-s.d_x * s.d_x / (s.V + 1.0) -
                    s.V * s.d_p * s.d_p / (s.V + 1.0));
}

/// Vacuum probability of the same state after a lossy channel of
/// transmittance T.
inline double q0_gaussian(const GaussianStateParams& s, double T) {
    detail::check_variance(s.V);
    detail::check_open_T(T);
    const double a = T * s.V + 2.0 - T;
    const double b = T + 2.0 * s.V - T * s.V;
    return 2.0 * std::sqrt(s.V) / std::sqrt(a * b) *
           std::exp(-T * s.d_x * s.d_x / a - T * s.V * s.d_p * s.d_p / b);
}

/// Optimal displacement along x for the boundary family at (V, T).
inline double dx_opt(double V, double T) {
    detail::check_open_T(T);
    if (!(V > 0.0 && V <= 1.0))
        throw invalid_input("dx_opt requires V in (0,1]");
    const double r = (1.0 - V * V) / (2.0 * V) * (2.0 - T + T * V) /
                     (2.0 * V - T * V + T);
    return std::sqrt(std::max(0.0, r));
}

/// Parametric maximum of q0 over Gaussian states at fixed p0, plus the
/// tangent witness slope lambda and the Gaussian cap W_G.
inline BoundaryPoint boundary_point(double V, double T) {
    detail::check_open_T(T);
    if (!(V > 0.0 && V <= 1.0))
        throw invalid_input("boundary_point requires V in (0,1]");
    const double a = T * V + 2.0 - T;        // TV + 2 - T
    const double b = 2.0 * V - T * V + T;    // 2V - TV + T
    const double p0 = 2.0 * std::sqrt(V) / (V + 1.0) *
                      std::exp(-(1.0 - V) * a / (2.0 * V * b));
    const double q0 = 2.0 * std::sqrt(V) / std::sqrt(a * b) *
                      std::exp(-T * (1.0 - V * V) / (2.0 * V * b));
    // q0/p0 evaluated through the combined exponent; the separate factors
    // underflow for strongly squeezed V while the ratio stays meaningful.
    const double ratio = (V + 1.0) / std::sqrt(a * b) *
                         std::exp((1.0 - V) * (1.0 - T) / (V * b));
    const double lambda = (V + 1.0) * T / a * ratio;
    const double W_G = 2.0 * (1.0 - T) / a * q0;
    return {V, T, p0, q0, lambda, W_G};
}

/// Inverts p0(V, T) in V by bisection; p0(V,T) is strictly increasing in V.
inline double solve_V_for_p0(double p0_target, double T) {
    detail::check_open_T(T);
    if (!(p0_target > 0.0 && p0_target < 1.0))
        throw invalid_input("solve_V_for_p0 requires p0 in (0,1)");
    double lo = 1e-9, hi = 1.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (boundary_point(mid, T).p0 < p0_target)
            lo = mid;
        else
            hi = mid;
        if (hi - lo < 1e-16) break;
    }
    return 0.5 * (lo + hi);
}

/// Maximum q0 achievable by Gaussian states (and mixtures) at fixed p0.
inline double q0_threshold(double p0, double T) {
    return boundary_point(solve_V_for_p0(p0, T), T).q0;
}

/// Physical range of q0(T): lower bound p0, upper bound 1 - T(1 - p0).
inline std::pair<double, double> physical_bounds(double p0, double T) {
    detail::check_open_T(T);
    if (!(p0 >= 0.0 && p0 <= 1.0))
        throw invalid_input("p0 must lie in [0,1]");
    return {p0, 1.0 - T * (1.0 - p0)};
}

/// Parametric (p0, n̄_th) pair of the mean-photon-number criterion; the
/// state is quantum non-Gaussian if its mean photon number at this p0 lies
/// below n̄_th.
inline std::pair<double, double> nbar_threshold_parametric(double V) {
    if (!(V > 0.0 && V <= 1.0))
        throw invalid_input("nbar threshold requires V in (0,1]");
    const double p0 = 2.0 * std::sqrt(V) / (V + 1.0) *
                      std::exp(-(1.0 - V) / (2.0 * V * V));
    const double nbar_th =
        (1.0 - V) * (1.0 + 2.0 * V - V * V) / (4.0 * V * V);
    return {p0, nbar_th};
}

/// Result of the approximate near-V=1 criterion; advisory only, the exact
/// parametric threshold is authoritative.
struct ApproxTestResult {
    bool certified;       ///< (1-q0)^3 exceeds the cubic right-hand side
    bool regime_valid;    ///< 1 - p0 < 0.1, where the Taylor expansion holds
};

inline ApproxTestResult approx_qng_test(double p0, double q0, double T) {
    detail::check_open_T(T);
    const double lhs = std::pow(1.0 - q0, 3);
    const double rhs = 3.0 * T * T / (2.0 * (1.0 - T) * (2.0 - T)) *
                       (1.0 - T - q0 + T * p0);
    return {lhs > rhs, (1.0 - p0) < 0.1};
}

/// Perturbation check showing squeezed vacuum states are not boundary
/// optimal: an eps displacement combined with the compensating variance
/// shift K = -2V/(1-V) keeps p0 fixed to first order while lowering the
/// squeezed-vacuum q0 below the displaced state's q0.
/// Returns (delta_p0, delta_q0) = (p0_sv - p0_displaced, q0_sv - q0_displaced).
inline std::pair<double, double> appendix_a_perturbation_check(double V,
                                                               double T,
                                                               double eps) {
    detail::check_open_T(T);
    if (!(V > 0.0 && V < 1.0))
        throw invalid_input("perturbation check requires V in (0,1)");
    if (!(eps >= 0.0)) throw invalid_input("eps must be >= 0");
    const double K = -2.0 * V / (1.0 - V);
    const double W_sv = V + K * eps;  // squeezed-vacuum variance V_sv
    const double p0_sv = 2.0 * std::sqrt(W_sv) / (W_sv + 1.0);
    const double q0_sv =
        2.0 * std::sqrt(W_sv) /
        std::sqrt((T * W_sv + 2.0 - T) * (T + 2.0 * W_sv - T * W_sv));
    // Displaced squeezed coherent state with d_x^2 = eps.
    const GaussianStateParams disp{V, std::sqrt(eps), 0.0};
    return {p0_sv - p0_gaussian(disp), q0_sv - q0_gaussian(disp, T)};
}

/// Leading-order coefficient of delta_q0 in eps for the perturbation above:
/// delta_q0 ~ -4(1-T)T sqrt(V) / [(2-T+TV)(2V+T-TV)]^{3/2} * eps.
inline double appendix_a_leading_coefficient(double V, double T) {
    const double a = 2.0 - T + T * V;
    const double b = 2.0 * V + T - T * V;
    return -4.0 * (1.0 - T) * T * std::sqrt(V) / std::pow(a * b, 1.5);
}

/// Quartic arising in the two-mode extremality condition; strictly positive
/// on V in (0,1], which forces the two-mode optimum onto the single-mode
/// family with vacuum in the other mode.
inline double appendix_b_polynomial(double V, double T) {
    return -(2.0 - T) * (2.0 - T) * V * V * V * V -
           2.0 * (1.0 - T) * T * V * V * V +
           2.0 * (2.0 - T) * (T + 1.0) * V * V +
           2.0 * (4.0 - (3.0 - T) * T) * V + (2.0 - T) * T;
}

}  // namespace qng
