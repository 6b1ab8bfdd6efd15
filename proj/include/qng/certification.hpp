#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>

#include "qng/errors.hpp"
#include "qng/gaussian_boundary.hpp"

namespace qng {

enum class Scheme { single_apd, double_apd };

/// A measured or modeled (p0, q0, T) triple. Violations of the physical
/// bounds up to 1e-9 are clamped (finite-statistics noise); larger ones are
/// rejected at construction.
struct VacuumPair {
    double p0;
    double q0;
    double T;
    std::optional<std::int64_t> runs;  ///< N runs behind each probability

    static VacuumPair make(double p0, double q0, double T,
                           std::optional<std::int64_t> runs = std::nullopt) {
        detail::check_open_T(T);
        if (!(p0 > 0.0 && p0 <= 1.0 && q0 > 0.0 && q0 <= 1.0))
            throw nonphysical_pair("p0 and q0 must lie in (0,1]");
        const double upper = 1.0 - T * (1.0 - p0);
        constexpr double tol = 1e-9;
        if (q0 < p0 - tol || q0 > upper + tol)
            throw nonphysical_pair(
                "nonphysical pair: q0 outside [p0, 1 - T(1-p0)]");
        if (q0 < p0) q0 = p0;
        if (q0 > upper) q0 = upper;
        return {p0, q0, T, runs};
    }
};

struct WitnessChoice {
    double lambda;
    double V;
    double W;
    double W_G;
    double significance;  ///< (W - W_G) / sigma_W, 0 if no counts given
};

struct CertificationResult {
    bool certified;
    double margin;  ///< q0 - q0_threshold(p0, T)
    WitnessChoice witness;
};

namespace detail {

/// Per-run witness variance, plug-in form: the single-APD scheme
/// splits N runs evenly between the two probabilities, the double-APD
/// scheme measures them simultaneously with covariance p0(1-q0)/N.
inline double witness_variance_per_run(Scheme scheme, double lambda,
                                       double p0, double q0) {
    const double base = q0 * (1.0 - q0) + lambda * lambda * p0 * (1.0 - p0);
    if (scheme == Scheme::single_apd) return 2.0 * base;
    return base - 2.0 * lambda * p0 * (1.0 - q0);
}

/// Golden-section maximization of f over [lo, hi].
template <class F>
inline double golden_max(F&& f, double lo, double hi, int iters = 80) {
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double a = lo, b = hi;
    double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
    double f1 = f(x1), f2 = f(x2);
    for (int i = 0; i < iters; ++i) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + gr * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - gr * (b - a);
            f1 = f(x1);
        }
    }
    return f1 > f2 ? x1 : x2;
}

}  // namespace detail

/// Searches the V-parameterized witness family for the V maximizing the
/// certification significance (W - W_G)/sigma under the given scheme.
inline WitnessChoice optimal_witness(const VacuumPair& pair, Scheme scheme,
                                     std::int64_t N) {
    if (N <= 0) throw invalid_input("N must be positive");
    auto significance_at = [&](double V) {
        const BoundaryPoint bp = boundary_point(V, pair.T);
        const double W = pair.q0 - bp.lambda * pair.p0;
        const double var =
            detail::witness_variance_per_run(scheme, bp.lambda, pair.p0,
                                             pair.q0) /
            double(N);
        const double s = (W - bp.W_G) / std::sqrt(std::max(var, 1e-300));
        // Strongly squeezed V underflows p0/q0 and overflows lambda; such
        // witnesses are never useful, so exclude them from the search.
        if (!std::isfinite(s)) return -std::numeric_limits<double>::infinity();
        return s;
    };
    // 256-point bracketing scan on a geometric V grid, then golden section.
    double best_V = 1.0, best_s = significance_at(1.0);
    const int n_scan = 256;
    for (int i = 0; i < n_scan; ++i) {
        const double V = std::pow(10.0, -4.0 + 4.0 * double(i) / (n_scan - 1));
        const double s = significance_at(V);
        if (s > best_s) {
            best_s = s;
            best_V = V;
        }
    }
    const double lo = std::max(1e-4, best_V / 1.1);
    const double hi = std::min(1.0, best_V * 1.1);
    const double V = detail::golden_max(significance_at, lo, hi);
    const BoundaryPoint bp = boundary_point(V, pair.T);
    return {bp.lambda, V, pair.q0 - bp.lambda * pair.p0, bp.W_G,
            significance_at(V)};
}

/// Compares the pair against the Gaussian boundary and fills in the tangent
/// witness at the measured p0.
inline CertificationResult certify(const VacuumPair& pair,
                                   Scheme scheme = Scheme::double_apd) {
    CertificationResult res{};
    if (pair.p0 >= 1.0) {
        // p0 = 1 forces q0 = 1; the vacuum sits exactly on the boundary.
        res.margin = pair.q0 - 1.0;
        res.certified = res.margin > 0.0;
        res.witness = {pair.T, 1.0, pair.q0 - pair.T * pair.p0, 1.0 - pair.T,
                       0.0};
        return res;
    }
    res.margin = pair.q0 - q0_threshold(pair.p0, pair.T);
    res.certified = res.margin > 0.0;
    const BoundaryPoint bp =
        boundary_point(solve_V_for_p0(pair.p0, pair.T), pair.T);
    res.witness = {bp.lambda, bp.V, pair.q0 - bp.lambda * pair.p0, bp.W_G,
                   0.0};
    if (pair.runs) {
        const WitnessChoice opt = optimal_witness(pair, scheme, *pair.runs);
        res.witness = opt;
    }
    return res;
}

}  // namespace qng
