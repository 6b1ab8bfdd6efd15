#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <utility>

#include "qng/certification.hpp"
#include "qng/errors.hpp"
#include "qng/gaussian_boundary.hpp"

namespace qng {

/// Measurement-count plan for certifying a given pair: runs required by the
/// single- and double-APD schemes, their ratio, and the single-scheme split.
struct PlanResult {
    double N_S;
    double N_D;
    double lambda_S;        ///< witness slope minimizing N_S
    double lambda_D;        ///< witness slope minimizing N_D
    double R_DS;            ///< N_D / N_S
    double R_DS_min;        ///< conservative lower bound on R_DS
    double lambda0;         ///< slope attaining R_DS_min
    double K_opt_fraction;  ///< optimal fraction of runs spent on q0
};

/// Conservative lower bound on N_D/N_S, minimized over a shared witness
/// slope: 1/2 (1 - sqrt(p0(1-q0)/(q0(1-p0)))). Degenerate edges return the
/// limit value 1/2.
inline double rds_min(double p0, double q0) {
    if (!(p0 > 0.0 && q0 < 1.0)) return 0.5;
    if (!(p0 <= q0)) throw invalid_input("rds_min requires p0 <= q0");
    return 0.5 * (1.0 - std::sqrt(p0 * (1.0 - q0) / (q0 * (1.0 - p0))));
}

/// Slope at which the R_DS lower bound is attained.
inline double lambda0_optimal(double p0, double q0) {
    if (!(p0 > 0.0 && p0 < 1.0 && q0 > 0.0 && q0 < 1.0))
        throw invalid_input("lambda0 requires p0, q0 in (0,1)");
    return std::sqrt(q0 * (1.0 - q0) / (p0 * (1.0 - p0)));
}

/// Optimal number of runs (out of N) to spend on estimating q0 in the
/// sequential single-APD scheme: K_opt = lambda0/(lambda + lambda0) * N.
inline std::int64_t k_opt(double lambda, double p0, double q0,
                          std::int64_t N) {
    if (N < 2) throw invalid_input("k_opt requires N >= 2");
    const double l0 = lambda0_optimal(p0, q0);
    const double frac = l0 / (lambda + l0);
    auto k = std::int64_t(std::llround(frac * double(N)));
    if (k < 1) k = 1;
    if (k > N - 1) k = N - 1;
    return k;
}

/// Witness variance of the split single-APD measurement: K runs on q0,
/// N-K runs on p0.
inline double split_variance(double lambda, double p0, double q0,
                             std::int64_t N, std::int64_t K) {
    if (!(K > 0 && K < N)) throw invalid_input("split K must satisfy 0 < K < N");
    return q0 * (1.0 - q0) / double(K) +
           lambda * lambda * p0 * (1.0 - p0) / double(N - K);
}

namespace detail {

/// Per-run runs-required figure N(V) = var_per_run / (W - W_G)^2 for one
/// scheme, minimized over the V-parameterized witness family.
inline std::pair<double, double> minimize_runs(const VacuumPair& pair,
                                               Scheme scheme) {
    auto runs_at = [&](double V) {
        const BoundaryPoint bp = boundary_point(V, pair.T);
        const double gap = (pair.q0 - bp.lambda * pair.p0) - bp.W_G;
        if (gap <= 0.0) return std::numeric_limits<double>::infinity();
        const double var =
            witness_variance_per_run(scheme, bp.lambda, pair.p0, pair.q0);
        const double r = var / (gap * gap);
        // lambda overflow at strongly squeezed V: never the optimum.
        if (!std::isfinite(r)) return std::numeric_limits<double>::infinity();
        return r;
    };
    double best_V = 1.0, best = runs_at(1.0);
    const int n_scan = 2048;
    for (int i = 0; i < n_scan; ++i) {
        const double V = std::pow(10.0, -4.0 + 4.0 * double(i) / (n_scan - 1));
        const double r = runs_at(V);
        if (r < best) {
            best = r;
            best_V = V;
        }
    }
    const double lo = std::max(1e-4, best_V / 1.05);
    const double hi = std::min(1.0, best_V * 1.05);
    const double V = golden_max([&](double v) { return -runs_at(v); }, lo, hi);
    const double r = runs_at(V);
    if (r < best) {
        best = r;
        best_V = V;
    }
    return {best, boundary_point(best_V, pair.T).lambda};
}

}  // namespace detail

/// Computes the required run counts for both schemes, or nullopt when the
/// pair is not certifiable (no finite plan exists).
inline std::optional<PlanResult> required_runs(const VacuumPair& pair) {
    const auto [n_s, lambda_s] =
        detail::minimize_runs(pair, Scheme::single_apd);
    if (!std::isfinite(n_s)) return std::nullopt;
    const auto [n_d, lambda_d] =
        detail::minimize_runs(pair, Scheme::double_apd);
    PlanResult plan;
    plan.N_S = n_s;
    plan.N_D = n_d;
    plan.lambda_S = lambda_s;
    plan.lambda_D = lambda_d;
    plan.R_DS = n_d / n_s;
    plan.R_DS_min = rds_min(pair.p0, pair.q0);
    plan.lambda0 = (pair.p0 < 1.0 && pair.q0 < 1.0)
                       ? lambda0_optimal(pair.p0, pair.q0)
                       : std::numeric_limits<double>::infinity();
    plan.K_opt_fraction =
        std::isfinite(plan.lambda0)
            ? plan.lambda0 / (lambda_s + plan.lambda0)
            : 1.0;
    return plan;
}

}  // namespace qng
