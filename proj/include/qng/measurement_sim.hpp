#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <thread>
#include <vector>

#include "qng/errors.hpp"
#include "qng/photon_stats.hpp"
#include "qng/random.hpp"

namespace qng {

/// Double-APD layout of Fig-1b type: beam splitter of transmittance T with
/// detectors of efficiency eta_A (transmitted arm) and eta_B (reflected arm).
struct DetectorConfig {
    double T;
    double eta_A = 1.0;
    double eta_B = 1.0;

    double effective_T() const {
        return eta_A * T / (eta_A * T + eta_B * (1.0 - T));
    }
};

/// Outcome counts of the three mutually exclusive double-APD events.
struct ClickTally {
    std::int64_t n_none = 0;    ///< no detector clicked
    std::int64_t n_b_only = 0;  ///< only APD_B clicked
    std::int64_t n_a = 0;       ///< APD_A clicked, irrespective of B
    std::int64_t N = 0;
    std::uint64_t seed = 0;
};

/// Counts of no-click runs in the sequential single-APD measurement:
/// K runs at channel setting T (estimating q0) and N-K runs at T=1
/// (estimating p0).
struct SingleTally {
    std::int64_t k0_full = 0;  ///< no-clicks among the K runs at T
    std::int64_t k0_open = 0;  ///< no-clicks among the N-K runs at T=1
    std::int64_t N = 0;
    std::int64_t K = 0;
    std::uint64_t seed = 0;
};

namespace detail {

inline void check_config(const DetectorConfig& cfg) {
    if (!(cfg.T > 0.0 && cfg.T < 1.0))
        throw invalid_input("transmittance T must lie in (0,1)");
    if (!(cfg.eta_A > 0.0 && cfg.eta_A <= 1.0) ||
        !(cfg.eta_B > 0.0 && cfg.eta_B <= 1.0))
        throw invalid_input("detector efficiencies must lie in (0,1]");
}

/// Fixed trial-block size; substreams are keyed by block index, so results
/// do not depend on how blocks are distributed over shards.
inline constexpr std::int64_t kTrialsPerBlock = 1 << 20;

template <class BlockFn>
inline void run_blocks(std::int64_t n_trials, int shards, BlockFn&& fn) {
    if (shards < 1) throw invalid_input("shard count must be >= 1");
    const std::int64_t n_blocks =
        (n_trials + kTrialsPerBlock - 1) / kTrialsPerBlock;
    auto worker = [&](int shard) {
        for (std::int64_t b = shard; b < n_blocks; b += shards) {
            const std::int64_t lo = b * kTrialsPerBlock;
            const std::int64_t count =
                std::min(kTrialsPerBlock, n_trials - lo);
            fn(b, count);
        }
    };
    if (shards == 1 || n_blocks <= 1) {
        worker(0);
        return;
    }
    std::vector<std::thread> threads;
    for (int s = 0; s < shards; ++s) threads.emplace_back(worker, s);
    for (auto& t : threads) t.join();
}

}  // namespace detail

/// Probabilities of the three double-APD events (no click, B only, A clicks)
/// including detector efficiencies: a photon is seen by A with probability
/// eta_A*T and by B with probability eta_B*(1-T).
inline std::array<double, 3> event_probabilities(
    const PhotonNumberDistribution& dist, const DetectorConfig& cfg) {
    validate(dist);
    detail::check_config(cfg);
    const double miss_all = 1.0 - cfg.eta_A * cfg.T - cfg.eta_B * (1.0 - cfg.T);
    const double miss_a = 1.0 - cfg.eta_A * cfg.T;
    double p_none = 0.0, p_not_a = 0.0;
    double w_all = 1.0, w_a = 1.0;
    for (double p : dist.probs) {
        p_none += p * w_all;
        p_not_a += p * w_a;
        w_all *= miss_all;
        w_a *= miss_a;
    }
    const double p_a = 1.0 - p_not_a;
    return {p_none, 1.0 - p_none - p_a, p_a};
}

/// Multinomial Monte Carlo of the double-APD scheme. Deterministic in
/// (seed); the shard count only distributes fixed trial blocks over threads.
inline ClickTally simulate_double(const PhotonNumberDistribution& dist,
                                  const DetectorConfig& cfg, std::int64_t N,
                                  std::uint64_t seed, int shards = 1) {
    if (N < 1) throw invalid_input("N must be >= 1");
    const auto probs = event_probabilities(dist, cfg);
    const std::vector<double> p{probs[0], probs[1], probs[2]};
    std::vector<std::array<std::int64_t, 3>> block_counts(
        std::size_t((N + detail::kTrialsPerBlock - 1) /
                    detail::kTrialsPerBlock));
    detail::run_blocks(N, shards, [&](std::int64_t block, std::int64_t count) {
        CounterRng rng(seed, std::uint64_t(block));
        const auto c = sample_multinomial(count, p, rng);
        block_counts[std::size_t(block)] = {c[0], c[1], c[2]};
    });
    ClickTally tally;
    tally.N = N;
    tally.seed = seed;
    for (const auto& c : block_counts) {
        tally.n_none += c[0];
        tally.n_b_only += c[1];
        tally.n_a += c[2];
    }
    return tally;
}

/// Sequential single-APD Monte Carlo: K runs at transmittance T, N-K runs
/// with the channel fully open; detector efficiency eta applies to both.
inline SingleTally simulate_single(const PhotonNumberDistribution& dist,
                                   double T, double eta, std::int64_t N,
                                   std::int64_t K, std::uint64_t seed,
                                   int shards = 1) {
    validate(dist);
    if (!(T > 0.0 && T < 1.0))
        throw invalid_input("transmittance T must lie in (0,1)");
    if (!(eta > 0.0 && eta <= 1.0))
        throw invalid_input("detector efficiency must lie in (0,1]");
    if (!(K > 0 && K < N)) throw invalid_input("split K must satisfy 0 < K < N");
    const PhotonNumberDistribution seen = attenuate(dist, eta);
    const double q0_eff = vacuum_after_loss(seen, T);
    const double p0_eff = seen.p0();

    SingleTally tally;
    tally.N = N;
    tally.K = K;
    tally.seed = seed;
    std::vector<std::int64_t> full_blocks(
        std::size_t((K + detail::kTrialsPerBlock - 1) /
                    detail::kTrialsPerBlock));
    detail::run_blocks(K, shards, [&](std::int64_t block, std::int64_t count) {
        CounterRng rng(seed, std::uint64_t(block));
        full_blocks[std::size_t(block)] = sample_binomial(count, q0_eff, rng);
    });
    std::vector<std::int64_t> open_blocks(
        std::size_t((N - K + detail::kTrialsPerBlock - 1) /
                    detail::kTrialsPerBlock));
    detail::run_blocks(N - K, shards,
                       [&](std::int64_t block, std::int64_t count) {
                           // disjoint substream range for the open setting
                           CounterRng rng(seed, (1ULL << 32) +
                                                    std::uint64_t(block));
                           open_blocks[std::size_t(block)] =
                               sample_binomial(count, p0_eff, rng);
                       });
    for (auto c : full_blocks) tally.k0_full += c;
    for (auto c : open_blocks) tally.k0_open += c;
    return tally;
}

struct WitnessEstimate {
    double W_hat;
    double var_hat;
    bool var_defined = true;  ///< false for zero-count degenerate inputs
};

/// Plug-in witness estimate from a double-APD tally; the variance carries
/// the multinomial covariance term -2*lambda*p0(1-q0)/N.
inline WitnessEstimate estimate_witness(const ClickTally& tally,
                                        double lambda) {
    if (tally.N <= 0) throw invalid_input("empty tally");
    if (tally.n_none + tally.n_b_only + tally.n_a != tally.N)
        throw invalid_input("tally counts do not sum to N");
    const double p0 = double(tally.n_none) / double(tally.N);
    const double q0 = 1.0 - double(tally.n_a) / double(tally.N);
    WitnessEstimate est;
    est.W_hat = q0 - lambda * p0;
    est.var_hat = (q0 * (1.0 - q0) + lambda * lambda * p0 * (1.0 - p0) -
                   2.0 * lambda * p0 * (1.0 - q0)) /
                  double(tally.N);
    est.var_defined = est.var_hat > 0.0;
    return est;
}

/// Plug-in witness estimate from the sequential single-APD counts.
inline WitnessEstimate estimate_witness(const SingleTally& tally,
                                        double lambda) {
    if (!(tally.K > 0 && tally.K < tally.N))
        throw invalid_input("invalid single-APD split");
    const double q0 = double(tally.k0_full) / double(tally.K);
    const double p0 = double(tally.k0_open) / double(tally.N - tally.K);
    WitnessEstimate est;
    est.W_hat = q0 - lambda * p0;
    est.var_hat = q0 * (1.0 - q0) / double(tally.K) +
                  lambda * lambda * p0 * (1.0 - p0) /
                      double(tally.N - tally.K);
    est.var_defined = est.var_hat > 0.0;
    return est;
}

}  // namespace qng
