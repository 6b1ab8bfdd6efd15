#include <catch2/catch_amalgamated.hpp>
#include <cmath>

#include "oracles.hpp"
#include "qng/photon_stats.hpp"
#include "qng/state_models.hpp"

using namespace qng;

TEST_CASE("noisy single photon vacuum pair closed form") {
    {
        const auto [p0, q0] = noisy_single_photon_vacuum_pair({0.5, 0.0}, 0.5);
        CHECK(p0 == Catch::Approx(0.5).margin(1e-15));
        CHECK(q0 == Catch::Approx(0.75).margin(1e-15));
    }
    {
        const auto [p0, q0] = noisy_single_photon_vacuum_pair({0.0, 0.5}, 0.5);
        CHECK(p0 == Catch::Approx(std::exp(-0.5)).margin(1e-15));
        CHECK(q0 == Catch::Approx(std::exp(-0.25)).margin(1e-15));
    }
    {
        const auto [p0, q0] =
            noisy_single_photon_vacuum_pair({0.1, 0.01}, 0.5);
        CHECK(p0 == Catch::Approx(0.9 * std::exp(-0.01)).margin(1e-15));
        CHECK(q0 == Catch::Approx(0.95 * std::exp(-0.005)).margin(1e-15));
    }
    CHECK_THROWS_AS(noisy_single_photon_vacuum_pair({1.5, 0.0}, 0.5),
                    invalid_input);
    CHECK_THROWS_AS(noisy_single_photon_vacuum_pair({0.5, -0.1}, 0.5),
                    invalid_input);
}

TEST_CASE("noisy single photon distribution") {
    {
        const auto d = noisy_single_photon_distribution({1.0, 0.0});
        CHECK(d.probs[0] == 0.0);
        CHECK(d.probs[1] == 1.0);
    }
    {
        const auto d = noisy_single_photon_distribution({0.5, 0.0});
        CHECK(d.probs[0] == 0.5);
        CHECK(d.probs[1] == 0.5);
    }
    CHECK(mean_photon(noisy_single_photon_distribution({0.2, 0.3})) ==
          Catch::Approx(0.5).margin(1e-10));
}

TEST_CASE("closed-form pair agrees with the photon_stats pipeline") {
    qng_test::TestRng rng(5);
    for (int trial = 0; trial < 100; ++trial) {
        const NoisySinglePhotonModel m{rng.uniform(), rng.uniform(0.0, 1.5)};
        const double T = rng.uniform(0.05, 0.95);
        const auto [p0, q0] = noisy_single_photon_vacuum_pair(m, T);
        const auto dist = noisy_single_photon_distribution(m);
        CHECK(dist.p0() == Catch::Approx(p0).margin(1e-10));
        CHECK(vacuum_after_loss(dist, T) == Catch::Approx(q0).margin(1e-10));
    }
}

TEST_CASE("eta_threshold behaviour") {
    // nbar = 0: any eta > 0 mixture is certified; the margin scales as
    // eta^3 near zero, so the bisected root only resolves to ~1e-5
    const auto th0 = eta_threshold(0.0, 0.5);
    REQUIRE(th0.has_value());
    CHECK(*th0 < 1e-4);

    // Taylor-regime asymptotic eta_th^2 ~ 3 nbar / (2(2-T))
    const double nbar = 1e-6, T = 0.5;
    const auto th = eta_threshold(nbar, T);
    REQUIRE(th.has_value());
    CHECK(*th == Catch::Approx(std::sqrt(3.0 * nbar / (2.0 * (2.0 - T))))
                     .epsilon(0.1));

    // criteria are most powerful for small T on this model
    const auto lo = eta_threshold(1e-2, 0.25);
    const auto hi = eta_threshold(1e-2, 0.75);
    REQUIRE(lo.has_value());
    REQUIRE(hi.has_value());
    CHECK(*lo < *hi);
}

TEST_CASE("eta_threshold asymptotic ratio across nbar") {
    for (double nbar : {1e-7, 1e-6}) {
        for (double T : {0.25, 0.5, 0.75}) {
            const auto th = eta_threshold(nbar, T);
            REQUIRE(th.has_value());
            const double ratio =
                (*th) * (*th) / (3.0 * nbar / (2.0 * (2.0 - T)));
            CHECK(ratio == Catch::Approx(1.0).epsilon(0.1));
        }
    }
}

TEST_CASE("squeezed coherent Fock expansion is a valid distribution") {
    const auto d = squeezed_coherent_distribution({0.4, 0.8, 0.3});
    validate(d);
    CHECK(d.tail_bound <= 1e-12);
    // squeezed vacuum has no odd components
    const auto sv = squeezed_coherent_distribution({0.5, 0.0, 0.0});
    for (std::size_t n = 1; n < sv.probs.size(); n += 2)
        CHECK(sv.probs[n] == Catch::Approx(0.0).margin(1e-16));
    // known squeezed-vacuum two-photon weight: p2 = (1/2) tanh^2 r sech r
    const double r = -0.5 * std::log(0.5);
    const double p2_expected = 0.5 * std::pow(std::tanh(r), 2) / std::cosh(r);
    CHECK(sv.probs[2] == Catch::Approx(p2_expected).margin(1e-10));
}

TEST_CASE("multimode product: extra vacuum modes change nothing") {
    const NoisySinglePhotonModel m{0.3, 0.05};
    const auto base = noisy_single_photon_distribution(m);
    MultimodeProductState multi{{base}};
    for (int k = 0; k < 3; ++k) {
        multi.modes.push_back({{1.0}, 0.0});  // vacuum mode
        CHECK(multi.p0() == Catch::Approx(base.p0()).margin(1e-14));
        CHECK(multi.q0(0.5) ==
              Catch::Approx(vacuum_after_loss(base, 0.5)).margin(1e-14));
    }
}

TEST_CASE("fock_mixture validates its input") {
    CHECK_THROWS_AS(fock_mixture({0.5, 0.6}), invalid_distribution);
    const auto d = fock_mixture({0.25, 0.75});
    CHECK(d.p0() == 0.25);
}
