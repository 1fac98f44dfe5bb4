#include "reingame/simulate.hpp"

#include "reingame/io.hpp"
#include "reingame/regions.hpp"

#include "helpers.hpp"

#include <doctest.h>
#include <nlohmann/json.hpp>

#include <cmath>
#include <random>

using namespace reingame;
using testing_support::baseline_params;

TEST_CASE("deterministic limit reproduces the lump objective exactly") {
    GameParameters p = baseline_params();
    p.insurer.volatility = 1e-12;
    p.reinsurer.volatility = 1e-12;
    const auto premium = PremiumPath::sampled(1.0, 501, [](double) { return 0.45; });
    const GameState st{1.0, 0.0, 0.2, 0.5};
    const McConfig mc{16, 32, 99};
    const auto sim = simulate(st, premium, p, mc);

    REQUIRE(sim.purchase_time_used.finite());
    GameParameters noiseless = p;
    noiseless.insurer.volatility = 1e-12;
    const double expected =
        insurer_lump_objective(st, sim.purchase_time_used.time(), premium, p.insurer, p.horizon) -
        p.insurer.variance_weight * p.insurer.volatility * p.insurer.volatility /
            (2.0 * p.insurer.reversion) * (1.0 - std::exp(-2.0 * p.insurer.reversion));
    CHECK(sim.j_insurer.mean == doctest::Approx(expected).epsilon(1e-10));
    CHECK(sim.var_XT.mean == doctest::Approx(0.0).epsilon(1e-18));

    const double cost = reinsurer_cost(0.0, st.coverage, st.reinsurer_exposure,
                                       sim.purchase_time_used, p);
    CHECK(sim.j_reinsurer.mean == doctest::Approx(cost).epsilon(1e-10));
}

TEST_CASE("objective estimate is assembled from its parts") {
    const auto p = baseline_params();
    const auto premium = PremiumPath::constant(1.0, 0.45);
    const GameState st{1.0, 0.0, 0.0, 0.0};
    const McConfig mc{5000, 16, 7};
    const auto sim = simulate(st, premium, p, mc);
    CHECK(sim.j_insurer.mean ==
          sim.mean_XT.mean + p.insurer.variance_weight * sim.var_XT.mean +
              p.insurer.premium_weight * sim.premium_cost.mean);
}

TEST_CASE("ceiling start matches the uncontrolled mean") {
    GameParameters p = baseline_params();
    const auto premium = PremiumPath::constant(1.0, 0.1);
    const GameState st{2.0, 0.0, 1.0, 0.0};  // nothing left to buy
    const McConfig mc{40000, 32, 2024};
    const auto sim = simulate(st, premium, p, mc);
    const double b = p.insurer.reversion;
    const double ou_mean = 2.0 * std::exp(-b) + p.insurer.drift_level / b * (1.0 - std::exp(-b));
    CHECK(std::abs(sim.mean_XT.mean - ou_mean) <= 3.0 * sim.mean_XT.std_error);
    CHECK(sim.premium_cost.mean == 0.0);
}

TEST_CASE("estimates agree with closed forms under an equilibrium premium") {
    std::mt19937_64 rng(61);
    const auto draw = testing_support::sample_region(Region::III, rng);
    const auto params = validate(draw.params);
    const double T = params.horizon.terminal_time;
    const auto label = classify(draw.coords, params.reinsurer.reversion, T);
    const auto laws = equilibrium_law(label, draw.coords, params.reinsurer.reversion, T);
    const auto premium = generate_premium(laws.laws.front(), params.insurer, params.horizon, 0.1);
    const GameState st{1.0, 0.0, 0.1, 0.8};
    const McConfig mc{30000, 32, 5};
    const auto sim = simulate(st, premium, params, mc, 2);

    const double value = insurer_value(st, premium, params.insurer, params.horizon);
    const double mean_exposure =
        expected_terminal_exposure(st, premium, params.insurer, params.horizon);
    const double cost = reinsurer_cost(0.0, st.coverage, st.reinsurer_exposure,
                                       sim.purchase_time_used, params);
    CHECK(std::abs(sim.j_insurer.mean - value) <= 3.0 * sim.j_insurer.std_error);
    CHECK(std::abs(sim.mean_XT.mean - mean_exposure) <= 3.0 * sim.mean_XT.std_error);
    CHECK(std::abs(sim.j_reinsurer.mean - cost) <= 3.0 * sim.j_reinsurer.std_error);
}

TEST_CASE("reports are bit-identical across seeds and thread counts") {
    const auto p = baseline_params();
    const auto premium = PremiumPath::constant(1.0, 0.45);
    const GameState st{1.0, 0.0, 0.0, 0.0};
    const McConfig mc{20000, 16, 31337};
    const auto one = simulate(st, premium, p, mc, 1);
    const auto four = simulate(st, premium, p, mc, 4);
    const auto again = simulate(st, premium, p, mc, 1);
    CHECK(objectives_to_json(one).dump() == objectives_to_json(four).dump());
    CHECK(objectives_to_json(one).dump() == objectives_to_json(again).dump());

    const McConfig other{20000, 16, 31338};
    const auto reseeded = simulate(st, premium, p, other, 1);
    CHECK(objectives_to_json(one).dump() != objectives_to_json(reseeded).dump());
}

TEST_CASE("single path runs are reproducible") {
    const auto p = baseline_params();
    const auto premium = PremiumPath::constant(1.0, 0.45);
    const GameState st{1.0, 0.0, 0.0, 0.0};
    const McConfig mc{1, 8, 12};
    const auto a = simulate(st, premium, p, mc);
    const auto b = simulate(st, premium, p, mc);
    CHECK(a.mean_XT.mean == b.mean_XT.mean);
    CHECK(a.var_XT.mean == 0.0);
    CHECK(a.var_XT.std_error == 0.0);
}

TEST_CASE("variance profile is flat in the purchase time") {
    GameParameters p = baseline_params();
    const GameState st{1.0, 0.0, 0.2, 0.0};
    const McConfig mc{30000, 32, 17};
    const auto estimates = variance_profile(st, {0.0, 0.5, 1.0}, p, mc);
    REQUIRE(estimates.size() == 3);
    const double analytic = p.insurer.volatility * p.insurer.volatility /
                            (2.0 * p.insurer.reversion) *
                            (1.0 - std::exp(-2.0 * p.insurer.reversion));
    for (const auto& e : estimates) {
        CHECK(std::abs(e.mean - analytic) <= 3.0 * e.std_error);
    }
    for (std::size_t i = 0; i + 1 < estimates.size(); ++i) {
        const double joint =
            std::sqrt(std::pow(estimates[i].std_error, 2) + std::pow(estimates[i + 1].std_error, 2));
        CHECK(std::abs(estimates[i].mean - estimates[i + 1].mean) <= 3.0 * joint + 1e-12);
    }

    GameParameters quiet = p;
    quiet.insurer.volatility = 1e-300;
    const auto flat = variance_profile(st, {0.25}, quiet, McConfig{64, 8, 9});
    REQUIRE(flat.size() == 1);
    CHECK(flat[0].mean == doctest::Approx(0.0).epsilon(1e-18));

    CHECK_THROWS_AS(variance_profile(st, {1.5}, p, mc), std::domain_error);
}

TEST_CASE("strategy generation follows the crossing") {
    const auto p = baseline_params();
    const double T = p.horizon.terminal_time;

    // ceiling start: nothing to schedule
    {
        const auto premium = PremiumPath::constant(T, 0.0);
        const auto law = insurer_law(premium, p.insurer, p.horizon);
        const auto schedule =
            generate_strategy(GameState{1.0, 0.0, 1.0, 0.0}, law, premium, p.insurer, p.horizon);
        CHECK(schedule.purchases.empty());
    }
    // immediate jump at the start
    {
        const auto premium = PremiumPath::constant(T, 0.0);
        const auto law = insurer_law(premium, p.insurer, p.horizon);
        const auto schedule =
            generate_strategy(GameState{1.0, 0.4, 0.25, 0.0}, law, premium, p.insurer, p.horizon);
        REQUIRE(schedule.purchases.size() == 1);
        CHECK(schedule.purchases[0].first == 0.4);
        CHECK(schedule.purchases[0].second == doctest::Approx(0.75).epsilon(1e-14));
    }
    // terminal-only regime buys exactly at T
    {
        const auto premium =
            generate_premium(ReinsuranceLaw::terminal_only(T), p.insurer, p.horizon, 0.1);
        const auto law = insurer_law(premium, p.insurer, p.horizon);
        const auto schedule =
            generate_strategy(GameState{1.0, 0.0, 0.0, 0.0}, law, premium, p.insurer, p.horizon);
        REQUIRE(schedule.purchases.size() == 1);
        CHECK(schedule.purchases[0].first == T);
    }
    // inconsistent law is rejected
    {
        const auto premium = PremiumPath::constant(T, 0.0);  // crossing at t
        const auto wrong = ReinsuranceLaw::no_purchase(T);
        CHECK_THROWS_AS(
            generate_strategy(GameState{1.0, 0.0, 0.0, 0.0}, wrong, premium, p.insurer, p.horizon),
            std::invalid_argument);
    }
}

TEST_CASE("time grid construction") {
    const auto grid = build_time_grid(0.2, 1.0, 4, {0.33, 0.2, 1.0});
    CHECK(grid.front() == 0.2);
    CHECK(grid.back() == 1.0);
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) CHECK(grid[i] < grid[i + 1]);
    CHECK(std::find(grid.begin(), grid.end(), 0.33) != grid.end());

    const OuParams ou{0.05, 0.1, 0.3};
    CHECK_THROWS_AS(sample_terminal(1.0, ou, grid, {{0.5, -1.0}}, 4, 1, 0, 1),
                    std::invalid_argument);
}
