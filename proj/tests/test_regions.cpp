#include "reingame/regions.hpp"

#include "reingame/closedform.hpp"

#include "helpers.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace reingame;
using testing_support::baseline_params;
using testing_support::sample_region;
using testing_support::uniform;

TEST_CASE("preference coordinates") {
    GameParameters p = baseline_params();
    p.insurer.premium_weight = 2.0;
    p.reinsurer.premium_weight = 1.0;
    p.insurer.reversion = 0.1;
    p.insurer.discount = 0.05;
    p.reinsurer.reversion = 0.2;
    p.reinsurer.discount = 0.05;
    const auto c = coordinates(p);
    CHECK(c.r == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(c.d == doctest::Approx(-0.1).epsilon(1e-14));

    GameParameters sym = p;
    sym.insurer.premium_weight = sym.reinsurer.premium_weight = 1.5;
    sym.insurer.reversion = 0.2;
    sym.insurer.discount = 0.05;
    const auto cs = coordinates(sym);
    CHECK(cs.r == 1.0);
    CHECK(cs.d == 0.0);

    // joint scaling of the premium weights leaves the coordinates unchanged
    GameParameters scaled = p;
    scaled.insurer.premium_weight *= 3.0;
    scaled.reinsurer.premium_weight *= 3.0;
    CHECK(coordinates(scaled).r == doctest::Approx(c.r).epsilon(1e-14));
    CHECK(coordinates(scaled).d == c.d);

    // joint discount shifts cancel too
    GameParameters shifted = p;
    shifted.insurer.discount += 0.37;
    shifted.reinsurer.discount += 0.37;
    CHECK(coordinates(shifted).d == doctest::Approx(c.d).epsilon(1e-12));
}

TEST_CASE("classification of the worked examples") {
    CHECK(classify({1.0, 0.0}, 0.2, 1.0).region == Region::VII);
    CHECK(classify({1.0, 0.0}, 0.2, 1.0).kind == RegionKind::Point);

    CHECK(classify({2.0, -0.1}, 0.2, 1.0).region == Region::I);
    CHECK(classify({2.0, -0.1}, 0.2, 1.0).kind == RegionKind::Area);

    CHECK(classify({1.05, -0.1}, 0.2, 20.0).region == Region::VIII);

    CHECK(classify({1.0, 0.4}, 0.2, 1.0).region == Region::VI);
    CHECK(classify({1.0, 0.4}, 0.2, 1.0).kind == RegionKind::Line);
}

TEST_CASE("near-boundary coordinates trigger the tie report") {
    CHECK_THROWS_AS(classify({1.0 + 1e-13, 0.5}, 0.2, 1.0), BoundaryTie);
    CHECK_NOTHROW(classify({1.0, 0.5}, 0.2, 1.0));  // exactly on the line is well-defined
}

TEST_CASE("the eight regions partition the half plane") {
    std::mt19937_64 rng(41);
    const Region all[] = {Region::I,  Region::II,  Region::III, Region::IV,
                          Region::V,  Region::VI,  Region::VII, Region::VIII};
    for (int trial = 0; trial < 20000; ++trial) {
        const PreferenceCoordinates c{uniform(rng, 0.01, 5.0), uniform(rng, -2.0, 2.0)};
        const double b_r = uniform(rng, 0.05, 1.0);
        const double T = uniform(rng, 0.1, 3.0);
        int matches = 0;
        for (Region reg : all) {
            if (region_matches(reg, c, b_r, T)) ++matches;
        }
        CHECK(matches == 1);
    }
}

TEST_CASE("the long-horizon pocket is absent for short horizons") {
    std::mt19937_64 rng(43);
    for (int trial = 0; trial < 5000; ++trial) {
        const double b_r = uniform(rng, 0.05, 1.0);
        const double T = uniform(rng, 0.05, 1.0) / b_r;  // T <= 1/b_R
        const PreferenceCoordinates c{uniform(rng, 0.01, 5.0), uniform(rng, -2.0, 2.0)};
        CHECK(!region_matches(Region::VIII, c, b_r, T));
    }
}

TEST_CASE("classification is invariant under the stated reparameterizations") {
    std::mt19937_64 rng(47);
    for (int trial = 0; trial < 200; ++trial) {
        Region want = static_cast<Region>(trial % 5);  // area regions I..V
        const auto draw = sample_region(want, rng);
        const auto base = coordinates(draw.params);

        GameParameters scaled = draw.params;
        const double factor = uniform(rng, 0.2, 5.0);
        scaled.insurer.premium_weight *= factor;
        scaled.reinsurer.premium_weight *= factor;
        GameParameters shifted = draw.params;
        const double shift = uniform(rng, -0.5, 0.5);
        shifted.insurer.discount += shift;
        shifted.reinsurer.discount += shift;

        const double T = draw.params.horizon.terminal_time;
        const double b_r = draw.params.reinsurer.reversion;
        const auto a = classify(base, b_r, T);
        CHECK(classify(coordinates(scaled), b_r, T).region == a.region);
        CHECK(classify(coordinates(shifted), b_r, T).region == a.region);
        CHECK(a.region == want);
    }
}

TEST_CASE("equilibrium laws match the regime table") {
    // full-horizon sale
    {
        const auto laws = equilibrium_law({Region::III, RegionKind::Area}, {0.5, -0.5}, 0.2, 1.0);
        REQUIRE(laws.laws.size() == 1);
        REQUIRE(laws.laws[0].intervals().size() == 1);
        CHECK(laws.laws[0].intervals()[0].start == 0.0);
        CHECK(laws.laws[0].intervals()[0].end == 1.0);
    }
    // terminal-only sale
    {
        const auto laws = equilibrium_law({Region::V, RegionKind::Area}, {0.5, 0.5}, 0.2, 1.0);
        REQUIRE(laws.laws.size() == 1);
        CHECK(laws.laws[0].intervals()[0].is_point());
        CHECK(laws.laws[0].intervals()[0].start == 1.0);
    }
    // no sale
    {
        const auto laws = equilibrium_law({Region::I, RegionKind::Area}, {2.0, -0.1}, 0.2, 1.0);
        REQUIRE(laws.laws.size() == 1);
        CHECK(laws.laws[0].empty());
    }
    // boundary regime offers both neighbors' laws
    {
        const auto laws = equilibrium_law({Region::VI, RegionKind::Line}, {1.0, 0.4}, 0.2, 1.0);
        CHECK(laws.laws.size() == 2);
        CHECK(!laws.any_division);
    }
    // indifference point: canonical default plus the anything-goes flag
    {
        const auto laws = equilibrium_law({Region::VII, RegionKind::Point}, {1.0, 0.0}, 0.2, 1.0);
        CHECK(laws.any_division);
        REQUIRE(laws.laws.size() == 1);
        CHECK(laws.laws[0].intervals()[0].is_point());
    }
    // interior selling window of the long-horizon pocket
    {
        const PreferenceCoordinates c{1.05, -0.1};
        const auto laws = equilibrium_law({Region::VIII, RegionKind::Area}, c, 0.2, 20.0);
        REQUIRE(laws.laws.size() == 1);
        const auto& iv = laws.laws[0].intervals()[0];
        CHECK(iv.start == doctest::Approx(20.0 - 10.0 * std::log(2.1)).epsilon(1e-12));
        CHECK(iv.end == doctest::Approx(20.0 - 10.0 * std::log(1.05)).epsilon(1e-12));
        CHECK(iv.start == doctest::Approx(12.5806).epsilon(1e-4));
        CHECK(iv.end == doctest::Approx(19.5121).epsilon(1e-4));
    }
}

TEST_CASE("window endpoints stay inside the horizon") {
    std::mt19937_64 rng(53);
    for (auto region : {Region::II, Region::IV, Region::VIII}) {
        for (int trial = 0; trial < 100; ++trial) {
            const auto draw = sample_region(region, rng);
            const double T = draw.params.horizon.terminal_time;
            const double b_r = draw.params.reinsurer.reversion;
            const auto label = classify(draw.coords, b_r, T);
            REQUIRE(label.region == region);
            const auto laws = equilibrium_law(label, draw.coords, b_r, T);
            for (const auto& iv : laws.laws[0].intervals()) {
                CHECK(iv.start >= 0.0);
                CHECK(iv.end <= T);
                CHECK(iv.start <= iv.end);
            }
        }
    }
}

TEST_CASE("generated premium rides the threshold on the purchasing region") {
    const auto p = baseline_params();
    const double T = p.horizon.terminal_time;

    const auto full = generate_premium(ReinsuranceLaw::full_horizon(T), p.insurer, p.horizon, 0.1);
    for (std::size_t i = 0; i < full.grid().size(); ++i) {
        CHECK(full.values()[i] ==
              doctest::Approx(purchase_threshold(full.grid()[i], p.insurer, p.horizon))
                  .epsilon(1e-14));
    }

    const auto never = generate_premium(ReinsuranceLaw::no_purchase(T), p.insurer, p.horizon, 0.1);
    for (std::size_t i = 0; i < never.grid().size(); ++i) {
        CHECK(never.values()[i] ==
              doctest::Approx(1.1 * purchase_threshold(never.grid()[i], p.insurer, p.horizon))
                  .epsilon(1e-14));
    }
    CHECK(!purchase_time(0.0, never, p.insurer, p.horizon).finite());

    const auto terminal =
        generate_premium(ReinsuranceLaw::terminal_only(T), p.insurer, p.horizon, 0.1);
    CHECK(terminal.values().back() ==
          doctest::Approx(1.0 / p.insurer.premium_weight).epsilon(1e-14));
    const auto crossing = purchase_time(0.0, terminal, p.insurer, p.horizon);
    REQUIRE(crossing.finite());
    CHECK(crossing.time() == T);

    CHECK_THROWS_AS(generate_premium(ReinsuranceLaw::full_horizon(T), p.insurer, p.horizon, 0.0),
                    std::invalid_argument);
    CHECK_THROWS_AS(
        generate_premium(ReinsuranceLaw({LawInterval{0.4, 0.4, true, true}}, T), p.insurer,
                         p.horizon, 0.1),
        std::invalid_argument);
}

TEST_CASE("insurer law from plain premiums") {
    const auto p = baseline_params();
    const auto zero = PremiumPath::constant(1.0, 0.0);
    const auto all = insurer_law(zero, p.insurer, p.horizon);
    REQUIRE(all.intervals().size() == 1);
    CHECK(all.intervals()[0].start == 0.0);
    CHECK(all.intervals()[0].end == 1.0);

    const auto high = PremiumPath::constant(1.0, 0.75);  // above 1/theta = 0.5
    CHECK(insurer_law(high, p.insurer, p.horizon).empty());

    // one interior crossing
    const auto premium = PremiumPath::sampled(1.0, 2001, [](double) { return 0.45; });
    const auto law = insurer_law(premium, p.insurer, p.horizon);
    REQUIRE(law.intervals().size() == 1);
    CHECK(law.intervals()[0].start == doctest::Approx(0.29760).epsilon(1e-4));
    CHECK(law.intervals()[0].end == 1.0);
}

TEST_CASE("equilibrium law round trip through the premium") {
    std::mt19937_64 rng(59);
    for (auto region : {Region::I, Region::II, Region::III, Region::IV, Region::V, Region::VIII}) {
        for (int trial = 0; trial < 25; ++trial) {
            const auto draw = sample_region(region, rng);
            const auto params = validate(draw.params);
            const double T = params.horizon.terminal_time;
            const auto label = classify(draw.coords, params.reinsurer.reversion, T);
            const auto laws = equilibrium_law(label, draw.coords, params.reinsurer.reversion, T);
            const auto premium =
                generate_premium(laws.laws.front(), params.insurer, params.horizon, 0.1);
            const auto recovered = insurer_law(premium, params.insurer, params.horizon);
            CHECK(recovered.approx_equal(laws.laws.front(), 1e-9 * T));
        }
    }
}

TEST_CASE("boundary curves") {
    // odd sample count over a symmetric range puts d = 0 on the grid
    const auto samples = boundary_curves(0.5, 1.0, -1.0, 1.0, 41);
    int through_unit = 0;
    for (const auto& s : samples) {
        CHECK(s.r >= 0.0);
        if (s.d == 0.0 && s.curve != "d_axis") {
            CHECK(s.r == doctest::Approx(1.0).epsilon(1e-12));
            ++through_unit;
        }
    }
    CHECK(through_unit == 4);

    // the affine boundary hits zero at d = -b_R
    const auto hit = boundary_curves(0.5, 1.0, -1.0, 0.0, 3);
    bool found_zero = false;
    for (const auto& s : hit) {
        if (s.curve == "r_affine" && s.d == -0.5) {
            CHECK(s.r == doctest::Approx(0.0).epsilon(1e-14));
            found_zero = true;
        }
    }
    CHECK(found_zero);

    // short horizon: the curved boundary stays below one for d < 0
    const auto short_case = boundary_curves(2.0, 0.4, -1.5, 0.0, 101);
    for (const auto& s : short_case) {
        if (s.curve == "r_affine_exp" && s.d < 0.0) {
            CHECK(s.r < 1.0);
        }
    }

    CHECK_THROWS_AS(boundary_curves(0.5, 1.0, 1.0, -1.0, 11), std::invalid_argument);
    CHECK_THROWS_AS(boundary_curves(0.5, 1.0, -1.0, 1.0, 1), std::invalid_argument);
}
