#pragma once

#include "reingame/model.hpp"
#include "reingame/regions.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace testing_support {

inline double uniform(std::mt19937_64& rng, double a, double b) {
    return a + (b - a) * std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

// Baseline parameter set used across tests; region III coordinates
// (r = 0.5, d = -0.3) with an increasing threshold.
inline reingame::GameParameters baseline_params() {
    reingame::GameParameters p;
    p.insurer = {0.05, 0.1, 0.3, 1.0, 2.0, 0.05};
    p.reinsurer = {0.05, 0.2, 0.25, 1.0, 4.0, 0.25};
    p.horizon = {1.0, 1.0};
    return p;
}

struct RegionDraw {
    reingame::GameParameters params;
    reingame::PreferenceCoordinates coords;
};

// Draws (d, r, T, b_R) safely inside one area region, then backs the full
// parameter set out of the coordinates. Keeps b_I + rho_I positive so the
// threshold is increasing.
inline RegionDraw sample_region(reingame::Region region, std::mt19937_64& rng) {
    using reingame::Region;
    double T, b_r, d, r;
    if (region == Region::VIII) {
        T = 20.0;
        b_r = 0.2;
        double curve = 0.0;
        do {
            d = -uniform(rng, 0.02, 0.16);
            curve = (1.0 + d / b_r) * std::exp(-T * d);
        } while (curve < 1.25);
        r = uniform(rng, 1.05, 0.95 * curve);
    } else {
        T = uniform(rng, 0.8, 2.0);
        b_r = uniform(rng, 0.15, 0.5);
        switch (region) {
            case Region::I: {
                d = uniform(rng, -1.0, 1.0);
                const double floor_r = std::max(1.0, std::exp(-T * d));
                r = floor_r * uniform(rng, 1.1, 1.9);
                break;
            }
            case Region::II: {
                double lo = 0.0, hi = 0.0;
                do {
                    d = -uniform(rng, 0.25, 1.5);
                    const double decay = std::exp(-T * d);
                    lo = std::max(1.02, 1.02 * (1.0 + d / b_r) * decay);
                    hi = 0.98 * decay;
                } while (hi <= lo * 1.02);
                r = uniform(rng, lo, hi);
                break;
            }
            case Region::III: {
                double lo = 0.0;
                do {
                    d = -uniform(rng, 0.1, 1.5);
                    lo = std::max(0.05, 1.05 * (1.0 + d / b_r) * std::exp(-T * d));
                } while (lo > 0.85);
                r = uniform(rng, lo, 0.95);
                break;
            }
            case Region::IV: {
                double lo = 0.0, hi = 0.0;
                do {
                    d = -b_r * uniform(rng, 0.15, 0.9);
                    lo = 1.0 + d / b_r;
                    hi = std::min(1.0, lo * std::exp(-T * d));
                } while (std::abs(d) * T < 0.12 || hi <= lo * 1.05);
                const double width = hi - lo;
                r = uniform(rng, lo + 0.1 * width, hi - 0.1 * width);
                break;
            }
            case Region::V: {
                d = uniform(rng, -0.4 * b_r, 1.0);
                const double cap = std::min(1.0, 1.0 + d / b_r);
                r = cap * uniform(rng, 0.1, 0.85);
                break;
            }
            default:
                throw std::logic_error("sampler only covers the area regions");
        }
    }

    RegionDraw out;
    out.coords = {r, d};
    reingame::GameParameters& p = out.params;
    p.reinsurer.premium_weight = uniform(rng, 0.5, 2.0);
    p.insurer.premium_weight = r * p.reinsurer.premium_weight;
    p.insurer.reversion = uniform(rng, 0.05, 0.3);
    p.reinsurer.reversion = b_r;
    p.reinsurer.discount = std::max(0.0, -d - b_r) + uniform(rng, 0.05, 0.15);
    p.insurer.discount = d + b_r + p.reinsurer.discount - p.insurer.reversion;
    p.insurer.drift_level = uniform(rng, 0.0, 0.2);
    p.reinsurer.drift_level = uniform(rng, 0.0, 0.2);
    p.insurer.volatility = uniform(rng, 0.15, 0.35);
    p.reinsurer.volatility = uniform(rng, 0.15, 0.35);
    p.insurer.variance_weight = uniform(rng, 0.5, 2.0);
    p.reinsurer.variance_weight = uniform(rng, 0.5, 2.0);
    p.horizon.terminal_time = T;
    p.horizon.ceiling = uniform(rng, 0.5, 1.5);
    return out;
}

// Shifts every interval endpoint right by 5% of the horizon (laws without a
// purchasing interval gain a spurious terminal one); breaks the equilibrium
// conditions in every area region.
inline reingame::ReinsuranceLaw perturb_law(const reingame::ReinsuranceLaw& law) {
    using reingame::LawInterval;
    const double T = law.terminal_time();
    const double shift = 0.05 * T;
    if (law.empty() || (law.intervals().size() == 1 && law.intervals()[0].is_point())) {
        return reingame::ReinsuranceLaw({LawInterval{T - shift, T, true, true}}, T);
    }
    std::vector<LawInterval> shifted;
    for (LawInterval iv : law.intervals()) {
        iv.start = std::min(T, iv.start + shift);
        iv.end = std::min(T, iv.end + shift);
        if (iv.is_point()) {
            iv.start_closed = iv.end_closed = true;
        }
        shifted.push_back(iv);
    }
    return reingame::ReinsuranceLaw(std::move(shifted), T);
}

}  // namespace testing_support
