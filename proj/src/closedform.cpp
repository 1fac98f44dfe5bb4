#include "reingame/closedform.hpp"

#include <algorithm>
#include <cmath>

namespace reingame {

namespace {

void require_time_in_horizon(double t, double T) {
    if (!(t >= -1e-12 * std::max(1.0, T) && t <= T * (1.0 + 1e-12) + 1e-12)) {
        throw std::domain_error("t must lie in [0, T]");
    }
}

double decay(double rate, double dt) { return std::exp(-rate * dt); }

}  // namespace

double purchase_threshold(double t, const InsurerParams& insurer, const Horizon& horizon) {
    require_time_in_horizon(t, horizon.terminal_time);
    const double dt = horizon.terminal_time - t;
    return decay(insurer.reversion + insurer.discount, dt) / insurer.premium_weight;
}

PurchaseTime purchase_time(double t, const PremiumPath& premium, const InsurerParams& insurer,
                           const Horizon& horizon) {
    const double T = horizon.terminal_time;
    require_time_in_horizon(t, T);
    t = std::clamp(t, 0.0, T);

    const auto& grid = premium.grid();
    const auto& values = premium.values();
    const std::size_t n = grid.size();

    auto threshold = [&](double s) { return purchase_threshold(s, insurer, horizon); };

    for (std::size_t i = premium.cell_index(t); i + 1 < n; ++i) {
        const double lo = std::max(grid[i], t);
        const double hi = grid[i + 1];
        if (!(lo < hi)) continue;
        const double level = values[i];
        if (level <= threshold(lo)) {
            return PurchaseTime::at(lo);
        }
        // threshold is monotone on the cell, so a crossing exists iff the
        // condition holds as the cell is left
        if (level <= threshold(hi)) {
            double a = lo, b = hi;  // threshold(a) < level <= threshold(b)
            for (int iter = 0; iter < 60 && (b - a) > 1e-12; ++iter) {
                const double mid = 0.5 * (a + b);
                if (level <= threshold(mid)) {
                    b = mid;
                } else {
                    a = mid;
                }
            }
            return PurchaseTime::at(b);
        }
    }
    if (values.back() <= threshold(T)) {
        return PurchaseTime::at(T);
    }
    return PurchaseTime::never();
}

double AnsatzCoefficients::u1(double t) const {
    return decay(insurer.reversion, horizon.terminal_time - t);
}

double AnsatzCoefficients::u2(double t) const {
    const double dt = horizon.terminal_time - t;
    const double gross = decay(insurer.reversion, dt) -
                         insurer.premium_weight * std::exp(insurer.discount * dt) * premium(t);
    return std::max(gross, 0.0);
}

double AnsatzCoefficients::u3(double t) const {
    const double dt = horizon.terminal_time - t;
    const double b = insurer.reversion;
    const double mean_part = insurer.drift_level / b * (1.0 - decay(b, dt));
    const double var_part = insurer.variance_weight * insurer.volatility * insurer.volatility /
                            (2.0 * b) * (1.0 - decay(2.0 * b, dt));
    return -u2(t) * horizon.ceiling + mean_part + var_part;
}

double AnsatzCoefficients::v1(double t) const { return u1(t); }

double AnsatzCoefficients::v2(double t) const {
    const auto p = purchase_time(t, premium, insurer, horizon);
    if (!p.finite()) return 0.0;
    return decay(insurer.reversion, horizon.terminal_time - p.time());
}

double AnsatzCoefficients::v3(double t) const {
    const double dt = horizon.terminal_time - t;
    const double b = insurer.reversion;
    return -v2(t) * horizon.ceiling + insurer.drift_level / b * (1.0 - decay(b, dt));
}

AnsatzCoefficients ansatz(const PremiumPath& premium, const InsurerParams& insurer,
                          const Horizon& horizon) {
    return AnsatzCoefficients{insurer, horizon, premium};
}

double insurer_value(const GameState& state, const PremiumPath& premium,
                     const InsurerParams& insurer, const Horizon& horizon) {
    validate_state(state, horizon);
    const double t = state.time;
    const double dt = horizon.terminal_time - t;
    const double b = insurer.reversion;
    const double gross = decay(b, dt) -
                         insurer.premium_weight * std::exp(insurer.discount * dt) * premium(t);
    const double ceiling_term = std::max(gross, 0.0) * (horizon.ceiling - state.coverage);
    const double mean_part = insurer.drift_level / b * (1.0 - decay(b, dt));
    const double var_part = insurer.variance_weight * insurer.volatility * insurer.volatility /
                            (2.0 * b) * (1.0 - decay(2.0 * b, dt));
    return decay(b, dt) * state.exposure - ceiling_term + mean_part + var_part;
}

double expected_terminal_exposure(const GameState& state, const PremiumPath& premium,
                                  const InsurerParams& insurer, const Horizon& horizon) {
    validate_state(state, horizon);
    const double t = state.time;
    const double dt = horizon.terminal_time - t;
    const double b = insurer.reversion;
    double ceiling_term = 0.0;
    const auto p = purchase_time(t, premium, insurer, horizon);
    if (p.finite()) {
        ceiling_term = decay(b, horizon.terminal_time - p.time()) *
                       (horizon.ceiling - state.coverage);
    }
    return decay(b, dt) * state.exposure - ceiling_term +
           insurer.drift_level / b * (1.0 - decay(b, dt));
}

double reinsurer_cost(double t, double coverage, double reinsurer_exposure, const PurchaseTime& p,
                      const GameParameters& params) {
    const double T = params.horizon.terminal_time;
    require_time_in_horizon(t, T);
    if (p.finite() && (p.time() < t || p.time() > T)) {
        throw std::domain_error("purchase time must lie in [t, T]");
    }
    const ReinsurerParams& re = params.reinsurer;
    const double dt = T - t;
    double cost = reinsurer_exposure * decay(re.reversion, dt) +
                  re.drift_level / re.reversion * (1.0 - decay(re.reversion, dt)) +
                  re.variance_weight * re.volatility * re.volatility / (2.0 * re.reversion) *
                      (1.0 - decay(2.0 * re.reversion, dt));
    if (p.finite()) {
        cost += intent(p.time(), params).value * (params.horizon.ceiling - coverage);
    }
    return cost;
}

Intent intent(double t, const GameParameters& params) {
    const double T = params.horizon.terminal_time;
    require_time_in_horizon(t, T);
    const double dt = T - t;
    const double b_r = params.reinsurer.reversion;
    const double weight_ratio = params.reinsurer.premium_weight / params.insurer.premium_weight;
    // exponent of the premium leg: -(b_I + rho_I - rho_R)
    const double premium_rate =
        params.insurer.reversion + params.insurer.discount - params.reinsurer.discount;
    Intent out;
    out.value = decay(b_r, dt) - weight_ratio * decay(premium_rate, dt);
    out.slope = b_r * decay(b_r, dt) - weight_ratio * premium_rate * decay(premium_rate, dt);
    return out;
}

double insurer_lump_objective(const GameState& state, double s, const PremiumPath& premium,
                              const InsurerParams& insurer, const Horizon& horizon) {
    validate_state(state, horizon);
    const double T = horizon.terminal_time;
    if (!(s >= state.time - 1e-12 * std::max(1.0, T) && s <= T * (1.0 + 1e-12) + 1e-12)) {
        throw std::domain_error("lump time must lie in [t, T]");
    }
    s = std::clamp(s, state.time, T);
    const double t = state.time;
    const double dt = T - t;
    const double b = insurer.reversion;
    const double remaining = horizon.ceiling - state.coverage;
    const double mean_part = insurer.drift_level / b * (1.0 - decay(b, dt));
    const double var_part = insurer.variance_weight * insurer.volatility * insurer.volatility /
                            (2.0 * b) * (1.0 - decay(2.0 * b, dt));
    const double premium_part =
        insurer.premium_weight * std::exp(insurer.discount * (T - s)) * premium(s) * remaining;
    return decay(b, dt) * state.exposure - decay(b, T - s) * remaining + mean_part + var_part +
           premium_part;
}

}  // namespace reingame
