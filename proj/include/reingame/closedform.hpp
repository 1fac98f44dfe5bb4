#pragma once

#include "reingame/model.hpp"

namespace reingame {

// Either a finite purchase time or "never". Kept symbolic so indicator terms
// are exact; never encoded as a large float.
class PurchaseTime {
  public:
    static PurchaseTime never() { return PurchaseTime{}; }
    static PurchaseTime at(double t) {
        PurchaseTime p;
        p.time_ = t;
        return p;
    }

    bool finite() const { return time_.has_value(); }
    double time() const {
        if (!time_) throw std::logic_error("purchase time is infinite");
        return *time_;
    }

    friend bool operator==(const PurchaseTime&, const PurchaseTime&) = default;

  private:
    std::optional<double> time_;
};

// Highest premium rate at which the insurer purchases at time t:
// exp(-(b_I + rho_I)(T - t)) / theta_I.
double purchase_threshold(double t, const InsurerParams& insurer, const Horizon& horizon);

// First time tau >= t with c(tau) <= threshold(tau). The premium grid is
// scanned cell by cell; a crossing inside a cell is refined by bisection
// (60 iterations) against the cell's constant premium level.
PurchaseTime purchase_time(double t, const PremiumPath& premium, const InsurerParams& insurer,
                           const Horizon& horizon);

// Time-dependent coefficients of the affine value-function pair
//   V(x,t,y) = u1(t) x + u2(t) y + u3(t),
//   g(x,t,y) = v1(t) x + v2(t) y + v3(t).
// v2 is 0 when no purchase ever occurs after t.
struct AnsatzCoefficients {
    InsurerParams insurer;
    Horizon horizon;
    PremiumPath premium;

    double u1(double t) const;
    double u2(double t) const;
    double u3(double t) const;
    double v1(double t) const;
    double v2(double t) const;
    double v3(double t) const;
};

AnsatzCoefficients ansatz(const PremiumPath& premium, const InsurerParams& insurer,
                          const Horizon& horizon);

// Equilibrium objective value of the insurer at (x, t, y).
double insurer_value(const GameState& state, const PremiumPath& premium,
                     const InsurerParams& insurer, const Horizon& horizon);

// Expected terminal exposure E[X_T] under the threshold purchase rule.
double expected_terminal_exposure(const GameState& state, const PremiumPath& premium,
                                  const InsurerParams& insurer, const Horizon& horizon);

// Reinsurer objective value when the remaining coverage is sold in one lump
// at time p (priced at the threshold), or never.
double reinsurer_cost(double t, double coverage, double reinsurer_exposure, const PurchaseTime& p,
                      const GameParameters& params);

// Sell-intent function and its time derivative. Its sign and monotonicity
// decide where the reinsurer wants the contract signed.
struct Intent {
    double value = 0.0;
    double slope = 0.0;
};

Intent intent(double t, const GameParameters& params);

// Insurer objective value for the strategy that buys the remaining coverage
// once at time s in [t, T]; used as an argmin oracle against purchase_time.
double insurer_lump_objective(const GameState& state, double s, const PremiumPath& premium,
                              const InsurerParams& insurer, const Horizon& horizon);

}  // namespace reingame
