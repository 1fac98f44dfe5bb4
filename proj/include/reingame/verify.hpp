#pragma once

#include "reingame/closedform.hpp"
#include "reingame/model.hpp"
#include "reingame/simulate.hpp"

#include <string>
#include <vector>

namespace reingame {

struct HjbGrid {
    int n_x = 100;
    int n_t = 200;
    int n_y = 20;
    double x_min = -2.0;
    double x_max = 2.0;
    bool fd_check = true;
};

// Worst absolute residual of each optimality condition of the closed forms,
// evaluated with analytic derivatives on a state-time-coverage mesh. Points
// adjacent to a waiting/purchasing switch are skipped and counted; the
// closed forms are only piecewise smooth there.
struct ResidualReport {
    double interior_waiting = 0.0;      // drift equation on the waiting closure
    double gradient_inequality = 0.0;   // violation of the purchase-gradient bound
    double gradient_equality = 0.0;     // purchase-gradient on the purchasing region
    double exposure_drift = 0.0;        // auxiliary-mean drift on the waiting closure
    double exposure_gradient = 0.0;     // auxiliary-mean gradient on the purchasing region
    double terminal_value = 0.0;
    double terminal_exposure = 0.0;
    double fd_derivative_error = 0.0;   // analytic vs central differences
    long long skipped_points = 0;
    long long fd_points = 0;
    std::string grid_description;

    double max_residual() const;
};

ResidualReport check_hjb(const PremiumPath& premium, const GameParameters& params,
                         const HjbGrid& grid);

struct EquilibriumCondition {
    std::string id;
    bool pass = false;
    double margin = 0.0;    // raw margin, >= 0 means satisfied
    double location = 0.0;  // time (or h) achieving the worst margin
};

struct EquilibriumReport {
    std::vector<EquilibriumCondition> conditions;

    bool pass() const;
    double worst_margin() const;
    const EquilibriumCondition* worst() const;
};

// Intent-function conditions for a division of [0, T] to be a reinsurer
// equilibrium: on waiting stretches the intent dominates its exit value (or
// zero when no purchase follows); on purchasing stretches the intent is
// non-decreasing with the stated endpoint comparisons. Margins below
// -margin_tol fail.
EquilibriumReport check_reinsurer_equilibrium(const ReinsuranceLaw& law,
                                              const GameParameters& params, int n_grid,
                                              double margin_tol = 1e-10);

struct Deviation {
    enum class Kind { Lump, Rate, Hold };
    Kind kind = Kind::Lump;
    double fraction = 1.0;  // share of the remaining coverage moved by the deviation

    std::string describe() const;
};

std::vector<Deviation> default_insurer_deviations();

// Perturbation test of the insurer's law: for each deviation and window h,
// estimates [J(deviate for h, then resume) - J(equilibrium)] / h with common
// random numbers and checks it is not significantly negative. Also checks
// the terminal comparison in closed form and that the objective differences
// shrink linearly in h.
EquilibriumReport check_insurer_equilibrium(const GameState& state, const PremiumPath& premium,
                                            const GameParameters& params, const McConfig& mc,
                                            const std::vector<Deviation>& deviations,
                                            const std::vector<double>& h_values,
                                            int n_threads = 1);

struct TimeSelectionResult {
    PurchaseTime candidate;   // crossing time of the generated premium
    double candidate_value = 0.0;
    PurchaseTime global_min;  // argmin of the cost over the time grid and "never"
    double global_min_value = 0.0;
    double no_sale_value = 0.0;
    // "no worse than selling now" and forward-perturbation conditions,
    // evaluated at the candidate and at the global minimizer
    double candidate_now_margin = 0.0;
    double candidate_forward_margin = 0.0;
    double global_now_margin = 0.0;
    double global_forward_margin = 0.0;
    bool pass = false;
};

TimeSelectionResult time_selection_oracle(double t, double coverage, double reinsurer_exposure,
                                          const GameParameters& params, int n_grid,
                                          double markup = 0.1);

// Crossing time of the fixed premium under a sweep of one insurer parameter.
// name is one of a_I, b_I, sigma_I, gamma_I, theta_I, rho_I.
std::vector<PurchaseTime> sensitivity_sweep(const GameParameters& base, const std::string& name,
                                            const std::vector<double>& values,
                                            const PremiumPath& premium);

}  // namespace reingame
