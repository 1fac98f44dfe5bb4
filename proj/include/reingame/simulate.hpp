#pragma once

#include "reingame/closedform.hpp"
#include "reingame/model.hpp"

#include <cstdint>
#include <utility>
#include <vector>

namespace reingame {

struct McConfig {
    long long n_paths = 100000;
    int n_steps = 64;
    std::uint64_t seed = 1;
};

struct McEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    long long n_paths = 0;
    std::uint64_t seed = 0;
};

struct SimulatedObjectives {
    McEstimate j_insurer;
    McEstimate j_reinsurer;
    McEstimate mean_XT;
    McEstimate var_XT;
    McEstimate premium_cost;        // discounted, before the theta weight
    McEstimate premium_reinsurer;   // same lump discounted at the reinsurer rate
    PurchaseTime purchase_time_used;
};

// Deterministic lump purchases (time, amount). For the threshold rule this
// is a single lump of the remaining coverage at the first crossing time.
struct ControlSchedule {
    std::vector<std::pair<double, double>> purchases;

    double total() const;
};

// Builds the schedule the law generates from `state`: remaining coverage in
// one lump at purchase_time(t, c), nothing when that time is infinite or the
// coverage already sits at the ceiling. Throws if the law disagrees with the
// premium's crossing.
ControlSchedule generate_strategy(const GameState& state, const ReinsuranceLaw& law,
                                  const PremiumPath& premium, const InsurerParams& insurer,
                                  const Horizon& horizon);

// Drift/diffusion constants of one mean-reverting exposure process.
struct OuParams {
    double drift_level = 0.0;
    double reversion = 0.0;
    double volatility = 0.0;
};

// Uniform grid on [t0, T] with the extra times inserted (each clamped copy
// deduplicated); front() == t0, back() == T.
std::vector<double> build_time_grid(double t0, double terminal_time, int n_steps,
                                    const std::vector<double>& extras);

// Terminal samples of the controlled process: exact Gaussian transition per
// grid step, signed lumps added at their nodes. Path i draws from a stream
// keyed by (seed, i, stream), so results do not depend on n_threads.
std::vector<double> sample_terminal(double x0, const OuParams& ou,
                                    const std::vector<double>& times,
                                    const std::vector<std::pair<double, double>>& signed_lumps,
                                    long long n_paths, std::uint64_t seed, std::uint32_t stream,
                                    int n_threads);

// Mean / sample variance / fourth central moment, reduced in index order so
// the result is independent of the thread count used to produce samples.
struct SampleMoments {
    double mean = 0.0;
    double variance = 0.0;      // n-1 denominator; 0 when n < 2
    double fourth_central = 0.0;
    long long n = 0;

    double mean_std_error() const;
    double variance_std_error() const;
};

SampleMoments moments(const std::vector<double>& samples);

// Discounted premium paid for a schedule: sum of exp(rho (T - s)) c(s) ds.
double discounted_premium(const ControlSchedule& schedule, const PremiumPath& premium,
                          double discount, double terminal_time);

// Estimates both objectives under the threshold purchase rule for premium c.
// Insurer and reinsurer noises are independent streams.
SimulatedObjectives simulate(const GameState& state, const PremiumPath& premium,
                             const GameParameters& params, const McConfig& mc, int n_threads = 1);

// Terminal-variance estimates for a lump purchase of the remaining coverage
// at each requested time, with common random numbers across the times.
std::vector<McEstimate> variance_profile(const GameState& state,
                                         const std::vector<double>& purchase_times,
                                         const GameParameters& params, const McConfig& mc,
                                         int n_threads = 1);

}  // namespace reingame
