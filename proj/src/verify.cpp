#include "reingame/verify.hpp"

#include "reingame/regions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace reingame {

namespace {

std::vector<double> linspace(double a, double b, int n) {
    std::vector<double> v(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        v[static_cast<std::size_t>(i)] = a + (b - a) * static_cast<double>(i) / (n - 1);
    }
    v.front() = a;
    v.back() = b;
    return v;
}

}  // namespace

double ResidualReport::max_residual() const {
    return std::max({interior_waiting, gradient_inequality, gradient_equality, exposure_drift,
                     exposure_gradient, terminal_value, terminal_exposure});
}

ResidualReport check_hjb(const PremiumPath& premium, const GameParameters& params,
                         const HjbGrid& grid) {
    validate(params);
    if (grid.n_x < 2 || grid.n_t < 2 || grid.n_y < 2 || !(grid.x_min < grid.x_max)) {
        throw std::invalid_argument("degenerate HJB grid");
    }
    const InsurerParams& ins = params.insurer;
    const Horizon& hz = params.horizon;
    const double T = hz.terminal_time;
    const double b = ins.reversion;
    const double a = ins.drift_level;
    const double sigma2 = ins.volatility * ins.volatility;
    const double gamma = ins.variance_weight;
    const double theta = ins.premium_weight;
    const double rho = ins.discount;

    const auto xs = linspace(grid.x_min, grid.x_max, grid.n_x);
    const auto ts = linspace(0.0, T, grid.n_t);
    const auto ys = linspace(0.0, hz.ceiling, grid.n_y);

    struct TimeSlice {
        double c = 0.0;
        double threshold = 0.0;
        bool purchasing = false;
        bool skip = false;
        double u1 = 0.0, du1 = 0.0;
        double u2 = 0.0, du2 = 0.0;
        double u3_free = 0.0, du3_free = 0.0;  // u3 without the -u2 * ceiling part
        double v2 = 0.0, dv2 = 0.0;
        double discounted_weight = 0.0;  // theta * exp(rho (T - t))
    };

    std::vector<TimeSlice> slices(ts.size());
    for (std::size_t j = 0; j < ts.size(); ++j) {
        const double t = ts[j];
        const double dt = T - t;
        TimeSlice& s = slices[j];
        s.c = premium(t);
        s.threshold = purchase_threshold(t, ins, hz);
        s.purchasing = s.c <= s.threshold;
        s.u1 = std::exp(-b * dt);
        s.du1 = b * s.u1;
        s.discounted_weight = theta * std::exp(rho * dt);
        if (s.purchasing) {
            s.u2 = s.u1 - s.discounted_weight * s.c;
            s.du2 = b * s.u1 + rho * s.discounted_weight * s.c;
            const auto p = purchase_time(t, premium, ins, hz);
            s.v2 = std::exp(-b * (T - p.time()));
            s.dv2 = b * s.v2;
        } else {
            s.u2 = 0.0;
            s.du2 = 0.0;
            const auto p = purchase_time(t, premium, ins, hz);
            s.v2 = p.finite() ? std::exp(-b * (T - p.time())) : 0.0;
            s.dv2 = 0.0;  // crossing time locally constant on the waiting side
        }
        s.u3_free = a / b * (1.0 - s.u1) + gamma * sigma2 / (2.0 * b) * (1.0 - s.u1 * s.u1);
        s.du3_free = -a * s.u1 - gamma * sigma2 * s.u1 * s.u1;
    }
    for (std::size_t j = 0; j + 1 < ts.size(); ++j) {
        const bool neighbor_switch =
            (j > 0 && slices[j - 1].purchasing != slices[j].purchasing) ||
            slices[j + 1].purchasing != slices[j].purchasing;
        slices[j].skip = neighbor_switch;
    }

    ResidualReport report;
    report.grid_description = std::to_string(grid.n_x) + "x" + std::to_string(grid.n_t) + "x" +
                              std::to_string(grid.n_y) + " over [" + std::to_string(grid.x_min) +
                              "," + std::to_string(grid.x_max) + "]x[0," + std::to_string(T) +
                              "]x[0," + std::to_string(hz.ceiling) + "]";
    double worst_gradient_margin = std::numeric_limits<double>::infinity();

    for (std::size_t j = 0; j + 1 < ts.size(); ++j) {
        const TimeSlice& s = slices[j];
        if (s.skip) {
            report.skipped_points += static_cast<long long>(xs.size() * ys.size());
            continue;
        }
        const double du3 = -s.du2 * hz.ceiling + s.du3_free;
        const double dv3 = -s.dv2 * hz.ceiling - a * s.u1;
        for (double x : xs) {
            const double drift_x = a - b * x;
            for (double y : ys) {
                const bool at_ceiling = y == hz.ceiling;
                const double value_drift = s.du1 * x + s.du2 * y + du3 + drift_x * s.u1;
                const double mean_drift = s.du1 * x + s.dv2 * y + dv3 + drift_x * s.u1;
                const double gradient = s.discounted_weight * s.c - s.u1 + s.u2;
                worst_gradient_margin = std::min(worst_gradient_margin, gradient);
                if (!s.purchasing || at_ceiling) {
                    report.interior_waiting = std::max(
                        report.interior_waiting,
                        std::abs(value_drift + gamma * sigma2 * s.u1 * s.u1));
                    report.exposure_drift =
                        std::max(report.exposure_drift, std::abs(mean_drift));
                }
                if (s.purchasing && !at_ceiling) {
                    report.gradient_equality =
                        std::max(report.gradient_equality, std::abs(gradient));
                    report.exposure_gradient =
                        std::max(report.exposure_gradient, std::abs(s.u1 - s.v2));
                }
            }
        }
    }
    report.gradient_inequality = std::max(0.0, -worst_gradient_margin);

    // terminal row
    {
        const double c_T = premium(T);
        const double buy_gain = std::max(1.0 - theta * c_T, 0.0);
        const bool buys = theta * c_T <= 1.0;
        for (double x : xs) {
            for (double y : ys) {
                const GameState st{x, T, y, 0.0};
                const double v = insurer_value(st, premium, ins, hz);
                const double g = expected_terminal_exposure(st, premium, ins, hz);
                report.terminal_value = std::max(
                    report.terminal_value, std::abs(v - (x - (hz.ceiling - y) * buy_gain)));
                report.terminal_exposure = std::max(
                    report.terminal_exposure,
                    std::abs(g - (x - (buys ? hz.ceiling - y : 0.0))));
            }
        }
    }

    if (grid.fd_check) {
        const int sx = std::max(1, grid.n_x / 20);
        const int st = std::max(1, grid.n_t / 100);
        const int sy = std::max(1, grid.n_y / 10);
        const double hx = 1e-5 * std::max(1.0, grid.x_max - grid.x_min);
        const double hy = 1e-5 * std::max(1.0, hz.ceiling);
        const double ht = 1e-5 * T;
        auto value_at = [&](double x, double t, double y) {
            return insurer_value(GameState{x, t, y, 0.0}, premium, ins, hz);
        };
        auto mean_at = [&](double x, double t, double y) {
            return expected_terminal_exposure(GameState{x, t, y, 0.0}, premium, ins, hz);
        };
        for (std::size_t j = 1; j + 1 < ts.size(); j += static_cast<std::size_t>(st)) {
            const TimeSlice& s = slices[j];
            if (s.skip) continue;
            const double t = ts[j];
            const bool same_cell = premium.cell_index(t - ht) == premium.cell_index(t + ht);
            const double th_lo = purchase_threshold(t - ht, ins, hz);
            const double th_hi = purchase_threshold(t + ht, ins, hz);
            const bool same_side = (premium(t - ht) <= th_lo) == (premium(t + ht) <= th_hi);
            if (!same_cell || !same_side) {
                ++report.skipped_points;
                continue;
            }
            const double du3 = -s.du2 * hz.ceiling + s.du3_free;
            const double dv3 = -s.dv2 * hz.ceiling - a * s.u1;
            for (std::size_t ix = 1; ix + 1 < xs.size(); ix += static_cast<std::size_t>(sx)) {
                const double x = xs[ix];
                for (std::size_t iy = 1; iy + 1 < ys.size(); iy += static_cast<std::size_t>(sy)) {
                    const double y = ys[iy];
                    ++report.fd_points;
                    const double fd_vx =
                        (value_at(x + hx, t, y) - value_at(x - hx, t, y)) / (2.0 * hx);
                    const double fd_vy =
                        (value_at(x, t, y + hy) - value_at(x, t, y - hy)) / (2.0 * hy);
                    const double fd_vt =
                        (value_at(x, t + ht, y) - value_at(x, t - ht, y)) / (2.0 * ht);
                    const double fd_gx =
                        (mean_at(x + hx, t, y) - mean_at(x - hx, t, y)) / (2.0 * hx);
                    const double fd_gy =
                        (mean_at(x, t, y + hy) - mean_at(x, t, y - hy)) / (2.0 * hy);
                    const double fd_gt =
                        (mean_at(x, t + ht, y) - mean_at(x, t - ht, y)) / (2.0 * ht);
                    const double an_vt = s.du1 * x + s.du2 * y + du3;
                    const double an_gt = s.du1 * x + s.dv2 * y + dv3;
                    const double err = std::max(
                        {std::abs(fd_vx - s.u1), std::abs(fd_vy - s.u2), std::abs(fd_vt - an_vt),
                         std::abs(fd_gx - s.u1), std::abs(fd_gy - s.v2),
                         std::abs(fd_gt - an_gt)});
                    report.fd_derivative_error = std::max(report.fd_derivative_error, err);
                }
            }
        }
    }
    return report;
}

bool EquilibriumReport::pass() const {
    return std::all_of(conditions.begin(), conditions.end(),
                       [](const EquilibriumCondition& c) { return c.pass; });
}

double EquilibriumReport::worst_margin() const {
    double worst = std::numeric_limits<double>::infinity();
    for (const auto& c : conditions) worst = std::min(worst, c.margin);
    return worst;
}

const EquilibriumCondition* EquilibriumReport::worst() const {
    const EquilibriumCondition* out = nullptr;
    for (const auto& c : conditions) {
        if (out == nullptr || c.margin < out->margin) out = &c;
    }
    return out;
}

EquilibriumReport check_reinsurer_equilibrium(const ReinsuranceLaw& law,
                                              const GameParameters& params, int n_grid,
                                              double margin_tol) {
    validate(params);
    if (n_grid < 2) throw std::invalid_argument("n_grid must be >= 2");
    const double T = params.horizon.terminal_time;
    if (law.terminal_time() != T) {
        throw std::invalid_argument("law horizon does not match the parameters");
    }

    auto phi = [&](double t) { return intent(t, params).value; };
    auto dphi = [&](double t) { return intent(t, params).slope; };

    EquilibriumReport report;
    auto add = [&](std::string id, double margin, double location) {
        report.conditions.push_back(
            EquilibriumCondition{std::move(id), margin >= -margin_tol, margin, location});
    };
    auto mesh_over = [&](double a, double b) {
        const int n = std::max(2, static_cast<int>(std::ceil(n_grid * (b - a) / T)) + 1);
        return linspace(a, b, n);
    };
    auto min_over = [&](double a, double b, auto&& f, double* arg) {
        double best = std::numeric_limits<double>::infinity();
        for (double t : mesh_over(a, b)) {
            const double v = f(t);
            if (v < best) {
                best = v;
                *arg = t;
            }
        }
        return best;
    };

    const auto& intervals = law.intervals();

    // waiting stretches, each tagged with its exit (the next purchase start)
    struct WaitPiece {
        double a, b;
        std::optional<double> exit;
        std::size_t index;
    };
    std::vector<WaitPiece> waits;
    double cursor = 0.0;
    for (std::size_t i = 0; i < intervals.size(); ++i) {
        if (intervals[i].start > cursor) {
            waits.push_back(WaitPiece{cursor, intervals[i].start, intervals[i].start, i});
        }
        cursor = std::max(cursor, intervals[i].end);
    }
    if (cursor < T || intervals.empty()) {
        waits.push_back(WaitPiece{intervals.empty() ? 0.0 : cursor, T, std::nullopt,
                                  intervals.size()});
    }

    for (std::size_t w = 0; w < waits.size(); ++w) {
        const auto& piece = waits[w];
        double arg = piece.a;
        if (piece.exit) {
            const double exit_value = phi(*piece.exit);
            const double margin =
                min_over(piece.a, piece.b, [&](double t) { return phi(t) - exit_value; }, &arg);
            add("waiting[" + std::to_string(w) + "]: intent >= intent(exit)", margin, arg);
        } else {
            const double margin = min_over(piece.a, piece.b, phi, &arg);
            add("waiting[" + std::to_string(w) + "]: intent >= 0", margin, arg);
        }
    }

    for (std::size_t i = 0; i < intervals.size(); ++i) {
        const auto& iv = intervals[i];
        const bool last = i + 1 == intervals.size();
        const std::string tag = "purchasing[" + std::to_string(i) + "]";
        if (!last) {
            // interior stretch with a waiting gap up to the next purchase
            double arg = iv.start;
            if (iv.is_point()) {
                add(tag + ": intent slope >= 0", dphi(iv.start), iv.start);
            } else {
                const double margin = min_over(iv.start, iv.end, dphi, &arg);
                add(tag + ": intent slope >= 0", margin, arg);
            }
            const double next_start = intervals[i + 1].start;
            add(tag + ": intent(end) <= intent(next exit)", phi(next_start) - phi(iv.end),
                iv.end);
        } else {
            const bool reaches_terminal = iv.end == T;
            if (iv.is_point()) {
                if (iv.start < T) {
                    add(tag + ": intent slope >= 0", dphi(iv.start), iv.start);
                }
            } else {
                double arg = iv.start;
                const double margin = min_over(iv.start, T, dphi, &arg);
                add(tag + ": intent slope >= 0 up to T", margin, arg);
            }
            (void)reaches_terminal;
            add(tag + ": intent(end) <= 0", -phi(iv.end), iv.end);
        }
    }
    return report;
}

std::string Deviation::describe() const {
    switch (kind) {
        case Kind::Lump: return "lump(" + std::to_string(fraction) + ")";
        case Kind::Rate: return "rate(" + std::to_string(fraction) + ")";
        case Kind::Hold: return "hold";
    }
    return "?";
}

std::vector<Deviation> default_insurer_deviations() {
    return {{Deviation::Kind::Lump, 0.25}, {Deviation::Kind::Lump, 0.5},
            {Deviation::Kind::Lump, 1.0},  {Deviation::Kind::Rate, 0.25},
            {Deviation::Kind::Rate, 0.5},  {Deviation::Kind::Rate, 1.0},
            {Deviation::Kind::Hold, 0.0}};
}

namespace {

struct ObjectiveSample {
    double estimate = 0.0;
    std::vector<double> influence;  // per-path contributions averaging to estimate
};

// J estimate for a deterministic purchase schedule, with per-path influence
// values so coupled scenarios yield an honest joint standard error.
ObjectiveSample insurer_objective_mc(const GameState& state, const ControlSchedule& schedule,
                                     const PremiumPath& premium, const GameParameters& params,
                                     const std::vector<double>& times, const McConfig& mc,
                                     int n_threads) {
    std::vector<std::pair<double, double>> lumps;
    for (const auto& [time, amount] : schedule.purchases) lumps.emplace_back(time, -amount);
    const OuParams ou{params.insurer.drift_level, params.insurer.reversion,
                      params.insurer.volatility};
    const auto terminal =
        sample_terminal(state.exposure, ou, times, lumps, mc.n_paths, mc.seed, 0, n_threads);
    const auto m = moments(terminal);
    const double paid = discounted_premium(schedule, premium, params.insurer.discount,
                                           params.horizon.terminal_time);
    const double gamma = params.insurer.variance_weight;
    const double theta = params.insurer.premium_weight;

    ObjectiveSample out;
    out.estimate = m.mean + gamma * m.variance + theta * paid;
    out.influence.resize(terminal.size());
    const double nn = static_cast<double>(terminal.size());
    const double var_scale = nn > 1.0 ? nn / (nn - 1.0) : 0.0;
    for (std::size_t i = 0; i < terminal.size(); ++i) {
        const double d = terminal[i] - m.mean;
        out.influence[i] = terminal[i] + gamma * var_scale * d * d + theta * paid;
    }
    return out;
}

}  // namespace

EquilibriumReport check_insurer_equilibrium(const GameState& state, const PremiumPath& premium,
                                            const GameParameters& params, const McConfig& mc,
                                            const std::vector<Deviation>& deviations,
                                            const std::vector<double>& h_values, int n_threads) {
    validate(params);
    validate_state(state, params.horizon);
    const double T = params.horizon.terminal_time;
    const double t0 = state.time;
    const double remaining = params.horizon.ceiling - state.coverage;
    const double theta = params.insurer.premium_weight;

    EquilibriumReport report;

    const auto p_eq = purchase_time(t0, premium, params.insurer, params.horizon);
    ControlSchedule equilibrium;
    if (p_eq.finite() && remaining > 0.0) {
        equilibrium.purchases.emplace_back(p_eq.time(), remaining);
    }

    struct DiffRecord {
        double h;
        double diff;
        double se;
    };
    std::vector<std::vector<DiffRecord>> histories(deviations.size());

    for (double h : h_values) {
        if (!(h > 0.0) || t0 + h > T) continue;
        const double window_end = t0 + h;
        const auto p_resume = purchase_time(window_end, premium, params.insurer, params.horizon);

        for (std::size_t d = 0; d < deviations.size(); ++d) {
            const Deviation& dev = deviations[d];
            ControlSchedule deviated;
            double moved = 0.0;
            switch (dev.kind) {
                case Deviation::Kind::Lump:
                    moved = dev.fraction * remaining;
                    if (moved > 0.0) deviated.purchases.emplace_back(t0, moved);
                    break;
                case Deviation::Kind::Rate: {
                    moved = dev.fraction * remaining;
                    const int slices = 8;
                    for (int k = 0; k < slices; ++k) {
                        deviated.purchases.emplace_back(
                            t0 + h * static_cast<double>(k) / slices, moved / slices);
                    }
                    break;
                }
                case Deviation::Kind::Hold:
                    moved = 0.0;
                    break;
            }
            if (remaining - moved > 0.0 && p_resume.finite()) {
                deviated.purchases.emplace_back(p_resume.time(), remaining - moved);
            }

            std::vector<double> extras;
            for (const auto& [time, amount] : equilibrium.purchases) extras.push_back(time);
            for (const auto& [time, amount] : deviated.purchases) extras.push_back(time);
            const auto times = build_time_grid(t0, T, mc.n_steps, extras);

            const auto base =
                insurer_objective_mc(state, equilibrium, premium, params, times, mc, n_threads);
            const auto trial =
                insurer_objective_mc(state, deviated, premium, params, times, mc, n_threads);

            std::vector<double> diffs(base.influence.size());
            for (std::size_t i = 0; i < diffs.size(); ++i) {
                diffs[i] = trial.influence[i] - base.influence[i];
            }
            const auto md = moments(diffs);
            const double diff = trial.estimate - base.estimate;
            const double se = md.mean_std_error();
            histories[d].push_back(DiffRecord{h, diff, se});

            const double scale = std::max(1.0, std::abs(base.estimate));
            const double tol = (3.0 * se + 1e-12 * scale) / h;
            const double quotient = diff / h;
            report.conditions.push_back(EquilibriumCondition{
                dev.describe() + " quotient at h=" + std::to_string(h), quotient >= -tol,
                quotient, h});
        }
    }

    // differences must shrink linearly in h; slope fitted on the coarsest pair
    for (std::size_t d = 0; d < deviations.size(); ++d) {
        const auto& hist = histories[d];
        if (hist.size() < 3) continue;
        const double slope = std::abs(hist[0].diff - hist[1].diff) /
                             std::max(1e-300, std::abs(hist[0].h - hist[1].h));
        for (std::size_t k = 1; k + 1 < hist.size(); ++k) {
            const double step = std::abs(hist[k].diff - hist[k + 1].diff);
            const double allowed = 3.0 * (hist[k].se + hist[k + 1].se) + slope * hist[k].h +
                                   1e-10 * std::max(1.0, std::abs(hist[0].diff));
            report.conditions.push_back(EquilibriumCondition{
                deviations[d].describe() + " difference convergence at h=" +
                    std::to_string(hist[k + 1].h),
                step <= allowed, allowed - step, hist[k + 1].h});
        }
    }

    // terminal comparison, exact in closed form
    {
        const double c_T = premium(T);
        const double equilibrium_buy = theta * c_T <= 1.0 ? remaining : 0.0;
        for (double q : {0.0, 0.25, 0.5, 1.0}) {
            const double diff = (q * remaining - equilibrium_buy) * (theta * c_T - 1.0);
            report.conditions.push_back(EquilibriumCondition{
                "terminal buy fraction " + std::to_string(q),
                diff >= -1e-12 * std::max(1.0, remaining), diff, T});
        }
    }
    return report;
}

TimeSelectionResult time_selection_oracle(double t, double coverage, double reinsurer_exposure,
                                          const GameParameters& params, int n_grid,
                                          double markup) {
    validate(params);
    if (n_grid < 2) throw std::invalid_argument("n_grid must be >= 2");
    const double T = params.horizon.terminal_time;
    if (!(t >= 0.0 && t <= T)) throw std::domain_error("t must lie in [0, T]");

    const auto coords = coordinates(params);
    const auto label = classify(coords, params.reinsurer.reversion, T);
    const auto laws = equilibrium_law(label, coords, params.reinsurer.reversion, T);
    const auto premium = generate_premium(laws.laws.front(), params.insurer, params.horizon,
                                          markup);

    TimeSelectionResult out;
    out.candidate = purchase_time(t, premium, params.insurer, params.horizon);

    auto cost_at = [&](const PurchaseTime& p) {
        return reinsurer_cost(t, coverage, reinsurer_exposure, p, params);
    };

    out.no_sale_value = cost_at(PurchaseTime::never());
    out.global_min = PurchaseTime::never();
    out.global_min_value = out.no_sale_value;
    for (double s : linspace(t, T, n_grid)) {
        const double v = cost_at(PurchaseTime::at(s));
        if (v < out.global_min_value) {
            out.global_min_value = v;
            out.global_min = PurchaseTime::at(s);
        }
    }
    out.candidate_value = cost_at(out.candidate);

    const double h = std::max(1e-9, 1e-6 * std::max(T - t, 1.0));
    auto forward_margin = [&](const PurchaseTime& p) {
        if (!p.finite()) return 0.0;  // the perturbation cannot move "never"
        const double perturbed = std::min(T, std::max(p.time(), t + h));
        return (cost_at(PurchaseTime::at(perturbed)) - cost_at(p)) / h;
    };
    auto now_margin = [&](const PurchaseTime& p) { return cost_at(PurchaseTime::at(t)) - cost_at(p); };

    out.candidate_now_margin = now_margin(out.candidate);
    out.candidate_forward_margin = forward_margin(out.candidate);
    out.global_now_margin = now_margin(out.global_min);
    out.global_forward_margin = forward_margin(out.global_min);

    const double tol = 1e-9 * std::max(1.0, std::abs(out.no_sale_value));
    out.pass = out.candidate_now_margin >= -tol && out.candidate_forward_margin >= -tol &&
               out.global_now_margin >= -tol && out.global_forward_margin >= -tol;
    return out;
}

std::vector<PurchaseTime> sensitivity_sweep(const GameParameters& base, const std::string& name,
                                            const std::vector<double>& values,
                                            const PremiumPath& premium) {
    validate(base);
    std::vector<PurchaseTime> out;
    out.reserve(values.size());
    for (double v : values) {
        GameParameters params = base;
        if (name == "a_I") {
            params.insurer.drift_level = v;
        } else if (name == "b_I") {
            params.insurer.reversion = v;
        } else if (name == "sigma_I") {
            params.insurer.volatility = v;
        } else if (name == "gamma_I") {
            params.insurer.variance_weight = v;
        } else if (name == "theta_I") {
            params.insurer.premium_weight = v;
        } else if (name == "rho_I") {
            params.insurer.discount = v;
        } else {
            throw std::invalid_argument("unknown insurer parameter: " + name);
        }
        validate(params);
        out.push_back(purchase_time(0.0, premium, params.insurer, base.horizon));
    }
    return out;
}

}  // namespace reingame
