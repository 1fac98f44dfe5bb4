#include "reingame/closedform.hpp"
#include "reingame/io.hpp"
#include "reingame/model.hpp"
#include "reingame/regions.hpp"
#include "reingame/simulate.hpp"
#include "reingame/verify.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <filesystem>
#include <iostream>

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitInput = 3;
constexpr int kExitVerification = 4;

struct CommonOptions {
    std::string params_path;
    std::string out_dir;
    std::uint64_t seed = 1;
    long long paths = 100000;
    int steps = 64;
    int grid = 2000;
    double markup = 0.1;
    double x0 = 1.0;
    double y0 = 0.0;
    double z0 = 0.0;
    int threads = 1;
    std::string premium_csv;
    std::string dump_paths;
    double d_min = -1.0;
    double d_max = 1.0;
    int samples = 201;
};

void add_common(CLI::App* cmd, CommonOptions& opt) {
    cmd->add_option("--params", opt.params_path, "parameter JSON file")->required();
    cmd->add_option("--out", opt.out_dir, "output directory");
    cmd->add_option("--seed", opt.seed, "random seed");
    cmd->add_option("--paths", opt.paths, "Monte Carlo paths");
    cmd->add_option("--steps", opt.steps, "time steps per path");
    cmd->add_option("--grid", opt.grid, "verification grid size");
    cmd->add_option("--markup", opt.markup, "waiting-region premium markup");
    cmd->add_option("--x0", opt.x0, "initial insurer exposure");
    cmd->add_option("--y0", opt.y0, "initial coverage");
    cmd->add_option("--z0", opt.z0, "initial reinsurer exposure");
    cmd->add_option("--threads", opt.threads, "worker threads for simulation");
    cmd->add_option("--premium-csv", opt.premium_csv, "premium path CSV overriding the equilibrium premium");
    cmd->add_option("--dump-paths", opt.dump_paths, "write per-path terminal values to this CSV");
    cmd->add_option("--d-min", opt.d_min, "lower end of the d range");
    cmd->add_option("--d-max", opt.d_max, "upper end of the d range");
    cmd->add_option("--samples", opt.samples, "samples per boundary curve");
}

// flag > file > built-in default
void apply_file_options(const CLI::App* cmd, const reingame::ParamsFile& file,
                        CommonOptions& opt) {
    if (file.x0 && cmd->count("--x0") == 0) opt.x0 = *file.x0;
    if (file.y0 && cmd->count("--y0") == 0) opt.y0 = *file.y0;
    if (file.z0 && cmd->count("--z0") == 0) opt.z0 = *file.z0;
    if (file.paths && cmd->count("--paths") == 0) opt.paths = *file.paths;
    if (file.steps && cmd->count("--steps") == 0) opt.steps = *file.steps;
    if (file.seed && cmd->count("--seed") == 0) opt.seed = *file.seed;
    if (file.markup && cmd->count("--markup") == 0) opt.markup = *file.markup;
}

std::filesystem::path out_path(const CommonOptions& opt, const std::string& name) {
    if (opt.out_dir.empty()) return name;
    return std::filesystem::path(opt.out_dir) / name;
}

reingame::PremiumPath resolve_premium(const CommonOptions& opt,
                                      const reingame::GameParameters& params,
                                      reingame::ReinsuranceLaw* law_out) {
    using namespace reingame;
    if (!opt.premium_csv.empty()) {
        PremiumPath premium = load_premium_csv(opt.premium_csv);
        if (premium.terminal_time() != params.horizon.terminal_time) {
            throw std::length_error("premium CSV does not cover [0, T]");
        }
        if (law_out) *law_out = insurer_law(premium, params.insurer, params.horizon);
        return premium;
    }
    const auto coords = coordinates(params);
    const auto label = classify(coords, params.reinsurer.reversion, params.horizon.terminal_time);
    const auto laws =
        equilibrium_law(label, coords, params.reinsurer.reversion, params.horizon.terminal_time);
    if (law_out) *law_out = laws.laws.front();
    return generate_premium(laws.laws.front(), params.insurer, params.horizon, opt.markup);
}

int cmd_classify(const CLI::App* cmd, CommonOptions& opt) {
    using namespace reingame;
    const auto file = load_params_file(opt.params_path);
    apply_file_options(cmd, file, opt);
    const auto params = validate(file.params);
    const auto coords = coordinates(params);
    const auto label =
        classify(coords, params.reinsurer.reversion, params.horizon.terminal_time);
    std::cout << "(r, d) = (" << coords.r << ", " << coords.d << "), region "
              << to_string(label.region) << " (" << to_string(label.kind) << ")\n";
    if (!opt.out_dir.empty()) {
        ordered_json j;
        j["r"] = coords.r;
        j["d"] = coords.d;
        j["region"] = to_string(label.region);
        j["kind"] = to_string(label.kind);
        write_json(out_path(opt, "classify.json"), j);
    }
    return 0;
}

int cmd_premium(const CLI::App* cmd, CommonOptions& opt) {
    using namespace reingame;
    const auto file = load_params_file(opt.params_path);
    apply_file_options(cmd, file, opt);
    const auto params = validate(file.params);
    if (!(opt.markup > 0.0)) {
        std::cerr << "markup must be strictly positive\n";
        return kExitConfig;
    }
    const auto coords = coordinates(params);
    const auto label =
        classify(coords, params.reinsurer.reversion, params.horizon.terminal_time);
    const auto laws =
        equilibrium_law(label, coords, params.reinsurer.reversion, params.horizon.terminal_time);
    if (laws.any_division) {
        std::cout << "warning: every division of [0, T] is an equilibrium here; "
                     "emitting the terminal-purchase default\n";
    }
    const bool suffixed = laws.laws.size() > 1;
    for (std::size_t i = 0; i < laws.laws.size(); ++i) {
        const std::string suffix = suffixed ? "_" + std::to_string(i + 1) : "";
        const auto premium =
            generate_premium(laws.laws[i], params.insurer, params.horizon, opt.markup);
        write_premium_csv(out_path(opt, "premium" + suffix + ".csv"), premium);
        write_law_csv(out_path(opt, "law" + suffix + ".csv"), laws.laws[i]);
    }
    std::cout << "region " << to_string(label.region) << ": wrote " << laws.laws.size()
              << " premium/law pair" << (suffixed ? "s" : "") << "\n";
    return 0;
}

int cmd_simulate(const CLI::App* cmd, CommonOptions& opt) {
    using namespace reingame;
    const auto file = load_params_file(opt.params_path);
    apply_file_options(cmd, file, opt);
    const auto params = validate(file.params);

    ReinsuranceLaw law = ReinsuranceLaw::no_purchase(params.horizon.terminal_time);
    const auto premium = resolve_premium(opt, params, &law);

    const GameState state{opt.x0, 0.0, opt.y0, opt.z0};
    const McConfig mc{opt.paths, opt.steps, opt.seed};
    const auto sim = simulate(state, premium, params, mc, opt.threads);

    const double value = insurer_value(state, premium, params.insurer, params.horizon);
    const double mean_exposure =
        expected_terminal_exposure(state, premium, params.insurer, params.horizon);
    const double cost =
        reinsurer_cost(0.0, opt.y0, opt.z0, sim.purchase_time_used, params);

    ordered_json j = objectives_to_json(sim);
    ordered_json closed;
    closed["insurer_value"] = value;
    closed["expected_terminal_exposure"] = mean_exposure;
    closed["reinsurer_cost"] = cost;
    j["closed_form"] = std::move(closed);
    ordered_json z;
    auto zscore = [](double estimate, double target, double se) {
        return se > 0.0 ? (estimate - target) / se : estimate - target;
    };
    z["j_insurer"] = zscore(sim.j_insurer.mean, value, sim.j_insurer.std_error);
    z["mean_XT"] = zscore(sim.mean_XT.mean, mean_exposure, sim.mean_XT.std_error);
    z["j_reinsurer"] = zscore(sim.j_reinsurer.mean, cost, sim.j_reinsurer.std_error);
    j["z_scores"] = std::move(z);

    std::cout << j.dump(2) << "\n";
    if (!opt.out_dir.empty()) {
        write_json(out_path(opt, "simulate.json"), j);
    }
    if (!opt.dump_paths.empty()) {
        ControlSchedule schedule;
        const double remaining = params.horizon.ceiling - opt.y0;
        if (sim.purchase_time_used.finite() && remaining > 0.0) {
            schedule.purchases.emplace_back(sim.purchase_time_used.time(), remaining);
        }
        std::vector<double> extras;
        for (const auto& [time, amount] : schedule.purchases) extras.push_back(time);
        const auto times =
            build_time_grid(0.0, params.horizon.terminal_time, opt.steps, extras);
        std::vector<std::pair<double, double>> minus, plus;
        for (const auto& [time, amount] : schedule.purchases) {
            minus.emplace_back(time, -amount);
            plus.emplace_back(time, amount);
        }
        const OuParams oi{params.insurer.drift_level, params.insurer.reversion,
                          params.insurer.volatility};
        const OuParams orr{params.reinsurer.drift_level, params.reinsurer.reversion,
                           params.reinsurer.volatility};
        const auto xt =
            sample_terminal(opt.x0, oi, times, minus, opt.paths, opt.seed, 0, opt.threads);
        const auto zt =
            sample_terminal(opt.z0, orr, times, plus, opt.paths, opt.seed, 1, opt.threads);
        write_path_csv(opt.dump_paths, xt, zt, sim.premium_cost.mean);
    }
    return 0;
}

int cmd_verify(const CLI::App* cmd, CommonOptions& opt) {
    using namespace reingame;
    const auto file = load_params_file(opt.params_path);
    apply_file_options(cmd, file, opt);
    const auto params = validate(file.params);
    if (opt.grid < 8) {
        std::cout << "warning: grid size " << opt.grid
                  << " is too coarse for meaningful residuals\n";
    }

    ReinsuranceLaw law = ReinsuranceLaw::no_purchase(params.horizon.terminal_time);
    const auto premium = resolve_premium(opt, params, &law);

    HjbGrid grid;
    grid.n_t = std::max(2, opt.grid);
    grid.n_x = std::max(2, opt.grid / 2);
    grid.n_y = std::max(2, opt.grid / 10);
    const auto residuals = check_hjb(premium, params, grid);

    const auto reinsurer_eq = check_reinsurer_equilibrium(law, params, std::max(2, opt.grid));

    const auto oracle =
        time_selection_oracle(0.0, opt.y0, opt.z0, params, std::max(2, opt.grid), opt.markup);

    const GameState state{opt.x0, 0.0, opt.y0, opt.z0};
    const McConfig mc{opt.paths, std::min(opt.steps, 16), opt.seed};
    const double T = params.horizon.terminal_time;
    const std::vector<double> h_values = {0.1 * T, 0.05 * T, 0.025 * T, 0.0125 * T};
    const auto insurer_eq = check_insurer_equilibrium(state, premium, params, mc,
                                                      default_insurer_deviations(), h_values,
                                                      opt.threads);

    bool monotone_ok = true;
    {
        auto sweep_values = [](double center) {
            return std::vector<double>{0.6 * center, 0.8 * center, center, 1.2 * center,
                                       1.4 * center};
        };
        auto non_decreasing = [](const std::vector<PurchaseTime>& times) {
            for (std::size_t i = 0; i + 1 < times.size(); ++i) {
                if (!times[i].finite()) continue;  // infinity dominates everything after it
                if (!times[i + 1].finite()) continue;
                if (times[i + 1].time() < times[i].time() - 1e-9) return false;
            }
            return true;
        };
        auto all_equal = [](const std::vector<PurchaseTime>& times) {
            for (std::size_t i = 1; i < times.size(); ++i) {
                if (!(times[i] == times[0])) return false;
            }
            return true;
        };
        monotone_ok =
            non_decreasing(sensitivity_sweep(
                params, "theta_I", sweep_values(params.insurer.premium_weight), premium)) &&
            non_decreasing(sensitivity_sweep(params, "b_I",
                                             sweep_values(params.insurer.reversion), premium)) &&
            non_decreasing(sensitivity_sweep(
                params, "rho_I",
                sweep_values(params.insurer.discount == 0.0 ? 0.05 : params.insurer.discount),
                premium)) &&
            all_equal(sensitivity_sweep(params, "a_I",
                                        sweep_values(params.insurer.drift_level == 0.0
                                                         ? 0.05
                                                         : params.insurer.drift_level),
                                        premium)) &&
            all_equal(sensitivity_sweep(params, "sigma_I",
                                        sweep_values(params.insurer.volatility), premium)) &&
            all_equal(sensitivity_sweep(params, "gamma_I",
                                        sweep_values(params.insurer.variance_weight), premium));
    }

    const bool hjb_ok = residuals.max_residual() <= 1e-8 &&
                        (!grid.fd_check || residuals.fd_derivative_error <= 1e-6);

    ordered_json j;
    j["hjb"] = residuals_to_json(residuals);
    j["hjb"]["pass"] = hjb_ok;
    j["reinsurer_equilibrium"] = equilibrium_to_json(reinsurer_eq);
    j["time_selection"] = time_selection_to_json(oracle);
    j["insurer_equilibrium"] = equilibrium_to_json(insurer_eq);
    j["sensitivity_monotone"] = monotone_ok;
    std::cout << j.dump(2) << "\n";
    if (!opt.out_dir.empty()) {
        write_json(out_path(opt, "verify.json"), j);
    }

    if (!hjb_ok || !reinsurer_eq.pass() || !oracle.pass || !insurer_eq.pass() || !monotone_ok) {
        double worst = residuals.max_residual();
        std::string what = "hjb residual";
        if (!reinsurer_eq.pass()) {
            worst = reinsurer_eq.worst_margin();
            what = "reinsurer condition " + reinsurer_eq.worst()->id;
        } else if (!insurer_eq.pass()) {
            worst = insurer_eq.worst_margin();
            what = "insurer condition " + insurer_eq.worst()->id;
        } else if (!oracle.pass) {
            worst = std::min({oracle.candidate_now_margin, oracle.candidate_forward_margin,
                              oracle.global_now_margin, oracle.global_forward_margin});
            what = "time selection";
        } else if (!monotone_ok) {
            what = "sensitivity monotonicity";
        }
        std::cerr << "verification failed: " << what << " (worst margin " << worst << ")\n";
        return kExitVerification;
    }
    return 0;
}

int cmd_figures(const CLI::App* cmd, CommonOptions& opt) {
    using namespace reingame;
    const auto file = load_params_file(opt.params_path);
    apply_file_options(cmd, file, opt);
    const auto params = validate(file.params);
    if (!(opt.d_min < opt.d_max) || opt.samples < 2) {
        std::cerr << "invalid d range or sample count\n";
        return kExitConfig;
    }
    const auto samples = boundary_curves(params.reinsurer.reversion,
                                         params.horizon.terminal_time, opt.d_min, opt.d_max,
                                         opt.samples);
    write_boundary_csv(out_path(opt, "boundaries.csv"), samples);
    const bool long_term =
        params.horizon.terminal_time > 1.0 / params.reinsurer.reversion;
    std::cout << "wrote boundaries.csv (" << (long_term ? "long" : "short") << "-term case)\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"equilibrium engine for the irreversible-reinsurance premium game"};
    app.require_subcommand(1);

    CommonOptions opt;
    auto* classify_cmd = app.add_subcommand("classify", "report the (r, d) region");
    auto* premium_cmd = app.add_subcommand("premium", "emit equilibrium premium and law CSVs");
    auto* simulate_cmd = app.add_subcommand("simulate", "Monte Carlo objectives vs closed forms");
    auto* verify_cmd = app.add_subcommand("verify", "run the full equilibrium check suite");
    auto* figures_cmd = app.add_subcommand("figures", "emit region boundary curves");
    for (auto* cmd : {classify_cmd, premium_cmd, simulate_cmd, verify_cmd, figures_cmd}) {
        add_common(cmd, opt);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    try {
        if (classify_cmd->parsed()) return cmd_classify(classify_cmd, opt);
        if (premium_cmd->parsed()) return cmd_premium(premium_cmd, opt);
        if (simulate_cmd->parsed()) return cmd_simulate(simulate_cmd, opt);
        if (verify_cmd->parsed()) return cmd_verify(verify_cmd, opt);
        if (figures_cmd->parsed()) return cmd_figures(figures_cmd, opt);
    } catch (const std::length_error& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kExitInput;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    }
    return kExitConfig;
}
