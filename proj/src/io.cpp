#include "reingame/io.hpp"

#include <nlohmann/json.hpp>

#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

namespace reingame {

namespace {

double require_number(const nlohmann::json& j, const std::string& key) {
    if (!j.contains(key)) {
        throw std::invalid_argument("missing field: " + key);
    }
    if (!j.at(key).is_number()) {
        throw std::invalid_argument("field is not a number: " + key);
    }
    return j.at(key).get<double>();
}

std::ofstream open_out(const std::filesystem::path& path) {
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path());
    }
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot open for writing: " + path.string());
    }
    out << std::setprecision(17);
    return out;
}

}  // namespace

ParamsFile load_params_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::invalid_argument("cannot open parameter file: " + path.string());
    }
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::parse_error& e) {
        throw std::invalid_argument("parameter file is not valid JSON: " + std::string(e.what()));
    }
    if (!j.is_object()) {
        throw std::invalid_argument("parameter file must hold a JSON object");
    }

    static const std::set<std::string> known = {
        "a_I",   "b_I", "sigma_I", "gamma_I", "theta_I", "rho_I", "a_R",   "b_R",
        "sigma_R", "gamma_R", "theta_R", "rho_R", "T",   "y_bar", "x0",    "y0",
        "z0",    "paths", "steps", "seed", "markup"};
    for (const auto& [key, value] : j.items()) {
        if (!known.count(key)) {
            throw std::invalid_argument("unknown field in parameter file: " + key);
        }
    }

    ParamsFile file;
    file.params.insurer.drift_level = require_number(j, "a_I");
    file.params.insurer.reversion = require_number(j, "b_I");
    file.params.insurer.volatility = require_number(j, "sigma_I");
    file.params.insurer.variance_weight = require_number(j, "gamma_I");
    file.params.insurer.premium_weight = require_number(j, "theta_I");
    file.params.insurer.discount = require_number(j, "rho_I");
    file.params.reinsurer.drift_level = require_number(j, "a_R");
    file.params.reinsurer.reversion = require_number(j, "b_R");
    file.params.reinsurer.volatility = require_number(j, "sigma_R");
    file.params.reinsurer.variance_weight = require_number(j, "gamma_R");
    file.params.reinsurer.premium_weight = require_number(j, "theta_R");
    file.params.reinsurer.discount = require_number(j, "rho_R");
    file.params.horizon.terminal_time = require_number(j, "T");
    file.params.horizon.ceiling = require_number(j, "y_bar");

    if (j.contains("x0")) file.x0 = j.at("x0").get<double>();
    if (j.contains("y0")) file.y0 = j.at("y0").get<double>();
    if (j.contains("z0")) file.z0 = j.at("z0").get<double>();
    if (j.contains("paths")) file.paths = j.at("paths").get<long long>();
    if (j.contains("steps")) file.steps = j.at("steps").get<int>();
    if (j.contains("seed")) file.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("markup")) file.markup = j.at("markup").get<double>();
    return file;
}

ordered_json params_to_json(const GameParameters& params) {
    ordered_json j;
    j["a_I"] = params.insurer.drift_level;
    j["b_I"] = params.insurer.reversion;
    j["sigma_I"] = params.insurer.volatility;
    j["gamma_I"] = params.insurer.variance_weight;
    j["theta_I"] = params.insurer.premium_weight;
    j["rho_I"] = params.insurer.discount;
    j["a_R"] = params.reinsurer.drift_level;
    j["b_R"] = params.reinsurer.reversion;
    j["sigma_R"] = params.reinsurer.volatility;
    j["gamma_R"] = params.reinsurer.variance_weight;
    j["theta_R"] = params.reinsurer.premium_weight;
    j["rho_R"] = params.reinsurer.discount;
    j["T"] = params.horizon.terminal_time;
    j["y_bar"] = params.horizon.ceiling;
    return j;
}

PremiumPath load_premium_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::invalid_argument("cannot open premium file: " + path.string());
    }
    std::string line;
    if (!std::getline(in, line)) {
        throw std::invalid_argument("empty premium file");
    }
    std::vector<double> grid, values;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream row(line);
        std::string t_str, c_str;
        if (!std::getline(row, t_str, ',') || !std::getline(row, c_str, ',')) {
            throw std::invalid_argument("malformed premium row: " + line);
        }
        grid.push_back(std::stod(t_str));
        values.push_back(std::stod(c_str));
    }
    return PremiumPath(std::move(grid), std::move(values));
}

void write_premium_csv(const std::filesystem::path& path, const PremiumPath& premium) {
    auto out = open_out(path);
    out << "t,c\n";
    for (std::size_t i = 0; i < premium.grid().size(); ++i) {
        out << premium.grid()[i] << "," << premium.values()[i] << "\n";
    }
}

void write_law_csv(const std::filesystem::path& path, const ReinsuranceLaw& law) {
    auto out = open_out(path);
    out << "interval_index,start,start_closed,end,end_closed,kind\n";
    int index = 0;
    double cursor = 0.0;
    bool cursor_closed = true;
    auto emit = [&](double a, bool ac, double b, bool bc, const char* kind) {
        out << index++ << "," << a << "," << (ac ? 1 : 0) << "," << b << "," << (bc ? 1 : 0)
            << "," << kind << "\n";
    };
    for (const auto& iv : law.intervals()) {
        if (iv.start > cursor || (iv.start == cursor && cursor_closed && !iv.start_closed)) {
            emit(cursor, cursor_closed, iv.start, !iv.start_closed, "waiting");
        }
        emit(iv.start, iv.start_closed, iv.end, iv.end_closed, "purchasing");
        cursor = iv.end;
        cursor_closed = !iv.end_closed;
    }
    if (cursor < law.terminal_time() || (cursor == law.terminal_time() && cursor_closed)) {
        emit(cursor, cursor_closed, law.terminal_time(), true, "waiting");
    }
}

void write_boundary_csv(const std::filesystem::path& path,
                        const std::vector<CurveSample>& samples) {
    auto out = open_out(path);
    out << "curve,d,r\n";
    for (const auto& s : samples) {
        out << s.curve << "," << s.d << "," << s.r << "\n";
    }
}

void write_path_csv(const std::filesystem::path& path, const std::vector<double>& x_terminal,
                    const std::vector<double>& z_terminal, double premium_paid) {
    if (x_terminal.size() != z_terminal.size()) {
        throw std::invalid_argument("terminal sample sizes differ");
    }
    auto out = open_out(path);
    out << "path_index,X_T,Z_T,premium_paid\n";
    for (std::size_t i = 0; i < x_terminal.size(); ++i) {
        out << i << "," << x_terminal[i] << "," << z_terminal[i] << "," << premium_paid << "\n";
    }
}

namespace {

ordered_json estimate_to_json(const McEstimate& e) {
    ordered_json j;
    j["mean"] = e.mean;
    j["std_error"] = e.std_error;
    j["n_paths"] = e.n_paths;
    j["seed"] = e.seed;
    return j;
}

}  // namespace

ordered_json objectives_to_json(const SimulatedObjectives& sim) {
    ordered_json j;
    j["j_insurer"] = estimate_to_json(sim.j_insurer);
    j["j_reinsurer"] = estimate_to_json(sim.j_reinsurer);
    j["mean_XT"] = estimate_to_json(sim.mean_XT);
    j["var_XT"] = estimate_to_json(sim.var_XT);
    j["premium_cost"] = estimate_to_json(sim.premium_cost);
    j["premium_reinsurer"] = estimate_to_json(sim.premium_reinsurer);
    if (sim.purchase_time_used.finite()) {
        j["purchase_time"] = sim.purchase_time_used.time();
    } else {
        j["purchase_time"] = "infinity";
    }
    return j;
}

ordered_json residuals_to_json(const ResidualReport& report) {
    ordered_json j;
    j["grid"] = report.grid_description;
    j["interior_waiting"] = report.interior_waiting;
    j["gradient_inequality"] = report.gradient_inequality;
    j["gradient_equality"] = report.gradient_equality;
    j["exposure_drift"] = report.exposure_drift;
    j["exposure_gradient"] = report.exposure_gradient;
    j["terminal_value"] = report.terminal_value;
    j["terminal_exposure"] = report.terminal_exposure;
    j["fd_derivative_error"] = report.fd_derivative_error;
    j["fd_points"] = report.fd_points;
    j["skipped_points"] = report.skipped_points;
    j["max_residual"] = report.max_residual();
    return j;
}

ordered_json equilibrium_to_json(const EquilibriumReport& report) {
    ordered_json j;
    j["pass"] = report.pass();
    j["worst_margin"] = report.worst_margin();
    ordered_json conditions = ordered_json::array();
    for (const auto& c : report.conditions) {
        ordered_json row;
        row["id"] = c.id;
        row["pass"] = c.pass;
        row["margin"] = c.margin;
        row["location"] = c.location;
        conditions.push_back(std::move(row));
    }
    j["conditions"] = std::move(conditions);
    return j;
}

ordered_json time_selection_to_json(const TimeSelectionResult& result) {
    ordered_json j;
    auto time_or_inf = [](const PurchaseTime& p) -> ordered_json {
        if (p.finite()) return p.time();
        return "infinity";
    };
    j["candidate"] = time_or_inf(result.candidate);
    j["candidate_value"] = result.candidate_value;
    j["global_min"] = time_or_inf(result.global_min);
    j["global_min_value"] = result.global_min_value;
    j["no_sale_value"] = result.no_sale_value;
    j["candidate_now_margin"] = result.candidate_now_margin;
    j["candidate_forward_margin"] = result.candidate_forward_margin;
    j["global_now_margin"] = result.global_now_margin;
    j["global_forward_margin"] = result.global_forward_margin;
    j["pass"] = result.pass;
    return j;
}

void write_json(const std::filesystem::path& path, const ordered_json& j) {
    auto out = open_out(path);
    out << j.dump(2) << "\n";
}

}  // namespace reingame
