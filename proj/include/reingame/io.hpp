#pragma once

#include "reingame/model.hpp"
#include "reingame/regions.hpp"
#include "reingame/simulate.hpp"
#include "reingame/verify.hpp"

#include <nlohmann/json_fwd.hpp>

#include <filesystem>
#include <optional>
#include <string>

namespace reingame {

using ordered_json = nlohmann::ordered_json;

// Parameter file: the model constants plus optional run options that
// command-line flags override.
struct ParamsFile {
    GameParameters params;
    std::optional<double> x0, y0, z0;
    std::optional<long long> paths;
    std::optional<int> steps;
    std::optional<std::uint64_t> seed;
    std::optional<double> markup;
};

ParamsFile load_params_file(const std::filesystem::path& path);
ordered_json params_to_json(const GameParameters& params);

// Premium CSV with header "t,c"; must cover [0, T] starting at 0.
PremiumPath load_premium_csv(const std::filesystem::path& path);
void write_premium_csv(const std::filesystem::path& path, const PremiumPath& premium);

// Law CSV with header "interval_index,start,start_closed,end,end_closed,kind";
// kind is purchasing or waiting and the rows cover [0, T].
void write_law_csv(const std::filesystem::path& path, const ReinsuranceLaw& law);

void write_boundary_csv(const std::filesystem::path& path,
                        const std::vector<CurveSample>& samples);

void write_path_csv(const std::filesystem::path& path, const std::vector<double>& x_terminal,
                    const std::vector<double>& z_terminal, double premium_paid);

ordered_json objectives_to_json(const SimulatedObjectives& sim);
ordered_json residuals_to_json(const ResidualReport& report);
ordered_json equilibrium_to_json(const EquilibriumReport& report);
ordered_json time_selection_to_json(const TimeSelectionResult& result);

void write_json(const std::filesystem::path& path, const ordered_json& j);

}  // namespace reingame
