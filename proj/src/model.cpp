#include "reingame/model.hpp"

#include <algorithm>
#include <cmath>

namespace reingame {

namespace {

void require_positive(double v, const char* name) {
    if (!(v > 0.0)) {
        throw std::invalid_argument(std::string(name) + " must be positive");
    }
}

void require_finite(double v, const char* name) {
    if (!std::isfinite(v)) {
        throw std::invalid_argument(std::string(name) + " must be finite");
    }
}

}  // namespace

GameParameters validate(const GameParameters& params) {
    require_finite(params.insurer.drift_level, "a_I");
    require_positive(params.insurer.reversion, "b_I");
    require_positive(params.insurer.volatility, "sigma_I");
    require_positive(params.insurer.variance_weight, "gamma_I");
    require_positive(params.insurer.premium_weight, "theta_I");
    require_finite(params.insurer.discount, "rho_I");

    require_finite(params.reinsurer.drift_level, "a_R");
    require_positive(params.reinsurer.reversion, "b_R");
    require_positive(params.reinsurer.volatility, "sigma_R");
    require_positive(params.reinsurer.variance_weight, "gamma_R");
    require_positive(params.reinsurer.premium_weight, "theta_R");
    require_finite(params.reinsurer.discount, "rho_R");

    require_positive(params.horizon.terminal_time, "T");
    require_positive(params.horizon.ceiling, "y_bar");

    return params;
}

void validate_state(const GameState& state, const Horizon& horizon) {
    if (!std::isfinite(state.exposure) || !std::isfinite(state.reinsurer_exposure)) {
        throw std::invalid_argument("state exposures must be finite");
    }
    if (!(state.time >= 0.0 && state.time <= horizon.terminal_time)) {
        throw std::invalid_argument("t must lie in [0, T]");
    }
    if (!(state.coverage >= 0.0 && state.coverage <= horizon.ceiling)) {
        throw std::invalid_argument("y must lie in [0, y_bar]");
    }
}

PremiumPath::PremiumPath(std::vector<double> grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
    if (grid_.size() < 2 || grid_.size() != values_.size()) {
        throw std::invalid_argument("premium path needs matching grid/values with >= 2 points");
    }
    if (grid_.front() != 0.0) {
        throw std::invalid_argument("premium grid must start at 0");
    }
    for (std::size_t i = 0; i + 1 < grid_.size(); ++i) {
        if (!(grid_[i] < grid_[i + 1])) {
            throw std::invalid_argument("premium grid must be strictly increasing");
        }
    }
    for (double v : values_) {
        if (!(v >= 0.0) || !std::isfinite(v)) {
            throw std::invalid_argument("premium values must be nonnegative");
        }
    }
}

PremiumPath PremiumPath::constant(double terminal_time, double value) {
    return PremiumPath({0.0, terminal_time}, {value, value});
}

std::size_t PremiumPath::cell_index(double t) const {
    const double T = grid_.back();
    const double slack = 1e-12 * std::max(1.0, T);
    if (t < -slack || t > T + slack) {
        throw std::domain_error("time outside [0, T]");
    }
    t = std::clamp(t, 0.0, T);
    // largest i with grid[i] <= t
    auto it = std::upper_bound(grid_.begin(), grid_.end(), t);
    return static_cast<std::size_t>(std::distance(grid_.begin(), it)) - 1;
}

double PremiumPath::operator()(double t) const { return values_[cell_index(t)]; }

bool LawInterval::contains(double t) const {
    if (t < start || t > end) return false;
    if (t == start && !start_closed) return false;
    if (t == end && !end_closed) return false;
    return true;
}

ReinsuranceLaw::ReinsuranceLaw(std::vector<LawInterval> purchasing, double terminal_time)
    : purchasing_(std::move(purchasing)), terminal_(terminal_time) {
    if (!(terminal_ > 0.0)) {
        throw std::invalid_argument("law horizon must be positive");
    }
    std::sort(purchasing_.begin(), purchasing_.end(),
              [](const LawInterval& a, const LawInterval& b) { return a.start < b.start; });
    for (const auto& iv : purchasing_) {
        if (!(iv.start <= iv.end)) {
            throw std::invalid_argument("purchasing interval has start > end");
        }
        if (iv.start < 0.0 || iv.end > terminal_) {
            throw std::invalid_argument("purchasing interval outside [0, T]");
        }
        if (iv.is_point() && !(iv.start_closed && iv.end_closed)) {
            throw std::invalid_argument("degenerate interval must be closed");
        }
    }
    for (std::size_t i = 0; i + 1 < purchasing_.size(); ++i) {
        const auto& a = purchasing_[i];
        const auto& b = purchasing_[i + 1];
        const bool overlap =
            a.end > b.start || (a.end == b.start && a.end_closed && b.start_closed);
        if (overlap) {
            throw std::invalid_argument("purchasing intervals must be disjoint");
        }
    }
}

ReinsuranceLaw ReinsuranceLaw::no_purchase(double terminal_time) {
    return ReinsuranceLaw({}, terminal_time);
}

ReinsuranceLaw ReinsuranceLaw::full_horizon(double terminal_time) {
    return ReinsuranceLaw({LawInterval{0.0, terminal_time, true, true}}, terminal_time);
}

ReinsuranceLaw ReinsuranceLaw::terminal_only(double terminal_time) {
    return ReinsuranceLaw({LawInterval{terminal_time, terminal_time, true, true}}, terminal_time);
}

bool ReinsuranceLaw::contains(double t) const {
    for (const auto& iv : purchasing_) {
        if (iv.contains(t)) return true;
        if (iv.start > t) break;
    }
    return false;
}

bool ReinsuranceLaw::contains(double t, double tol) const {
    for (const auto& iv : purchasing_) {
        if (t >= iv.start - tol && t <= iv.end + tol) return true;
        if (iv.start - tol > t) break;
    }
    return false;
}

std::optional<double> ReinsuranceLaw::first_purchase_at_or_after(double t) const {
    for (const auto& iv : purchasing_) {
        if (iv.contains(t)) return t;
        const double entry = iv.start_closed ? iv.start : std::nextafter(iv.start, iv.end);
        if (entry >= t) return entry;
        if (!iv.start_closed && iv.start >= t && iv.end > iv.start) return iv.start;
    }
    return std::nullopt;
}

bool ReinsuranceLaw::approx_equal(const ReinsuranceLaw& other, double tol) const {
    if (purchasing_.size() != other.purchasing_.size()) return false;
    for (std::size_t i = 0; i < purchasing_.size(); ++i) {
        if (std::abs(purchasing_[i].start - other.purchasing_[i].start) > tol) return false;
        if (std::abs(purchasing_[i].end - other.purchasing_[i].end) > tol) return false;
    }
    return true;
}

}  // namespace reingame
