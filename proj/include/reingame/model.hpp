#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace reingame {

// Annualized model constants of one risk-exposure process plus the weights
// of the mean-variance-premium objective attached to it.
struct InsurerParams {
    double drift_level = 0.0;      // a_I, risk units / year
    double reversion = 0.0;        // b_I, 1 / year, > 0
    double volatility = 0.0;       // sigma_I, risk units / sqrt(year), > 0
    double variance_weight = 0.0;  // gamma_I, > 0
    double premium_weight = 0.0;   // theta_I, > 0
    double discount = 0.0;         // rho_I, 1 / year, any sign

    friend bool operator==(const InsurerParams&, const InsurerParams&) = default;
};

struct ReinsurerParams {
    double drift_level = 0.0;      // a_R
    double reversion = 0.0;        // b_R, > 0
    double volatility = 0.0;       // sigma_R, > 0
    double variance_weight = 0.0;  // gamma_R, > 0
    double premium_weight = 0.0;   // theta_R, > 0
    double discount = 0.0;         // rho_R

    friend bool operator==(const ReinsurerParams&, const ReinsurerParams&) = default;
};

struct Horizon {
    double terminal_time = 0.0;  // T, years, > 0
    double ceiling = 0.0;        // maximum cumulative coverage, > 0

    friend bool operator==(const Horizon&, const Horizon&) = default;
};

struct GameParameters {
    InsurerParams insurer;
    ReinsurerParams reinsurer;
    Horizon horizon;

    friend bool operator==(const GameParameters&, const GameParameters&) = default;
};

// (x, t, y, z): insurer exposure, time, accumulated coverage, reinsurer exposure.
struct GameState {
    double exposure = 0.0;
    double time = 0.0;
    double coverage = 0.0;
    double reinsurer_exposure = 0.0;
};

// Checks every parameter constraint; returns the input unchanged on success.
// Throws std::invalid_argument naming the first violated field, e.g.
// "sigma_I must be positive".
GameParameters validate(const GameParameters& params);

// Checks 0 <= t <= T and 0 <= y <= ceiling.
void validate_state(const GameState& state, const Horizon& horizon);

// Deterministic nonnegative premium rate on [0, T], stored as a
// right-continuous step function: the value on [grid[i], grid[i+1]) is
// values[i] and the value at T is values.back(). Immutable once built.
class PremiumPath {
  public:
    PremiumPath(std::vector<double> grid, std::vector<double> values);

    static PremiumPath constant(double terminal_time, double value);
    // n grid points, values sampled at the points.
    template <typename F>
    static PremiumPath sampled(double terminal_time, int n, F&& rate) {
        std::vector<double> g(n), v(n);
        for (int i = 0; i < n; ++i) {
            g[i] = terminal_time * static_cast<double>(i) / (n - 1);
            v[i] = rate(g[i]);
        }
        g.back() = terminal_time;
        return PremiumPath(std::move(g), std::move(v));
    }

    double operator()(double t) const;

    // Index i of the cell [grid[i], grid[i+1]) containing t; n-1 for t == T.
    std::size_t cell_index(double t) const;

    const std::vector<double>& grid() const { return grid_; }
    const std::vector<double>& values() const { return values_; }
    double terminal_time() const { return grid_.back(); }

  private:
    std::vector<double> grid_;
    std::vector<double> values_;
};

// One purchasing interval of a time-only reinsurance law. Degenerate
// intervals (start == end, both closed) represent isolated purchase times.
struct LawInterval {
    double start = 0.0;
    double end = 0.0;
    bool start_closed = true;
    bool end_closed = true;

    bool contains(double t) const;
    bool is_point() const { return start == end; }
};

// Division of [0, T] into purchasing intervals and their complementary
// waiting set. Intervals are sorted, pairwise disjoint, and lie in [0, T].
class ReinsuranceLaw {
  public:
    ReinsuranceLaw(std::vector<LawInterval> purchasing, double terminal_time);

    static ReinsuranceLaw no_purchase(double terminal_time);
    static ReinsuranceLaw full_horizon(double terminal_time);
    static ReinsuranceLaw terminal_only(double terminal_time);

    bool contains(double t) const;
    bool contains(double t, double tol) const;

    // First purchasing time at or after t (interval starts and contained
    // points), if any.
    std::optional<double> first_purchase_at_or_after(double t) const;

    const std::vector<LawInterval>& intervals() const { return purchasing_; }
    double terminal_time() const { return terminal_; }
    bool empty() const { return purchasing_.empty(); }

    // Endpoint-wise comparison within a time tolerance; closed/open flags of
    // coinciding endpoints are not compared (a step premium cannot encode a
    // closed right endpoint at an interior time).
    bool approx_equal(const ReinsuranceLaw& other, double tol) const;

  private:
    std::vector<LawInterval> purchasing_;
    double terminal_ = 0.0;
};

}  // namespace reingame
