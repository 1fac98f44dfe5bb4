#include "reingame/regions.hpp"

#include "reingame/closedform.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace reingame {

std::string to_string(Region region) {
    switch (region) {
        case Region::I: return "I";
        case Region::II: return "II";
        case Region::III: return "III";
        case Region::IV: return "IV";
        case Region::V: return "V";
        case Region::VI: return "VI";
        case Region::VII: return "VII";
        case Region::VIII: return "VIII";
    }
    return "?";
}

std::string to_string(RegionKind kind) {
    switch (kind) {
        case RegionKind::Area: return "area";
        case RegionKind::Line: return "line";
        case RegionKind::Point: return "point";
    }
    return "?";
}

PreferenceCoordinates coordinates(const GameParameters& params) {
    PreferenceCoordinates c;
    c.r = params.insurer.premium_weight / params.reinsurer.premium_weight;
    c.d = (params.insurer.reversion + params.insurer.discount) -
          (params.reinsurer.reversion + params.reinsurer.discount);
    return c;
}

namespace {

struct Margins {
    double unit;         // r - 1
    double axis;         // d
    double exp_curve;    // r - exp(-T d)
    double affine;       // r - (1 + d/b_R)
    double affine_exp;   // r - (1 + d/b_R) exp(-T d)
};

Margins margins_at(const PreferenceCoordinates& c, double b_r, double T) {
    Margins m;
    m.unit = c.r - 1.0;
    m.axis = c.d;
    m.exp_curve = c.r - std::exp(-T * c.d);
    m.affine = c.r - (1.0 + c.d / b_r);
    m.affine_exp = c.r - (1.0 + c.d / b_r) * std::exp(-T * c.d);
    return m;
}

void guard_tie(double margin, double scale, const char* boundary) {
    if (margin != 0.0 && std::abs(margin) <= 1e-12 * scale) {
        throw BoundaryTie(std::string("coordinates within floating-point tolerance of boundary ") +
                          boundary);
    }
}

}  // namespace

bool region_matches(Region region, const PreferenceCoordinates& c, double b_r, double T) {
    const Margins m = margins_at(c, b_r, T);
    const bool in_viii = m.unit > 0.0 && m.axis < 0.0 && m.affine_exp < 0.0;
    switch (region) {
        case Region::I: return m.unit > 0.0 && m.exp_curve > 0.0;
        case Region::II: return m.unit > 0.0 && m.exp_curve <= 0.0 && !in_viii;
        case Region::III: return m.unit <= 0.0 && m.affine_exp >= 0.0 && m.axis < 0.0;
        case Region::IV: return m.unit <= 0.0 && m.affine_exp < 0.0 && m.affine >= 0.0;
        case Region::V: return m.unit < 0.0 && m.affine < 0.0;
        case Region::VI: return m.unit == 0.0 && m.axis > 0.0;
        case Region::VII: return m.unit == 0.0 && m.axis == 0.0;
        case Region::VIII: return in_viii;
    }
    return false;
}

RegionLabel classify(const PreferenceCoordinates& coords, double b_r, double T) {
    if (!(coords.r > 0.0)) throw std::invalid_argument("r must be positive");
    if (!(b_r > 0.0)) throw std::invalid_argument("b_R must be positive");
    if (!(T > 0.0)) throw std::invalid_argument("T must be positive");

    const Margins m = margins_at(coords, b_r, T);
    const double scale = std::max(1.0, std::abs(coords.r));
    guard_tie(m.unit, scale, "r = 1");
    if (coords.r >= 1.0) {
        guard_tie(m.exp_curve, scale, "r = exp(-T d)");
    }
    if (coords.r == 1.0) {
        guard_tie(m.axis, std::max(1.0, std::abs(coords.d)), "d = 0");
    }
    if (!(coords.r > 1.0 && m.exp_curve > 0.0)) {
        guard_tie(m.affine_exp, scale, "r = (1 + d/b_R) exp(-T d)");
    }
    if (coords.r < 1.0) {
        guard_tie(m.affine, scale, "r = 1 + d/b_R");
    }

    Region found = Region::I;
    int matches = 0;
    for (Region reg : {Region::I, Region::II, Region::III, Region::IV, Region::V, Region::VI,
                       Region::VII, Region::VIII}) {
        if (region_matches(reg, coords, b_r, T)) {
            found = reg;
            ++matches;
        }
    }
    if (matches != 1) {
        throw BoundaryTie("coordinates match " + std::to_string(matches) +
                          " regions; expected exactly one");
    }
    RegionLabel label;
    label.region = found;
    label.kind = found == Region::VI   ? RegionKind::Line
                 : found == Region::VII ? RegionKind::Point
                                        : RegionKind::Area;
    return label;
}

double startup_time(const PreferenceCoordinates& coords, double b_r, double T) {
    return T + std::log(b_r * coords.r / (b_r + coords.d)) / coords.d;
}

double cutoff_time(const PreferenceCoordinates& coords, double T) {
    return T + std::log(coords.r) / coords.d;
}

EquilibriumLaws equilibrium_law(const RegionLabel& label, const PreferenceCoordinates& coords,
                                double b_r, double T) {
    EquilibriumLaws out;
    auto clamp_time = [T](double t) { return std::clamp(t, 0.0, T); };
    switch (label.region) {
        case Region::I:
            out.laws.push_back(ReinsuranceLaw::no_purchase(T));
            break;
        case Region::II: {
            const double cutoff = clamp_time(cutoff_time(coords, T));
            out.laws.push_back(ReinsuranceLaw({LawInterval{0.0, cutoff, true, true}}, T));
            break;
        }
        case Region::III:
            out.laws.push_back(ReinsuranceLaw::full_horizon(T));
            break;
        case Region::IV: {
            const double start = clamp_time(startup_time(coords, b_r, T));
            out.laws.push_back(ReinsuranceLaw({LawInterval{start, T, true, true}}, T));
            break;
        }
        case Region::V:
            out.laws.push_back(ReinsuranceLaw::terminal_only(T));
            break;
        case Region::VI:
            out.laws.push_back(ReinsuranceLaw::terminal_only(T));
            out.laws.push_back(ReinsuranceLaw::no_purchase(T));
            break;
        case Region::VII:
            out.laws.push_back(ReinsuranceLaw::terminal_only(T));
            out.any_division = true;
            break;
        case Region::VIII: {
            const double start = clamp_time(startup_time(coords, b_r, T));
            const double cutoff = clamp_time(cutoff_time(coords, T));
            out.laws.push_back(ReinsuranceLaw({LawInterval{start, cutoff, true, true}}, T));
            break;
        }
    }
    return out;
}

PremiumPath generate_premium(const ReinsuranceLaw& law, const InsurerParams& insurer,
                             const Horizon& horizon, double markup, int n_grid) {
    if (!(markup > 0.0)) {
        throw std::invalid_argument("markup must be positive");
    }
    if (n_grid < 2) {
        throw std::invalid_argument("premium grid needs at least 2 points");
    }
    const double T = horizon.terminal_time;
    for (const auto& iv : law.intervals()) {
        if (iv.is_point() && iv.start < T) {
            throw std::invalid_argument(
                "isolated purchasing time before T cannot be sampled onto a step premium");
        }
    }

    std::set<double> points;
    for (int i = 0; i < n_grid; ++i) {
        points.insert(T * static_cast<double>(i) / (n_grid - 1));
    }
    points.insert(T);
    for (const auto& iv : law.intervals()) {
        points.insert(iv.start);
        points.insert(iv.end);
    }
    std::vector<double> grid(points.begin(), points.end());

    std::vector<double> values(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        // cell membership decided at the midpoint; the last entry is the
        // value at T itself
        const double probe = (i + 1 < grid.size()) ? 0.5 * (grid[i] + grid[i + 1]) : T;
        const bool purchasing = law.contains(probe);
        const double base = purchase_threshold(grid[i], insurer, horizon);
        values[i] = purchasing ? base : base * (1.0 + markup);
    }
    return PremiumPath(std::move(grid), std::move(values));
}

ReinsuranceLaw insurer_law(const PremiumPath& premium, const InsurerParams& insurer,
                           const Horizon& horizon) {
    const double T = horizon.terminal_time;
    const auto& grid = premium.grid();
    const auto& values = premium.values();
    auto threshold = [&](double s) { return purchase_threshold(s, insurer, horizon); };

    std::vector<LawInterval> intervals;
    auto push = [&intervals](double start, bool start_closed, double end, bool end_closed) {
        if (!intervals.empty()) {
            LawInterval& prev = intervals.back();
            const bool contiguous =
                prev.end == start && (prev.end_closed || start_closed);
            if (contiguous) {
                prev.end = end;
                prev.end_closed = end_closed;
                return;
            }
        }
        intervals.push_back(LawInterval{start, end, start_closed, end_closed});
    };

    for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
        const double lo = grid[i];
        const double hi = grid[i + 1];
        const double level = values[i];
        const double th_lo = threshold(lo);
        const double th_hi = threshold(hi);
        if (level <= std::min(th_lo, th_hi)) {
            push(lo, true, hi, false);
            continue;
        }
        if (level > std::max(th_lo, th_hi)) {
            continue;
        }
        // one crossing inside the cell; bisect on the side where the
        // condition holds
        double a = lo, b = hi;
        const bool holds_at_lo = level <= th_lo;
        for (int iter = 0; iter < 60 && (b - a) > 1e-12; ++iter) {
            const double mid = 0.5 * (a + b);
            const bool holds = level <= threshold(mid);
            if (holds == holds_at_lo) {
                a = mid;
            } else {
                b = mid;
            }
        }
        if (holds_at_lo) {
            push(lo, true, a, true);  // threshold decreasing through the level
        } else {
            push(b, true, hi, false);  // threshold increasing through the level
        }
    }
    if (values.back() <= threshold(T)) {
        push(T, true, T, true);
    }
    return ReinsuranceLaw(std::move(intervals), T);
}

std::vector<CurveSample> boundary_curves(double b_r, double T, double d_min, double d_max, int n) {
    if (n < 2) throw std::invalid_argument("need at least 2 samples per curve");
    if (!(d_min < d_max)) throw std::invalid_argument("empty d range");
    std::vector<CurveSample> out;
    out.reserve(static_cast<std::size_t>(n) * 5);
    double r_max = 1.0;
    for (int i = 0; i < n; ++i) {
        const double d = d_min + (d_max - d_min) * static_cast<double>(i) / (n - 1);
        const double exp_decay = std::exp(-T * d);
        const double affine = 1.0 + d / b_r;
        const double rows[4] = {1.0, exp_decay, affine, affine * exp_decay};
        const char* names[4] = {"r_unit", "r_exp", "r_affine", "r_affine_exp"};
        for (int k = 0; k < 4; ++k) {
            if (rows[k] >= 0.0) {
                out.push_back(CurveSample{names[k], d, rows[k]});
                r_max = std::max(r_max, rows[k]);
            }
        }
    }
    for (int i = 0; i < n; ++i) {
        const double r = r_max * static_cast<double>(i + 1) / n;
        out.push_back(CurveSample{"d_axis", 0.0, r});
    }
    return out;
}

}  // namespace reingame
